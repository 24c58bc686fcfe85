"""Baseband DS-UWB link simulation: blind block-code timing acquisition,
block-differential detection, CM1 multipath, and a Monte Carlo harness."""

from .channel import CM1, ChannelRealization, SVParameters, draw_cm1, received_pulse
from .codes import (CodePlan, hadamard_family, orthogonal_pn_family,
                    partial_correlation_score, random_code_plan, select_family)
from .errors import ConfigurationError, UsageError
from .harness import (ExperimentConfig, MultiuserConfig, TrialResult, UserConfig,
                      build_code_plan, run_experiment, run_multiuser_trial, run_trial)
from .modem import (BitBurst, DetectionResult, FrameTiming, detect, encode,
                    symbol_waveform, synthesize)
from .sync import (ObjectiveDecomposition, SyncEstimate, TimingTruth, acquire,
                   analytic_objective, block_correlations, frame_decomposition,
                   multiuser_acquire, objective)
from .waveform import (DEFAULT_SAMPLE_PERIOD, PulseShape, SampledWaveform, SampleGrid,
                       delay, render_monocycle, windowed_inner_product)

__version__ = "0.1.0"
