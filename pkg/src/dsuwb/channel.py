"""Indoor LOS multipath channel (802.15.3a CM1 profile) as a tapped delay line.

A realization is drawn from the classic cluster/ray double-Poisson process:
cluster arrivals at rate ``cluster_rate``, ray arrivals inside each cluster at
``ray_rate``, mean tap power decaying exponentially in both the cluster and the
ray delay, lognormal shadowing on each, and random polarity. Taps beyond the
maximum delay spread are discarded, the first cluster and its first ray sit at
delay zero (the line-of-sight path; absolute propagation delay is handled by
the timing model, not the channel), and gains are renormalized to unit total
energy so per-symbol SNR is well defined across realizations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .waveform import SampledWaveform


@dataclass(frozen=True)
class SVParameters:
    """Cluster/ray process parameters. Rates in 1/ns, decays and spread in ns, shadowing in dB."""

    cluster_rate: float = 0.0233
    ray_rate: float = 2.5
    cluster_decay: float = 7.1
    ray_decay: float = 4.3
    lognormal_sigma_db: float = 3.3941
    max_delay_spread: float = 10.0

    def __post_init__(self):
        if self.cluster_rate < 0 or self.ray_rate < 0:
            raise ConfigurationError("arrival rates must be non-negative")
        if self.cluster_decay <= 0 or self.ray_decay <= 0:
            raise ConfigurationError("decay constants must be positive")
        if self.max_delay_spread <= 0:
            raise ConfigurationError("max_delay_spread must be positive")


#: Indoor LOS (0-4 m) profile with a 10 ns maximum delay spread.
CM1 = SVParameters()


@dataclass(frozen=True)
class ChannelRealization:
    """Tapped delay line: strictly increasing delays (ns) and unit-energy gains."""

    delays: np.ndarray
    gains: np.ndarray
    max_delay_spread: float

    def __post_init__(self):
        object.__setattr__(self, "delays", np.asarray(self.delays, dtype=np.float64))
        object.__setattr__(self, "gains", np.asarray(self.gains, dtype=np.float64))
        if len(self.delays) != len(self.gains) or len(self.delays) == 0:
            raise ConfigurationError("need matching, non-empty delay and gain arrays")
        if np.any(np.diff(self.delays) <= 0):
            raise ConfigurationError("tap delays must be strictly increasing")
        if self.delays[-1] > self.max_delay_spread:
            raise ConfigurationError("tap delay exceeds max_delay_spread")

    @property
    def taps(self) -> list[tuple[float, float]]:
        return list(zip(self.delays.tolist(), self.gains.tolist()))

    def total_gain_energy(self) -> float:
        return float(np.sum(self.gains * self.gains))


def draw_cm1(params: SVParameters = CM1, rng_seed=0) -> ChannelRealization:
    """Draw one channel realization; deterministic for a given seed.

    ``rng_seed`` may be anything ``numpy.random.default_rng`` accepts,
    including an existing Generator.
    """
    rng = np.random.default_rng(rng_seed)
    sigma = params.lognormal_sigma_db * np.log(10.0) / 20.0
    tmax = params.max_delay_spread
    delays = []
    gains = []
    cluster_t = 0.0
    while cluster_t <= tmax:
        ray_t = 0.0
        while cluster_t + ray_t <= tmax:
            mean_power = np.exp(-cluster_t / params.cluster_decay) * np.exp(-ray_t / params.ray_decay)
            shadowing = np.exp(sigma * (rng.standard_normal() + rng.standard_normal()))
            polarity = 1.0 if rng.random() < 0.5 else -1.0
            delays.append(cluster_t + ray_t)
            gains.append(polarity * np.sqrt(mean_power) * shadowing)
            if params.ray_rate <= 0:
                break
            ray_t += rng.exponential(1.0 / params.ray_rate)
        if params.cluster_rate <= 0:
            break
        cluster_t += rng.exponential(1.0 / params.cluster_rate)

    order = np.argsort(delays)
    d = np.asarray(delays)[order]
    g = np.asarray(gains)[order]
    # merge coincident arrivals so delays stay strictly increasing
    keep_d, keep_g = [d[0]], [g[0]]
    for di, gi in zip(d[1:], g[1:]):
        if di - keep_d[-1] < 1e-12:
            keep_g[-1] += gi
        else:
            keep_d.append(di)
            keep_g.append(gi)
    g = np.asarray(keep_g)
    g /= np.sqrt(np.sum(g * g))
    if g[0] < 0:
        g = -g  # global sign is unobservable; keep the LOS tap positive
    return ChannelRealization(np.asarray(keep_d), g, tmax)


def received_pulse(chan: ChannelRealization, pulse: SampledWaveform) -> SampledWaveform:
    """Per-frame received waveform: the pulse convolved with the tapped delay line.

    Tap delays are rounded to the sample grid (error at most half a sample,
    far below the pulse width). The support is at most pulse width plus the
    maximum delay spread.
    """
    period = pulse.sample_period
    n = int(round(chan.max_delay_spread / period)) + len(pulse.samples)
    out = np.zeros(n)
    for d, g in zip(chan.delays, chan.gains):
        i = int(round(d / period))
        out[i:i + len(pulse.samples)] += g * pulse.samples
    return SampledWaveform(period, out, pulse.origin)
