"""Block-differential encoding, transmit synthesis, and non-coherent detection.

Every symbol is a train of ``frames_per_symbol`` pulses, one per frame, with
per-frame polarities set by the symbol amplitude times the spreading code of
the symbol's position within its block. Information rides on the sign relation
between symbols one block apart, so the detector needs no channel knowledge:
it correlates the received signal with its replica delayed by a whole block
and takes the sign.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .codes import CodePlan
from .errors import UsageError
from .waveform import SampleGrid, SampledWaveform


@dataclass(frozen=True)
class FrameTiming:
    """Frame duration (ns) and frames per symbol; the symbol spans their product."""

    frame_ns: float = 10.0
    frames_per_symbol: int = 16

    @property
    def symbol_ns(self) -> float:
        return self.frame_ns * self.frames_per_symbol

    def frame_samples(self, sample_period: float) -> int:
        return SampleGrid(sample_period).to_samples(self.frame_ns)

    def symbol_samples(self, sample_period: float) -> int:
        return self.frame_samples(sample_period) * self.frames_per_symbol


@dataclass(frozen=True)
class BitBurst:
    """Info bits and their block-differential encoding with an all-ones reference block.

    ``encoded[m] = bits[m - M] * encoded[m - M]`` for m >= M, seeded by the
    M reference symbols, so decoding is the involution
    ``bits[m - M] = encoded[m] * encoded[m - M]``.
    """

    bits: np.ndarray
    encoded: np.ndarray
    block_size: int


def encode(bits, block_size: int) -> BitBurst:
    """Block-differentially encode +/-1 info bits, prepending the reference block."""
    bits = np.asarray(bits, dtype=np.float64)
    if len(bits) % block_size:
        raise UsageError(f"bit count {len(bits)} is not a multiple of the block size {block_size}")
    if not np.all(np.abs(bits) == 1.0):
        raise UsageError("bits must be +/-1")
    d = np.empty(block_size + len(bits))
    d[:block_size] = 1.0
    for m in range(len(bits)):
        d[block_size + m] = bits[m] * d[m]
    return BitBurst(bits, d, block_size)


def frame_amplitudes(encoded: np.ndarray, plan: CodePlan) -> np.ndarray:
    """Per-frame pulse amplitudes for a burst: symbol amplitude times its chip."""
    chips = np.array([plan.code_for_position(m) for m in range(plan.block_size)],
                     dtype=np.float64)
    reps = -(-len(encoded) // plan.block_size)
    tiled = np.tile(chips, (reps, 1))[:len(encoded)]
    return (np.asarray(encoded)[:, None] * tiled).ravel()


def impulse_raster(encoded: np.ndarray, plan: CodePlan, timing: FrameTiming,
                   sample_period: float) -> np.ndarray:
    """Frame-start impulse train: amplitude(symbol) * chip at every frame start."""
    fs = timing.frame_samples(sample_period)
    amps = frame_amplitudes(encoded, plan)
    raster = np.zeros(len(amps) * fs)
    raster[np.arange(len(amps)) * fs] = amps
    return raster


def place_pulses(amps: np.ndarray, spacing: int, pulse_samples: np.ndarray) -> np.ndarray:
    """Sum scaled copies of a pulse at regular spacing; exact sparse convolution."""
    L = len(pulse_samples)
    out = np.zeros(len(amps) * spacing + L)
    for i, a in enumerate(amps):
        if a != 0.0:
            n0 = i * spacing
            out[n0:n0 + L] += a * pulse_samples
    return out


def synthesize(burst: BitBurst, plan: CodePlan, timing: FrameTiming,
               pulse: SampledWaveform) -> SampledWaveform:
    """Render the whole burst: one coded pulse per frame.

    ``pulse`` may be the transmit monocycle or an already channel-convolved
    per-frame waveform; the result is exact because frame starts are
    grid-aligned, so rendering just places scaled copies.
    """
    if plan.code_length != timing.frames_per_symbol:
        raise UsageError("code length must equal frames per symbol")
    amps = frame_amplitudes(burst.encoded, plan)
    fs = timing.frame_samples(pulse.sample_period)
    return SampledWaveform(pulse.sample_period, place_pulses(amps, fs, pulse.samples))


def symbol_waveform(plan: CodePlan, position: int, timing: FrameTiming,
                    pulse: SampledWaveform, amplitude: float = 1.0) -> SampledWaveform:
    """Unmodulated waveform of one block position: its code spread over one symbol."""
    chips = amplitude * plan.code_for_position(position).astype(np.float64)
    fs = timing.frame_samples(pulse.sample_period)
    return SampledWaveform(pulse.sample_period,
                           place_pulses(chips, fs, pulse.samples))


@dataclass(frozen=True)
class DetectionResult:
    """Per-symbol correlator outputs and the sign decisions (zero resolves to +1)."""

    correlator_outputs: np.ndarray
    decided_bits: np.ndarray
    corr_window_ns: float


def detect(x: SampledWaveform, timing: FrameTiming, block_size: int,
           corr_window_ns: float, num_symbols: int) -> DetectionResult:
    """Correlate each symbol with the one a block earlier and decide bit signs.

    ``x`` must start at a symbol boundary and contain ``num_symbols +
    block_size`` symbols; the first block acts as the differential reference
    and yields no decisions. For decision k the integrand is gated to a
    ``corr_window_ns`` window at each frame start; a window longer than the
    frame is clipped to the frame with a warning.
    """
    period = x.sample_period
    fs = timing.frame_samples(period)
    ss = timing.symbol_samples(period)
    if corr_window_ns > timing.frame_ns:
        warnings.warn(f"correlation window {corr_window_ns} ns clipped to the {timing.frame_ns} ns frame")
        corr_window_ns = timing.frame_ns
    ws = SampleGrid(period).to_samples(corr_window_ns)
    need = (num_symbols + block_size) * ss
    if len(x.samples) < need:
        raise UsageError(f"record holds {len(x.samples)} samples, need {need}")

    mask = np.zeros(ss)
    for j in range(timing.frames_per_symbol):
        mask[j * fs:j * fs + ws] = 1.0

    lag = block_size * ss
    lead = x.samples[lag:lag + num_symbols * ss].reshape(num_symbols, ss)
    ref = x.samples[:num_symbols * ss].reshape(num_symbols, ss)
    outputs = np.einsum("ks,ks,s->k", lead, ref, mask) * period
    decided = np.where(outputs >= 0.0, 1.0, -1.0)
    return DetectionResult(outputs, decided, corr_window_ns)
