"""Sampled waveforms and elementary waveform algebra.

All times in this package are in nanoseconds. Waveforms are uniformly
sampled real signals; integrals are left Riemann sums on the sample grid,
so the inner product of two waveforms is ``sum(a*b) * sample_period``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, UsageError

#: Default sample period in ns (20 samples across a 1 ns pulse).
DEFAULT_SAMPLE_PERIOD = 0.05

_ALIGN_TOL = 1e-9


@dataclass(frozen=True)
class SampleGrid:
    """Uniform time grid: ``length`` samples spaced ``sample_period`` ns apart."""

    sample_period: float = DEFAULT_SAMPLE_PERIOD
    length: int = 0

    def __post_init__(self):
        if self.sample_period <= 0:
            raise ConfigurationError("sample_period must be positive")
        if self.length < 0:
            raise ConfigurationError("grid length must be non-negative")

    def to_samples(self, t_ns: float) -> int:
        """Convert a grid-aligned time to a sample count, rejecting misaligned values."""
        n = t_ns / self.sample_period
        r = round(n)
        if abs(n - r) > _ALIGN_TOL * max(1.0, abs(n)):
            raise UsageError(f"{t_ns} ns is not a multiple of the {self.sample_period} ns sample period")
        return int(r)


@dataclass(frozen=True)
class SampledWaveform:
    """A real signal segment with its sample period and the time of sample 0."""

    sample_period: float
    samples: np.ndarray
    origin: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=np.float64))
        if self.samples.ndim != 1:
            raise UsageError("samples must be one-dimensional")

    @property
    def grid(self) -> SampleGrid:
        return SampleGrid(self.sample_period, len(self.samples))

    @property
    def duration(self) -> float:
        return len(self.samples) * self.sample_period

    def energy(self) -> float:
        return float(np.sum(self.samples * self.samples)) * self.sample_period

    def scaled(self, factor: float) -> "SampledWaveform":
        return SampledWaveform(self.sample_period, self.samples * factor, self.origin)


@dataclass(frozen=True)
class PulseShape:
    """Pulse of total width ``width`` ns; ``shape_parameter`` is the Gaussian sigma.

    The default sigma of width/7 concentrates the rendered energy well inside
    the support; the waveform is truncated to [0, width] and renormalized, so
    the rendered amplitude outside the support is exactly zero.
    """

    width: float = 1.0
    shape_parameter: float = field(default=0.0)

    def __post_init__(self):
        if self.width <= 0:
            raise ConfigurationError("pulse width must be positive")
        if self.shape_parameter <= 0:
            object.__setattr__(self, "shape_parameter", self.width / 7.0)


def render_monocycle(shape: PulseShape, grid: SampleGrid | None = None,
                     sample_period: float = DEFAULT_SAMPLE_PERIOD) -> SampledWaveform:
    """Render a unit-energy second-derivative-Gaussian monocycle.

    The pulse is centered at width/2, truncated to [0, width], and numerically
    renormalized so its grid energy is exactly 1.

    Raises ConfigurationError when the grid puts fewer than 8 samples across
    the pulse width.
    """
    period = grid.sample_period if grid is not None else sample_period
    n = SampleGrid(period).to_samples(shape.width)
    if n < 8:
        raise ConfigurationError(f"{n} samples across the pulse; need at least 8")
    t = np.arange(n) * period
    x = (t - shape.width / 2.0) / shape.shape_parameter
    p = (1.0 - x * x) * np.exp(-0.5 * x * x)
    p /= np.sqrt(np.sum(p * p) * period)
    return SampledWaveform(period, p)


def delay(a: SampledWaveform, d_ns: float) -> SampledWaveform:
    """Shift a waveform later in time by a grid-aligned amount (samples unchanged)."""
    a.grid.to_samples(d_ns)  # alignment check only
    return SampledWaveform(a.sample_period, a.samples, a.origin + d_ns)


def windowed_inner_product(a: SampledWaveform, b: SampledWaveform,
                           window_start: float, window_length: float) -> float:
    """Left-Riemann inner product of two waveforms over [window_start, window_start+window_length).

    Both waveforms are treated as zero outside their supports; they must share
    a sample period and have grid-aligned origins relative to each other.
    """
    if abs(a.sample_period - b.sample_period) > _ALIGN_TOL:
        raise UsageError("sample periods differ")
    grid = SampleGrid(a.sample_period)
    w0 = grid.to_samples(window_start)
    wn = grid.to_samples(window_length)
    oa = grid.to_samples(a.origin)
    ob = grid.to_samples(b.origin)
    # overlap of [w0, w0+wn) with both supports, in absolute sample indices
    lo = max(w0, oa, ob)
    hi = min(w0 + wn, oa + len(a.samples), ob + len(b.samples))
    if hi <= lo:
        return 0.0
    sa = a.samples[lo - oa:hi - oa]
    sb = b.samples[lo - ob:hi - ob]
    return float(np.dot(sa, sb)) * a.sample_period
