"""Blind timing acquisition by delayed-replica correlation.

The receiver wakes mid-stream at an unknown offset t0 inside a symbol and sees
y(t) = r(t + t0). Because one spreading code is duplicated inside every block,
the product of y with its replica delayed by ``replica_delay_symbols`` symbol
periods integrates to the full symbol energy exactly when a correlation window
lands on a duplicated adjacent pair, and to code partial sums otherwise. The
estimator accumulates the magnitudes of that correlation over B windows, one
block apart (magnitudes, so data-dependent sign flips between blocks cannot
cancel), then peaks the result with a coarse pulse-width-step scan refined by
a sample-step scan. The start of the next symbol is the argmax, and
t0_hat = symbol_period - sync_hat.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelRealization, received_pulse
from .codes import CodePlan
from .errors import UsageError
from .modem import FrameTiming
from .waveform import SampleGrid, SampledWaveform

#: Relative slack under which two objective values count as tied.
_TIE_REL = 1e-9


@dataclass(frozen=True)
class TimingTruth:
    """Ground-truth receiver offset t0 within a symbol, and the derived sync instant."""

    t0_ns: float
    symbol_ns: float

    @property
    def sync_ns(self) -> float:
        return self.symbol_ns - self.t0_ns


@dataclass(frozen=True)
class SyncEstimate:
    """Two-stage search result: coarse peak, fine peak, derived offset estimate."""

    coarse_peak_ns: float
    sync_hat_ns: float
    t0_hat_ns: float
    peak_to_mean: float
    objective_trace: list = field(default_factory=list, repr=False)


def _window_starts(tau_s: int, symbol_s: int, blocks: int, block_size: int,
                   replica_delay_symbols: int) -> np.ndarray:
    first = replica_delay_symbols - 1 + block_size
    return tau_s + (first + np.arange(blocks) * block_size) * symbol_s


def block_correlations(y: SampledWaveform, tau_ns: float, timing: FrameTiming,
                       block_size: int, blocks: int,
                       replica_delay_symbols: int = 1) -> np.ndarray:
    """Signed correlation of y with its delayed replica over each accumulation window.

    Window b spans one symbol starting ``(replica_delay_symbols - 1 + (b+1) *
    block_size)`` symbols after tau, which keeps the delayed replica inside the
    record and lands every window on the same block position.
    """
    period = y.sample_period
    grid = SampleGrid(period)
    tau_s = grid.to_samples(tau_ns)
    ss = timing.symbol_samples(period)
    delay_s = replica_delay_symbols * ss
    starts = _window_starts(tau_s, ss, blocks, block_size, replica_delay_symbols)
    if tau_s < 0 or starts[-1] + ss > len(y.samples):
        need = (blocks * block_size + replica_delay_symbols) * ss
        raise UsageError(
            f"record holds {len(y.samples) - tau_s} samples past tau, need {need + ss}")
    s = y.samples
    out = np.empty(blocks)
    for b, n0 in enumerate(starts):
        out[b] = np.dot(s[n0:n0 + ss], s[n0 - delay_s:n0 + ss - delay_s]) * period
    return out


def objective(y: SampledWaveform, tau_ns: float, timing: FrameTiming,
              block_size: int, blocks: int, replica_delay_symbols: int = 1) -> float:
    """Accumulated delayed-replica correlation magnitude at trial offset tau."""
    return float(np.sum(np.abs(
        block_correlations(y, tau_ns, timing, block_size, blocks, replica_delay_symbols))))


def _argmax_smallest(values: np.ndarray) -> int:
    """Index of the first value within relative tie tolerance of the maximum."""
    top = float(np.max(values))
    ties = np.nonzero(values >= top - _TIE_REL * abs(top))[0]
    return int(ties[0])


def _coarse_scan(samples: np.ndarray, period: float, taus_s: np.ndarray, ss: int,
                 block_size: int, blocks: int, replica_delay_symbols: int) -> np.ndarray:
    """Objective at many offsets at once via a running sum of the lagged product."""
    delay_s = replica_delay_symbols * ss
    z = samples[delay_s:] * samples[:-delay_s]
    cs = np.concatenate([[0.0], np.cumsum(z)])
    first = replica_delay_symbols - 1 + block_size
    vals = np.zeros(len(taus_s), dtype=np.float64)
    for b in range(blocks):
        a = taus_s + (first + b * block_size) * ss - delay_s
        if a[-1] + ss >= len(cs):
            raise UsageError("record too short for the coarse scan")
        vals += np.abs(cs[a + ss] - cs[a])
    return vals * period


def acquire(y: SampledWaveform, timing: FrameTiming, block_size: int, blocks: int,
            replica_delay_symbols: int = 1, coarse_step_ns: float = 1.0) -> SyncEstimate:
    """Two-stage peak search over one symbol period of trial offsets.

    Stage one scans tau on a coarse grid (default step: one pulse width) over
    [0, symbol); stage two rescans at sample resolution within one coarse step
    of the stage-one peak, capped to [0, symbol]. Ties resolve to the smallest
    tau at both stages. The peak-to-mean ratio of the coarse trace is kept as a
    no-signal diagnostic.
    """
    period = y.sample_period
    grid = SampleGrid(period)
    ss = timing.symbol_samples(period)
    step_s = max(1, grid.to_samples(coarse_step_ns))

    coarse_s = np.arange(0, ss, step_s)
    coarse_vals = _coarse_scan(y.samples, period, coarse_s, ss,
                               block_size, blocks, replica_delay_symbols)
    i1 = _argmax_smallest(coarse_vals)
    tau1_s = int(coarse_s[i1])

    lo = max(0, tau1_s - step_s)
    hi = min(ss, tau1_s + step_s)
    fine_s = np.arange(lo, hi + 1)
    fine_vals = np.array([
        objective(y, t * period, timing, block_size, blocks, replica_delay_symbols)
        for t in fine_s])
    sync_s = int(fine_s[_argmax_smallest(fine_vals)])

    mean = float(np.mean(coarse_vals))
    peak_to_mean = float(np.max(coarse_vals)) / mean if mean > 0 else float("inf")
    trace = [(float(t * period), float(v)) for t, v in zip(coarse_s, coarse_vals)]
    return SyncEstimate(
        coarse_peak_ns=tau1_s * period,
        sync_hat_ns=sync_s * period,
        t0_hat_ns=(ss - sync_s) * period,
        peak_to_mean=peak_to_mean,
        objective_trace=trace,
    )


def multiuser_acquire(y: SampledWaveform, timing: FrameTiming, block_size: int,
                      blocks: int, user_index: int, num_users: int,
                      coarse_step_ns: float = 1.0) -> SyncEstimate:
    """Acquire one user of a shared-symbol-period multi-user signal.

    User u duplicates its code ``u`` positions apart, so its replica delay is
    u symbol periods; the block size must exceed twice the user count for the
    per-user delays to stay distinguishable.
    """
    if block_size <= 2 * num_users:
        raise UsageError(f"block size {block_size} must exceed 2 * {num_users} users")
    if not 1 <= user_index <= num_users:
        raise UsageError("user_index out of range")
    return acquire(y, timing, block_size, blocks,
                   replica_delay_symbols=user_index, coarse_step_ns=coarse_step_ns)


# --- closed-form objective (noise-free oracle) ------------------------------

@dataclass(frozen=True)
class ObjectiveDecomposition:
    """Offset bookkeeping and terms of the per-frame closed form of one window.

    The window offset relative to the sync instant splits as k symbols plus
    beta, and beta as j0 frames plus delta. The window value is then
    D(k+1) * [suffix(k+1) * E + chip1(j0) * tail(delta)]
    + D(k+2) * [prefix(k+2) * E + chip2(j0) * (E - tail(delta))]
    where D(m) multiplies the encoded amplitudes of symbols m and m-delay,
    suffix/prefix are chip-product partial sums above/below frame j0, E is the
    received per-frame energy, and tail(delta) the part of it past delta.
    Exact while the received waveform fits inside one frame.
    """

    k: int
    beta_ns: float
    j0: int
    delta_ns: float
    d_first: float
    d_second: float
    suffix_sum: int
    prefix_sum: int
    edge_integral: float
    value: float


def frame_decomposition(plan: CodePlan, encoded: np.ndarray, chan_energy_tail,
                        tau_ns: float, timing: FrameTiming, t0_ns: float,
                        sample_period: float, replica_delay_symbols: int = 1,
                        block: int = 0) -> ObjectiveDecomposition:
    """Per-frame prefix-sum closed form of one window's signed correlation.

    ``chan_energy_tail(delta_ns)`` must return the received-waveform energy
    from delta onward (so tail(0) is the full per-frame energy).
    """
    grid = SampleGrid(sample_period)
    ss = timing.symbol_samples(sample_period)
    fs = timing.frame_samples(sample_period)
    u = replica_delay_symbols
    w0 = _window_starts(grid.to_samples(tau_ns), ss, block + 1, plan.block_size, u)[block]
    sync_s = ss - grid.to_samples(t0_ns)
    x = w0 - sync_s
    k, beta_s = divmod(x, ss)
    j0, delta_s = divmod(beta_s, fs)

    def chips(m: int) -> np.ndarray:
        return plan.code_for_position(m)

    def damp(m: int) -> float:
        return float(encoded[m] * encoded[m - u])

    e_full = float(chan_energy_tail(0.0))
    tail = float(chan_energy_tail(delta_s * sample_period))
    pair1 = chips(k + 1) * chips(k + 1 - u)
    pair2 = chips(k + 2) * chips(k + 2 - u)
    suffix = int(np.sum(pair1[j0 + 1:]))
    prefix = int(np.sum(pair2[:j0]))
    d1, d2 = damp(k + 1), damp(k + 2)
    value = (d1 * (suffix * e_full + pair1[j0] * tail)
             + d2 * (prefix * e_full + pair2[j0] * (e_full - tail)))
    return ObjectiveDecomposition(int(k), beta_s * sample_period, int(j0),
                                  delta_s * sample_period, d1, d2, suffix, prefix,
                                  tail, value)


def analytic_objective(plan: CodePlan, encoded: np.ndarray, chan: ChannelRealization,
                       pulse: SampledWaveform, tau_ns: float, timing: FrameTiming,
                       t0_ns: float, replica_delay_symbols: int = 1,
                       block: int = 0) -> float:
    """Exact noise-free signed correlation of one window, computed in closed form.

    Expands the window integral over symbol pairs, frames, and the lagged
    partial autocorrelations of the received per-frame waveform, so it never
    touches the synthesized signal. When the waveform fits inside one frame
    this reduces to the prefix-sum form of ``frame_decomposition``; when it
    spills over, the extra lag terms keep the result exact.
    """
    period = pulse.sample_period
    grid = SampleGrid(period)
    ss = timing.symbol_samples(period)
    fs = timing.frame_samples(period)
    nf = timing.frames_per_symbol
    u = replica_delay_symbols
    wr = received_pulse(chan, pulse).samples
    L = len(wr)
    if L > ss:
        raise UsageError("received waveform longer than a symbol is not supported")

    w0 = int(_window_starts(grid.to_samples(tau_ns), ss, block + 1, plan.block_size, u)[block])
    sync_s = ss - grid.to_samples(t0_ns)

    # prefix sums of wr[i] * wr[i + lag] for every frame lag that can overlap
    kernels: dict[int, np.ndarray] = {}

    def kernel(lag: int, lo: int, hi: int) -> float:
        lo = max(lo, 0, -lag)
        hi = min(hi, L, L - lag)
        if hi <= lo:
            return 0.0
        if lag not in kernels:
            prod = wr[max(0, -lag):min(L, L - lag)] * wr[max(0, lag):min(L, L + lag)]
            cs = np.zeros(L + 1)
            np.cumsum(prod, out=cs[max(0, -lag) + 1:max(0, -lag) + 1 + len(prod)])
            cs[max(0, -lag) + 1 + len(prod):] = cs[max(0, -lag) + len(prod)]
            kernels[lag] = cs
        cs = kernels[lag]
        return float(cs[hi] - cs[lo]) * period

    first_sym = max(1, (w0 - L - sync_s) // ss)
    last_sym = min(len(encoded) - 1, (w0 + ss - sync_s) // ss + 1)
    total = 0.0
    for m in range(first_sym, last_sym + 1):
        cm = plan.code_for_position(m)
        for dm in (-1, 0, 1):
            mq = m - u + dm
            if mq < 0 or mq >= len(encoded):
                continue
            damp = float(encoded[m] * encoded[mq])
            cq = plan.code_for_position(mq)
            for j in range(nf):
                p = (m - 1) * ss + j * fs + sync_s
                lo, hi = w0 - p, w0 + ss - p
                if hi <= 0 or lo >= L:
                    continue
                for jq in range(nf):
                    lag = -dm * ss + (j - jq) * fs
                    if lag <= -L or lag >= L:
                        continue
                    k = kernel(lag, lo, hi)
                    if k != 0.0:
                        total += damp * cm[j] * cq[jq] * k
    return total
