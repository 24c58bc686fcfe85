"""Monte Carlo experiment driver.

A trial is one burst through one channel draw at one receiver offset:
bits -> block-differential encoding -> coded pulse train -> multipath
convolution -> additive noise -> blind acquisition -> differential detection.
Per-trial randomness (bits, offset, channel, unit noise shape) is keyed only
by (master seed, trial index), and the noise shape is scaled per SNR point, so
every SNR point and every code family sees the same trial population. That
makes sweeps paired comparisons and keeps aggregate curves monotone up to
binomial noise rather than re-rolled noise.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .channel import CM1, SVParameters, draw_cm1, received_pulse
from .codes import CodePlan, hadamard_family, orthogonal_pn_family, random_code_plan, select_family
from .errors import ConfigurationError
from .modem import FrameTiming, detect, encode, frame_amplitudes, place_pulses
from .sync import acquire
from .waveform import DEFAULT_SAMPLE_PERIOD, PulseShape, SampleGrid, SampledWaveform, render_monocycle

CODE_KINDS = ("hadamard", "pn", "random")


@dataclass(frozen=True)
class UserConfig:
    """Per-user multi-user parameters; all users share the symbol period."""

    frames_per_symbol: int
    frame_ns: float


@dataclass(frozen=True)
class MultiuserConfig:
    """Three asynchronous equal-symbol-energy users with distinct frame counts."""

    users: tuple = (
        UserConfig(32, 10.5),
        UserConfig(21, 16.0),
        UserConfig(15, 22.4),
    )
    block_size: int = 7

    def __post_init__(self):
        periods = {u.frames_per_symbol * u.frame_ns for u in self.users}
        if len(periods) != 1:
            raise ConfigurationError(f"users disagree on the symbol period: {periods}")
        if self.block_size <= 2 * len(self.users):
            raise ConfigurationError("block size must exceed twice the user count")

    @property
    def symbol_ns(self) -> float:
        u = self.users[0]
        return u.frames_per_symbol * u.frame_ns


@dataclass(frozen=True)
class ExperimentConfig:
    sample_period: float = DEFAULT_SAMPLE_PERIOD
    pulse_width_ns: float = 1.0
    frame_ns: float = 10.0
    frames_per_symbol: int = 16
    block_size: int = 5
    blocks_accumulated: int = 4
    snr_grid_db: tuple = tuple(float(s) for s in range(0, 21, 2))
    trials_per_point: int = 500
    code_kind: str = "hadamard"
    seed: int = 1
    mode: str = "single"
    multiuser: MultiuserConfig = field(default_factory=MultiuserConfig)
    acquisition_threshold_ns: float = 1.0
    bits_per_trial: int = 25
    measure_ber: bool = True
    perfect_timing: bool = False
    corr_window_ns: float = 11.0
    channel: SVParameters = field(default_factory=lambda: CM1)
    label: str = ""

    @property
    def effective_block_size(self) -> int:
        return self.multiuser.block_size if self.mode == "multiuser" else self.block_size

    def __post_init__(self):
        if self.bits_per_trial % self.effective_block_size:
            raise ConfigurationError(
                f"bits_per_trial must be a multiple of the block size {self.effective_block_size}")
        if self.code_kind not in CODE_KINDS:
            raise ConfigurationError(f"code_kind must be one of {CODE_KINDS}")
        if self.mode not in ("single", "multiuser"):
            raise ConfigurationError("mode must be 'single' or 'multiuser'")
        # frame and symbol boundaries must land on the sample grid
        SampleGrid(self.sample_period).to_samples(self.frame_ns)
        if self.mode == "multiuser":
            for u in self.multiuser.users:
                SampleGrid(self.sample_period).to_samples(u.frame_ns)
                if self.code_kind == "hadamard" and u.frames_per_symbol & (u.frames_per_symbol - 1):
                    raise ConfigurationError(
                        f"hadamard codes need power-of-two lengths; user has "
                        f"{u.frames_per_symbol} frames, use code_kind 'pn'")

    @property
    def timing(self) -> FrameTiming:
        return FrameTiming(self.frame_ns, self.frames_per_symbol)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["snr_grid_db"] = ["inf" if math.isinf(s) else s for s in self.snr_grid_db]
        return d

    @staticmethod
    def from_dict(d: dict) -> "ExperimentConfig":
        d = dict(d)
        if "snr_grid_db" in d:
            d["snr_grid_db"] = tuple(math.inf if s in ("inf", "Infinity") else float(s)
                                     for s in d["snr_grid_db"])
        if "multiuser" in d and isinstance(d["multiuser"], dict):
            mu = dict(d["multiuser"])
            mu["users"] = tuple(UserConfig(**u) for u in mu.get("users", ()))
            d["multiuser"] = MultiuserConfig(**mu)
        if "channel" in d and isinstance(d["channel"], dict):
            d["channel"] = SVParameters(**d["channel"])
        return ExperimentConfig(**d)


def build_code_plan(cfg: ExperimentConfig, dup_gap: int = 1,
                    frames_per_symbol: int | None = None, seed_offset: int = 0) -> CodePlan:
    """Construct the configured code family for one transmitter."""
    nf = frames_per_symbol or cfg.frames_per_symbol
    m = cfg.effective_block_size
    if cfg.code_kind == "hadamard":
        if nf & (nf - 1):
            raise ConfigurationError(f"hadamard codes need a power-of-two length, got {nf}")
        return select_family(hadamard_family(nf), m, dup_gap)
    if cfg.code_kind == "pn":
        fam, residual = orthogonal_pn_family(nf, m - 1, rng_seed=[cfg.seed, 101, seed_offset])
        return select_family(fam, m, dup_gap, orthogonality_residual=residual)
    return random_code_plan(nf, m, rng_seed=[cfg.seed, 102, seed_offset], dup_gap=dup_gap)


@dataclass(frozen=True)
class TrialResult:
    trial: int
    t0_ns: float
    t0_hat_ns: float
    acquired: bool
    sq_err_norm: float
    bit_errors: int
    bits_tested: int
    user: int = 0


def _noise_sigma(snr_db: float, symbol_energy: float, sample_period: float) -> float:
    """Sample standard deviation for white noise of density N0/2 at this SNR."""
    if math.isinf(snr_db):
        return 0.0
    n0 = symbol_energy / (10.0 ** (snr_db / 10.0))
    return math.sqrt(n0 / (2.0 * sample_period))


def _trial_rng(cfg: ExperimentConfig, trial: int) -> np.random.Generator:
    return np.random.default_rng([cfg.seed, 7, trial])


def _record_symbols(cfg: ExperimentConfig) -> int:
    acq_need = cfg.blocks_accumulated * cfg.block_size + 3
    return max(2 * cfg.blocks_accumulated * cfg.block_size,
               cfg.bits_per_trial + cfg.block_size + 1, acq_need + 1)


def run_trial(cfg: ExperimentConfig, snr_db: float, trial: int,
              plan: CodePlan | None = None) -> TrialResult:
    """One single-user trial; fully deterministic under (cfg.seed, trial)."""
    plan = plan or build_code_plan(cfg)
    timing = cfg.timing
    period = cfg.sample_period
    ss = timing.symbol_samples(period)
    rng = _trial_rng(cfg, trial)

    bits = rng.choice([-1.0, 1.0], size=cfg.bits_per_trial)
    t0_s = int(rng.integers(0, ss))
    chan = draw_cm1(cfg.channel, rng)
    pulse = render_monocycle(PulseShape(cfg.pulse_width_ns), sample_period=period)
    wr = received_pulse(chan, pulse)

    n_sym = _record_symbols(cfg)
    burst = encode(bits, cfg.block_size)
    enc = np.concatenate([burst.encoded, np.ones(n_sym - len(burst.encoded))]) \
        if n_sym > len(burst.encoded) else burst.encoded
    amps = frame_amplitudes(enc, plan)
    clean = place_pulses(amps, timing.frame_samples(period), wr.samples)

    y = clean[t0_s:].copy()
    sigma = _noise_sigma(snr_db, cfg.frames_per_symbol * pulse.energy(), period)
    if sigma > 0.0:
        y += sigma * rng.standard_normal(len(y))
    record = SampledWaveform(period, y)

    if cfg.perfect_timing:
        t0_hat_s = t0_s
    else:
        est = acquire(record, timing, cfg.block_size, cfg.blocks_accumulated,
                      coarse_step_ns=cfg.pulse_width_ns)
        t0_hat_s = SampleGrid(period).to_samples(est.t0_hat_ns)

    err_ns = (t0_hat_s - t0_s) * period
    acquired = abs(err_ns) <= cfg.acquisition_threshold_ns
    sq_err_norm = (err_ns / timing.symbol_ns) ** 2

    bit_errors = 0
    bits_tested = 0
    if cfg.measure_ber:
        # slice at the estimated start of the next full symbol; symbol index 1.
        # Blind timing may sit early by the flat zone left of the peak, so the
        # detector gate falls back to the whole frame in that mode.
        gate = cfg.corr_window_ns if cfg.perfect_timing else timing.frame_ns
        sync_hat_s = ss - t0_hat_s
        x = SampledWaveform(period, y[sync_hat_s:])
        avail = len(x.samples) // ss - cfg.block_size
        n_decode = min(cfg.bits_per_trial - 1, avail)
        if n_decode > 0:
            det = detect(x, timing, cfg.block_size, min(gate, timing.frame_ns), n_decode)
            ref = bits[1:1 + n_decode]
            bit_errors = int(np.sum(det.decided_bits != ref))
            bits_tested = n_decode

    return TrialResult(trial, t0_s * period, t0_hat_s * period, acquired,
                       float(sq_err_norm), bit_errors, bits_tested)


def run_multiuser_trial(cfg: ExperimentConfig, snr_db: float, trial: int,
                        plans: list[CodePlan] | None = None) -> list[TrialResult]:
    """One multi-user trial: asynchronous users, one composite record, per-user results."""
    mu = cfg.multiuser
    num_users = len(mu.users)
    plans = plans or [build_code_plan(cfg, dup_gap=u + 1, seed_offset=u,
                                      frames_per_symbol=mu.users[u].frames_per_symbol)
                      for u in range(num_users)]
    period = cfg.sample_period
    rng = _trial_rng(cfg, trial)
    pulse = render_monocycle(PulseShape(cfg.pulse_width_ns), sample_period=period)
    ss = SampleGrid(period).to_samples(mu.symbol_ns)

    n_sym = max(2 * cfg.blocks_accumulated * mu.block_size,
                cfg.bits_per_trial + mu.block_size + 1,
                cfg.blocks_accumulated * mu.block_size + num_users + 3)
    ref_energy = mu.users[0].frames_per_symbol * pulse.energy()

    per_user = []
    for u, user in enumerate(mu.users):
        timing = FrameTiming(user.frame_ns, user.frames_per_symbol)
        bits = rng.choice([-1.0, 1.0], size=cfg.bits_per_trial)
        t0_s = int(rng.integers(0, ss))
        chan = draw_cm1(cfg.channel, rng)
        wr = received_pulse(chan, pulse)
        burst = encode(bits, mu.block_size)
        enc = np.concatenate([burst.encoded, np.ones(n_sym - len(burst.encoded))])
        amp = math.sqrt(ref_energy / (user.frames_per_symbol * pulse.energy()))
        amps = amp * frame_amplitudes(enc, plans[u])
        clean = place_pulses(amps, timing.frame_samples(period), wr.samples)
        per_user.append((timing, bits, t0_s, clean))

    length = min(len(c) - t0 for _, _, t0, c in per_user)
    y = np.zeros(length)
    for _, _, t0_s, clean in per_user:
        y += clean[t0_s:t0_s + length]
    sigma = _noise_sigma(snr_db, ref_energy, period)
    if sigma > 0.0:
        y += sigma * rng.standard_normal(length)
    record = SampledWaveform(period, y)

    results = []
    for u, (timing, bits, t0_s, _) in enumerate(per_user):
        if cfg.perfect_timing:
            t0_hat_s = t0_s
        else:
            est = acquire(record, timing, mu.block_size, cfg.blocks_accumulated,
                          replica_delay_symbols=u + 1, coarse_step_ns=cfg.pulse_width_ns)
            t0_hat_s = SampleGrid(period).to_samples(est.t0_hat_ns)
        err_ns = (t0_hat_s - t0_s) * period
        acquired = abs(err_ns) <= cfg.acquisition_threshold_ns
        sq_err_norm = (err_ns / mu.symbol_ns) ** 2

        bit_errors = bits_tested = 0
        if cfg.measure_ber:
            gate = cfg.corr_window_ns if cfg.perfect_timing else timing.frame_ns
            sync_hat_s = ss - t0_hat_s
            x = SampledWaveform(period, y[sync_hat_s:])
            avail = len(x.samples) // ss - mu.block_size
            n_decode = min(cfg.bits_per_trial - 1, avail)
            if n_decode > 0:
                det = detect(x, timing, mu.block_size, min(gate, timing.frame_ns), n_decode)
                ref = bits[1:1 + n_decode]
                bit_errors = int(np.sum(det.decided_bits != ref))
                bits_tested = n_decode
        results.append(TrialResult(trial, t0_s * period, t0_hat_s * period, acquired,
                                   float(sq_err_norm), bit_errors, bits_tested, user=u + 1))
    return results


# --- aggregation and artifacts ----------------------------------------------

TRIALS_COLUMNS = ("seed", "snr_db", "t0_ns", "t0_hat_ns", "acquired", "sq_err_norm")
TRIALS_BER_COLUMNS = TRIALS_COLUMNS + ("bit_errors", "bits_tested")


def aggregate(rows: list[TrialResult]) -> dict:
    """Collapse per-trial rows into p_acq, nmse, and ber."""
    n = len(rows)
    p_acq = sum(r.acquired for r in rows) / n if n else 0.0
    nmse = sum(r.sq_err_norm for r in rows) / n if n else 0.0
    tested = sum(r.bits_tested for r in rows)
    errors = sum(r.bit_errors for r in rows)
    out = {"p_acq": p_acq, "nmse": nmse, "n_trials": n}
    if tested:
        out["ber"] = errors / tested
    return out


def _fmt(value: float) -> str:
    return repr(float(value))


def write_metrics_csv(path: Path, table: list[tuple[float, str, float, int]]):
    lines = ["snr_db,metric,value,n_trials"]
    for snr_db, metric, value, n in table:
        snr_text = "inf" if math.isinf(snr_db) else _fmt(snr_db)
        lines.append(f"{snr_text},{metric},{_fmt(value)},{n}")
    path.write_text("\n".join(lines) + "\n")


def write_trials_csv(path: Path, rows: list[tuple[float, TrialResult]], with_ber: bool):
    cols = TRIALS_BER_COLUMNS if with_ber else TRIALS_COLUMNS
    lines = [",".join(cols)]
    for snr_db, r in rows:
        snr_text = "inf" if math.isinf(snr_db) else _fmt(snr_db)
        vals = [str(r.trial), snr_text, _fmt(r.t0_ns), _fmt(r.t0_hat_ns),
                str(int(r.acquired)), _fmt(r.sq_err_norm)]
        if with_ber:
            vals += [str(r.bit_errors), str(r.bits_tested)]
        lines.append(",".join(vals))
    path.write_text("\n".join(lines) + "\n")


def write_manifest(path: Path, cfg: ExperimentConfig, extra: dict | None = None):
    doc = {"config": cfg.to_dict(), "label": cfg.label or f"{cfg.code_kind}-{cfg.mode}"}
    if extra:
        doc.update(extra)
    blob = json.dumps(doc["config"], sort_keys=True).encode()
    doc["content_hash"] = hashlib.sha1(blob).hexdigest()
    path.write_text(json.dumps(doc, indent=2) + "\n")


def run_experiment(cfg: ExperimentConfig, out_dir: str | Path | None = None) -> dict:
    """Sweep the SNR grid, aggregate per point, and optionally persist artifacts.

    Single-user output: metrics.csv, trials.csv, manifest.json in ``out_dir``.
    Multi-user output: the same triple per user in ``out_dir/user<k>/``.
    Returns ``{user: {snr_db: aggregates}}`` with user 0 for single mode.
    """
    out = Path(out_dir) if out_dir is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)

    if cfg.mode == "single":
        plan = build_code_plan(cfg)
        by_snr = {}
        trail: list[tuple[float, TrialResult]] = []
        for snr_db in cfg.snr_grid_db:
            rows = [run_trial(cfg, snr_db, t, plan) for t in range(cfg.trials_per_point)]
            by_snr[snr_db] = aggregate(rows)
            trail.extend((snr_db, r) for r in rows)
        results = {0: by_snr}
        if out is not None:
            _persist(out, cfg, by_snr, trail)
        return results

    mu = cfg.multiuser
    plans = [build_code_plan(cfg, dup_gap=u + 1, seed_offset=u,
                             frames_per_symbol=mu.users[u].frames_per_symbol)
             for u in range(len(mu.users))]
    per_user_rows: dict[int, list[tuple[float, TrialResult]]] = {
        u + 1: [] for u in range(len(mu.users))}
    results = {u + 1: {} for u in range(len(mu.users))}
    for snr_db in cfg.snr_grid_db:
        bucket: dict[int, list[TrialResult]] = {u + 1: [] for u in range(len(mu.users))}
        for t in range(cfg.trials_per_point):
            for r in run_multiuser_trial(cfg, snr_db, t, plans):
                bucket[r.user].append(r)
                per_user_rows[r.user].append((snr_db, r))
        for u, rows in bucket.items():
            results[u][snr_db] = aggregate(rows)
    if out is not None:
        for u in results:
            udir = out / f"user{u}"
            udir.mkdir(parents=True, exist_ok=True)
            ucfg = replace(cfg, label=(cfg.label or f"{cfg.code_kind}-{cfg.mode}") + f"-u{u}")
            _persist(udir, ucfg, results[u], per_user_rows[u])
    return results


def _persist(out: Path, cfg: ExperimentConfig, by_snr: dict,
             trail: list[tuple[float, TrialResult]]):
    table = []
    for snr_db, agg in by_snr.items():
        table.append((snr_db, "p_acq", agg["p_acq"], agg["n_trials"]))
        table.append((snr_db, "nmse", agg["nmse"], agg["n_trials"]))
        if "ber" in agg:
            table.append((snr_db, "ber", agg["ber"], agg["n_trials"]))
    write_metrics_csv(out / "metrics.csv", table)
    write_trials_csv(out / "trials.csv", trail, with_ber=cfg.measure_ber)
    write_manifest(out / "manifest.json", cfg)
