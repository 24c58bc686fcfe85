"""Command line front end.

Subcommands:
  design-codes   print a code family and its block layout as JSON
  gen-channel    print one channel realization as JSON
  run-sync       Monte Carlo sweep of acquisition metrics (no BER)
  run-ber        full-chain Monte Carlo sweep including detection
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from .channel import CM1, SVParameters, draw_cm1
from .harness import CODE_KINDS, ExperimentConfig, build_code_plan, run_experiment


def _parse_snr_grid(text: str) -> tuple:
    """Parse 'start:step:stop' (inclusive), a comma list, or 'inf'."""
    if ":" in text:
        start, step, stop = (float(x) for x in text.split(":"))
        if step <= 0:
            raise argparse.ArgumentTypeError("snr step must be positive")
        grid = []
        s = start
        while s <= stop + 1e-9:
            grid.append(round(s, 9))
            s += step
        return tuple(grid)
    return tuple(math.inf if t.strip() in ("inf", "Infinity") else float(t)
                 for t in text.split(","))


def _emit(doc: dict, out: str | None):
    text = json.dumps(doc, indent=2) + "\n"
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _cmd_design_codes(args) -> int:
    cfg = ExperimentConfig(frames_per_symbol=args.nf, block_size=args.m,
                           code_kind=args.codes, seed=args.seed,
                           bits_per_trial=args.m)
    plan = build_code_plan(cfg, dup_gap=args.dup_gap)
    doc = {
        "family": plan.family.tolist(),
        "layout": plan.layout.tolist(),
        "max_pair_score": plan.max_pair_score,
    }
    if plan.orthogonality_residual:
        doc["orthogonality_residual"] = plan.orthogonality_residual
    _emit(doc, args.out)
    return 0


def _cmd_gen_channel(args) -> int:
    params = SVParameters(max_delay_spread=args.max_delay_spread) \
        if args.max_delay_spread != CM1.max_delay_spread else CM1
    chan = draw_cm1(params, args.seed)
    _emit({"taps": [[d, g] for d, g in chan.taps]}, args.out)
    return 0


def _load_config(args, measure_ber: bool) -> ExperimentConfig:
    base = {}
    if args.config:
        base = json.loads(Path(args.config).read_text())
    cfg = ExperimentConfig.from_dict(base) if base else ExperimentConfig()
    overrides = {"measure_ber": measure_ber}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.trials is not None:
        overrides["trials_per_point"] = args.trials
    if args.snr is not None:
        overrides["snr_grid_db"] = _parse_snr_grid(args.snr)
    if args.mode is not None:
        overrides["mode"] = args.mode
    if args.codes is not None:
        overrides["code_kind"] = args.codes
    if args.perfect_timing:
        overrides["perfect_timing"] = True
    if args.bits is not None:
        overrides["bits_per_trial"] = args.bits
    if args.label is not None:
        overrides["label"] = args.label
    mode = overrides.get("mode", cfg.mode)
    if mode == "multiuser" and args.bits is None and "bits_per_trial" not in base:
        # default burst must stay a multiple of the multi-user block size
        overrides["bits_per_trial"] = 3 * cfg.multiuser.block_size
    from dataclasses import replace
    return replace(cfg, **overrides)


def _cmd_run(args, measure_ber: bool) -> int:
    cfg = _load_config(args, measure_ber)
    results = run_experiment(cfg, args.out)
    for user, by_snr in results.items():
        tag = f"user{user} " if user else ""
        for snr_db, agg in by_snr.items():
            snr_text = "inf" if math.isinf(snr_db) else f"{snr_db:g} dB"
            parts = [f"p_acq={agg['p_acq']:.3f}", f"nmse={agg['nmse']:.3e}"]
            if "ber" in agg:
                parts.append(f"ber={agg['ber']:.3e}")
            print(f"{tag}{snr_text}: " + " ".join(parts))
    print(f"artifacts written to {args.out}")
    return 0


def _add_run_args(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON config file mirroring ExperimentConfig")
    p.add_argument("--out", required=True, help="output directory for CSVs and manifest")
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--snr", help="'start:step:stop' in dB, comma list, or 'inf'")
    p.add_argument("--mode", choices=["single", "multiuser"])
    p.add_argument("--codes", choices=list(CODE_KINDS))
    p.add_argument("--perfect-timing", action="store_true")
    p.add_argument("--bits", type=int, help="info bits per trial")
    p.add_argument("--label", help="series label recorded in the manifest")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="dsuwb", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design-codes", help="emit a code family and layout as JSON")
    p.add_argument("--nf", type=int, default=16, help="code length (frames per symbol)")
    p.add_argument("--m", type=int, default=5, help="block size")
    p.add_argument("--codes", choices=list(CODE_KINDS), default="hadamard")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--dup-gap", type=int, default=1)
    p.add_argument("--out", help="output path ('-' for stdout)")
    p.set_defaults(func=_cmd_design_codes)

    p = sub.add_parser("gen-channel", help="emit one channel realization as JSON")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-delay-spread", type=float, default=CM1.max_delay_spread)
    p.add_argument("--out", help="output path ('-' for stdout)")
    p.set_defaults(func=_cmd_gen_channel)

    p = sub.add_parser("run-sync", help="acquisition-only Monte Carlo sweep")
    _add_run_args(p)
    p.set_defaults(func=lambda a: _cmd_run(a, measure_ber=False))

    p = sub.add_parser("run-ber", help="full-chain Monte Carlo sweep with detection")
    _add_run_args(p)
    p.set_defaults(func=lambda a: _cmd_run(a, measure_ber=True))

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
