"""Command-line entry point: ``twinprice {equilibrium,train,sweep,compare}``.

Exit codes: 0 success, 1 configuration error, 2 runtime or numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from ..errors import ConfigError, TwinPriceError
from ..learner import BACKEND
from . import config as config_mod
from .runner import (
    AXES,
    DEFAULT_SEEDS,
    compare,
    run_equilibrium,
    run_training,
    summary_rows,
    sweep,
    write_sweep_csv,
)

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2
SCHEME_CHOICES = ("drl", "greedy", "random", "analytic")


def _csv_list(text: str, cast=str) -> list:
    try:
        return [cast(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _schemes(text: str) -> list[str]:
    out = _csv_list(text)
    bad = [s for s in out if s not in SCHEME_CHOICES]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown scheme(s) {bad}; choose from {SCHEME_CHOICES}")
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="twinprice", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("-c", "--config", required=True, type=Path, help="scenario YAML file")
        sp.add_argument("--seed", type=int, help="override the config seed")

    sp = sub.add_parser("equilibrium", help="analytic Stackelberg solution")
    common(sp)
    sp.add_argument("--json", action="store_true", help="print the report as JSON")

    sp = sub.add_parser("train", help="train the pricing agent or play a baseline")
    common(sp)
    sp.add_argument("-o", "--out", type=Path, required=True, help="output directory")
    sp.add_argument("--scheme", choices=("drl", "greedy", "random"))
    sp.add_argument("--trajectory", action="store_true", help="also write per-round trajectory.csv")

    for name, helptext in (("sweep", "sweep cost or number of VMUs"),
                           ("compare", "compare schemes on one scenario")):
        sp = sub.add_parser(name, help=helptext)
        common(sp)
        if name == "sweep":
            sp.add_argument("--axis", choices=sorted(AXES), required=True)
            sp.add_argument("--values", type=lambda s: _csv_list(s, float),
                            help="comma-separated axis values (default: reference range)")
        sp.add_argument("--schemes", type=_schemes, default=list(SCHEME_CHOICES),
                        help="comma-separated subset of drl,greedy,random,analytic")
        sp.add_argument("--seeds", type=lambda s: _csv_list(s, int), default=list(DEFAULT_SEEDS))
        sp.add_argument("-o", "--out", type=Path, help="CSV output path")
        sp.add_argument("-j", "--jobs", type=int, default=1, help="worker processes")
    return p


def _print_rows(rows) -> None:
    print(f"{'axis':>6} {'value':>6} {'scheme':>9} {'price':>8} {'bw x100':>8} {'U_s':>8} {'U_vmu':>8}")
    for r in summary_rows(rows):
        print(f"{r['axis']:>6} {r['axis_value']!s:>6} {r['scheme']:>9} {r['price']:8.3f} "
              f"{r['total_bandwidth_scaled']:8.2f} {r['msp_utility']:8.3f} {r['mean_vmu_utility']:8.3f}")


def _vmu_change_note(rows) -> None:
    """Relative change of the mean follower utility from N=2 to N=6, per scheme."""
    means = {(r["scheme"], r["axis_value"]): r["mean_vmu_utility"] for r in summary_rows(rows)}
    for scheme in SCHEME_CHOICES:
        a, b = means.get((scheme, 2)), means.get((scheme, 6))
        if a and b is not None:
            print(f"{scheme}: mean VMU utility change N=2 -> N=6: {100 * (b - a) / a:+.1f}%")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_mod.load(args.config)
        if args.seed is not None:
            cfg = cfg.replace(seed=args.seed)

        if args.command == "equilibrium":
            _, rep = run_equilibrium(cfg)
            if args.json:
                print(json.dumps(rep, indent=2))
            else:
                print(f"price                 {rep['price']:.4f}")
                print(f"total bandwidth       {rep['total_bandwidth']:.6f} (x100: {rep['total_bandwidth_scaled']:.2f})")
                print(f"MSP utility           {rep['msp_utility']:.4f}")
                print(f"mean VMU utility      {rep['mean_vmu_utility']:.4f}")
                print(f"constraint binding    {rep['constraint_binding']}")
                for i, (b, u) in enumerate(zip(rep["demands"], rep["vmu_utilities"]), 1):
                    flag = "  (inactive)" if b == 0 else ""
                    print(f"  VMU {i}: demand {b:.6f}, utility {u:.4f}{flag}")
                if rep["infeasible"]:
                    print("warning: bandwidth cap violated even at the price cap")
            return EXIT_OK

        if args.command == "train":
            logging.getLogger(__name__).info("learner backend: %s", BACKEND)
            curve = run_training(cfg, args.out, args.scheme, cfg.seed, args.trajectory)
            n = min(50, len(curve))
            print(f"wrote {args.out}; last {n} episodes: return {curve.tail_mean('returns', n):.2f}, "
                  f"MSP utility {curve.tail_mean('mean_msp_utility', n):.4f}")
            return EXIT_OK

        if args.command == "sweep":
            rows = sweep(cfg, args.axis, args.schemes, args.values, args.seeds, args.jobs)
        else:
            rows = compare(cfg, args.schemes, args.seeds, args.jobs)
        if args.out:
            args.out.parent.mkdir(parents=True, exist_ok=True)
            write_sweep_csv(rows, args.out)
        _print_rows(rows)
        if args.command == "sweep" and args.axis == "vmus":
            _vmu_change_note(rows)
        failed = [r for r in rows if r["error"]]
        if failed:
            print(f"{len(failed)} row(s) failed; see the error column", file=sys.stderr)
            return EXIT_RUNTIME
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (TwinPriceError, ArithmeticError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
