"""Experiment runner: every command writes report.json plus a replayable
manifest, with figures and CSV mirrors next to the structured output.

Exit codes: 0 clean, 1 invariant violation in the results, 2 resource cap.
"""
from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from .errors import BsspError, ResourceError
from .sampling import MODE_INJECTIVE, MODE_SIMON
from .schemes import (parallel_map, run_bssp_decision, run_bssp_search,
                      run_depth_sweep, sample_bssp_oracle, search_layout,
                      wilson_interval)
from .seeding import derive_seed
from .serialize import RunManifest, dump_report, write_oracle_bundle
from .verify import (check_bfp, estimate_o2h_expectation,
                     shadow_indistinguishability_experiment)
from . import plots


def _write_csv(rows: list[dict], path: Path):
    with open(path, "w", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)


def cmd_solve(args, out: Path) -> tuple[dict, int]:
    search_layout(args.n, args.d)  # raises ResourceError before any work
    if args.mode == "decision":
        return _solve_decision(args, out)

    def trial(k: int) -> bool:
        tseed = derive_seed(args.seed, "solve-trial", k)
        oracle = sample_bssp_oracle(args.n, args.d, MODE_SIMON,
                                    derive_seed(tseed, "oracle"))
        result = run_bssp_search(oracle, derive_seed(tseed, "run"),
                                 scheme=args.scheme)
        return result.period == oracle.period

    hits = parallel_map(trial, range(args.trials), args.threads)
    successes = sum(hits)
    low, high = wilson_interval(successes, args.trials)
    rows = [{"arm": "search", "trials": args.trials, "successes": successes,
             "rate": successes / args.trials, "ci_low": low, "ci_high": high}]
    report = {"command": "solve", "n": args.n, "d": args.d, "mode": "search",
              "scheme": args.scheme, "rows": rows,
              "success_rate": rows[0]["rate"]}
    plots.plot_rates(rows, out / "solve.png", f"search n={args.n} d={args.d}")
    return report, 0 if rows[0]["rate"] >= 0.9 else 1


def _solve_decision(args, out: Path) -> tuple[dict, int]:
    def trial_arm(mode):
        def trial(k: int) -> bool:
            tseed = derive_seed(args.seed, f"decide-trial-{mode}", k)
            oracle = sample_bssp_oracle(args.n, args.d, mode,
                                        derive_seed(tseed, "oracle"))
            result = run_bssp_decision(oracle, derive_seed(tseed, "run"),
                                       scheme=args.scheme)
            return result.verdict == mode
        return trial

    rows = []
    for mode in (MODE_SIMON, MODE_INJECTIVE):
        hits = parallel_map(trial_arm(mode), range(args.trials), args.threads)
        successes = sum(hits)
        low, high = wilson_interval(successes, args.trials)
        rows.append({"arm": mode, "trials": args.trials,
                     "successes": successes, "rate": successes / args.trials,
                     "ci_low": low, "ci_high": high})
    advantage = rows[0]["rate"] + rows[1]["rate"] - 1.0
    report = {"command": "solve", "n": args.n, "d": args.d, "mode": "decision",
              "scheme": args.scheme, "rows": rows, "advantage": advantage}
    plots.plot_rates(rows, out / "solve.png",
                     f"decision n={args.n} d={args.d}")
    return report, 0 if advantage >= 0.8 else 1


def cmd_o2h(args, out: Path) -> tuple[dict, int]:
    report = estimate_o2h_expectation(args.n, args.d, args.level,
                                      args.distinguisher, args.trials,
                                      args.seed, threads=args.threads)
    plots.plot_o2h(report, out / "o2h.png")
    doc = {"command": "o2h", "n": args.n, "d": args.d, "level": args.level,
           "distinguisher": args.distinguisher, **report.to_dict()}
    return doc, 0 if report.holds else 1


def cmd_bfp(args, out: Path) -> tuple[dict, int]:
    report = check_bfp(args.n, args.d, args.level, args.q, args.trials,
                       args.seed, family=args.family, threads=args.threads)
    plots.plot_bfp(report, out / "bfp.png")
    doc = {"command": "bfp", "n": args.n, "d": args.d, "level": args.level,
           **report.to_dict()}
    return doc, 0 if report.holds else 1


def cmd_sweep(args, out: Path) -> tuple[dict, int]:
    rows = run_depth_sweep(args.n, args.d, args.trials, args.seed,
                           threads=args.threads)
    dicts = [r.to_dict() for r in rows]
    _write_csv(dicts, out / "sweep.csv")
    plots.plot_sweep(rows, out / "sweep.png")
    report = {"command": "sweep", "n": args.n, "d": args.d, "rows": dicts}
    return report, 0


def cmd_opacity(args, out: Path) -> tuple[dict, int]:
    rows = shadow_indistinguishability_experiment(args.n, args.d, args.trials,
                                                  args.seed,
                                                  threads=args.threads)
    dicts = [r.to_dict() for r in rows]
    _write_csv(dicts, out / "opacity.csv")
    plots.plot_rates(dicts, out / "opacity.png",
                     f"shadow opacity n={args.n} d={args.d}")
    report = {"command": "opacity", "n": args.n, "d": args.d, "rows": dicts}
    return report, 0


def cmd_sample_oracle(args, out: Path) -> tuple[dict, int]:
    oracle = sample_bssp_oracle(args.n, args.d, args.mode,
                                derive_seed(args.seed, "oracle"))
    bundle_path = out / "oracle.json"
    write_oracle_bundle(oracle.fb, args.seed, bundle_path)
    report = {"command": "sample-oracle", "n": args.n, "d": args.d,
              "mode": args.mode, "bundle": bundle_path.name}
    return report, 0


_COMMANDS = {
    "solve": cmd_solve,
    "o2h": cmd_o2h,
    "bfp": cmd_bfp,
    "sweep": cmd_sweep,
    "opacity": cmd_opacity,
    "sample-oracle": cmd_sample_oracle,
}


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", type=str, default=".")
    parser.add_argument("--threads", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bssp",
                                     description="shuffled Simon's problem "
                                                 "simulator and verifier")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run the (d+1)-call solver")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--mode", choices=["search", "decision"], default="search")
    p.add_argument("--scheme", choices=["qc", "cq"], default="qc")
    p.add_argument("--trials", type=int, default=200)
    _add_common(p)

    p = sub.add_parser("o2h", help="hiding-bound Monte Carlo check")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--level", type=int, default=1)
    p.add_argument("--distinguisher",
                   choices=["ignore", "xi-flag", "value-parity"],
                   default="xi-flag")
    p.add_argument("--trials", type=int, default=1000)
    _add_common(p)

    p = sub.add_parser("bfp", help="finding-probability bound check")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--level", type=int, default=1)
    p.add_argument("--q", type=int, default=1)
    p.add_argument("--family", choices=["classical", "uniform"],
                   default="classical")
    p.add_argument("--trials", type=int, default=1000)
    _add_common(p)

    p = sub.add_parser("sweep", help="recovery rate per depth budget")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--trials", type=int, default=100)
    _add_common(p)

    p = sub.add_parser("opacity", help="shadow indistinguishability experiment")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--trials", type=int, default=500)
    _add_common(p)

    p = sub.add_parser("sample-oracle", help="serialize an oracle bundle")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--mode", choices=[MODE_SIMON, MODE_INJECTIVE],
                   default=MODE_SIMON)
    _add_common(p)

    p = sub.add_parser("replay", help="re-run a command from its manifest")
    p.add_argument("manifest", type=str)
    p.add_argument("--out", type=str, default=".")
    return parser


def _run_command(command: str, args, out: Path) -> int:
    out.mkdir(parents=True, exist_ok=True)
    report, code = _COMMANDS[command](args, out)
    dump_report(report, out / "report.json")
    params = {k: v for k, v in vars(args).items()
              if k not in ("command", "out", "func")}
    manifest = RunManifest(command=command, params=params,
                           seed=getattr(args, "seed", 0),
                           outputs={"report": "report.json"})
    manifest.write(out / "manifest.json")
    return code


def _replay(manifest_path: str, out: Path) -> int:
    manifest = RunManifest.read(manifest_path)
    args = argparse.Namespace(**manifest.params)
    return _run_command(manifest.command, args, out)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "replay":
            return _replay(args.manifest, Path(args.out))
        return _run_command(args.command, args, Path(args.out))
    except ResourceError as exc:
        print(f"resource error: {exc} "
              f"(required {exc.required}, available {exc.available})",
              file=sys.stderr)
        return 2
    except BsspError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
