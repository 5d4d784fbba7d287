"""Command-line front end.

Subcommands: run, verify-derivation, compare-oracles, presets.
Exit codes: 0 success, 1 invalid configuration, 2 numerical failure,
3 leak guard tripped.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import sys
from pathlib import Path

from .oracle import cross_validate, eps_sweep
from .presets import PRESETS, preset_text
from .scenario import (
    EXIT_CONFIG,
    EXIT_NUMERICAL,
    EXIT_OK,
    ConfigError,
    load_scenario,
    run_scenario,
)
from .verifier import ORDERS, full_audit, pde_to_text, report_to_text

_PLOTSCRIPT = """\
#!/usr/bin/env python3
# Plot the observables series written next to this script.
import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = Path(__file__).resolve().parent
rows = list(csv.DictReader(open(here / "observables.csv")))
t = [float(r["t"]) for r in rows]
fig, axes = plt.subplots(3, 1, sharex=True, figsize=(7, 8))
axes[0].plot(t, [float(r["norm"]) for r in rows])
axes[0].set_ylabel("norm")
axes[1].plot(t, [float(r["mean_x"]) for r in rows])
axes[1].set_ylabel("mean x")
axes[2].plot(t, [float(r["mean_x2"]) for r in rows])
axes[2].set_ylabel("mean x^2")
axes[2].set_xlabel("t")
fig.tight_layout()
fig.savefig(here / "observables.png", dpi=150)
print(here / "observables.png")
"""


def _emit(payload: dict, fmt: str, text_lines: list[str]) -> None:
    if fmt == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print("\n".join(text_lines))


def _run_one(path: str, out_base: str | None, multi: bool, variant: str | None,
             plotscript: bool) -> dict:
    try:
        config = load_scenario(path)
    except ConfigError as exc:
        return {"file": path, "exit_code": EXIT_CONFIG, "status": "config_error",
                "errors": exc.errors}
    out_override = None
    if out_base is not None:
        out_override = Path(out_base) / config.label if multi else Path(out_base)
    try:
        result = run_scenario(config, out_dir=out_override, variant=variant)
    except ConfigError as exc:
        return {"file": path, "exit_code": EXIT_CONFIG, "status": "config_error",
                "errors": exc.errors}
    if plotscript and config.dimension == 1:
        with open(result.out_dir / "plot_observables.py", "w", newline="\n") as fh:
            fh.write(_PLOTSCRIPT)
    summary = {
        "file": path,
        "exit_code": result.exit_code,
        "status": result.status,
        "out_dir": str(result.out_dir),
    }
    for key in ("nsteps", "norm_drift", "failure"):
        if key in result.report:
            summary[key] = result.report[key]
    return summary


def _cmd_run(args) -> int:
    multi = len(args.scenarios) > 1
    jobs = max(1, args.jobs)
    runs: list[dict]
    if jobs > 1 and multi:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            runs = list(
                pool.map(
                    _run_one,
                    args.scenarios,
                    [args.out] * len(args.scenarios),
                    [multi] * len(args.scenarios),
                    [args.variant] * len(args.scenarios),
                    [args.emit_plotscript] * len(args.scenarios),
                )
            )
    else:
        runs = [
            _run_one(p, args.out, multi, args.variant, args.emit_plotscript)
            for p in args.scenarios
        ]
    code = max((r["exit_code"] for r in runs), default=EXIT_OK)
    lines = []
    for r in runs:
        if r["status"] == "config_error":
            lines.append(f"{r['file']}: INVALID")
            lines.extend(f"  - {e}" for e in r["errors"])
        else:
            drift = r.get("norm_drift")
            extra = f" norm_drift={drift:.3e}" if drift is not None else ""
            lines.append(f"{r['file']}: {r['status']} -> {r['out_dir']}{extra}")
    _emit({"runs": runs, "exit_code": code}, args.format, lines)
    return code


def _cmd_verify(args) -> int:
    audit = full_audit(mode=args.mode, order=args.order)
    ok = audit.get("reproduces_reference", True) and audit.get("matches_weyl_reference", True)
    audit["ok"] = bool(ok)
    if args.format == "json":
        print(json.dumps(audit, indent=2, sort_keys=True))
    else:
        from .verifier import compare_modes, derive_pde

        lines = []
        if args.mode in ("paper_literal", "both"):
            lines.append(pde_to_text(derive_pde("paper_literal", args.order)))
            lines.append(f"reproduces the transcribed reference equation: "
                         f"{audit['reproduces_reference']}")
            lines.append("")
        if args.mode in ("exact", "both"):
            lines.append(pde_to_text(derive_pde("exact", args.order)))
            lines.append(f"matches Weyl-ordered quantization: {audit['matches_weyl_reference']}")
            lines.append("")
        if args.mode == "both":
            lines.append(report_to_text(compare_modes(order=args.order)))
        print("\n".join(lines))
    return EXIT_OK if ok else EXIT_NUMERICAL


def _cmd_compare(args) -> int:
    try:
        config = load_scenario(args.scenario)
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_CONFIG
    if config.dimension != 1:
        print("compare-oracles needs a 1D scenario", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(args.out) if args.out else (Path.cwd() / f"{config.label}-oracles")
    out.mkdir(parents=True, exist_ok=True)
    try:
        if args.eps_sweep:
            sweep = eps_sweep(config.initial, config.coefficients, config.t_start,
                              config.variant)
            with open(out / "convergence.csv", "w", newline="\n") as fh:
                fh.write("eps,max_abs_diff\n")
                for e, dist in zip(sweep.eps, sweep.distance):
                    fh.write(f"{float(e)!r},{float(dist)!r}\n")
            fit = sweep.to_jsonable()
            if sweep.slope >= 1.9:
                verdict = ("second-order agreement: the one-slice propagator tracks "
                           "this variant's flow to O(eps^2)")
            elif 0.8 <= sweep.slope <= 1.2:
                verdict = ("first-order discrepancy: the one-slice propagator and this "
                           "variant's flow differ at O(eps)")
            else:
                verdict = "inconclusive slope; inspect convergence.csv"
            fit["verdict"] = verdict
            with open(out / "fit.json", "w", newline="\n") as fh:
                json.dump(fit, fh, indent=2, sort_keys=True)
                fh.write("\n")
            _emit(fit, args.format, [
                f"variant: {sweep.variant}",
                f"slope: {sweep.slope:.4f} (r^2 = {sweep.r_squared:.6f})",
                verdict,
                f"wrote {out / 'convergence.csv'} and {out / 'fit.json'}",
            ])
            return EXIT_OK
        report, _traj = cross_validate(config.initial, config.coefficients, config.grid,
                                       config.evolve, t_start=config.t_start)
        payload = report.to_jsonable()
        with open(out / "crossval.json", "w", newline="\n") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
        _emit(payload, args.format, [
            f"variant: {report.variant}",
            f"max |grid psi - closed-form psi| at t = {report.final_time:g}: "
            f"{report.max_abs_psi_diff:.3e}",
            f"grid norm {report.grid_final_norm!r} vs closed-form {report.closed_final_norm!r}",
            f"wrote {out / 'crossval.json'}",
        ])
        return EXIT_OK
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


def _cmd_presets(args) -> int:
    if args.action == "list":
        payload = {name: desc for name, (desc, _text) in PRESETS.items()}
        _emit(payload, args.format,
              [f"{name:<8} {desc}" for name, (desc, _text) in PRESETS.items()])
        return EXIT_OK
    # emit
    if args.name is None:
        print("presets emit needs a preset name", file=sys.stderr)
        return EXIT_CONFIG
    try:
        text = preset_text(args.name)
    except KeyError as exc:
        print(exc.args[0], file=sys.stderr)
        return EXIT_CONFIG
    if args.out:
        with open(args.out, "w", newline="\n") as fh:
            fh.write(text)
        print(args.out)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qlag",
        description="Quadratic-Lagrangian quantum dynamics: evolve scenarios and "
                    "audit the short-time derivation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="evolve one or more scenario files")
    p_run.add_argument("scenarios", nargs="+", metavar="SCENARIO.toml")
    p_run.add_argument("--out", default=None, help="output directory (per-label subdirs "
                       "when several scenarios are given)")
    p_run.add_argument("--variant", choices=["paper_literal", "rederived"], default=None,
                       help="override the scenario's equation variant")
    p_run.add_argument("--jobs", type=int, default=1, help="parallel scenario processes")
    p_run.add_argument("--emit-plotscript", action="store_true",
                       help="drop a matplotlib plotting script next to the CSVs")
    p_run.add_argument("--format", choices=["text", "json"], default="text")
    p_run.set_defaults(fn=_cmd_run)

    p_ver = sub.add_parser("verify-derivation",
                           help="derive the evolution equation symbolically and audit it")
    p_ver.add_argument("--mode", choices=["paper_literal", "exact", "both"], default="both")
    p_ver.add_argument("--order", type=int, choices=list(ORDERS), default=4,
                       help="truncation grading order")
    p_ver.add_argument("--format", choices=["text", "json"], default="text")
    p_ver.set_defaults(fn=_cmd_verify)

    p_cmp = sub.add_parser("compare-oracles",
                           help="grid evolution vs closed-form Gaussian flow")
    p_cmp.add_argument("scenario", metavar="SCENARIO.toml")
    p_cmp.add_argument("--eps-sweep", action="store_true",
                       help="measure D(eps) slopes instead of cross-validating")
    p_cmp.add_argument("--out", default=None)
    p_cmp.add_argument("--format", choices=["text", "json"], default="text")
    p_cmp.set_defaults(fn=_cmd_compare)

    p_pre = sub.add_parser("presets", help="list or emit bundled scenario files")
    p_pre.add_argument("action", choices=["list", "emit"])
    p_pre.add_argument("name", nargs="?", default=None)
    p_pre.add_argument("--out", default=None, help="write the emitted scenario here")
    p_pre.add_argument("--format", choices=["text", "json"], default="text")
    p_pre.set_defaults(fn=_cmd_presets)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    raise SystemExit(main())
