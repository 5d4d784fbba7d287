#!/usr/bin/env python3
"""Run every bundled scenario and summarize the outcomes.

Each preset's artifacts land under --out/<name>; one line per run is
printed and the exit code is the worst one seen, so this doubles as a
quick smoke check after changes to the evolver."""

import argparse
import sys

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from pathlib import Path

from qlag.presets import PRESETS, preset_text
from qlag.scenario import run_scenario, scenario_from_mapping


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="regressions", help="base output directory")
    ap.add_argument("--variant", choices=["paper_literal", "rederived"], default=None,
                    help="override the equation variant for every run")
    ap.add_argument("--only", nargs="*", metavar="NAME", default=None,
                    help="run just these presets")
    args = ap.parse_args(argv)

    names = args.only if args.only else list(PRESETS)
    unknown = sorted(set(names) - set(PRESETS))
    if unknown:
        print(f"unknown presets: {', '.join(unknown)}", file=sys.stderr)
        return 1

    worst = 0
    for name in names:
        config = scenario_from_mapping(tomllib.loads(preset_text(name)),
                                       default_label=name)
        result = run_scenario(config, Path(args.out) / name, variant=args.variant)
        drift = result.report.get("norm_drift")
        tail = f"norm_drift={drift:.3e}" if drift is not None else ""
        if "failure" in result.report:
            tail = str(result.report["failure"])
        print(f"{name:<8} {result.status:<20} {result.report['wall_time_s']:6.2f}s  {tail}")
        worst = max(worst, result.exit_code)
    return worst


if __name__ == "__main__":
    raise SystemExit(main())
