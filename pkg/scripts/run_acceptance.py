"""Run the ten acceptance checks and write a JSON report.

    python scripts/run_acceptance.py [--out report.json] [--checks a,b] [--seed N]
"""
import argparse
import sys
from dataclasses import replace
from pathlib import Path

from laminar_mso.verify import CHECKS, VerifyConfig, run_verification_suite

ORDER = ["end_to_end", "unique_rep", "thin_partition", "representative_trees", "chi_filter",
         "round_trip", "formula_vs_native", "even_leaf", "guarded_ranges", "serialization"]


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=None)
    ap.add_argument("--checks", default=",".join(ORDER))
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    names = tuple(c for c in args.checks.split(",") if c)
    unknown = set(names) - set(CHECKS)
    if unknown:
        ap.error(f"unknown checks: {sorted(unknown)}")
    cfg = replace(VerifyConfig(seed=args.seed), checks=names)
    report = run_verification_suite(cfg)
    by_name = {r.name: r for r in report.results}
    for n, name in enumerate(ORDER, start=1):
        if name in by_name:
            print(f"[{n:2}] {by_name[name].line()}")
    print(report.to_text().splitlines()[-1])
    if args.out:
        args.out.write_text(report.dumps() + "\n")
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
