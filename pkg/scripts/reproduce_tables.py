#!/usr/bin/env python3
"""Reproduce the synthetic benchmark tables.

Runs the replicated benchmark over the four simulation cases and writes
summary tables (CSV and markdown) plus per-replication losses.  The default
is a desk-scale run (p = 50, 25 replications, a few minutes); pass --full
for the large version (p in {50, 100, 200}, 100 replications, hours).

Examples
--------
    python3 scripts/reproduce_tables.py --out tables/
    python3 scripts/reproduce_tables.py --full --estimators rcec,coat,oracle
"""

import argparse
import sys
import time
from pathlib import Path

from rcec import BenchmarkSpec, EstimatorConfig, run_benchmark, summarize
from rcec.bench import records_to_csv, rows_to_csv, rows_to_markdown


def parse_args(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--cases", default="1,2,3,4", help="comma-separated case ids")
    parser.add_argument("--p", default=None, help="comma-separated dimensions")
    parser.add_argument("--n", type=int, default=100, help="samples per replication")
    parser.add_argument("--replications", type=int, default=None, help="per cell")
    parser.add_argument(
        "--estimators", default="rcec,coat", help="arms from rcec,coat,oracle"
    )
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--grid-size", type=int, default=50)
    parser.add_argument("--workers", type=int, default=None, help="thread cap")
    parser.add_argument("--full", action="store_true", help="full-scale settings")
    parser.add_argument("--out", default="tables", help="output directory")
    return parser.parse_args(argv)


def main(argv=None) -> int:
    args = parse_args(argv)
    p_default = "50,100,200" if args.full else "50"
    reps_default = 100 if args.full else 25
    spec = BenchmarkSpec(
        cases=tuple(int(c) for c in args.cases.split(",")),
        p_values=tuple(int(p) for p in (args.p or p_default).split(",")),
        n=args.n,
        replications=args.replications if args.replications is not None else reps_default,
        estimators=tuple(args.estimators.split(",")),
        seed=args.seed,
    )
    config = EstimatorConfig(grid_size=args.grid_size, seed=args.seed)

    started = time.perf_counter()
    records = run_benchmark(spec, config, workers=args.workers)
    rows = summarize(records, spec)
    elapsed = time.perf_counter() - started

    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "results.csv").write_text(rows_to_csv(rows))
    (outdir / "results.md").write_text(rows_to_markdown(rows))
    (outdir / "losses.csv").write_text(records_to_csv(records))

    print(rows_to_markdown(rows))
    print(f"{len(records)} fits in {elapsed:.1f}s; tables under {outdir}/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
