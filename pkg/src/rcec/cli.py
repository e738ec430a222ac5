"""Command line interface.

Subcommands: ``estimate`` (fit a covariance network from a composition or
count table), ``simulate`` (draw a synthetic dataset), ``benchmark``
(replicated loss tables on synthetic data) and ``stability`` (bootstrap edge
stability).  Exit codes: 0 success, 2 usage or input-format error, 3 data
invariant violation, 4 numerical failure.

All outputs are plain CSV, markdown or JSON without timestamps; rerunning a
command with identical arguments reproduces identical bytes.  The
``RCEC_THREADS`` environment variable caps worker threads for the batch
commands.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from .bench import (
    BENCH_ESTIMATORS,
    BenchmarkSpec,
    records_to_csv,
    rows_to_csv,
    rows_to_markdown,
    run_benchmark,
    summarize,
)
from .compdata import DEFAULT_ZERO_REPLACEMENT, CompositionMatrix, close_counts
from .simgen import CASES, get_case, basis_to_composition, sample_case
from .stability import bootstrap_stability
from .threshold import ThresholdRule
from .tuning import EstimatorConfig, estimate

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4


class UsageError(Exception):
    """Bad arguments or malformed input formats (exit code 2)."""


def _fail_usage(message: str) -> "UsageError":
    return UsageError(message)


# ---------------------------------------------------------------------------
# input/output helpers

def read_table(path: str):
    """Read a CSV with a taxon-name header row and numeric sample rows.

    Malformed content raises :class:`UsageError` with a line and column
    diagnostic; semantic validation (positivity, closure) happens in the
    data containers afterwards.
    """
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise _fail_usage(f"cannot read {path}: {exc}") from None
    rows = list(csv.reader(io.StringIO(text)))
    if len(rows) < 2:
        raise _fail_usage(f"{path}: expected a header row and at least one data row")
    taxa = [cell.strip() for cell in rows[0]]
    p = len(taxa)
    if p < 2:
        raise _fail_usage(f"{path}: need at least 2 columns, found {p}")
    data = np.empty((len(rows) - 1, p))
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != p:
            raise _fail_usage(
                f"{path}: line {r}: expected {p} fields, found {len(row)}"
            )
        for c, cell in enumerate(row):
            try:
                data[r - 2, c] = float(cell)
            except ValueError:
                raise _fail_usage(
                    f"{path}: line {r}, column {c + 1}: not a number: {cell!r}"
                ) from None
    return taxa, data


def _full(value: float) -> str:
    # Shortest representation that round-trips; full precision.
    return repr(float(value))


def write_matrix_csv(path: Path, taxa, matrix: np.ndarray) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([""] + list(taxa))
    for name, row in zip(taxa, matrix):
        writer.writerow([name] + [_full(v) for v in row])
    path.write_text(buf.getvalue())


def write_samples_csv(path: Path, taxa, matrix: np.ndarray) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(taxa))
    for row in matrix:
        writer.writerow([_full(v) for v in row])
    path.write_text(buf.getvalue())


def write_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, indent=2) + "\n")


def _edge_payload(edge, taxa, omega, occurrences=None):
    d_i = omega[edge.i, edge.i]
    d_j = omega[edge.j, edge.j]
    correlation = (
        edge.weight / float(np.sqrt(d_i * d_j)) if d_i > 0 and d_j > 0 else None
    )
    entry = {
        "i": edge.i,
        "j": edge.j,
        "taxon_i": taxa[edge.i],
        "taxon_j": taxa[edge.j],
        "sign": edge.sign,
        "weight": edge.weight,
        "correlation": correlation,
    }
    if occurrences is not None:
        entry["occurrences"] = occurrences.get((edge.i, edge.j), 0)
    return entry


# ---------------------------------------------------------------------------
# configuration plumbing

def add_config_arguments(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("estimator options")
    group.add_argument("--config", metavar="FILE", help="flat key = value config file")
    group.add_argument(
        "--estimator",
        choices=("rcec", "coat"),
        help="covariance estimator (default rcec)",
    )
    group.add_argument(
        "--rule",
        metavar="RULE",
        help="thresholding rule: soft, alasso:<eta> or scad:<a> (default soft)",
    )
    group.add_argument("--folds", type=int, metavar="V", help="CV fold count (default 5)")
    group.add_argument(
        "--grid-size", type=int, metavar="G", help="tuning grid size (default 50)"
    )
    group.add_argument(
        "--L", type=float, metavar="L", help="block-count aggressiveness (default 1)"
    )
    group.add_argument(
        "--no-pd",
        action="store_true",
        help="skip the positive-definiteness grid restriction",
    )
    group.add_argument(
        "--threshold-diagonal",
        action="store_true",
        help="threshold variance entries as well",
    )
    group.add_argument("--seed", type=int, metavar="S", help="seed (default 0)")


def build_config(args) -> EstimatorConfig:
    try:
        if args.config:
            try:
                text = Path(args.config).read_text()
            except OSError as exc:
                raise ValueError(str(exc)) from None
            config = EstimatorConfig.from_kv(text)
        else:
            config = EstimatorConfig()
        updates = {}
        if args.estimator is not None:
            updates["estimator"] = args.estimator
        if args.rule is not None:
            updates["rule"] = ThresholdRule.parse(args.rule)
        if args.folds is not None:
            updates["folds"] = args.folds
        if args.grid_size is not None:
            updates["grid_size"] = args.grid_size
        if args.L is not None:
            updates["L"] = args.L
        if args.no_pd:
            updates["enforce_pd"] = False
        if args.threshold_diagonal:
            updates["threshold_diagonal"] = True
        if args.seed is not None:
            updates["seed"] = args.seed
        if updates:
            from dataclasses import replace

            config = replace(config, **updates)
        return config
    except ValueError as exc:
        raise _fail_usage(f"bad configuration: {exc}") from None


def _config_payload(config: EstimatorConfig) -> dict:
    return {
        "estimator": config.estimator,
        "rule": config.rule.spec(),
        "folds": config.folds,
        "grid_size": config.grid_size,
        "L": config.L,
        "enforce_pd": config.enforce_pd,
        "threshold_diagonal": config.threshold_diagonal,
        "seed": config.seed,
        "block_count": config.block_count,
    }


def _load_composition(args) -> tuple:
    taxa, data = read_table(args.input)
    if args.counts:
        x = close_counts(data, args.zero_replacement)
    else:
        x = CompositionMatrix(data)
    return taxa, x


# ---------------------------------------------------------------------------
# subcommands

def cmd_estimate(args) -> int:
    taxa, x = _load_composition(args)
    config = build_config(args)
    result = estimate(x, config)
    from .stability import extract_edges

    edges = extract_edges(result.omega)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    write_matrix_csv(outdir / "omega.csv", taxa, result.omega)
    write_json(
        outdir / "edges.json",
        {
            "edges": [_edge_payload(e, taxa, result.omega) for e in edges.edges],
            "positives": sum(1 for e in edges.edges if e.sign > 0),
            "negatives": sum(1 for e in edges.edges if e.sign < 0),
        },
    )
    write_json(
        outdir / "report.json",
        {
            "command": "estimate",
            "input": args.input,
            "n": x.n,
            "p": x.p,
            "config": _config_payload(config),
            "block_count": result.block_count,
            "lambda_star": result.lambda_star,
            "min_eigenvalue": result.min_eig,
            "edge_count": len(edges.edges),
            "warnings": result.warnings,
            "cv_curve": [[float(l), float(e)] for l, e in result.cv_curve],
        },
    )
    print(f"wrote {outdir / 'omega.csv'}, {outdir / 'edges.json'}, {outdir / 'report.json'}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    case = get_case(args.case)
    y = sample_case(case, args.n, args.p, args.seed)
    x = basis_to_composition(y)
    taxa = [f"taxon_{j + 1}" for j in range(args.p)]
    out = Path(args.out)
    if out.parent and not out.parent.exists():
        out.parent.mkdir(parents=True, exist_ok=True)
    write_samples_csv(out, taxa, x.values)
    meta = Path(str(out) + ".meta.json")
    write_json(
        meta,
        {
            "command": "simulate",
            "case": int(args.case),
            "kind": case.kind,
            "df": case.df,
            "alpha": case.alpha,
            "contamination": case.contamination,
            "shift": case.shift,
            "n": int(args.n),
            "p": int(args.p),
            "seed": int(args.seed),
            "data": out.name,
        },
    )
    print(f"wrote {out}, {meta}")
    return EXIT_OK


def _parse_int_list(text: str, what: str) -> tuple:
    try:
        values = tuple(int(part) for part in text.split(",") if part.strip() != "")
    except ValueError:
        raise _fail_usage(f"bad {what} list {text!r}; expected comma-separated integers") from None
    if not values:
        raise _fail_usage(f"{what} list is empty")
    return values


def cmd_benchmark(args) -> int:
    cases = _parse_int_list(args.cases, "case")
    for case in cases:
        if case not in CASES:
            raise _fail_usage(f"unknown case {case}; expected one of {sorted(CASES)}")
    p_values = _parse_int_list(args.p, "dimension")
    estimators = tuple(part.strip() for part in args.estimators.split(",") if part.strip())
    for arm in estimators:
        if arm not in BENCH_ESTIMATORS:
            raise _fail_usage(
                f"unknown estimator {arm!r}; expected from {','.join(BENCH_ESTIMATORS)}"
            )
    config = build_config(args)
    try:
        spec = BenchmarkSpec(
            cases=cases,
            p_values=p_values,
            n=args.n,
            replications=args.replications,
            estimators=estimators,
            seed=config.seed,
        )
    except ValueError as exc:
        raise _fail_usage(str(exc)) from None
    records = run_benchmark(spec, config)
    rows = summarize(records, spec)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "results.csv").write_text(rows_to_csv(rows))
    (outdir / "results.md").write_text(rows_to_markdown(rows))
    (outdir / "losses.csv").write_text(records_to_csv(records))
    print(f"wrote {outdir / 'results.csv'}, {outdir / 'results.md'}, {outdir / 'losses.csv'}")
    return EXIT_OK


def cmd_stability(args) -> int:
    taxa, x = _load_composition(args)
    config = build_config(args)
    if args.bootstrap < 1:
        raise _fail_usage(f"--bootstrap must be >= 1, got {args.bootstrap}")
    if args.retain < 0:
        raise _fail_usage(f"--retain must be >= 0, got {args.retain}")
    result = bootstrap_stability(
        x,
        config,
        replicates=args.bootstrap,
        retain_threshold=args.retain,
        seed=config.seed,
        reuse_lambda=args.reuse_lambda,
    )
    payload = {
        "edges": [
            _edge_payload(e, taxa, result.baseline_omega, result.baseline.occurrences)
            for e in result.stable.edges
        ],
        "stability": result.stability,
        "positives": result.positives,
        "negatives": result.negatives,
        "sign_agreement": result.sign_agreement,
        "baseline_edges": [
            _edge_payload(e, taxa, result.baseline_omega, result.baseline.occurrences)
            for e in result.baseline.edges
        ],
        "metadata": {
            "bootstrap_replicates": result.replicates,
            "retain_threshold": result.retain_threshold,
            "seed": result.seed,
            "reuse_lambda": result.reuse_lambda,
            "lambda_star": result.lambda_star,
            "n": x.n,
            "p": x.p,
            "config": _config_payload(config),
        },
    }
    out = Path(args.out)
    if out.parent and not out.parent.exists():
        out.parent.mkdir(parents=True, exist_ok=True)
    write_json(out, payload)
    print(f"wrote {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rcec",
        description="Robust sparse covariance estimation for compositional data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_est = sub.add_parser("estimate", help="fit a covariance network from a table")
    p_est.add_argument("input", help="CSV with a taxon header row, one sample per row")
    p_est.add_argument("--counts", action="store_true", help="input holds counts, not proportions")
    p_est.add_argument(
        "--zero-replacement",
        type=float,
        default=DEFAULT_ZERO_REPLACEMENT,
        metavar="Z",
        help="pseudo-count for zero counts (default 0.5)",
    )
    p_est.add_argument("--out", default="rcec_out", metavar="DIR", help="output directory")
    add_config_arguments(p_est)
    p_est.set_defaults(func=cmd_estimate)

    p_sim = sub.add_parser("simulate", help="draw a synthetic composition table")
    p_sim.add_argument("--case", type=int, required=True, choices=sorted(CASES), help="scenario 1-4")
    p_sim.add_argument("--n", type=int, default=100, help="sample count (default 100)")
    p_sim.add_argument("--p", type=int, default=50, help="dimension (default 50)")
    p_sim.add_argument("--seed", type=int, default=0, help="seed (default 0)")
    p_sim.add_argument("--out", default="samples.csv", metavar="FILE", help="output CSV")
    p_sim.set_defaults(func=cmd_simulate)

    p_ben = sub.add_parser("benchmark", help="replicated loss tables on synthetic data")
    p_ben.add_argument("--cases", default="1,2,3,4", metavar="LIST", help="cases, e.g. 1,2 (default all)")
    p_ben.add_argument("--p", default="50,100,200", metavar="LIST", help="dimensions (default 50,100,200)")
    p_ben.add_argument("--n", type=int, default=100, help="sample count (default 100)")
    p_ben.add_argument(
        "--replications", type=int, default=100, metavar="R", help="replications per cell (default 100)"
    )
    p_ben.add_argument(
        "--estimators",
        default="rcec,coat",
        metavar="LIST",
        help="arms from rcec,coat,oracle (default rcec,coat)",
    )
    p_ben.add_argument("--out", default="bench_out", metavar="DIR", help="output directory")
    add_config_arguments(p_ben)
    p_ben.set_defaults(func=cmd_benchmark)

    p_sta = sub.add_parser("stability", help="bootstrap stability of estimated edges")
    p_sta.add_argument("input", help="CSV with a taxon header row, one sample per row")
    p_sta.add_argument("--counts", action="store_true", help="input holds counts, not proportions")
    p_sta.add_argument(
        "--zero-replacement",
        type=float,
        default=DEFAULT_ZERO_REPLACEMENT,
        metavar="Z",
        help="pseudo-count for zero counts (default 0.5)",
    )
    p_sta.add_argument("--bootstrap", "-B", type=int, default=100, metavar="B", help="replicates (default 100)")
    p_sta.add_argument("--retain", type=int, default=50, metavar="K", help="stability cutoff (default 50)")
    p_sta.add_argument(
        "--reuse-lambda",
        action="store_true",
        help="reuse the baseline tuning value instead of re-cross-validating",
    )
    p_sta.add_argument("--out", default="stability.json", metavar="FILE", help="output JSON")
    add_config_arguments(p_sta)
    p_sta.set_defaults(func=cmd_stability)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    # LinAlgError subclasses ValueError, so numerical failures must be
    # separated out before the data-invariant handler.
    except (np.linalg.LinAlgError, FloatingPointError, ZeroDivisionError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
