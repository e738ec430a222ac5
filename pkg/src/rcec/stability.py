"""Bootstrap stability of estimated covariance supports.

A single run of the pipeline yields an edge set (the nonzero off-diagonal
pairs).  Resampling rows with replacement and re-estimating shows which of
those edges survive sampling noise: each baseline edge gets an occurrence
count across bootstrap replicates, and edges that recur in at least
``retain_threshold`` replicates form the stable set.  Edge identity is the
index pair alone; a sign flip still counts as an occurrence, with sign
agreement tracked separately.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .compdata import CompositionMatrix, clr_transform
from .parallel import ordered_map
from .threshold import threshold_matrix
from .tuning import EstimatorConfig, estimate, _subset_covariance

DEFAULT_REPLICATES = 100
DEFAULT_RETAIN = 50


@dataclass(frozen=True)
class Edge:
    """Off-diagonal support entry (i < j) with its sign and weight."""

    i: int
    j: int
    sign: int
    weight: float


@dataclass
class SupportSet:
    """Collection of support edges, optionally with occurrence counts."""

    edges: tuple
    occurrences: dict = field(default_factory=dict)

    def pairs(self) -> set:
        return {(e.i, e.j) for e in self.edges}

    def __iter__(self):
        return iter(self.edges)

    def __len__(self) -> int:
        return len(self.edges)


def extract_edges(omega, zero_tol: float = 0.0) -> SupportSet:
    """Edges of a symmetric estimate: pairs i < j with ``|omega_ij| > zero_tol``."""
    arr = np.asarray(omega, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"estimate must be square, got shape {arr.shape}")
    if zero_tol < 0:
        raise ValueError(f"zero_tol must be nonnegative, got {zero_tol!r}")
    edges = []
    iu, ju = np.triu_indices(arr.shape[0], k=1)
    for i, j in zip(iu, ju):
        w = arr[i, j]
        if abs(w) > zero_tol:
            edges.append(Edge(i=int(i), j=int(j), sign=int(np.sign(w)), weight=float(w)))
    return SupportSet(edges=tuple(edges))


@dataclass
class StabilityResult:
    """Bootstrap stability summary.

    baseline
        Baseline edges with occurrence counts filled in.
    stable
        Baseline edges occurring in at least ``retain_threshold`` replicates.
    stability
        Mean over replicates of the fraction of baseline edges recovered
        (1.0 when the baseline has no edges).
    sign_agreement
        Fraction of recovered occurrences whose sign matched the baseline
        (1.0 when nothing was recovered).
    """

    baseline: SupportSet
    stable: SupportSet
    stability: float
    positives: int
    negatives: int
    sign_agreement: float
    replicates: int
    retain_threshold: int
    seed: int
    lambda_star: float
    reuse_lambda: bool
    baseline_omega: np.ndarray = None


def filter_stable(baseline: SupportSet, retain_threshold: int) -> SupportSet:
    """Baseline edges whose occurrence count reaches ``retain_threshold``."""
    kept = tuple(
        e for e in baseline.edges if baseline.occurrences.get((e.i, e.j), 0) >= retain_threshold
    )
    occ = {(e.i, e.j): baseline.occurrences.get((e.i, e.j), 0) for e in kept}
    return SupportSet(edges=kept, occurrences=occ)


def bootstrap_stability(
    X,
    config: EstimatorConfig | None = None,
    replicates: int = DEFAULT_REPLICATES,
    retain_threshold: int = DEFAULT_RETAIN,
    seed: int = 0,
    *,
    reuse_lambda: bool = False,
    index_sampler=None,
    workers: int | None = None,
) -> StabilityResult:
    """Re-estimate on bootstrap resamples and count edge recurrence.

    Parameters
    ----------
    X : CompositionMatrix or array_like
        Compositional data, one sample per row.
    config : EstimatorConfig
        Pipeline configuration for the baseline and every replicate.
    replicates : int
        Number of bootstrap resamples B.
    retain_threshold : int
        Minimum occurrence count for an edge to be called stable.
    seed : int
        Master seed; replicate b draws its row indices from the b-th
        spawned child stream.  Re-estimation itself runs under ``config``
        unchanged (including its fold seed), so a replicate handed the
        original rows reproduces the baseline exactly.
    reuse_lambda : bool
        Skip per-replicate cross-validation and threshold each resampled
        covariance at the baseline tuning value.  Faster, slightly
        optimistic about stability.
    index_sampler : callable, optional
        ``f(rng, n) -> indices`` producing each replicate's row indices;
        defaults to iid uniform resampling with replacement.  A sampler
        returning ``arange(n)`` makes every replicate the original data,
        which is useful for self-consistency checks.
    workers : int, optional
        Thread cap for replicate fan-out (further capped by RCEC_THREADS).

    Returns
    -------
    StabilityResult
    """
    if config is None:
        config = EstimatorConfig()
    if not isinstance(X, CompositionMatrix):
        X = CompositionMatrix(X)
    if replicates < 1:
        raise ValueError(f"replicates must be >= 1, got {replicates}")
    if retain_threshold < 0:
        raise ValueError(f"retain_threshold must be >= 0, got {retain_threshold}")

    baseline_fit = estimate(X, config)
    baseline = extract_edges(baseline_fit.omega)
    n = X.n
    children = np.random.SeedSequence(int(seed)).spawn(int(replicates))

    def one_replicate(child):
        rng = np.random.default_rng(child)
        idx = index_sampler(rng, n) if index_sampler is not None else rng.integers(0, n, n)
        xb = CompositionMatrix(X.values[np.asarray(idx, dtype=np.intp)])
        if reuse_lambda:
            w = clr_transform(xb).values
            gamma = _subset_covariance(w, config)
            omega = threshold_matrix(
                gamma,
                baseline_fit.lambda_star,
                w.shape[0],
                config.rule,
                threshold_diagonal=config.threshold_diagonal,
            )
        else:
            omega = estimate(xb, config).omega
        return extract_edges(omega)

    replicate_edges = ordered_map(one_replicate, children, workers=workers)

    occurrences = {(e.i, e.j): 0 for e in baseline.edges}
    sign_hits = 0
    total_hits = 0
    recovered_fractions = []
    baseline_signs = {(e.i, e.j): e.sign for e in baseline.edges}
    for edges_b in replicate_edges:
        signs_b = {(e.i, e.j): e.sign for e in edges_b}
        hits = 0
        for pair, sign in baseline_signs.items():
            if pair in signs_b:
                occurrences[pair] += 1
                hits += 1
                total_hits += 1
                if signs_b[pair] == sign:
                    sign_hits += 1
        recovered_fractions.append(hits / len(baseline.edges) if baseline.edges else 1.0)

    baseline_counted = SupportSet(edges=baseline.edges, occurrences=occurrences)
    stable = filter_stable(baseline_counted, retain_threshold)
    return StabilityResult(
        baseline=baseline_counted,
        stable=stable,
        stability=float(np.mean(recovered_fractions)),
        positives=sum(1 for e in stable.edges if e.sign > 0),
        negatives=sum(1 for e in stable.edges if e.sign < 0),
        sign_agreement=(sign_hits / total_hits) if total_hits else 1.0,
        replicates=int(replicates),
        retain_threshold=int(retain_threshold),
        seed=int(seed),
        lambda_star=baseline_fit.lambda_star,
        reuse_lambda=bool(reuse_lambda),
        baseline_omega=baseline_fit.omega,
    )
