"""Tuning-parameter selection and the full estimation pipeline.

The pipeline: clr-transform the compositions, form a robust (median-of-means)
or plain sample covariance, build a linear grid of candidate tuning values,
optionally restrict the grid to the region where the full-data thresholded
estimate is positive definite, pick the tuning value by V-fold
cross-validation, and threshold the full-data covariance at the winner.

Cross-validation compares, per fold, the thresholded covariance fitted on
the complement against the un-thresholded covariance of the held-out fold in
squared Frobenius norm, averaged over folds.  Ties in the CV curve resolve
toward the largest (sparsest) candidate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .compdata import ClrMatrix, CompositionMatrix, clr_transform
from .metrics import min_eigenvalue
from .mom import default_block_count, mom_covariance, sample_covariance
from .threshold import DIAG_FLOOR, ThresholdRule, clamped_diagonal, threshold_matrix

ESTIMATOR_KINDS = ("rcec", "coat")

# Strict positivity margin for the positive-definiteness floor.
PD_TOL = 1e-10

# Upper end of the degenerate grid used when no off-diagonal signal exists.
DEGENERATE_GRID_MAX = 1e-12


@dataclass(frozen=True)
class EstimatorConfig:
    """Knobs of the estimation pipeline.

    estimator
        ``"rcec"`` (median-of-means covariance) or ``"coat"`` (sample
        covariance); both share the thresholding and tuning stages.
    rule
        Thresholding rule applied entrywise.
    folds
        Cross-validation fold count V; requires at least 2 samples per fold.
    grid_size
        Number of candidate tuning values on the linear grid.
    L
        Block-count aggressiveness for the median-of-means estimator.
    enforce_pd
        Restrict the grid to tuning values whose full-data estimate is
        positive definite before cross-validating.
    threshold_diagonal
        Also threshold variance entries (off by default).
    seed
        Seed for the fold-assignment shuffle.
    block_count
        Explicit median-of-means block count, overriding the default
        formula.  One block degenerates to the sample covariance.
    """

    estimator: str = "rcec"
    rule: ThresholdRule = field(default_factory=ThresholdRule.soft)
    folds: int = 5
    grid_size: int = 50
    L: float = 1.0
    enforce_pd: bool = True
    threshold_diagonal: bool = False
    seed: int = 0
    block_count: int | None = None

    def __post_init__(self):
        if self.estimator not in ESTIMATOR_KINDS:
            raise ValueError(
                f"unknown estimator {self.estimator!r}; expected one of {ESTIMATOR_KINDS}"
            )
        if not isinstance(self.rule, ThresholdRule):
            raise ValueError(f"rule must be a ThresholdRule, got {self.rule!r}")
        if int(self.folds) < 2:
            raise ValueError(f"folds must be >= 2, got {self.folds}")
        if int(self.grid_size) < 2:
            raise ValueError(f"grid_size must be >= 2, got {self.grid_size}")
        if not (self.L > 0):
            raise ValueError(f"L must be > 0, got {self.L!r}")
        if not isinstance(self.seed, (int, np.integer)) or isinstance(self.seed, bool):
            raise ValueError(f"seed must be an integer, got {self.seed!r}")
        if int(self.seed) < 0:
            raise ValueError(f"seed must be nonnegative, got {self.seed}")
        if self.block_count is not None and int(self.block_count) < 1:
            raise ValueError(f"block_count must be >= 1, got {self.block_count}")

    def to_kv(self) -> str:
        """Serialize to the flat ``key = value`` text format."""
        lines = [
            f"estimator = {self.estimator}",
            f"rule = {self.rule.spec()}",
            f"folds = {self.folds}",
            f"grid_size = {self.grid_size}",
            f"L = {self.L:g}",
            f"enforce_pd = {str(self.enforce_pd).lower()}",
            f"threshold_diagonal = {str(self.threshold_diagonal).lower()}",
            f"seed = {self.seed}",
        ]
        if self.block_count is not None:
            lines.append(f"block_count = {self.block_count}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_kv(cls, text: str) -> "EstimatorConfig":
        """Parse the flat ``key = value`` format written by :meth:`to_kv`.

        Blank lines and lines starting with ``#`` are ignored; unknown keys
        are rejected.
        """
        known = {f.name for f in fields(cls)}
        kwargs = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
            key = key.strip()
            value = value.strip()
            if key not in known:
                raise ValueError(f"line {lineno}: unknown config key {key!r}")
            if key in kwargs:
                raise ValueError(f"line {lineno}: duplicate config key {key!r}")
            try:
                kwargs[key] = _parse_kv_value(key, value)
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
        return cls(**kwargs)


def _parse_kv_value(key: str, value: str):
    if key == "estimator":
        return value
    if key == "rule":
        return ThresholdRule.parse(value)
    if key in ("folds", "grid_size", "seed"):
        return int(value)
    if key == "L":
        return float(value)
    if key in ("enforce_pd", "threshold_diagonal"):
        lowered = value.lower()
        if lowered in ("true", "1", "yes"):
            return True
        if lowered in ("false", "0", "no"):
            return False
        raise ValueError(f"expected a boolean for {key}, got {value!r}")
    if key == "block_count":
        return None if value.lower() in ("none", "") else int(value)
    raise ValueError(f"unknown config key {key!r}")


@dataclass
class EstimateResult:
    """Output of the estimation pipeline.

    omega
        Final thresholded covariance estimate.
    gamma
        Un-thresholded full-data covariance the estimate was built from.
    lambda_star
        Selected tuning value (member of the evaluated grid).
    cv_curve
        Array of shape (grid, 2): candidate value and mean CV error.
    min_eig
        Smallest eigenvalue of ``omega``.
    block_count
        Median-of-means block count actually used (1 for ``coat``).
    warnings
        Human-readable notes (diagonal clamping, PD floor fallbacks).
    """

    omega: np.ndarray
    gamma: np.ndarray
    lambda_star: float
    cv_curve: np.ndarray
    min_eig: float
    block_count: int
    warnings: list


def _clr_values(W) -> np.ndarray:
    if isinstance(W, ClrMatrix):
        return W.values
    arr = np.asarray(W, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"data matrix must be 2-d, got ndim={arr.ndim}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("data matrix contains non-finite entries")
    return arr


def _effective_block_count(config: EstimatorConfig, p: int, n_sub: int) -> int:
    if config.estimator == "coat":
        return 1
    if config.block_count is not None:
        return min(int(config.block_count), n_sub)
    return default_block_count(p, config.L, n_cap=n_sub)


def _subset_covariance(values: np.ndarray, config: EstimatorConfig) -> np.ndarray:
    m = _effective_block_count(config, values.shape[1], values.shape[0])
    if m == 1:
        return sample_covariance(values)
    return mom_covariance(values, m)


def lambda_grid(
    gamma, n: int, grid_size: int = 50, *, log_p_over_n: float | None = None
) -> np.ndarray:
    """Linear grid of candidate tuning values from 0 to the smallest
    all-zeroing value.

    The upper end is ``max_{i != j} |gamma_ij| / sqrt(gamma_ii gamma_jj
    log(p) / n)``: at that value the entry-dependent threshold covers every
    off-diagonal entry, so under soft thresholding the estimate is exactly
    diagonal.  Without off-diagonal signal the grid degenerates to
    ``[0, 1e-12]``.
    """
    arr = np.asarray(gamma, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"covariance must be square, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("covariance contains non-finite entries")
    if int(grid_size) < 2:
        raise ValueError(f"grid_size must be >= 2, got {grid_size}")
    p = arr.shape[0]
    if log_p_over_n is None:
        if n < 1:
            raise ValueError(f"n must be >= 1, got {n}")
        log_p_over_n = math.log(p) / n
    d = clamped_diagonal(arr)
    scale = np.sqrt(np.outer(d, d) * log_p_over_n)
    off = ~np.eye(p, dtype=bool)
    lam_max = float((np.abs(arr)[off] / scale[off]).max())
    if lam_max <= 0.0:
        lam_max = DEGENERATE_GRID_MAX
    return np.linspace(0.0, lam_max, int(grid_size))


def make_folds(n: int, folds: int, seed: int) -> list:
    """Shuffle sample indices with a seeded generator and split into
    ``folds`` contiguous chunks of near-equal size (larger chunks first).

    Each fold is returned in increasing index order, so subsets preserve the
    stored sample order.
    """
    if folds < 2:
        raise ValueError(f"folds must be >= 2, got {folds}")
    if n < 2 * folds:
        raise ValueError(f"need n >= 2 * folds = {2 * folds}, got n = {n}")
    order = np.random.default_rng(seed).permutation(n)
    return [np.sort(chunk) for chunk in np.array_split(order, folds)]


def cv_select(W, config: EstimatorConfig, *, grid=None):
    """Pick the tuning value by V-fold cross-validation.

    Parameters
    ----------
    W : ClrMatrix or array_like
        Data matrix the covariance estimators run on.
    config : EstimatorConfig
        Estimator kind, rule, fold count and fold seed.
    grid : array_like, optional
        Candidate values to evaluate.  Defaults to :func:`lambda_grid` on
        the full-data covariance.

    Returns
    -------
    (float, numpy.ndarray)
        The winning value and the CV curve as an array of
        ``(candidate, mean error)`` rows.  Ties resolve to the largest
        candidate.
    """
    values = _clr_values(W)
    n, p = values.shape
    fold_indices = make_folds(n, int(config.folds), int(config.seed))
    if grid is None:
        grid = lambda_grid(_subset_covariance(values, config), n, config.grid_size)
    grid = np.asarray(grid, dtype=np.float64)
    if grid.ndim != 1 or grid.size < 1:
        raise ValueError("grid must be a nonempty 1-d array")

    errors = np.zeros((len(fold_indices), grid.size))
    for v, test_idx in enumerate(fold_indices):
        train_mask = np.ones(n, dtype=bool)
        train_mask[test_idx] = False
        train = values[train_mask]
        test = values[test_idx]
        gamma_train = _subset_covariance(train, config)
        gamma_test = _subset_covariance(test, config)
        for g, lam in enumerate(grid):
            omega = threshold_matrix(
                gamma_train,
                float(lam),
                train.shape[0],
                config.rule,
                threshold_diagonal=config.threshold_diagonal,
            )
            diff = omega - gamma_test
            errors[v, g] = float((diff * diff).sum())
    mean_errors = errors.mean(axis=0)
    best = int(np.flatnonzero(mean_errors == mean_errors.min())[-1])
    curve = np.column_stack([grid, mean_errors])
    return float(grid[best]), curve


def pd_floor(W, grid, config: EstimatorConfig):
    """Restrict a tuning grid to values giving a positive definite estimate.

    Scans the full-data thresholded estimate over the grid and returns the
    suffix starting at the smallest value whose minimum eigenvalue exceeds
    ``PD_TOL``.  If no value qualifies the full grid is returned with a
    warning.  The qualifying set is expected to be a suffix (thresholding
    harder moves the estimate toward its diagonal); a warning reports any
    exception observed.
    """
    values = _clr_values(W)
    gamma = _subset_covariance(values, config)
    return pd_floor_scan(gamma, grid, values.shape[0], config)


def pd_floor_scan(gamma, grid, n: int, config: EstimatorConfig):
    """Grid restriction as in :func:`pd_floor`, from a precomputed covariance.

    Returns ``(restricted_grid, warnings)``.
    """
    grid = np.asarray(grid, dtype=np.float64)
    if grid.ndim != 1 or grid.size < 1:
        raise ValueError("grid must be a nonempty 1-d array")
    notes = []
    qualifies = np.zeros(grid.size, dtype=bool)
    for g, lam in enumerate(grid):
        omega = threshold_matrix(
            gamma,
            float(lam),
            n,
            config.rule,
            threshold_diagonal=config.threshold_diagonal,
        )
        qualifies[g] = min_eigenvalue(omega) > PD_TOL
    if not qualifies.any():
        notes.append(
            "no grid value produced a positive definite estimate; "
            "using the full grid"
        )
        return grid, notes
    first = int(np.flatnonzero(qualifies)[0])
    if not qualifies[first:].all():
        notes.append(
            "positive definiteness is not monotone over the grid; "
            "the restricted grid contains non-definite candidates"
        )
    return grid[first:], notes


def estimate(X, config: EstimatorConfig | None = None) -> EstimateResult:
    """Run the full pipeline on compositional data.

    ``X`` is a :class:`CompositionMatrix` (or validated as one).  The data
    are clr-transformed and handed to the covariance, grid and CV stages;
    see the module docstring for the stage order.
    """
    if config is None:
        config = EstimatorConfig()
    if not isinstance(X, CompositionMatrix):
        X = CompositionMatrix(X)
    return _estimate_from_matrix(clr_transform(X).values, config)


def estimate_from_latent(Y, config: EstimatorConfig | None = None) -> EstimateResult:
    """Run the thresholding pipeline directly on latent (basis) data.

    Skips the clr transform; used as the oracle arm of benchmarks where the
    un-composed data are available.
    """
    if config is None:
        config = EstimatorConfig()
    return _estimate_from_matrix(_clr_values(Y), config)


def _estimate_from_matrix(values: np.ndarray, config: EstimatorConfig) -> EstimateResult:
    n, p = values.shape
    m = _effective_block_count(config, p, n)
    gamma = _subset_covariance(values, config)
    notes = []
    diag_min = float(np.diag(gamma).min())
    if diag_min < DIAG_FLOOR:
        notes.append(
            f"covariance diagonal entries as low as {diag_min:.3g} were clamped "
            f"to {DIAG_FLOOR:g} for threshold computation"
        )
    grid = lambda_grid(gamma, n, config.grid_size)
    if config.enforce_pd:
        grid, pd_notes = pd_floor_scan(gamma, grid, n, config)
        notes.extend(pd_notes)
    lambda_star, curve = cv_select(values, config, grid=grid)
    omega = threshold_matrix(
        gamma,
        lambda_star,
        n,
        config.rule,
        threshold_diagonal=config.threshold_diagonal,
    )
    min_eig = min_eigenvalue(omega)
    if config.enforce_pd and not (min_eig > PD_TOL):
        notes.append(
            f"final estimate is not positive definite (min eigenvalue {min_eig:.3g})"
        )
    return EstimateResult(
        omega=omega,
        gamma=gamma,
        lambda_star=lambda_star,
        cv_curve=curve,
        min_eig=min_eig,
        block_count=m,
        warnings=notes,
    )


def with_estimator(config: EstimatorConfig, estimator: str, seed: int | None = None):
    """Copy a config with a different estimator kind (and optionally seed)."""
    if seed is None:
        return replace(config, estimator=estimator)
    return replace(config, estimator=estimator, seed=int(seed))
