"""Containers and transforms for compositional data.

A composition is a vector of strictly positive parts carrying only relative
information; each row lives on the open simplex.  Downstream estimation works
on centered log-ratio (clr) coordinates, where ordinary covariance machinery
applies.  The containers here validate the invariants that the estimators
rely on (positivity, row closure, clr row centering) at construction time, so
the numerical code can assume clean input.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Closure tolerance: rows that do not sum to 1 within this bound are rejected
# rather than silently renormalized.
ROW_SUM_TOL = 1e-10

# clr rows are centered by construction; allow accumulated rounding only.
CLR_ROW_SUM_TOL = 1e-8

DEFAULT_ZERO_REPLACEMENT = 0.5


def _as_data_matrix(values, what: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"{what} must be a 2-d array, got ndim={arr.ndim}")
    n, p = arr.shape
    if n < 2:
        raise ValueError(f"{what} needs at least 2 samples, got n={n}")
    if p < 2:
        raise ValueError(f"{what} needs at least 2 components, got p={p}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{what} contains non-finite entries")
    return arr


@dataclass(frozen=True)
class CountMatrix:
    """Nonnegative count table, one sample per row.

    Every row must contain at least one strictly positive entry; a row of
    all zeros carries no relative information and is rejected.
    """

    values: np.ndarray

    def __post_init__(self):
        arr = _as_data_matrix(self.values, "count matrix")
        if np.any(arr < 0):
            raise ValueError("count matrix contains negative entries")
        if np.any(arr.sum(axis=1) <= 0):
            raise ValueError("count matrix contains a row of all zeros")
        object.__setattr__(self, "values", arr)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class CompositionMatrix:
    """Strictly positive proportion table whose rows sum to one.

    Rows failing closure within ``ROW_SUM_TOL`` are rejected, not
    renormalized: silently rescaling would hide upstream unit mistakes.
    Zero entries are rejected as well; zeros must be handled before closure
    (see :func:`close_counts`).
    """

    values: np.ndarray

    def __post_init__(self):
        arr = _as_data_matrix(self.values, "composition matrix")
        if np.any(arr <= 0):
            raise ValueError(
                "composition matrix entries must be strictly positive; "
                "replace zeros before closure (count input supports "
                "zero_replacement)"
            )
        row_sums = arr.sum(axis=1)
        if np.any(np.abs(row_sums - 1.0) > ROW_SUM_TOL):
            worst = int(np.argmax(np.abs(row_sums - 1.0)))
            raise ValueError(
                f"composition rows must sum to 1 within {ROW_SUM_TOL:g}; "
                f"row {worst} sums to {row_sums[worst]!r}"
            )
        object.__setattr__(self, "values", arr)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class ClrMatrix:
    """Centered log-ratio coordinates, one sample per row.

    Rows sum to zero by construction of the clr transform; the tolerance is
    loose enough for accumulated rounding but catches uncentered input.
    """

    values: np.ndarray

    def __post_init__(self):
        arr = _as_data_matrix(self.values, "clr matrix")
        row_sums = arr.sum(axis=1)
        if np.any(np.abs(row_sums) > CLR_ROW_SUM_TOL):
            worst = int(np.argmax(np.abs(row_sums)))
            raise ValueError(
                f"clr rows must sum to 0 within {CLR_ROW_SUM_TOL:g}; "
                f"row {worst} sums to {row_sums[worst]!r}"
            )
        object.__setattr__(self, "values", arr)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]


def close_counts(
    counts, zero_replacement: float = DEFAULT_ZERO_REPLACEMENT
) -> CompositionMatrix:
    """Replace zero counts and close rows to proportions.

    Parameters
    ----------
    counts : CountMatrix or array_like
        Nonnegative count table; every row needs a positive entry.
    zero_replacement : float
        Pseudo-count substituted for exact zeros before closure.  Must be
        strictly positive.

    Returns
    -------
    CompositionMatrix
        Row-closed strictly positive proportions.
    """
    if not isinstance(counts, CountMatrix):
        counts = CountMatrix(counts)
    if not (zero_replacement > 0):
        raise ValueError(
            f"zero_replacement must be strictly positive, got {zero_replacement!r}"
        )
    filled = np.where(counts.values == 0, zero_replacement, counts.values)
    closed = filled / filled.sum(axis=1, keepdims=True)
    return CompositionMatrix(closed)


def clr_transform(composition) -> ClrMatrix:
    """Map compositions to centered log-ratio coordinates.

    Each entry becomes ``log x_kj - mean_i log x_ki`` (natural log); the
    subtraction of the row mean in log space divides by the geometric mean,
    so the result is invariant to positive rescaling of a row.
    """
    if not isinstance(composition, CompositionMatrix):
        composition = CompositionMatrix(composition)
    logs = np.log(composition.values)
    centered = logs - logs.mean(axis=1, keepdims=True)
    return ClrMatrix(centered)


def variation_from_cov(omega) -> np.ndarray:
    """Variation matrix implied by a covariance matrix.

    ``t_ij = omega_ii + omega_jj - 2 omega_ij``, the variance of the log
    ratio of parts i and j under covariance ``omega``.  The diagonal is zero.
    """
    arr = np.asarray(omega, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"covariance must be square, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("covariance contains non-finite entries")
    d = np.diag(arr)
    return d[:, None] + d[None, :] - 2.0 * arr
