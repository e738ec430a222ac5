"""Median-of-means covariance estimation.

Heavy-tailed rows wreck the sample covariance: a single gross sample can move
entries arbitrarily far.  The median-of-means (MOM) estimator splits the
samples into blocks, averages within blocks, and takes the median across
blocks, entry by entry.  First and second moments are robustified
separately under one shared partition:

    gamma_ij = median_l( mean_{k in block l} W_ki W_kj )
             - median_l( mean_{k in block l} W_ki ) * median_l( mean W_kj )

With a single block the medians are plain means and the estimator collapses
to the sample covariance (divisor n).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PartitionScheme:
    """Partition of ``range(n)`` into ``block_count`` contiguous blocks.

    Block sizes differ by at most one; the larger blocks come first.
    """

    n: int
    block_count: int
    blocks: tuple

    def sizes(self) -> list:
        return [len(b) for b in self.blocks]


def regular_partition(n: int, block_count: int) -> PartitionScheme:
    """Split sample indices 0..n-1 into contiguous near-equal blocks.

    The first ``n mod block_count`` blocks get ``ceil(n / block_count)``
    elements, the rest get the floor.
    """
    n = int(n)
    block_count = int(block_count)
    if block_count < 1:
        raise ValueError(f"block_count must be >= 1, got {block_count}")
    if block_count > n:
        raise ValueError(f"block_count {block_count} exceeds sample count {n}")
    base, extra = divmod(n, block_count)
    sizes = [base + 1] * extra + [base] * (block_count - extra)
    blocks = []
    start = 0
    for size in sizes:
        blocks.append(np.arange(start, start + size))
        start += size
    return PartitionScheme(n=n, block_count=block_count, blocks=tuple(blocks))


def default_block_count(p: int, L: float = 1.0, n_cap: int | None = None) -> int:
    """Default MOM block count ``ceil((2 + L) * ln p)``, clamped to ``n_cap``.

    ``L`` trades robustness (more blocks) against block-level stability
    (fewer, larger blocks); the caller passes the sample count as ``n_cap``
    so the partition never degenerates below one sample per block.
    """
    if p < 2:
        raise ValueError(f"p must be >= 2, got {p}")
    if not (L > 0):
        raise ValueError(f"L must be > 0, got {L!r}")
    m = math.ceil((2.0 + L) * math.log(p))
    if n_cap is not None:
        if n_cap < 1:
            raise ValueError(f"n_cap must be >= 1, got {n_cap}")
        m = min(m, int(n_cap))
    return int(m)


def _values(W) -> np.ndarray:
    arr = np.asarray(getattr(W, "values", W), dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"data matrix must be 2-d, got ndim={arr.ndim}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("data matrix contains non-finite entries")
    return arr


def _block_moments(block: np.ndarray):
    # Shared by the sample and MOM paths so that MOM with one block is
    # bitwise identical to the sample covariance.
    mean = block.mean(axis=0)
    second = block.T @ block / block.shape[0]
    return mean, second


def _symmetrize(a: np.ndarray) -> np.ndarray:
    # Exact no-op when a is already bitwise symmetric.
    return (a + a.T) / 2.0


def median_of_means(values, partition: PartitionScheme) -> float:
    """Median across partition blocks of within-block means.

    An even number of blocks takes the midpoint of the two central order
    statistics.
    """
    arr = np.asarray(values, dtype=np.float64).ravel()
    if arr.size == 0:
        raise ValueError("median_of_means needs at least one value")
    if arr.size != partition.n:
        raise ValueError(
            f"partition covers {partition.n} samples but got {arr.size} values"
        )
    block_means = np.array([arr[idx].mean() for idx in partition.blocks])
    return float(np.median(block_means))


def sample_covariance(W) -> np.ndarray:
    """Sample covariance with divisor n (not n - 1)."""
    arr = _values(W)
    if arr.shape[0] < 2:
        raise ValueError(f"need at least 2 samples, got {arr.shape[0]}")
    mean, second = _block_moments(arr)
    return _symmetrize(second - np.outer(mean, mean))


def mom_covariance(W, block_count: int, *, shuffle_seed: int | None = None) -> np.ndarray:
    """Median-of-means covariance under a regular contiguous partition.

    Parameters
    ----------
    W : ClrMatrix or array_like
        Data matrix, one sample per row.
    block_count : int
        Number of partition blocks; must not exceed the sample count.
        One block reproduces the sample covariance exactly.
    shuffle_seed : int, optional
        When given, rows are permuted by a seeded generator before the
        contiguous partition is formed.  By default samples keep their
        stored order so repeated calls are reproducible.

    Returns
    -------
    numpy.ndarray
        Symmetric p x p estimate.  Not necessarily positive semidefinite;
        regularization happens downstream.
    """
    arr = _values(W)
    n = arr.shape[0]
    if n < 2:
        raise ValueError(f"need at least 2 samples, got {n}")
    if shuffle_seed is not None:
        arr = arr[np.random.default_rng(shuffle_seed).permutation(n)]
    partition = regular_partition(n, block_count)
    means = np.empty((partition.block_count, arr.shape[1]))
    seconds = np.empty((partition.block_count, arr.shape[1], arr.shape[1]))
    for l, idx in enumerate(partition.blocks):
        means[l], seconds[l] = _block_moments(arr[idx[0] : idx[-1] + 1])
    med_second = np.median(seconds, axis=0)
    med_mean = np.median(means, axis=0)
    return _symmetrize(med_second - np.outer(med_mean, med_mean))
