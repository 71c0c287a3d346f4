"""Domain types shared across the package and the distance computation.

All types are immutable after construction (backing arrays are marked
read-only), so instances can be shared freely between threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import (
    DimensionMismatchError,
    DuplicateLeftIndexError,
    DuplicateRightIndexError,
    IndexRangeError,
    MatchingValidationError,
    NonFiniteDataError,
    ParameterError,
)

Pair = tuple[int, int]

# Rows per block when forming the (rows x m x d) difference tensor; keeps the
# temporary under ~32 MB of float64.
_BLOCK_ELEMS = 4_000_000


@dataclass(frozen=True, eq=False)
class FeatureSet:
    """An ordered collection of n real vectors of common dimension d.

    ``vectors`` is coerced to a read-only float64 array of shape (n, d) with
    n >= 1, d >= 1 and only finite coordinates.
    """

    vectors: np.ndarray

    def __post_init__(self):
        arr = np.array(self.vectors, dtype=np.float64)
        if arr.ndim != 2:
            raise DimensionMismatchError(
                f"feature set must be a 2-D array of row vectors, got ndim={arr.ndim}"
            )
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise DimensionMismatchError(
                f"feature set needs at least one vector of dimension >= 1, got shape {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise NonFiniteDataError("feature coordinates must be finite (no NaN/Inf)")
        arr.setflags(write=False)
        object.__setattr__(self, "vectors", arr)

    @property
    def n(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __len__(self) -> int:
        return self.n

    def scaled(self, factor: float) -> "FeatureSet":
        """Return a copy with every coordinate multiplied by ``factor``."""
        return FeatureSet(self.vectors * float(factor))


@dataclass(frozen=True, eq=False)
class CostMatrix:
    """An n x m matrix of nonnegative, finite pairwise costs."""

    costs: np.ndarray

    def __post_init__(self):
        arr = np.array(self.costs, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise DimensionMismatchError(
                f"cost matrix must be 2-D and non-empty, got shape {getattr(arr, 'shape', None)}"
            )
        if not np.all(np.isfinite(arr)):
            raise NonFiniteDataError("costs must be finite")
        if np.any(arr < 0.0):
            raise ParameterError("costs must be nonnegative")
        arr.setflags(write=False)
        object.__setattr__(self, "costs", arr)

    @property
    def n_rows(self) -> int:
        return self.costs.shape[0]

    @property
    def n_cols(self) -> int:
        return self.costs.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.costs.shape

    def max(self) -> float:
        return float(self.costs.max())


def _as_pairs(pairs: Iterable[Pair]) -> tuple[Pair, ...]:
    out = []
    for pair in pairs:
        i, j = pair
        i, j = int(i), int(j)
        if i < 0 or j < 0:
            raise IndexRangeError(f"pair ({i}, {j}) has a negative index")
        out.append((i, j))
    return tuple(sorted(set(out)))


def _check_injective(pairs: Iterable[Pair]) -> None:
    seen_left: set[int] = set()
    seen_right: set[int] = set()
    for i, j in pairs:
        if i in seen_left:
            raise DuplicateLeftIndexError(f"left index {i} appears in more than one pair")
        if j in seen_right:
            raise DuplicateRightIndexError(f"right index {j} appears in more than one pair")
        seen_left.add(i)
        seen_right.add(j)


@dataclass(frozen=True)
class PartialMatching:
    """An injective partial map from left indices to right indices.

    Stored as a frozen set of (left, right) pairs; the support size k is the
    number of pairs.  Injectivity is enforced at construction; index-range
    checks need the ambient sizes and live in :func:`validate_matching`.
    """

    pairs: frozenset[Pair]

    def __post_init__(self):
        pairs = _as_pairs(self.pairs)
        _check_injective(pairs)
        object.__setattr__(self, "pairs", frozenset(pairs))

    @classmethod
    def empty(cls) -> "PartialMatching":
        return cls(frozenset())

    @property
    def size(self) -> int:
        return len(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    @property
    def support(self) -> frozenset[int]:
        """Matched left indices."""
        return frozenset(i for i, _ in self.pairs)

    @property
    def image(self) -> frozenset[int]:
        """Matched right indices."""
        return frozenset(j for _, j in self.pairs)

    def sorted_pairs(self) -> list[Pair]:
        return sorted(self.pairs)

    def as_dict(self) -> dict[int, int]:
        return {i: j for i, j in self.pairs}

    def inverted(self) -> "PartialMatching":
        """Swap the roles of the two sides."""
        return PartialMatching(frozenset((j, i) for i, j in self.pairs))


def validate_matching(matching: PartialMatching | Iterable[Pair], n: int, m: int) -> None:
    """Check injectivity and index ranges of a matching against sizes n, m.

    Raises DuplicateLeftIndexError, DuplicateRightIndexError or
    IndexRangeError; returns None when the matching is valid.
    """
    if n < 0 or m < 0:
        raise ParameterError(f"sizes must be nonnegative, got n={n}, m={m}")
    if isinstance(matching, PartialMatching):
        pairs: Iterable[Pair] = matching.sorted_pairs()
    else:
        pairs = sorted((int(i), int(j)) for i, j in matching)
    _check_injective(pairs)
    for i, j in pairs:
        if not 0 <= i < n:
            raise IndexRangeError(f"left index {i} out of range for n={n}")
        if not 0 <= j < m:
            raise IndexRangeError(f"right index {j} out of range for m={m}")


def squared_distance_matrix(x: FeatureSet, y: FeatureSet) -> CostMatrix:
    """Pairwise squared Euclidean distances between two feature sets.

    Entry (i, j) is sum_c (x_i[c] - y_j[c])**2, accumulated in double
    precision with the naive difference-and-square formula, so an entry is
    exactly zero iff the two vectors are coordinatewise identical (barring
    subnormal underflow).  Rows are processed in blocks to bound the size of
    the intermediate difference tensor; the result is identical to the
    unblocked computation.
    """
    if x.dim != y.dim:
        raise DimensionMismatchError(
            f"feature dimensions differ: left d={x.dim}, right d={y.dim}"
        )
    xv, yv = x.vectors, y.vectors
    n, d = xv.shape
    m = yv.shape[0]
    out = np.empty((n, m), dtype=np.float64)
    block = max(1, _BLOCK_ELEMS // max(1, m * d))
    for lo in range(0, n, block):
        hi = min(n, lo + block)
        diff = xv[lo:hi, None, :] - yv[None, :, :]
        np.square(diff, out=diff)
        np.sum(diff, axis=2, out=out[lo:hi])
    return CostMatrix(out)


@dataclass(frozen=True, eq=False)
class GroundTruth:
    """A planted matching: true means, true pairs and the two noise levels.

    Invariant: ``theta`` row i and ``theta_sharp`` row pi_star(i) are
    coordinatewise identical for every matched i.
    """

    pi_star: PartialMatching
    theta: FeatureSet
    theta_sharp: FeatureSet
    sigma: float
    sigma_sharp: float

    def __post_init__(self):
        if self.sigma < 0 or self.sigma_sharp < 0:
            raise ParameterError("noise levels must be nonnegative")
        if self.theta.dim != self.theta_sharp.dim:
            raise DimensionMismatchError("theta and theta_sharp dimensions differ")
        validate_matching(self.pi_star, self.theta.n, self.theta_sharp.n)
        for i, j in self.pi_star.sorted_pairs():
            if not np.array_equal(self.theta.vectors[i], self.theta_sharp.vectors[j]):
                raise MatchingValidationError(
                    f"theta[{i}] and theta_sharp[{j}] must be identical for a matched pair"
                )

    @property
    def k_star(self) -> int:
        return self.pi_star.size

    @property
    def n(self) -> int:
        return self.theta.n

    @property
    def m(self) -> int:
        return self.theta_sharp.n

    @property
    def dim(self) -> int:
        return self.theta.dim

    @property
    def noise_variance_sum(self) -> float:
        """Total pairwise noise variance sigma**2 + sigma_sharp**2."""
        return self.sigma ** 2 + self.sigma_sharp ** 2
