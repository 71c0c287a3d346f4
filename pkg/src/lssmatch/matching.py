"""k-cardinality least-sum-of-squares matching and its baselines.

``lss_match``/``lss_curve`` are the production path (min-cost flow on the
quantized squared-distance matrix).  ``brute_force_lss`` is the desk-scale
enumeration oracle and ``greedy_match`` the cheap upper-bound baseline; both
quantize costs with the same default rule so cost comparisons against the
flow solver are exact.
"""

from __future__ import annotations

import itertools

import numpy as np

from .core import CostMatrix, FeatureSet, PartialMatching, squared_distance_matrix
from .errors import ParameterError
from .flow import LssCurve, build_network, default_scale, quantize_costs, solve_incremental

BRUTE_FORCE_LIMIT = 8

_INT_MAX = np.iinfo(np.int64).max


def _prepare(x: FeatureSet, y: FeatureSet, scale: float | None):
    """Cost matrix, effective scale and swap flag for a matcher call.

    Sides are swapped when the left set is larger, so the solver always sees
    left-size <= right-size; matchings are swapped back before returning.
    The default scale depends only on the instance (via min(n, m)), never on
    the requested k, so phi values agree across calls at any k.
    """
    swapped = len(x) > len(y)
    if swapped:
        x, y = y, x
    costs = squared_distance_matrix(x, y)
    if scale is None:
        scale = default_scale(costs, min(costs.n_rows, costs.n_cols))
    return costs, float(scale), swapped


def _check_k(k: int, n: int, m: int) -> None:
    if not 1 <= k <= min(n, m):
        raise ParameterError(f"k must be in 1..{min(n, m)}, got {k}")


def lss_curve(x: FeatureSet, y: FeatureSet, k_max: int, *, scale: float | None = None) -> LssCurve:
    """Optimal least-sum-of-squares matchings of every size 1..k_max.

    One incremental flow solve; the returned matchings are in the original
    (x, y) orientation regardless of which side is larger.
    """
    _check_k(k_max, len(x), len(y))
    costs, scale, swapped = _prepare(x, y, scale)
    curve = solve_incremental(build_network(costs, scale), k_max)
    if swapped:
        curve = LssCurve(
            phi=curve.phi,
            matchings=tuple(matching.inverted() for matching in curve.matchings),
            phi_scaled=curve.phi_scaled,
            scale=curve.scale,
        )
    return curve


def lss_match(x: FeatureSet, y: FeatureSet, k: int, *, scale: float | None = None) -> tuple[PartialMatching, float]:
    """The size-k matching minimizing the sum of squared distances.

    Returns the matching and the attained objective value phi(k).
    """
    curve = lss_curve(x, y, k, scale=scale)
    return curve.matchings[-1], curve.phi[-1]


def brute_force_lss(x: FeatureSet, y: FeatureSet, k: int, *, scale: float | None = None) -> tuple[PartialMatching, float]:
    """Exact optimum by enumerating every injective size-k map.

    Desk-scale oracle only: refuses instances with more than
    ``BRUTE_FORCE_LIMIT`` points per side.  Uses the same cost quantization
    as ``lss_match`` so the two objective values are exactly comparable.
    Ties are broken by the lexicographically smallest sorted pair list.
    """
    n, m = len(x), len(y)
    if n > BRUTE_FORCE_LIMIT or m > BRUTE_FORCE_LIMIT:
        raise ParameterError(
            f"brute force is guarded to sizes <= {BRUTE_FORCE_LIMIT}, got {n} x {m}"
        )
    _check_k(k, n, m)
    costs = squared_distance_matrix(x, y)
    if scale is None:
        scale = default_scale(costs, min(n, m))
    grid = quantize_costs(costs, scale).tolist()
    best: tuple[int, tuple[tuple[int, int], ...]] | None = None
    for rows in itertools.combinations(range(n), k):
        for cols in itertools.permutations(range(m), k):
            cost = 0
            for i, j in zip(rows, cols):
                cost += grid[i][j]
            pairs = tuple(sorted(zip(rows, cols)))
            candidate = (cost, pairs)
            if best is None or candidate < best:
                best = candidate
    assert best is not None
    return PartialMatching(frozenset(best[1])), best[0] / float(scale)


def greedy_match(x: FeatureSet, y: FeatureSet, k: int, *, scale: float | None = None) -> tuple[PartialMatching, float]:
    """Repeatedly take the globally cheapest pair among unused rows/columns.

    Returns the matching and its cost sum, an upper bound on phi(k).  Uses
    the same quantization as ``lss_match`` so the bound is exact on the
    shared integer grid.  Ties go to the smallest (row, column) pair.
    """
    n, m = len(x), len(y)
    _check_k(k, n, m)
    costs = squared_distance_matrix(x, y)
    if scale is None:
        scale = default_scale(costs, min(n, m))
    grid = quantize_costs(costs, scale).copy()
    pairs = []
    total = 0
    for _ in range(k):
        flat = int(np.argmin(grid))
        i, j = divmod(flat, m)
        total += int(grid[i, j])
        pairs.append((i, j))
        grid[i, :] = _INT_MAX
        grid[:, j] = _INT_MAX
    return PartialMatching(frozenset(pairs)), total / float(scale)
