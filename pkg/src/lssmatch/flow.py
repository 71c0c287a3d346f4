"""Exact k-cardinality bipartite matching as an incremental min-cost flow.

The network is the source/sink-augmented bipartite graph: a unit-capacity,
zero-cost arc from the source to every left node, a unit-capacity arc of
integer cost round(cost * scale) for every (left, right) pair, and a
unit-capacity, zero-cost arc from every right node to the sink.  Pushing k
units of flow at minimum total cost through this graph selects a minimum-cost
matching of size exactly k (unit row and column capacities, total flow k).

The solver augments one unit at a time along a cheapest residual path
(successive shortest paths with node potentials, a label-setting search over
the right-side nodes).  Each intermediate flow of value k is itself a
minimum-cost flow of value k, so a single run yields the whole optimal-value
curve phi(1..k_max) together with an optimal matching for every k.

Costs are quantized to 64-bit integers (round-to-nearest at a configurable
scale) so all comparisons inside the solver are exact.  The returned phi may
differ from the real-valued optimum by at most k / (2 * scale).  Worst-case
work is O(k * (n*m + (n+m) log(n+m))) per curve; the inner loops are
vectorized over the right-side nodes.

Ties between equal-distance nodes are broken by the smallest node id, so the
output is deterministic.  A network mutates internal state during a solve and
must not be shared between concurrent solves; independent networks may run
concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import CostMatrix, PartialMatching
from .errors import CostOverflowError, ParameterError, SolverInvariantError

# Total-cost budget: min(n, m) * max scaled cost must stay within 2**62 so
# every Dijkstra label and potential provably fits in int64 (labels are
# bounded by one increment plus two arc costs; increments are bounded by the
# max cost; potentials by the running optimum).
COST_BUDGET = 2 ** 62
SCALE_CAP = float(2 ** 32)

_INT_MAX = np.iinfo(np.int64).max


def quantize_costs(costs: CostMatrix, scale: float) -> np.ndarray:
    """Round costs * scale to the nearest 64-bit integer (ties to even).

    Raises CostOverflowError when min(n, m) times the largest scaled cost
    exceeds the 2**62 budget, i.e. when a full solve could overflow int64.
    """
    if not (isinstance(scale, (int, float)) and math.isfinite(scale)) or scale <= 0:
        raise ParameterError(f"scale must be a positive finite real, got {scale!r}")
    k_cap = min(costs.n_rows, costs.n_cols)
    top = costs.max() * float(scale)
    if not math.isfinite(top) or k_cap * int(np.rint(top)) > COST_BUDGET:
        raise CostOverflowError(
            f"scaled costs overflow the 64-bit budget "
            f"(min(n, m)={k_cap}, max cost {costs.max():g}, scale {scale:g}); "
            f"use a smaller scale"
        )
    scaled = np.rint(costs.costs * float(scale)).astype(np.int64)
    scaled.setflags(write=False)
    return scaled


def default_scale(costs: CostMatrix, k_max: int) -> float:
    """Largest power of two S with k_max * round(max_cost * S) <= 2**62.

    Capped at 2**32; an all-zero cost matrix yields 1.0.  For typical feature
    data this keeps the quantization error k / (2 * S) many orders of
    magnitude below any statistical threshold.
    """
    if k_max < 1:
        raise ParameterError(f"k_max must be >= 1, got {k_max}")
    top = costs.max()
    if top == 0.0:
        return 1.0
    scale = SCALE_CAP
    while True:
        scaled_top = top * scale
        if math.isfinite(scaled_top) and k_max * int(np.rint(scaled_top)) <= COST_BUDGET:
            return scale
        scale /= 2.0


@dataclass(frozen=True, eq=False)
class LssCurve:
    """Optimal matching cost for every size k = 1..k_max, plus the matchings.

    ``phi[k-1]`` is the minimum sum of costs over all size-k matchings, in
    original (unscaled) cost units; ``phi_scaled`` holds the exact integer
    optima.  By convention phi(0) = 0.  The curve is nondecreasing and its
    increments are nondecreasing in k (the min-cost-flow value function is
    convex in the flow value); both facts are verified on every solve.
    """

    phi: tuple[float, ...]
    matchings: tuple[PartialMatching, ...]
    phi_scaled: tuple[int, ...]
    scale: float

    def __len__(self) -> int:
        return len(self.phi)

    @property
    def k_max(self) -> int:
        return len(self.phi)

    def phi_at(self, k: int) -> float:
        """phi(k) with the phi(0) = 0 convention."""
        if not 0 <= k <= len(self.phi):
            raise ParameterError(f"k={k} outside the solved range 0..{len(self.phi)}")
        return 0.0 if k == 0 else self.phi[k - 1]

    def matching_at(self, k: int) -> PartialMatching:
        if not 0 <= k <= len(self.matchings):
            raise ParameterError(f"k={k} outside the solved range 0..{len(self.matchings)}")
        return PartialMatching.empty() if k == 0 else self.matchings[k - 1]

    def increments(self) -> tuple[float, ...]:
        """phi(k+1) - phi(k) for k = 0..k_max-1."""
        prev = 0.0
        out = []
        for value in self.phi:
            out.append(value - prev)
            prev = value
        return tuple(out)


class FlowNetwork:
    """Solver state for one source/sink-augmented bipartite instance.

    Residual state is kept implicitly: ``match_row``/``match_col`` encode
    which bipartite arcs are saturated (and with them which source and sink
    arcs), ``pot_col`` holds the right-node potentials and row potentials are
    derived (zero on unmatched rows, tight on matched arcs).  Build instances
    via :func:`build_network`.
    """

    def __init__(self, costs_scaled: np.ndarray, scale: float):
        if costs_scaled.ndim != 2 or costs_scaled.dtype != np.int64:
            raise ParameterError("costs_scaled must be a 2-D int64 array")
        self.n_left, self.n_right = costs_scaled.shape
        self.scale = float(scale)
        self.costs_scaled = costs_scaled
        self.reset()

    # -- topology -----------------------------------------------------------

    @property
    def num_nodes(self) -> int:
        """Left + right nodes plus source and sink."""
        return self.n_left + self.n_right + 2

    @property
    def num_arcs(self) -> int:
        """Source arcs + bipartite arcs + sink arcs."""
        return self.n_left + self.n_left * self.n_right + self.n_right

    # -- state --------------------------------------------------------------

    def reset(self) -> None:
        """Drop all flow and potentials; ready for a fresh solve."""
        self.flow = 0
        self.match_row = np.full(self.n_left, -1, dtype=np.int64)
        self.match_col = np.full(self.n_right, -1, dtype=np.int64)
        self.pot_col = np.zeros(self.n_right, dtype=np.int64)
        # Cheapest source-side entry per column over the currently unmatched
        # rows (value and the smallest row attaining it).
        self._col_min_val = self.costs_scaled.min(axis=0)
        self._col_min_row = np.ascontiguousarray(self.costs_scaled.argmin(axis=0), dtype=np.int64)

    def row_potentials(self) -> np.ndarray:
        """Derived left-node potentials: 0 on unmatched rows, tight on matched arcs."""
        u = np.zeros(self.n_left, dtype=np.int64)
        matched = np.flatnonzero(self.match_row >= 0)
        cols = self.match_row[matched]
        u[matched] = self.costs_scaled[matched, cols] - self.pot_col[cols]
        return u

    def reduced_costs(self) -> np.ndarray:
        """Reduced cost of every bipartite arc under the current potentials.

        At any point between augmentations all entries are >= 0 and matched
        arcs are exactly 0 (complementary slackness).
        """
        u = self.row_potentials()
        return self.costs_scaled - u[:, None] - self.pot_col[None, :]

    def current_matching(self) -> PartialMatching:
        rows = np.flatnonzero(self.match_row >= 0)
        return PartialMatching(
            frozenset((int(i), int(self.match_row[i])) for i in rows)
        )

    # -- core ---------------------------------------------------------------

    def _augment(self) -> int:
        """Push one more unit along a cheapest residual path.

        Returns the exact scaled-cost increase of the optimum.  Label-setting
        search over the right-side nodes: a right node's label is the reduced
        length of the cheapest alternating path from any unmatched row; the
        search stops at the first unmatched right node (its sink arc has
        reduced cost zero by the potential update rule, so it is the cheapest
        way into the sink).
        """
        C = self.costs_scaled
        pot = self.pot_col
        dist = self._col_min_val - pot
        pred = self._col_min_row.copy()
        if int(dist.min()) < 0:
            raise SolverInvariantError("negative reduced cost on a source-side arc")
        settled = np.zeros(self.n_right, dtype=bool)
        while True:
            open_dist = np.where(settled, _INT_MAX, dist)
            j = int(np.argmin(open_dist))
            d_j = int(open_dist[j])
            if d_j == _INT_MAX:
                raise SolverInvariantError("label search exhausted before reaching the sink")
            settled[j] = True
            row = int(self.match_col[j])
            if row < 0:
                break
            # Relax the two-hop step through the matched row: back along the
            # saturated arc (j -> row), then forward to every other column.
            base = d_j + int(pot[j]) - int(C[row, j])
            cand = C[row] - pot
            cand += base
            if int(cand.min()) < d_j:
                raise SolverInvariantError("negative reduced cost on a bipartite arc")
            better = (cand < dist) & ~settled
            if better.any():
                dist[better] = cand[better]
                pred[better] = row
        # Potential update: settled nodes get their exact label, the rest the
        # path length; this keeps all residual reduced costs nonnegative.
        np.minimum(dist, d_j, out=dist)
        pot += dist
        # Flip the arcs along the augmenting path (pred chains back to the
        # unmatched row that starts the path).
        increment = 0
        col = j
        while True:
            row = int(pred[col])
            prev_col = int(self.match_row[row])
            self.match_row[row] = col
            self.match_col[col] = row
            increment += int(C[row, col])
            if prev_col < 0:
                break
            increment -= int(C[row, prev_col])
            col = prev_col
        self.flow += 1
        # `row` just left the unmatched set: refresh the per-column source-side
        # minima that went through it.
        stale = np.flatnonzero(self._col_min_row == row)
        if stale.size:
            free = np.flatnonzero(self.match_row < 0)
            if free.size:
                sub = C[np.ix_(free, stale)]
                pick = sub.argmin(axis=0)
                self._col_min_val[stale] = sub[pick, np.arange(stale.size)]
                self._col_min_row[stale] = free[pick]
            # No unmatched rows remain only when the solve is complete.
        return increment


def build_network(costs: CostMatrix, scale: float) -> FlowNetwork:
    """Quantize costs at ``scale`` and assemble the augmented flow network.

    Raises CostOverflowError (with a hint to lower the scale) when
    min(n, m) * max scaled cost exceeds the 2**62 budget.
    """
    return FlowNetwork(quantize_costs(costs, scale), scale)


def solve_incremental(net: FlowNetwork, k_max: int) -> LssCurve:
    """Solve for the optimal matchings of every size 1..k_max in one run.

    Resets the network first, then performs k_max unit augmentations; the
    state after augmentation k is an optimal size-k matching.  Verifies the
    curve-shape invariants (nondecreasing values, nondecreasing increments)
    on the exact integer optima and raises SolverInvariantError on violation.
    """
    cap = min(net.n_left, net.n_right)
    if not 1 <= k_max <= cap:
        raise ParameterError(f"k_max must be in 1..{cap}, got {k_max}")
    net.reset()
    phi_scaled: list[int] = []
    matchings: list[PartialMatching] = []
    total = 0
    last_increment = 0
    for _ in range(k_max):
        increment = net._augment()
        if increment < 0 or increment < last_increment:
            raise SolverInvariantError(
                f"optimal-value increments must be nonnegative and nondecreasing, "
                f"got {last_increment} then {increment}"
            )
        last_increment = increment
        total += increment
        phi_scaled.append(total)
        matchings.append(net.current_matching())
    phi = tuple(value / net.scale for value in phi_scaled)
    return LssCurve(phi, tuple(matchings), tuple(phi_scaled), net.scale)
