"""Planted-matching instance generation, recovery metrics and sweep runners.

Instances follow the additive-Gaussian model: true means for the matched
pairs are shared between the two sides, outlier means are shifted off the
common cloud, and both sides are observed under isotropic Gaussian noise.
The difficulty of an instance is summarized by the realized signal-to-noise
floor over all non-matching pairs (``kappa_bar_all``); sweeps drive it via
the spread parameter tau and report the realized value, which is what the
benchmark tables are bucketed by.

Randomness comes from a counter-based generator (Philox) keyed through
SeedSequence, with one independent stream per (tau, trial) cell, so serial
and parallel sweep execution produce bit-identical tables.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from typing import Iterable, Literal, Sequence

import numpy as np

from .core import FeatureSet, GroundTruth, PartialMatching, squared_distance_matrix
from .errors import ParameterError
from .matching import lss_curve, lss_match
from .selection import SelectionOutcome, select_k_known_noise, select_k_unknown_noise

TABLE_HEADER = ("kappa_bar", "metric", "mean", "trials", "stderr")

SelectionMode = Literal["known-noise", "unknown-noise"]


@dataclass(frozen=True)
class SynthConfig:
    """Geometry, spread, noise levels and seed of one synthetic instance."""

    n: int
    m: int
    d: int
    k_star: int
    tau: float
    sigma: float = 1.0
    sigma_sharp: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.n < 1 or self.m < 1 or self.d < 1:
            raise ParameterError(f"sizes must be >= 1, got n={self.n}, m={self.m}, d={self.d}")
        if not 0 <= self.k_star <= min(self.n, self.m):
            raise ParameterError(
                f"k_star must be in 0..{min(self.n, self.m)}, got {self.k_star}"
            )
        if not self.tau > 0:
            raise ParameterError(f"tau must be positive, got {self.tau}")
        if self.sigma < 0 or self.sigma_sharp < 0:
            raise ParameterError("noise levels must be nonnegative")


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def cell_seed(root_seed: int, *key: int) -> int:
    """A 64-bit seed for one grid cell, independent across distinct keys."""
    sequence = np.random.SeedSequence(root_seed, spawn_key=tuple(int(k) for k in key))
    return int(sequence.generate_state(1, np.uint64)[0])


def generate_instance(cfg: SynthConfig) -> tuple[FeatureSet, FeatureSet, GroundTruth]:
    """Draw one planted instance; deterministic given cfg (including seed).

    True means are i.i.d. N(0, tau^2) per coordinate.  The matched block is
    shared verbatim between the two sides with the identity pairing on the
    first k_star indices.  Unmatched left means are shifted by +tau on every
    coordinate and unmatched right means (fresh draws) by +2*tau, which keeps
    the two outlier clouds away from each other and from the inliers.
    Observations add sigma (resp. sigma_sharp) times i.i.d. standard normal
    noise.
    """
    rng = _rng(cfg.seed)
    n, m, d, k_star = cfg.n, cfg.m, cfg.d, cfg.k_star
    theta = cfg.tau * rng.standard_normal((n, d))
    theta[k_star:] += cfg.tau
    theta_sharp = np.empty((m, d), dtype=np.float64)
    theta_sharp[:k_star] = theta[:k_star]
    theta_sharp[k_star:] = cfg.tau * rng.standard_normal((m - k_star, d)) + 2.0 * cfg.tau
    x = theta + cfg.sigma * rng.standard_normal((n, d))
    y = theta_sharp + cfg.sigma_sharp * rng.standard_normal((m, d))
    truth = GroundTruth(
        pi_star=PartialMatching(frozenset((i, i) for i in range(k_star))),
        theta=FeatureSet(theta),
        theta_sharp=FeatureSet(theta_sharp),
        sigma=cfg.sigma,
        sigma_sharp=cfg.sigma_sharp,
    )
    return FeatureSet(x), FeatureSet(y), truth


def kappa_bar_all(truth: GroundTruth) -> float:
    """Realized signal-to-noise floor over all non-matching pairs.

    min over i and over j != pi_star(i) of
    ||theta_i - theta_sharp_j|| / sqrt(sigma^2 + sigma_sharp^2).
    Returns +inf when no non-matching pair exists (n = m = k_star = 1).
    """
    sigma0_sq = truth.noise_variance_sum
    if sigma0_sq <= 0:
        raise ParameterError("kappa is undefined for zero total noise variance")
    gaps = squared_distance_matrix(truth.theta, truth.theta_sharp).costs.copy()
    for i, j in truth.pi_star.pairs:
        gaps[i, j] = np.inf
    floor = float(gaps.min())
    if math.isinf(floor):
        return math.inf
    return math.sqrt(floor / sigma0_sq)


def precision(pi_hat: PartialMatching, truth: GroundTruth) -> float:
    """Fraction of returned pairs that are true pairs; 1.0 for an empty matching."""
    if len(pi_hat) == 0:
        return 1.0
    planted = truth.pi_star.as_dict()
    correct = sum(1 for i, j in pi_hat.pairs if planted.get(i) == j)
    return correct / len(pi_hat)


def subset_recovery_ok(pi_hat: PartialMatching, truth: GroundTruth) -> bool:
    """True iff every returned pair is a true pair (vacuously true when empty)."""
    planted = truth.pi_star.as_dict()
    return all(planted.get(i) == j for i, j in pi_hat.pairs)


@dataclass(frozen=True)
class TableRow:
    kappa_bar: float
    metric: str
    mean: float
    trials: int
    stderr: float


@dataclass(frozen=True, eq=False)
class ExperimentTable:
    """Aggregated sweep results, one row per (bucket, metric).

    Serializes to CSV with header ``kappa_bar,metric,mean,trials,stderr``.
    """

    rows: tuple[TableRow, ...]

    def __iter__(self):
        return iter(self.rows)

    def __len__(self) -> int:
        return len(self.rows)

    def metrics(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for row in self.rows:
            seen.setdefault(row.metric, None)
        return tuple(seen)

    def rows_for(self, metric: str) -> tuple[TableRow, ...]:
        return tuple(row for row in self.rows if row.metric == metric)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(TABLE_HEADER)
            for row in self.rows:
                writer.writerow(
                    [repr(row.kappa_bar), row.metric, repr(row.mean), row.trials, repr(row.stderr)]
                )

    @classmethod
    def from_csv(cls, path) -> "ExperimentTable":
        rows = []
        with open(path, newline="", encoding="utf-8") as handle:
            reader = csv.reader(handle)
            header = next(reader, None)
            if header is None or tuple(header) != TABLE_HEADER:
                raise ParameterError(f"unexpected table header {header!r}")
            for record in reader:
                kappa, metric, mean, trials, stderr = record
                rows.append(TableRow(float(kappa), metric, float(mean), int(trials), float(stderr)))
        return cls(tuple(rows))


def _mean_stderr(values: Sequence[float]) -> tuple[float, float]:
    arr = np.asarray(values, dtype=np.float64)
    mean = float(arr.mean())
    if arr.size < 2:
        return mean, 0.0
    return mean, float(arr.std(ddof=1) / math.sqrt(arr.size))


def _cell_instance(cfg: SynthConfig, tau: float, tau_index: int, trial: int):
    cell = replace(cfg, tau=float(tau), seed=cell_seed(cfg.seed, tau_index, trial))
    return generate_instance(cell)


def run_precision_sweep(
    cfg: SynthConfig, taus: Iterable[float], trials: int, k: int
) -> ExperimentTable:
    """Match with fixed size k across a tau grid; report precision and
    subset-recovery rate against the realized kappa_bar_all buckets."""
    if trials < 1:
        raise ParameterError(f"trials must be >= 1, got {trials}")
    rows: list[TableRow] = []
    for tau_index, tau in enumerate(taus):
        kappas, precisions, subsets = [], [], []
        for trial in range(trials):
            x, y, truth = _cell_instance(cfg, tau, tau_index, trial)
            kappas.append(kappa_bar_all(truth))
            pi_hat, _ = lss_match(x, y, k)
            precisions.append(precision(pi_hat, truth))
            subsets.append(1.0 if subset_recovery_ok(pi_hat, truth) else 0.0)
        bucket = float(np.mean(kappas))
        for metric, values in (("precision", precisions), ("subset_recovery", subsets)):
            mean, stderr = _mean_stderr(values)
            rows.append(TableRow(bucket, metric, mean, trials, stderr))
    return ExperimentTable(tuple(rows))


def _select(cfg: SynthConfig, x, y, mode: SelectionMode, alpha: float,
            k_min: int, step: int) -> SelectionOutcome:
    if mode == "known-noise":
        curve = lss_curve(x, y, min(len(x), len(y)))
        sigma0_sq = cfg.sigma ** 2 + cfg.sigma_sharp ** 2
        return select_k_known_noise(curve, sigma0_sq, cfg.n, cfg.d, alpha)
    if mode == "unknown-noise":
        return select_k_unknown_noise(x, y, alpha, k_min=k_min, step=step)
    raise ParameterError(f"mode must be 'known-noise' or 'unknown-noise', got {mode!r}")


def run_selection_sweep(
    cfg: SynthConfig,
    taus: Iterable[float],
    trials: int,
    mode: SelectionMode,
    *,
    alpha: float = 0.01,
    k_min: int = 1,
    step: int = 1,
) -> ExperimentTable:
    """Run a size-selection procedure across a tau grid.

    Per bucket: mean selected size ``k_hat``, exact-recovery rate (size and
    every pair correct), and for the unknown-noise mode the mean
    ``sigma_bar_sq`` estimate.
    """
    if trials < 1:
        raise ParameterError(f"trials must be >= 1, got {trials}")
    rows: list[TableRow] = []
    for tau_index, tau in enumerate(taus):
        kappas, k_hats, exacts, sigma_bars = [], [], [], []
        for trial in range(trials):
            x, y, truth = _cell_instance(cfg, tau, tau_index, trial)
            kappas.append(kappa_bar_all(truth))
            outcome = _select(cfg, x, y, mode, alpha, k_min, step)
            k_hats.append(float(outcome.k_hat))
            exact = outcome.k_hat == truth.k_star and outcome.matching == truth.pi_star
            exacts.append(1.0 if exact else 0.0)
            if outcome.sigma_bar_sq is not None:
                sigma_bars.append(outcome.sigma_bar_sq)
        bucket = float(np.mean(kappas))
        emit = [("k_hat", k_hats), ("exact_recovery", exacts)]
        if sigma_bars:
            emit.append(("sigma_bar_sq", sigma_bars))
        for metric, values in emit:
            mean, stderr = _mean_stderr(values)
            rows.append(TableRow(bucket, metric, mean, trials, stderr))
    return ExperimentTable(tuple(rows))
