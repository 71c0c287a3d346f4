"""Matching-size selection.

Two procedures choose how many pairs to keep from the optimal-cost curve:

* ``select_k_known_noise`` needs the total pairwise noise variance
  sigma0^2 = sigma^2 + sigma_sharp^2 and keeps every size whose cost
  increment is within a chi-square-calibrated threshold.
* ``select_k_unknown_noise`` estimates the variance on the fly as
  sigma_bar_k^2 = phi(k) / (k * d) and walks k upward until an increment
  exceeds an inflated multiple of that estimate (or k hits min(n, m)).

Both report per-step diagnostics sufficient to replay the decision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .core import FeatureSet, PartialMatching
from .errors import ParameterError
from .flow import LssCurve
from .matching import lss_curve

# The sequential rule's inflation exponent gamma is the threshold-to-dimension
# ratio; outside the high-dimensional regime that ratio can reach or exceed 1,
# which would make the threshold infinite or negative.  Clamp it and flag the
# clamp in the outcome.
GAMMA_CAP = 0.5


def separation_rate(n: int, m: int, d: int, alpha: float) -> float:
    """Signal-to-noise level above which exact recovery is guaranteed.

    4 * max((d * L)**(1/4), (8 * L)**(1/2)) with L = log(4 n m / alpha).
    Nondecreasing in n, m and d; nonincreasing in alpha.
    """
    if n < 1 or m < 1 or d < 1:
        raise ParameterError(f"sizes must be >= 1, got n={n}, m={m}, d={d}")
    if not 0.0 < alpha < 1.0:
        raise ParameterError(f"alpha must be in (0, 1), got {alpha}")
    level = math.log(4.0 * n * m / alpha)
    return 4.0 * max((d * level) ** 0.25, math.sqrt(8.0 * level))


def noise_estimate(curve: LssCurve, k: int, d: int) -> float:
    """Plug-in variance estimate phi(k) / (k * d)."""
    if k < 1:
        raise ParameterError(f"noise estimate needs k >= 1, got {k}")
    if d < 1:
        raise ParameterError(f"d must be >= 1, got {d}")
    if k > len(curve):
        raise ParameterError(f"k={k} beyond the solved curve (k_max={len(curve)})")
    return curve.phi_at(k) / (k * d)


@dataclass(frozen=True)
class StepDiagnostic:
    """One examined size: the tested increment phi(k + window) - phi(k)."""

    k: int
    phi: float
    increment: float
    threshold: float
    accepted: bool
    window: int = 1

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "phi": self.phi,
            "increment": self.increment,
            "threshold": self.threshold,
            "accepted": self.accepted,
            "window": self.window,
        }


@dataclass(frozen=True, eq=False)
class SelectionOutcome:
    """Selected size, the matching, and enough diagnostics to replay the call.

    ``sigma_bar_sq`` is the plug-in noise estimate at the selected size and is
    None for the known-noise procedure.  ``gamma_clamped`` flags that the
    sequential rule's inflation ratio was capped at GAMMA_CAP.
    """

    k_hat: int
    matching: PartialMatching
    phi: float
    sigma_bar_sq: float | None
    diagnostics: tuple[StepDiagnostic, ...]
    gamma_clamped: bool = False


def known_noise_threshold(sigma0_sq: float, n: int, d: int, alpha: float) -> float:
    """Increment threshold sigma0^2 * (d + rate^2 / 4) for the known-noise rule."""
    if not sigma0_sq > 0:
        raise ParameterError(f"sigma0_sq must be positive, got {sigma0_sq}")
    rate = separation_rate(n, n, d, alpha)
    return sigma0_sq * (d + rate * rate / 4.0)


def known_noise_k_hat(increments: Sequence[float], threshold: float) -> int:
    """1 + the largest k whose increment is within the threshold (0 if none).

    ``increments[k]`` must be phi(k + 1) - phi(k) for k = 0, 1, ...; every
    increment is scanned, per the definition of the estimator.
    """
    best = -1
    for k, increment in enumerate(increments):
        if increment <= threshold:
            best = k
    return best + 1


def select_k_known_noise(
    curve: LssCurve,
    sigma0_sq: float | None,
    n: int,
    d: int,
    alpha: float = 0.01,
    *,
    sigma: float | None = None,
    sigma_sharp: float | None = None,
) -> SelectionOutcome:
    """Pick the matching size given the total noise variance.

    The noise may be given either as ``sigma0_sq`` directly or as the pair
    (sigma, sigma_sharp), in which case sigma0_sq = sigma**2 + sigma_sharp**2.
    The curve should normally be solved out to k_max = min(n, m); every
    available increment is examined.  When even the first increment exceeds
    the threshold the outcome is k_hat = 0 with an empty matching.
    """
    if (sigma is None) != (sigma_sharp is None):
        raise ParameterError("provide both sigma and sigma_sharp, or neither")
    if sigma is not None:
        if sigma0_sq is not None:
            raise ParameterError("sigma0_sq and (sigma, sigma_sharp) are mutually exclusive")
        sigma0_sq = sigma ** 2 + sigma_sharp ** 2
    if sigma0_sq is None:
        raise ParameterError("a noise level is required: sigma0_sq or (sigma, sigma_sharp)")
    threshold = known_noise_threshold(sigma0_sq, n, d, alpha)
    diagnostics = []
    best = -1
    for k, increment in enumerate(curve.increments()):
        accepted = increment <= threshold
        if accepted:
            best = k
        diagnostics.append(
            StepDiagnostic(k, curve.phi_at(k), increment, threshold, accepted)
        )
    k_hat = best + 1
    return SelectionOutcome(
        k_hat=k_hat,
        matching=curve.matching_at(k_hat),
        phi=curve.phi_at(k_hat),
        sigma_bar_sq=None,
        diagnostics=tuple(diagnostics),
    )


def _scan_unknown_noise(
    curve: LssCurve, d: int, k_cap: int, factor: float, k_min: int, step: int
) -> tuple[int, tuple[StepDiagnostic, ...]]:
    """Sequential scan: stop at the first k whose increment beats the threshold.

    With step > 1 the test compares phi(k + step) - phi(k) against step times
    the single-step threshold; after a coarse stop at k the window
    [k - step + 1, k] is re-scanned with step 1, so the reported size matches
    the step-1 procedure whenever both stop inside that window.
    """
    diagnostics: list[StepDiagnostic] = []
    k = k_min
    while k < k_cap:
        window = min(step, k_cap - k)
        increment = curve.phi_at(k + window) - curve.phi_at(k)
        threshold = window * factor * (curve.phi_at(k) / (k * d))
        stop = increment > threshold
        diagnostics.append(
            StepDiagnostic(k, curve.phi_at(k), increment, threshold, not stop, window)
        )
        if stop:
            if window == 1:
                return k, tuple(diagnostics)
            for fine_k in range(max(k_min, k - step + 1), k + 1):
                fine_increment = curve.phi_at(fine_k + 1) - curve.phi_at(fine_k)
                fine_threshold = factor * (curve.phi_at(fine_k) / (fine_k * d))
                fine_stop = fine_increment > fine_threshold
                diagnostics.append(
                    StepDiagnostic(
                        fine_k, curve.phi_at(fine_k), fine_increment, fine_threshold,
                        not fine_stop, 1,
                    )
                )
                if fine_stop:
                    return fine_k, tuple(diagnostics)
            return k, tuple(diagnostics)
        k += window
    return k_cap, tuple(diagnostics)


def select_k_unknown_noise(
    x: FeatureSet,
    y: FeatureSet,
    alpha: float = 0.01,
    k_min: int = 1,
    step: int = 1,
    *,
    scale: float | None = None,
) -> SelectionOutcome:
    """Jointly estimate the matching size and the noise variance.

    Starting at k = k_min, estimates sigma_bar_k^2 = phi(k) / (k * d) and
    stops at the first k where phi(k+1) - phi(k) exceeds
    (d + lam) / (1 - gamma) * sigma_bar_k^2, or at k = min(n, m).  The tuning
    values are lam = rate^2 / 4 and gamma = lam / d with
    rate = separation_rate(n, m, d, alpha); gamma is clamped at GAMMA_CAP
    (and the clamp flagged) since outside the high-dimensional regime the
    raw ratio can reach 1.

    The whole curve comes from one incremental solve, so step > 1 only saves
    threshold evaluations, not flow work.
    """
    if not 0.0 < alpha < 1.0:
        raise ParameterError(f"alpha must be in (0, 1), got {alpha}")
    k_cap = min(len(x), len(y))
    if not 1 <= k_min <= k_cap:
        raise ParameterError(f"k_min must be in 1..{k_cap}, got {k_min}")
    if step < 1:
        raise ParameterError(f"step must be >= 1, got {step}")
    d = x.dim
    rate = separation_rate(len(x), len(y), d, alpha)
    lam = rate * rate / 4.0
    gamma_raw = lam / d
    gamma = min(gamma_raw, GAMMA_CAP)
    factor = (d + lam) / (1.0 - gamma)
    curve = lss_curve(x, y, k_cap, scale=scale)
    k_hat, diagnostics = _scan_unknown_noise(curve, d, k_cap, factor, k_min, step)
    return SelectionOutcome(
        k_hat=k_hat,
        matching=curve.matching_at(k_hat),
        phi=curve.phi_at(k_hat),
        sigma_bar_sq=noise_estimate(curve, k_hat, d),
        diagnostics=diagnostics,
        gamma_clamped=gamma_raw > GAMMA_CAP,
    )
