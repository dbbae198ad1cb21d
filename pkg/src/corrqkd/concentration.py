"""Finite-size helpers: from probability relations to count relations.

The asymptotic estimator manipulates per-pulse probabilities.  A finite run
of N pulses only exposes counts, so every probability relation must be
restated for counts with an explicit failure probability.  Two standard
bounds are pinned here:

* ``azuma_deviation``: for a martingale with increments bounded by 1 over n
  rounds, the realized sum stays within ``sqrt((n/2) ln(1/eps))`` of its
  conditional expectation except with probability governed by ``eps``.
* ``chernoff_upper``: for n independent indicators of mean ``mu``, the
  largest count u whose tail probability still exceeds ``eps`` under the
  Chernoff-Hoeffding bound ``P[X >= u] <= exp(-n KL(u/n || mu))``, found by
  bisection.  This multiplicative form vanishes as ``mu -> 0``.

``finite_size_phase_error`` perturbs the asymptotic pipeline with these
terms: observed-count deviations use the number of detected rounds, while
the state-deviation events are accumulated over all emitted pulses (they can
all hide inside the detected sample in the worst case).  All terms push the
bound up, so it approaches the asymptotic value from above and coincides
with it as the deviations vanish.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

from .channel import UndefinedRateError, YieldSet
from .coeffs import CoefficientSet
from .rt import _solve_rows, phase_error_rate


@dataclass(frozen=True)
class CountBudget:
    """Pulse counts and per-application failure probability of one run."""

    n_total: float
    n_detected: float
    failure_eps: float

    def __post_init__(self) -> None:
        if not 0 < self.n_detected <= self.n_total:
            raise ValueError("need 0 < n_detected <= n_total")
        if not 0.0 < self.failure_eps < 1.0:
            raise ValueError("failure_eps must lie strictly inside (0, 1)")


@dataclass(frozen=True)
class FiniteSizeResult:
    """Finite-size phase-error bound and the pieces behind it."""

    e_x: float
    asymptotic_e_x: float
    inconclusive: bool
    observation_deviation: float
    d0x_upper: float


def azuma_deviation(n: float, failure_eps: float) -> float:
    """Count deviation absorbed by n rounds at the given failure level."""
    if n < 1:
        raise ValueError("need at least one round")
    if not 0.0 < failure_eps < 1.0:
        raise ValueError("failure_eps must lie strictly inside (0, 1)")
    return math.sqrt(0.5 * n * math.log(1.0 / failure_eps))


def _kl(x: float, y: float) -> float:
    """Bernoulli Kullback-Leibler divergence KL(x || y), natural log."""
    if x <= 0.0:
        return math.log(1.0 / (1.0 - y)) if y < 1.0 else math.inf
    if x >= 1.0:
        return math.log(1.0 / y) if y > 0.0 else math.inf
    if y <= 0.0 or y >= 1.0:
        return math.inf
    return x * math.log(x / y) + (1.0 - x) * math.log((1.0 - x) / (1.0 - y))


def chernoff_upper(mean: float, n: float, failure_eps: float) -> float:
    """Upper bound on the realized count of n indicators with mean ``mean``.

    Solves ``n * KL(u/n || mean) = ln(1/failure_eps)`` for ``u >= n * mean``
    by bisection; the count exceeds the returned value with probability at
    most ``failure_eps``.  Monotone in ``mean`` and exactly zero for a zero
    mean.
    """
    if not 0.0 <= mean <= 1.0:
        raise ValueError("mean must lie in [0, 1]")
    if n < 1:
        raise ValueError("need at least one trial")
    if not 0.0 < failure_eps < 1.0:
        raise ValueError("failure_eps must lie strictly inside (0, 1)")
    if mean == 0.0:
        return 0.0
    target = math.log(1.0 / failure_eps) / n
    if _kl(1.0, mean) <= target:
        return float(n)
    lo, hi = mean, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _kl(mid, mean) > target:
            hi = mid
        else:
            lo = mid
    return n * 0.5 * (lo + hi)


def finite_size_phase_error(
    yields: YieldSet,
    coeffs: CoefficientSet,
    d0x: float,
    probabilities: Mapping[str, float],
    p_z_alice: float,
    p_z_bob: float,
    budget: CountBudget,
) -> FiniteSizeResult:
    """Finite-size upper bound on the phase error rate.

    Every probability of the asymptotic pipeline becomes a count over
    ``budget.n_total`` pulses.  Observed and estimated detected-event counts
    absorb one ``azuma_deviation(budget.n_detected, eps)`` each; the
    state-deviation count is upper-bounded by ``chernoff_upper(d0x,
    budget.n_total, eps)`` because those events accumulate over all emitted
    pulses, not only detected ones.  The deviations enter through the exact
    sensitivity of the phase-error numerator to each observed yield, so a
    zero-deviation budget reproduces the asymptotic bound identically.

    A bound exceeding 1 is physically vacuous and is flagged inconclusive
    (clamped at 1) rather than raised.
    """
    asymptotic = phase_error_rate(
        yields, coeffs, d0x, probabilities, p_z_alice, p_z_bob
    )

    n = budget.n_total
    dev_counts = azuma_deviation(budget.n_detected, budget.failure_eps)
    dev_prob = dev_counts / n
    d0x_upper = chernoff_upper(d0x, n, budget.failure_eps) / n

    p_x_bob = 1.0 - p_z_bob
    names = coeffs.settings
    matrix = tuple(coeffs.observed_row(name) for name in names)
    transposed = tuple(
        (matrix[0][r], matrix[1][r], matrix[2][r]) for r in range(3)
    )

    denominator = sum(
        yields.obs_z[(s, name)] for s in (0, 1) for name in ("0Z", "1Z")
    )
    if denominator <= 0.0:
        raise UndefinedRateError("no sifted Z-basis detections")

    numerator = dev_prob  # estimated-count deviation
    for s, alpha in ((0, 1), (1, 0)):
        weight = p_z_alice * p_z_bob * coeffs.a_weight[alpha]
        virtual_row = (
            weight,
            weight * coeffs.p_x_es[alpha],
            weight * coeffs.p_z_es[alpha],
        )
        sensitivity = _solve_rows(transposed, virtual_row)
        base = 0.0
        spread = 0.0
        for j, name in enumerate(names):
            grad = sensitivity[j] / (probabilities[name] * p_x_bob)
            base += grad * yields.obs_x[(s, name)]
            spread += abs(grad) * dev_prob
            if name == coeffs.x_setting:
                spread += abs(grad) * d0x_upper
        numerator += base + spread

    e_x = numerator / denominator
    inconclusive = e_x > 1.0
    e_x = min(max(e_x, 0.0), 1.0)
    return FiniteSizeResult(
        e_x=e_x,
        asymptotic_e_x=asymptotic.e_x,
        inconclusive=inconclusive,
        observation_deviation=dev_prob,
        d0x_upper=d0x_upper,
    )
