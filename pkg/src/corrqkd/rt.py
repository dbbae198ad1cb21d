"""Phase-error estimation through reference-state tomography.

The estimator works entirely with the reference states (qubits in the span
of the two actual Z states).  For each of Bob's X outcomes the three
observed yields pin down the Pauli transmission rates through a 3x3 linear
system; plugging those rates into the virtual key-basis decomposition gives
the phase-error yields, and their sum over the cross outcomes divided by the
sifted Z yield is the phase error rate.

The actual protocol differs from the reference one only in the X-basis
state(s).  No measurement can tell the actual X state from its reference
projection with probability advantage beyond

    d_0X = p_0X * (1 - overlap),

so the observed X yield entering the linear system is only known up to a
slack ``w * d_0X`` with ``w in [-1, 1]``.  The bound maximizes the phase
error rate over that slack.  Because the rate is affine in the slack of each
of Bob's outcomes separately and the denominator is slack-free, the maximum
sits at an endpoint for each outcome, evaluated independently.

The linear solve uses an explicit adjugate with an infinity-norm condition
guard: deterministic, bit-stable, and honest about degeneracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

from .channel import UndefinedRateError, YieldSet
from .coeffs import CoefficientSet

CONDITION_LIMIT = 1e12

# Phase-error events pair Bob's outcome s with the opposite virtual bit.
_CROSS = ((0, 1), (1, 0))


class IllConditionedError(ArithmeticError):
    """Raised when the tomography matrix is too close to singular."""


@dataclass(frozen=True)
class TransmissionRates:
    """Pauli transmission rates for one of Bob's X outcomes.

    Recovered rates reproduce the observed yields through the tomography
    rows; one instance exists per outcome ``s``.
    """

    q_identity: float
    q_x: float
    q_z: float

    def contract(self, row: tuple[float, float, float]) -> float:
        return row[0] * self.q_identity + row[1] * self.q_x + row[2] * self.q_z


@dataclass(frozen=True)
class PhaseErrorResult:
    """Upper bound on the phase error rate at one channel setting.

    ``slack_signs`` records the maximizing slack endpoint for Bob outcomes
    (s=0, s=1); ``w_max`` exposes the s=0 entry for flat serialization.
    ``numerator`` and ``denominator`` are the summed phase-error and sifted
    Z-basis yields behind ``e_x``, retained for audit.  ``no_key`` flags
    e_x >= 1/2: the bound is still valid, the key rate is simply zero.
    """

    e_x: float
    slack_signs: tuple[float, float]
    numerator: float
    denominator: float
    d0x: float
    no_key: bool
    branches: tuple["PhaseErrorResult", ...] = field(default=())
    e_x_average: float | None = None
    e_x_worst: float | None = None

    @property
    def w_max(self) -> float:
        return self.slack_signs[0]


def deviation_d0x(p_0x: float, overlap: float) -> float:
    """Maximum yield deviation between the actual X state and its reference.

    ``overlap`` is the squared overlap of the normalized actual state with
    its projection into the reference span.  Bob's basis probability is
    deliberately not multiplied in: the bound then holds regardless of any
    assumption about the independence of Bob's measurements.
    """
    if not 0.0 <= p_0x <= 1.0:
        raise ValueError("setting probability outside [0, 1]")
    if not -1e-12 <= overlap <= 1.0 + 1e-12:
        raise ValueError("overlap outside [0, 1]")
    return p_0x * min(max(1.0 - overlap, 0.0), 1.0)


def _solve_rows(matrix: tuple[tuple[float, float, float], ...],
                rhs: tuple[float, float, float]) -> tuple[float, float, float]:
    """Solve the 3x3 system ``matrix @ q = rhs`` by the explicit adjugate."""
    (a, b, c), (d, e, f), (g, h, i) = matrix
    cof = (
        (e * i - f * h, c * h - b * i, b * f - c * e),
        (f * g - d * i, a * i - c * g, c * d - a * f),
        (d * h - e * g, b * g - a * h, a * e - b * d),
    )
    det = a * cof[0][0] + d * cof[0][1] + g * cof[0][2]
    if det == 0.0 or not math.isfinite(det):
        raise IllConditionedError("tomography matrix is singular")
    inv = tuple(tuple(cof[r][k] / det for k in range(3)) for r in range(3))
    norm_m = max(sum(abs(x) for x in row) for row in matrix)
    norm_inv = max(sum(abs(x) for x in row) for row in inv)
    if norm_m * norm_inv > CONDITION_LIMIT:
        raise IllConditionedError(
            f"tomography matrix condition number {norm_m * norm_inv:.3e} "
            f"exceeds {CONDITION_LIMIT:.0e}"
        )
    return tuple(sum(inv[r][k] * rhs[k] for k in range(3)) for r in range(3))


def solve_transmission_rates(
    x_yields: Mapping[str, float],
    coeffs: CoefficientSet,
    probabilities: Mapping[str, float],
    p_x_bob: float,
    d0x: float = 0.0,
    w: float = 0.0,
) -> TransmissionRates:
    """Invert the tomography rows for one of Bob's X outcomes.

    ``x_yields`` maps each observed setting to its yield for that outcome.
    The X-setting yield is shifted by ``w * d0x`` before normalization; with
    ``d0x = 0`` this reproduces the exact reference-state relation.
    """
    if not -1.0 <= w <= 1.0:
        raise ValueError("slack sign w must lie in [-1, 1]")
    names = coeffs.settings
    matrix = tuple(coeffs.observed_row(name) for name in names)
    rhs = []
    for name in names:
        value = x_yields[name]
        if name == coeffs.x_setting:
            value = value + w * d0x
        rhs.append(value / (probabilities[name] * p_x_bob))
    q = _solve_rows(matrix, tuple(rhs))
    return TransmissionRates(q_identity=q[0], q_x=q[1], q_z=q[2])


def estimated_yield(
    coeffs: CoefficientSet,
    rates: TransmissionRates,
    alpha: int,
    p_z_alice: float,
    p_z_bob: float,
) -> float:
    """Virtual key-basis yield for Alice's bit ``alpha`` and given rates.

    This is the joint probability that a key-basis round produces virtual
    bit ``alpha`` and Bob's X outcome carried by ``rates``; by construction
    it is identical for the actual and the reference protocol.
    """
    row = (1.0, coeffs.p_x_es[alpha], coeffs.p_z_es[alpha])
    return p_z_alice * p_z_bob * coeffs.a_weight[alpha] * rates.contract(row)


def _branch_yields(yields: YieldSet, x_setting: str, s: int) -> dict[str, float]:
    return {name: yields.obs_x[(s, name)] for name in ("0Z", "1Z", x_setting)}


def phase_error_rate(
    yields: YieldSet,
    coeffs: CoefficientSet,
    d0x: float,
    probabilities: Mapping[str, float],
    p_z_alice: float,
    p_z_bob: float,
    w: float | None = None,
) -> PhaseErrorResult:
    """Upper-bound the phase error rate from observed yields.

    By default the slack endpoint is chosen independently for each of Bob's
    outcomes (the numerator is affine in each slack and the denominator is
    slack-free, so endpoints are exact maximizers).  Passing ``w`` evaluates
    the bound at that single shared slack value instead, without
    maximization; this is mainly useful for diagnostics.
    """
    p_x_bob = 1.0 - p_z_bob
    denominator = sum(
        yields.obs_z[(s, name)] for s in (0, 1) for name in ("0Z", "1Z")
    )
    if denominator <= 0.0:
        raise UndefinedRateError("no sifted Z-basis detections")

    numerator = 0.0
    signs: list[float] = []
    for s, alpha in _CROSS:
        branch = _branch_yields(yields, coeffs.x_setting, s)
        if w is not None:
            rates = solve_transmission_rates(
                branch, coeffs, probabilities, p_x_bob, d0x, w
            )
            numerator += estimated_yield(coeffs, rates, alpha, p_z_alice, p_z_bob)
            signs.append(w)
            continue
        best = None
        best_sign = 0.0
        for endpoint in (-1.0, 1.0):
            rates = solve_transmission_rates(
                branch, coeffs, probabilities, p_x_bob, d0x, endpoint
            )
            value = estimated_yield(coeffs, rates, alpha, p_z_alice, p_z_bob)
            if best is None or value > best:
                best, best_sign = value, endpoint
        numerator += best
        signs.append(best_sign)

    e_x = min(max(numerator / denominator, 0.0), 1.0)
    return PhaseErrorResult(
        e_x=e_x,
        slack_signs=(signs[0], signs[1]),
        numerator=numerator,
        denominator=denominator,
        d0x=d0x,
        no_key=e_x >= 0.5,
    )


def four_state_phase_error(
    yields: YieldSet,
    coeff_by_setting: Mapping[str, CoefficientSet],
    d0x_by_setting: Mapping[str, float],
    probabilities: Mapping[str, float],
    p_z_alice: float,
    p_z_bob: float,
    worst_case: bool = False,
) -> PhaseErrorResult:
    """Phase-error bound for the four-state protocol.

    Runs the three-state estimator once per X setting (the two runs share
    the Z-basis yields) and combines the branch bounds.  The default
    combination is the probability-weighted average over the X settings;
    ``worst_case=True`` takes the larger branch instead.  Both values are
    retained on the result.
    """
    branches: list[PhaseErrorResult] = []
    weights: list[float] = []
    for name in ("0X", "1X"):
        branches.append(
            phase_error_rate(
                yields,
                coeff_by_setting[name],
                d0x_by_setting[name],
                probabilities,
                p_z_alice,
                p_z_bob,
            )
        )
        weights.append(probabilities[name])
    total = weights[0] + weights[1]
    average = (weights[0] * branches[0].e_x + weights[1] * branches[1].e_x) / total
    worst = max(branches[0].e_x, branches[1].e_x)
    combined = worst if worst_case else average
    dominant = branches[0] if branches[0].e_x >= branches[1].e_x else branches[1]
    return PhaseErrorResult(
        e_x=combined,
        slack_signs=dominant.slack_signs,
        numerator=dominant.numerator,
        denominator=dominant.denominator,
        d0x=max(d0x_by_setting["0X"], d0x_by_setting["1X"]),
        no_key=combined >= 0.5,
        branches=tuple(branches),
        e_x_average=average,
        e_x_worst=worst,
    )
