"""Asymptotic secret key rate and loss scans.

The rate per emitted pulse is ``R = Y_Z (1 - h(e_X) - f h(e_Z))`` with the
sifted Z yield ``Y_Z``, phase error rate ``e_X``, bit error rate ``e_Z`` and
error-correction efficiency ``f``, clamped at zero.  Basis-sifting factors
live inside the yields, so no extra sifting prefactor appears.

A phase-error bound at or above 1/2 certifies nothing: such points carry a
zero rate and a ``no_key`` status rather than being fed through the entropy
formula (which would spuriously recover as the bound saturates at 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import channel, coeffs, concentration, rt, states
from .config import ScanConfig


@dataclass(frozen=True)
class KeyRatePoint:
    """One scan point: channel setting, error rates and secret key rate."""

    loss_db: float
    eta: float
    e_x: float
    e_z: float
    y_z_sifted: float
    rate: float
    w_max: float
    d0x: float
    status: str


def binary_entropy(x: float) -> float:
    """Binary entropy in bits, with h(0) = h(1) = 0 by continuity."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"binary entropy argument {x!r} outside [0, 1]")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def secret_key_rate(y_z: float, e_x: float, e_z: float, f: float) -> float:
    """Secret bits per emitted pulse, clamped at zero."""
    if f < 1.0:
        raise ValueError("error-correction efficiency f must be >= 1")
    raw = y_z * (1.0 - binary_entropy(e_x) - f * binary_entropy(e_z))
    return max(0.0, raw)


def _nan_point(loss_db: float, eta: float, status: str) -> KeyRatePoint:
    nan = float("nan")
    return KeyRatePoint(loss_db, eta, nan, nan, nan, nan, nan, nan, status)


def scan(config: ScanConfig) -> list[KeyRatePoint]:
    """Evaluate the full pipeline over the configured loss grid.

    Loss-independent work (state construction, coefficients, deviation
    terms) happens once; each grid point then maps channel parameters to
    yields, the phase-error bound and the key rate.  Per-point failures are
    recorded in the point's status and the scan continues.  Output is
    ordered by ascending loss.
    """
    model = config.correlation_model()
    _, epsilon_eff = states.long_range_amplitude(model)
    protocol = states.build_protocol_states(
        config.delta, epsilon_eff, config.four_state, config.p_z_alice
    )

    coeff_by_setting: dict[str, coeffs.CoefficientSet] = {}
    d0x_by_setting: dict[str, float] = {}
    z_span = [protocol.actual["0Z"], protocol.actual["1Z"]]
    for name in protocol.x_settings:
        coeff_by_setting[name] = coeffs.closed_form(
            config.delta, epsilon_eff, x_setting=name, printed_sin=config.sin_printed
        )
        _, overlap = states.project_onto_span(protocol.actual[name], z_span)
        d0x_by_setting[name] = rt.deviation_d0x(
            protocol.probabilities[name], overlap
        )

    coeff_sets = tuple(coeff_by_setting[name] for name in protocol.x_settings)
    budget = config.count_budget()

    points: list[KeyRatePoint] = []
    for loss_db in config.loss_values():
        eta = channel.transmittance(loss_db)
        try:
            points.append(
                _scan_point(
                    config, protocol, coeff_sets, coeff_by_setting,
                    d0x_by_setting, budget, loss_db, eta,
                )
            )
        except (rt.IllConditionedError, channel.UndefinedRateError) as exc:
            points.append(_nan_point(loss_db, eta, f"error:{exc.__class__.__name__}"))
    return points


def _scan_point(
    config: ScanConfig,
    protocol: states.ProtocolStates,
    coeff_sets: tuple[coeffs.CoefficientSet, ...],
    coeff_by_setting: dict[str, coeffs.CoefficientSet],
    d0x_by_setting: dict[str, float],
    budget: concentration.CountBudget | None,
    loss_db: float,
    eta: float,
) -> KeyRatePoint:
    params = channel.ChannelParams(
        loss_db=loss_db,
        dark_rate=config.dark_rate,
        misalignment=config.misalignment,
        p_z_alice=config.p_z_alice,
        p_z_bob=config.p_z_bob,
    )
    yields = channel.simulate_observed_yields(
        coeff_sets, params, protocol.probabilities
    )
    y_z, e_z = channel.z_basis_stats(yields)

    status = "ok"
    if config.four_state:
        result = rt.four_state_phase_error(
            yields, coeff_by_setting, d0x_by_setting, protocol.probabilities,
            config.p_z_alice, config.p_z_bob, worst_case=config.worst_case_combine,
        )
        e_x = result.e_x
        if budget is not None:
            branch_values = []
            inconclusive = False
            for name in ("0X", "1X"):
                fin = concentration.finite_size_phase_error(
                    yields, coeff_by_setting[name], d0x_by_setting[name],
                    protocol.probabilities, config.p_z_alice, config.p_z_bob,
                    budget,
                )
                branch_values.append(fin.e_x)
                inconclusive = inconclusive or fin.inconclusive
            if config.worst_case_combine:
                e_x = max(branch_values)
            else:
                w0 = protocol.probabilities["0X"]
                w1 = protocol.probabilities["1X"]
                e_x = (w0 * branch_values[0] + w1 * branch_values[1]) / (w0 + w1)
            if inconclusive:
                status = "inconclusive"
    else:
        result = rt.phase_error_rate(
            yields, coeff_sets[0], d0x_by_setting["0X"], protocol.probabilities,
            config.p_z_alice, config.p_z_bob,
        )
        e_x = result.e_x
        if budget is not None:
            fin = concentration.finite_size_phase_error(
                yields, coeff_sets[0], d0x_by_setting["0X"],
                protocol.probabilities, config.p_z_alice, config.p_z_bob, budget,
            )
            e_x = fin.e_x
            if fin.inconclusive:
                status = "inconclusive"

    if e_x >= 0.5:
        rate = 0.0
        if status == "ok":
            status = "no_key"
    else:
        rate = secret_key_rate(y_z, e_x, e_z, config.error_correction_f)

    return KeyRatePoint(
        loss_db=loss_db,
        eta=eta,
        e_x=e_x,
        e_z=e_z,
        y_z_sifted=y_z,
        rate=rate,
        w_max=result.w_max,
        d0x=result.d0x,
        status=status,
    )
