"""Bloch coefficients of the reference-qubit description of the source.

The reference states all live in the two-dimensional span of the two actual
Z states.  Fixing the effective computational basis by Gram-Schmidt on that
pair (so the 0Z reference sits at the +z pole) assigns every reference state
and every virtual key-basis state an (x, z) Bloch pair; the y components
vanish because all amplitudes are real.  Detection statistics then decompose
over Pauli transmission rates through rows ``(1, P_x, P_z)``.

Two equivalent routes to the coefficients are provided:

* :func:`closed_form` evaluates them analytically from ``(delta, epsilon)``;
* :func:`oracle_from_states` rebuilds them numerically from explicit state
  vectors, exploiting only the geometry.  It is deliberately independent of
  the closed-form algebra and adjudicates its conventions.

Convention note: unit Bloch norm of the pure-qubit limit forces squared
sines under the square roots of the virtual-state and 1Z coefficients, and a
squared ``(1 - epsilon)`` factor in the projected X-state component; the
default convention applies both (and then matches the oracle to machine
precision).  A compatibility switch reproduces the historical single-power
``sin(delta/2)`` variant instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .states import ProtocolStates, SingularBasisError, _orthonormalize, x_state_angle

BLOCH_NORM_TOL = 1e-10


@dataclass(frozen=True)
class CoefficientSet:
    """Bloch coefficients for one three-state tomography instance.

    ``x_setting`` names the X-basis state used as the third observed
    setting ("0X" or "1X"); the observed maps carry rows for "0Z", "1Z" and
    that setting.  ``p_x_es`` / ``p_z_es`` are indexed by the virtual key
    bit, ``a_weight`` holds the virtual-outcome probabilities A_alpha, and
    ``c_param`` is the out-of-pole component of the X state in the effective
    basis.  ``x_overlap`` is the squared norm of the X state's projection
    onto the reference span (1 when there is no leakage).
    """

    x_setting: str
    p_x_es: tuple[float, float]
    p_z_es: tuple[float, float]
    p_x_obs: Mapping[str, float]
    p_z_obs: Mapping[str, float]
    a_weight: tuple[float, float]
    c_param: float
    x_overlap: float

    def __post_init__(self) -> None:
        for alpha in (0, 1):
            if not -1.0 <= self.p_x_es[alpha] <= 1.0:
                raise ValueError("virtual P_x outside [-1, 1]")
            if not -1.0 <= self.p_z_es[alpha] <= 1.0:
                raise ValueError("virtual P_z outside [-1, 1]")
            if not 0.0 <= self.a_weight[alpha] <= 1.0:
                raise ValueError("A weight outside [0, 1]")
        if abs(self.a_weight[0] + self.a_weight[1] - 1.0) > 1e-12:
            raise ValueError("A weights must sum to 1")
        for name in self.p_x_obs:
            px, pz = self.p_x_obs[name], self.p_z_obs[name]
            if px * px + pz * pz > 1.0 + BLOCH_NORM_TOL:
                raise ValueError(f"observed Bloch norm above 1 for {name}")

    @property
    def settings(self) -> tuple[str, str, str]:
        return ("0Z", "1Z", self.x_setting)

    def observed_row(self, setting: str) -> tuple[float, float, float]:
        """Tomography row ``(1, P_x, P_z)`` for an observed setting."""
        return (1.0, self.p_x_obs[setting], self.p_z_obs[setting])


def closed_form(
    delta: float,
    epsilon: float,
    x_setting: str = "0X",
    printed_sin: bool = False,
) -> CoefficientSet:
    """Analytic Bloch coefficients for offset ``delta`` and leakage ``epsilon``.

    Let ``m = (1 - epsilon)^2 sin(delta/2)`` (minus the overlap of the two
    actual Z states).  In the default convention:

    * virtual states:   P_x = (-1)^alpha sqrt(1 - m^2),  P_z = -(-1)^alpha m
    * observed 0Z:      (0, 1)
    * observed 1Z:      (-2 m sqrt(1 - m^2), 2 m^2 - 1)
    * observed X state: self-normalized Bloch pair of the projection with
      components c0 = (1-eps)^2 cos(theta) and
      c1 = (1-eps)^2 (sin(theta - delta/2) + m cos(theta)) / sqrt(1 - m^2),
      where theta is the X state's nominal polar angle
    * A_alpha = (1 -(-1)^alpha m) / 2.

    ``printed_sin=True`` switches to the historical variant with un-squared
    ``sin(delta/2)`` under the square roots and a single ``(1 - epsilon)``
    power in the projected component; it deviates from the state-vector
    geometry at order ``epsilon`` and ``delta^2`` and exists for comparison
    only.
    """
    if not 0.0 <= delta < math.pi / 2.0:
        raise ValueError("delta must lie in [0, pi/2)")
    if not 0.0 <= epsilon < 1.0:
        raise ValueError("epsilon must lie in [0, 1)")

    one = 1.0 - epsilon
    sin_half = math.sin(delta / 2.0)
    m = one * one * sin_half
    theta = x_state_angle(x_setting, delta)

    root_sq_arg = 1.0 - m * m
    if root_sq_arg < 0.0:
        raise ValueError("square-root argument negative in coefficient formula")
    root = math.sqrt(root_sq_arg)

    if printed_sin:
        printed_arg = 1.0 - one**4 * sin_half
        if printed_arg < 0.0:
            raise ValueError("square-root argument negative in coefficient formula")
        root_es = math.sqrt(printed_arg)
        p_x_1z = -2.0 * m * root_es
        p_z_1z = 2.0 * one**4 * sin_half - 1.0
        c0 = one * math.cos(theta)
    else:
        root_es = root
        p_x_1z = -2.0 * m * root
        p_z_1z = 2.0 * m * m - 1.0
        c0 = one * one * math.cos(theta)

    c1 = one * one * (math.sin(theta - delta / 2.0) + m * math.cos(theta)) / root
    proj_sq = c0 * c0 + c1 * c1
    p_x_x = 2.0 * c0 * c1 / proj_sq
    p_z_x = (c0 * c0 - c1 * c1) / proj_sq

    # Overlap of the actual X state with the reference span: pure geometry,
    # independent of the coefficient convention.
    exact_c0 = one * one * math.cos(theta)
    overlap = exact_c0 * exact_c0 + c1 * c1

    return CoefficientSet(
        x_setting=x_setting,
        p_x_es=(root_es, -root_es),
        p_z_es=(-m, m),
        p_x_obs={"0Z": 0.0, "1Z": p_x_1z, x_setting: p_x_x},
        p_z_obs={"0Z": 1.0, "1Z": p_z_1z, x_setting: p_z_x},
        a_weight=(0.5 * (1.0 - m), 0.5 * (1.0 + m)),
        c_param=c1,
        x_overlap=min(overlap, 1.0),
    )


def oracle_from_states(
    protocol: ProtocolStates, x_setting: str | None = None
) -> CoefficientSet:
    """Rebuild the coefficient set numerically from explicit state vectors.

    Gram-Schmidt turns the pair of actual Z states into the effective qubit
    basis; every reference state and every virtual key-basis state (the
    normalized +/- superpositions of the Z states, with weights A_alpha)
    is then expressed as an (x, z) Bloch pair in that basis.
    """
    if x_setting is None:
        x_setting = protocol.x_settings[0]
    if x_setting not in protocol.actual:
        raise ValueError(f"protocol has no setting {x_setting!r}")

    basis = _orthonormalize([protocol.actual["0Z"], protocol.actual["1Z"]])

    def bloch(amplitudes: np.ndarray) -> tuple[float, float]:
        coords = basis.conj() @ amplitudes
        norm2 = float(np.real(np.vdot(coords, coords)))
        if norm2 < 1e-24:
            raise SingularBasisError("state orthogonal to the reference span")
        a, b = coords
        p_y = 2.0 * float(np.imag(np.conj(a) * b)) / norm2
        if abs(p_y) > 1e-9:
            raise ValueError("state leaves the x-z plane of the effective basis")
        p_x = 2.0 * float(np.real(np.conj(a) * b)) / norm2
        p_z = float(abs(a) ** 2 - abs(b) ** 2) / norm2
        return p_x, p_z

    p_x_obs: dict[str, float] = {}
    p_z_obs: dict[str, float] = {}
    for name in ("0Z", "1Z", x_setting):
        p_x_obs[name], p_z_obs[name] = bloch(protocol.reference[name].amplitudes)

    x_amp = protocol.actual[x_setting].amplitudes
    coords = basis.conj() @ x_amp
    overlap = float(np.real(np.vdot(coords, coords)))
    c_param = float(np.real(coords[1]))

    p_x_es: list[float] = []
    p_z_es: list[float] = []
    a_weight: list[float] = []
    for alpha in (0, 1):
        virtual = (
            protocol.actual["0Z"].amplitudes
            + (-1.0) ** alpha * protocol.actual["1Z"].amplitudes
        )
        a_weight.append(float(np.real(np.vdot(virtual, virtual))) / 4.0)
        px, pz = bloch(virtual)
        p_x_es.append(px)
        p_z_es.append(pz)

    return CoefficientSet(
        x_setting=x_setting,
        p_x_es=(p_x_es[0], p_x_es[1]),
        p_z_es=(p_z_es[0], p_z_es[1]),
        p_x_obs=p_x_obs,
        p_z_obs=p_z_obs,
        a_weight=(a_weight[0], a_weight[1]),
        c_param=c_param,
        x_overlap=min(overlap, 1.0),
    )
