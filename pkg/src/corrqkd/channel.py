"""Honest lossy-channel model producing the observed detection statistics.

A real deployment measures these yields; simulations need a stand-in.  The
model pinned here is the standard one for loss-tolerant protocol studies:

* pure loss with transmittance ``eta = 10^(-loss_db/10)``;
* the surviving photon is measured faithfully up to a misalignment flip
  probability ``e_d``, giving Pauli transmission rates ``q_Id = 1/2``,
  ``q_x = (-1)^s (1 - 2 e_d) / 2``, ``q_z = 0`` for Bob's X measurement;
* each detector dark-fires with probability ``p_d`` per gate when no photon
  arrives; double clicks are assigned a random bit, which together with the
  single-click terms folds into one symmetric ``(1 - eta) p_d`` addition per
  outcome (second order in ``p_d`` dropped).

Yields are joint probabilities per emitted pulse and therefore include
Alice's setting probability and Bob's basis probability.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .coeffs import CoefficientSet


class UndefinedRateError(ZeroDivisionError):
    """Raised when an error rate is requested for an empty ensemble."""


@dataclass(frozen=True)
class ChannelParams:
    """Loss, detector and basis-choice parameters of the honest channel."""

    loss_db: float
    dark_rate: float = 1e-7
    misalignment: float = 0.0
    p_z_alice: float = 0.5
    p_z_bob: float = 0.5

    def __post_init__(self) -> None:
        if self.loss_db < 0.0:
            raise ValueError("loss_db must be >= 0")
        if not 0.0 <= self.dark_rate <= 1.0:
            raise ValueError("dark_rate must lie in [0, 1]")
        if not 0.0 <= self.misalignment <= 0.5:
            raise ValueError("misalignment must lie in [0, 0.5]")
        for name in ("p_z_alice", "p_z_bob"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")

    @property
    def eta(self) -> float:
        return transmittance(self.loss_db)


@dataclass(frozen=True)
class YieldSet:
    """Joint detection probabilities per emitted pulse.

    ``obs_x`` maps ``(s, setting)`` to the probability that Alice chose
    ``setting``, Bob measured X and obtained bit ``s``; ``obs_z`` does the
    same for Bob's Z measurements of the two Z settings.
    """

    obs_x: Mapping[tuple[int, str], float]
    obs_z: Mapping[tuple[int, str], float]

    def __post_init__(self) -> None:
        for table in (self.obs_x, self.obs_z):
            for key, value in table.items():
                if not 0.0 <= value <= 1.0:
                    raise ValueError(f"yield {key} outside [0, 1]")

    def x_settings(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys(name for (_, name) in self.obs_x))


def transmittance(loss_db: float) -> float:
    """Channel transmittance for an attenuation of ``loss_db`` decibels."""
    if loss_db < 0.0:
        raise ValueError("loss_db must be >= 0")
    return 10.0 ** (-loss_db / 10.0)


def _probability(value: float) -> float:
    # Perfectly aligned states produce exact zeros up to rounding dust.
    if value < -1e-12:
        raise ValueError(f"negative probability {value!r}")
    return max(0.0, value)


def simulate_observed_yields(
    coeffs: CoefficientSet | Sequence[CoefficientSet],
    params: ChannelParams,
    probabilities: Mapping[str, float],
) -> YieldSet:
    """Observed yields of the honest channel for the given source.

    ``coeffs`` may be a single coefficient set (three-state protocol) or a
    sequence of sets sharing their Z rows (four-state protocol: one set per
    X setting).  X-basis yields follow the tomography decomposition

        Y(s, j) = p_j P_XB [ eta (q_Id + P_x(j) q_x + P_z(j) q_z)
                             + (1 - eta) p_d ]

    with the identity-channel rates stated in the module docstring; Z-basis
    yields use the direct projection probability with the same misalignment
    and dark-count treatment.
    """
    sets = (coeffs,) if isinstance(coeffs, CoefficientSet) else tuple(coeffs)
    if not sets:
        raise ValueError("at least one coefficient set is required")

    eta = params.eta
    p_d = params.dark_rate
    flip = 1.0 - 2.0 * params.misalignment
    p_xb = 1.0 - params.p_z_bob
    dark = (1.0 - eta) * p_d

    rows: dict[str, tuple[float, float]] = {}
    for cs in sets:
        for name in cs.settings:
            row = (cs.p_x_obs[name], cs.p_z_obs[name])
            if name in rows and max(
                abs(rows[name][0] - row[0]), abs(rows[name][1] - row[1])
            ) > 1e-12:
                raise ValueError(f"conflicting Bloch rows for setting {name}")
            rows[name] = row

    obs_x: dict[tuple[int, str], float] = {}
    for name, (p_x, p_z) in rows.items():
        for s in (0, 1):
            q_x = (-1.0) ** s * 0.5 * flip
            signal = 0.5 + p_x * q_x + p_z * 0.0
            obs_x[(s, name)] = _probability(
                probabilities[name] * p_xb * (eta * signal + dark)
            )

    obs_z: dict[tuple[int, str], float] = {}
    for name in ("0Z", "1Z"):
        p_z = rows[name][1]
        for s in (0, 1):
            signal = (1.0 + (-1.0) ** s * p_z * flip) / 2.0
            obs_z[(s, name)] = _probability(
                probabilities[name] * params.p_z_bob * (eta * signal + dark)
            )

    return YieldSet(obs_x=obs_x, obs_z=obs_z)


def z_basis_stats(yields: YieldSet) -> tuple[float, float]:
    """Sifted Z-basis yield and bit error rate.

    Returns ``(Y_Z_sifted, e_Z)`` where the error events are Bob reading 1
    against setting 0Z or 0 against 1Z.
    """
    required = [(s, name) for s in (0, 1) for name in ("0Z", "1Z")]
    for key in required:
        if key not in yields.obs_z:
            raise ValueError(f"missing Z-basis yield {key}")
    total = sum(yields.obs_z[key] for key in required)
    if total <= 0.0:
        raise UndefinedRateError("no Z-basis detections: error rate undefined")
    errors = yields.obs_z[(1, "0Z")] + yields.obs_z[(0, "1Z")]
    return total, errors / total
