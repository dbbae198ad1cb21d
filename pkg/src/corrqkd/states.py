"""Signal-state geometry for a flawed, leaky, correlated single-photon source.

The source emits one of three (or four) BB84-style signal states per pulse.
Two imperfections are modelled:

* a phase-modulation offset ``delta`` that tilts the nominal qubit states
  away from their ideal positions, and
* classical pulse correlations, reduced to an effective per-pulse side
  channel: each emitted state keeps amplitude ``1 - eps`` on its intended
  qubit component and leaks the remainder into a direction orthogonal to
  the qubit span.

The worst case for the leaked directions is mutual orthogonality (a less
orthogonal set can always be manufactured from a more orthogonal one), so
the state space used here is the two-dimensional qubit span plus exactly one
extra orthogonal axis per setting.  All security bounds downstream depend
only on inner products between these vectors, which makes this minimal
embedding sufficient.

Correlations of range L with per-range strengths ``eps_1 .. eps_L`` compress
into a single effective strength via the product lower bound on the retained
qubit amplitude, ``a >= prod_k sqrt(1 - eps_k)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

SETTINGS = ("0Z", "1Z", "0X", "1X")
KEY_SETTINGS = ("0Z", "1Z")

# Gram determinant below this means the basis cannot be orthonormalized reliably.
GRAM_DET_TOL = 1e-14


class SingularBasisError(ValueError):
    """Raised when a projection basis is numerically degenerate."""


@dataclass(frozen=True, eq=False)
class StateVector:
    """Finite-dimensional pure-state amplitude vector.

    Amplitudes are stored as a read-only complex array.  Vectors are not
    forced to unit norm on construction; operations that require normalized
    inputs state so explicitly.
    """

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amp = np.array(self.amplitudes, dtype=complex)
        if amp.ndim != 1 or amp.size == 0:
            raise ValueError("amplitudes must be a non-empty 1-D sequence")
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)

    @property
    def dimension(self) -> int:
        return int(self.amplitudes.size)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVector":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return StateVector(self.amplitudes / n)


@dataclass(frozen=True)
class CorrelationModel:
    """Per-range pulse-correlation strengths ``eps_1 .. eps_L``.

    ``phase_offsets`` records setting-dependent correlation phases for
    documentation; the worst-case reduction absorbs them, so no bound
    computed here depends on their values.
    """

    per_range_epsilon: tuple[float, ...]
    phase_offsets: Mapping[tuple[str, str], float] | None = field(default=None)

    def __post_init__(self) -> None:
        eps = tuple(float(e) for e in self.per_range_epsilon)
        if len(eps) < 1:
            raise ValueError("correlation range must be at least 1")
        for e in eps:
            if not 0.0 <= e <= 1.0:
                raise ValueError(f"per-range strength {e!r} outside [0, 1]")
        object.__setattr__(self, "per_range_epsilon", eps)

    @classmethod
    def constant(cls, epsilon: float, length: int) -> "CorrelationModel":
        """Model with the same strength at every range up to ``length``."""
        if length < 1:
            raise ValueError("correlation range must be at least 1")
        return cls(per_range_epsilon=(float(epsilon),) * int(length))

    @property
    def range(self) -> int:
        return len(self.per_range_epsilon)


@dataclass(frozen=True)
class ProtocolStates:
    """Actual and reference state vectors for one protocol instance.

    The reference set copies the two Z states verbatim and replaces each X
    state by its normalized projection onto the span of the actual Z states,
    so the references are guaranteed qubit states.
    """

    actual: Mapping[str, StateVector]
    reference: Mapping[str, StateVector]
    delta: float
    epsilon_eff: float
    probabilities: Mapping[str, float]

    @property
    def settings(self) -> tuple[str, ...]:
        return tuple(s for s in SETTINGS if s in self.actual)

    @property
    def x_settings(self) -> tuple[str, ...]:
        return tuple(s for s in self.settings if s.endswith("X"))


def inner_product(a: StateVector, b: StateVector) -> complex:
    """Hermitian inner product <a|b> (conjugate-linear in ``a``)."""
    if a.dimension != b.dimension:
        raise ValueError(
            f"dimension mismatch: {a.dimension} vs {b.dimension}"
        )
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def _orthonormalize(basis: Sequence[StateVector]) -> np.ndarray:
    """Modified Gram-Schmidt with a Gram-determinant degeneracy guard.

    Returns a (k, dim) array of orthonormal row vectors spanning the basis.
    """
    dims = {v.dimension for v in basis}
    if len(dims) != 1:
        raise ValueError("basis vectors must share one dimension")
    vecs = np.array([v.amplitudes for v in basis])
    gram = vecs @ vecs.conj().T
    if abs(np.linalg.det(gram)) < GRAM_DET_TOL:
        raise SingularBasisError(
            "basis numerically degenerate (Gram determinant below tolerance)"
        )
    rows = []
    for v in vecs:
        w = v.astype(complex)
        for r in rows:
            w = w - np.vdot(r, w) * r
        rows.append(w / np.linalg.norm(w))
    return np.array(rows)


def project_onto_span(
    target: StateVector, basis: Sequence[StateVector]
) -> tuple[StateVector | None, float]:
    """Project ``target`` onto the span of ``basis``.

    Returns ``(projected, overlap)`` where ``projected`` is the normalized
    projection and ``overlap = |<projected|target>|^2`` for a normalized
    target.  Among unit vectors of the span, ``projected`` maximizes that
    overlap.  A target orthogonal to the span has no meaningful direction in
    it; that case is flagged by returning ``(None, 0.0)``.
    """
    ortho = _orthonormalize(basis)
    if target.dimension != ortho.shape[1]:
        raise ValueError("target dimension differs from basis dimension")
    coords = ortho.conj() @ target.amplitudes
    norm2 = float(np.real(np.vdot(coords, coords)))
    tnorm2 = float(np.real(np.vdot(target.amplitudes, target.amplitudes)))
    overlap = min(max(norm2 / tnorm2, 0.0), 1.0)
    if norm2 < 1e-24:
        return None, 0.0
    projected = StateVector(coords @ ortho / math.sqrt(norm2))
    return projected, overlap


def nearest_neighbour_reduction(epsilon: float) -> tuple[float, float]:
    """Qubit and side-channel amplitudes after absorbing one neighbour.

    A pulse correlated with its successor at strength ``epsilon`` keeps
    amplitude ``1 - epsilon`` on the intended qubit component; the rest,
    ``sqrt(1 - (1 - epsilon)^2)``, rides on the orthogonal side channel.
    """
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"correlation strength {epsilon!r} outside [0, 1]")
    qubit = 1.0 - epsilon
    side = math.sqrt(max(0.0, 1.0 - qubit * qubit))
    return qubit, side


def long_range_amplitude(model: CorrelationModel) -> tuple[float, float]:
    """Lower bound on the retained qubit amplitude for long-range correlations.

    Returns ``(a_lower, epsilon_eff)`` with
    ``a_lower = prod_k sqrt(1 - eps_k)`` and ``epsilon_eff = 1 - a_lower``,
    so that a single-pulse model at strength ``epsilon_eff`` reproduces the
    same qubit amplitude.
    """
    a_lower = 1.0
    for e in model.per_range_epsilon:
        a_lower *= math.sqrt(1.0 - e)
    return a_lower, 1.0 - a_lower


def _qubit_amplitudes(delta: float) -> dict[str, np.ndarray]:
    half = delta / 2.0
    theta0 = math.pi / 4.0 + delta / 4.0
    theta1 = 3.0 * math.pi / 4.0 + 3.0 * delta / 4.0
    return {
        "0Z": np.array([1.0, 0.0]),
        "1Z": np.array([-math.sin(half), math.cos(half)]),
        "0X": np.array([math.cos(theta0), math.sin(theta0)]),
        "1X": np.array([math.cos(theta1), math.sin(theta1)]),
    }


def x_state_angle(setting: str, delta: float) -> float:
    """Polar angle of the nominal X-basis qubit state for ``setting``."""
    if setting == "0X":
        return math.pi / 4.0 + delta / 4.0
    if setting == "1X":
        return 3.0 * math.pi / 4.0 + 3.0 * delta / 4.0
    raise ValueError(f"not an X setting: {setting!r}")


def build_protocol_states(
    delta: float,
    epsilon_eff: float,
    four_state: bool = False,
    p_z_alice: float = 0.5,
) -> ProtocolStates:
    """Construct the actual and reference state vectors of the protocol.

    The actual state for setting j occupies the qubit span with amplitude
    ``1 - epsilon_eff`` plus that setting's private side-channel axis with
    amplitude ``sqrt(1 - (1 - epsilon_eff)^2)``.  Side-channel axes are
    exactly orthonormal (worst case).  Global phases are fixed so that every
    qubit-component overlap <psi_j|Psi_j> is real and non-negative.

    Setting probabilities split the basis choice uniformly over bits: each
    Z setting gets ``p_z_alice / 2``; the X probability ``1 - p_z_alice``
    goes entirely to 0X in the three-state protocol and is halved between
    0X and 1X in the four-state variant.
    """
    if delta < 0.0:
        raise ValueError("phase-modulation offset delta must be >= 0")
    if not 0.0 <= epsilon_eff <= 1.0:
        raise ValueError("effective correlation strength outside [0, 1]")
    if not 0.0 < p_z_alice < 1.0:
        raise ValueError("p_z_alice must lie strictly inside (0, 1)")

    names = ["0Z", "1Z", "0X"] + (["1X"] if four_state else [])
    qubit = _qubit_amplitudes(delta)
    keep, leak = nearest_neighbour_reduction(epsilon_eff)
    dim = 2 + len(names)

    actual: dict[str, StateVector] = {}
    for i, name in enumerate(names):
        amp = np.zeros(dim, dtype=complex)
        amp[:2] = keep * qubit[name]
        amp[2 + i] = leak
        actual[name] = StateVector(amp)

    reference: dict[str, StateVector] = {
        "0Z": actual["0Z"],
        "1Z": actual["1Z"],
    }
    z_span = [actual["0Z"], actual["1Z"]]
    for name in names[2:]:
        projected, overlap = project_onto_span(actual[name], z_span)
        if projected is None:
            raise SingularBasisError(
                f"actual state {name} is orthogonal to the reference span"
            )
        reference[name] = projected

    if four_state:
        probabilities = {
            "0Z": p_z_alice / 2.0,
            "1Z": p_z_alice / 2.0,
            "0X": (1.0 - p_z_alice) / 2.0,
            "1X": (1.0 - p_z_alice) / 2.0,
        }
    else:
        probabilities = {
            "0Z": p_z_alice / 2.0,
            "1Z": p_z_alice / 2.0,
            "0X": 1.0 - p_z_alice,
        }

    return ProtocolStates(
        actual=actual,
        reference=reference,
        delta=float(delta),
        epsilon_eff=float(epsilon_eff),
        probabilities=probabilities,
    )


def deviation_d_key(
    actual: ProtocolStates, reference: ProtocolStates, m_key: int
) -> float:
    """Deviation functional between actual and reference key-basis states.

    The key basis comprises the first ``m_key`` settings in canonical order.
    With joint entangled states conditioned on the key basis, the maximum
    probability deviation any measurement can see is

        d_key = p_key * (1 - |sum_j p_j <psi_j|phi_j>|^2 / p_key^2),

    which vanishes when the reference key states equal the actual ones.
    """
    key = [s for s in SETTINGS if s in actual.actual][:m_key]
    if len(key) != m_key:
        raise ValueError("m_key exceeds the number of settings")
    p_key = 0.0
    overlap = 0.0 + 0.0j
    for name in key:
        p_j = actual.probabilities[name]
        if abs(p_j - reference.probabilities[name]) > 1e-12:
            raise ValueError("key settings must share identical weights")
        p_key += p_j
        overlap += p_j * inner_product(actual.actual[name], reference.reference[name])
    value = p_key * (1.0 - abs(overlap) ** 2 / (p_key * p_key))
    return min(max(value, 0.0), p_key)


def deviation_d_j(psi_j: StateVector, phi_j: StateVector, p_j: float) -> float:
    """Per-setting deviation functional ``p_j * (1 - |<psi_j|phi_j>|^2)``."""
    if not 0.0 <= p_j <= 1.0:
        raise ValueError("setting probability outside [0, 1]")
    fidelity = abs(inner_product(psi_j, phi_j)) ** 2
    return min(max(p_j * (1.0 - fidelity), 0.0), p_j)
