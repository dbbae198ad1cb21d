"""Secret-key-rate bounds for loss-tolerant QKD with flawed, leaky,
correlated sources.

The package upper-bounds the phase error rate of loss-tolerant protocols
whose signal states suffer phase-modulation offsets and pulse-correlation
side channels, by comparing the actual states against qubit reference states
and transferring the observed statistics across the gap through explicit
deviation terms.  On top of the bound it evaluates asymptotic secret key
rates over loss scans, with finite-size helpers for count statistics.
"""

from .channel import (
    ChannelParams,
    UndefinedRateError,
    YieldSet,
    simulate_observed_yields,
    transmittance,
    z_basis_stats,
)
from .coeffs import CoefficientSet, closed_form, oracle_from_states
from .concentration import (
    CountBudget,
    FiniteSizeResult,
    azuma_deviation,
    chernoff_upper,
    finite_size_phase_error,
)
from .config import ConfigError, ScanConfig, parse_config, serialize_config
from .keyrate import KeyRatePoint, binary_entropy, scan, secret_key_rate
from .rt import (
    IllConditionedError,
    PhaseErrorResult,
    TransmissionRates,
    deviation_d0x,
    estimated_yield,
    four_state_phase_error,
    phase_error_rate,
    solve_transmission_rates,
)
from .states import (
    CorrelationModel,
    ProtocolStates,
    SingularBasisError,
    StateVector,
    build_protocol_states,
    deviation_d_j,
    deviation_d_key,
    inner_product,
    long_range_amplitude,
    nearest_neighbour_reduction,
    project_onto_span,
)

__version__ = "0.1.0"

__all__ = [
    "ChannelParams",
    "CoefficientSet",
    "ConfigError",
    "CorrelationModel",
    "CountBudget",
    "FiniteSizeResult",
    "IllConditionedError",
    "KeyRatePoint",
    "PhaseErrorResult",
    "ProtocolStates",
    "ScanConfig",
    "SingularBasisError",
    "StateVector",
    "TransmissionRates",
    "UndefinedRateError",
    "YieldSet",
    "azuma_deviation",
    "binary_entropy",
    "build_protocol_states",
    "chernoff_upper",
    "closed_form",
    "deviation_d0x",
    "deviation_d_j",
    "deviation_d_key",
    "estimated_yield",
    "finite_size_phase_error",
    "four_state_phase_error",
    "inner_product",
    "long_range_amplitude",
    "nearest_neighbour_reduction",
    "oracle_from_states",
    "parse_config",
    "phase_error_rate",
    "project_onto_span",
    "scan",
    "secret_key_rate",
    "serialize_config",
    "simulate_observed_yields",
    "solve_transmission_rates",
    "transmittance",
    "z_basis_stats",
]
