"""Scan configuration: a line-oriented ``key = value`` format.

Lines are ``key = value`` pairs; ``#`` starts a comment (full-line or
trailing) and blank lines are ignored.  Unknown keys, malformed values and
out-of-range parameters are rejected with the offending line number.

Keys (defaults in parentheses):

    loss_start, loss_stop, loss_step   loss grid in dB (required)
    delta (0)                          phase-modulation offset, radians
    epsilon (0), range (1)             constant per-range correlation model
    epsilon_list                       explicit comma-separated eps_1..eps_L
    p_d (1e-7)                         dark count rate per detector per gate
    f (1.16)                           error-correction efficiency
    e_d (0)                            misalignment probability
    p_za (0.5), p_zb (0.5)             Z-basis probabilities, Alice / Bob
    four_state (false)                 efficient four-state variant
    sin_printed (false)                historical coefficient convention
    worst_case_combine (false)         four-state branch combination
    n_total, n_det, failure_eps        optional finite-size budget (all three)
    out (scan.csv)                     CSV output path

``epsilon_list`` is mutually exclusive with ``epsilon``/``range``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .concentration import CountBudget
from .states import CorrelationModel


class ConfigError(ValueError):
    """Configuration file rejected; the message carries the line number."""


@dataclass(frozen=True)
class ScanConfig:
    loss_start: float
    loss_stop: float
    loss_step: float
    delta: float = 0.0
    epsilon: float = 0.0
    correlation_range: int = 1
    epsilon_list: tuple[float, ...] | None = None
    dark_rate: float = 1e-7
    error_correction_f: float = 1.16
    misalignment: float = 0.0
    p_z_alice: float = 0.5
    p_z_bob: float = 0.5
    four_state: bool = False
    sin_printed: bool = False
    worst_case_combine: bool = False
    n_total: float | None = None
    n_detected: float | None = None
    failure_eps: float | None = None
    out: str = "scan.csv"

    def __post_init__(self) -> None:
        if self.loss_step <= 0.0:
            raise ValueError("loss_step must be > 0")
        if self.loss_stop < self.loss_start or self.loss_start < 0.0:
            raise ValueError("loss grid must satisfy 0 <= loss_start <= loss_stop")
        if self.delta < 0.0:
            raise ValueError("delta must be >= 0")
        if self.correlation_range < 1:
            raise ValueError("range must be >= 1")
        budget_fields = (self.n_total, self.n_detected, self.failure_eps)
        if any(v is not None for v in budget_fields) and not all(
            v is not None for v in budget_fields
        ):
            raise ValueError(
                "finite-size budget needs all of n_total, n_det, failure_eps"
            )
        # Remaining ranges are validated by the consuming constructors.

    def loss_values(self) -> tuple[float, ...]:
        values = []
        k = 0
        while True:
            loss = self.loss_start + k * self.loss_step
            if loss > self.loss_stop + 1e-9:
                break
            values.append(loss)
            k += 1
        return tuple(values)

    def correlation_model(self) -> CorrelationModel:
        if self.epsilon_list is not None:
            return CorrelationModel(per_range_epsilon=self.epsilon_list)
        return CorrelationModel.constant(self.epsilon, self.correlation_range)

    def count_budget(self) -> CountBudget | None:
        if self.n_total is None:
            return None
        return CountBudget(
            n_total=self.n_total,
            n_detected=self.n_detected,
            failure_eps=self.failure_eps,
        )


_FLOAT_KEYS = {
    "loss_start": "loss_start",
    "loss_stop": "loss_stop",
    "loss_step": "loss_step",
    "delta": "delta",
    "epsilon": "epsilon",
    "p_d": "dark_rate",
    "f": "error_correction_f",
    "e_d": "misalignment",
    "p_za": "p_z_alice",
    "p_zb": "p_z_bob",
    "n_total": "n_total",
    "n_det": "n_detected",
    "failure_eps": "failure_eps",
}
_BOOL_KEYS = {
    "four_state": "four_state",
    "sin_printed": "sin_printed",
    "worst_case_combine": "worst_case_combine",
}
_REQUIRED = ("loss_start", "loss_stop", "loss_step")


def parse_config(text: str) -> ScanConfig:
    """Parse configuration text into a validated :class:`ScanConfig`."""
    fields: dict[str, object] = {}
    seen: set[str] = set()
    had_epsilon_scalar = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not value:
            raise ConfigError(f"line {lineno}: missing value for {key!r}")
        if key in seen:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        seen.add(key)

        if key in _FLOAT_KEYS:
            try:
                fields[_FLOAT_KEYS[key]] = float(value)
            except ValueError:
                raise ConfigError(
                    f"line {lineno}: malformed number {value!r} for {key!r}"
                ) from None
            if key == "epsilon":
                had_epsilon_scalar = True
        elif key == "range":
            try:
                fields["correlation_range"] = int(value)
            except ValueError:
                raise ConfigError(
                    f"line {lineno}: malformed integer {value!r} for 'range'"
                ) from None
        elif key == "epsilon_list":
            try:
                fields["epsilon_list"] = tuple(
                    float(part.strip()) for part in value.split(",")
                )
            except ValueError:
                raise ConfigError(
                    f"line {lineno}: malformed epsilon_list {value!r}"
                ) from None
        elif key in _BOOL_KEYS:
            if value not in ("true", "false"):
                raise ConfigError(
                    f"line {lineno}: expected true/false for {key!r}, got {value!r}"
                )
            fields[_BOOL_KEYS[key]] = value == "true"
        elif key == "out":
            fields["out"] = value
        else:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")

    for key in _REQUIRED:
        if key not in fields:
            raise ConfigError(f"missing required key {key!r}")
    if fields.get("epsilon_list") is not None and (
        had_epsilon_scalar or "correlation_range" in fields
    ):
        raise ConfigError("epsilon_list is mutually exclusive with epsilon/range")

    try:
        config = ScanConfig(**fields)  # type: ignore[arg-type]
        config.correlation_model()
        config.count_budget()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return config


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def serialize_config(config: ScanConfig) -> str:
    """Render a config back to the file format; round-trips exactly."""
    lines = [
        f"loss_start = {_fmt(config.loss_start)}",
        f"loss_stop = {_fmt(config.loss_stop)}",
        f"loss_step = {_fmt(config.loss_step)}",
        f"delta = {_fmt(config.delta)}",
    ]
    if config.epsilon_list is not None:
        lines.append(
            "epsilon_list = " + ",".join(_fmt(e) for e in config.epsilon_list)
        )
    else:
        lines.append(f"epsilon = {_fmt(config.epsilon)}")
        lines.append(f"range = {config.correlation_range}")
    lines += [
        f"p_d = {_fmt(config.dark_rate)}",
        f"f = {_fmt(config.error_correction_f)}",
        f"e_d = {_fmt(config.misalignment)}",
        f"p_za = {_fmt(config.p_z_alice)}",
        f"p_zb = {_fmt(config.p_z_bob)}",
        f"four_state = {'true' if config.four_state else 'false'}",
        f"sin_printed = {'true' if config.sin_printed else 'false'}",
        f"worst_case_combine = {'true' if config.worst_case_combine else 'false'}",
    ]
    if config.n_total is not None:
        lines += [
            f"n_total = {_fmt(config.n_total)}",
            f"n_det = {_fmt(config.n_detected)}",
            f"failure_eps = {_fmt(config.failure_eps)}",
        ]
    lines.append(f"out = {config.out}")
    return "\n".join(lines) + "\n"
