import math

import numpy as np
import pytest

from corrqkd.channel import ChannelParams, simulate_observed_yields
from corrqkd.coeffs import closed_form
from corrqkd.concentration import (
    CountBudget,
    azuma_deviation,
    chernoff_upper,
    finite_size_phase_error,
)
from corrqkd.rt import deviation_d0x
from corrqkd.states import build_protocol_states, project_onto_span


def _kl(x, y):
    return x * math.log(x / y) + (1 - x) * math.log((1 - x) / (1 - y))


def asymptotic_setup(delta=0.0, eps=1e-3, loss_db=10.0, dark_rate=1e-7):
    protocol = build_protocol_states(delta, eps)
    cs = closed_form(delta, eps)
    params = ChannelParams(loss_db=loss_db, dark_rate=dark_rate)
    yields = simulate_observed_yields(cs, params, protocol.probabilities)
    _, overlap = project_onto_span(
        protocol.actual["0X"], [protocol.actual["0Z"], protocol.actual["1Z"]]
    )
    d0x = deviation_d0x(protocol.probabilities["0X"], overlap)
    return protocol, cs, yields, d0x


class TestAzuma:
    def test_frozen_value(self):
        assert azuma_deviation(1e6, 1e-10) == pytest.approx(
            3393.070212207556, abs=1e-9
        )

    def test_single_round(self):
        eps = 1e-3
        assert azuma_deviation(1, eps) == pytest.approx(
            math.sqrt(0.5 * math.log(1 / eps)), abs=1e-15
        )

    def test_relative_deviation_vanishes(self):
        ratios = [azuma_deviation(n, 1e-10) / n for n in (1e3, 1e6, 1e9)]
        assert ratios[0] > ratios[1] > ratios[2]
        assert ratios[2] < 1e-3

    def test_validation(self):
        with pytest.raises(ValueError):
            azuma_deviation(0, 0.1)
        with pytest.raises(ValueError):
            azuma_deviation(10, 1.5)

    def test_band_covers_bernoulli_deviations(self):
        # 10^4 processes of 2000 fair coin flips at failure_eps = 0.05: the
        # band must contain the realized deviation in at least 95% of them.
        rng = np.random.default_rng(20240811)
        n, trials, eps = 2000, 10**4, 0.05
        sums = rng.binomial(n, 0.5, size=trials)
        band = azuma_deviation(n, eps)
        coverage = np.mean(np.abs(sums - n * 0.5) <= band)
        assert coverage >= 1.0 - eps


class TestChernoffUpper:
    def test_zero_mean(self):
        assert chernoff_upper(0.0, 1e9, 1e-10) == 0.0

    def test_monotone_in_mean(self):
        values = [chernoff_upper(m, 1e8, 1e-10) for m in (1e-6, 1e-4, 1e-2)]
        assert values[0] < values[1] < values[2]

    def test_bound_solves_the_tail_equation(self):
        # The returned count u satisfies n KL(u/n || mean) = ln(1/eps).
        mean, n, eps = 1.997e-3, 1e10, 1e-10
        bound = chernoff_upper(mean, n, eps)
        assert bound > n * mean
        assert n * _kl(bound / n, mean) == pytest.approx(
            math.log(1 / eps), rel=1e-6
        )

    def test_approaches_the_mean_for_large_n(self):
        mean = 1.997e-3
        gaps = [
            chernoff_upper(mean, n, 1e-10) / n - mean for n in (1e8, 1e12, 1e16)
        ]
        assert gaps[0] > gaps[1] > gaps[2] > 0.0
        assert gaps[2] < 1e-6

    def test_saturates_at_n(self):
        assert chernoff_upper(0.9999, 10, 0.5) == 10.0


class TestCountBudget:
    def test_validation(self):
        with pytest.raises(ValueError):
            CountBudget(n_total=10, n_detected=20, failure_eps=1e-10)
        with pytest.raises(ValueError):
            CountBudget(n_total=10, n_detected=5, failure_eps=0.0)


class TestFiniteSizePhaseError:
    def test_pessimistic_relative_to_asymptotic(self):
        protocol, cs, yields, d0x = asymptotic_setup()
        budget = CountBudget(n_total=1e9, n_detected=1e8, failure_eps=1e-10)
        result = finite_size_phase_error(
            yields, cs, d0x, protocol.probabilities, 0.5, 0.5, budget
        )
        assert result.e_x >= result.asymptotic_e_x

    def test_converges_to_asymptotic_within_1e3(self):
        protocol, cs, yields, d0x = asymptotic_setup()
        budget = CountBudget(n_total=1e15, n_detected=1e14, failure_eps=1e-10)
        result = finite_size_phase_error(
            yields, cs, d0x, protocol.probabilities, 0.5, 0.5, budget
        )
        assert abs(result.e_x - result.asymptotic_e_x) < 1e-3

    def test_monotone_approach_from_above(self):
        protocol, cs, yields, d0x = asymptotic_setup()
        previous = None
        for n in (1e9, 1e12, 1e15):
            budget = CountBudget(n_total=n, n_detected=0.1 * n, failure_eps=1e-10)
            result = finite_size_phase_error(
                yields, cs, d0x, protocol.probabilities, 0.5, 0.5, budget
            )
            assert result.e_x >= result.asymptotic_e_x - 1e-15
            if previous is not None:
                assert result.e_x <= previous + 1e-15
            previous = result.e_x

    def test_zero_deviation_terms_recover_asymptotic(self):
        # With vanishing state deviation the finite-size assembly must
        # reduce to the asymptotic bound as the deviations shrink.
        protocol, cs, yields, _ = asymptotic_setup(eps=0.0)
        budget = CountBudget(n_total=1e22, n_detected=1e21, failure_eps=1e-10)
        result = finite_size_phase_error(
            yields, cs, 0.0, protocol.probabilities, 0.5, 0.5, budget
        )
        assert result.d0x_upper == 0.0
        assert result.e_x == pytest.approx(result.asymptotic_e_x, abs=1e-8)

    def test_small_sample_is_inconclusive_not_an_error(self):
        protocol, cs, yields, d0x = asymptotic_setup()
        budget = CountBudget(n_total=1e4, n_detected=1e3, failure_eps=1e-10)
        result = finite_size_phase_error(
            yields, cs, d0x, protocol.probabilities, 0.5, 0.5, budget
        )
        assert result.inconclusive
        assert result.e_x == 1.0

    def test_deviation_events_accumulate_over_all_pulses(self):
        # Fixing the detected count while growing the total pulse count
        # shrinks only the relative state-deviation term: the bound must
        # depend on n_total, not just n_detected.
        protocol, cs, yields, d0x = asymptotic_setup(loss_db=20.0)
        small = finite_size_phase_error(
            yields, cs, d0x, protocol.probabilities, 0.5, 0.5,
            CountBudget(n_total=1e12, n_detected=1e9, failure_eps=1e-10),
        )
        large = finite_size_phase_error(
            yields, cs, d0x, protocol.probabilities, 0.5, 0.5,
            CountBudget(n_total=1e16, n_detected=1e9, failure_eps=1e-10),
        )
        assert large.d0x_upper < small.d0x_upper
        assert large.e_x < small.e_x
