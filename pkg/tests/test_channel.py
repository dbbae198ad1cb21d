import pytest

from corrqkd.channel import (
    ChannelParams,
    UndefinedRateError,
    simulate_observed_yields,
    transmittance,
    z_basis_stats,
)
from corrqkd.coeffs import closed_form

from oracles import binomial_sigma, monte_carlo_yields

THREE_STATE_P = {"0Z": 0.25, "1Z": 0.25, "0X": 0.5}


def make_yields(delta, eps, loss_db, dark_rate, misalignment=0.0):
    cs = closed_form(delta, eps)
    params = ChannelParams(
        loss_db=loss_db, dark_rate=dark_rate, misalignment=misalignment
    )
    return cs, params, simulate_observed_yields(cs, params, THREE_STATE_P)


class TestTransmittance:
    def test_values(self):
        assert transmittance(0.0) == 1.0
        assert transmittance(10.0) == pytest.approx(0.1, abs=1e-15)
        assert transmittance(33.0) == pytest.approx(10 ** (-3.3), abs=1e-18)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            transmittance(-1.0)


class TestObservedYields:
    def test_perfect_alignment(self):
        _, _, ys = make_yields(0.0, 0.0, 0.0, 0.0)
        assert ys.obs_x[(0, "0X")] == pytest.approx(0.5 * 0.5, abs=1e-15)
        assert ys.obs_x[(1, "0X")] == pytest.approx(0.0, abs=1e-15)

    def test_dark_counts_only(self):
        cs = closed_form(0.063, 1e-3)
        params = ChannelParams(loss_db=300.0, dark_rate=1e-7)
        ys = simulate_observed_yields(cs, params, THREE_STATE_P)
        eta = params.eta
        for (s, name), value in ys.obs_x.items():
            want = THREE_STATE_P[name] * 0.5 * ((1 - eta) * 1e-7 + eta * 0.5)
            assert value == pytest.approx(want, rel=1e-6)

    def test_frozen_entries_at_reference_point(self):
        # Frozen from a by-hand evaluation of the yield formulas at
        # eta=0.1, p_d=1e-7, delta=0.063, eps=1e-3.
        _, _, ys = make_yields(0.063, 1e-3, 10.0, 1e-7)
        expected_x = {
            (0, "0Z"): 0.0062500112500000005,
            (0, "1Z"): 0.005857307470957846,
            (0, "0X"): 0.024993846223413888,
            (1, "0Z"): 0.0062500112500000005,
            (1, "1Z"): 0.006642715029042156,
            (1, "0X"): 6.198776586111751e-06,
        }
        expected_z = {
            (0, "0Z"): 0.01250001125,
            (0, "1Z"): 1.2360751460825335e-05,
            (1, "0Z"): 1.125e-08,
            (1, "1Z"): 0.012487661748539174,
        }
        for key, want in expected_x.items():
            assert ys.obs_x[key] == pytest.approx(want, abs=1e-17), key
        for key, want in expected_z.items():
            assert ys.obs_z[key] == pytest.approx(want, abs=1e-17), key

    def test_yields_monotone_in_loss_without_darks(self):
        previous = None
        for loss in (0.0, 5.0, 10.0, 20.0, 40.0):
            _, _, ys = make_yields(0.063, 1e-3, loss, 0.0)
            total = sum(ys.obs_x.values()) + sum(ys.obs_z.values())
            if previous is not None:
                assert total <= previous + 1e-15
            previous = total

    def test_outcome_sum_bound(self):
        cs, params, ys = make_yields(0.063, 1e-3, 10.0, 1e-7)
        eta = params.eta
        for name in cs.settings:
            total = ys.obs_x[(0, name)] + ys.obs_x[(1, name)]
            cap = THREE_STATE_P[name] * 0.5 * (eta + (1 - eta) * 2e-7)
            assert total <= cap + 1e-15

    def test_misalignment_flips_outcomes(self):
        _, _, ys = make_yields(0.0, 0.0, 0.0, 0.0, misalignment=0.1)
        # X basis: the aligned 0X state now errs with probability e_d.
        assert ys.obs_x[(1, "0X")] == pytest.approx(0.5 * 0.5 * 0.1, abs=1e-15)
        assert ys.obs_x[(0, "0X")] == pytest.approx(0.5 * 0.5 * 0.9, abs=1e-15)
        # Z basis likewise.
        y_z, e_z = z_basis_stats(ys)
        assert e_z == pytest.approx(0.1, abs=1e-15)

    def test_conflicting_rows_rejected(self):
        a = closed_form(0.0, 0.0)
        b = closed_form(0.063, 0.0)
        params = ChannelParams(loss_db=0.0)
        with pytest.raises(ValueError):
            simulate_observed_yields((a, b), params, THREE_STATE_P)

    def test_four_state_settings_present(self):
        sets = tuple(
            closed_form(0.063, 1e-3, x_setting=name) for name in ("0X", "1X")
        )
        probs = {"0Z": 0.25, "1Z": 0.25, "0X": 0.25, "1X": 0.25}
        ys = simulate_observed_yields(sets, ChannelParams(loss_db=10.0), probs)
        assert set(ys.x_settings()) == {"0Z", "1Z", "0X", "1X"}


class TestZBasisStats:
    def test_perfect_channel_error_free(self):
        _, _, ys = make_yields(0.0, 0.0, 0.0, 0.0)
        y_z, e_z = z_basis_stats(ys)
        assert y_z == pytest.approx(0.25, abs=1e-15)
        assert e_z == pytest.approx(0.0, abs=1e-15)

    def test_dark_counts_give_half(self):
        cs = closed_form(0.0, 0.0)
        # eta = 0 is unreachable through loss_db; emulate with a synthetic
        # yield table of pure dark counts.
        from corrqkd.channel import YieldSet

        dark = 1e-7 * 0.125
        ys = YieldSet(
            obs_x={},
            obs_z={(s, n): dark for s in (0, 1) for n in ("0Z", "1Z")},
        )
        y_z, e_z = z_basis_stats(ys)
        assert e_z == pytest.approx(0.5, abs=1e-15)
        assert y_z == pytest.approx(4 * dark, abs=1e-20)

    def test_high_loss_error_rate_formula(self):
        # e_Z = (1 - eta) p_d / (eta + 2 (1 - eta) p_d) at delta = 0.
        _, _, ys = make_yields(0.0, 0.0, 40.0, 1e-7)
        _, e_z = z_basis_stats(ys)
        eta = transmittance(40.0)
        want = (1 - eta) * 1e-7 / (eta + 2 * (1 - eta) * 1e-7)
        assert e_z == pytest.approx(want, rel=1e-9)

    def test_empty_ensemble_rejected(self):
        from corrqkd.channel import YieldSet

        ys = YieldSet(obs_x={}, obs_z={(s, n): 0.0 for s in (0, 1) for n in ("0Z", "1Z")})
        with pytest.raises(UndefinedRateError):
            z_basis_stats(ys)


class TestMonteCarloCrossCheck:
    def test_analytic_yields_match_click_simulation(self):
        # 10^6-trial smoke version of the full acceptance cross-check.
        delta, eps, loss = 0.063, 1e-3, 10.0
        cs = closed_form(delta, eps)
        params = ChannelParams(loss_db=loss, dark_rate=1e-7)
        analytic = simulate_observed_yields(cs, params, THREE_STATE_P)
        trials = 10**6
        mc_x, _ = monte_carlo_yields(
            cs.p_x_obs,
            cs.p_z_obs,
            THREE_STATE_P,
            eta=params.eta,
            dark_rate=params.dark_rate,
            misalignment=0.0,
            p_z_bob=0.5,
            trials=trials,
            seed=20240811,
        )
        for key, want in analytic.obs_x.items():
            sigma = binomial_sigma(want, trials)
            assert abs(mc_x[key] - want) <= 3.0 * sigma, key
