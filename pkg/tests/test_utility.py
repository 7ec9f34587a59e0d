"""Utility duality: conjugates, primal/dual solvers, minimax deflators,
marginal prices, augmentation, growth-optimal portfolio."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fairtree import (
    Claim,
    Deflator,
    augment_market,
    davis_price,
    dual_value,
    growth_optimal,
    log_utility,
    parse_utility,
    power_utility,
    sample_deflators,
    solve_dual,
    solve_primal,
    superhedge_price,
    value_functions,
    verify_minimax,
)
from fairtree.errors import ModelError

from conftest import fair_corpus

UTILITIES = [log_utility(), power_utility(0.5), power_utility(-1.0)]

T1_LOG_VALUE = np.log(9 / 8) / 3


# ---------------------------------------------------------------------------
# the utility family itself
# ---------------------------------------------------------------------------


class TestUtilitySpec:
    @pytest.mark.parametrize("u", UTILITIES, ids=lambda u: u.label)
    @given(y=st.floats(1e-3, 1e3))
    def test_conjugate_identity(self, u, y):
        x_star = u.inverse_marginal(y)
        assert u.conjugate(y) == pytest.approx(
            u.utility(x_star) - y * x_star, rel=1e-12, abs=1e-12
        )

    @pytest.mark.parametrize("u", UTILITIES, ids=lambda u: u.label)
    @given(y=st.floats(1e-3, 1e3))
    def test_inverse_marginal_inverts(self, u, y):
        assert u.marginal(u.inverse_marginal(y)) == pytest.approx(y, rel=1e-12)

    @pytest.mark.parametrize("u", UTILITIES, ids=lambda u: u.label)
    def test_conjugate_slope_is_minus_inverse_marginal(self, u):
        ys = np.geomspace(0.05, 20.0, 9)
        h = 1e-6
        slope = (u.conjugate(ys + h) - u.conjugate(ys - h)) / (2 * h)
        np.testing.assert_allclose(slope, -u.inverse_marginal(ys), rtol=1e-5)

    @pytest.mark.parametrize("u", UTILITIES, ids=lambda u: u.label)
    def test_curvature_is_conjugate_second_derivative(self, u):
        ys = np.geomspace(0.1, 10.0, 7)
        h = 1e-4  # second differences amplify roundoff as 1/h^2
        second = (
            u.conjugate(ys + h) - 2 * u.conjugate(ys) + u.conjugate(ys - h)
        ) / h**2
        np.testing.assert_allclose(second, u.conjugate_curvature(ys), rtol=1e-4)
        assert np.all(u.conjugate_curvature(ys) > 0)

    def test_out_of_domain_values(self):
        u = power_utility(0.5)
        assert u.utility(-1.0) == -np.inf
        assert u.conjugate(-2.0) == np.inf
        assert power_utility(-1.0).conjugate(0.0) == 0.0
        assert log_utility().conjugate(0.0) == np.inf

    @pytest.mark.parametrize("bad", [1.0, 0.0, 1.5, np.inf, np.nan])
    def test_bad_power_exponents(self, bad):
        with pytest.raises(ValueError):
            power_utility(bad)

    def test_parse(self):
        assert parse_utility("log") == log_utility()
        assert parse_utility("power:0.5") == power_utility(0.5)
        assert parse_utility("power:-1") == power_utility(-1.0)
        for text in ("quadratic", "power:abc", "power:1", "POWER:0.5"):
            with pytest.raises(ValueError):
                parse_utility(text)

    def test_labels(self):
        assert log_utility().label == "log"
        assert power_utility(-1.0).label == "power:-1"


# ---------------------------------------------------------------------------
# the hand-derived trinomial optimum
# ---------------------------------------------------------------------------


class TestT1LogOptimum:
    def test_dual_minimizer(self, t1_model):
        dual = solve_dual(t1_model, log_utility(), 1.0)
        np.testing.assert_allclose(
            dual.deflator.values, [1, 2 / 3, 1, 4 / 3], atol=1e-8
        )
        assert dual.gap <= 1e-9

    def test_primal_optimum(self, t1_model):
        primal = solve_primal(t1_model, log_utility(), 1.0)
        assert primal.value == pytest.approx(T1_LOG_VALUE, abs=1e-8)
        np.testing.assert_allclose(primal.wealth, [1, 1.5, 1, 0.75], atol=1e-8)
        np.testing.assert_allclose(
            primal.strategy.holdings[:, 0], [0.5, 0.5], atol=1e-8
        )
        assert primal.budget_residual <= 1e-8
        assert primal.max_consumption <= 1e-7

    def test_dual_value_minimal_over_the_family(self, t1_model):
        util = log_utility()
        best = solve_dual(t1_model, util, 1.0).value
        for t in (0.4, 1.0, 4 / 3, 1.9):
            member = Deflator.for_market(
                t1_model, [1.0, t / 2, 3 - 1.5 * t, t]
            )
            value = dual_value(t1_model, util, member, 1.0)
            assert value >= best - 1e-10
        exact = dual_value(
            t1_model, util, Deflator.for_market(t1_model, [1, 2 / 3, 1, 4 / 3]), 1.0
        )
        assert exact == pytest.approx(best, abs=1e-9)

    def test_scale_invariance_of_the_minimizer(self, t1_model):
        a = solve_dual(t1_model, log_utility(), 0.25)
        b = solve_dual(t1_model, log_utility(), 4.0)
        np.testing.assert_allclose(a.deflator.values, b.deflator.values, atol=1e-9)
        assert a.value != pytest.approx(b.value)  # the value does move

    def test_davis_price_of_the_digital(self, t1):
        davis = davis_price(t1.model, log_utility(), 1.0, t1.claims["digital-up"])
        assert davis.price == pytest.approx(2 / 9, abs=1e-9)
        assert davis.residual <= 1e-8
        interval = superhedge_price(t1.model, t1.claims["digital-up"])
        assert interval.lower - 1e-9 <= davis.price <= interval.upper + 1e-9


class TestB1Complete:
    def test_all_utilities_agree_on_davis_price(self, b1):
        # one deflator means one price, whatever the utility
        for u in UTILITIES:
            davis = davis_price(b1.model, u, 1.0, b1.claims["call"])
            assert davis.price == pytest.approx(1 / 3, abs=1e-9)

    def test_log_wealth_is_reciprocal_deflator(self, b1_model):
        primal = solve_primal(b1_model, log_utility(), 2.0)
        np.testing.assert_allclose(
            primal.wealth * primal.deflator.values, 2.0, atol=1e-9
        )


# ---------------------------------------------------------------------------
# solver properties on the random corpus
# ---------------------------------------------------------------------------


class TestDualityProperties:
    @pytest.mark.parametrize("u", UTILITIES, ids=lambda u: u.label)
    def test_residuals_small(self, u):
        for model in fair_corpus(6):
            for x in (0.5, 2.0):
                primal = solve_primal(model, u, x)
                assert primal.budget_residual <= 1e-8
                assert primal.max_consumption <= 1e-7
                # deflated wealth is a martingale
                tree = model.tree
                m = primal.deflator.values
                prod = primal.wealth * m
                for k in range(tree.n_nodes):
                    ch = list(tree.children[k])
                    if ch:
                        forward = float(tree.branch_prob[ch] @ prod[ch])
                        assert forward == pytest.approx(
                            prod[k], abs=1e-8 * max(1.0, abs(prod[k]))
                        )

    def test_conjugacy_bound_and_touch(self, t1_model):
        u = log_utility()
        for x in (0.5, 1.0, 2.0):
            primal = solve_primal(t1_model, u, x)
            for y in (0.3, 1.0, 3.0):
                v = solve_dual(t1_model, u, y).value
                assert primal.value <= v + x * y + 1e-9
            y_hat = primal.y
            v_hat = solve_dual(t1_model, u, y_hat).value
            assert primal.value == pytest.approx(v_hat + x * y_hat, abs=1e-6)

    def test_power_scaling_law(self, t1_model):
        p = 0.5
        u = power_utility(p)
        base = solve_primal(t1_model, u, 1.0)
        scaled = solve_primal(t1_model, u, 2.0)
        assert scaled.value == pytest.approx(2**p * base.value, rel=1e-8)
        np.testing.assert_allclose(scaled.wealth, 2.0 * base.wealth, atol=1e-7)

    def test_log_scaling_law(self, t1_model):
        u = log_utility()
        base = solve_primal(t1_model, u, 1.0)
        scaled = solve_primal(t1_model, u, 3.0)
        assert scaled.value == pytest.approx(base.value + np.log(3.0), abs=1e-8)

    def test_value_functions_grid(self, t1_model):
        grid = value_functions(t1_model, log_utility(), [0.5, 1.0, 2.0], [0.5, 1.0, 2.0])
        # weak duality at every grid pair
        for i, x in enumerate(grid.wealth_grid):
            for j, y in enumerate(grid.scale_grid):
                assert grid.primal_values[i] <= grid.dual_values[j] + x * y + 1e-9
        # for log utility the conjugate pair of x=1 is y=1; both sit on the
        # grid, so those residuals are solver-sized, not grid-sized
        assert grid.primal_conjugacy_residuals[1] <= 1e-7
        assert grid.dual_conjugacy_residuals[1] <= 1e-7

    def test_rejects_bad_arguments(self, t1_model):
        with pytest.raises(ValueError):
            solve_dual(t1_model, log_utility(), 0.0)
        with pytest.raises(ValueError):
            solve_primal(t1_model, log_utility(), -1.0)


class TestMinimax:
    def test_accepts_the_dual_minimizer(self, t1_model):
        for u in UTILITIES:
            dual = solve_dual(t1_model, u, 1.0)
            report = verify_minimax(t1_model, u, dual.deflator, 1.0)
            assert report.minimax, report.reason

    def test_rejects_other_family_members(self, t1_model):
        u = log_utility()
        for t in (0.5, 1.0, 1.8):
            member = Deflator.for_market(t1_model, [1.0, t / 2, 3 - 1.5 * t, t])
            report = verify_minimax(t1_model, u, member, 1.0)
            assert not report.minimax
            assert report.reason

    def test_rejects_perturbations_across_a_corpus(self):
        u = power_utility(0.5)
        rejected = 0
        for model in fair_corpus(6):
            best = solve_dual(model, u, 1.0).deflator.values
            for m in sample_deflators(model, 4, seed=11):
                candidate = 0.5 * best + 0.5 * m.values
                if np.abs(candidate - best).max() < 1e-4:
                    continue  # complete market: nothing to perturb with
                report = verify_minimax(model, u, candidate, 1.0)
                assert not report.minimax
                rejected += 1
        assert rejected >= 8  # the corpus contains incomplete markets


class TestAugmentation:
    def test_t1_digital_becomes_an_asset(self, t1):
        augmented, diag = augment_market(
            t1.model, log_utility(), 1.0, t1.claims["digital-up"], name="digital"
        )
        assert augmented.n_assets == 3
        assert "digital" in augmented.asset_names
        np.testing.assert_allclose(
            augmented.price[2], [2 / 9, 1.0, 0.0, 0.0], atol=1e-8
        )
        assert diag.fair
        assert diag.deflator_residual <= 1e-8
        assert diag.dual_value_shift <= 1e-7
        assert diag.deflator_shift <= 1e-7
        assert diag.primal_value_shift <= 1e-7

    def test_augmented_market_may_lose_completeness_dimension(self, t1):
        # the digital spans the missing direction: T1 becomes complete
        from fairtree import check_complete

        augmented, _ = augment_market(
            t1.model, log_utility(), 1.0, t1.claims["digital-up"]
        )
        assert check_complete(augmented).complete

    def test_worthless_claim_rejected(self, t1_model):
        zero = Claim(np.zeros(3))
        with pytest.raises(ModelError):
            augment_market(t1_model, log_utility(), 1.0, zero)

    def test_name_collision_resolved(self, t1):
        augmented, _ = augment_market(
            t1.model, log_utility(), 1.0, t1.claims["stock-claim"], name="stock"
        )
        assert augmented.asset_names[-1] == "stock-augmented"


class TestGrowthOptimal:
    def test_matches_log_primal(self, t1_model):
        g = growth_optimal(t1_model, 1.0)
        p = solve_primal(t1_model, log_utility(), 1.0)
        np.testing.assert_allclose(g.wealth, p.wealth, atol=1e-10)

    def test_reciprocal_identity_on_the_corpus(self):
        for model in fair_corpus(8):
            g = growth_optimal(model, 1.5)
            np.testing.assert_allclose(
                g.wealth * g.deflator.values, 1.5, atol=1e-8
            )
