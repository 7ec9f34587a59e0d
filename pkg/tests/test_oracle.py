"""Engine results re-derived by the brute-force oracles.

Everything in here runs on instances small enough for exhaustive vertex
enumeration; the guards themselves are exercised too.
"""

from __future__ import annotations

import numpy as np
import pytest

from fairtree import (
    SizeGuardError,
    UnfairMarketError,
    check_complete,
    generate_market,
    log_utility,
    power_utility,
    solve_dual,
    superhedge_price,
)
from fairtree.oracle import (
    compare,
    oracle_complete,
    oracle_dual,
    oracle_price_interval,
    oracle_superhedge,
)

from conftest import arb_corpus, corpus_claim, fair_corpus


def small_corpus():
    """Corpus entries whose polytope admits vertex enumeration."""
    out = []
    for i, model in enumerate(fair_corpus(20)):
        if model.tree.n_nodes <= 25:
            out.append((i, model))
    return out


class TestSuperhedgeOracle:
    def test_intervals_agree(self):
        checked = 0
        for i, model in small_corpus():
            claim = corpus_claim(model, i)
            try:
                lo, hi = oracle_price_interval(model, claim)
            except SizeGuardError:
                continue
            interval = superhedge_price(model, claim)
            assert abs(interval.upper - hi) <= 1e-8
            assert abs(interval.lower - lo) <= 1e-8
            assert oracle_superhedge(model, claim) == hi
            checked += 1
        assert checked >= 8

    def test_fixture_values(self, t1):
        lo, hi = oracle_price_interval(t1.model, t1.claims["digital-up"])
        assert lo == pytest.approx(0.0, abs=1e-12)
        assert hi == pytest.approx(1 / 3, abs=1e-12)

    def test_unfair_market_raises(self):
        model = arb_corpus(1)[0]
        claim = corpus_claim(model, 0)
        with pytest.raises(UnfairMarketError):
            oracle_superhedge(model, claim)


class TestCompletenessOracle:
    def test_verdicts_match_exactly(self):
        checked = 0
        for _, model in small_corpus():
            try:
                expected = oracle_complete(model)
            except SizeGuardError:
                continue
            assert check_complete(model).complete == expected
            checked += 1
        assert checked >= 8

    def test_fixtures(self, b1_model, t1_model):
        assert oracle_complete(b1_model) is True
        assert oracle_complete(t1_model) is False


class TestDualOracle:
    @pytest.mark.parametrize("u", [log_utility(), power_utility(0.5)],
                             ids=lambda u: u.label)
    def test_grid_value_close(self, u):
        checked = 0
        for _, model in small_corpus():
            try:
                grid_value = oracle_dual(model, u, 1.0)
            except SizeGuardError:
                continue
            engine = solve_dual(model, u, 1.0).value
            # the grid value is an upper bound, tight to grid resolution
            assert engine <= grid_value + 1e-12
            assert abs(engine - grid_value) <= 1e-4
            checked += 1
        assert checked >= 6

    def test_t1_exact(self, t1_model):
        grid_value = oracle_dual(t1_model, log_utility(), 1.0)
        engine = solve_dual(t1_model, log_utility(), 1.0).value
        assert abs(engine - grid_value) <= 1e-5

    def test_complete_market_needs_no_grid(self, b1_model):
        # zero-dimensional polytope: the single vertex is the answer
        value = oracle_dual(b1_model, log_utility(), 1.0)
        assert value == pytest.approx(
            solve_dual(b1_model, log_utility(), 1.0).value, abs=1e-12
        )

    def test_density_validation(self, t1_model):
        with pytest.raises(ValueError):
            oracle_dual(t1_model, log_utility(), 1.0, density=1)

    def test_dimension_guard_trips(self):
        # branching 4 with one asset leaves 3 free directions per node;
        # two levels of that pushes the family dimension past the guard
        model = generate_market(seed=5, depth=2, branching=4, assets=1)
        with pytest.raises(SizeGuardError):
            oracle_dual(model, log_utility(), 1.0)


class TestVertexGuards:
    def test_variable_guard(self):
        model = generate_market(seed=6, depth=4, branching=3, assets=1)
        assert model.tree.n_nodes > 25
        with pytest.raises(SizeGuardError):
            oracle_complete(model)


class TestCompare:
    def test_report_arithmetic(self):
        report = compare("price", 1.0, 1.0 + 5e-9)
        assert report.quantity == "price"
        assert report.absolute_difference == pytest.approx(5e-9)
        assert report.relative_difference == pytest.approx(5e-9)
        big = compare("price", 200.0, 100.0)
        assert big.relative_difference == pytest.approx(0.5)
