"""Acceptance gate: ten criteria, one PASS/FAIL line each.

Run ``pytest tests/test_acceptance.py -s`` to watch the lines print as the
criteria run (without ``-s`` they land in each test's captured stdout).
Each criterion is an independent test and completes well under a minute.
"""

from __future__ import annotations

import functools
from functools import lru_cache

import numpy as np
import pytest

from fairtree import (
    Claim,
    Deflator,
    augment_market,
    check_complete,
    check_fair,
    check_supermartingale,
    classify_attainability,
    davis_price,
    default_claims,
    deflate,
    generate_market,
    log_utility,
    optional_decomposition,
    power_utility,
    sample_deflators,
    solve_dual,
    solve_primal,
    superhedge_price,
    superhedge_process,
    verify_minimax,
)
from fairtree.errors import SizeGuardError
from fairtree.optim import gradient_check
from fairtree.utility import _dual_objective

from conftest import arb_corpus, corpus_claim, fair_corpus

UTILITIES = (log_utility(), power_utility(0.5), power_utility(-1.0))


def criterion(number: int, label: str):
    """Print exactly one ``[criterion N] PASS/FAIL`` line per test."""

    def decorate(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"[criterion {number}] FAIL - {label}", flush=True)
                raise
            print(f"[criterion {number}] PASS - {label}", flush=True)

        return wrapper

    return decorate


@lru_cache(maxsize=None)
def incomplete_corpus(count: int):
    """Markets with fewer assets than branches: never complete, so their
    deflator families have room for genuine perturbations."""
    shapes = [
        (1, 3, 1), (2, 3, 1), (1, 3, 2), (2, 3, 2), (3, 3, 1),
        (2, 2, 1), (3, 2, 1), (4, 2, 1), (3, 3, 2), (4, 3, 2),
    ]
    return [
        generate_market(seed=2000 + i, depth=d, branching=b, assets=a)
        for i, (d, b, a) in enumerate(shapes * (count // len(shapes) + 1))
    ][:count]


@criterion(1, "complete binomial fixture")
def test_criterion_01_binomial_fixture(b1):
    model, call = b1.model, b1.claims["call"]
    report = check_fair(model)
    np.testing.assert_allclose(report.witness.values, [1, 2 / 3, 4 / 3], atol=1e-9)
    assert check_complete(model).complete

    interval = superhedge_price(model, call)
    assert interval.width <= 1e-10
    superhedge = interval.upper

    process = superhedge_process(model, call)
    decomposition = optional_decomposition(model, process)
    assert float(decomposition.consumption.max()) <= 1e-10
    replication = float(decomposition.strategy.holdings[:, 0] @ model.price[:, 0])

    davis = davis_price(model, log_utility(), 1.0, call).price

    for price in (superhedge, replication, davis):
        assert price == pytest.approx(1 / 3, abs=1e-9)
    assert max(superhedge, replication, davis) - min(
        superhedge, replication, davis
    ) <= 1e-9


@criterion(2, "incomplete trinomial fixture")
def test_criterion_02_trinomial_fixture(t1):
    model, digital = t1.model, t1.claims["digital-up"]

    # deflator family (1, t/2, 3 - 3t/2, t)
    for m in sample_deflators(model, 6, seed=5):
        _, mu, mm, md = m.values
        assert mu == pytest.approx(md / 2, abs=1e-9)
        assert mm == pytest.approx(3 - 1.5 * md, abs=1e-9)

    interval = superhedge_price(model, digital)
    assert interval.lower == pytest.approx(0.0, abs=1e-9)
    assert interval.upper == pytest.approx(1 / 3, abs=1e-9)
    assert classify_attainability(model, digital).classification == "not-attainable"

    completeness = check_complete(model)
    assert not completeness.complete
    assert completeness.dimension == 1

    primal = solve_primal(model, log_utility(), 1.0)
    np.testing.assert_allclose(
        primal.deflator.values, [1, 2 / 3, 1, 4 / 3], atol=1e-8
    )
    np.testing.assert_allclose(primal.strategy.holdings[:, 0], [0.5, 0.5], atol=1e-8)
    assert primal.value == pytest.approx(np.log(9 / 8) / 3, abs=1e-8)

    davis = davis_price(model, log_utility(), 1.0, digital).price
    assert davis == pytest.approx(2 / 9, abs=1e-9)
    assert interval.lower - 1e-9 <= davis <= interval.upper + 1e-9


@criterion(3, "FTAP soundness on 200 generated markets")
def test_criterion_03_ftap_soundness():
    fair_verdicts = 0
    for model in fair_corpus(200):
        report = check_fair(model)
        assert report.fair, "fair-by-construction market misclassified"
        fair_verdicts += 1
    assert fair_verdicts == 200

    for model in arb_corpus(200):
        report = check_fair(model)
        assert not report.fair, "dominated-asset market misclassified"
        cert = report.certificate
        assert cert is not None
        assert cert.cost <= 1e-9
        assert float(cert.payoffs.min()) >= -1e-9
        assert float(cert.payoffs.max()) > 1e-10


@criterion(4, "superhedging duality and decomposition on 200 markets")
def test_criterion_04_superhedging_duality():
    for i, model in enumerate(fair_corpus(200)):
        claim = corpus_claim(model, i)
        interval = superhedge_price(model, claim)
        process = superhedge_process(model, claim)
        assert abs(process[0] - interval.upper) <= 1e-8

        result = optional_decomposition(model, process)
        tree = model.tree
        # wealth replay: domination at the leaves, consumption monotone
        wealth = np.empty(tree.n_nodes)
        wealth[0] = process[0]
        for k in range(1, tree.n_nodes):
            p = tree.parent[k]
            gain = float(
                result.strategy.holdings[:, p]
                @ (model.price[:, k] - model.price[:, p])
            )
            wealth[k] = wealth[p] + gain - (
                result.consumption[k] - result.consumption[p]
            )
        assert float((wealth[tree.leaves] - claim.payoff).min()) >= -1e-9
        assert result.consumption[0] == 0.0
        drops = result.consumption[1:] - result.consumption[tree.parent[1:]]
        assert float(drops.min()) >= -1e-9
        # the superhedge value process is a supermartingale under every
        # vertex of every local deflator polytope
        check_supermartingale(model, process)


@criterion(5, "oracle equivalence on guarded instances")
def test_criterion_05_oracle_equivalence():
    from fairtree.oracle import oracle_complete, oracle_dual, oracle_price_interval

    interval_checks = completeness_checks = dual_checks = 0
    for i, model in enumerate(fair_corpus(200)):
        if model.tree.n_nodes > 25:
            continue
        claim = corpus_claim(model, i)
        try:
            lo, hi = oracle_price_interval(model, claim)
            complete = oracle_complete(model)
        except SizeGuardError:
            continue
        interval = superhedge_price(model, claim)
        assert abs(interval.upper - hi) <= 1e-8
        assert abs(interval.lower - lo) <= 1e-8
        interval_checks += 1
        assert check_complete(model).complete == complete
        completeness_checks += 1
        for utility in (log_utility(), power_utility(0.5)):
            try:
                grid_value = oracle_dual(model, utility, 1.0)
            except SizeGuardError:
                continue
            engine = solve_dual(model, utility, 1.0).value
            assert abs(engine - grid_value) <= 1e-4
            dual_checks += 1
    assert interval_checks >= 50
    assert completeness_checks >= 50
    assert dual_checks >= 20


@criterion(6, "utility duality on 50 markets x 3 utilities x 3 wealths")
def test_criterion_06_duality():
    for model in fair_corpus(50):
        tree = model.tree
        for utility in UTILITIES:
            for x in (0.5, 1.0, 2.0):
                primal = solve_primal(model, utility, x)
                assert primal.budget_residual <= 1e-8
                assert primal.max_consumption <= 1e-7

                product = primal.wealth * primal.deflator.values
                worst = 0.0
                for k in range(tree.n_nodes):
                    ch = list(tree.children[k])
                    if ch:
                        forward = float(tree.branch_prob[ch] @ product[ch])
                        worst = max(worst, abs(forward - product[k]))
                assert worst <= 1e-8

                y_hat = primal.y
                v_hat = solve_dual(model, utility, y_hat).value
                assert abs(primal.value - (v_hat + x * y_hat)) <= 1e-6
                for y in (0.5 * y_hat, 2.0 * y_hat):
                    v = solve_dual(model, utility, y).value
                    assert primal.value <= v + x * y + 1e-9


@criterion(7, "minimax verification on a 20-market corpus")
def test_criterion_07_minimax():
    utility = log_utility()
    for model in incomplete_corpus(20):
        best = solve_dual(model, utility, 1.0).deflator
        assert verify_minimax(model, utility, best, 1.0).minimax

        rejected = 0
        for m in sample_deflators(model, 24, seed=31):
            candidate = 0.5 * best.values + 0.5 * m.values
            if float(np.abs(candidate - best.values).max()) < 1e-5:
                continue
            report = verify_minimax(model, utility, Deflator(candidate), 1.0)
            assert not report.minimax, report.reason
            rejected += 1
            if rejected == 10:
                break
        assert rejected == 10, "not enough distinct perturbations"


@criterion(8, "augmentation invariance on a 20-market corpus")
def test_criterion_08_augmentation():
    for i, model in enumerate(incomplete_corpus(20)):
        utility = UTILITIES[i % 3]
        claim = default_claims(model, seed=2000 + i)["random"]
        augmented, diagnostics = augment_market(model, utility, 1.0, claim)
        assert augmented.n_assets == model.n_assets + 1
        assert diagnostics.fair
        assert diagnostics.deflator_residual <= 1e-8
        assert diagnostics.dual_value_shift <= 1e-7
        assert diagnostics.primal_value_shift <= 1e-7
        assert diagnostics.deflator_shift <= 1e-7


@criterion(9, "numeraire-change metamorphic suite")
def test_criterion_09_numeraire_metamorphic():
    rng = np.random.default_rng(77)
    for i, model in enumerate(fair_corpus(24)):
        tree = model.tree
        scaling = np.exp(rng.normal(0.0, 0.4, size=tree.n_nodes))
        scaling[0] = 1.0
        scaled = deflate(model, scaling)
        claim = corpus_claim(model, i)
        scaled_claim = Claim(scaling[tree.leaves] * claim.payoff)

        assert check_fair(scaled).fair
        assert check_complete(scaled).complete == check_complete(model).complete

        base = superhedge_price(model, claim)
        moved = superhedge_price(scaled, scaled_claim)
        scale = max(1.0, abs(base.upper), abs(base.lower))
        assert abs(moved.upper - base.upper) <= 1e-9 * scale
        assert abs(moved.lower - base.lower) <= 1e-9 * scale
        assert (
            classify_attainability(scaled, scaled_claim).classification
            == classify_attainability(model, claim).classification
        )

        # a non-unit root level scales both bounds by exactly that amount
        root_level = 1.0 + rng.uniform(0.25, 2.0)
        general = scaling * root_level
        rescaled = superhedge_price(
            deflate(model, general), Claim(general[tree.leaves] * claim.payoff)
        )
        assert abs(rescaled.upper - root_level * base.upper) <= 1e-9 * root_level * scale
        assert abs(rescaled.lower - root_level * base.lower) <= 1e-9 * root_level * scale

    for model in arb_corpus(12):
        scaling = np.exp(rng.normal(0.0, 0.4, size=model.tree.n_nodes))
        scaling[0] = 1.0
        assert not check_fair(deflate(model, scaling)).fair


@criterion(10, "dual-objective gradients vs central differences")
def test_criterion_10_gradients():
    models = [
        generate_market(seed=3001, depth=1, branching=3, assets=2),
        generate_market(seed=3002, depth=2, branching=3, assets=2),
    ]
    rng = np.random.default_rng(13)
    for utility in UTILITIES:
        for model in models:
            objective, gradient, _ = _dual_objective(model, utility, 1.0)
            anchors = [m.values for m in sample_deflators(model, 5, seed=17)]
            points = []
            for _ in range(100):
                base = anchors[rng.integers(len(anchors))]
                jitter = np.exp(rng.normal(0.0, 0.3, size=base.size))
                points.append(np.maximum(base * jitter, 0.1))
            error = gradient_check(objective, gradient, points)
            assert error <= 1e-5
