"""Superhedging prices, consumption decompositions, attainability.

The superhedging cost of a claim is the largest deflator-weighted expected
payoff over the closure of the deflator polytope.  Two independent routes
compute it: a single linear program over the whole polytope
(:func:`superhedge_price`) and a backward recursion of node-local linear
programs (:func:`superhedge_process`); they must agree to 1e-8 and tests
hold them to that.

Any process that is a one-step supermartingale under every deflator splits
as initial value plus trading gains minus a nondecreasing consumption
(:func:`optional_decomposition`); applied to the superhedging process this
yields the cheapest dominating strategy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SolverError, SupermartingaleError
from .market import Claim, MarketModel, Strategy, _check_claim
from .deflators import (
    FAIRNESS_THRESHOLD,
    Deflator,
    _local_system,
    build_polytope,
    local_vertices,
    require_fair,
)
from .optim import LinearProgram, solve_lp

INTERVAL_TOL = 1e-9
SUPERMARTINGALE_SLACK = 1e-9

STRONGLY_REGULAR = "strongly-regular"
REGULAR_ATTAINABLE = "regular-attainable"
NOT_ATTAINABLE = "not-attainable"


@dataclass(frozen=True, eq=False)
class PriceInterval:
    """Superhedging (upper) and subhedging (lower) prices of a claim with
    the optimizing polytope-closure points.  The bound points may sit on
    the boundary and are therefore bare arrays, not deflators."""

    lower: float
    upper: float
    lower_point: np.ndarray
    upper_point: np.ndarray

    @property
    def width(self) -> float:
        return self.upper - self.lower


@dataclass(frozen=True, eq=False)
class DecompositionResult:
    """``process = process[root] + gains(strategy) - consumption`` along
    every path, with ``consumption`` cumulative, nondecreasing and zero at
    the root."""

    process: np.ndarray
    strategy: Strategy
    consumption: np.ndarray


@dataclass(frozen=True, eq=False)
class AttainabilityVerdict:
    classification: str
    price: float
    interval: PriceInterval
    supporting_deflator: Deflator | None
    boundary_witness: np.ndarray | None


def _claim_objective(model: MarketModel, payoff: np.ndarray) -> np.ndarray:
    tree = model.tree
    objective = np.zeros(tree.n_nodes)
    objective[tree.leaves] = tree.path_prob[tree.leaves] * payoff
    return objective


def superhedge_price(model: MarketModel, claim: Claim) -> PriceInterval:
    """Both price bounds by linear programming over the deflator polytope."""
    payoff = _check_claim(model, claim)
    require_fair(model)
    polytope = build_polytope(model)
    objective = _claim_objective(model, payoff)
    bounds = {}
    for sense in ("max", "min"):
        sol = solve_lp(polytope.linear_program(objective, sense))
        if sol.status != "optimal":  # pragma: no cover - compact and nonempty
            raise SolverError(f"superhedge LP unexpectedly {sol.status}")
        bounds[sense] = sol
    return PriceInterval(
        lower=float(bounds["min"].value),
        upper=float(bounds["max"].value),
        lower_point=bounds["min"].x,
        upper_point=bounds["max"].x,
    )


def superhedge_process(model: MarketModel, claim: Claim) -> np.ndarray:
    """Backward dynamic program for the running superhedging cost.

    Each non-leaf node solves a small LP: maximize the probability-weighted
    ratio-deflated continuation value subject to the node's one-step
    martingale constraints.
    """
    payoff = _check_claim(model, claim)
    require_fair(model)
    tree = model.tree
    values = np.zeros(tree.n_nodes)
    values[tree.leaves] = payoff
    for k in range(tree.n_nodes - 1, -1, -1):
        if tree.is_leaf(k):
            continue
        ch, probs, matrix, rhs = _local_system(model, k)
        objective = probs * values[ch]
        sol = solve_lp(LinearProgram(objective, matrix, rhs, 0.0, "max"))
        if sol.status != "optimal":  # pragma: no cover - fair market
            raise SolverError(
                f"local superhedge LP {sol.status} at node {tree.ids[k]!r}"
            )
        values[k] = float(sol.value)
    return values


def check_supermartingale(
    model: MarketModel, process, slack: float = SUPERMARTINGALE_SLACK
) -> None:
    """Verify the one-step supermartingale property under every deflator.

    The inequality is linear in the deflator, so checking the vertices of
    each node's one-step ratio polytope covers the whole closure (levels
    that vanish propagate zero down the subtree and contribute nothing).
    Raises :class:`SupermartingaleError` at the first violation.  ``slack``
    is relative to the magnitude of the terms compared; processes that are
    optimal only up to a solver gap need a correspondingly looser value.
    """
    values = np.asarray(process, dtype=float)
    tree = model.tree
    if values.shape != (tree.n_nodes,):
        raise ValueError("process needs one value per node")
    for k in range(tree.n_nodes):
        if tree.is_leaf(k):
            continue
        ch, probs, _, _ = _local_system(model, k)
        for vertex in local_vertices(model, k):
            forward = float(probs * vertex @ values[ch])
            excess = forward - values[k]
            scale = max(1.0, abs(forward), abs(values[k]))
            if excess > slack * scale:
                raise SupermartingaleError(tree.ids[k], vertex, excess)


def optional_decomposition(
    model: MarketModel, process, slack: float = SUPERMARTINGALE_SLACK
) -> DecompositionResult:
    """Split a universal supermartingale into gains minus consumption.

    At each non-leaf node the cheapest position dominating the children's
    values is found by LP; by duality its cost never exceeds the node's own
    value, and the per-edge consumption increment is the domination surplus
    at the child plus the node-level cost gap.  The wealth identity then
    holds exactly by construction.
    """
    values = np.asarray(process, dtype=float)
    tree = model.tree
    require_fair(model)
    check_supermartingale(model, values, slack)

    holdings = np.zeros((model.n_assets, tree.n_nodes))
    consumption = np.zeros(tree.n_nodes)
    d = model.n_assets
    for k in range(tree.n_nodes):
        ch = list(tree.children[k])
        if not ch:
            continue
        n_children = len(ch)
        rows = np.zeros((n_children, d + n_children))
        for j, c in enumerate(ch):
            rows[j, :d] = model.price[:, c]
            rows[j, d + j] = -1.0
        rhs = values[ch]
        objective = np.concatenate([model.price[:, k], np.zeros(n_children)])
        lower = np.concatenate([np.full(d, -np.inf), np.zeros(n_children)])
        sol = solve_lp(LinearProgram(objective, rows, rhs, lower, "min"))
        if sol.status != "optimal":  # pragma: no cover - fair market
            raise SolverError(
                f"decomposition LP {sol.status} at node {tree.ids[k]!r}"
            )
        position = sol.x[:d]
        holdings[:, k] = position
        node_gap = values[k] - float(position @ model.price[:, k])
        if node_gap < -slack * max(1.0, abs(values[k])):
            raise SolverError(
                f"decomposition cost exceeds the process at node "
                f"{tree.ids[k]!r} by {-node_gap:.3e}"
            )
        for c in ch:
            surplus = float(position @ model.price[:, c]) - values[c]
            consumption[c] = consumption[k] + surplus + node_gap

    return DecompositionResult(
        process=values.copy(),
        strategy=Strategy(holdings),
        consumption=consumption,
    )


def classify_attainability(model: MarketModel, claim: Claim) -> AttainabilityVerdict:
    """Three-way attainability verdict for a claim.

    * ``strongly-regular``: the deflator-weighted expectation is constant
      over the polytope (upper and lower bounds agree within 1e-9) -- the
      claim is replicable and every deflator prices it identically.
    * ``regular-attainable``: the upper bound is attained by a strictly
      positive deflator, found by maximizing a uniform floor over the
      optimal face.
    * ``not-attainable``: the supremum is only approached; the optimal
      boundary point is returned as a witness.
    """
    payoff = _check_claim(model, claim)
    report = require_fair(model)
    interval = superhedge_price(model, claim)
    tol = INTERVAL_TOL * max(1.0, abs(interval.upper), abs(interval.lower))
    if interval.width <= tol:
        return AttainabilityVerdict(
            classification=STRONGLY_REGULAR,
            price=interval.upper,
            interval=interval,
            supporting_deflator=report.witness,
            boundary_witness=None,
        )

    polytope = build_polytope(model)
    n = model.tree.n_nodes
    face_row = np.concatenate([_claim_objective(model, payoff), np.zeros(n + 1)])
    base = polytope.matrix
    n_vars = 2 * n + 1
    rows = np.zeros((base.shape[0] + 1 + n, n_vars))
    rows[: base.shape[0], :n] = base
    rows[base.shape[0], :] = face_row
    rhs = np.concatenate([polytope.rhs, [interval.upper], np.zeros(n)])
    for j in range(n):
        r = base.shape[0] + 1 + j
        rows[r, j] = 1.0
        rows[r, n] = -1.0
        rows[r, n + 1 + j] = -1.0
    objective = np.zeros(n_vars)
    objective[n] = 1.0
    sol = solve_lp(LinearProgram(objective, rows, rhs, 0.0, "max"))

    if sol.status == "optimal" and float(sol.value) > FAIRNESS_THRESHOLD:
        return AttainabilityVerdict(
            classification=REGULAR_ATTAINABLE,
            price=interval.upper,
            interval=interval,
            supporting_deflator=Deflator.for_market(model, sol.x[:n]),
            boundary_witness=None,
        )
    return AttainabilityVerdict(
        classification=NOT_ATTAINABLE,
        price=interval.upper,
        interval=interval,
        supporting_deflator=None,
        boundary_witness=interval.upper_point,
    )


def completeness_via_claims(model: MarketModel, tol: float = INTERVAL_TOL) -> bool:
    """Completeness probed claim by claim: the market is complete exactly
    when every single-leaf payout (scaled by the numeraire, so it is
    dominated by the aggregate portfolio) has a degenerate price interval."""
    require_fair(model)
    tree = model.tree
    for i, leaf in enumerate(tree.leaves):
        payoff = np.zeros(tree.n_leaves)
        payoff[i] = model.numeraire[leaf]
        interval = superhedge_price(model, Claim(payoff))
        if interval.width > tol * max(1.0, abs(interval.upper)):
            return False
    return True
