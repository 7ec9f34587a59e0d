"""Expected-utility maximization by convex duality over the deflator set.

The dual problem minimizes the expected convex conjugate of the utility,
evaluated on scaled terminal deflator levels, over the deflator polytope.
Its minimizer (the minimax deflator) determines the optimal terminal
wealth through the inverse marginal utility, the optimal strategy through
a consumption-free decomposition, and marginal prices of claims.

Both supported utility families -- logarithmic and power -- have scale-
invariant conjugates: rescaling the dual variable rescales the objective
without moving the minimizer.  The primal solver exploits that, computing
the minimizer once and then locating the budget-matching multiplier by
bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from weakref import WeakKeyDictionary

import numpy as np

from .errors import SolverError, SupermartingaleError
from .market import (
    Claim,
    MarketModel,
    Strategy,
    _check_claim,
    build_market,
    check_deflator_values,
    deflator_values,
    fair_price_process,
)
from .deflators import (
    Deflator,
    build_polytope,
    check_fair,
    polytope_minimizer,
    require_fair,
)
from .hedging import optional_decomposition
from .optim import ConvexProblem, minimize_convex

DUAL_GAP_TOL = 1e-9
BUDGET_TOL = 1e-10
CONSUMPTION_TOL = 1e-7
_EXTREME_EXPONENT = 8.0


def _pow(base, exponent: float):
    """Power with a log-space route for extreme exponents, where the naive
    form loses accuracy to over/underflow long before the result does."""
    if abs(exponent) <= _EXTREME_EXPONENT:
        return base ** exponent
    with np.errstate(divide="ignore", over="ignore"):
        return np.exp(exponent * np.log(base))


@dataclass(frozen=True)
class UtilitySpec:
    """Utility on (0, inf) with the pieces duality needs.

    ``kind`` is ``"log"`` (``ln x``) or ``"power"`` (``x**p / p`` with
    exponent ``p < 1``, ``p != 0``).  Marginal utility maps (0, inf) onto
    itself with infinite slope at zero and vanishing slope at infinity, so
    the inverse marginal is globally defined and the conjugate is finite on
    (0, inf).
    """

    kind: str
    exponent: float | None = None

    def __post_init__(self):
        if self.kind == "log":
            if self.exponent is not None:
                raise ValueError("log utility takes no exponent")
        elif self.kind == "power":
            p = self.exponent
            if p is None or not math.isfinite(p) or p >= 1.0 or p == 0.0:
                raise ValueError(
                    f"power utility needs an exponent below 1 and nonzero, got {p!r}"
                )
        else:
            raise ValueError(f"unknown utility kind {self.kind!r}")

    @property
    def label(self) -> str:
        if self.kind == "log":
            return "log"
        return f"power:{self.exponent:g}"

    # -- primal side ------------------------------------------------------

    def utility(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            if self.kind == "log":
                out = np.where(x > 0, np.log(np.where(x > 0, x, 1.0)), -np.inf)
            else:
                p = self.exponent
                out = np.where(x > 0, _pow(np.where(x > 0, x, 1.0), p) / p, -np.inf)
        return float(out) if out.ndim == 0 else out

    def marginal(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            if self.kind == "log":
                out = np.where(x > 0, 1.0 / np.where(x > 0, x, 1.0), np.inf)
            else:
                out = np.where(
                    x > 0, _pow(np.where(x > 0, x, 1.0), self.exponent - 1.0), np.inf
                )
        return float(out) if out.ndim == 0 else out

    # -- dual side --------------------------------------------------------

    def inverse_marginal(self, y):
        y = np.asarray(y, dtype=float)
        with np.errstate(divide="ignore"):
            if self.kind == "log":
                out = np.where(y > 0, 1.0 / np.where(y > 0, y, 1.0), np.inf)
            else:
                a = 1.0 / (self.exponent - 1.0)
                out = np.where(y > 0, _pow(np.where(y > 0, y, 1.0), a), np.inf)
        return float(out) if out.ndim == 0 else out

    def conjugate(self, y):
        """Convex conjugate ``sup_x [U(x) - x y]`` on y > 0.

        For log this is ``-ln y - 1``; for power it is
        ``-((p - 1) / p) * y**(p / (p - 1))``.  Values at ``y <= 0`` are
        ``+inf`` except for negative exponents, whose conjugate extends
        continuously to 0 at the origin (the barrier there is the infinite
        slope, not the value).
        """
        y = np.asarray(y, dtype=float)
        with np.errstate(divide="ignore"):
            if self.kind == "log":
                out = np.where(y > 0, -np.log(np.where(y > 0, y, 1.0)) - 1.0, np.inf)
            else:
                p = self.exponent
                q = p / (p - 1.0)
                safe = _pow(np.where(y > 0, y, 1.0), q)
                out = np.where(y > 0, -((p - 1.0) / p) * safe, np.inf)
                if p < 0:
                    out = np.where(y == 0, 0.0, out)
        return float(out) if out.ndim == 0 else out

    def conjugate_curvature(self, y):
        """Second derivative of the conjugate on y > 0.

        Both families reduce to ``y**(q - 2) / (1 - p)`` with
        ``q = p / (p - 1)`` and ``p = 0`` for log; always positive, so the
        dual objective is strictly convex in the terminal levels.
        """
        y = np.asarray(y, dtype=float)
        p = 0.0 if self.kind == "log" else self.exponent
        q = p / (p - 1.0)
        with np.errstate(divide="ignore"):
            out = np.where(
                y > 0, _pow(np.where(y > 0, y, 1.0), q - 2.0) / (1.0 - p), np.inf
            )
        return float(out) if out.ndim == 0 else out


def log_utility() -> UtilitySpec:
    return UtilitySpec(kind="log")


def power_utility(exponent: float) -> UtilitySpec:
    return UtilitySpec(kind="power", exponent=exponent)


def parse_utility(text: str) -> UtilitySpec:
    """Parse ``"log"`` or ``"power:P"`` (e.g. ``power:0.5``, ``power:-1``)."""
    if text == "log":
        return log_utility()
    if text.startswith("power:"):
        try:
            return power_utility(float(text.split(":", 1)[1]))
        except ValueError as exc:
            raise ValueError(f"bad utility spec {text!r}: {exc}") from None
    raise ValueError(f"bad utility spec {text!r}; expected 'log' or 'power:P'")


# ---------------------------------------------------------------------------
# dual problem
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DualSolution:
    y: float
    deflator: Deflator
    value: float
    gap: float


@dataclass(frozen=True, eq=False)
class PrimalSolution:
    x: float
    y: float
    wealth: np.ndarray
    strategy: Strategy
    value: float
    deflator: Deflator
    budget_residual: float
    max_consumption: float


def _dual_objective(model: MarketModel, utility: UtilitySpec, y: float):
    leaves = model.tree.leaves
    weights = model.tree.path_prob[leaves]

    def objective(m: np.ndarray) -> float:
        return float(weights @ utility.conjugate(y * m[leaves]))

    def gradient(m: np.ndarray) -> np.ndarray:
        out = np.zeros(model.tree.n_nodes)
        out[leaves] = -weights * y * utility.inverse_marginal(y * m[leaves])
        return out

    def curvature(m: np.ndarray) -> np.ndarray:
        out = np.zeros(model.tree.n_nodes)
        out[leaves] = weights * y * y * utility.conjugate_curvature(y * m[leaves])
        return out

    return objective, gradient, curvature


def dual_value(model: MarketModel, utility: UtilitySpec, deflator, y: float) -> float:
    """Expected conjugate of the utility at a given deflator and scale."""
    levels = deflator_values(deflator)
    objective, _, _ = _dual_objective(model, utility, y)
    return objective(levels)


_DUAL_CACHE: "WeakKeyDictionary[MarketModel, dict]" = WeakKeyDictionary()


def solve_dual(
    model: MarketModel,
    utility: UtilitySpec,
    y: float,
    tol: float = DUAL_GAP_TOL,
) -> DualSolution:
    """Minimize the expected conjugate over the deflator polytope.

    Frank-Wolfe starts from the fairness witness (strictly interior); the
    infinite marginal at zero keeps iterates interior, and the final
    duality gap certifies the minimum to within ``tol``.

    Scale invariance makes the minimizer independent of ``y``, so it is
    cached per market and utility; on a hit the certificate is recomputed
    at the requested scale, and a full solve runs only if it no longer
    meets ``tol``.
    """
    if not (y > 0 and math.isfinite(y)):
        raise ValueError(f"dual scale y must be positive and finite, got {y!r}")
    report = require_fair(model)
    objective, gradient, curvature = _dual_objective(model, utility, y)
    oracle = polytope_minimizer(model)

    cache = _DUAL_CACHE.setdefault(model, {})
    key = (utility.kind, utility.exponent)
    cached = cache.get(key)
    if cached is not None:
        grad = gradient(cached)
        gap = float(grad @ (cached - oracle(grad)))
        if gap <= tol:
            return DualSolution(
                y=float(y),
                deflator=Deflator.for_market(model, cached),
                value=objective(cached),
                gap=max(gap, 0.0),
            )

    polytope = build_polytope(model)
    problem = ConvexProblem(
        objective=objective,
        gradient=gradient,
        feasible=polytope.linear_program(),
        oracle=oracle,
        curvature=curvature,
    )
    result = minimize_convex(problem, report.witness.values, tol=tol)
    if not result.converged:
        raise SolverError(
            f"dual solver stalled with gap {result.gap:.3e} after "
            f"{result.iterations} iterations"
        )
    cache[key] = result.x
    return DualSolution(
        y=float(y),
        deflator=Deflator.for_market(model, result.x),
        value=result.value,
        gap=result.gap,
    )


def _expected_budget(model: MarketModel, utility: UtilitySpec, levels: np.ndarray, y: float) -> float:
    leaves = model.tree.leaves
    weights = model.tree.path_prob[leaves]
    terminal = levels[leaves]
    return float(weights @ (terminal * utility.inverse_marginal(y * terminal)))


def _bisect_budget(model, utility, levels, target: float) -> float:
    """Find the multiplier matching the budget by bracketed bisection.

    The budget is continuous and strictly decreasing in the multiplier,
    from +inf at 0+ to 0 at +inf, so a root always exists and doubling or
    halving from 1 finds a bracket quickly.
    """
    lo = hi = 1.0
    g = _expected_budget(model, utility, levels, 1.0) - target
    if g > 0:
        for _ in range(200):
            hi *= 2.0
            if _expected_budget(model, utility, levels, hi) - target <= 0:
                break
        else:
            raise SolverError("budget bisection failed to bracket from above")
    elif g < 0:
        for _ in range(200):
            lo *= 0.5
            if _expected_budget(model, utility, levels, lo) - target >= 0:
                break
        else:
            raise SolverError("budget bisection failed to bracket from below")
    else:
        return 1.0
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if _expected_budget(model, utility, levels, mid) - target > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _wealth_from_terminal(model: MarketModel, levels: np.ndarray, terminal: np.ndarray) -> np.ndarray:
    weighted = model.tree.expect_terminal(levels[model.tree.leaves] * terminal)
    return weighted / levels


def solve_primal(model: MarketModel, utility: UtilitySpec, x: float) -> PrimalSolution:
    """Maximize expected terminal utility from initial wealth ``x``.

    Solves the dual once (the minimizer does not depend on the scale for
    the supported utility families), bisects the multiplier until the
    candidate wealth ``I(y * m)`` prices back to ``x``, and extracts the
    strategy from a decomposition of the wealth process, which must carry
    essentially no consumption.
    """
    if not (x > 0 and math.isfinite(x)):
        raise ValueError(f"initial wealth must be positive and finite, got {x!r}")
    # Tight dual gap: the strategy extraction below needs the wealth process
    # to pass the supermartingale test with room to spare.
    dual = solve_dual(model, utility, 1.0, tol=1e-11)
    levels = dual.deflator.values
    y = _bisect_budget(model, utility, levels, x)
    terminal = utility.inverse_marginal(y * levels[model.tree.leaves])
    wealth = _wealth_from_terminal(model, levels, terminal)
    budget_residual = abs(wealth[0] - x)
    if budget_residual > BUDGET_TOL * max(1.0, abs(x)) * 100:
        raise SolverError(f"budget residual {budget_residual:.3e} after bisection")

    decomposition = optional_decomposition(model, wealth, slack=CONSUMPTION_TOL)
    max_consumption = float(decomposition.consumption.max(initial=0.0))
    if max_consumption > CONSUMPTION_TOL:
        raise SolverError(
            f"optimal wealth is not self-financing: consumption "
            f"{max_consumption:.3e}"
        )
    weights = model.tree.path_prob[model.tree.leaves]
    value = float(weights @ utility.utility(terminal))
    return PrimalSolution(
        x=float(x),
        y=float(y),
        wealth=wealth,
        strategy=decomposition.strategy,
        value=value,
        deflator=dual.deflator,
        budget_residual=budget_residual,
        max_consumption=max_consumption,
    )


# ---------------------------------------------------------------------------
# value functions, minimax verification, marginal pricing
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ValueFunctions:
    wealth_grid: np.ndarray
    scale_grid: np.ndarray
    primal_values: np.ndarray
    dual_values: np.ndarray
    primal_conjugacy_residuals: np.ndarray
    dual_conjugacy_residuals: np.ndarray


def value_functions(model: MarketModel, utility: UtilitySpec, wealth_grid, scale_grid) -> ValueFunctions:
    """Tabulate both value functions and their conjugacy residuals.

    The dual value at each scale should equal ``max_x [u(x) - x y]`` and
    the primal value ``min_y [v(y) + x y]``; residuals are measured against
    the grid, so they shrink with grid resolution rather than to zero.
    """
    xs = np.asarray(wealth_grid, dtype=float)
    ys = np.asarray(scale_grid, dtype=float)
    u = np.array([solve_primal(model, utility, x).value for x in xs])
    v = np.array([solve_dual(model, utility, y).value for y in ys])
    dual_res = np.array(
        [abs(v[j] - np.max(u - xs * ys[j])) for j in range(len(ys))]
    )
    primal_res = np.array(
        [abs(u[i] - np.min(v + xs[i] * ys)) for i in range(len(xs))]
    )
    return ValueFunctions(
        wealth_grid=xs,
        scale_grid=ys,
        primal_values=u,
        dual_values=v,
        primal_conjugacy_residuals=primal_res,
        dual_conjugacy_residuals=dual_res,
    )


@dataclass(frozen=True, eq=False)
class MinimaxReport:
    minimax: bool
    reason: str
    y: float | None = None
    wealth: np.ndarray | None = None


def verify_minimax(
    model: MarketModel, utility: UtilitySpec, candidate, x: float
) -> MinimaxReport:
    """Decide whether a deflator is the minimax deflator for wealth ``x``.

    The candidate passes exactly when the wealth process built from it --
    inverse marginal of the scaled terminal levels, priced backward by the
    candidate itself -- is supportable: the budget matches ``x`` and the
    process decomposes with essentially zero consumption.  Any failure of
    the supermartingale precondition counts as "not supportable", since the
    candidate's wealth then cannot come from an admissible strategy.
    """
    deflator = candidate if isinstance(candidate, Deflator) else Deflator.for_market(model, candidate)
    levels = deflator.values
    y = _bisect_budget(model, utility, levels, x)
    terminal = utility.inverse_marginal(y * levels[model.tree.leaves])
    wealth = _wealth_from_terminal(model, levels, terminal)
    budget_residual = abs(wealth[0] - x)
    if budget_residual > 1e-8 * max(1.0, abs(x)):
        return MinimaxReport(False, f"budget residual {budget_residual:.3e}", y, wealth)
    try:
        decomposition = optional_decomposition(model, wealth, slack=CONSUMPTION_TOL)
    except SupermartingaleError as exc:
        return MinimaxReport(
            False,
            f"candidate wealth fails the supermartingale test at node "
            f"{exc.node_id!r} (excess {exc.excess:.3e})",
            y,
            wealth,
        )
    max_consumption = float(decomposition.consumption.max(initial=0.0))
    if max_consumption > CONSUMPTION_TOL:
        return MinimaxReport(
            False, f"consumption {max_consumption:.3e} above tolerance", y, wealth
        )
    weights = model.tree.path_prob[model.tree.leaves]
    value = float(weights @ utility.utility(terminal))
    reference = solve_primal(model, utility, x).value
    if abs(value - reference) > 1e-7 * max(1.0, abs(reference)):
        raise SolverError(
            f"supportable candidate disagrees with the primal value: "
            f"{value!r} vs {reference!r}"
        )
    return MinimaxReport(True, "supportable", y, wealth)


@dataclass(frozen=True)
class DavisPrice:
    price: float
    residual: float


def davis_price(model: MarketModel, utility: UtilitySpec, x: float, claim: Claim) -> DavisPrice:
    """Marginal utility-indifference price of a claim.

    Computed two ways -- marginal utility of optimal terminal wealth scaled
    by the wealth multiplier, and directly under the minimax deflator --
    and returned with the cross-route residual.
    """
    payoff = _check_claim(model, claim)
    primal = solve_primal(model, utility, x)
    weights = model.tree.path_prob[model.tree.leaves]
    terminal = primal.wealth[model.tree.leaves]
    via_marginal = float(weights @ (utility.marginal(terminal) * payoff)) / primal.y
    via_deflator = float(weights @ (primal.deflator.values[model.tree.leaves] * payoff))
    return DavisPrice(price=via_deflator, residual=abs(via_marginal - via_deflator))


def _max_martingale_defect(model: MarketModel, levels: np.ndarray) -> float:
    tree = model.tree
    worst = 0.0
    for k in range(tree.n_nodes):
        ch = list(tree.children[k])
        if not ch:
            continue
        lhs = model.price[:, ch] @ (tree.branch_prob[ch] * levels[ch])
        rhs = levels[k] * model.price[:, k]
        scale = np.maximum(1.0, np.abs(rhs))
        worst = max(worst, float(np.max(np.abs(lhs - rhs) / scale)))
    return worst


@dataclass(frozen=True, eq=False)
class AugmentationDiagnostics:
    fair: bool
    interior_radius: float
    deflator_residual: float
    dual_value_shift: float
    deflator_shift: float
    primal_value_shift: float


def augment_market(
    model: MarketModel,
    utility: UtilitySpec,
    x: float,
    claim: Claim,
    name: str = "derivative",
):
    """Add a claim at its minimax-deflator price process as a new asset.

    Pricing the claim this way keeps the original minimax deflator a
    deflator of the enlarged market, so fairness, the dual value and the
    optimal investment are all unchanged; the diagnostics quantify exactly
    that on the result.  The claim must not be identically zero (assets
    need positive root prices).
    """
    primal = solve_primal(model, utility, x)
    levels = primal.deflator.values
    prices = fair_price_process(model, primal.deflator, claim)
    stacked = np.vstack([model.price, prices[np.newaxis, :]])
    if name in model.asset_names:
        name = f"{name}-augmented"
    augmented = build_market(model.tree, stacked, model.asset_names + (name,))

    report = check_fair(augmented)
    check_deflator_values(augmented, levels)
    residual = _max_martingale_defect(augmented, levels)
    dual_after = solve_dual(augmented, utility, primal.y)
    objective, _, _ = _dual_objective(model, utility, primal.y)
    dual_before_value = objective(levels)
    primal_after = solve_primal(augmented, utility, x)
    diagnostics = AugmentationDiagnostics(
        fair=report.fair,
        interior_radius=report.interior_radius,
        deflator_residual=residual,
        dual_value_shift=abs(dual_after.value - dual_before_value),
        deflator_shift=float(np.abs(dual_after.deflator.values - levels).max()),
        primal_value_shift=abs(primal_after.value - primal.value),
    )
    return augmented, diagnostics


def growth_optimal(model: MarketModel, x: float) -> PrimalSolution:
    """Log-optimal investment; its wealth is ``x`` over the minimax deflator,
    so the product of wealth and deflator is constant along the tree."""
    primal = solve_primal(model, log_utility(), x)
    product = primal.wealth * primal.deflator.values
    drift = float(np.abs(product - x).max())
    if drift > 1e-8 * max(1.0, abs(x)):
        raise SolverError(
            f"growth-optimal identity violated: max |wealth * deflator - x| "
            f"= {drift:.3e}"
        )
    return primal
