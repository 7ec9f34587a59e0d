"""The polytope of martingale deflators: fairness, completeness, measures.

A martingale deflator is a strictly positive node process, equal to 1 at
the root, that turns every asset price into a martingale.  Collecting the
one-step martingale constraints over all non-leaf nodes (plus the root
normalization) yields a polytope in node space whose strictly positive
points are exactly the deflators.  A market is *fair* when that polytope
has a strictly positive point; it is *complete* when the point is unique.

Boundary points of the closure are not deflators -- several routines in
:mod:`fairtree.hedging` return them as certificates, always as bare arrays
rather than :class:`Deflator` instances.
"""

from __future__ import annotations

from dataclasses import dataclass
from weakref import WeakKeyDictionary

import numpy as np

from .errors import DeflatorError, SizeGuardError, UnfairMarketError
from .market import MarketModel, check_deflator_values, deflator_values, _frozen
from .optim import LinearProgram, enumerate_vertices, solve_lp

FAIRNESS_THRESHOLD = 1e-10
RANK_RTOL = 1e-10
MEASURE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Deflator:
    """Validated martingale deflator (node-indexed levels, root level 1)."""

    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values))

    @classmethod
    def for_market(cls, model: MarketModel, values, tol: float = 1e-9) -> "Deflator":
        return cls(check_deflator_values(model, values, tol=tol))


@dataclass(frozen=True, eq=False)
class MeasureWeights:
    """Equivalent-measure weights, one strictly positive value per leaf."""

    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "weights", _frozen(self.weights))


@dataclass(frozen=True, eq=False)
class DeflatorPolytope:
    """Equality description ``matrix @ m = rhs`` of the deflator closure.

    Variables are node levels in tree order.  There is one row per
    (non-leaf node, asset) pair -- the one-step martingale constraint --
    plus the root normalization, so ``matrix`` has
    ``n_assets * n_nonleaf + 1`` rows.  Together with ``m >= 0`` the
    feasible set is compact.
    """

    matrix: np.ndarray
    rhs: np.ndarray
    row_labels: tuple[tuple[str, str], ...]

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(self.matrix))
        object.__setattr__(self, "rhs", _frozen(self.rhs))

    @property
    def n_variables(self) -> int:
        return self.matrix.shape[1]

    @property
    def n_rows(self) -> int:
        return self.matrix.shape[0]

    def linear_program(self, objective=None, sense: str = "min") -> LinearProgram:
        if objective is None:
            objective = np.zeros(self.n_variables)
        return LinearProgram(
            objective=np.asarray(objective, dtype=float),
            eq_matrix=self.matrix,
            eq_rhs=self.rhs,
            lower=0.0,
            sense=sense,
        )


@dataclass(frozen=True, eq=False)
class ArbitrageCertificate:
    """One-step arbitrage at a single node: a position with nonpositive
    cost, nonnegative payoff at every child and a strictly positive payoff
    at some child."""

    node: int
    node_id: str
    holdings: np.ndarray
    cost: float
    payoffs: np.ndarray


@dataclass(frozen=True, eq=False)
class FairnessReport:
    """Outcome of :func:`check_fair`.

    ``interior_radius`` is the largest uniform floor under all node levels
    achievable inside the polytope (0 when it is empty).  Markets whose
    radius is positive but at most 1e-10 are reported unfair with the tiny
    radius preserved, never silently rounded either way.
    """

    fair: bool
    witness: Deflator | None
    interior_radius: float
    certificate: ArbitrageCertificate | None


def build_polytope(model: MarketModel) -> DeflatorPolytope:
    """Assemble the martingale-constraint polytope of a market."""
    tree = model.tree
    n = tree.n_nodes
    rows: list[np.ndarray] = []
    labels: list[tuple[str, str]] = []
    for k in range(n):
        ch = list(tree.children[k])
        if not ch:
            continue
        for i in range(model.n_assets):
            row = np.zeros(n)
            row[ch] = tree.branch_prob[ch] * model.price[i, ch]
            row[k] -= model.price[i, k]
            rows.append(row)
            labels.append((tree.ids[k], model.asset_names[i]))
    normalization = np.zeros(n)
    normalization[0] = 1.0
    rows.append(normalization)
    labels.append(("root", "normalization"))
    matrix = np.vstack(rows)
    rhs = np.zeros(len(rows))
    rhs[-1] = 1.0
    return DeflatorPolytope(matrix=matrix, rhs=rhs, row_labels=tuple(labels))


def _local_system(model: MarketModel, node: int):
    """One-step constraint system in the ratio variables at ``node``."""
    ch = list(model.tree.children[node])
    probs = model.tree.branch_prob[ch]
    matrix = model.price[:, ch] * probs[np.newaxis, :]
    rhs = model.price[:, node]
    return ch, probs, matrix, rhs


_LOCAL_VERTEX_CACHE: "WeakKeyDictionary[MarketModel, dict]" = WeakKeyDictionary()


def local_vertices(model: MarketModel, node: int) -> list[np.ndarray]:
    """Vertices of the one-step deflator-ratio polytope at a node.

    Cached per model; these small polytopes are re-scanned by every
    supermartingale check and every oracle sweep, so enumeration pays for
    itself immediately.
    """
    cache = _LOCAL_VERTEX_CACHE.setdefault(model, {})
    try:
        return cache[node]
    except KeyError:
        pass
    _, _, matrix, rhs = _local_system(model, node)
    lp = LinearProgram(np.zeros(matrix.shape[1]), matrix, rhs, 0.0, "min")
    vertices = enumerate_vertices(lp)
    cache[node] = vertices
    return vertices


def polytope_minimizer(model: MarketModel):
    """Build an exact linear-minimization oracle for the deflator closure.

    Fixing a node's level, the admissible child levels form an independent
    one-step polytope whose vertices are known, so the whole constraint set
    factorizes over the tree.  Minimizing a linear cost then takes one
    backward sweep choosing the best local vertex per node and one forward
    sweep rebuilding the levels (nodes at level zero propagate zero).  The
    result matches the LP optimum to solver precision at a fraction of the
    cost, which is what makes it suitable as the dual solver's inner oracle.
    """
    tree = model.tree
    tables: list[tuple[list[int], np.ndarray] | None] = []
    for k in range(tree.n_nodes):
        if tree.is_leaf(k):
            tables.append(None)
            continue
        ch = list(tree.children[k])
        # rows are level ratios m[child]/m[node]; the branch probabilities
        # already live inside the local constraint matrix
        tables.append((ch, np.asarray(local_vertices(model, k))))

    def minimize(cost) -> np.ndarray:
        per_unit = np.asarray(cost, dtype=float).copy()
        best = np.zeros(tree.n_nodes, dtype=int)
        for k in range(tree.n_nodes - 1, -1, -1):
            entry = tables[k]
            if entry is None:
                continue
            ch, ratios = entry
            totals = ratios @ per_unit[ch]
            best[k] = int(np.argmin(totals))
            per_unit[k] += float(totals[best[k]])
        levels = np.zeros(tree.n_nodes)
        levels[0] = 1.0
        for k in range(tree.n_nodes):
            entry = tables[k]
            if entry is None or levels[k] == 0.0:
                continue
            ch, ratios = entry
            levels[ch] = levels[k] * ratios[best[k]]
        return levels

    return minimize


# ---------------------------------------------------------------------------
# fairness
# ---------------------------------------------------------------------------


def _local_interior_radius(model: MarketModel, node: int):
    """Max-min one-step deflator ratio at a node, or None if infeasible."""
    tree = model.tree
    ch = list(tree.children[node])
    k = len(ch)
    # variables: ratios m (k), floor eps, slacks (k)
    n_vars = 2 * k + 1
    rows = np.zeros((model.n_assets + k, n_vars))
    rhs = np.zeros(model.n_assets + k)
    for i in range(model.n_assets):
        rows[i, :k] = tree.branch_prob[ch] * model.price[i, ch]
        rhs[i] = model.price[i, node]
    for j in range(k):
        rows[model.n_assets + j, j] = 1.0
        rows[model.n_assets + j, k] = -1.0
        rows[model.n_assets + j, k + 1 + j] = -1.0
    objective = np.zeros(n_vars)
    objective[k] = 1.0
    sol = solve_lp(LinearProgram(objective, rows, rhs, 0.0, "max"))
    if sol.status != "optimal":
        return None
    return float(sol.value)


def _extract_certificate(model: MarketModel, node: int) -> ArbitrageCertificate | None:
    """Search for a one-step arbitrage position at ``node`` by LP.

    Minimizes the position's cost subject to nonnegative child payoffs
    normalized to sum to one (plus a harmless cost floor that keeps the
    program bounded).  A nonpositive minimum is an arbitrage.
    """
    tree = model.tree
    ch = list(tree.children[node])
    k = len(ch)
    d = model.n_assets
    # variables: holdings (d, free), payoff slacks (k), cost-floor slack
    n_vars = d + k + 1
    rows = np.zeros((k + 2, n_vars))
    rhs = np.zeros(k + 2)
    for j, c in enumerate(ch):
        rows[j, :d] = model.price[:, c]
        rows[j, d + j] = -1.0
    rows[k, :d] = model.price[:, ch].sum(axis=1)
    rhs[k] = 1.0
    rows[k + 1, :d] = model.price[:, node]
    rows[k + 1, d + k] = -1.0
    rhs[k + 1] = -1.0
    objective = np.zeros(n_vars)
    objective[:d] = model.price[:, node]
    lower = np.zeros(n_vars)
    lower[:d] = -np.inf
    sol = solve_lp(LinearProgram(objective, rows, rhs, lower, "min"))
    if sol.status != "optimal" or sol.value > FAIRNESS_THRESHOLD:
        return None
    holdings = sol.x[:d]
    payoffs = holdings @ model.price[:, ch]
    return ArbitrageCertificate(
        node=node,
        node_id=tree.ids[node],
        holdings=holdings,
        cost=float(holdings @ model.price[:, node]),
        payoffs=payoffs,
    )


def _find_certificate(model: MarketModel) -> ArbitrageCertificate | None:
    for node in range(model.tree.n_nodes):
        if model.tree.is_leaf(node):
            continue
        radius = _local_interior_radius(model, node)
        if radius is not None and radius > FAIRNESS_THRESHOLD:
            continue
        certificate = _extract_certificate(model, node)
        if certificate is not None:
            return certificate
    return None


def check_fair(model: MarketModel) -> FairnessReport:
    """Decide fairness by maximizing a uniform floor under the polytope.

    Solves ``max eps`` subject to the martingale constraints and
    ``m[node] >= eps`` for every node.  The market is fair exactly when the
    optimum exceeds 1e-10; the maximizer is returned as a strictly positive
    witness.  When unfair, a one-step arbitrage certificate is assembled
    from a violated node's local program (``None`` in the near-degenerate
    case where every node passes locally but the floor is still tiny).
    """
    polytope = build_polytope(model)
    n = model.tree.n_nodes
    base_rows, base_rhs = polytope.matrix, polytope.rhs
    # variables: levels m (n), floor eps, slacks (n)
    n_vars = 2 * n + 1
    rows = np.zeros((base_rows.shape[0] + n, n_vars))
    rows[: base_rows.shape[0], :n] = base_rows
    rhs = np.concatenate([base_rhs, np.zeros(n)])
    for j in range(n):
        r = base_rows.shape[0] + j
        rows[r, j] = 1.0
        rows[r, n] = -1.0
        rows[r, n + 1 + j] = -1.0
    objective = np.zeros(n_vars)
    objective[n] = 1.0
    sol = solve_lp(LinearProgram(objective, rows, rhs, 0.0, "max"))

    if sol.status != "optimal":
        return FairnessReport(
            fair=False,
            witness=None,
            interior_radius=0.0,
            certificate=_find_certificate(model),
        )
    radius = float(sol.value)
    if radius <= FAIRNESS_THRESHOLD:
        return FairnessReport(
            fair=False,
            witness=None,
            interior_radius=radius,
            certificate=_find_certificate(model),
        )
    witness = Deflator.for_market(model, sol.x[:n])
    return FairnessReport(
        fair=True, witness=witness, interior_radius=radius, certificate=None
    )


_FAIRNESS_CACHE: "WeakKeyDictionary[MarketModel, FairnessReport]" = WeakKeyDictionary()


def fairness_report(model: MarketModel) -> FairnessReport:
    """Cached :func:`check_fair`; models are immutable so this is safe."""
    try:
        return _FAIRNESS_CACHE[model]
    except KeyError:
        report = check_fair(model)
        _FAIRNESS_CACHE[model] = report
        return report


def require_fair(model: MarketModel) -> FairnessReport:
    report = fairness_report(model)
    if not report.fair:
        raise UnfairMarketError(
            f"market admits no martingale deflator "
            f"(interior radius {report.interior_radius:.3e})"
        )
    return report


# ---------------------------------------------------------------------------
# completeness
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CompletenessReport:
    complete: bool
    dimension: int
    #: per non-leaf node: (node id, number of children, local rank)
    local_ranks: tuple = ()


def check_complete(model: MarketModel) -> CompletenessReport:
    """Completeness by local rank: the deflator is unique exactly when at
    every non-leaf node the child-price matrix has rank equal to the number
    of children.  The reported dimension sums the local defects, which is
    the dimension of the deflator family.  Requires a fair market."""
    require_fair(model)
    tree = model.tree
    dimension = 0
    local_ranks = []
    for k in range(tree.n_nodes):
        ch = list(tree.children[k])
        if not ch:
            continue
        block = model.price[:, ch]
        singular = np.linalg.svd(block, compute_uv=False)
        top = float(singular.max(initial=0.0))
        rank = int(np.count_nonzero(singular > RANK_RTOL * max(top, 1e-300)))
        dimension += len(ch) - rank
        local_ranks.append((tree.ids[k], len(ch), rank))
    return CompletenessReport(
        complete=dimension == 0, dimension=dimension, local_ranks=tuple(local_ranks)
    )


# ---------------------------------------------------------------------------
# deflators <-> equivalent measures
# ---------------------------------------------------------------------------


def deflator_to_measure(model: MarketModel, deflator) -> MeasureWeights:
    """Terminal weights of the equivalent measure induced by a deflator.

    The weight of a leaf is its path probability times the deflator level
    times the numeraire level.  Weights sum to one because the deflated
    numeraire is a martingale started at 1.
    """
    m = check_deflator_values(model, deflator)
    leaves = model.tree.leaves
    weights = model.tree.path_prob[leaves] * m[leaves] * model.numeraire[leaves]
    total = float(weights.sum())
    if abs(total - 1.0) > 1e-8:
        raise DeflatorError(
            f"induced measure weights sum to {total!r}; the deflator fails "
            "the aggregate martingale identity"
        )
    return MeasureWeights(weights)


def validate_measure(model: MarketModel, measure: MeasureWeights) -> np.ndarray:
    q = np.asarray(measure.weights, dtype=float)
    if q.shape != (model.tree.n_leaves,):
        raise DeflatorError(
            f"measure needs one weight per leaf, got shape {q.shape}"
        )
    if not np.all(np.isfinite(q)) or np.any(q <= 0):
        raise DeflatorError(
            "measure weights must be strictly positive (equivalent measure)"
        )
    if abs(float(q.sum()) - 1.0) > MEASURE_TOL:
        raise DeflatorError(f"measure weights sum to {float(q.sum())!r}, expected 1")
    return q


def measure_to_deflator(model: MarketModel, measure: MeasureWeights) -> Deflator:
    """Invert :func:`deflator_to_measure`.

    Terminal deflator levels are the measure density over the numeraire;
    interior levels follow from the conditional-expectation identity
    ``m[n] * numeraire[n] = E[m_T * numeraire_T | n]``.
    """
    q = validate_measure(model, measure)
    tree = model.tree
    leaves = tree.leaves
    terminal = q / (tree.path_prob[leaves] * model.numeraire[leaves])
    values = tree.expect_terminal(terminal * model.numeraire[leaves]) / model.numeraire
    return Deflator.for_market(model, values)


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------


def sample_deflators(model: MarketModel, count: int, seed: int) -> list[Deflator]:
    """Draw strictly positive deflators, deterministically under ``seed``.

    Each sample is an even mix of the fairness witness with a random convex
    combination of polytope vertices, so positivity is inherited from the
    witness.  Small polytopes use the full vertex list; past the
    enumeration guard, vertices are found by minimizing random objectives
    over the polytope (every LP optimum is a vertex).  Randomness flows
    through ``numpy.random.default_rng`` (PCG64) only.
    """
    report = require_fair(model)
    witness = report.witness.values
    polytope = build_polytope(model)
    rng = np.random.default_rng(seed)

    vertices: list[np.ndarray] | None
    try:
        vertices = enumerate_vertices(polytope.linear_program())
    except SizeGuardError:
        vertices = None

    samples: list[Deflator] = []
    for _ in range(count):
        if vertices is not None:
            weights = rng.dirichlet(np.ones(len(vertices)))
            mix = weights @ np.asarray(vertices)
        else:
            found = []
            for _ in range(3):
                objective = rng.normal(size=polytope.n_variables)
                sol = solve_lp(polytope.linear_program(objective, "min"))
                if sol.status != "optimal":  # pragma: no cover - compact polytope
                    raise DeflatorError("polytope LP failed during sampling")
                found.append(sol.x)
            weights = rng.dirichlet(np.ones(len(found)))
            mix = weights @ np.asarray(found)
        samples.append(Deflator.for_market(model, 0.5 * witness + 0.5 * mix))
    return samples
