"""Brute-force reference implementations for cross-checking the engine.

Everything here trades speed for transparency: suprema are taken over an
explicit vertex list, dual values come from a two-pass grid search, and
completeness is read off the vertex count.  The oracles are exponential-
time and guarded by size limits; they exist so that any engine result on
a small instance can be re-derived by a method with no shared failure
modes (no simplex pivoting, no first-order descent).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SizeGuardError, UnfairMarketError
from .market import Claim, MarketModel, _check_claim
from .deflators import build_polytope
from .optim import enumerate_vertices

DIMENSION_GUARD = 3
_GRID_POINT_GUARD = 50_000_000
_RANK_TOL = 1e-9


@dataclass(frozen=True)
class OracleReport:
    """Side-by-side record of an oracle value and the engine's value.

    Differences are stored exactly as measured -- large disagreements are
    the whole point of keeping the record.
    """

    quantity: str
    oracle_value: float
    engine_value: float

    @property
    def absolute_difference(self) -> float:
        return abs(self.oracle_value - self.engine_value)

    @property
    def relative_difference(self) -> float:
        scale = max(1.0, abs(self.oracle_value), abs(self.engine_value))
        return self.absolute_difference / scale


def compare(quantity: str, oracle_value: float, engine_value: float) -> OracleReport:
    return OracleReport(
        quantity=quantity,
        oracle_value=float(oracle_value),
        engine_value=float(engine_value),
    )


def _polytope_vertices(model: MarketModel) -> np.ndarray:
    polytope = build_polytope(model)
    vertices = enumerate_vertices(polytope.linear_program())
    if not vertices:
        raise UnfairMarketError("the deflator polytope is empty")
    return np.array(vertices)


def oracle_superhedge(model: MarketModel, claim: Claim) -> float:
    """Superhedging price as a maximum over deflator-polytope vertices.

    The objective is linear in the deflator, so its supremum over the
    (bounded) polytope is attained at a vertex; no optimization is run.
    """
    lower, upper = oracle_price_interval(model, claim)
    return upper


def oracle_price_interval(model: MarketModel, claim: Claim) -> tuple[float, float]:
    """Sub- and superhedging prices by vertex enumeration."""
    payoff = _check_claim(model, claim)
    vertices = _polytope_vertices(model)
    leaves = model.tree.leaves
    values = vertices[:, leaves] @ (model.tree.path_prob[leaves] * payoff)
    return float(values.min()), float(values.max())


def oracle_complete(model: MarketModel) -> bool:
    """Completeness by exhaustion: the deflator set is a single point
    exactly when vertex enumeration returns one vertex."""
    return len(_polytope_vertices(model)) == 1


def oracle_dual(model: MarketModel, utility, y: float, density: int = 64) -> float:
    """Dual value by grid search over the deflator polytope.

    The polytope is charted through an orthonormal basis of its affine
    hull (dimension at most ``DIMENSION_GUARD``); the chart's bounding box
    is scanned at ``density`` points per axis, then scanned again at the
    same density inside the cell around the best point.  The effective
    per-axis resolution is therefore about ``density**2 / 2`` -- above
    10^3 for the default -- and the returned value is an upper bound on
    the true minimum that is tight to grid resolution.  Box points outside
    the polytope are discarded; the vertices and centroid are always
    included, so the scan never comes back empty.
    """
    if density < 2:
        raise ValueError(f"grid density must be at least 2, got {density}")
    vertices = _polytope_vertices(model)
    leaves = model.tree.leaves
    weights = model.tree.path_prob[leaves]

    def evaluate(points: np.ndarray) -> np.ndarray:
        feasible = np.all(points >= -1e-12, axis=1)
        vals = utility.conjugate(y * np.clip(points[:, leaves], 0.0, None)) @ weights
        return np.where(feasible, vals, np.inf)

    center = vertices.mean(axis=0)
    spread = vertices - center
    singular = np.linalg.svd(spread, compute_uv=False) if len(vertices) > 1 else np.zeros(1)
    top = float(singular.max(initial=0.0))
    dim = int(np.count_nonzero(singular > _RANK_TOL * max(top, 1e-300)))
    if dim == 0:
        return float(evaluate(vertices[:1])[0])
    if dim > DIMENSION_GUARD:
        raise SizeGuardError(
            f"deflator polytope has dimension {dim}, above the grid-search "
            f"guard {DIMENSION_GUARD}"
        )
    if density**dim > _GRID_POINT_GUARD:
        raise SizeGuardError(
            f"grid of {density}^{dim} points exceeds the evaluation guard"
        )
    basis = np.linalg.svd(spread, full_matrices=False)[2][:dim]
    coords = spread @ basis.T

    def scan(lo: np.ndarray, hi: np.ndarray):
        axes = [np.linspace(lo[i], hi[i], density) for i in range(dim)]
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, dim)
        points = center + mesh @ basis
        vals = evaluate(points)
        best = int(np.argmin(vals))
        return mesh[best], float(vals[best])

    box_lo = coords.min(axis=0)
    box_hi = coords.max(axis=0)
    z1, v1 = scan(box_lo, box_hi)
    cell = (box_hi - box_lo) / (density - 1)
    z2, v2 = scan(np.maximum(z1 - cell, box_lo), np.minimum(z1 + cell, box_hi))
    anchors = evaluate(np.vstack([vertices, center[np.newaxis, :]]))
    return min(v1, v2, float(anchors.min()))
