"""Random market generation, fair by construction.

Child prices at each node are sampled *around* a randomly drawn one-step
deflator: first a strictly positive ratio per child, then raw price shapes
that are rescaled so the ratio prices every asset exactly.  The deflator
built from those ratios certifies fairness of the output, so the generator
never needs a rejection loop.

All randomness flows through ``numpy.random.default_rng`` (the PCG64
generator), whose stream is fixed by the 64-bit seed and stable across
platforms; identical arguments yield identical markets byte for byte.
"""

from __future__ import annotations

import numpy as np

from .errors import SizeGuardError
from .market import Claim, MarketModel, ScenarioTree, build_market

MAX_DEPTH = 6
MAX_BRANCHING = 4
MAX_ASSETS = 5

ARBITRAGE_ASSET = "dominated"
_MARKUP = 0.25


def _check_sizes(depth: int, branching: int, assets: int) -> None:
    if not (1 <= depth <= MAX_DEPTH):
        raise SizeGuardError(f"depth must be in 1..{MAX_DEPTH}, got {depth}")
    if not (1 <= branching <= MAX_BRANCHING):
        raise SizeGuardError(f"branching must be in 1..{MAX_BRANCHING}, got {branching}")
    if not (1 <= assets <= MAX_ASSETS):
        raise SizeGuardError(f"assets must be in 1..{MAX_ASSETS}, got {assets}")


def generate_market(
    seed: int,
    depth: int,
    branching: int,
    assets: int,
    arbitrage: bool = False,
) -> MarketModel:
    """Sample a fair market on the uniform tree of the given shape.

    With ``arbitrage`` set, one extra asset is appended that duplicates the
    first asset's prices everywhere except the root, where it costs 25%
    more: buying the original against it is a one-step arbitrage, so the
    output is unfair by construction.
    """
    _check_sizes(depth, branching, assets)
    rng = np.random.default_rng(seed)

    nodes = [("r", None, 1.0)]
    frontier = ["r"]
    for _ in range(depth):
        next_frontier = []
        for parent in frontier:
            probs = rng.gamma(2.0, 1.0, size=branching)
            probs /= probs.sum()
            for j in range(branching):
                child = f"{parent}{j}"
                nodes.append((child, parent, float(probs[j])))
                next_frontier.append(child)
        frontier = next_frontier
    tree = ScenarioTree.build(nodes)

    price = np.zeros((assets, tree.n_nodes))
    price[:, 0] = rng.uniform(0.5, 2.0, size=assets)
    sigma = 0.2 + 0.15 * np.arange(assets)
    for k in range(tree.n_nodes):
        ch = list(tree.children[k])
        if not ch:
            continue
        probs = tree.branch_prob[ch]
        ratio = rng.lognormal(0.0, 0.35, size=len(ch))
        for a in range(assets):
            shape = rng.lognormal(0.0, sigma[a], size=len(ch))
            price[a, ch] = price[a, k] * shape / ((probs * ratio) @ shape)

    names = [f"asset{a}" for a in range(assets)]
    if arbitrage:
        marked = price[0].copy()
        marked[0] *= 1.0 + _MARKUP
        price = np.vstack([price, marked[np.newaxis, :]])
        names.append(ARBITRAGE_ASSET)
    return build_market(tree, price, tuple(names))


def default_claims(model: MarketModel, seed: int) -> dict:
    """Deterministic example claims for a market: a call on the first asset
    struck at its initial price, a digital on one leaf, the terminal
    aggregate (whose price is pinned by normalization), and a generic
    random payoff."""
    rng = np.random.default_rng(seed)
    tree = model.tree
    terminal = model.price[0, tree.leaves]
    digital = np.zeros(tree.n_leaves)
    digital[int(np.argmax(terminal))] = 1.0
    aggregate = model.price.sum(axis=0)[tree.leaves]
    return {
        "call": Claim(np.maximum(terminal - model.price[0, 0], 0.0)),
        "digital": Claim(digital),
        "aggregate": Claim(aggregate),
        "random": Claim(rng.uniform(0.0, 2.0, size=tree.n_leaves)),
    }
