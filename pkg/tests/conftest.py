"""Shared fixtures and corpus helpers.

The two bundled markets (``b1``, ``t1``) carry the hand-derived numbers
used throughout; ``two_period`` is a small multi-period market built
inline so tests exercise depth > 1 without touching the generator.
Corpus helpers deterministically fan out over a fixed shape table so
every suite sees the same mix of depths, branchings and asset counts.
"""

from __future__ import annotations

from functools import lru_cache

import pytest
from hypothesis import settings

from fairtree import ScenarioTree, build_market, default_claims, generate_market
from fairtree.data import load

settings.register_profile("fairtree", deadline=None, derandomize=True)
settings.load_profile("fairtree")

# depth, branching, assets -- all within the generator guards and small
# enough that every suite that walks a corpus stays well under a minute.
SHAPES = [
    (1, 2, 1),
    (1, 3, 2),
    (2, 2, 2),
    (2, 3, 1),
    (3, 2, 3),
    (2, 2, 3),
    (3, 3, 2),
    (4, 2, 2),
    (2, 3, 3),
    (4, 3, 1),
]


def corpus_shape(i: int) -> tuple[int, int, int]:
    return SHAPES[i % len(SHAPES)]


@lru_cache(maxsize=None)
def fair_corpus(count: int, seed0: int = 1000):
    """``count`` deterministic fair markets cycling through SHAPES."""
    out = []
    for i in range(count):
        depth, branching, assets = corpus_shape(i)
        out.append(
            generate_market(
                seed=seed0 + i, depth=depth, branching=branching, assets=assets
            )
        )
    return out


@lru_cache(maxsize=None)
def arb_corpus(count: int, seed0: int = 1000):
    """The unfair twins of :func:`fair_corpus` (same seeds, same shapes)."""
    out = []
    for i in range(count):
        depth, branching, assets = corpus_shape(i)
        out.append(
            generate_market(
                seed=seed0 + i,
                depth=depth,
                branching=branching,
                assets=assets,
                arbitrage=True,
            )
        )
    return out


def corpus_claim(model, i: int, seed0: int = 1000):
    """The 'random' example claim for corpus entry ``i``."""
    return default_claims(model, seed=seed0 + i)["random"]


@pytest.fixture(scope="session")
def b1():
    return load("b1")


@pytest.fixture(scope="session")
def t1():
    return load("t1")


@pytest.fixture(scope="session")
def b1_model(b1):
    return b1.model


@pytest.fixture(scope="session")
def t1_model(t1):
    return t1.model


@pytest.fixture(scope="session")
def two_period():
    """Two-period recombining-looking (but tree-shaped) market, two assets.

    Bond is constant; the stock doubles or halves each step.  Complete at
    every node (binary branching, two independent assets), so it exercises
    multi-period replication exactly.
    """
    tree = ScenarioTree.build(
        [
            ("r", None, 1.0),
            ("u", "r", 0.5),
            ("d", "r", 0.5),
            ("uu", "u", 0.5),
            ("ud", "u", 0.5),
            ("du", "d", 0.5),
            ("dd", "d", 0.5),
        ]
    )
    prices = [
        [1, 1, 1, 1, 1, 1, 1],
        [1, 2, 0.5, 4, 1, 1, 0.25],
    ]
    return build_market(tree, prices, ("bond", "stock"))
