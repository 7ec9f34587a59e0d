"""Bundled example markets.

``load("b1")`` -- a complete one-step binomial market with a call claim.
``load("t1")`` -- an incomplete one-step trinomial market with a digital
and a replicable claim.
"""

from importlib import resources

from ..marketio import ParsedMarket, parse_market_text


def text(name: str) -> str:
    """Raw document text of a bundled market (``"b1"`` or ``"t1"``)."""
    return (resources.files(__package__) / f"{name}.market").read_text("utf-8")


def load(name: str) -> ParsedMarket:
    return parse_market_text(text(name), source=f"fairtree.data/{name}.market")
