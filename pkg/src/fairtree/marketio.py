"""Canonical text formats: market files, reports, and CSV flattening.

Markets and reports share one JSON-syntax format family.  Parsing is
strict -- unknown fields, duplicate keys, and schema violations are
rejected with a JSON-path location -- and serialization writes floats
with 17 significant digits, so ``parse(serialize(model))`` reproduces the
model bit for bit.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import MarketFileError, ModelError
from .market import Claim, MarketModel, ScenarioTree, build_market

MARKET_FORMAT = "fairtree-market/1"
REPORT_FORMAT = "fairtree-report/1"


# ---------------------------------------------------------------------------
# JSON emission with explicit float formatting
# ---------------------------------------------------------------------------


def format_float(x: float) -> str:
    """17 significant digits: enough to reproduce any double exactly."""
    if not np.isfinite(x):
        raise ValueError(f"refusing to serialize non-finite number {x!r}")
    return format(float(x), ".17g")


def emit_json(value, indent: int = 2) -> str:
    """Serialize a report-shaped structure (dicts, lists, strings, numbers,
    booleans, None, plus numpy scalars/arrays) as deterministic JSON.

    The standard encoder hardwires ``repr`` for floats; this emitter exists
    to pin the documented 17-significant-digit contract instead.  Dict keys
    keep insertion order.
    """
    out: list[str] = []
    _emit(value, out, indent, 0)
    out.append("\n")
    return "".join(out)


def _emit(value, out: list, indent: int, level: int) -> None:
    pad = " " * (indent * (level + 1))
    close_pad = " " * (indent * level)
    if isinstance(value, np.ndarray):
        value = value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        value = value.item()
    if value is None:
        out.append("null")
    elif isinstance(value, bool):
        out.append("true" if value else "false")
    elif isinstance(value, int):
        out.append(str(value))
    elif isinstance(value, float):
        out.append(format_float(value))
    elif isinstance(value, str):
        out.append(json.dumps(value))
    elif isinstance(value, dict):
        if not value:
            out.append("{}")
            return
        out.append("{\n")
        for i, (key, item) in enumerate(value.items()):
            if not isinstance(key, str):
                raise TypeError(f"JSON object keys must be strings, got {key!r}")
            out.append(f"{pad}{json.dumps(key)}: ")
            _emit(item, out, indent, level + 1)
            out.append(",\n" if i < len(value) - 1 else "\n")
        out.append(f"{close_pad}}}")
    elif isinstance(value, (list, tuple)):
        if not len(value):
            out.append("[]")
            return
        out.append("[\n")
        for i, item in enumerate(value):
            out.append(pad)
            _emit(item, out, indent, level + 1)
            out.append(",\n" if i < len(value) - 1 else "\n")
        out.append(f"{close_pad}]")
    else:
        raise TypeError(f"cannot serialize {type(value).__name__} value {value!r}")


def emit_csv(header, rows) -> str:
    """Flat CSV with the same float formatting as the JSON emitter."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(
            [format_float(cell) if isinstance(cell, float) else cell for cell in row]
        )
    return buffer.getvalue()


def digest_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# market files
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ParsedMarket:
    model: MarketModel
    claims: dict = field(default_factory=dict)
    metadata: dict | None = None
    digest: str = ""
    source: str = "<string>"


def _reject_duplicates(pairs):
    seen = {}
    for key, value in pairs:
        if key in seen:
            raise MarketFileError("$", f"duplicate key {key!r} in object")
        seen[key] = value
    return seen


def _reject_constant(token):
    raise MarketFileError("$", f"non-finite number {token!r} is not allowed")


def _expect_object(value, where: str) -> dict:
    if not isinstance(value, dict):
        raise MarketFileError(where, f"expected an object, got {type(value).__name__}")
    return value


def _expect_number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise MarketFileError(where, f"expected a number, got {value!r}")
    return float(value)


def _expect_string(value, where: str) -> str:
    if not isinstance(value, str):
        raise MarketFileError(where, f"expected a string, got {value!r}")
    return value


def _check_fields(obj: dict, where: str, required, optional=()) -> None:
    for name in required:
        if name not in obj:
            raise MarketFileError(where, f"missing required field {name!r}")
    for name in obj:
        if name not in required and name not in optional:
            raise MarketFileError(f"{where}.{name}", "unknown field")


def parse_market_text(text: str, source: str = "<string>") -> ParsedMarket:
    """Parse a market document; all problems raise :class:`MarketFileError`
    whose location is a JSON path like ``$.assets.stock.n3``."""
    try:
        doc = json.loads(
            text, object_pairs_hook=_reject_duplicates, parse_constant=_reject_constant
        )
    except json.JSONDecodeError as exc:
        raise MarketFileError(
            "$", f"invalid JSON: {exc.msg} (line {exc.lineno} column {exc.colno})"
        ) from None
    doc = _expect_object(doc, "$")
    _check_fields(doc, "$", required=("format", "tree", "assets"),
                  optional=("claims", "metadata"))
    fmt = _expect_string(doc["format"], "$.format")
    if fmt != MARKET_FORMAT:
        raise MarketFileError(
            "$.format", f"unsupported format {fmt!r}; expected {MARKET_FORMAT!r}"
        )

    entries = doc["tree"]
    if not isinstance(entries, list) or not entries:
        raise MarketFileError("$.tree", "expected a non-empty list of nodes")
    nodes = []
    for i, entry in enumerate(entries):
        where = f"$.tree[{i}]"
        entry = _expect_object(entry, where)
        _check_fields(entry, where, required=("id", "parent", "prob"))
        node_id = _expect_string(entry["id"], f"{where}.id")
        parent = entry["parent"]
        if parent is not None:
            parent = _expect_string(parent, f"{where}.parent")
        prob = _expect_number(entry["prob"], f"{where}.prob")
        nodes.append((node_id, parent, prob))
    try:
        tree = ScenarioTree.build(nodes)
    except ModelError as exc:
        raise MarketFileError("$.tree", str(exc)) from None

    assets = _expect_object(doc["assets"], "$.assets")
    if not assets:
        raise MarketFileError("$.assets", "at least one asset is required")
    known = {node_id: k for k, node_id in enumerate(tree.ids)}
    prices = np.zeros((len(assets), tree.n_nodes))
    for a, (name, levels) in enumerate(assets.items()):
        where = f"$.assets.{name}"
        levels = _expect_object(levels, where)
        for node_id, price in levels.items():
            if node_id not in known:
                raise MarketFileError(f"{where}.{node_id}", "unknown node id")
            prices[a, known[node_id]] = _expect_number(price, f"{where}.{node_id}")
        missing = [node_id for node_id in tree.ids if node_id not in levels]
        if missing:
            raise MarketFileError(where, f"no price for node {missing[0]!r}")
    try:
        model = build_market(tree, prices, tuple(assets))
    except ModelError as exc:
        raise MarketFileError("$.assets", str(exc)) from None

    claims: dict = {}
    leaf_ids = {tree.ids[leaf]: j for j, leaf in enumerate(tree.leaves)}
    for name, payoffs in _expect_object(doc.get("claims", {}), "$.claims").items():
        where = f"$.claims.{name}"
        payoffs = _expect_object(payoffs, where)
        values = np.zeros(tree.n_leaves)
        for leaf_id, payoff in payoffs.items():
            if leaf_id not in leaf_ids:
                raise MarketFileError(f"{where}.{leaf_id}", "not a leaf node id")
            values[leaf_ids[leaf_id]] = _expect_number(payoff, f"{where}.{leaf_id}")
        try:
            claims[name] = Claim(values)
        except ModelError as exc:
            raise MarketFileError(where, str(exc)) from None

    metadata = doc.get("metadata")
    if metadata is not None:
        metadata = _expect_object(metadata, "$.metadata")
    return ParsedMarket(
        model=model,
        claims=claims,
        metadata=metadata,
        digest=digest_text(text),
        source=source,
    )


def parse_market(path) -> ParsedMarket:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise MarketFileError(str(path), exc.strerror or str(exc)) from None
    return parse_market_text(text, source=str(path))


def serialize_market(model: MarketModel, claims=None, metadata=None) -> str:
    """Canonical market document; leaf maps list every leaf explicitly."""
    tree = model.tree
    doc = {
        "format": MARKET_FORMAT,
        "tree": [
            {
                "id": tree.ids[k],
                "parent": None if k == 0 else tree.ids[tree.parent[k]],
                "prob": float(tree.branch_prob[k]),
            }
            for k in range(tree.n_nodes)
        ],
        "assets": {
            name: {
                tree.ids[k]: float(model.price[a, k]) for k in range(tree.n_nodes)
            }
            for a, name in enumerate(model.asset_names)
        },
        "claims": {
            name: {
                tree.ids[leaf]: float(claim.payoff[j])
                for j, leaf in enumerate(tree.leaves)
            }
            for name, claim in (claims or {}).items()
        },
    }
    if metadata is not None:
        doc["metadata"] = metadata
    return emit_json(doc)


def markets_identical(a: MarketModel, b: MarketModel) -> bool:
    """Exact structural equality: ids, shape, probabilities, prices, names."""
    return (
        a.tree.ids == b.tree.ids
        and a.asset_names == b.asset_names
        and np.array_equal(a.tree.parent, b.tree.parent)
        and np.array_equal(a.tree.branch_prob, b.tree.branch_prob)
        and np.array_equal(a.price, b.price)
    )
