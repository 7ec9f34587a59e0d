"""Command-line interface.

Every command reads a market document, prints a machine-readable report
to standard output (JSON by default, flat CSV with ``--format csv``) and
exits 0 on success, 1 on a domain verdict (unfair market, infeasible
process), 2 on usage or input errors, and 3 on internal errors --
including any ``--verify`` cross-check that disagrees with the engine.
"""

from __future__ import annotations

import argparse
import json
import sys
import traceback

import numpy as np

from . import oracle
from .errors import (
    FairtreeError,
    MarketFileError,
    ModelError,
    SizeGuardError,
    SupermartingaleError,
    UnfairMarketError,
)
from .market import Claim, MarketModel, check_deflator_values, fair_price_process
from .deflators import FAIRNESS_THRESHOLD, check_complete, check_fair, fairness_report
from .hedging import (
    classify_attainability,
    optional_decomposition,
    superhedge_price,
    superhedge_process,
)
from .utility import (
    augment_market,
    davis_price,
    dual_value,
    parse_utility,
    solve_dual,
    solve_primal,
)
from .generate import default_claims, generate_market
from .marketio import (
    REPORT_FORMAT,
    ParsedMarket,
    digest_text,
    emit_csv,
    emit_json,
    parse_market,
    serialize_market,
)

EXIT_OK = 0
EXIT_VERDICT = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3


class VerifyError(Exception):
    """An oracle cross-check disagreed with the engine."""


# ---------------------------------------------------------------------------
# report plumbing
# ---------------------------------------------------------------------------


def _node_map(model: MarketModel, values) -> dict:
    return {model.tree.ids[k]: float(values[k]) for k in range(model.tree.n_nodes)}


def _strategy_map(model: MarketModel, holdings) -> dict:
    out = {}
    for k in range(model.tree.n_nodes):
        if model.tree.is_leaf(k):
            continue
        out[model.tree.ids[k]] = {
            name: float(holdings[a, k]) for a, name in enumerate(model.asset_names)
        }
    return out


def _base_report(command: str, parsed: ParsedMarket, tolerances: dict) -> dict:
    return {
        "format": REPORT_FORMAT,
        "command": command,
        "inputs": {"path": parsed.source, "sha256": parsed.digest},
        "tolerances": tolerances,
    }


def _print_report(args, report: dict, header=None, rows=None) -> None:
    if args.format == "csv" and header is not None:
        sys.stdout.write(emit_csv(header, rows))
    else:
        sys.stdout.write(emit_json(report))


def _verdict(args, command: str, parsed: ParsedMarket, kind: str, message: str) -> int:
    report = _base_report(command, parsed, {})
    report["verdict"] = kind
    report["message"] = message
    _print_report(args, report, header=["verdict", "message"], rows=[[kind, message]])
    print(f"fairtree {command}: {message}", file=sys.stderr)
    return EXIT_VERDICT


def _check(condition: bool, message: str) -> None:
    if not condition:
        raise VerifyError(message)


def _oracle_entry(report: oracle.OracleReport, bound: float) -> dict:
    _check(
        report.absolute_difference <= bound,
        f"{report.quantity}: oracle {report.oracle_value!r} vs engine "
        f"{report.engine_value!r} differ by {report.absolute_difference:.3e} "
        f"(bound {bound:g})",
    )
    return {
        "oracle": report.oracle_value,
        "engine": report.engine_value,
        "difference": report.absolute_difference,
        "bound": bound,
    }


def _load_market(args) -> ParsedMarket:
    return parse_market(args.market)


def _pick_claim(parsed: ParsedMarket, name: str) -> Claim:
    if name not in parsed.claims:
        available = ", ".join(sorted(parsed.claims)) or "none"
        raise MarketFileError(
            "$.claims", f"no claim named {name!r} (available: {available})"
        )
    return parsed.claims[name]


def _pick_deflator(model: MarketModel, choice: str):
    if choice == "witness":
        return fairness_report(model).witness, "witness"
    if choice.startswith("minimax:"):
        utility = parse_utility(choice.split(":", 1)[1])
        return solve_dual(model, utility, 1.0).deflator, f"minimax ({utility.label})"
    raise ValueError(
        f"bad deflator choice {choice!r}; expected 'witness' or 'minimax:UTILITY'"
    )


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _cmd_validate(args) -> int:
    parsed = _load_market(args)
    model, tree = parsed.model, parsed.model.tree
    report = _base_report("validate", parsed, {})
    report.update(
        valid=True,
        nodes=tree.n_nodes,
        leaves=tree.n_leaves,
        horizon=tree.horizon,
        assets=list(model.asset_names),
        claims=sorted(parsed.claims),
    )
    if args.verify:
        from .marketio import markets_identical, parse_market_text

        round_trip = parse_market_text(serialize_market(model, parsed.claims))
        _check(markets_identical(model, round_trip.model), "serialization round trip")
        report["verify"] = {"round_trip": "ok"}
    header = ["node", "parent", "prob", "time"] + list(model.asset_names)
    rows = [
        [tree.ids[k], "" if k == 0 else tree.ids[tree.parent[k]],
         float(tree.branch_prob[k]), tree.time[k]]
        + [float(model.price[a, k]) for a in range(model.n_assets)]
        for k in range(tree.n_nodes)
    ]
    _print_report(args, report, header, rows)
    return EXIT_OK


def _cmd_fair(args) -> int:
    parsed = _load_market(args)
    model = parsed.model
    threshold = args.tolerance if args.tolerance is not None else FAIRNESS_THRESHOLD
    result = check_fair(model)
    # A custom threshold can only tighten the verdict: a fair market whose
    # interior radius sits below it is reclassified, never the other way.
    fair = result.fair and result.interior_radius > threshold
    report = _base_report("fair", parsed, {"fairness_threshold": threshold})
    report["fair"] = fair
    report["interior_radius"] = result.interior_radius
    if fair:
        report["witness"] = _node_map(model, result.witness.values)
        header = ["node", "witness"]
        rows = [[node, value] for node, value in report["witness"].items()]
    elif result.certificate is not None:
        cert = result.certificate
        children = model.tree.children[cert.node]
        report["certificate"] = {
            "node": cert.node_id,
            "cost": cert.cost,
            "holdings": {
                name: float(cert.holdings[a])
                for a, name in enumerate(model.asset_names)
            },
            "payoffs": {
                model.tree.ids[c]: float(cert.payoffs[j])
                for j, c in enumerate(children)
            },
        }
        header = ["node", "asset", "holding"]
        rows = [
            [cert.node_id, name, float(cert.holdings[a])]
            for a, name in enumerate(model.asset_names)
        ]
    else:
        report["certificate"] = None
        header = ["node", "witness"]
        rows = []
    if args.verify:
        if fair:
            check_deflator_values(model, result.witness.values)
            report["verify"] = {"witness": "valid deflator"}
        elif result.certificate is not None:
            cert = result.certificate
            children = list(model.tree.children[cert.node])
            payoffs = cert.holdings @ model.price[:, children]
            cost = float(cert.holdings @ model.price[:, cert.node])
            _check(cost <= 1e-9, f"certificate cost {cost!r} is positive")
            _check(float(payoffs.min()) >= -1e-9, "certificate payoff is negative")
            _check(float(payoffs.max()) > 1e-10, "certificate payoffs are all zero")
            report["verify"] = {"certificate": "valid one-step arbitrage"}
        elif result.fair:
            # Reclassified only by a custom threshold; there is no
            # arbitrage to certify.
            report["verify"] = {"certificate": "none at this threshold"}
        else:
            raise VerifyError("unfair verdict without a certificate")
    _print_report(args, report, header, rows)
    return EXIT_OK if fair else EXIT_VERDICT


def _cmd_complete(args) -> int:
    parsed = _load_market(args)
    model = parsed.model
    result = check_complete(model)
    report = _base_report("complete", parsed, {})
    report["complete"] = result.complete
    report["dimension"] = result.dimension
    report["local_ranks"] = [
        {"node": node, "children": children, "rank": rank}
        for node, children, rank in result.local_ranks
    ]
    if args.verify:
        try:
            entry = oracle.oracle_complete(model)
        except SizeGuardError as exc:
            report["verify"] = {"vertex_count": f"skipped ({exc})"}
        else:
            _check(
                entry == result.complete,
                f"completeness: oracle {entry} vs engine {result.complete}",
            )
            report["verify"] = {"vertex_count": "agrees"}
    header = ["node", "children", "rank", "defect"]
    rows = [
        [node, children, rank, children - rank]
        for node, children, rank in result.local_ranks
    ]
    _print_report(args, report, header, rows)
    return EXIT_OK


def _cmd_superhedge(args) -> int:
    parsed = _load_market(args)
    model = parsed.model
    claim = _pick_claim(parsed, args.claim)
    verdict = classify_attainability(model, claim)
    interval = verdict.interval
    dp = superhedge_process(model, claim)
    agreement = abs(float(dp[0]) - interval.upper)
    tolerance = args.tolerance if args.tolerance is not None else 1e-8
    report = _base_report("superhedge", parsed, {"oracle_agreement": tolerance})
    report.update(
        claim=args.claim,
        lower=interval.lower,
        upper=interval.upper,
        width=interval.width,
        classification=verdict.classification,
        dp_upper=float(dp[0]),
        dp_agreement=agreement,
    )
    if verdict.price is not None:
        report["price"] = verdict.price
    report["supporting_deflator"] = (
        None
        if verdict.supporting_deflator is None
        else _node_map(model, verdict.supporting_deflator.values)
    )
    report["boundary_witness"] = (
        None
        if verdict.boundary_witness is None
        else _node_map(model, verdict.boundary_witness)
    )
    if args.verify:
        verify = {}
        _check(agreement <= 1e-8, f"DP and LP superhedge differ by {agreement:.3e}")
        verify["dp_vs_lp"] = agreement
        try:
            lo, hi = oracle.oracle_price_interval(model, claim)
        except SizeGuardError as exc:
            verify["vertex_interval"] = f"skipped ({exc})"
        else:
            bound = max(tolerance, 1e-8)
            verify["upper"] = _oracle_entry(
                oracle.compare("superhedge upper", hi, interval.upper), bound
            )
            verify["lower"] = _oracle_entry(
                oracle.compare("superhedge lower", lo, interval.lower), bound
            )
        report["verify"] = verify
    header = ["node", "dp_value", "lower_deflator", "upper_deflator", "lower", "upper"]
    rows = [
        [
            model.tree.ids[k],
            float(dp[k]),
            float(interval.lower_point[k]),
            float(interval.upper_point[k]),
            interval.lower,
            interval.upper,
        ]
        for k in range(model.tree.n_nodes)
    ]
    _print_report(args, report, header, rows)
    return EXIT_OK


def _cmd_decompose(args) -> int:
    parsed = _load_market(args)
    model = parsed.model
    claim = _pick_claim(parsed, args.claim)
    process = superhedge_process(model, claim)
    result = optional_decomposition(model, process)
    report = _base_report("decompose", parsed, {})
    report.update(
        claim=args.claim,
        initial=float(process[0]),
        process=_node_map(model, result.process),
        strategy=_strategy_map(model, result.strategy.holdings),
        consumption=_node_map(model, result.consumption),
    )
    if args.verify:
        tree = model.tree
        holdings = result.strategy.holdings
        for k in range(1, tree.n_nodes):
            p = tree.parent[k]
            gain = float(holdings[:, p] @ (model.price[:, k] - model.price[:, p]))
            drop = float(result.consumption[k] - result.consumption[p])
            identity = result.process[k] - result.process[p] - gain + drop
            _check(
                abs(identity) <= 1e-7,
                f"decomposition identity fails at node {tree.ids[k]!r} "
                f"by {identity:.3e}",
            )
            _check(drop >= -1e-9, f"consumption decreases at node {tree.ids[k]!r}")
        payoff = claim.payoff
        slack = result.process[tree.leaves] - payoff
        _check(float(slack.min()) >= -1e-9, "terminal value fails to dominate claim")
        report["verify"] = {
            "consumption_monotone": "ok",
            "terminal_domination": float(slack.min()),
        }
    header = ["node", "value", "consumption"] + [
        f"holding:{name}" for name in model.asset_names
    ]
    rows = []
    for k in range(model.tree.n_nodes):
        row = [
            model.tree.ids[k],
            float(result.process[k]),
            float(result.consumption[k]),
        ]
        if model.tree.is_leaf(k):
            row += [""] * model.n_assets
        else:
            row += [float(result.strategy.holdings[a, k]) for a in range(model.n_assets)]
        rows.append(row)
    _print_report(args, report, header, rows)
    return EXIT_OK


def _cmd_optimize(args) -> int:
    parsed = _load_market(args)
    model = parsed.model
    utility = parse_utility(args.utility)
    primal = solve_primal(model, utility, args.wealth)
    v = dual_value(model, utility, primal.deflator, primal.y)
    conjugacy_gap = abs(primal.value - (v + primal.x * primal.y))
    tolerance = args.tolerance if args.tolerance is not None else 1e-4
    report = _base_report("optimize", parsed, {"oracle_agreement": tolerance})
    report.update(
        utility=utility.label,
        wealth=primal.x,
        multiplier=primal.y,
        value=primal.value,
        dual_value=v,
        conjugacy_gap=conjugacy_gap,
        budget_residual=primal.budget_residual,
        max_consumption=primal.max_consumption,
        deflator=_node_map(model, primal.deflator.values),
        wealth_process=_node_map(model, primal.wealth),
        strategy=_strategy_map(model, primal.strategy.holdings),
    )
    if args.verify:
        verify = {}
        _check(conjugacy_gap <= 1e-6, f"conjugacy gap {conjugacy_gap:.3e}")
        _check(
            primal.budget_residual <= 1e-8 * max(1.0, primal.x),
            f"budget residual {primal.budget_residual:.3e}",
        )
        verify["conjugacy_gap"] = conjugacy_gap
        try:
            grid = oracle.oracle_dual(model, utility, primal.y)
        except SizeGuardError as exc:
            verify["grid_dual"] = f"skipped ({exc})"
        else:
            verify["grid_dual"] = _oracle_entry(
                oracle.compare("dual value", grid, v), max(tolerance, 1e-4)
            )
        report["verify"] = verify
    header = ["node", "wealth", "deflator"] + [
        f"holding:{name}" for name in model.asset_names
    ]
    rows = []
    for k in range(model.tree.n_nodes):
        row = [
            model.tree.ids[k],
            float(primal.wealth[k]),
            float(primal.deflator.values[k]),
        ]
        if model.tree.is_leaf(k):
            row += [""] * model.n_assets
        else:
            row += [float(primal.strategy.holdings[a, k]) for a in range(model.n_assets)]
        rows.append(row)
    _print_report(args, report, header, rows)
    return EXIT_OK


def _cmd_davis(args) -> int:
    parsed = _load_market(args)
    model = parsed.model
    utility = parse_utility(args.utility)
    claim = _pick_claim(parsed, args.claim)
    result = davis_price(model, utility, args.wealth, claim)
    interval = superhedge_price(model, claim)
    tolerance = args.tolerance if args.tolerance is not None else 1e-9
    contained = (
        interval.lower - 1e-9 <= result.price <= interval.upper + 1e-9
    )
    report = _base_report("davis", parsed, {"cross_route": tolerance})
    report.update(
        claim=args.claim,
        utility=utility.label,
        wealth=args.wealth,
        price=result.price,
        cross_route_residual=result.residual,
        lower=interval.lower,
        upper=interval.upper,
        contained=contained,
    )
    if args.verify:
        _check(
            result.residual <= max(tolerance, 1e-9),
            f"marginal-utility and deflator prices differ by {result.residual:.3e}",
        )
        _check(contained, "price escapes the superhedge interval")
        report["verify"] = {"cross_route_residual": result.residual}
    header = ["price", "cross_route_residual", "lower", "upper"]
    rows = [[result.price, result.residual, interval.lower, interval.upper]]
    _print_report(args, report, header, rows)
    return EXIT_OK


def _cmd_augment(args) -> int:
    parsed = _load_market(args)
    model = parsed.model
    utility = parse_utility(args.utility)
    claim = _pick_claim(parsed, args.claim)
    augmented, diagnostics = augment_market(
        model, utility, args.wealth, claim, name=args.asset_name
    )
    tolerance = args.tolerance if args.tolerance is not None else 1e-7
    document = json.loads(serialize_market(augmented, parsed.claims))
    report = _base_report("augment", parsed, {"invariance": tolerance})
    report.update(
        claim=args.claim,
        utility=utility.label,
        wealth=args.wealth,
        diagnostics={
            "fair": diagnostics.fair,
            "interior_radius": diagnostics.interior_radius,
            "deflator_residual": diagnostics.deflator_residual,
            "dual_value_shift": diagnostics.dual_value_shift,
            "deflator_shift": diagnostics.deflator_shift,
            "primal_value_shift": diagnostics.primal_value_shift,
        },
        market=document,
    )
    if args.verify:
        bound = max(tolerance, 1e-7)
        _check(diagnostics.fair, "augmented market is not fair")
        _check(
            diagnostics.dual_value_shift <= bound,
            f"dual value moved by {diagnostics.dual_value_shift:.3e}",
        )
        _check(
            diagnostics.deflator_shift <= bound,
            f"minimax deflator moved by {diagnostics.deflator_shift:.3e}",
        )
        _check(
            diagnostics.primal_value_shift <= bound,
            f"optimal utility moved by {diagnostics.primal_value_shift:.3e}",
        )
        report["verify"] = {"invariance": "ok"}
    header = ["node"] + list(augmented.asset_names)
    rows = [
        [augmented.tree.ids[k]]
        + [float(augmented.price[a, k]) for a in range(augmented.n_assets)]
        for k in range(augmented.tree.n_nodes)
    ]
    _print_report(args, report, header, rows)
    return EXIT_OK


def _cmd_price_process(args) -> int:
    parsed = _load_market(args)
    model = parsed.model
    claim = _pick_claim(parsed, args.claim)
    deflator, label = _pick_deflator(model, args.deflator)
    prices = fair_price_process(model, deflator, claim)
    report = _base_report("price-process", parsed, {})
    report.update(
        claim=args.claim,
        deflator_choice=label,
        initial=float(prices[0]),
        prices=_node_map(model, prices),
        deflator=_node_map(model, deflator.values),
    )
    if args.verify:
        tree = model.tree
        payoff = claim.payoff
        terminal_gap = float(np.abs(prices[tree.leaves] - payoff).max())
        _check(
            terminal_gap <= 1e-10 * max(1.0, float(np.abs(payoff).max())),
            f"terminal prices differ from the payoff by {terminal_gap:.3e}",
        )
        worst = 0.0
        m = deflator.values
        for k in range(tree.n_nodes):
            ch = list(tree.children[k])
            if not ch:
                continue
            lhs = float((tree.branch_prob[ch] * m[ch]) @ prices[ch])
            worst = max(worst, abs(lhs - m[k] * prices[k]))
        _check(worst <= 1e-9, f"deflated price is not a martingale ({worst:.3e})")
        report["verify"] = {"terminal_gap": terminal_gap, "martingale_defect": worst}
    header = ["node", "price", "deflator"]
    rows = [
        [model.tree.ids[k], float(prices[k]), float(deflator.values[k])]
        for k in range(model.tree.n_nodes)
    ]
    _print_report(args, report, header, rows)
    return EXIT_OK


def _cmd_generate(args) -> int:
    model = generate_market(
        args.seed, args.depth, args.branching, args.assets, arbitrage=args.arb
    )
    claims = default_claims(model, args.seed)
    metadata = {
        "generator": "pcg64",
        "seed": args.seed,
        "depth": args.depth,
        "branching": args.branching,
        "assets": args.assets,
        "arbitrage": args.arb,
    }
    document = serialize_market(model, claims, metadata)
    if args.verify:
        verdict = check_fair(model)
        _check(
            verdict.fair != args.arb,
            f"generated market fairness {verdict.fair} contradicts arb={args.arb}",
        )
    if args.format == "csv":
        tree = model.tree
        header = ["node", "parent", "prob", "time"] + list(model.asset_names)
        rows = [
            [tree.ids[k], "" if k == 0 else tree.ids[tree.parent[k]],
             float(tree.branch_prob[k]), tree.time[k]]
            + [float(model.price[a, k]) for a in range(model.n_assets)]
            for k in range(tree.n_nodes)
        ]
        sys.stdout.write(emit_csv(header, rows))
    else:
        sys.stdout.write(document)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing and dispatch
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fairtree",
        description="Fairness, superhedging and optimal investment on scenario trees.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--tolerance", type=float, default=None,
        help="override the command's decision/verification tolerance",
    )
    common.add_argument(
        "--verify", action="store_true",
        help="re-derive the result with the brute-force oracles; exit 3 on disagreement",
    )
    common.add_argument(
        "--format", choices=("report", "csv"), default="report",
        help="output format (default: JSON report)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def cmd(name, handler, help_text, market=True):
        p = sub.add_parser(name, parents=[common], help=help_text)
        if market:
            p.add_argument("market", help="path to a market document")
        p.set_defaults(handler=handler)
        return p

    cmd("validate", _cmd_validate, "parse a market document and summarize it")
    cmd("fair", _cmd_fair, "decide market fairness; exit 1 with a certificate if unfair")
    cmd("complete", _cmd_complete, "decide completeness and the deflator-family dimension")

    p = cmd("superhedge", _cmd_superhedge, "price interval and attainability of a claim")
    p.add_argument("--claim", required=True, help="claim name from the market document")

    p = cmd("decompose", _cmd_decompose, "superhedge strategy and consumption for a claim")
    p.add_argument("--claim", required=True)

    p = cmd("optimize", _cmd_optimize, "maximize expected utility of terminal wealth")
    p.add_argument("--utility", required=True, help="'log' or 'power:P' (P<1, nonzero)")
    p.add_argument("--wealth", required=True, type=float, help="initial wealth (> 0)")

    p = cmd("davis", _cmd_davis, "marginal utility-indifference price of a claim")
    p.add_argument("--utility", required=True)
    p.add_argument("--wealth", required=True, type=float)
    p.add_argument("--claim", required=True)

    p = cmd("augment", _cmd_augment, "add a claim priced by the minimax deflator as an asset")
    p.add_argument("--utility", required=True)
    p.add_argument("--wealth", required=True, type=float)
    p.add_argument("--claim", required=True)
    p.add_argument("--asset-name", default="derivative")

    p = cmd("price-process", _cmd_price_process, "price a claim along the tree under a deflator")
    p.add_argument("--claim", required=True)
    p.add_argument(
        "--deflator", default="witness",
        help="'witness' (fairness witness) or 'minimax:UTILITY'",
    )

    p = cmd("generate", _cmd_generate, "emit a random fair market document", market=False)
    p.add_argument("--seed", required=True, type=int)
    p.add_argument("--depth", default=2, type=int)
    p.add_argument("--branching", default=2, type=int)
    p.add_argument("--assets", default=2, type=int)
    p.add_argument("--arb", action="store_true", help="inject a dominated asset")
    return parser


def run_command(argv) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    command = args.command
    try:
        return args.handler(args)
    except UnfairMarketError as exc:
        parsed = _try_parse(args)
        if parsed is not None:
            return _verdict(args, command, parsed, "unfair", str(exc))
        print(f"fairtree {command}: {exc}", file=sys.stderr)
        return EXIT_VERDICT
    except SupermartingaleError as exc:
        parsed = _try_parse(args)
        if parsed is not None:
            return _verdict(args, command, parsed, "infeasible", str(exc))
        print(f"fairtree {command}: {exc}", file=sys.stderr)
        return EXIT_VERDICT
    except (MarketFileError, ModelError, SizeGuardError, ValueError) as exc:
        print(f"fairtree {command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except VerifyError as exc:
        print(f"fairtree {command}: verification failed: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except FairtreeError as exc:
        print(f"fairtree {command}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception:
        traceback.print_exc()
        return EXIT_INTERNAL


def _try_parse(args) -> ParsedMarket | None:
    path = getattr(args, "market", None)
    if path is None:
        return None
    try:
        return parse_market(path)
    except MarketFileError:
        return None


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
