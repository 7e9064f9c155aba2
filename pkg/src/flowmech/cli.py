"""Command-line surface.

Every numeric value is printed as an exact rational string such as ``5/6``;
structured (JSON) output never contains a floating-point literal.  Exit
codes: 0 success / all checks pass, 1 usage or validation error, 2 at least
one property violation found.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import asdict, is_dataclass
from datetime import datetime, timezone
from enum import Enum
from fractions import Fraction
from typing import Any, Optional

from . import __version__
from .audits import (
    audit_all,
    best_deviation,
    check_cm,
    check_dsic,
    check_mp,
    check_sir,
    check_sp,
    cross_effect_sweep,
    parallel_pairs,
)
from .complementarity import classify_complementarity, probe_constant_relation
from .cuts import classify_pair_structure, enumerate_minimal_cuts, minimal_cuts_bruteforce
from .fixtures import fixture_names, fixture_text, write_fixtures
from .guards import SizeGuardError
from .maxflow import max_flow
from .mechanisms import (
    MECHANISMS,
    core_bounds,
    core_bounds_all,
    core_check,
    core_select_nearest_cut,
    mc_allocate,
    mc_no_step_one,
    resolve_mechanism,
    shapley,
    shapley_permutation_oracle,
)
from .network import (
    NetworkError,
    ParseError,
    as_rational,
    parse_network,
    prune_to_paths,
    rational_str,
    validate,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VIOLATION = 2


class CliError(Exception):
    pass


def _jsonable(value: Any) -> Any:
    if isinstance(value, Fraction):
        return rational_str(value)
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = sorted(value, key=str) if isinstance(value, (set, frozenset)) else value
        return [_jsonable(v) for v in items]
    if is_dataclass(value) and not isinstance(value, type):
        return _jsonable(asdict(value))
    if isinstance(value, float):
        raise CliError("internal error: a float reached the output layer")
    return value


def _parse_overrides(pairs: Optional[list[str]], what: str = "report") -> dict[str, Fraction]:
    out: dict[str, Fraction] = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise CliError(f"--{what} expects EDGE=VALUE, got {pair!r}")
        eid, _, raw = pair.partition("=")
        try:
            out[eid.strip()] = as_rational(raw.strip(), what=what)
        except (TypeError, ValueError) as exc:
            raise CliError(str(exc)) from None
    return out


def _load(args) -> tuple[Any, dict]:
    with open(args.network, "r", encoding="utf-8") as fh:
        text = fh.read()
    net = parse_network(text)
    notes: dict[str, Any] = {"input_digest": hashlib.sha256(text.encode()).hexdigest()}
    if getattr(args, "prune", False):
        net, dropped = prune_to_paths(net)
        notes["pruned_edges"] = list(dropped)
    report = validate(net)
    if not report.ok:
        lines = "; ".join(f"{d.code}: {d.message} ({d.entity})" for d in report.errors())
        raise CliError(f"network failed validation: {lines}")
    overrides = _parse_overrides(getattr(args, "report", None))
    caps = net.caps()
    for eid, q in overrides.items():
        if eid not in caps:
            raise CliError(f"unknown edge id {eid!r} in --report")
        if q > caps[eid]:
            raise CliError(
                f"report {q} for {eid} exceeds its capacity {caps[eid]} "
                "(players may under-report only)"
            )
    reports = dict(caps)
    reports.update(overrides)
    notes["reports"] = reports
    return net, notes


def _pair(args) -> tuple[str, str]:
    parts = [p.strip() for p in args.pair.split(",")]
    if len(parts) != 2:
        raise CliError("--pair expects two comma-separated edge ids, e.g. e1,e3")
    return parts[0], parts[1]


def _allocation_rows(alloc, reports) -> list[list[str]]:
    return [
        [eid, rational_str(reports[eid]), rational_str(q)] for eid, q in alloc.payoffs.items()
    ]


def _table(headers: list[str], rows: list[list[str]]) -> str:
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(headers)]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    out = [fmt.format(*headers), fmt.format(*("-" * w for w in widths))]
    out.extend(fmt.format(*row) for row in rows)
    return "\n".join(out)


def _emit(args, results: dict, exit_status: int) -> None:
    if args.format == "json":
        doc = {
            "tool": "flowmech",
            "version": __version__,
            "command": list(args._argv),
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "results": _jsonable(results),
            "exit_status": exit_status,
        }
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        _render_table(results)


def _render_table(results: dict) -> None:
    if "allocation" in results:
        alloc = results["allocation"]
        print(f"mechanism: {alloc['mechanism']}")
        print(_table(["edge", "report", "payoff"], alloc["rows"]))
        print(f"total: {alloc['total']}")
    if "value" in results:
        print(f"max-flow value: {results['value']}")
        if "edge_flows" in results:
            rows = [[eid, rational_str(q)] for eid, q in results["edge_flows"].items()]
            print(_table(["edge", "flow"], rows))
        if "source_side" in results:
            print("source side:", " ".join(sorted(results["source_side"])))
    if "cuts" in results:
        rows = [[" ".join(sorted(M)), rational_str(cap)] for M, cap in results["cuts"]]
        print(_table(["minimal cut", "capacity"], rows))
        print(f"flow value: {results['flow_value']}")
    if "bounds" in results:
        rows = [[eid, rational_str(lo), rational_str(hi)] for eid, (lo, hi) in results["bounds"].items()]
        print(_table(["edge", "core min", "core max"], rows))
    if "core" in results:
        verdict = results["core"]
        if verdict["in_core"]:
            print("IN CORE")
        else:
            print(
                f"CORE VIOLATION: coalition {{{', '.join(sorted(verdict['coalition']))}}} "
                f"can earn {verdict['coalition_value']} but is paid {verdict['payoff_sum']}"
            )
    if "deviation" in results:
        w = results["deviation"]
        print(
            f"player {w['player']}: truthful payoff {w['truthful_payoff']}, "
            f"best report {w['best_report']} pays {w['best_payoff']} (gain {w['gain']})"
        )
    if "pair" in results:
        p = results["pair"]
        print(f"structure: {p['structure']}")
        print(f"relation at current reports: {p['relation']} (pattern: {p['pattern']})")
        if "constant_claim" in p:
            print(f"constancy over samples: {p['constant_claim']} ({p['sampled_relation']})")
    if "audits" in results:
        for item in results["audits"]:
            line = f"{item['property']:<14} {item['mechanism']:<12} {item['verdict'].upper()}"
            print(line)
            if item.get("witness"):
                print(f"  witness: {item['witness']}")
    if "sweep" in results:
        s = results["sweep"]
        print(f"case: {s['case']}  (verdict: {s['verdict']})")
        print(_table(["swept report", "observed payoff"], s["rows"]))
    if "validation" in results:
        v = results["validation"]
        print("VALID" if v["ok"] else "INVALID")
        for d in v["diagnostics"]:
            print(f"  [{d['severity']}] {d['code']}: {d['message']} ({d['entity']})")
    if "pruned_edges" in results:
        print("pruned:", " ".join(results["pruned_edges"]) or "(nothing)")
    if "fixtures" in results:
        for name in results["fixtures"]:
            print(name)
    if "fixture_text" in results:
        print(results["fixture_text"], end="")
    if "written" in results:
        for path in results["written"]:
            print(f"wrote {path}")


# ---------------------------------------------------------------------------
# subcommands


def _cmd_validate(args) -> tuple[dict, int]:
    with open(args.network, "r", encoding="utf-8") as fh:
        text = fh.read()
    net = parse_network(text)
    notes = {}
    if args.prune:
        net, dropped = prune_to_paths(net)
        notes["pruned_edges"] = list(dropped)
    report = validate(net)
    results = {
        "validation": {
            "ok": report.ok,
            "diagnostics": [asdict(d) for d in report.diagnostics],
        },
        **notes,
    }
    return results, EXIT_OK if report.ok else EXIT_USAGE


def _cmd_maxflow(args) -> tuple[dict, int]:
    net, notes = _load(args)
    result = max_flow(net, notes["reports"])
    return (
        {
            "value": result.value,
            "edge_flows": result.edge_flows,
            "source_side": result.source_side,
            "input_digest": notes["input_digest"],
        },
        EXIT_OK,
    )


def _cmd_cuts(args) -> tuple[dict, int]:
    net, notes = _load(args)
    enumerate_fn = minimal_cuts_bruteforce if args.oracle else enumerate_minimal_cuts
    family = enumerate_fn(net, notes["reports"])
    return (
        {
            "cuts": [(sorted(M), cap) for M, cap in zip(family.cuts, family.cut_capacities)],
            "flow_value": family.flow_value,
            "input_digest": notes["input_digest"],
        },
        EXIT_OK,
    )


def _alloc_result(alloc, reports, notes) -> dict:
    return {
        "allocation": {
            "mechanism": alloc.mechanism,
            "rows": _allocation_rows(alloc, reports),
            "payoffs": alloc.payoffs,
            "total": alloc.total,
        },
        "input_digest": notes["input_digest"],
    }


def _cmd_shapley(args) -> tuple[dict, int]:
    net, notes = _load(args)
    fn = shapley_permutation_oracle if args.oracle else shapley
    return _alloc_result(fn(net, notes["reports"]), notes["reports"], notes), EXIT_OK


def _cmd_mc(args) -> tuple[dict, int]:
    net, notes = _load(args)
    fn = mc_no_step_one if args.no_stand_alone_step else mc_allocate
    return _alloc_result(fn(net, notes["reports"]), notes["reports"], notes), EXIT_OK


def _cmd_core_select(args) -> tuple[dict, int]:
    net, notes = _load(args)
    alloc = core_select_nearest_cut(net, notes["reports"])
    return _alloc_result(alloc, notes["reports"], notes), EXIT_OK


def _cmd_core_check(args) -> tuple[dict, int]:
    net, notes = _load(args)
    if args.payoff:
        payoffs = _parse_overrides(args.payoff, what="payoff")
        missing = set(net.edge_ids) - set(payoffs)
        if missing:
            raise CliError(f"--payoff missing edges: {sorted(missing)}")
    elif args.mechanism:
        payoffs = resolve_mechanism(args.mechanism)(net, notes["reports"]).payoffs
    else:
        raise CliError("core-check needs --payoff EDGE=VALUE... or --mechanism NAME")
    verdict = core_check(net, notes["reports"], payoffs)
    results = {
        "core": {
            "in_core": verdict.in_core,
            "coalition": sorted(verdict.coalition) if verdict.coalition else None,
            "coalition_value": verdict.coalition_value,
            "payoff_sum": verdict.payoff_sum,
        },
        "input_digest": notes["input_digest"],
    }
    return results, EXIT_OK if verdict.in_core else EXIT_VIOLATION


def _cmd_core_bounds(args) -> tuple[dict, int]:
    net, notes = _load(args)
    if args.edge:
        bounds = {args.edge: core_bounds(net, notes["reports"], args.edge)}
    else:
        bounds = core_bounds_all(net, notes["reports"])
    return {"bounds": bounds, "input_digest": notes["input_digest"]}, EXIT_OK


def _cmd_classify_pair(args) -> tuple[dict, int]:
    net, notes = _load(args)
    e1, e2 = _pair(args)
    structure = classify_pair_structure(net, notes["reports"], e1, e2)
    fixed = classify_complementarity(net, e1, e2, notes["reports"])
    result = {
        "structure": structure.kind.value,
        "relation": fixed.relation.value,
        "pattern": fixed.pattern,
    }
    if args.samples:
        if args.seed is None:
            raise CliError("--samples needs an explicit --seed for reproducibility")
        sampled = probe_constant_relation(net, e1, e2, args.samples, args.seed)
        result["constant_claim"] = sampled.constant_claim.status
        result["sampled_relation"] = sampled.relation.value
    return {"pair": result, "input_digest": notes["input_digest"]}, EXIT_OK


def _cmd_deviate(args) -> tuple[dict, int]:
    net, notes = _load(args)
    if args.player not in net.by_id:
        raise CliError(f"unknown edge id {args.player!r}")
    witness = best_deviation(
        net,
        args.mechanism,
        args.player,
        others_reports=notes["reports"],
        grid_size=args.grid,
    )
    return (
        {
            "deviation": {
                "player": witness.player,
                "truthful_payoff": witness.truthful_payoff,
                "best_report": witness.best_report,
                "best_payoff": witness.best_payoff,
                "gain": witness.gain,
            },
            "input_digest": notes["input_digest"],
        },
        EXIT_OK,
    )


def _cmd_audit(args) -> tuple[dict, int]:
    net, notes = _load(args)
    reports = notes["reports"]
    mech = args.mechanism
    runs = []
    prop = args.property
    if prop == "all":
        runs = audit_all(net, mech, reports, grid_size=args.grid)
    elif prop == "dsic":
        runs = [check_dsic(net, mech, reports, grid_size=args.grid)]
    elif prop == "sir":
        runs = [check_sir(net, mech, reports)]
    elif prop == "sp":
        ids = [args.edge] if args.edge else list(net.edge_ids)
        runs = [check_sp(net, mech, reports, eid) for eid in ids]
    elif prop == "mp":
        pairs = [_pair(args)] if args.pair else parallel_pairs(net)
        if not pairs:
            raise CliError("the network has no parallel edge pair to merge")
        runs = [check_mp(net, mech, reports, ea, eb) for ea, eb in pairs]
    elif prop == "cm":
        ids = [args.edge] if args.edge else list(net.edge_ids)
        runs = [check_cm(net, mech, reports, eid) for eid in ids]
    else:  # pragma: no cover - argparse restricts choices
        raise CliError(f"unknown property {prop!r}")
    results = {
        "audits": [
            {
                "property": r.property,
                "mechanism": r.mechanism,
                "verdict": r.verdict,
                "witness": _jsonable(r.witness) if r.witness else None,
            }
            for r in runs
        ],
        "input_digest": notes["input_digest"],
    }
    bad = any(r.verdict == "violation" for r in runs)
    return results, EXIT_VIOLATION if bad else EXIT_OK


def _cmd_sweep(args) -> tuple[dict, int]:
    net, notes = _load(args)
    e1, e2 = _pair(args)
    report = cross_effect_sweep(net, notes["reports"], e1, e2, points_per_interval=args.points)
    trace = report.trace
    results = {
        "sweep": {
            "case": trace.context.get("case"),
            "verdict": report.verdict,
            "critical_value": trace.context.get("critical_value"),
            "rows": [[rational_str(x), rational_str(v)] for x, v in zip(trace.grid, trace.values)],
        },
        "input_digest": notes["input_digest"],
    }
    return results, EXIT_OK if report.passed else EXIT_VIOLATION


def _cmd_fixtures(args) -> tuple[dict, int]:
    if args.out:
        return {"written": write_fixtures(args.out)}, EXIT_OK
    if args.name:
        return {"fixture_text": fixture_text(args.name)}, EXIT_OK
    return {"fixtures": list(fixture_names())}, EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flowmech",
        description=(
            "Payoff mechanisms for max-flow games with privately reported edge "
            "capacities, and mechanical audits of their incentive properties."
        ),
    )
    parser.add_argument("--version", action="version", version=f"flowmech {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, reports=True):
        p.add_argument("network", help="path to a network file")
        p.add_argument("--format", choices=["table", "json"], default="table")
        p.add_argument("--prune", action="store_true", help="drop edges off all source-sink paths")
        if reports:
            p.add_argument(
                "--report",
                action="append",
                metavar="EDGE=VALUE",
                help="reported capacity override (repeatable); defaults to the true capacity",
            )

    p = sub.add_parser("validate", help="check the model assumptions")
    common(p, reports=False)
    p.set_defaults(fn=_cmd_validate)

    p = sub.add_parser("maxflow", help="exact max-flow value and witness flow")
    common(p)
    p.set_defaults(fn=_cmd_maxflow)

    p = sub.add_parser("cuts", help="enumerate the minimal cuts")
    common(p)
    p.add_argument("--oracle", action="store_true", help="use the edge-subset brute-force path")
    p.set_defaults(fn=_cmd_cuts)

    p = sub.add_parser("shapley", help="Shapley value allocation")
    common(p)
    p.add_argument("--oracle", action="store_true", help="average over all arrival orders instead")
    p.set_defaults(fn=_cmd_shapley)

    p = sub.add_parser("mc", help="cut-splitting mechanism allocation")
    common(p)
    p.add_argument(
        "--no-stand-alone-step",
        action="store_true",
        help="diagnostic variant: skip the stand-alone step (not individually rational)",
    )
    p.set_defaults(fn=_cmd_mc)

    p = sub.add_parser("core-select", help="nearest-cut core selection allocation")
    common(p)
    p.set_defaults(fn=_cmd_core_select)

    p = sub.add_parser("core-check", help="exact core membership of an allocation")
    common(p)
    p.add_argument("--payoff", action="append", metavar="EDGE=VALUE")
    p.add_argument("--mechanism", choices=sorted(MECHANISMS))
    p.set_defaults(fn=_cmd_core_check)

    p = sub.add_parser("core-bounds", help="min/max core payoff per edge (exact LP)")
    common(p)
    p.add_argument("--edge", help="bound a single edge instead of all")
    p.set_defaults(fn=_cmd_core_bounds)

    p = sub.add_parser("classify-pair", help="independent/inclusive structure and complement/substitute relation")
    common(p)
    p.add_argument("--pair", required=True, metavar="E1,E2")
    p.add_argument("--samples", type=int, help="also sample other capacities this many times")
    p.add_argument("--seed", type=int, help="seed for --samples (required with it)")
    p.set_defaults(fn=_cmd_classify_pair)

    p = sub.add_parser("deviate", help="best under-report for one player")
    common(p)
    p.add_argument("--player", required=True)
    p.add_argument("--mechanism", required=True, choices=sorted(MECHANISMS))
    p.add_argument("--grid", type=int, default=8)
    p.set_defaults(fn=_cmd_deviate)

    p = sub.add_parser("audit", help="property audits; exit code 2 when a violation is found")
    p.add_argument("property", choices=["dsic", "sir", "sp", "mp", "cm", "all"])
    common(p)
    p.add_argument("--mechanism", required=True, choices=sorted(MECHANISMS))
    p.add_argument("--edge", help="restrict sp/cm to one edge")
    p.add_argument("--pair", help="restrict mp to one pair E1,E2")
    p.add_argument("--grid", type=int, default=6)
    p.set_defaults(fn=_cmd_audit)

    p = sub.add_parser(
        "sweep-theorem2",
        help="sweep one edge's report and trace another's cut-mechanism payoff",
    )
    common(p)
    p.add_argument("--pair", required=True, metavar="SWEPT,OBSERVED")
    p.add_argument("--points", type=int, default=8, help="grid points per interval")
    p.set_defaults(fn=_cmd_sweep)

    p = sub.add_parser("fixtures", help="list or emit the bundled example networks")
    p.add_argument("--format", choices=["table", "json"], default="table")
    p.add_argument("--out", help="write all fixtures into this directory")
    p.add_argument("--name", help="print one fixture file")
    p.set_defaults(fn=_cmd_fixtures)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args._argv = argv
    try:
        results, status = args.fn(args)
    except (CliError, NetworkError, ParseError, SizeGuardError, OSError, KeyError, ValueError) as exc:
        message = exc.args[0] if exc.args else str(exc)
        print(f"error: {message}", file=sys.stderr)
        return EXIT_USAGE
    _emit(args, results, status)
    return status


if __name__ == "__main__":
    sys.exit(main())
