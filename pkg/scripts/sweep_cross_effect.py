#!/usr/bin/env python3
"""Trace how one edge's report moves another's cut-mechanism payoff.

Emits the sweep grid as exact-rational TSV (for external plotting) together
with the pair classification and the swept edge's critical value.
"""

import argparse

from flowmech import cross_effect_sweep, load_fixture, parse_network
from flowmech.cli import _parse_overrides


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("network", help="fixture name (e.g. fig1) or a file path")
    parser.add_argument("--pair", required=True, metavar="SWEPT,OBSERVED")
    parser.add_argument("--points", type=int, default=8)
    parser.add_argument("--report", action="append", metavar="EDGE=VALUE")
    args = parser.parse_args()

    try:
        net = load_fixture(args.network)
    except KeyError:
        with open(args.network, "r", encoding="utf-8") as fh:
            net = parse_network(fh.read())
    swept, observed = (p.strip() for p in args.pair.split(","))
    reports = _parse_overrides(args.report)

    result = cross_effect_sweep(net, reports, swept, observed, points_per_interval=args.points)
    ctx = result.trace.context
    print(f"# case: {ctx['case']}")
    if "critical_value" in ctx:
        print(f"# critical value of {swept}: {ctx['critical_value']}")
    print(f"# verdict: {result.verdict}")
    print(f"{swept}\tpayoff({observed})")
    for x, v in zip(result.trace.grid, result.trace.values):
        print(f"{x}\t{v}")
    return 0 if result.passed else 2


if __name__ == "__main__":
    raise SystemExit(main())
