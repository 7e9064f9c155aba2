#!/usr/bin/env python3
"""Seeded property-audit campaign over random instances.

For each seed: build a random network, run every audit against the chosen
mechanisms, and tally verdicts.  The cut-splitting mechanism is expected to
come out clean on all five properties; Shapley on truthfulness and
rationality only.  Exits 2 if an unexpected violation shows up.
"""

import argparse
from collections import Counter

from flowmech import (
    CharacteristicCache,
    check_cm,
    check_dsic,
    check_mp,
    check_sir,
    check_sp,
    parallel_pairs,
    random_network,
    shapley,
)
from flowmech.mechanisms import mc_allocate


def fast_shapley(net, reports=None):
    return shapley(net, reports, cache=CharacteristicCache(net, reports, method="cuts"))


fast_shapley.__name__ = "shapley"

CLEAN = {
    "mc": ("dsic", "sir", "sp", "mp", "cm"),
    "shapley": ("dsic", "sir"),
}


def audits_for(net, mechanism, properties, grid):
    if "dsic" in properties:
        yield check_dsic(net, mechanism, grid_size=grid)
    if "sir" in properties:
        yield check_sir(net, mechanism)
    if "sp" in properties:
        for eid in net.edge_ids:
            yield check_sp(net, mechanism, None, eid)
    if "mp" in properties:
        for ea, eb in parallel_pairs(net):
            yield check_mp(net, mechanism, None, ea, eb)
    if "cm" in properties:
        for eid in net.edge_ids:
            yield check_cm(net, mechanism, None, eid)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seeds", type=int, default=100, help="number of random instances")
    parser.add_argument("--start", type=int, default=1, help="first seed")
    parser.add_argument("--max-edges", type=int, default=8)
    parser.add_argument("--max-nodes", type=int, default=6)
    parser.add_argument("--grid", type=int, default=5, help="deviation grid density")
    args = parser.parse_args()

    mechanisms = {"mc": mc_allocate, "shapley": fast_shapley}
    tally: Counter[tuple[str, str, str]] = Counter()
    unexpected = []
    for seed in range(args.start, args.start + args.seeds):
        net = random_network(seed, max_nodes=args.max_nodes, max_edges=args.max_edges)
        for name, fn in mechanisms.items():
            for report in audits_for(net, fn, CLEAN[name], args.grid):
                tally[(name, report.property, report.verdict)] += 1
                if report.verdict == "violation":
                    unexpected.append((seed, name, report))

    print(f"{'mechanism':<10} {'property':<8} {'verdict':<10} count")
    for (name, prop, verdict), count in sorted(tally.items()):
        print(f"{name:<10} {prop:<8} {verdict:<10} {count}")
    if unexpected:
        print(f"\n{len(unexpected)} unexpected violation(s); first witness:")
        seed, name, report = unexpected[0]
        print(f"  seed {seed}, mechanism {name}: {report.witness}")
        return 2
    print(f"\nno violations across {args.seeds} seeds")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
