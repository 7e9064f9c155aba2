"""Bundled example networks.

These small graphs exercise every corner of the mechanism audits: the
diamond where core selection punishes honesty, the fan where splitting an
edge raises its Shapley payoff, the parallel pair that profits from merging,
the graph needing the stand-alone step, and the structural pattern graphs
for the edge-pair classifiers.  `flowmech fixtures --out DIR` writes them
to disk; the repository ships the same files under fixtures/.
"""

from __future__ import annotations

import os

from .network import FlowNetwork, parse_network

FIXTURES: dict[str, str] = {
    "fig1": """\
# diamond: two parallel source edges (caps 2 and 1) feeding two parallel
# sink edges (caps 1 and 1); the unique minimum cut is the sink side
node s
node A
node t
edge e1 s A 2
edge e2 s A 1
edge e3 A t 1
edge e4 A t 1
""",
    "fig2a": """\
# fan: one cap-2 edge among four unit edges out of A, fed by a unit edge
node s
node A
node t
edge e1 A t 2
edge e2 A t 1
edge e3 A t 1
edge e4 A t 1
edge e5 A t 1
edge e6 s A 1
""",
    "fig2b": """\
# the fan with the cap-2 edge split into two parallel unit edges
node s
node A
node t
edge e1_1 A t 1
edge e1_2 A t 1
edge e2 A t 1
edge e3 A t 1
edge e4 A t 1
edge e5 A t 1
edge e6 s A 1
""",
    "fig3a": """\
# two parallel unit edges behind a unit bottleneck
node s
node A
node t
edge e1 A t 1
edge e2 A t 1
edge e3 s A 1
""",
    "fig3b": """\
# the parallel pair merged into a single cap-2 edge
node s
node A
node t
edge e1+e2 A t 2
edge e3 s A 1
""",
    "fig4": """\
# diamond with half-capacity source edges and unit sink edges
node s
node A
node t
edge e1 s A 1/2
edge e2 s A 1/2
edge e3 A t 1
edge e4 A t 1
""",
    "fig5": """\
# two-edge chain plus a direct source-sink edge; without the stand-alone
# step the direct edge would be paid less than it can earn alone
node s
node A
node t
edge e1 s A 1
edge e2 A t 2
edge e3 s t 1
""",
    "fig9": """\
# unit diamond labelled from the sink side: e1/e2 leave A, e3/e4 leave s
node s
node A
node t
edge e1 A t 1
edge e2 A t 1
edge e3 s A 1
edge e4 s A 1
""",
    "neither": """\
# bridge graph: the pair (e2, e4) shares the cut {e2,e3,e4} but e4 also
# sits in {e4,e5} alone, so the pair is neither independent nor inclusive
node s
node A
node B
node t
edge e1 s A 1
edge e2 s B 1
edge e3 A B 1
edge e4 A t 1
edge e5 B t 1
""",
    "series": """\
# three-edge chain; adjacent edges form a series pair, the outer two a
# disjoint source-out / sink-in pair
node s
node A
node B
node t
edge e1 s A 1
edge e2 A B 1
edge e3 B t 1
""",
    "diverge": """\
# the pair (e2, e3) leaves a common tail behind a unit bottleneck
node s
node A
node B
node C
node t
edge e1 s A 1
edge e2 A B 1
edge e3 A C 1
edge e4 B t 2
edge e5 C t 2
""",
    "converge": """\
# the pair (e3, e4) enters a common head whose outlet is narrower than the
# pair combined, so the two ends compete for it
node s
node A
node B
node C
node t
edge e1 s A 1
edge e2 s B 1
edge e3 A C 1
edge e4 B C 1
edge e5 C t 3/2
""",
}


def fixture_names() -> tuple[str, ...]:
    return tuple(FIXTURES)


def fixture_text(name: str) -> str:
    try:
        return FIXTURES[name]
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; available: {', '.join(FIXTURES)}") from None


def load_fixture(name: str) -> FlowNetwork:
    return parse_network(fixture_text(name))


def write_fixtures(directory: str) -> list[str]:
    os.makedirs(directory, exist_ok=True)
    written = []
    for name, text in FIXTURES.items():
        path = os.path.join(directory, f"{name}.net")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
        written.append(path)
    return written
