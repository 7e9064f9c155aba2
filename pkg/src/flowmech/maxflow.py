"""Exact maximum flow over rational capacities.

Shortest augmenting paths (BFS level graph), breaking ties toward the
lexicographically smallest path by (edge id, direction).  Every quantity is
a Fraction, every comparison exact, and identical inputs always produce the
identical witness flow and residual source side.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional

from .network import FlowNetwork, RationalLike, as_rational, resolve_reports

_FWD = 0
_BWD = 1


@dataclass(frozen=True)
class FlowResult:
    value: Fraction
    edge_flows: dict[str, Fraction]
    source_side: frozenset[str]


def max_flow(
    net: FlowNetwork, reports: Optional[Mapping[str, RationalLike]] = None
) -> FlowResult:
    """Maximum source-to-sink flow under the reported capacities.

    An edge reported at 0 is effectively absent.  `source_side` is the set
    of nodes reachable from the source in the final residual graph, so the
    edges leaving it form the minimum cut nearest the source.
    """
    caps = resolve_reports(net, reports)
    s, t = net.source, net.sink

    # arcs_from[u]: (key, edge id, direction, head), sorted so that scanning
    # order never depends on the input edge order
    arcs_from: dict[str, list[tuple[tuple[str, int], str, int, str]]] = {n: [] for n in net.nodes}
    arcs_into: dict[str, list[tuple[str, int, str]]] = {n: [] for n in net.nodes}
    for e in net.edges:
        if caps[e.id] <= 0:
            continue
        arcs_from[e.tail].append(((e.id, _FWD), e.id, _FWD, e.head))
        arcs_into[e.head].append((e.id, _FWD, e.tail))
        arcs_from[e.head].append(((e.id, _BWD), e.id, _BWD, e.tail))
        arcs_into[e.tail].append((e.id, _BWD, e.head))
    for u in arcs_from:
        arcs_from[u].sort()

    flow: dict[str, Fraction] = {e.id: Fraction(0) for e in net.edges}

    def avail(eid: str, direction: int) -> Fraction:
        return caps[eid] - flow[eid] if direction == _FWD else flow[eid]

    while True:
        dist = _levels_to_sink(t, arcs_into, avail)
        if s not in dist:
            break
        # greedy descent along the level graph picks the lexicographically
        # smallest shortest augmenting path
        path: list[tuple[str, int]] = []
        u = s
        while u != t:
            for _key, eid, direction, head in arcs_from[u]:
                if avail(eid, direction) > 0 and dist.get(head) == dist[u] - 1:
                    path.append((eid, direction))
                    u = head
                    break
            else:  # pragma: no cover - BFS guarantees a usable arc exists
                raise AssertionError("level graph dead end")
        bottleneck = min(avail(eid, d) for eid, d in path)
        for eid, d in path:
            flow[eid] += bottleneck if d == _FWD else -bottleneck

    value = sum((flow[e.id] for e in net.edges if e.tail == s), Fraction(0)) - sum(
        (flow[e.id] for e in net.edges if e.head == s), Fraction(0)
    )
    return FlowResult(value, flow, frozenset(_residual_reach(s, arcs_from, avail)))


def _levels_to_sink(t, arcs_into, avail):
    dist = {t: 0}
    frontier = [t]
    while frontier:
        nxt = []
        for v in frontier:
            for eid, direction, tail in arcs_into[v]:
                if tail not in dist and avail(eid, direction) > 0:
                    dist[tail] = dist[v] + 1
                    nxt.append(tail)
        frontier = nxt
    return dist


def _residual_reach(s, arcs_from, avail):
    seen = {s}
    stack = [s]
    while stack:
        u = stack.pop()
        for _key, eid, direction, head in arcs_from[u]:
            if head not in seen and avail(eid, direction) > 0:
                seen.add(head)
                stack.append(head)
    return seen


def coalition_value(
    net: FlowNetwork,
    reports: Optional[Mapping[str, RationalLike]],
    members: Iterable[str],
) -> Fraction:
    """Value of a coalition: max flow using only the members' edges at their
    reported capacities."""
    caps = resolve_reports(net, reports)
    keep = set(members)
    unknown = keep - set(caps)
    if unknown:
        raise KeyError(f"unknown edge ids in coalition: {sorted(unknown)}")
    for eid in caps:
        if eid not in keep:
            caps[eid] = Fraction(0)
    return max_flow(net, caps).value


def two_parameter_flow(
    net: FlowNetwork,
    i: str,
    j: str,
    x: RationalLike,
    y: RationalLike,
    rest: Optional[Mapping[str, RationalLike]] = None,
) -> Fraction:
    """Max-flow value as a function of the capacities of two chosen edges,
    with every other capacity taken from `rest` (default: true capacities)."""
    if i == j:
        raise ValueError("the two edges must differ")
    if i not in net.by_id or j not in net.by_id:
        raise KeyError("unknown edge id")
    caps = resolve_reports(net, rest)
    qx, qy = as_rational(x, what="capacity"), as_rational(y, what="capacity")
    if qx < 0 or qy < 0:
        raise ValueError("capacities must be >= 0")
    caps[i] = qx
    caps[j] = qy
    return max_flow(net, caps).value
