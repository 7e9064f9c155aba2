"""Minimal cuts, critical values, and structural edge-pair classification.

A cut is an edge set whose removal leaves no source-sink path; a minimal cut
is one no proper subset of which is still a cut.  Minimal cuts are purely
structural (capacity-free); which of them is a *minimum* cut depends on the
reported capacities.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Mapping, Optional, Union

from .guards import guard_size
from .maxflow import max_flow
from .network import FlowNetwork, RationalLike, resolve_reports, strip_terminal_edges


class _Unbounded:
    """Critical value of a direct source-sink edge: flow grows with its
    capacity forever, so the threshold compares greater than everything."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "UNBOUNDED"


UNBOUNDED = _Unbounded()
CriticalValue = Union[Fraction, _Unbounded]


@dataclass(frozen=True)
class MinimalCutFamily:
    """All inclusion-minimal cuts of a graph, with the graph's max-flow value
    and each cut's total reported capacity.  `min(cut_capacities) == flow_value`
    whenever any cut exists (max-flow/min-cut duality)."""

    cuts: tuple[frozenset[str], ...]
    flow_value: Fraction
    cut_capacities: tuple[Fraction, ...]

    def cuts_containing(self, edge_id: str) -> tuple[frozenset[str], ...]:
        return tuple(M for M in self.cuts if edge_id in M)


def _sorted_family(cutsets, caps, flow_value) -> MinimalCutFamily:
    ordered = sorted(cutsets, key=lambda M: tuple(sorted(M)))
    totals = tuple(sum((caps[e] for e in M), Fraction(0)) for M in ordered)
    return MinimalCutFamily(tuple(ordered), flow_value, totals)


def _has_path(net: FlowNetwork, allowed: frozenset[str]) -> bool:
    adj: dict[str, list[str]] = {}
    for e in net.edges:
        if e.id in allowed:
            adj.setdefault(e.tail, []).append(e.head)
    seen = {net.source}
    stack = [net.source]
    while stack:
        u = stack.pop()
        if u == net.sink:
            return True
        for v in adj.get(u, ()):
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return False


@lru_cache(maxsize=512)
def _minimal_cutsets(net: FlowNetwork, allowed: frozenset[str]) -> tuple[frozenset[str], ...]:
    """Inclusion-minimal cuts among the allowed edges, by enumerating node
    sets X (source in X, sink out) and collecting the edges leaving X.  Every
    minimal cut arises this way: take X = nodes reachable from the source
    after removing it."""
    if not _has_path(net, allowed):
        return ()
    internal = [n for n in net.nodes if n not in (net.source, net.sink)]
    guard_size("node-subset cut enumeration", len(internal), default_limit=16)
    candidates: set[frozenset[str]] = set()
    for r in range(len(internal) + 1):
        for picked in combinations(internal, r):
            side = {net.source, *picked}
            cut = frozenset(
                e.id
                for e in net.edges
                if e.id in allowed and e.tail in side and e.head not in side
            )
            candidates.add(cut)
    # scanning by size, a candidate is minimal iff no already-kept (hence
    # smaller) cut sits strictly inside it
    minimal: list[frozenset[str]] = []
    for cut in sorted(candidates, key=len):
        if not any(kept < cut for kept in minimal):
            minimal.append(cut)
    return tuple(sorted(minimal, key=lambda M: tuple(sorted(M))))


def structural_minimal_cuts(net: FlowNetwork) -> tuple[frozenset[str], ...]:
    """Minimal cuts of the graph ignoring capacities entirely."""
    return _minimal_cutsets(net, frozenset(net.edge_ids))


def enumerate_minimal_cuts(
    net: FlowNetwork, reports: Optional[Mapping[str, RationalLike]] = None
) -> MinimalCutFamily:
    """Minimal cuts of the graph as given, over the positively-reported edges.

    Edges reported at 0 are dropped first (they can carry no flow and would
    put zero-capacity members into cuts).  Direct source-sink edges are *not*
    removed here; callers that need the stripped graph (the cut-splitting
    mechanism does) strip it first.
    """
    caps = resolve_reports(net, reports)
    positive = frozenset(eid for eid, q in caps.items() if q > 0)
    cutsets = _minimal_cutsets(net, positive)
    if not cutsets:
        return MinimalCutFamily((), Fraction(0), ())
    return _sorted_family(cutsets, caps, max_flow(net, caps).value)


def minimal_cuts_bruteforce(
    net: FlowNetwork, reports: Optional[Mapping[str, RationalLike]] = None
) -> MinimalCutFamily:
    """Oracle with the same contract as :func:`enumerate_minimal_cuts`:
    test every edge subset for cut-ness, keep the inclusion-minimal ones."""
    caps = resolve_reports(net, reports)
    positive = [eid for eid, q in caps.items() if q > 0]
    guard_size("edge-subset cut enumeration", len(positive), default_limit=20)
    pos_set = frozenset(positive)
    if not _has_path(net, pos_set):
        return MinimalCutFamily((), Fraction(0), ())
    all_cuts: set[frozenset[str]] = set()
    for mask in range(1 << len(positive)):
        removed = frozenset(positive[i] for i in range(len(positive)) if mask >> i & 1)
        if not _has_path(net, pos_set - removed):
            all_cuts.add(removed)
    minimal = {
        M for M in all_cuts if all(M - {e} not in all_cuts for e in M)
    }
    return _sorted_family(minimal, caps, max_flow(net, caps).value)


def min_cut_nearest_source(
    net: FlowNetwork, reports: Optional[Mapping[str, RationalLike]] = None
) -> frozenset[str]:
    """The minimum cut with the smallest source side: the positive edges
    leaving the set of nodes reachable from the source in the residual graph
    of any maximum flow.  Independent of which maximum flow was found."""
    caps = resolve_reports(net, reports)
    side = max_flow(net, caps).source_side
    return frozenset(
        e.id
        for e in net.edges
        if caps[e.id] > 0 and e.tail in side and e.head not in side
    )


def critical_value(
    net: FlowNetwork,
    reports: Optional[Mapping[str, RationalLike]],
    edge_id: str,
) -> CriticalValue:
    """Capacity threshold of an edge: the max-flow gain from raising the
    edge's capacity from 0 to beyond every bottleneck.  Computed with the
    finite proxy B = 1 + sum of all reports, which exceeds every cut that
    avoids the edge; if flow still grows past B the value is unbounded
    (possible only for a direct source-sink edge)."""
    caps = resolve_reports(net, reports)
    if edge_id not in caps:
        raise KeyError(f"unknown edge id {edge_id!r}")
    proxy = 1 + sum(caps.values())
    at_proxy = _flow_with(net, caps, edge_id, proxy)
    if _flow_with(net, caps, edge_id, proxy + 1) > at_proxy:
        return UNBOUNDED
    return at_proxy - _flow_with(net, caps, edge_id, Fraction(0))


def flow_as_function_of(
    net: FlowNetwork,
    reports: Optional[Mapping[str, RationalLike]],
    edge_id: str,
    value: RationalLike,
) -> Fraction:
    """Max-flow value with one edge's capacity overridden."""
    caps = resolve_reports(net, reports)
    return _flow_with(net, caps, edge_id, Fraction(value))


def _flow_with(net, caps, edge_id, value) -> Fraction:
    override = dict(caps)
    override[edge_id] = value
    return max_flow(net, override).value


def is_essential(
    net: FlowNetwork,
    reports: Optional[Mapping[str, RationalLike]],
    edge_id: str,
) -> bool:
    """An edge is essential when lowering its reported capacity would lower
    the max-flow value, i.e. the report does not exceed the critical value."""
    caps = resolve_reports(net, reports)
    cv = critical_value(net, caps, edge_id)
    if cv is UNBOUNDED:
        return True
    return caps[edge_id] <= cv


@dataclass(frozen=True)
class EdgeAnalysis:
    edge: str
    critical_value: CriticalValue
    essential: bool


def analyze_edge(
    net: FlowNetwork,
    reports: Optional[Mapping[str, RationalLike]],
    edge_id: str,
) -> EdgeAnalysis:
    caps = resolve_reports(net, reports)
    cv = critical_value(net, caps, edge_id)
    essential = True if cv is UNBOUNDED else caps[edge_id] <= cv
    return EdgeAnalysis(edge_id, cv, essential)


class PairKind(str, Enum):
    INDEPENDENT = "independent"
    INCLUSIVE = "inclusive"
    NEITHER = "neither"


@dataclass(frozen=True)
class PairStructure:
    kind: PairKind
    cuts_with_both: tuple[frozenset[str], ...]
    cuts_with_second_only: tuple[frozenset[str], ...]
    note: str = ""


def classify_pair_structure(
    net: FlowNetwork,
    reports: Optional[Mapping[str, RationalLike]],
    e1: str,
    e2: str,
) -> PairStructure:
    """Classify an ordered pair of non-terminal edges by the minimal cuts of
    the graph with direct source-sink edges removed.

    - independent: no minimal cut contains both edges;
    - inclusive: every minimal cut containing the second edge also contains
      the first, and dropping the first from such a cut leaves a minimum cut
      of the graph without the first edge (this part is evaluated at the
      current reports, so the label can change with them);
    - neither: everything else.
    """
    if e1 == e2:
        raise ValueError("the two edges must differ")
    for eid in (e1, e2):
        if net.is_terminal_edge(eid):
            raise ValueError(
                f"edge {eid!r} runs directly from source to sink and has no pair structure"
            )
    stripped = strip_terminal_edges(net)
    caps = resolve_reports(net, reports)
    caps = {eid: caps[eid] for eid in stripped.edge_ids}
    family = enumerate_minimal_cuts(stripped, caps)
    with_e2 = family.cuts_containing(e2)
    both = tuple(M for M in with_e2 if e1 in M)
    second_only = tuple(M for M in with_e2 if e1 not in M)

    if not both:
        return PairStructure(PairKind.INDEPENDENT, both, second_only)
    if second_only:
        return PairStructure(PairKind.NEITHER, both, second_only)

    without_e1 = dict(caps)
    without_e1[e1] = Fraction(0)
    residual_value = max_flow(stripped, without_e1).value
    note = "evaluated at the current reports"
    for M in with_e2:
        leftover = sum((caps[e] for e in M if e != e1), Fraction(0))
        if leftover != residual_value:
            return PairStructure(PairKind.NEITHER, both, second_only, note)
    return PairStructure(PairKind.INCLUSIVE, both, second_only, note)
