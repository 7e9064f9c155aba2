"""Flow network model: parsing, validation, rendering.

Every capacity is an exact rational (``fractions.Fraction``).  Floats are
rejected at every entry point so that downstream computations reproduce
bit-for-bit; decimal literals in input files are converted exactly
(``0.5`` becomes ``1/2``).

Two equivalent file encodings are accepted:

* line format::

      # comment
      node s            (optional)
      source s          (optional; inferred by degree when omitted)
      sink t            (optional)
      edge e1 s t 3/2

* a JSON document::

      {"nodes": ["s", "t"],
       "edges": [{"id": "e1", "from": "s", "to": "t", "cap": "3/2"}],
       "source": "s", "sink": "t"}
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Optional, Union

RationalLike = Union[int, str, Fraction]


class NetworkError(Exception):
    """Base error for network construction and parsing."""


class ParseError(NetworkError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


def as_rational(value: RationalLike, what: str = "value") -> Fraction:
    """Convert to an exact Fraction; floats are refused to keep arithmetic exact."""
    if isinstance(value, bool) or isinstance(value, float):
        raise TypeError(f"{what} must be an int, Fraction, or string, not {type(value).__name__}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    try:
        return Fraction(value.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"malformed rational {what}: {value!r}") from exc


def rational_str(q: Fraction) -> str:
    return str(q)


@dataclass(frozen=True)
class Edge:
    id: str
    tail: str
    head: str
    cap: Fraction


@dataclass(frozen=True)
class FlowNetwork:
    """Acyclic directed graph with one source, one sink, rational capacities.

    Instances are immutable; all operations on them are pure functions, so
    networks are safe to share across concurrent evaluations.
    """

    nodes: tuple[str, ...]
    edges: tuple[Edge, ...]
    source: str
    sink: str

    @cached_property
    def by_id(self) -> dict[str, Edge]:
        return {e.id: e for e in self.edges}

    @property
    def edge_ids(self) -> tuple[str, ...]:
        return tuple(e.id for e in self.edges)

    def edge(self, edge_id: str) -> Edge:
        try:
            return self.by_id[edge_id]
        except KeyError:
            raise KeyError(f"unknown edge id {edge_id!r}") from None

    def caps(self) -> dict[str, Fraction]:
        return {e.id: e.cap for e in self.edges}

    def is_terminal_edge(self, edge_id: str) -> bool:
        """True for a direct source-to-sink edge."""
        e = self.edge(edge_id)
        return e.tail == self.source and e.head == self.sink

    def terminal_edge_ids(self) -> tuple[str, ...]:
        return tuple(e.id for e in self.edges if e.tail == self.source and e.head == self.sink)

    def without_edges(self, edge_ids: Iterable[str]) -> "FlowNetwork":
        """Copy with the given edges removed; nodes left untouched by an edge are dropped,
        except the source and sink which always remain."""
        gone = set(edge_ids)
        kept = tuple(e for e in self.edges if e.id not in gone)
        used = {self.source, self.sink}
        for e in kept:
            used.add(e.tail)
            used.add(e.head)
        return FlowNetwork(
            nodes=tuple(n for n in self.nodes if n in used),
            edges=kept,
            source=self.source,
            sink=self.sink,
        )

    def replace_edge(self, edge_id: str, replacements: Iterable[Edge]) -> "FlowNetwork":
        """Copy with one edge swapped for the given edges, in place in the edge order."""
        new_edges: list[Edge] = []
        found = False
        for e in self.edges:
            if e.id == edge_id:
                new_edges.extend(replacements)
                found = True
            else:
                new_edges.append(e)
        if not found:
            raise KeyError(f"unknown edge id {edge_id!r}")
        seen: set[str] = set()
        for e in new_edges:
            if e.id in seen:
                raise NetworkError(f"duplicate edge id {e.id!r} after replacement")
            seen.add(e.id)
        return FlowNetwork(self.nodes, tuple(new_edges), self.source, self.sink)


def strip_terminal_edges(net: FlowNetwork) -> FlowNetwork:
    """Remove all direct source-to-sink edges (they carry flow independently
    of the rest of the graph)."""
    return net.without_edges(net.terminal_edge_ids())


def resolve_reports(
    net: FlowNetwork, reports: Optional[Mapping[str, RationalLike]] = None
) -> dict[str, Fraction]:
    """Full per-edge report vector; edges absent from `reports` default to
    their true capacity.  Reports must be >= 0 (0 means the edge is absent)."""
    out = net.caps()
    if reports:
        for eid, val in reports.items():
            if eid not in out:
                raise KeyError(f"unknown edge id {eid!r} in reports")
            q = as_rational(val, what=f"report for {eid}")
            if q < 0:
                raise ValueError(f"negative report for {eid}: {q}")
            out[eid] = q
    return out


# ---------------------------------------------------------------------------
# Parsing


def parse_network(text: str) -> FlowNetwork:
    """Parse either encoding.  Structural validation is *not* run here; use
    :func:`validate` for that."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return _parse_json(text)
    return _parse_lines(text)


def _parse_lines(text: str) -> FlowNetwork:
    nodes: list[str] = []
    seen_nodes: set[str] = set()
    edges: list[Edge] = []
    edge_ids: set[str] = set()
    source: Optional[str] = None
    sink: Optional[str] = None

    def add_node(name: str) -> None:
        if name not in seen_nodes:
            seen_nodes.add(name)
            nodes.append(name)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        kind = fields[0]
        if kind == "node":
            if len(fields) != 2:
                raise ParseError("expected: node <id>", lineno)
            add_node(fields[1])
        elif kind == "source":
            if len(fields) != 2:
                raise ParseError("expected: source <id>", lineno)
            source = fields[1]
            add_node(source)
        elif kind == "sink":
            if len(fields) != 2:
                raise ParseError("expected: sink <id>", lineno)
            sink = fields[1]
            add_node(sink)
        elif kind == "edge":
            if len(fields) != 5:
                raise ParseError("expected: edge <id> <tail> <head> <capacity>", lineno)
            _, eid, tail, head, cap_text = fields
            if eid in edge_ids:
                raise ParseError(f"duplicate edge id {eid!r}", lineno)
            try:
                cap = as_rational(cap_text, what="capacity")
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from None
            if cap <= 0:
                raise ParseError(f"non-positive capacity {cap} on edge {eid!r}", lineno)
            edge_ids.add(eid)
            add_node(tail)
            add_node(head)
            edges.append(Edge(eid, tail, head, cap))
        else:
            raise ParseError(f"unknown directive {kind!r}", lineno)

    if not edges:
        raise ParseError("no edges defined")
    return _finish(nodes, edges, source, sink)


def _parse_json(text: str) -> FlowNetwork:
    try:
        doc = json.loads(text, parse_float=_refuse_float)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict) or "edges" not in doc:
        raise ParseError("JSON document must be an object with an 'edges' field")

    nodes: list[str] = []
    seen: set[str] = set()
    declared = doc.get("nodes", [])
    if not isinstance(declared, list):
        raise ParseError("'nodes' must be a list of strings")
    for n in declared:
        if not isinstance(n, str):
            raise ParseError(f"node id must be a string, got {n!r}")
        if n not in seen:
            seen.add(n)
            nodes.append(n)

    edges: list[Edge] = []
    edge_ids: set[str] = set()
    for i, item in enumerate(doc["edges"]):
        if not isinstance(item, dict):
            raise ParseError(f"edge #{i} must be an object")
        try:
            eid, tail, head, cap_raw = item["id"], item["from"], item["to"], item["cap"]
        except KeyError as exc:
            raise ParseError(f"edge #{i} missing field {exc.args[0]!r}") from None
        if eid in edge_ids:
            raise ParseError(f"duplicate edge id {eid!r}")
        if declared and (tail not in seen or head not in seen):
            missing = tail if tail not in seen else head
            raise ParseError(f"edge {eid!r} references unknown node {missing!r}")
        try:
            cap = as_rational(cap_raw, what="capacity")
        except (TypeError, ValueError) as exc:
            raise ParseError(f"edge {eid!r}: {exc}") from None
        if cap <= 0:
            raise ParseError(f"non-positive capacity {cap} on edge {eid!r}")
        edge_ids.add(eid)
        for n in (tail, head):
            if n not in seen:
                seen.add(n)
                nodes.append(n)
        edges.append(Edge(eid, tail, head, cap))

    if not edges:
        raise ParseError("no edges defined")
    return _finish(nodes, edges, doc.get("source"), doc.get("sink"))


def _refuse_float(token: str) -> Fraction:
    # json would hand us a float; convert the literal text exactly instead
    return Fraction(token)


def _finish(
    nodes: list[str], edges: list[Edge], source: Optional[str], sink: Optional[str]
) -> FlowNetwork:
    in_deg = {n: 0 for n in nodes}
    out_deg = {n: 0 for n in nodes}
    for e in edges:
        out_deg[e.tail] += 1
        in_deg[e.head] += 1
    if source is None:
        candidates = [n for n in nodes if in_deg[n] == 0 and out_deg[n] > 0]
        if len(candidates) != 1:
            raise ParseError(
                f"cannot infer source: {len(candidates)} nodes with in-degree 0 "
                "(declare one with a 'source' line)"
            )
        source = candidates[0]
    if sink is None:
        candidates = [n for n in nodes if out_deg[n] == 0 and in_deg[n] > 0]
        if len(candidates) != 1:
            raise ParseError(
                f"cannot infer sink: {len(candidates)} nodes with out-degree 0 "
                "(declare one with a 'sink' line)"
            )
        sink = candidates[0]
    return FlowNetwork(tuple(nodes), tuple(edges), source, sink)


def render_network(net: FlowNetwork) -> str:
    """Line-format rendering; `parse_network(render_network(net)) == net`."""
    lines = [f"node {n}" for n in net.nodes]
    lines.append(f"source {net.source}")
    lines.append(f"sink {net.sink}")
    lines.extend(f"edge {e.id} {e.tail} {e.head} {rational_str(e.cap)}" for e in net.edges)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Validation


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    entity: str
    severity: str = "error"


@dataclass(frozen=True)
class ValidationReport:
    diagnostics: tuple[Diagnostic, ...]

    @property
    def ok(self) -> bool:
        return not any(d.severity == "error" for d in self.diagnostics)

    def errors(self) -> tuple[Diagnostic, ...]:
        return tuple(d for d in self.diagnostics if d.severity == "error")


def validate(net: FlowNetwork) -> ValidationReport:
    """Check the model assumptions and report *all* failures.

    Checks: acyclicity, unique source (the only in-degree-0 node) and sink
    (the only out-degree-0 node), positive capacities, and that every edge
    lies on at least one source-sink path.
    """
    diags: list[Diagnostic] = []

    for e in net.edges:
        if e.cap <= 0:
            diags.append(Diagnostic("nonpositive-capacity", f"capacity {e.cap} is not > 0", e.id))

    if net.source == net.sink:
        diags.append(Diagnostic("source-equals-sink", "source and sink are the same node", net.source))

    cyclic_nodes = _cycle_nodes(net)
    if cyclic_nodes:
        diags.append(
            Diagnostic("cycle", f"cycle detected among nodes {sorted(cyclic_nodes)}", ",".join(sorted(cyclic_nodes)))
        )

    in_deg = {n: 0 for n in net.nodes}
    out_deg = {n: 0 for n in net.nodes}
    for e in net.edges:
        out_deg[e.tail] += 1
        in_deg[e.head] += 1
    for n in net.nodes:
        if in_deg[n] == 0 and out_deg[n] == 0:
            diags.append(Diagnostic("isolated-node", "node has no incident edges", n))
        elif n != net.source and in_deg[n] == 0:
            diags.append(Diagnostic("extra-source", "node other than the source has in-degree 0", n))
        elif n != net.sink and out_deg[n] == 0:
            diags.append(Diagnostic("extra-sink", "node other than the sink has out-degree 0", n))
    if in_deg.get(net.source, 0) > 0:
        diags.append(Diagnostic("source-degree", "source has incoming edges", net.source))
    if out_deg.get(net.sink, 0) > 0:
        diags.append(Diagnostic("sink-degree", "sink has outgoing edges", net.sink))

    for eid in _off_path_edges(net):
        diags.append(Diagnostic("off-path-edge", "edge lies on no source-sink path", eid))

    return ValidationReport(tuple(diags))


def prune_to_paths(net: FlowNetwork) -> tuple[FlowNetwork, tuple[str, ...]]:
    """Drop every edge that is on no source-sink path; returns the pruned
    network and the ids that were removed."""
    off = _off_path_edges(net)
    return net.without_edges(off), off


def _cycle_nodes(net: FlowNetwork) -> set[str]:
    # Kahn's algorithm; whatever cannot be peeled off sits on a cycle.
    in_deg = {n: 0 for n in net.nodes}
    succ: dict[str, list[str]] = {n: [] for n in net.nodes}
    for e in net.edges:
        in_deg[e.head] += 1
        succ[e.tail].append(e.head)
    queue = [n for n in net.nodes if in_deg[n] == 0]
    remaining = set(net.nodes)
    while queue:
        n = queue.pop()
        remaining.discard(n)
        for m in succ[n]:
            in_deg[m] -= 1
            if in_deg[m] == 0:
                queue.append(m)
    return remaining


def _off_path_edges(net: FlowNetwork) -> tuple[str, ...]:
    forward = _reachable(net, net.source, direction="out")
    backward = _reachable(net, net.sink, direction="in")
    return tuple(e.id for e in net.edges if e.tail not in forward or e.head not in backward)


def _reachable(net: FlowNetwork, start: str, direction: str) -> set[str]:
    adj: dict[str, list[str]] = {n: [] for n in net.nodes}
    for e in net.edges:
        if direction == "out":
            adj[e.tail].append(e.head)
        else:
            adj[e.head].append(e.tail)
    seen = {start}
    stack = [start]
    while stack:
        n = stack.pop()
        for m in adj.get(n, ()):
            if m not in seen:
                seen.add(m)
                stack.append(m)
    return seen
