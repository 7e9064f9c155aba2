"""Mechanical audits of mechanism properties.

Each check searches for a concrete counterexample (a profitable deviation, a
profitable split or merge, a payoff that drops when it must not) and returns
a reproducible witness when it finds one.  A passing audit is evidence, not
a proof: grids are finite, but they are augmented with the structural
breakpoints (critical values, the other players' reports) where the payoff
functions kink.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Optional, Sequence, Union

from .complementarity import Relation, probe_constant_relation
from .cuts import UNBOUNDED, PairKind, classify_pair_structure, critical_value
from .maxflow import coalition_value, max_flow
from .mechanisms import Allocation, mc_allocate, resolve_mechanism, shapley
from .network import (
    Edge,
    FlowNetwork,
    RationalLike,
    as_rational,
    resolve_reports,
    strip_terminal_edges,
    validate,
)

MechanismLike = Union[str, Callable[..., Allocation]]


@dataclass(frozen=True)
class DeviationWitness:
    player: str
    truthful_payoff: Fraction
    best_report: Fraction
    best_payoff: Fraction
    gain: Fraction
    others_reports: dict[str, Fraction]


@dataclass(frozen=True)
class SweepTrace:
    edge: str
    grid: tuple[Fraction, ...]
    values: tuple[Fraction, ...]
    context: dict = field(default_factory=dict)


@dataclass(frozen=True)
class AuditReport:
    property: str
    mechanism: str
    verdict: str  # "pass" | "violation" | "not-tested"
    witness: Optional[dict] = None
    trace: Optional[SweepTrace] = None

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"


def _mech_name(mechanism: MechanismLike) -> str:
    if isinstance(mechanism, str):
        return mechanism
    return getattr(mechanism, "__name__", "custom")


def best_deviation(
    net: FlowNetwork,
    mechanism: MechanismLike,
    player: str,
    truth: Optional[RationalLike] = None,
    others_reports: Optional[Mapping[str, RationalLike]] = None,
    grid_size: int = 8,
) -> DeviationWitness:
    """Best under-report for one player with everyone else's reports fixed.

    The grid is `grid_size` evenly spaced reports in (0, truth] plus the
    exact breakpoints: the truth itself, the player's critical value, and
    every other player's report (clipped to the feasible interval).  The
    truth is always included, so the gain is never negative.
    """
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    mech = resolve_mechanism(mechanism)
    cap = as_rational(truth if truth is not None else net.edge(player).cap)
    if cap <= 0:
        raise ValueError("the player's true capacity must be > 0")
    others = resolve_reports(net, others_reports)

    candidates = {Fraction(k) * cap / grid_size for k in range(1, grid_size + 1)}
    candidates.add(cap)
    cv = critical_value(net, {**others, player: cap}, player)
    if cv is not UNBOUNDED and 0 < cv <= cap:
        candidates.add(cv)
    for eid, q in others.items():
        if eid != player and 0 < q <= cap:
            candidates.add(q)

    def payoff_at(report: Fraction) -> Fraction:
        return mech(net, {**others, player: report}).payoffs[player]

    truthful = payoff_at(cap)
    best_report, best_payoff = cap, truthful
    for report in sorted(candidates):
        got = payoff_at(report)
        if got > best_payoff:
            best_report, best_payoff = report, got
    return DeviationWitness(
        player=player,
        truthful_payoff=truthful,
        best_report=best_report,
        best_payoff=best_payoff,
        gain=best_payoff - truthful,
        others_reports={eid: q for eid, q in others.items() if eid != player},
    )


def check_dsic(
    net: FlowNetwork,
    mechanism: MechanismLike,
    reports: Optional[Mapping[str, RationalLike]] = None,
    grid_size: int = 8,
) -> AuditReport:
    """Profitable under-report search for every player, others' reports fixed
    at the given profile (default: the true capacities)."""
    others = resolve_reports(net, reports)
    for e in net.edges:
        witness = best_deviation(
            net, mechanism, e.id, truth=e.cap, others_reports=others, grid_size=grid_size
        )
        if witness.gain > 0:
            return AuditReport(
                "dsic",
                _mech_name(mechanism),
                "violation",
                witness={
                    "player": witness.player,
                    "truthful_payoff": witness.truthful_payoff,
                    "best_report": witness.best_report,
                    "best_payoff": witness.best_payoff,
                    "gain": witness.gain,
                    "others_reports": witness.others_reports,
                },
            )
    return AuditReport("dsic", _mech_name(mechanism), "pass")


def check_sir(
    net: FlowNetwork,
    mechanism: MechanismLike,
    reports: Optional[Mapping[str, RationalLike]] = None,
) -> AuditReport:
    """Strong individual rationality: no player gets less than her
    stand-alone value, and every positively-reported edge gets a strictly
    positive payoff."""
    mech = resolve_mechanism(mechanism)
    caps = resolve_reports(net, reports)
    alloc = mech(net, caps)
    for e in net.edges:
        payoff = alloc.payoffs[e.id]
        stand_alone = coalition_value(net, caps, [e.id])
        if payoff < stand_alone:
            return AuditReport(
                "sir",
                _mech_name(mechanism),
                "violation",
                witness={"player": e.id, "payoff": payoff, "stand_alone": stand_alone},
            )
        if caps[e.id] > 0 and payoff <= 0:
            return AuditReport(
                "sir",
                _mech_name(mechanism),
                "violation",
                witness={"player": e.id, "payoff": payoff, "report": caps[e.id]},
            )
    return AuditReport("sir", _mech_name(mechanism), "pass")


# ---------------------------------------------------------------------------
# Split / merge transformations


def split_edge(
    net: FlowNetwork,
    reports: Optional[Mapping[str, RationalLike]],
    edge_id: str,
    report_a: RationalLike,
    report_b: RationalLike,
) -> tuple[FlowNetwork, dict[str, Fraction], tuple[str, str]]:
    """Replace one edge by two parallel successors whose reports add up to
    the original report; the true capacity is split in the same proportion.
    Returns the new network, the new report vector, and the successor ids."""
    caps = resolve_reports(net, reports)
    qa, qb = as_rational(report_a), as_rational(report_b)
    if qa < 0 or qb < 0:
        raise ValueError("split parts must be >= 0")
    if qa + qb != caps[edge_id]:
        raise ValueError(
            f"split parts {qa} + {qb} must add up to the report {caps[edge_id]}"
        )
    old = net.edge(edge_id)
    if caps[edge_id] > 0:
        truth_a = old.cap * qa / caps[edge_id]
    else:
        truth_a = old.cap / 2
    id_a, id_b = f"{edge_id}_1", f"{edge_id}_2"
    for fresh in (id_a, id_b):
        if fresh in net.by_id:
            raise ValueError(f"successor id {fresh!r} already exists")
    new_net = net.replace_edge(
        edge_id,
        [
            Edge(id_a, old.tail, old.head, truth_a),
            Edge(id_b, old.tail, old.head, old.cap - truth_a),
        ],
    )
    new_reports = {eid: q for eid, q in caps.items() if eid != edge_id}
    new_reports[id_a] = qa
    new_reports[id_b] = qb
    return new_net, new_reports, (id_a, id_b)


def merge_parallel(
    net: FlowNetwork,
    reports: Optional[Mapping[str, RationalLike]],
    edge_a: str,
    edge_b: str,
) -> tuple[FlowNetwork, dict[str, Fraction], str]:
    """Merge two parallel edges (same tail, same head) into one whose truth
    and report are the respective sums."""
    ea, eb = net.edge(edge_a), net.edge(edge_b)
    if ea.tail != eb.tail or ea.head != eb.head:
        raise ValueError(f"edges {edge_a!r} and {edge_b!r} are not parallel")
    caps = resolve_reports(net, reports)
    merged_id = f"{edge_a}+{edge_b}"
    if merged_id in net.by_id:
        raise ValueError(f"merged id {merged_id!r} already exists")
    merged = Edge(merged_id, ea.tail, ea.head, ea.cap + eb.cap)
    without_b = net.without_edges([edge_b])
    new_net = without_b.replace_edge(edge_a, [merged])
    new_reports = {eid: q for eid, q in caps.items() if eid not in (edge_a, edge_b)}
    new_reports[merged_id] = caps[edge_a] + caps[edge_b]
    return new_net, new_reports, merged_id


def default_split_grid(report: Fraction) -> list[tuple[Fraction, Fraction]]:
    """Half/half plus the off-center splits report/2 +- k*report/8."""
    grid = []
    for k in range(4):
        low = report / 2 - k * report / 8
        grid.append((low, report - low))
    return grid


def check_sp(
    net: FlowNetwork,
    mechanism: MechanismLike,
    reports: Optional[Mapping[str, RationalLike]],
    edge_id: str,
    split_grid: Optional[Sequence[tuple[RationalLike, RationalLike]]] = None,
) -> AuditReport:
    """Split-proofness: no way of splitting the edge into two parallels pays
    the pair more than the original edge received."""
    mech = resolve_mechanism(mechanism)
    caps = resolve_reports(net, reports)
    before = mech(net, caps).payoffs[edge_id]
    grid = (
        [(as_rational(a), as_rational(b)) for a, b in split_grid]
        if split_grid is not None
        else default_split_grid(caps[edge_id])
    )
    for qa, qb in grid:
        if qa <= 0 or qb <= 0:
            continue
        new_net, new_reports, (id_a, id_b) = split_edge(net, caps, edge_id, qa, qb)
        after_alloc = mech(new_net, new_reports)
        after = after_alloc.payoffs[id_a] + after_alloc.payoffs[id_b]
        if after > before:
            return AuditReport(
                "sp",
                _mech_name(mechanism),
                "violation",
                witness={
                    "edge": edge_id,
                    "split": (qa, qb),
                    "payoff_before": before,
                    "payoff_after": after,
                    "gain": after - before,
                },
            )
    return AuditReport("sp", _mech_name(mechanism), "pass")


def check_mp(
    net: FlowNetwork,
    mechanism: MechanismLike,
    reports: Optional[Mapping[str, RationalLike]],
    edge_a: str,
    edge_b: str,
) -> AuditReport:
    """Merge-proofness: merging two parallel edges never pays the merged
    player more than the pair received separately."""
    mech = resolve_mechanism(mechanism)
    caps = resolve_reports(net, reports)
    alloc = mech(net, caps)
    before = alloc.payoffs[edge_a] + alloc.payoffs[edge_b]
    new_net, new_reports, merged_id = merge_parallel(net, caps, edge_a, edge_b)
    after = mech(new_net, new_reports).payoffs[merged_id]
    if after > before:
        return AuditReport(
            "mp",
            _mech_name(mechanism),
            "violation",
            witness={
                "edges": (edge_a, edge_b),
                "payoff_before": before,
                "payoff_after": after,
                "gain": after - before,
            },
        )
    return AuditReport("mp", _mech_name(mechanism), "pass")


# ---------------------------------------------------------------------------
# Cross monotonicity


def default_increase_grid(base: Fraction) -> list[Fraction]:
    span = max(base, Fraction(1))
    return [base + Fraction(k) * span / 6 for k in range(1, 7)]


def check_cm(
    net: FlowNetwork,
    mechanism: MechanismLike,
    reports: Optional[Mapping[str, RationalLike]],
    edge_id: str,
    increase_grid: Optional[Sequence[RationalLike]] = None,
) -> AuditReport:
    """Cross monotonicity: when one player's report rises and the max-flow
    value rises with it all the way, nobody else's payoff may fall.

    A grid point is judged only when the flow gain equals the report gain,
    i.e. the whole step sits in the regime where the edge is still the
    binding bottleneck; steps that overshoot the edge's critical value are
    recorded in the trace but not judged, because past that point the flow
    no longer responds to the report.
    """
    mech = resolve_mechanism(mechanism)
    caps = resolve_reports(net, reports)
    base = caps[edge_id]
    base_alloc = mech(net, caps)
    base_flow = max_flow(net, caps).value
    grid = (
        [as_rational(x) for x in increase_grid]
        if increase_grid is not None
        else default_increase_grid(base)
    )
    points: list[Fraction] = []
    values: list[Fraction] = []
    judged: list[bool] = []
    violation: Optional[dict] = None
    for raised in grid:
        if raised <= base:
            raise ValueError(f"grid point {raised} does not increase the report {base}")
        bumped = {**caps, edge_id: raised}
        alloc = mech(net, bumped)
        flow = max_flow(net, bumped).value
        is_judged = flow - base_flow == raised - base
        points.append(raised)
        values.append(flow)
        judged.append(is_judged)
        if not is_judged or violation is not None:
            continue
        for other in net.edge_ids:
            if other == edge_id:
                continue
            if alloc.payoffs[other] < base_alloc.payoffs[other]:
                violation = {
                    "raised_edge": edge_id,
                    "from": base,
                    "to": raised,
                    "flow_before": base_flow,
                    "flow_after": flow,
                    "hurt_player": other,
                    "payoff_before": base_alloc.payoffs[other],
                    "payoff_after": alloc.payoffs[other],
                }
                break
    trace = SweepTrace(
        edge=edge_id,
        grid=tuple(points),
        values=tuple(values),
        context={"judged": tuple(judged), "base_flow": base_flow},
    )
    if violation is not None:
        return AuditReport("cm", _mech_name(mechanism), "violation", witness=violation, trace=trace)
    return AuditReport("cm", _mech_name(mechanism), "pass", trace=trace)


# ---------------------------------------------------------------------------
# Cross-effect sweep of the cut-splitting mechanism


def cross_effect_sweep(
    net: FlowNetwork,
    reports: Optional[Mapping[str, RationalLike]],
    swept_edge: str,
    observed_edge: str,
    points_per_interval: int = 8,
) -> AuditReport:
    """Sweep one edge's report and trace another's payoff under the
    cut-splitting mechanism.

    The observed trajectory must match the pair's structure: an independent
    pair rises strictly up to the swept edge's critical value and stays flat
    after; an inclusive pair stays flat and then falls strictly; any other
    pair rises strictly and then falls strictly.  If either edge runs
    directly from source to sink the payoff never moves at all.
    """
    if points_per_interval < 2:
        raise ValueError("points_per_interval must be >= 2")
    caps = resolve_reports(net, reports)
    allocations: dict[Fraction, Allocation] = {}

    def observed_at(x: Fraction) -> Fraction:
        alloc = mc_allocate(net, {**caps, swept_edge: x})
        allocations[x] = alloc
        return alloc.payoffs[observed_edge]

    terminal = net.is_terminal_edge(swept_edge) or net.is_terminal_edge(observed_edge)
    if terminal:
        span = max(Fraction(1), 2 * caps[swept_edge])
        grid = [Fraction(k) * span / points_per_interval for k in range(1, points_per_interval + 1)]
        values = [observed_at(x) for x in grid]
        trace = SweepTrace(
            swept_edge,
            tuple(grid),
            tuple(values),
            {"case": "terminal-edge", "allocations": tuple(allocations[x] for x in grid)},
        )
        if any(v != values[0] for v in values):
            return AuditReport(
                "cross-effect",
                "mc",
                "violation",
                witness={"expected": "constant payoff for terminal-edge pairs"},
                trace=trace,
            )
        return AuditReport("cross-effect", "mc", "pass", trace=trace)

    structure = classify_pair_structure(net, caps, swept_edge, observed_edge)
    stripped = strip_terminal_edges(net)
    stripped_caps = {eid: caps[eid] for eid in stripped.edge_ids}
    threshold = critical_value(stripped, stripped_caps, swept_edge)
    if threshold is UNBOUNDED:  # pragma: no cover - impossible off the terminal case
        raise AssertionError("non-terminal edge with unbounded critical value")

    rising = [
        Fraction(k) * threshold / points_per_interval for k in range(1, points_per_interval + 1)
    ]
    span = max(threshold, Fraction(1))
    beyond = [
        threshold + Fraction(k) * span / points_per_interval
        for k in range(1, points_per_interval + 1)
    ]
    rising_vals = [observed_at(x) for x in rising]
    beyond_vals = [observed_at(x) for x in beyond]
    trace = SweepTrace(
        swept_edge,
        tuple(rising + beyond),
        tuple(rising_vals + beyond_vals),
        {
            "case": structure.kind.value,
            "critical_value": threshold,
            "observed_edge": observed_edge,
            "allocations": tuple(allocations[x] for x in rising + beyond),
        },
    )

    def strictly(seq: list[Fraction], direction: int) -> bool:
        return all((b - a) * direction > 0 for a, b in zip(seq, seq[1:]))

    def constant(seq: list[Fraction]) -> bool:
        return all(v == seq[0] for v in seq)

    expected = {
        PairKind.INDEPENDENT: lambda: strictly(rising_vals, +1)
        and constant(beyond_vals)
        and (not rising_vals or beyond_vals[0] == rising_vals[-1]),
        PairKind.INCLUSIVE: lambda: constant(rising_vals)
        and strictly(beyond_vals, -1)
        and (not rising_vals or beyond_vals[0] < rising_vals[-1]),
        PairKind.NEITHER: lambda: strictly(rising_vals, +1)
        and strictly(beyond_vals, -1)
        and (not rising_vals or beyond_vals[0] < rising_vals[-1]),
    }
    if threshold == 0:
        # the rising interval is empty; only the tail behaviour is testable
        ok = (
            constant(beyond_vals)
            if structure.kind is PairKind.INDEPENDENT
            else strictly(beyond_vals, -1)
        )
    else:
        ok = expected[structure.kind]()
    if ok:
        return AuditReport("cross-effect", "mc", "pass", trace=trace)
    return AuditReport(
        "cross-effect",
        "mc",
        "violation",
        witness={"case": structure.kind.value, "critical_value": threshold},
        trace=trace,
    )


# ---------------------------------------------------------------------------
# Shapley comparative-statics probe


def shapley_relation_probe(
    net: FlowNetwork,
    i: str,
    j: str,
    sample_count: int = 50,
    seed: int = 0,
    sweep_points: int = 6,
) -> AuditReport:
    """Check that the Shapley payoff of one edge moves with another edge's
    report in the direction the pair's (sampled) constant relation predicts:
    non-decreasing for complements, non-increasing for substitutes.  An
    inconsistent sample leaves the claim refuted and the probe untested."""
    verdict = probe_constant_relation(net, i, j, sample_count, seed)
    if verdict.constant_claim.status != "supported":
        return AuditReport(
            "shapley-relation",
            "shapley",
            "not-tested",
            witness={"constant_claim": verdict.constant_claim.status},
        )
    direction = {
        Relation.COMPLEMENTARY: +1,
        Relation.SUBSTITUTABLE: -1,
        Relation.DEGENERATE: 0,
    }[verdict.relation]
    span = net.edge(i).cap + 1
    grid = [Fraction(k) * span / sweep_points for k in range(1, sweep_points + 1)]
    base = resolve_reports(net, None)
    for config in verdict.sample_configs:
        rest = dict(base)
        rest.update(dict(config))
        values = [shapley(net, {**rest, i: x}).payoffs[j] for x in grid]
        for a, b in zip(values, values[1:]):
            delta = b - a
            bad = (
                (direction > 0 and delta < 0)
                or (direction < 0 and delta > 0)
                or (direction == 0 and delta != 0)
            )
            if bad:
                return AuditReport(
                    "shapley-relation",
                    "shapley",
                    "violation",
                    witness={
                        "pair": (i, j),
                        "relation": verdict.relation.value,
                        "configuration": dict(config),
                        "grid": grid,
                        "values": values,
                    },
                )
    return AuditReport(
        "shapley-relation",
        "shapley",
        "pass",
        witness={
            "pair": (i, j),
            "relation": verdict.relation.value,
            "pattern": verdict.pattern,
            "samples": len(verdict.sample_configs),
        },
    )


# ---------------------------------------------------------------------------
# Random instances


@dataclass(frozen=True)
class CapLattice:
    numerator_max: int = 8
    denominator: int = 4

    def draw(self, rng: random.Random) -> Fraction:
        return Fraction(rng.randint(1, self.numerator_max), self.denominator)


def random_network(
    seed: int,
    max_nodes: int = 6,
    max_edges: int = 8,
    cap_lattice: CapLattice = CapLattice(),
) -> FlowNetwork:
    """Seed-deterministic random instance: internal nodes are ranked so the
    graph is acyclic by construction, edges go from lower to higher rank
    (parallel edges allowed), and everything off a source-sink path is
    pruned away.  The result always validates."""
    if max_nodes < 2:
        raise ValueError("need at least the source and the sink")
    rng = random.Random(seed)
    while True:
        n_internal = rng.randint(0, max_nodes - 2)
        ranked = ["s"] + [f"v{k}" for k in range(1, n_internal + 1)] + ["t"]
        rank = {name: idx for idx, name in enumerate(ranked)}
        m = rng.randint(1, max_edges)
        raw: list[tuple[str, str]] = []
        for _ in range(m):
            tail, head = rng.sample(ranked, 2)
            if rank[tail] > rank[head]:
                tail, head = head, tail
            raw.append((tail, head))

        fwd = _closure(raw, "s", forward=True)
        bwd = _closure(raw, "t", forward=False)
        kept = [(u, v) for (u, v) in raw if u in fwd and v in bwd]
        if not kept:
            continue
        used = {"s", "t"}
        for u, v in kept:
            used.update((u, v))
        nodes = tuple(n for n in ranked if n in used)
        edges = tuple(
            Edge(f"e{k}", u, v, cap_lattice.draw(rng)) for k, (u, v) in enumerate(kept, start=1)
        )
        net = FlowNetwork(nodes, edges, "s", "t")
        if validate(net).ok:
            return net


def _closure(arcs: Iterable[tuple[str, str]], start: str, forward: bool) -> set[str]:
    adj: dict[str, list[str]] = {}
    for u, v in arcs:
        a, b = (u, v) if forward else (v, u)
        adj.setdefault(a, []).append(b)
    seen = {start}
    stack = [start]
    while stack:
        node = stack.pop()
        for nxt in adj.get(node, ()):
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return seen


# ---------------------------------------------------------------------------
# Bundled audit runner


def parallel_pairs(net: FlowNetwork) -> list[tuple[str, str]]:
    pairs = []
    for a in range(len(net.edges)):
        for b in range(a + 1, len(net.edges)):
            ea, eb = net.edges[a], net.edges[b]
            if ea.tail == eb.tail and ea.head == eb.head:
                pairs.append((ea.id, eb.id))
    return pairs


def audit_all(
    net: FlowNetwork,
    mechanism: MechanismLike,
    reports: Optional[Mapping[str, RationalLike]] = None,
    grid_size: int = 6,
) -> list[AuditReport]:
    """Run every property check with default grids: one deviation search and
    one cross-monotonicity sweep per player, one split check per edge, one
    merge check per parallel pair, and the rationality check."""
    out: list[AuditReport] = [check_dsic(net, mechanism, reports, grid_size=grid_size)]
    out.append(check_sir(net, mechanism, reports))
    caps = resolve_reports(net, reports)
    for eid in net.edge_ids:
        out.append(check_sp(net, mechanism, caps, eid))
    for ea, eb in parallel_pairs(net):
        out.append(check_mp(net, mechanism, caps, ea, eb))
    for eid in net.edge_ids:
        out.append(check_cm(net, mechanism, caps, eid))
    return out
