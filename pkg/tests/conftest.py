from fractions import Fraction

import pytest

from flowmech import (
    load_fixture,
    max_flow,
    minimal_cuts_bruteforce,
    random_network,
    resolve_reports,
    strip_terminal_edges,
)


def flow_value_via_cuts(net, reports=None) -> Fraction:
    """Independent max-flow oracle: the cheapest brute-forced minimal cut."""
    family = minimal_cuts_bruteforce(net, reports)
    if not family.cuts:
        return Fraction(0)
    return min(family.cut_capacities)


def mc_via_bruteforce(net, reports=None) -> dict[str, Fraction]:
    """Recompute the cut-splitting allocation from the brute-force cut family."""
    caps = resolve_reports(net, reports)
    payoffs = {eid: Fraction(0) for eid in net.edge_ids}
    for eid in net.terminal_edge_ids():
        payoffs[eid] = caps[eid]
    remaining = strip_terminal_edges(net)
    rem_caps = {eid: caps[eid] for eid in remaining.edge_ids}
    family = minimal_cuts_bruteforce(remaining, rem_caps)
    if family.cuts:
        flow_value = min(family.cut_capacities)
        share = Fraction(flow_value, len(family.cuts))
        for M, total in zip(family.cuts, family.cut_capacities):
            for eid in M:
                payoffs[eid] += share * rem_caps[eid] / total
    return payoffs


def corpus(count: int, start: int = 1, **kwargs):
    return [random_network(seed, **kwargs) for seed in range(start, start + count)]


@pytest.fixture(scope="session")
def fuzz_corpus():
    """100 seeded random instances, at most 8 edges each."""
    return corpus(100)


@pytest.fixture(scope="session")
def cut_corpus():
    """200 seeded random instances for the cut-enumeration equivalence run."""
    return corpus(200)


@pytest.fixture(scope="session")
def all_fixtures():
    return {name: load_fixture(name) for name in (
        "fig1", "fig2a", "fig2b", "fig3a", "fig3b", "fig4", "fig5", "fig9",
        "neither", "series", "diverge", "converge",
    )}


def assert_exact_flow(net, reports=None):
    """Conservation and capacity constraints must hold exactly on the witness."""
    caps = resolve_reports(net, reports)
    result = max_flow(net, caps)
    for e in net.edges:
        assert 0 <= result.edge_flows[e.id] <= caps[e.id]
    for node in net.nodes:
        if node in (net.source, net.sink):
            continue
        inflow = sum(result.edge_flows[e.id] for e in net.edges if e.head == node)
        outflow = sum(result.edge_flows[e.id] for e in net.edges if e.tail == node)
        assert inflow == outflow
    out_s = sum(result.edge_flows[e.id] for e in net.edges if e.tail == net.source)
    in_s = sum(result.edge_flows[e.id] for e in net.edges if e.head == net.source)
    assert result.value == out_s - in_s
    assert net.source in result.source_side
    assert net.sink not in result.source_side
    return result
