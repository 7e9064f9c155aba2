from fractions import Fraction as F

import pytest

from flowmech import (
    CapLattice,
    best_deviation,
    check_cm,
    check_dsic,
    check_mp,
    check_sir,
    check_sp,
    cross_effect_sweep,
    enumerate_minimal_cuts,
    load_fixture,
    max_flow,
    mc_allocate,
    merge_parallel,
    random_network,
    shapley_relation_probe,
    split_edge,
    validate,
)


# ---------------------------------------------------------------------------
# Deviation search


def test_core_select_rewards_under_reporting():
    net = load_fixture("fig1")
    witness = best_deviation(
        net, "core-select", "e1", truth=2, others_reports={"e2": 1, "e3": 1, "e4": 1}
    )
    assert witness.truthful_payoff == 0
    assert witness.best_report == 1
    assert witness.best_payoff == 1
    assert witness.gain == 1


def test_mc_and_shapley_gain_nothing_on_the_same_instance():
    net = load_fixture("fig1")
    for mechanism in ("mc", "shapley"):
        witness = best_deviation(net, mechanism, "e1", truth=2)
        assert witness.gain == 0, mechanism


def test_deviation_gain_never_negative():
    net = load_fixture("fig4")
    for mechanism in ("mc", "shapley", "core-select"):
        for eid in net.edge_ids:
            assert best_deviation(net, mechanism, eid).gain >= 0


def test_check_dsic_flags_core_select():
    report = check_dsic(load_fixture("fig1"), "core-select")
    assert report.verdict == "violation"
    assert report.witness["player"] == "e1"


# ---------------------------------------------------------------------------
# Strong individual rationality


def test_sir_verdicts_on_the_diamond():
    net = load_fixture("fig1")
    bad = check_sir(net, "core-select")
    assert bad.verdict == "violation" and bad.witness["player"] == "e1"
    assert check_sir(net, "mc").verdict == "pass"
    assert check_sir(net, "shapley").verdict == "pass"


def test_sir_mc_chain():
    assert check_sir(load_fixture("fig5"), "mc").verdict == "pass"


# ---------------------------------------------------------------------------
# Split and merge transformations


def test_split_fan_edge_reproduces_split_fixture():
    fan = load_fixture("fig2a")
    new_net, new_reports, (id_a, id_b) = split_edge(fan, None, "e1", 1, 1)
    assert new_net == load_fixture("fig2b")
    assert new_reports[id_a] == 1 and new_reports[id_b] == 1


def test_split_with_zero_part_keeps_flow():
    net = load_fixture("fig1")
    new_net, new_reports, _ = split_edge(net, None, "e1", 2, 0)
    assert max_flow(new_net, new_reports).value == max_flow(net).value


def test_split_preserves_cut_totals():
    net = load_fixture("fig1")
    before = sorted(enumerate_minimal_cuts(net).cut_capacities)
    new_net, new_reports, _ = split_edge(net, None, "e1", F(1, 2), F(3, 2))
    after = sorted(enumerate_minimal_cuts(new_net, new_reports).cut_capacities)
    assert before == after


def test_split_requires_matching_sum():
    with pytest.raises(ValueError, match="add up"):
        split_edge(load_fixture("fig1"), None, "e1", 1, 2)


def test_split_divides_truth_proportionally():
    net = load_fixture("fig1")
    new_net, _, (id_a, id_b) = split_edge(net, {"e1": 1}, "e1", F(1, 4), F(3, 4))
    assert new_net.edge(id_a).cap == F(1, 2)  # truth 2 split in the 1:3 ratio
    assert new_net.edge(id_b).cap == F(3, 2)


def test_merge_parallel_reproduces_merged_fixture():
    pair = load_fixture("fig3a")
    new_net, new_reports, merged_id = merge_parallel(pair, None, "e1", "e2")
    assert new_net == load_fixture("fig3b")
    assert new_reports[merged_id] == 2


def test_merge_then_split_restores_flow_and_cut_totals():
    net = load_fixture("fig1")
    merged_net, merged_reports, merged_id = merge_parallel(net, None, "e3", "e4")
    assert max_flow(merged_net, merged_reports).value == 2
    back_net, back_reports, _ = split_edge(merged_net, merged_reports, merged_id, 1, 1)
    assert max_flow(back_net, back_reports).value == max_flow(net).value
    assert sorted(enumerate_minimal_cuts(back_net, back_reports).cut_capacities) == sorted(
        enumerate_minimal_cuts(net).cut_capacities
    )


def test_merge_requires_parallel_edges():
    with pytest.raises(ValueError, match="not parallel"):
        merge_parallel(load_fixture("fig1"), None, "e1", "e3")


# ---------------------------------------------------------------------------
# Split-proofness / merge-proofness


def test_shapley_split_violation_on_fan():
    report = check_sp(load_fixture("fig2a"), "shapley", None, "e1")
    assert report.verdict == "violation"
    assert report.witness["split"] == (F(1), F(1))
    assert report.witness["gain"] == F(2, 42) - F(1, 30)


def test_mc_split_proof_on_fan():
    assert check_sp(load_fixture("fig2a"), "mc", None, "e1").verdict == "pass"


def test_mc_split_proof_single_terminal_edge():
    from flowmech import parse_network

    net = parse_network("edge e s t 2\n")
    assert check_sp(net, "mc", None, "e").verdict == "pass"


def test_shapley_merge_violation_on_parallel_pair():
    report = check_mp(load_fixture("fig3a"), "shapley", None, "e1", "e2")
    assert report.verdict == "violation"
    assert report.witness["gain"] == F(1, 2) - F(1, 3)


def test_mc_merge_proof():
    assert check_mp(load_fixture("fig3a"), "mc", None, "e1", "e2").verdict == "pass"
    from flowmech import parse_network

    two = parse_network("edge a s t 1\nedge b s t 2\n")
    assert check_mp(two, "mc", None, "a", "b").verdict == "pass"


# ---------------------------------------------------------------------------
# Cross monotonicity


def test_shapley_cm_violation_on_half_diamond():
    report = check_cm(load_fixture("fig4"), "shapley", None, "e1", increase_grid=[F(3, 5)])
    assert report.verdict == "violation"
    w = report.witness
    assert w["hurt_player"] == "e2"
    assert (w["payoff_before"], w["payoff_after"]) == (F(1, 3), F(19, 60))
    assert (w["flow_before"], w["flow_after"]) == (F(1), F(11, 10))


def test_mc_cm_passes_on_half_diamond():
    report = check_cm(load_fixture("fig4"), "mc", None, "e1", increase_grid=[F(3, 5)])
    assert report.verdict == "pass"
    assert report.trace.context["judged"] == (True,)


def test_core_select_cm_violation_on_unit_diamond():
    nine = load_fixture("fig9")
    report = check_cm(nine, "core-select", {"e1": 0}, "e1", increase_grid=[1])
    assert report.verdict == "violation"
    w = report.witness
    assert w["hurt_player"] == "e2"
    assert (w["payoff_before"], w["payoff_after"]) == (F(1), F(0))
    assert (w["flow_before"], w["flow_after"]) == (F(1), F(2))


def test_cm_steps_past_the_critical_value_are_not_judged():
    # raising a source edge beyond its critical value still raises the flow
    # from the base point, but the step leaves the binding regime; it must be
    # recorded and skipped rather than judged
    net = load_fixture("fig1")
    reports = {"e1": 1, "e2": F(1, 2)}
    report = check_cm(net, "mc", reports, "e1", increase_grid=[F(5, 4), 2])
    assert report.verdict == "pass"
    assert report.trace.context["judged"] == (True, False)
    # and indeed the skipped step would have lowered the inclusive partner
    base = mc_allocate(net, reports)["e2"]
    bumped = mc_allocate(net, {**reports, "e1": 2})["e2"]
    assert bumped < base


def test_cm_rejects_non_increasing_grid():
    with pytest.raises(ValueError, match="does not increase"):
        check_cm(load_fixture("fig1"), "mc", None, "e1", increase_grid=[1])


# ---------------------------------------------------------------------------
# Cross-effect sweeps


def test_sweep_independent_pair():
    report = cross_effect_sweep(load_fixture("fig1"), {"e2": F(1, 2)}, "e1", "e3")
    assert report.verdict == "pass"
    assert report.trace.context["case"] == "independent"
    assert report.trace.context["critical_value"] == F(3, 2)
    values = report.trace.values
    rising, flat = values[:8], values[8:]
    assert all(a < b for a, b in zip(rising, rising[1:]))
    assert all(v == flat[0] for v in flat)


def test_sweep_inclusive_pair():
    report = cross_effect_sweep(load_fixture("fig1"), {"e2": F(1, 2)}, "e1", "e2")
    assert report.verdict == "pass"
    assert report.trace.context["case"] == "inclusive"
    values = report.trace.values
    flat, falling = values[:8], values[8:]
    assert all(v == F(1, 4) for v in flat)
    assert all(a > b for a, b in zip(falling, falling[1:]))


def test_sweep_neither_pair_rises_then_falls():
    report = cross_effect_sweep(load_fixture("neither"), None, "e2", "e4")
    assert report.verdict == "pass"
    assert report.trace.context["case"] == "neither"
    assert report.trace.context["critical_value"] == 1
    values = report.trace.values
    rising, falling = values[:8], values[8:]
    assert all(a < b for a, b in zip(rising, rising[1:]))
    assert all(a > b for a, b in zip(falling, falling[1:]))
    assert falling[0] < rising[-1]


def test_sweep_trace_invariants():
    report = cross_effect_sweep(load_fixture("fig1"), {"e2": F(1, 2)}, "e1", "e3")
    grid = report.trace.grid
    assert all(a < b for a, b in zip(grid, grid[1:]))
    for x, alloc in zip(grid, report.trace.context["allocations"]):
        assert alloc.total == max_flow(load_fixture("fig1"), {"e1": x, "e2": F(1, 2)}).value


def test_sweep_terminal_edge_case():
    report = cross_effect_sweep(load_fixture("fig5"), None, "e3", "e1")
    assert report.verdict == "pass"
    assert report.trace.context["case"] == "terminal-edge"
    assert len(set(report.trace.values)) == 1
    flipped = cross_effect_sweep(load_fixture("fig5"), None, "e1", "e3")
    assert flipped.verdict == "pass"
    assert flipped.trace.context["case"] == "terminal-edge"


# ---------------------------------------------------------------------------
# Shapley comparative statics


def test_shapley_relation_probe_series():
    report = shapley_relation_probe(load_fixture("series"), "e1", "e2", sample_count=15, seed=2)
    assert report.verdict == "pass"
    assert report.witness["relation"] == "complementary"
    assert report.witness["pattern"] == "series"


def test_shapley_relation_probe_parallel():
    report = shapley_relation_probe(load_fixture("fig3a"), "e1", "e2", sample_count=15, seed=2)
    assert report.verdict == "pass"
    assert report.witness["relation"] == "substitutable"
    assert report.witness["pattern"] == "parallel"


def test_shapley_relation_probe_diverging():
    report = shapley_relation_probe(load_fixture("diverge"), "e2", "e3", sample_count=10, seed=4)
    assert report.verdict == "pass"
    assert report.witness["relation"] == "substitutable"


def test_shapley_relation_probe_half_diamond_source_pair():
    # the two source edges are full parallels; the sampled relation must be
    # substitutable, matching the payoff drop seen when one report rises
    report = shapley_relation_probe(load_fixture("fig4"), "e1", "e2", sample_count=10, seed=4)
    assert report.verdict == "pass"
    assert report.witness["relation"] == "substitutable"
    assert report.witness["pattern"] == "parallel"


def test_shapley_gains_nothing_on_the_fan():
    fan = load_fixture("fig2a")
    for eid in fan.edge_ids:
        assert best_deviation(fan, "shapley", eid).gain == 0


# ---------------------------------------------------------------------------
# Corpus-level invariants


def test_core_select_is_split_and_merge_proof_on_corpus(fuzz_corpus):
    from flowmech import parallel_pairs

    for net in fuzz_corpus[:60]:
        for eid in net.edge_ids:
            assert check_sp(net, "core-select", None, eid).verdict == "pass", (net, eid)
        for ea, eb in parallel_pairs(net):
            assert check_mp(net, "core-select", None, ea, eb).verdict == "pass", (net, ea, eb)


def test_cross_effect_trajectories_match_classification_on_corpus(fuzz_corpus):
    for net in fuzz_corpus[:50]:
        non_terminal = [eid for eid in net.edge_ids if not net.is_terminal_edge(eid)]
        for swept in non_terminal:
            for observed in non_terminal:
                if swept == observed:
                    continue
                report = cross_effect_sweep(net, None, swept, observed, points_per_interval=4)
                assert report.verdict == "pass", (net, swept, observed, report.trace)


# ---------------------------------------------------------------------------
# Random network generator


def test_random_network_deterministic():
    assert random_network(123) == random_network(123)
    assert random_network(123) != random_network(124)


def test_random_network_respects_bounds():
    for seed in range(50):
        net = random_network(seed, max_nodes=5, max_edges=6)
        assert len(net.nodes) <= 5
        assert len(net.edges) <= 6


def test_random_network_lattice():
    lattice = CapLattice(numerator_max=4, denominator=2)
    net = random_network(7, cap_lattice=lattice)
    for e in net.edges:
        assert e.cap.denominator in (1, 2)
        assert 0 < e.cap <= 2


def test_generator_thousand_seeds_all_validate():
    for seed in range(1000):
        assert validate(random_network(seed)).ok
