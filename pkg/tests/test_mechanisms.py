from fractions import Fraction as F

from hypothesis import given, settings
from hypothesis import strategies as st

from flowmech import (
    CharacteristicCache,
    coalition_value,
    core_bounds,
    core_bounds_all,
    core_check,
    core_select_nearest_cut,
    load_fixture,
    max_flow,
    mc_allocate,
    mc_no_step_one,
    parse_network,
    random_network,
    shapley,
    shapley_permutation_oracle,
)
from conftest import mc_via_bruteforce


# ---------------------------------------------------------------------------
# Shapley values on the worked examples


def test_shapley_fan():
    alloc = shapley(load_fixture("fig2a"))
    assert alloc["e1"] == F(1, 30)
    # same marginal pattern for every outlet regardless of its extra capacity
    assert all(alloc[e] == F(1, 30) for e in ("e2", "e3", "e4", "e5"))
    assert alloc["e6"] == F(5, 6)
    assert alloc.total == 1


def test_shapley_split_fan():
    alloc = shapley(load_fixture("fig2b"))
    assert alloc["e1_1"] == F(1, 42)
    assert alloc["e1_2"] == F(1, 42)
    assert F(2, 42) > F(1, 30)


def test_shapley_parallel_pair_and_merge():
    pair = shapley(load_fixture("fig3a"))
    assert pair["e1"] == F(1, 6) and pair["e2"] == F(1, 6) and pair["e3"] == F(2, 3)
    merged = shapley(load_fixture("fig3b"))
    assert merged["e1+e2"] == F(1, 2) and merged["e3"] == F(1, 2)


def test_shapley_half_diamond_step():
    dia = load_fixture("fig4")
    base = shapley(dia)
    assert base.payoffs == {"e1": F(1, 3), "e2": F(1, 3), "e3": F(1, 6), "e4": F(1, 6)}
    bumped = shapley(dia, {"e1": F(3, 5)})
    assert bumped.payoffs == {
        "e1": F(23, 60),
        "e2": F(19, 60),
        "e3": F(1, 5),
        "e4": F(1, 5),
    }


def test_shapley_symmetric_diamond():
    alloc = shapley(load_fixture("fig1"), {"e1": 1})
    assert all(q == F(1, 2) for q in alloc.payoffs.values())


def test_shapley_single_edge_stand_alone():
    net = parse_network("edge e s t 7/3\n")
    assert shapley(net)["e"] == F(7, 3)
    assert shapley_permutation_oracle(net)["e"] == F(7, 3)


def test_shapley_terminal_edge_gets_stand_alone_value():
    chain = load_fixture("fig5")
    alloc = shapley(chain)
    assert alloc["e3"] == coalition_value(chain, None, ["e3"]) == 1
    assert alloc.payoffs == {"e1": F(1, 2), "e2": F(1, 2), "e3": F(1)}


def test_shapley_matches_oracle_on_fixtures(all_fixtures):
    for name, net in all_fixtures.items():
        if len(net.edges) > 7:
            continue
        fast = shapley(net)
        slow = shapley_permutation_oracle(net)
        assert fast.payoffs == slow.payoffs, name


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=5_000))
def test_shapley_matches_oracle_random(seed):
    net = random_network(seed, max_nodes=5, max_edges=6)
    assert shapley(net).payoffs == shapley_permutation_oracle(net).payoffs


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=5_000))
def test_shapley_cut_cache_route_agrees(seed):
    net = random_network(seed)
    direct = shapley(net)
    via_cuts = shapley(net, cache=CharacteristicCache(net, method="cuts"))
    assert direct.payoffs == via_cuts.payoffs


# ---------------------------------------------------------------------------
# The cut-splitting mechanism


def test_mc_chain_with_terminal_edge():
    alloc = mc_allocate(load_fixture("fig5"))
    assert alloc.payoffs == {"e1": F(1, 2), "e2": F(1, 2), "e3": F(1)}


def test_mc_without_stand_alone_step():
    alloc = mc_no_step_one(load_fixture("fig5"))
    assert alloc["e3"] == F(5, 6)
    assert alloc["e3"] < 1  # pays the direct edge less than it earns alone
    assert alloc.payoffs == {"e1": F(1, 2), "e2": F(2, 3), "e3": F(5, 6)}


def test_mc_diamond():
    alloc = mc_allocate(load_fixture("fig1"))
    assert alloc.payoffs == {"e1": F(2, 3), "e2": F(1, 3), "e3": F(1, 2), "e4": F(1, 2)}


def test_mc_single_edge():
    net = parse_network("edge e s t 4/7\n")
    assert mc_allocate(net)["e"] == F(4, 7)
    assert mc_no_step_one(net)["e"] == F(4, 7)


def test_mc_no_terminal_edges_variants_agree():
    net = load_fixture("fig1")
    assert mc_allocate(net).payoffs == mc_no_step_one(net).payoffs


def test_mc_zero_report_edge_gets_nothing():
    net = load_fixture("fig1")
    alloc = mc_allocate(net, {"e2": 0})
    assert alloc["e2"] == 0
    assert alloc.total == max_flow(net, {"e2": 0}).value


def test_mc_matches_bruteforce_on_fixtures(all_fixtures):
    for name, net in all_fixtures.items():
        assert mc_allocate(net).payoffs == mc_via_bruteforce(net), name


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=5_000))
def test_mc_matches_bruteforce_random(seed):
    net = random_network(seed)
    assert mc_allocate(net).payoffs == mc_via_bruteforce(net)


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=5_000))
def test_mc_positive_payoffs(seed):
    net = random_network(seed)
    alloc = mc_allocate(net)
    assert all(q > 0 for q in alloc.payoffs.values())


# ---------------------------------------------------------------------------
# Efficiency and own-report monotonicity


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=5_000))
def test_every_mechanism_is_efficient(seed):
    net = random_network(seed)
    grand = max_flow(net).value
    for mechanism in (shapley, mc_allocate, mc_no_step_one, core_select_nearest_cut):
        alloc = mechanism(net)
        assert alloc.total == grand
        assert sum(alloc.payoffs.values()) == grand
        assert all(q >= 0 for q in alloc.payoffs.values())


def test_efficiency_on_fixtures(all_fixtures):
    for net in all_fixtures.values():
        grand = max_flow(net).value
        for mechanism in (shapley, mc_allocate, core_select_nearest_cut):
            assert mechanism(net).total == grand


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=5_000))
def test_terminal_edges_get_their_stand_alone_value(seed):
    net = random_network(seed)
    terminal = net.terminal_edge_ids()
    if not terminal:
        return
    sh = shapley(net, cache=CharacteristicCache(net, method="cuts"))
    mc = mc_allocate(net)
    for eid in terminal:
        stand_alone = net.edge(eid).cap
        assert sh[eid] == stand_alone
        assert mc[eid] == stand_alone


@settings(max_examples=10, deadline=None)
@given(st.integers(min_value=0, max_value=2_000), st.integers(min_value=0, max_value=7))
def test_own_report_monotone(seed, pick):
    net = random_network(seed, max_nodes=5, max_edges=6)
    eid = net.edge_ids[pick % len(net.edges)]
    cap = net.edge(eid).cap
    grid = [cap * F(k, 5) for k in range(1, 6)]
    for mechanism in (shapley, mc_allocate):
        values = [mechanism(net, {eid: r})[eid] for r in grid]
        assert all(a <= b for a, b in zip(values, values[1:])), (mechanism.__name__, eid)


# ---------------------------------------------------------------------------
# Core machinery


def test_core_check_unique_point():
    net = load_fixture("fig1")
    assert core_check(net, None, {"e1": F(0), "e2": F(0), "e3": F(1), "e4": F(1)})


def test_core_check_symmetric_point():
    nine = load_fixture("fig9")
    half = {eid: F(1, 2) for eid in nine.edge_ids}
    assert core_check(nine, None, half)


def test_core_check_violation_witness():
    nine = load_fixture("fig9")
    verdict = core_check(nine, None, {"e1": F(2), "e2": F(0), "e3": F(0), "e4": F(0)})
    assert not verdict
    assert verdict.coalition == {"e2", "e3"}
    assert verdict.coalition_value == 1
    assert verdict.payoff_sum == 0


def test_mc_can_leave_the_core():
    net = load_fixture("fig1")
    verdict = core_check(net, None, mc_allocate(net))
    assert not verdict
    assert verdict.coalition == {"e2", "e3"}
    assert verdict.payoff_sum == F(5, 6) and verdict.coalition_value == 1


def test_core_bounds_diamond_singleton():
    net = load_fixture("fig1")
    assert core_bounds_all(net) == {
        "e1": (F(0), F(0)),
        "e2": (F(0), F(0)),
        "e3": (F(1), F(1)),
        "e4": (F(1), F(1)),
    }


def test_core_bounds_unit_diamond_interval():
    nine = load_fixture("fig9")
    assert core_bounds(nine, None, "e1") == (F(0), F(1))


def test_core_bounds_absent_edge_singleton():
    nine = load_fixture("fig9")
    assert core_bounds_all(nine, {"e1": 0}) == {
        "e1": (F(0), F(0)),
        "e2": (F(1), F(1)),
        "e3": (F(0), F(0)),
        "e4": (F(0), F(0)),
    }


def test_core_bounds_single_edge():
    net = parse_network("edge e s t 5/2\n")
    assert core_bounds(net, None, "e") == (F(5, 2), F(5, 2))


def test_core_bounds_against_sympy():
    from sympy import Rational, symbols
    from sympy.solvers.simplex import lpmax, lpmin

    for seed in (3, 17):
        net = random_network(seed, max_nodes=4, max_edges=5)
        cache = CharacteristicCache(net).populate()
        n = cache.n
        xs = symbols(f"x0:{n}")
        constraints = []
        for mask in range(1, (1 << n) - 1):
            v = cache.value(mask)
            expr = sum(xs[i] for i in range(n) if mask >> i & 1)
            constraints.append(expr >= Rational(v.numerator, v.denominator))
        grand = cache.value((1 << n) - 1)
        total = sum(xs)
        constraints.append(total <= Rational(grand.numerator, grand.denominator))
        constraints.append(total >= Rational(grand.numerator, grand.denominator))
        for i, eid in enumerate(cache.edge_order):
            lo, hi = core_bounds(net, None, eid)
            lo_ref, _ = lpmin(xs[i], constraints)
            hi_ref, _ = lpmax(xs[i], constraints)
            assert lo == F(lo_ref.p, lo_ref.q), (seed, eid)
            assert hi == F(hi_ref.p, hi_ref.q), (seed, eid)


def test_nearest_cut_selection_examples():
    net = load_fixture("fig1")
    assert core_select_nearest_cut(net).payoffs == {
        "e1": F(0),
        "e2": F(0),
        "e3": F(1),
        "e4": F(1),
    }
    assert core_select_nearest_cut(net, {"e1": 1}).payoffs == {
        "e1": F(1),
        "e2": F(1),
        "e3": F(0),
        "e4": F(0),
    }
    single = parse_network("edge e s t 9\n")
    assert core_select_nearest_cut(single)["e"] == 9


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=5_000))
def test_nearest_cut_selection_always_in_core(seed):
    net = random_network(seed)
    alloc = core_select_nearest_cut(net)
    assert core_check(net, None, alloc)
