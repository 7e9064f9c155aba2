"""Payoff mechanisms for max-flow games and core membership machinery.

All mechanisms act on the *reported* capacities, are efficient (payoffs sum
exactly to the grand coalition's value), and return exact rationals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from math import factorial
from typing import Callable, Mapping, Optional

from .cuts import enumerate_minimal_cuts, min_cut_nearest_source, structural_minimal_cuts
from .game import CharacteristicCache, members_of
from .guards import guard_size
from .network import (
    FlowNetwork,
    RationalLike,
    resolve_reports,
    strip_terminal_edges,
)
from .simplex import OPTIMAL, solve_standard_form


@dataclass(frozen=True)
class Allocation:
    mechanism: str
    payoffs: dict[str, Fraction]
    total: Fraction

    def __getitem__(self, edge_id: str) -> Fraction:
        return self.payoffs[edge_id]


def _allocation(mechanism: str, payoffs: dict[str, Fraction]) -> Allocation:
    return Allocation(mechanism, payoffs, sum(payoffs.values(), Fraction(0)))


def shapley(
    net: FlowNetwork,
    reports: Optional[Mapping[str, RationalLike]] = None,
    cache: Optional[CharacteristicCache] = None,
) -> Allocation:
    """Exact Shapley value: each player's expected marginal contribution over
    uniformly random arrival orders, via the subset-weight formula with
    big-integer factorials."""
    if cache is None:
        cache = CharacteristicCache(net, reports)
    n = cache.n
    guard_size("Shapley subset sum", n, default_limit=20)
    weights = [Fraction(0)] + [
        Fraction(factorial(s - 1) * factorial(n - s), factorial(n)) for s in range(1, n + 1)
    ]
    payoffs = {eid: Fraction(0) for eid in cache.edge_order}
    if getattr(cache, "method", "") == "cuts":
        _shapley_scaled(cache, payoffs)
        return _allocation("shapley", payoffs)
    for mask in range(1, 1 << n):
        size = mask.bit_count()
        v_s = cache.value(mask)
        for i, eid in enumerate(cache.edge_order):
            if mask >> i & 1:
                payoffs[eid] += weights[size] * (v_s - cache.value(mask & ~(1 << i)))
    return _allocation("shapley", payoffs)


def _shapley_scaled(cache: CharacteristicCache, payoffs: dict[str, Fraction]) -> None:
    # integer inner loop: weights n! * w(s) and values * scale stay integral
    n = cache.n
    wint = [0] + [factorial(s - 1) * factorial(n - s) for s in range(1, n + 1)]
    acc = [0] * n
    for mask in range(1, 1 << n):
        size = mask.bit_count()
        v_s = cache.value_scaled(mask)
        w = wint[size]
        for i in range(n):
            if mask >> i & 1:
                acc[i] += w * (v_s - cache.value_scaled(mask & ~(1 << i)))
    denom = factorial(n) * cache.scale
    for i, eid in enumerate(cache.edge_order):
        payoffs[eid] = Fraction(acc[i], denom)


def shapley_permutation_oracle(
    net: FlowNetwork, reports: Optional[Mapping[str, RationalLike]] = None
) -> Allocation:
    """Independent Shapley oracle: average the marginal contribution over all
    n! arrival orders.  Exactly equals :func:`shapley`."""
    cache = CharacteristicCache(net, reports)
    n = cache.n
    guard_size("permutation oracle", n, default_limit=9)
    totals = {eid: Fraction(0) for eid in cache.edge_order}
    for order in permutations(range(n)):
        mask = 0
        for i in order:
            before = cache.value(mask)
            mask |= 1 << i
            totals[cache.edge_order[i]] += cache.value(mask) - before
    n_fact = factorial(n)
    payoffs = {eid: q / n_fact for eid, q in totals.items()}
    return _allocation("shapley-oracle", payoffs)


def _cut_family(net: FlowNetwork, caps: dict[str, Fraction]):
    """(cuts, per-cut capacity, flow value) for the positive-report subgraph,
    reusing the structural family when every report is positive."""
    if all(q > 0 for q in caps.values()):
        cuts = structural_minimal_cuts(net)
        totals = [sum((caps[e] for e in M), Fraction(0)) for M in cuts]
    else:
        family = enumerate_minimal_cuts(net, caps)
        cuts, totals = family.cuts, list(family.cut_capacities)
    flow_value = min(totals, default=Fraction(0))
    return cuts, totals, flow_value


def mc_allocate(
    net: FlowNetwork, reports: Optional[Mapping[str, RationalLike]] = None
) -> Allocation:
    """Cut-splitting mechanism, two steps: (i) every direct source-sink edge
    is paid its report; (ii) those edges are removed, the remaining graph's
    max-flow value is split equally across its minimal cuts, and each cut's
    share is divided among its members in proportion to their reports."""
    caps = resolve_reports(net, reports)
    payoffs = {eid: Fraction(0) for eid in net.edge_ids}
    for eid in net.terminal_edge_ids():
        payoffs[eid] = caps[eid]
    remaining = strip_terminal_edges(net)
    rem_caps = {eid: caps[eid] for eid in remaining.edge_ids}
    _mc_step_two(remaining, rem_caps, payoffs)
    return _allocation("mc", payoffs)


def mc_no_step_one(
    net: FlowNetwork, reports: Optional[Mapping[str, RationalLike]] = None
) -> Allocation:
    """Diagnostic variant that skips the stand-alone step and treats direct
    source-sink edges like any other cut member.  Not individually rational;
    kept out of the default mechanism registry."""
    caps = resolve_reports(net, reports)
    payoffs = {eid: Fraction(0) for eid in net.edge_ids}
    _mc_step_two(net, caps, payoffs)
    return _allocation("mc-no-step-one", payoffs)


def _mc_step_two(net: FlowNetwork, caps: dict[str, Fraction], payoffs: dict[str, Fraction]) -> None:
    cuts, totals, flow_value = _cut_family(net, caps)
    if not cuts or flow_value == 0:
        return
    share = Fraction(flow_value, len(cuts))
    for M, total in zip(cuts, totals):
        for eid in M:
            payoffs[eid] += share * caps[eid] / total


@dataclass(frozen=True)
class CoreVerdict:
    in_core: bool
    coalition: Optional[frozenset[str]] = None
    coalition_value: Optional[Fraction] = None
    payoff_sum: Optional[Fraction] = None

    def __bool__(self) -> bool:
        return self.in_core


def core_check(
    net: FlowNetwork,
    reports: Optional[Mapping[str, RationalLike]],
    payoffs: Mapping[str, Fraction] | Allocation,
) -> CoreVerdict:
    """Exact core membership: efficiency plus every coalition constraint.
    Returns the violated coalition with the smallest bit mask, so failures
    are reproducible."""
    if isinstance(payoffs, Allocation):
        payoffs = payoffs.payoffs
    cache = CharacteristicCache(net, reports)
    n = cache.n
    guard_size("core constraint enumeration", n, default_limit=20)
    x = [payoffs[eid] for eid in cache.edge_order]
    grand = (1 << n) - 1
    if sum(x, Fraction(0)) != cache.value(grand):
        return CoreVerdict(
            False,
            members_of(cache.edge_order, grand),
            cache.value(grand),
            sum(x, Fraction(0)),
        )
    for mask in range(1, grand):
        total = sum(x[i] for i in range(n) if mask >> i & 1)
        v_s = cache.value(mask)
        if total < v_s:
            return CoreVerdict(False, members_of(cache.edge_order, mask), v_s, total)
    return CoreVerdict(True)


def core_bounds(
    net: FlowNetwork,
    reports: Optional[Mapping[str, RationalLike]],
    edge_id: str,
) -> tuple[Fraction, Fraction]:
    """Smallest and largest payoff the edge can receive in the core,
    by exact LP over the full coalition constraint system.

    Solved on the dual: with n players the primal has 2^n rows, the dual only
    n, so the tableau stays small."""
    cache = CharacteristicCache(net, reports)
    n = cache.n
    guard_size("core bounds LP", n, default_limit=12)
    if edge_id not in cache.edge_order:
        raise KeyError(f"unknown edge id {edge_id!r}")
    target = cache.edge_order.index(edge_id)
    lo = _core_extreme(cache, target, sign=1)
    hi = -_core_extreme(cache, target, sign=-1)
    return lo, hi


def core_bounds_all(
    net: FlowNetwork, reports: Optional[Mapping[str, RationalLike]] = None
) -> dict[str, tuple[Fraction, Fraction]]:
    return {eid: core_bounds(net, reports, eid) for eid in net.edge_ids}


def _core_extreme(cache: CharacteristicCache, target: int, sign: int) -> Fraction:
    # min sign*x_target over the core, via its dual:
    #   max sum_S v(S) y_S + v(N) z   s.t.  sum_{S contains i} y_S + z = c_i,
    # with y >= 0 and z free (split into z+ - z-).
    n = cache.n
    grand = (1 << n) - 1
    masks = [mask for mask in range(1, grand)]
    cols = len(masks) + 2
    A = [[Fraction(0)] * cols for _ in range(n)]
    obj = [Fraction(0)] * cols
    for col, mask in enumerate(masks):
        obj[col] = cache.value(mask)
        for i in range(n):
            if mask >> i & 1:
                A[i][col] = Fraction(1)
    v_grand = cache.value(grand)
    for i in range(n):
        A[i][len(masks)] = Fraction(1)
        A[i][len(masks) + 1] = Fraction(-1)
    obj[len(masks)] = v_grand
    obj[len(masks) + 1] = -v_grand
    b = [Fraction(sign) if i == target else Fraction(0) for i in range(n)]
    result = solve_standard_form(A, b, obj)
    if result.status != OPTIMAL:
        raise RuntimeError(
            f"core bound LP ended {result.status}; the core of a max-flow game "
            "is never empty, so this indicates a solver defect"
        )
    return result.value


def core_select_nearest_cut(
    net: FlowNetwork, reports: Optional[Mapping[str, RationalLike]] = None
) -> Allocation:
    """Core-selection rule: pay each member of the minimum cut nearest the
    source its reported capacity, everyone else zero."""
    caps = resolve_reports(net, reports)
    cut = min_cut_nearest_source(net, caps)
    payoffs = {eid: (caps[eid] if eid in cut else Fraction(0)) for eid in net.edge_ids}
    return _allocation("core-select", payoffs)


#: Default registry used by audits and the command line.  The diagnostic
#: variant without the stand-alone step is deliberately not registered.
MECHANISMS: dict[str, Callable[..., Allocation]] = {
    "shapley": shapley,
    "mc": mc_allocate,
    "core-select": core_select_nearest_cut,
}


def resolve_mechanism(mechanism: str | Callable[..., Allocation]) -> Callable[..., Allocation]:
    if callable(mechanism):
        return mechanism
    try:
        return MECHANISMS[mechanism]
    except KeyError:
        raise KeyError(
            f"unknown mechanism {mechanism!r}; choose from {sorted(MECHANISMS)}"
        ) from None
