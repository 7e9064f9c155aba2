"""Coalitions and the characteristic function of a max-flow game.

Each edge is a player; a coalition's value is the max flow achievable with
only its members' edges at their reported capacities.  Coalitions are bit
masks over the network's edge order (bit 0 = first edge).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Mapping, Optional

from .cuts import structural_minimal_cuts
from .guards import guard_size
from .maxflow import max_flow
from .network import FlowNetwork, RationalLike, resolve_reports


def mask_of(edge_order: tuple[str, ...], members: Iterable[str]) -> int:
    index = {eid: i for i, eid in enumerate(edge_order)}
    mask = 0
    for eid in members:
        try:
            mask |= 1 << index[eid]
        except KeyError:
            raise KeyError(f"unknown edge id {eid!r}") from None
    return mask


def members_of(edge_order: tuple[str, ...], mask: int) -> frozenset[str]:
    return frozenset(eid for i, eid in enumerate(edge_order) if mask >> i & 1)


@dataclass(frozen=True)
class ReportProfile:
    """True capacities paired with the reported ones; a player may
    under-report but never over-report."""

    truth: dict[str, Fraction]
    reported: dict[str, Fraction]

    def __post_init__(self):
        if set(self.truth) != set(self.reported):
            raise ValueError("truth and reports must cover the same edges")
        for eid, c in self.truth.items():
            if c <= 0:
                raise ValueError(f"true capacity of {eid} must be > 0, got {c}")
            r = self.reported[eid]
            if not (0 <= r <= c):
                raise ValueError(f"report for {eid} must lie in [0, {c}], got {r}")

    @classmethod
    def truthful(cls, net: FlowNetwork) -> "ReportProfile":
        caps = net.caps()
        return cls(truth=caps, reported=dict(caps))

    @classmethod
    def from_overrides(
        cls, net: FlowNetwork, overrides: Mapping[str, RationalLike]
    ) -> "ReportProfile":
        return cls(truth=net.caps(), reported=resolve_reports(net, overrides))


class CharacteristicCache:
    """Memo table from coalition masks to values.

    Two-phase use: fill it (populate, or the course of one computation),
    then share read-only; a fully populated cache never mutates again, so
    concurrent evaluations may read it freely.

    method="maxflow" runs one max-flow per coalition.  method="cuts" uses
    duality instead: the value of S is the cheapest minimal cut counting only
    members of S, evaluated in scaled integers; it needs the structural cut
    family but makes whole-table fills much faster.
    """

    def __init__(
        self,
        net: FlowNetwork,
        reports: Optional[Mapping[str, RationalLike]] = None,
        method: str = "maxflow",
    ):
        if method not in ("maxflow", "cuts"):
            raise ValueError(f"unknown method {method!r}")
        self.net = net
        self.caps = resolve_reports(net, reports)
        self.edge_order = net.edge_ids
        self.n = len(self.edge_order)
        guard_size("coalition table", self.n, default_limit=20)
        self.method = method
        self._table: dict[int, Fraction] = {0: Fraction(0)}
        if method == "cuts":
            self.scale = lcm(*(q.denominator for q in self.caps.values())) if self.n else 1
            weights = [int(self.caps[eid] * self.scale) for eid in self.edge_order]
            self._cut_members: list[list[tuple[int, int]]] = []
            for cut in structural_minimal_cuts(net):
                idxs = [self.edge_order.index(eid) for eid in cut]
                self._cut_members.append([(i, weights[i]) for i in sorted(idxs)])
            self._int_table: dict[int, int] = {0: 0}

    def value(self, mask: int) -> Fraction:
        got = self._table.get(mask)
        if got is None:
            got = self._compute(mask)
            self._table[mask] = got
        return got

    def value_of(self, members: Iterable[str]) -> Fraction:
        return self.value(mask_of(self.edge_order, members))

    def value_scaled(self, mask: int) -> int:
        """Integer value * scale; cuts method only."""
        got = self._int_table.get(mask)
        if got is None:
            got = self._min_cut_int(mask)
            self._int_table[mask] = got
        return got

    def populate(self) -> "CharacteristicCache":
        for mask in range(1 << self.n):
            self.value(mask)
        return self

    def __len__(self) -> int:
        return len(self._table)

    def _compute(self, mask: int) -> Fraction:
        if self.method == "cuts":
            return Fraction(self.value_scaled(mask), self.scale)
        caps = {
            eid: (self.caps[eid] if mask >> i & 1 else Fraction(0))
            for i, eid in enumerate(self.edge_order)
        }
        return max_flow(self.net, caps).value

    def _min_cut_int(self, mask: int) -> int:
        if not self._cut_members:
            return 0
        best: Optional[int] = None
        for members in self._cut_members:
            total = 0
            for i, w in members:
                if mask >> i & 1:
                    total += w
            if best is None or total < best:
                best = total
                if best == 0:
                    break
        return best if best is not None else 0


def build_cache(
    net: FlowNetwork,
    reports: Optional[Mapping[str, RationalLike]] = None,
    method: str = "maxflow",
    eager: bool = True,
) -> CharacteristicCache:
    cache = CharacteristicCache(net, reports, method=method)
    if eager:
        cache.populate()
    return cache
