"""Exhaustive maximum-coclique search on the derangement graph.

Cocliques of the derangement graph are cliques of its complement, so the
search is a clique branch-and-bound (greedy sequential colouring gives the
upper bound) over Python-int bitsets of the complement.  Enumeration runs in
two passes: the first proves the optimum, the second collects every clique
attaining it.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceeded
from .group import Group


@dataclass(frozen=True)
class SearchResult:
    size: int
    cocliques: tuple[tuple[int, ...], ...]
    status: str  # "optimal" or "lower_bound_only"
    nodes: int


class _Budget(Exception):
    pass


def complement_bitsets(group: Group) -> list[int]:
    """Row g has bit h set iff g != h and g h^-1 fixes some point."""
    pp = group.point_perm
    rows = []
    for g in range(group.order):
        agree = (pp == pp[g]).any(axis=1)
        agree[g] = False
        bits = np.packbits(agree[::-1].astype(np.uint8))
        rows.append(int.from_bytes(bits.tobytes(), "big") >> (-group.order % 8))
    return rows


def _bits(x: int):
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


class _Searcher:
    def __init__(self, adj: list[int], order: list[int], deadline: float | None):
        self.adj = adj
        self.order = order  # initial vertex ordering, highest residual degree first
        self.rank = {v: i for i, v in enumerate(order)}
        self.deadline = deadline
        self.nodes = 0

    def colour(self, P: int):
        """Greedy sequential colouring of P; returns (vertex, colour) with colours ascending."""
        verts = sorted(_bits(P), key=self.rank.__getitem__)
        out = []
        k = 0
        uncoloured = P
        while uncoloured:
            k += 1
            avail = uncoloured
            for v in verts:
                if avail >> v & 1:
                    out.append((v, k))
                    uncoloured &= ~(1 << v)
                    avail &= ~self.adj[v] & ~(1 << v)
            verts = [v for v in verts if uncoloured >> v & 1]
        return out

    def tick(self):
        self.nodes += 1
        if self.deadline is not None and self.nodes & 255 == 0 and time.monotonic() > self.deadline:
            raise _Budget

    def maximum(self, best: int, witness: tuple[int, ...]):
        self.best, self.witness = best, witness
        self._max((), (1 << len(self.adj)) - 1)
        return self.best, self.witness

    def _max(self, C, P):
        self.tick()
        for v, k in reversed(self.colour(P)):
            if len(C) + k <= self.best:
                return
            C2 = C + (v,)
            P2 = P & self.adj[v]
            if P2:
                self._max(C2, P2)
            elif len(C2) > self.best:
                self.best, self.witness = len(C2), tuple(sorted(C2))
            P &= ~(1 << v)

    def enumerate(self, target: int) -> list[tuple[int, ...]]:
        self.found = []
        self.target = target
        self._enum((), (1 << len(self.adj)) - 1)
        return sorted(self.found)

    def _enum(self, C, P):
        self.tick()
        for v, k in reversed(self.colour(P)):
            if len(C) + k < self.target:
                return
            C2 = C + (v,)
            P2 = P & self.adj[v]
            if P2:
                self._enum(C2, P2)
            elif len(C2) == self.target:
                self.found.append(tuple(sorted(C2)))
            P &= ~(1 << v)


def maximum_cliques(adj: list[int], budget_secs: float | None = None, enumerate: bool = True,
                    seeds=()) -> SearchResult:
    """Maximum cliques of the graph whose row v is the bitset ``adj[v]`` (no self loops).

    ``seeds`` are known cliques used only as the starting incumbent.  On
    running out of time, BudgetExceeded carries a ``lower_bound_only``
    result holding the best clique seen.
    """
    deadline = None if budget_secs is None else time.monotonic() + budget_secs
    deg = [a.bit_count() for a in adj]
    order = sorted(range(len(adj)), key=lambda v: (-deg[v], v))
    s = _Searcher(adj, order, deadline)

    witness = max((tuple(sorted(int(x) for x in S)) for S in seeds), key=len, default=())
    try:
        size, witness = s.maximum(len(witness), witness)
        found = s.enumerate(size) if enumerate else [witness]
    except _Budget:
        if getattr(s, "best", 0) > len(witness):
            witness = s.witness
        partial = SearchResult(len(witness), (witness,) if witness else (), "lower_bound_only", s.nodes)
        raise BudgetExceeded(
            f"search budget of {budget_secs}s exhausted; best found has size {len(witness)}",
            best=partial,
        ) from None
    return SearchResult(size, tuple(found), "optimal", s.nodes)


def max_coclique_search(group: Group, budget_secs: float | None = None, enumerate: bool = True,
                        seeds=()) -> SearchResult:
    """Maximum coclique size of the derangement graph and, with ``enumerate``, all maximum cocliques."""
    return maximum_cliques(complement_bitsets(group), budget_secs, enumerate, seeds)
