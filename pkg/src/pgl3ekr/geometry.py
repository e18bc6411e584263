"""The desarguesian projective plane PG(2, q).

Points and lines both carry dense ids ``0..n-1`` with ``n = q*q + q + 1``,
assigned in lexicographic order of their normalized coordinate triples
(first nonzero coordinate equal to 1).  A line is stored by its dual
triple ``d``; it consists of the points ``x`` with ``x . d = 0``.
"""

from __future__ import annotations

import enum
import itertools
from typing import NamedTuple

import numpy as np

from .errors import EqualLines, EqualPoints
from .gf import Field


class ProjPoint(NamedTuple):
    id: int
    coords: tuple[int, int, int]


class ProjLine(NamedTuple):
    id: int
    dual: tuple[int, int, int]


class QuadClass(enum.Enum):
    DEGENERATE = "Degenerate"
    IDENTICAL = "Identical"
    INCONSISTENT = "Inconsistent"
    ALL_COLLINEAR = "AllCollinear"
    CROSSED = "Crossed"
    THREE_COLLINEAR = "ThreeCollinear"
    GENERAL_POSITION = "GeneralPosition"


QUAD_CLASSES = list(QuadClass)


def _id(x) -> int:
    return x if isinstance(x, (int, np.integer)) else x.id


def normalize(F: Field, v) -> tuple[int, int, int]:
    """Scale a nonzero triple so its first nonzero coordinate is 1."""
    for c in v:
        if c:
            s = F.inv(c)
            return tuple(F.mul(s, x) for x in v)
    raise ValueError("zero vector has no projective point")


def cross(F: Field, a, b) -> tuple[int, int, int]:
    m, s = F.mul, F.sub
    return (
        s(m(a[1], b[2]), m(a[2], b[1])),
        s(m(a[2], b[0]), m(a[0], b[2])),
        s(m(a[0], b[1]), m(a[1], b[0])),
    )


def dot(F: Field, a, b) -> int:
    r = 0
    for x, y in zip(a, b):
        r = F.add(r, F.mul(x, y))
    return r


class Plane:
    """PG(2, q) with precomputed incidence and join/meet tables."""

    def __init__(self, field: Field):
        self.field = F = field
        q = F.q
        self.q = q
        self.n = n = q * q + q + 1
        triples = sorted(
            v for v in itertools.product(range(q), repeat=3) if any(v) and normalize(F, v) == v
        )
        assert len(triples) == n
        self.points = [ProjPoint(i, v) for i, v in enumerate(triples)]
        self.lines = [ProjLine(i, v) for i, v in enumerate(triples)]
        # encode(v) = v0*q^2 + v1*q + v2 for any nonzero triple -> point id of its span
        self.coord_index = np.full(q ** 3, -1, dtype=np.int64)
        for v in itertools.product(range(q), repeat=3):
            if any(v):
                self.coord_index[self.encode(v)] = triples.index(normalize(F, v))
        self.coords = np.array(triples, dtype=np.int64)

        inc = np.zeros((n, n), dtype=bool)
        for p, x in enumerate(triples):
            for l, d in enumerate(triples):
                inc[p, l] = dot(F, x, d) == 0
        self.incidence = inc
        self.points_on_line = [np.flatnonzero(inc[:, l]) for l in range(n)]
        self.lines_through_point = [np.flatnonzero(inc[p, :]) for p in range(n)]

        # line_through[a, b]: id of a v b; the diagonal is -1
        both = inc[:, None, :] & inc[None, :, :]
        lt = np.argmax(both, axis=2).astype(np.int64)
        np.fill_diagonal(lt, -1)
        self.line_through = lt
        both_l = inc.T[:, None, :] & inc.T[None, :, :]
        mt = np.argmax(both_l, axis=2).astype(np.int64)
        np.fill_diagonal(mt, -1)
        self.meet_table = mt
        for t in (self.coord_index, self.coords, inc, lt, mt):
            t.setflags(write=False)

    def encode(self, v) -> int:
        q = self.q
        return (v[0] * q + v[1]) * q + v[2]

    def point_of(self, v) -> ProjPoint:
        return self.points[int(self.coord_index[self.encode(v)])]

    def line_of(self, dual) -> ProjLine:
        return self.lines[int(self.coord_index[self.encode(dual)])]

    def on(self, point, line) -> bool:
        return bool(self.incidence[_id(point), _id(line)])

    def join(self, a, b) -> ProjLine:
        a, b = _id(a), _id(b)
        if a == b:
            raise EqualPoints(f"join of a point with itself (id {a})")
        return self.lines[int(self.line_through[a, b])]

    def meet(self, l, m) -> ProjPoint:
        l, m = _id(l), _id(m)
        if l == m:
            raise EqualLines(f"meet of a line with itself (id {l})")
        return self.points[int(self.meet_table[l, m])]

    def collinear(self, *pts) -> bool:
        ids = sorted({_id(p) for p in pts})
        if len(ids) <= 2:
            return True
        l = self.line_through[ids[0], ids[1]]
        return all(self.incidence[p, l] for p in ids[2:])

    def flags(self) -> list[tuple[int, int]]:
        return [(int(p), l) for l in range(self.n) for p in self.points_on_line[l]]

    def antiflags(self) -> list[tuple[int, int]]:
        return [(p, l) for p in range(self.n) for l in range(self.n) if not self.incidence[p, l]]

    def __repr__(self):
        return f"PG(2,{self.q})"


def plane_new(field: Field) -> Plane:
    return Plane(field)


def classify_quadruple(plane: Plane, a, b, c, d) -> QuadClass:
    """Geometric case of the ordered quadruple for the N-entry formula (first matching rule wins)."""
    a, b, c, d = _id(a), _id(b), _id(c), _id(d)
    if a == b or c == d:
        return QuadClass.DEGENERATE
    if a == c and b == d:
        return QuadClass.IDENTICAL
    if a == c or b == d:
        return QuadClass.INCONSISTENT
    if plane.collinear(a, b, c, d):
        return QuadClass.ALL_COLLINEAR
    if a == d or b == c:
        return QuadClass.CROSSED
    col = plane.collinear
    if col(a, b, c) or col(a, b, d) or col(a, c, d) or col(b, c, d):
        return QuadClass.THREE_COLLINEAR
    return QuadClass.GENERAL_POSITION


def classify_quadruples(plane: Plane, a, b, c, d) -> np.ndarray:
    """Vectorized classify_quadruple; returns indices into QUAD_CLASSES."""
    a, b, c, d = (np.asarray(x, dtype=np.int64) for x in (a, b, c, d))
    inc, lt = plane.incidence, plane.line_through

    def col3(x, y, z):
        # x != y required for a meaningful line; coincident points count as collinear
        same = (x == y) | (x == z) | (y == z)
        line = lt[x, np.where(x == y, (x + 1) % plane.n, y)]
        return same | inc[z, line]

    out = np.full(a.shape, QUAD_CLASSES.index(QuadClass.GENERAL_POSITION), dtype=np.int64)
    three = col3(a, b, c) | col3(a, b, d) | col3(a, c, d) | col3(b, c, d)
    # four points on one line: a,b,c collinear and a,b,d collinear (a != b) etc.
    allcol = col3(a, b, c) & col3(a, b, d) & col3(a, c, d) & col3(b, c, d)
    out[three] = QUAD_CLASSES.index(QuadClass.THREE_COLLINEAR)
    out[(a == d) | (b == c)] = QUAD_CLASSES.index(QuadClass.CROSSED)
    out[allcol] = QUAD_CLASSES.index(QuadClass.ALL_COLLINEAR)
    out[(a == c) | (b == d)] = QUAD_CLASSES.index(QuadClass.INCONSISTENT)
    out[(a == c) & (b == d)] = QUAD_CLASSES.index(QuadClass.IDENTICAL)
    out[(a == b) | (c == d)] = QUAD_CLASSES.index(QuadClass.DEGENERATE)
    return out
