"""Vectors and matrices indexed by ordered point pairs.

A pair vector is an int64 array of length ``n*n``; coordinate
``a*n + b`` belongs to the ordered pair (a, b).  All vector families used
here are integral, so plain integer arrays are exact.

``A`` is the |G| x n^2 incidence matrix with ``A[g, (a, b)] = 1`` iff
``a^g = b``; ``M`` is its restriction to derangement rows and ``B`` to the
remaining rows.  Neither is materialized: ``N = M^T M`` and ``A^T A`` are
accumulated directly from the point-action table.
"""

from __future__ import annotations

import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import GeometryViolation, TooSmallField
from .geometry import QUAD_CLASSES, Plane, QuadClass, classify_quadruples
from .group import Group, group_order


def uv_constants(q: int) -> tuple[int, int]:
    u = (q - 2) * q * (q * q - 1)
    v = (q - 1) * q * (q * q - 1)
    assert u % 3 == 0 and v % 3 == 0
    return u // 3, v // 3


def closed_N_entry(cls: QuadClass, q: int) -> int:
    u, v = uv_constants(q)
    return {
        QuadClass.DEGENERATE: 0,
        QuadClass.INCONSISTENT: 0,
        QuadClass.ALL_COLLINEAR: 0,
        QuadClass.IDENTICAL: q * q * v,
        QuadClass.CROSSED: v,
        QuadClass.THREE_COLLINEAR: v,
        QuadClass.GENERAL_POSITION: u,
    }[cls]


def _entry_table(q: int) -> np.ndarray:
    return np.array([closed_N_entry(c, q) for c in QUAD_CLASSES], dtype=np.int64)


def closed_N_at(plane: Plane, a, b, c, d) -> np.ndarray:
    """Closed-form N entries for arrays of quadruples."""
    return _entry_table(plane.q)[classify_quadruples(plane, a, b, c, d)]


def closed_N_matrix(plane: Plane) -> np.ndarray:
    n = plane.n
    i = np.arange(n * n)
    rows, cols = np.meshgrid(i, i, indexing="ij")
    return closed_N_at(plane, rows // n, rows % n, cols // n, cols % n)


@dataclass
class NMatrix:
    q: int
    n: int
    entries: np.ndarray
    uv: tuple[int, int]

    def __matmul__(self, x):
        return self.entries @ x

    def entry(self, a, b, c, d) -> int:
        n = self.n
        return int(self.entries[a * n + b, c * n + d])


def _pair_gram(group: Group, gids: np.ndarray, workers: int = 1, chunk: int = 4096) -> np.ndarray:
    """sum over g in gids of r_g r_g^T, with r_g the 0/1 row of A at g."""
    n = group.n
    n2 = n * n
    base = np.arange(n, dtype=np.int64) * n

    def part(block):
        idx = base + group.point_perm[block].astype(np.int64)
        flat = (idx[:, :, None] * n2 + idx[:, None, :]).ravel()
        return np.bincount(flat, minlength=n2 * n2)

    blocks = [gids[s:s + chunk] for s in range(0, len(gids), chunk)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(part, blocks))
    else:
        parts = map(part, blocks)
    total = np.zeros(n2 * n2, dtype=np.int64)
    for p in parts:
        total += p
    return total.reshape(n2, n2)


def build_N(group: Group, workers: int = 1) -> NMatrix:
    """N = M^T M: entry ((a,b),(c,d)) counts derangements g with a^g = b and c^g = d."""
    ent = _pair_gram(group, group.derangement_ids, workers)
    return NMatrix(group.q, group.n, ent, uv_constants(group.q))


def build_gram_A(group: Group, workers: int = 1) -> np.ndarray:
    return _pair_gram(group, np.arange(group.order), workers)


def closed_gram_A(q: int) -> np.ndarray:
    """(q-1)(q^2-1)q^3 I + (q-1)^2 q^2 (J-I) (x) (J-I)."""
    n = q * q + q + 1
    JI = np.ones((n, n), dtype=np.int64) - np.eye(n, dtype=np.int64)
    return (q - 1) * (q * q - 1) * q ** 3 * np.eye(n * n, dtype=np.int64) + (q - 1) ** 2 * q * q * np.kron(JI, JI)


def gram_eigenvalues(q: int) -> dict[int, int]:
    """Exact spectrum of A^T A as {eigenvalue: multiplicity}."""
    n = q * q + q + 1
    a = (q - 1) * (q * q - 1) * q ** 3
    b = (q - 1) ** 2 * q * q
    return {a + b * (n - 1) ** 2: 1, a + b: (n - 1) ** 2, a - b * (n - 1): 2 * (n - 1)}


# --- N dump ------------------------------------------------------------------------

NMAT_MAGIC = b"NMAT"


def dump_N(N: NMatrix, path) -> None:
    """Header: magic, u32 q, u32 n (points), u32 reserved; then row-major int64 LE."""
    with open(path, "wb") as fh:
        fh.write(NMAT_MAGIC + struct.pack("<III", N.q, N.n, 0))
        fh.write(np.ascontiguousarray(N.entries, dtype="<i8").tobytes())


def load_N(path) -> NMatrix:
    with open(path, "rb") as fh:
        head = fh.read(16)
        if head[:4] != NMAT_MAGIC:
            raise ValueError("not an NMAT file")
        q, n, _ = struct.unpack("<III", head[4:])
        data = np.frombuffer(fh.read(), dtype="<i8").astype(np.int64)
    return NMatrix(q, n, data.reshape(n * n, n * n), uv_constants(q))


# --- B = non-derangement block of A -----------------------------------------------

def apply_A(x, group: Group, gids=None) -> np.ndarray:
    """(A x)_g = sum over points a of x[(a, a^g)], for the given gids (default all)."""
    n = group.n
    if gids is None:
        gids = np.arange(group.order)
    x = np.asarray(x)
    idx = np.arange(n) * n + group.point_perm[gids].astype(np.int64)
    return x[idx].sum(axis=-1)


def nonderangement_ids(group: Group) -> np.ndarray:
    return np.flatnonzero(~group.is_derangement_mask)


def apply_B(x, group: Group) -> np.ndarray:
    """B x, indexed by the non-derangements in increasing gid order."""
    return apply_A(x, group, nonderangement_ids(group))


def chi_point_stabilizer(group: Group, a: int, gids=None) -> np.ndarray:
    gids = np.arange(group.order) if gids is None else gids
    return (group.point_perm[gids, a] == a).astype(np.int64)


def chi_line_stabilizer(group: Group, l: int, gids=None) -> np.ndarray:
    gids = np.arange(group.order) if gids is None else gids
    return (group.line_perm[gids, l] == l).astype(np.int64)


# --- vector families --------------------------------------------------------------

class Pairs:
    """Builders for the special pair vectors on one plane."""

    def __init__(self, plane: Plane):
        self.plane = plane
        self.n = plane.n

    def zero(self) -> np.ndarray:
        return np.zeros(self.n * self.n, dtype=np.int64)

    def e(self, a: int, b: int) -> np.ndarray:
        v = self.zero()
        v[a * self.n + b] = 1
        return v

    def e1_point(self, a: int) -> np.ndarray:
        v = self.zero().reshape(self.n, self.n)
        v[a, :] = 1
        return v.ravel()

    def e2_point(self, a: int) -> np.ndarray:
        v = self.zero().reshape(self.n, self.n)
        v[:, a] = 1
        return v.ravel()

    def e_line(self, l: int) -> np.ndarray:
        pts = self.plane.points_on_line[l]
        v = self.zero().reshape(self.n, self.n)
        v[np.ix_(pts, pts)] = 1
        return v.ravel()

    def e_all(self) -> np.ndarray:
        return (1 - np.eye(self.n, dtype=np.int64)).ravel()

    def e_diag(self, a: int) -> np.ndarray:
        return self.e(a, a)

    def e_point_line(self, a: int, l: int) -> np.ndarray:
        if not self.plane.incidence[a, l]:
            raise GeometryViolation(f"point {a} is not on line {l}")
        v = self.zero().reshape(self.n, self.n)
        v[a, self.plane.points_on_line[l]] = 1
        return v.ravel()

    def e_line_point(self, l: int, a: int) -> np.ndarray:
        if not self.plane.incidence[a, l]:
            raise GeometryViolation(f"point {a} is not on line {l}")
        v = self.zero().reshape(self.n, self.n)
        v[self.plane.points_on_line[l], a] = 1
        return v.ravel()

    def _check_triangle(self, a, b, c):
        if len({a, b, c}) < 3 or self.plane.collinear(a, b, c):
            raise GeometryViolation(f"points {a}, {b}, {c} are collinear")

    def e_triple_1(self, a: int, b: int, c: int) -> np.ndarray:
        self._check_triangle(a, b, c)
        lt, pl = self.plane.line_through, self.e_point_line
        return (
            pl(a, lt[a, b]) - pl(b, lt[a, b])
            + pl(b, lt[b, c]) - pl(c, lt[b, c])
            + pl(c, lt[c, a]) - pl(a, lt[c, a])
        )

    def e_triple_2(self, a: int, b: int, c: int) -> np.ndarray:
        self._check_triangle(a, b, c)
        lt, lp = self.plane.line_through, self.e_line_point
        return (
            lp(lt[a, b], a) - lp(lt[a, b], b)
            + lp(lt[b, c], b) - lp(lt[b, c], c)
            + lp(lt[c, a], c) - lp(lt[c, a], a)
        )

    def e_quad(self, a: int, b: int, c: int, d: int) -> np.ndarray:
        if len({a, b, c, d}) < 4 or not self.plane.collinear(a, b, c, d):
            raise GeometryViolation(f"points {a}, {b}, {c}, {d} are not four distinct collinear points")
        return self.e(a, c) - self.e(a, d) + self.e(b, d) - self.e(b, c)

    def special_vector(self, kind: str, *params) -> np.ndarray:
        try:
            build = getattr(self, kind)
        except AttributeError:
            raise ValueError(f"unknown vector kind {kind!r}") from None
        return build(*(int(p) for p in params))

    # --- structured families ------------------------------------------------

    def v0_basis(self, base_point: int, base_line: int) -> list[np.ndarray]:
        """Diagonal vectors, then e1/e2 point differences, then line differences."""
        n = self.n
        out = [self.e_diag(a) for a in range(n)]
        out += [self.e1_point(base_point) - self.e1_point(a) for a in range(n) if a != base_point]
        out += [self.e2_point(base_point) - self.e2_point(a) for a in range(n) if a != base_point]
        out += [self.e_line(base_line) - self.e_line(l) for l in range(n) if l != base_line]
        return out

    def gram_kernel_basis(self, base_point: int) -> list[np.ndarray]:
        """Point differences spanning the right kernel of A."""
        n = self.n
        out = [self.e1_point(base_point) - self.e1_point(a) for a in range(n) if a != base_point]
        out += [self.e2_point(base_point) - self.e2_point(a) for a in range(n) if a != base_point]
        return out

    def f_family(self, l: int) -> list[np.ndarray]:
        """Explicit independent quadruple vectors on one line (q^2 - q - 1 of them)."""
        q = self.plane.q
        if q <= 2:
            raise TooSmallField("quadruple family needs at least 4 points per line (q > 2)")
        p = [int(x) for x in self.plane.points_on_line[l]]
        eq = self.e_quad
        fam = [eq(p[i], p[q - 1], p[j], p[q]) for i in range(q - 1) for j in range(q - 1) if i != j]
        fam += [eq(p[i], p[q - 2], p[q - 1], p[q]) for i in range(q - 2)]
        fam += [eq(p[q - 1], p[q], p[i], p[q - 2]) for i in range(q - 2)]
        fam.append(eq(p[q - 2], p[q], p[q - 3], p[q - 1]))
        return fam

    def triple_span_family(self, base_point: int, base_line: int) -> list[np.ndarray]:
        """The 2q^3 triple vectors with one vertex fixed at a point of a fixed line."""
        P = self.plane
        off = [b for b in range(self.n) if not P.incidence[b, base_line]]
        on = [int(c) for c in P.points_on_line[base_line] if c != base_point]
        fam = [self.e_triple_1(base_point, b, c) for b in off for c in on]
        fam += [self.e_triple_2(base_point, b, c) for b in off for c in on]
        return fam

    # --- closed forms for N e_{a l} ----------------------------------------------

    def n_point_line_expansion(self, a: int, l: int, q: int) -> np.ndarray:
        """Closed form of N e_{a l} (a on l) as a sum over four pair sets."""
        _, v = uv_constants(q)
        P, n = self.plane, self.n
        inc, lt = P.incidence, P.line_through
        w = self.zero().reshape(n, n)
        for b in P.points_on_line[l]:
            if b != a:
                w[a, b] += q * q * v
        for g in range(n):
            if inc[g, l]:
                if g != a:
                    for h in range(n):
                        if not inc[h, l]:
                            w[g, h] += q * v
                continue
            m = lt[a, g]
            for h in range(n):
                if not inc[h, m]:
                    w[g, h] += (q - 1) * v
                elif h != g:
                    w[g, h] += q * v
        return w.ravel()

    def n_point_line_remark(self, a: int, l: int, q: int) -> np.ndarray:
        """The same vector written through e_{a l}-type vectors."""
        u, v = uv_constants(q)
        P, n = self.plane, self.n
        lt = P.line_through
        out = q * q * v * (self.e_point_line(a, l) - self.e_diag(a))
        for g in range(n):
            if P.incidence[g, l]:
                if g != a:
                    out += q * v * (self.e1_point(g) - self.e_point_line(g, l))
            else:
                m = lt[a, g]
                out += (q - 1) * v * (self.e1_point(g) - self.e_point_line(g, m))
                out += q * v * (self.e_point_line(g, m) - self.e_diag(g))
        return out


def noncollinear_triples(plane: Plane) -> np.ndarray:
    n = plane.n
    a, b, c = np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij")
    a, b, c = a.ravel(), b.ravel(), c.ravel()
    ok = (a != b) & (a != c) & (b != c)
    a, b, c = a[ok], b[ok], c[ok]
    ok = ~plane.incidence[c, plane.line_through[a, b]]
    return np.stack([a[ok], b[ok], c[ok]], axis=1)


def collinear_quadruples(plane: Plane) -> list[tuple[int, int, int, int]]:
    import itertools

    out = []
    for l in range(plane.n):
        pts = [int(x) for x in plane.points_on_line[l]]
        out.extend(itertools.permutations(pts, 4))
    return out


def pair_order_check(q: int) -> int:
    """|G| / (n(n-1)): number of elements mapping one ordered pair of distinct points to another."""
    n = q * q + q + 1
    return group_order(q) // (n * (n - 1))
