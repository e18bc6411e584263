"""PGL(3, q) enumerated as normalized 3x3 matrices acting on PG(2, q).

Points are row vectors and act by ``x -> x @ M``, so ``compose(g, h)`` is the
matrix product ``g @ h`` and ``point_perm[compose(g, h)] ==
point_perm[h][point_perm[g]]``.  Every element is stored once, as the
scalar multiple whose first nonzero entry (row-major) is 1; ids follow
lexicographic order of those normalized matrices.

Group products never touch matrices: an element of PGL(3, q) is determined
by the images of the projective frame <e1>, <e2>, <e3>, <e1+e2+e3>, so a
dense lookup on those four images resolves any permutation to its id.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import TooLarge
from .geometry import Plane, ProjLine, ProjPoint
from .gf import Field, Poly

MAX_ENUM_Q = 5


def group_order(q: int) -> int:
    return q ** 3 * (q ** 3 - 1) * (q ** 2 - 1)


# --- 3x3 matrices over a Field, as tuples of rows ---------------------------

def mat_mul(F: Field, a, b):
    return tuple(
        tuple(
            F.add(F.add(F.mul(a[i][0], b[0][j]), F.mul(a[i][1], b[1][j])), F.mul(a[i][2], b[2][j]))
            for j in range(3)
        )
        for i in range(3)
    )


def mat_det(F: Field, m) -> int:
    m_, s, a = F.mul, F.sub, F.add
    t0 = m_(m[0][0], s(m_(m[1][1], m[2][2]), m_(m[1][2], m[2][1])))
    t1 = m_(m[0][1], s(m_(m[1][0], m[2][2]), m_(m[1][2], m[2][0])))
    t2 = m_(m[0][2], s(m_(m[1][0], m[2][1]), m_(m[1][1], m[2][0])))
    return a(s(t0, t1), t2)


def mat_inv(F: Field, m):
    d = mat_det(F, m)
    if d == 0:
        raise ZeroDivisionError("singular matrix")
    di = F.inv(d)
    cof = [[0] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            r = [x for x in range(3) if x != i]
            c = [y for y in range(3) if y != j]
            minor = F.sub(F.mul(m[r[0]][c[0]], m[r[1]][c[1]]), F.mul(m[r[0]][c[1]], m[r[1]][c[0]]))
            cof[i][j] = minor if (i + j) % 2 == 0 else F.neg(minor)
    # inverse = adj / det, adj = cofactor transpose
    return tuple(tuple(F.mul(cof[j][i], di) for j in range(3)) for i in range(3))


def mat_normalize(F: Field, m):
    flat = [x for row in m for x in row]
    lead = next(x for x in flat if x)
    s = F.inv(lead)
    return tuple(tuple(F.mul(s, x) for x in row) for row in m)


def char_poly_of(F: Field, m) -> Poly:
    """det(T*I - m) as a monic cubic."""
    tr = F.add(F.add(m[0][0], m[1][1]), m[2][2])
    minors = 0
    for i, j in ((0, 1), (0, 2), (1, 2)):
        minors = F.add(minors, F.sub(F.mul(m[i][i], m[j][j]), F.mul(m[i][j], m[j][i])))
    return Poly((F.neg(mat_det(F, m)), minors, F.neg(tr), 1))


# --- vectorized field helpers ------------------------------------------------

def _vdet(F: Field, M: np.ndarray) -> np.ndarray:
    """Determinants of a stack of (..., 3, 3) matrices, via table lookups."""
    A, Mu, Ng = F.add_table, F.mul_table, F.neg_table

    def sub(x, y):
        return A[x, Ng[y]]

    def minor(r0, r1, c0, c1):
        return sub(Mu[M[..., r0, c0], M[..., r1, c1]], Mu[M[..., r0, c1], M[..., r1, c0]])

    t0 = Mu[M[..., 0, 0], minor(1, 2, 1, 2)]
    t1 = Mu[M[..., 0, 1], minor(1, 2, 0, 2)]
    t2 = Mu[M[..., 0, 2], minor(1, 2, 0, 1)]
    return A[sub(t0, t1), t2]


def _vact(F: Field, X: np.ndarray, M: np.ndarray) -> np.ndarray:
    """Row vectors X (P, 3) times each matrix of M (C, 3, 3) -> (C, P, 3)."""
    A, Mu = F.add_table, F.mul_table
    out = np.empty((M.shape[0], X.shape[0], 3), dtype=np.int64)
    for j in range(3):
        acc = Mu[X[None, :, 0], M[:, None, 0, j]]
        for i in (1, 2):
            acc = A[acc, Mu[X[None, :, i], M[:, None, i, j]]]
        out[:, :, j] = acc
    return out


@dataclass(frozen=True)
class GroupElement:
    gid: int
    mat: tuple
    point_perm: tuple[int, ...]
    line_perm: tuple[int, ...]

    def fixed_counts(self) -> tuple[int, int]:
        fp = sum(1 for i, x in enumerate(self.point_perm) if i == x)
        fl = sum(1 for i, x in enumerate(self.line_perm) if i == x)
        return fp, fl

    def fixed_points(self) -> list[int]:
        return [i for i, x in enumerate(self.point_perm) if i == x]

    def fixed_lines(self) -> list[int]:
        return [i for i, x in enumerate(self.line_perm) if i == x]

    @property
    def is_derangement(self) -> bool:
        return self.fixed_counts()[0] == 0


def fixed_counts(g: GroupElement) -> tuple[int, int]:
    return g.fixed_counts()


def is_derangement(g: GroupElement) -> bool:
    return g.is_derangement


class Group:
    """All of PGL(3, q) with point/line action tables.

    ``mats`` is (|G|, 3, 3); ``point_perm`` and ``line_perm`` are (|G|, n)
    with ``point_perm[g, a]`` the id of the image of point ``a`` under ``g``.
    """

    def __init__(self, plane: Plane, workers: int = 1, max_q: int = MAX_ENUM_Q):
        F = plane.field
        q, n = plane.q, plane.n
        if q > max_q:
            raise TooLarge(f"full enumeration of PGL(3,{q}) exceeds bound q <= {max_q}")
        self.plane, self.field, self.q, self.n = plane, F, q, n
        self.workers = max(1, int(workers))

        tails = np.array(list(itertools.product(range(q), repeat=6)), dtype=np.int64).reshape(-1, 2, 3)
        pdt = np.int16 if n < 2 ** 15 else np.int32

        def chunk(first_row):
            M = np.empty((tails.shape[0], 3, 3), dtype=np.int64)
            M[:, 0, :] = first_row
            M[:, 1:, :] = tails
            M = M[_vdet(F, M) != 0]
            imgs = _vact(F, plane.coords, M)
            pp = plane.coord_index[(imgs[..., 0] * q + imgs[..., 1]) * q + imgs[..., 2]]
            return M.astype(np.int8), pp.astype(pdt)

        rows = [p.coords for p in plane.points]
        if self.workers > 1:
            with ThreadPoolExecutor(self.workers) as ex:
                parts = list(ex.map(chunk, rows))
        else:
            parts = [chunk(r) for r in rows]
        self.mats = np.concatenate([m for m, _ in parts])
        self.point_perm = np.concatenate([p for _, p in parts])
        self.order = self.mats.shape[0]
        assert self.order == group_order(q)

        two = np.array([plane.points_on_line[l][:2] for l in range(n)])
        self.line_perm = plane.line_through[
            self.point_perm[:, two[:, 0]], self.point_perm[:, two[:, 1]]
        ].astype(pdt)

        ar = np.arange(n)
        self.fixed_point_count = (self.point_perm == ar).sum(axis=1)
        self.fixed_line_count = (self.line_perm == ar).sum(axis=1)
        self.is_derangement_mask = self.fixed_point_count == 0
        self.derangement_ids = np.flatnonzero(self.is_derangement_mask)

        pt = plane.point_of
        self.frame = np.array([pt((1, 0, 0)).id, pt((0, 1, 0)).id, pt((0, 0, 1)).id, pt((1, 1, 1)).id])
        self._frame_lookup = np.full(n ** 4, -1, dtype=np.int32)
        self._frame_lookup[self._frame_key(self.point_perm[:, self.frame])] = np.arange(self.order)
        self._mat_lookup = np.full(q ** 9, -1, dtype=np.int32)
        self._mat_lookup[self._mat_key(self.mats.reshape(-1, 9))] = np.arange(self.order)
        self.identity = int(self._mat_lookup[self._mat_key(np.eye(3, dtype=np.int64).reshape(1, 9))[0]])

        for t in (self.mats, self.point_perm, self.line_perm):
            t.setflags(write=False)

    # --- indexing -----------------------------------------------------------

    def _frame_key(self, imgs: np.ndarray) -> np.ndarray:
        n = self.n
        imgs = imgs.astype(np.int64)
        return ((imgs[..., 0] * n + imgs[..., 1]) * n + imgs[..., 2]) * n + imgs[..., 3]

    def _mat_key(self, flat: np.ndarray) -> np.ndarray:
        flat = np.asarray(flat, dtype=np.int64)
        key = np.zeros(flat.shape[:-1], dtype=np.int64)
        for i in range(9):
            key = key * self.q + flat[..., i]
        return key

    def gid_of_perm(self, perm) -> int:
        perm = np.asarray(perm)
        return int(self._frame_lookup[self._frame_key(perm[self.frame])])

    def gid_of_matrix(self, m) -> int:
        m = mat_normalize(self.field, m)
        gid = int(self._mat_lookup[self._mat_key(np.array(m).reshape(9))])
        if gid < 0:
            raise ValueError("singular matrix")
        return gid

    def element(self, gid: int) -> GroupElement:
        gid = int(gid)
        return GroupElement(
            gid,
            tuple(tuple(int(x) for x in row) for row in self.mats[gid]),
            tuple(int(x) for x in self.point_perm[gid]),
            tuple(int(x) for x in self.line_perm[gid]),
        )

    def __len__(self):
        return self.order

    def __repr__(self):
        return f"PGL(3,{self.q})"

    # --- group law -----------------------------------------------------------

    def compose(self, g, h):
        """Product ``g*h``: first g, then h.  Accepts scalars or equal-shape arrays of gids."""
        imgs = self.point_perm[np.asarray(h)[..., None], self.point_perm[g][..., self.frame]]
        out = self._frame_lookup[self._frame_key(imgs)]
        return int(out) if np.ndim(out) == 0 else out.astype(np.int64)

    @cached_property
    def inverse_table(self) -> np.ndarray:
        inv_pp = np.argsort(self.point_perm, axis=1)
        t = self._frame_lookup[self._frame_key(inv_pp[:, self.frame])].astype(np.int64)
        t.setflags(write=False)
        return t

    def inverse(self, g):
        out = self.inverse_table[g]
        return int(out) if np.ndim(out) == 0 else out

    def quotient_is_derangement(self, g, h) -> np.ndarray:
        """Whether ``g * h^-1`` is a derangement, i.e. g and h disagree on every point."""
        return (self.point_perm[g] != self.point_perm[h]).all(axis=-1)

    # --- per-element data --------------------------------------------------

    def fixed_counts(self, gid: int) -> tuple[int, int]:
        return int(self.fixed_point_count[gid]), int(self.fixed_line_count[gid])

    def is_derangement(self, gid: int) -> bool:
        return bool(self.is_derangement_mask[gid])

    def char_poly(self, gid: int) -> Poly:
        return char_poly_of(self.field, self.element(gid).mat)

    @cached_property
    def determinants(self) -> np.ndarray:
        return _vdet(self.field, self.mats.astype(np.int64))

    @cached_property
    def psl_coset(self) -> np.ndarray:
        """Coset of PSL(3, q) containing each element, labelled 0/1/2 by log(det) mod 3."""
        F, q = self.field, self.q
        if math.gcd(3, q - 1) == 1:
            out = np.zeros(self.order, dtype=np.int8)
        else:
            w = F.primitive_element()
            dlog = np.zeros(q, dtype=np.int64)
            x = 1
            for k in range(q - 1):
                dlog[x] = k
                x = F.mul(x, w)
            out = (dlog[self.determinants] % 3).astype(np.int8)
        out.setflags(write=False)
        return out

    def psl_coset_index(self, gid: int) -> int:
        return int(self.psl_coset[gid])

    # --- stabilizers ------------------------------------------------------------

    def stabilizer(self, obj) -> np.ndarray:
        """Sorted gids fixing a ProjPoint or ProjLine."""
        if isinstance(obj, ProjLine):
            return self.line_coset(obj.id, obj.id)
        if isinstance(obj, ProjPoint):
            return self.point_coset(obj.id, obj.id)
        raise TypeError("stabilizer expects a ProjPoint or ProjLine")

    def point_coset(self, a: int, b: int) -> np.ndarray:
        """All g with a^g = b."""
        return np.flatnonzero(self.point_perm[:, a] == b)

    def line_coset(self, l: int, m: int) -> np.ndarray:
        """All g with l^g = m."""
        return np.flatnonzero(self.line_perm[:, l] == m)

    # --- witness fixing exactly one point and one line ---------------------

    def witness_fixing_only(self, point, line) -> GroupElement:
        """An element whose only fixed point is ``point`` and only fixed line is ``line``.

        Conjugates a canonical element by a basis change sending <e1> to the
        point and <e1,e2> (flag) or <e2,e3> (anti-flag) to the line.  The
        basis is chosen among e1, e2, e3 first, then by point id, so the
        standard configurations use the identity.
        """
        F, P = self.field, self.plane
        a = point if isinstance(point, int) else point.id
        l = line if isinstance(line, int) else line.id
        on_line = set(int(x) for x in P.points_on_line[l])
        std = [P.point_of(v).id for v in ((1, 0, 0), (0, 1, 0), (0, 0, 1))]
        prefer = std + [x for x in range(P.n) if x not in std]

        def pick(ok):
            return next(x for x in prefer if ok(x))

        if a in on_line:
            v2 = pick(lambda x: x in on_line and x != a)
            v3 = pick(lambda x: x not in on_line)
            g0 = ((1, 0, 0), (1, 1, 0), (0, 1, 1))
        else:
            v2 = pick(lambda x: x in on_line)
            v3 = pick(lambda x: x in on_line and x != v2)
            c0, c1 = _first_irreducible_quadratic(F)
            # companion of T^2 + c1 T + c0 in the row convention
            g0 = ((1, 0, 0), (0, 0, 1), (0, F.neg(c0), F.neg(c1)))
        h = tuple(P.points[x].coords for x in (a, v2, v3))
        g = mat_mul(F, mat_mul(F, mat_inv(F, h), g0), h)
        return self.element(self.gid_of_matrix(g))


def _first_irreducible_quadratic(F: Field) -> tuple[int, int]:
    for c1 in range(F.q):
        for c0 in range(F.q):
            if all(F.add(F.add(F.mul(x, x), F.mul(c1, x)), c0) for x in range(F.q)):
                return c0, c1
    raise AssertionError("no irreducible quadratic")


def group_enumerate(plane: Plane, workers: int = 1, max_q: int = MAX_ENUM_Q) -> Group:
    return Group(plane, workers=workers, max_q=max_q)
