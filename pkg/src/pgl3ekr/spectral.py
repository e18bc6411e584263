"""The derangement graph of PGL(3, q) and its maximum cocliques.

Two elements g, h are adjacent iff ``g h^-1`` is a derangement, i.e. iff
their point permutations disagree on every point.  Adjacency is never
stored beyond q = 2; products with the adjacency matrix are computed by
sweeping over elements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import SizeMismatch
from .exactla import jacobi_spectrum, multiset
from .group import Group, group_order


@dataclass(frozen=True)
class GraphParams:
    q: int
    order: int
    d: int
    tau: int
    bound: Fraction
    psl_order: int | None = None
    psl_d0: Fraction | None = None
    psl_tau0_paper: Fraction | None = None
    psl_tau0_consistent: Fraction | None = None
    psl_bound: Fraction | None = None
    psl_bound_paper: Fraction | None = None


def graph_params(q: int) -> GraphParams:
    G = group_order(q)
    d = (q * q - 1) ** 2 * q ** 4 // 3
    tau = -((q - 1) * (q * q - 1) * q ** 3 // 3)
    bound = Fraction(G) / (1 - Fraction(d, tau))
    extra = {}
    if (q - 1) % 3 == 0:
        psl = G // 3
        d0 = Fraction((q - 1) ** 2 * (q + 2) * (q * q - 1) * q ** 3, 9)
        t_paper = Fraction(-(q - 1) ** 3 * (q + 2) * q * q, 3)
        t_cons = Fraction(-(q - 1) ** 3 * (q + 2) * q * q, 9)
        extra = dict(
            psl_order=psl,
            psl_d0=d0,
            psl_tau0_paper=t_paper,
            psl_tau0_consistent=t_cons,
            psl_bound=psl / (1 - d0 / t_cons),
            psl_bound_paper=psl / (1 - d0 / t_paper),
        )
    return GraphParams(q, G, d, tau, bound, **extra)


@dataclass(frozen=True)
class Coclique:
    members: tuple[int, ...]
    kind: str = ""
    params: tuple = ()

    @property
    def size(self) -> int:
        return len(self.members)


def _ambient(group: Group, within) -> np.ndarray:
    return np.arange(group.order) if within is None else np.asarray(within)


def is_coclique(S, group: Group) -> bool:
    pp = group.point_perm[np.asarray(sorted(set(int(s) for s in S)), dtype=np.int64)]
    for i in range(len(pp) - 1):
        if (pp[i + 1:] != pp[i]).all(axis=1).any():
            return False
    return True


def canonical_cocliques(group: Group) -> list[Coclique]:
    """Point cosets {g : a^g = b} then line cosets {g : l^g = m}."""
    n = group.n
    out = []
    for a in range(n):
        col = group.point_perm[:, a]
        for b in range(n):
            out.append(Coclique(tuple(int(x) for x in np.flatnonzero(col == b)), "point", (a, b)))
    for l in range(n):
        col = group.line_perm[:, l]
        for m in range(n):
            out.append(Coclique(tuple(int(x) for x in np.flatnonzero(col == m)), "line", (l, m)))
    return out


def adjacency_counts(S, group: Group, within=None, chunk: int = 64) -> np.ndarray:
    """(A_Gamma chi_S)_g = #{s in S : g s^-1 is a derangement}, for g in ``within``."""
    H = _ambient(group, within)
    ppH = group.point_perm[H]
    S = np.asarray(list(S), dtype=np.int64)
    out = np.zeros(len(H), dtype=np.int64)
    for i in range(0, len(S), chunk):
        pps = group.point_perm[S[i:i + chunk]]
        out += (ppH[None, :, :] != pps[:, None, :]).all(axis=2).sum(axis=0)
    return out


def implied_eigenvalue(S, group: Group, within=None, derangements: int | None = None):
    """If chi_S - |S|/|H| 1 is an eigenvector of the derangement graph on H, its eigenvalue.

    Exact: everything is scaled by |H| to stay integral.  Returns None when
    the vector is not an eigenvector.
    """
    H = _ambient(group, within)
    inH = np.zeros(group.order, dtype=bool)
    inH[H] = True
    S = np.asarray(sorted(set(int(s) for s in S)), dtype=np.int64)
    if derangements is None:
        derangements = int((group.is_derangement_mask & inH).sum())
    chi = np.zeros(len(H), dtype=np.int64)
    pos = np.searchsorted(H, S)
    chi[pos] = 1
    counts = adjacency_counts(S, group, H)
    h, s = len(H), len(S)
    y = [h * int(c) - s * derangements for c in counts]  # |H| * A x
    x = [h * int(c) - s for c in chi]  # |H| * x
    ratios = {Fraction(a, b) for a, b in zip(y, x) if b != 0}
    if len(ratios) != 1 or any(a != 0 for a, b in zip(y, x) if b == 0):
        return None
    return ratios.pop()


def certify_tau_eigenvector(S, group: Group, tau=None, within=None, bound=None) -> bool:
    """Exact check that chi_S - |S|/|H| 1 is a tau-eigenvector (S must attain the ratio bound)."""
    p = graph_params(group.q)
    if bound is None:
        bound = p.bound if within is None else p.psl_bound
    if tau is None:
        tau = p.tau if within is None else p.psl_tau0_consistent
    if len(set(S)) != bound:
        raise SizeMismatch(f"|S| = {len(set(S))} differs from the ratio bound {bound}")
    return implied_eigenvalue(S, group, within) == tau


def coset_distribution(S, group: Group):
    """Counts of S in the three cosets of PSL(3, q), plus xi(S) and xi^2(S) as (a, b) with value a + b*w.

    w is a primitive cube root of unity and w^2 = -1 - w, so
    c0 + c1 w + c2 w^2 = (c0 - c2) + (c1 - c2) w.
    """
    lab = group.psl_coset[np.asarray(list(S), dtype=np.int64)]
    c = tuple(int((lab == i).sum()) for i in range(3))
    xi = (c[0] - c[2], c[1] - c[2])
    xi2 = (c[0] - c[1], c[2] - c[1])
    return c, xi, xi2


def adjacency_matrix(group: Group, within=None) -> np.ndarray:
    H = _ambient(group, within)
    if len(H) > 2000:
        raise ValueError("dense adjacency only for small groups")
    pp = group.point_perm[H]
    return (pp[:, None, :] != pp[None, :, :]).all(axis=2).astype(np.int64)


def spectrum_q2(group: Group, tol: float = 1e-9) -> dict[float, int]:
    if group.q != 2:
        raise ValueError("full spectrum is only computed at q = 2")
    return multiset(jacobi_spectrum(adjacency_matrix(group), tol=tol), digits=6)


def vertex_degrees(group: Group, vertices) -> np.ndarray:
    pp = group.point_perm
    return np.array([int((pp != pp[g]).all(axis=1).sum()) for g in vertices], dtype=np.int64)


def derangements_inverse_closed(group: Group) -> bool:
    D = group.derangement_ids
    return bool(group.is_derangement_mask[group.inverse(D)].all())


def derangements_conjugation_closed(group: Group, conjugators) -> bool:
    D = group.derangement_ids
    for x in conjugators:
        xi = group.inverse(int(x))
        conj = group.compose(group.compose(np.full(len(D), xi), D), np.full(len(D), int(x)))
        if not group.is_derangement_mask[conj].all():
            return False
    return True


def xi_value(counts) -> complex:
    w = complex(math.cos(2 * math.pi / 3), math.sin(2 * math.pi / 3))
    return counts[0] + w * counts[1] + w * w * counts[2]


# re-exported for callers that only import spectral
__all__ = [
    "Coclique",
    "GraphParams",
    "adjacency_counts",
    "adjacency_matrix",
    "canonical_cocliques",
    "certify_tau_eigenvector",
    "coset_distribution",
    "derangements_conjugation_closed",
    "derangements_inverse_closed",
    "graph_params",
    "implied_eigenvalue",
    "is_coclique",
    "spectrum_q2",
    "vertex_degrees",
    "xi_value",
]
