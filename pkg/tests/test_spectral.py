import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import ctx
from pgl3ekr import spectral as sp
from pgl3ekr.errors import BudgetExceeded, SizeMismatch
from pgl3ekr.search import max_coclique_search, maximum_cliques


def test_graph_params_examples():
    p2, p3, p4 = sp.graph_params(2), sp.graph_params(3), sp.graph_params(4)
    assert (p2.d, p2.tau, p2.bound) == (48, -8, 24)
    assert (p3.d, p3.tau, p3.bound) == (1728, -144, 432)
    assert p4.psl_d0 == 5760 and p4.psl_bound == 960
    assert p4.psl_tau0_consistent == -288 and p4.psl_tau0_paper == -864
    assert p2.psl_d0 is None


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9, 11, 13, 16])
def test_ratio_identity(q):
    p = sp.graph_params(q)
    assert 1 - Fraction(p.d, p.tau) == q * q + q + 1
    assert p.bound == q ** 3 * (q * q - 1) * (q - 1)
    assert p.bound.denominator == 1


def test_psl_identity_q7():
    p = sp.graph_params(7)
    assert p.psl_bound == 7 ** 3 * 48 * 6 // 3


def test_is_coclique(ctx2):
    G = ctx2.group
    assert sp.is_coclique(G.point_coset(0, 0), G)
    assert sp.is_coclique(G.line_coset(2, 5), G)
    assert not sp.is_coclique([G.identity, int(G.derangement_ids[0])], G)


def test_canonical_cocliques(ctx2, ctx3):
    can = sp.canonical_cocliques(ctx2.group)
    assert len(can) == 98 and len({c.members for c in can}) == 98
    assert {c.size for c in can} == {24}
    assert all(sp.is_coclique(c.members, ctx2.group) for c in can)
    can3 = sp.canonical_cocliques(ctx3.group)
    assert len(can3) == 338 and {c.size for c in can3} == {432}


@pytest.mark.parametrize("q,tau", [(2, -8), (3, -144)])
def test_certify_tau(q, tau):
    G = ctx(q).group
    assert sp.certify_tau_eigenvector(G.point_coset(0, 0), G)
    assert sp.certify_tau_eigenvector(G.line_coset(1, 3), G)
    assert sp.implied_eigenvalue(G.line_coset(1, 3), G) == tau


def test_certify_rejects(ctx2):
    G = ctx2.group
    with pytest.raises(SizeMismatch):
        sp.certify_tau_eigenvector([0, 1, 2], G)
    # a non-coset of the right size is not an eigenvector
    S = list(G.point_coset(0, 0)[:-1]) + [int(np.setdiff1d(np.arange(G.order), G.point_coset(0, 0))[0])]
    assert not sp.certify_tau_eigenvector(S, G)


def test_psl_q4(ctx4):
    G = ctx4.group
    H = np.flatnonzero(G.psl_coset == 0)
    S = np.intersect1d(G.point_coset(0, 0), H)
    assert len(S) == 960 and sp.is_coclique(S, G)
    assert sp.implied_eigenvalue(S, G, H) == -288
    assert sp.certify_tau_eigenvector(S, G, within=H)


def test_coset_distribution(ctx2, ctx4):
    G = ctx4.group
    assert sp.coset_distribution(G.point_coset(0, 0), G) == ((960, 960, 960), (0, 0), (0, 0))
    assert sp.coset_distribution(G.line_coset(3, 7), G)[0] == (960, 960, 960)
    assert sp.coset_distribution(ctx2.group.point_coset(1, 1), ctx2.group) == ((24, 0, 0), (24, 0), (24, 0))
    # xi vanishes exactly iff the counts are equal
    assert abs(sp.xi_value((5, 5, 5))) < 1e-12 and abs(sp.xi_value((5, 4, 5))) > 0.5


def test_spectrum_q2(ctx2):
    spec = sp.spectrum_q2(ctx2.group)
    assert spec == {48.0: 1, 6.0: 64, 0.0: 49, -8.0: 54}
    assert sum(spec.values()) == 168 and sum(k * m for k, m in spec.items()) == 0


def test_valency_and_closure(ctx2, ctx3):
    for c in (ctx2, ctx3):
        G = c.group
        deg = sp.vertex_degrees(G, range(0, G.order, 37))
        assert (deg == len(G.derangement_ids)).all()
        assert sp.derangements_inverse_closed(G)
    assert sp.derangements_conjugation_closed(ctx2.group, range(ctx2.group.order))


def test_search_q2(ctx2):
    res = max_coclique_search(ctx2.group)
    assert res.size == 24 and res.status == "optimal"
    assert set(res.cocliques) == {c.members for c in sp.canonical_cocliques(ctx2.group)}


def test_search_q3_budget(ctx3):
    seed = ctx3.group.point_coset(0, 0)
    with pytest.raises(BudgetExceeded) as info:
        max_coclique_search(ctx3.group, budget_secs=1.0, seeds=[seed])
    best = info.value.best
    assert best.status == "lower_bound_only" and best.size == 432
    assert sp.is_coclique(best.cocliques[0], ctx3.group)


def _brute_max_cliques(n, edges):
    best, found = 0, []
    for r in range(n, 0, -1):
        for S in itertools.combinations(range(n), r):
            if all((a, b) in edges for a, b in itertools.combinations(S, 2)):
                found.append(S)
        if found:
            return r, sorted(found)
    return 0, []


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 11), st.data())
def test_clique_search_against_brute_force(n, data):
    pairs = list(itertools.combinations(range(n), 2))
    keep = data.draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    edges = {p for p, k in zip(pairs, keep) if k}
    adj = [0] * n
    for a, b in edges:
        adj[a] |= 1 << b
        adj[b] |= 1 << a
    res = maximum_cliques(adj)
    size, found = _brute_max_cliques(n, edges)
    assert res.size == size
    assert list(res.cocliques) == found
