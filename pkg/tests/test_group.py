import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import ctx
from pgl3ekr.errors import TooLarge
from pgl3ekr.geometry import plane_new
from pgl3ekr.gf import Poly, field_new
from pgl3ekr.group import Group, fixed_counts, group_order, is_derangement


@pytest.mark.parametrize("q,order,der", [(2, 168, 48), (3, 5616, 1728), (4, 60480, 19200)])
def test_order_and_derangements(q, order, der):
    G = ctx(q).group
    assert G.order == order == group_order(q)
    assert len(G.derangement_ids) == der


def test_too_large():
    with pytest.raises(TooLarge):
        Group(plane_new(field_new(7)))


def test_unique_normalized_matrices(ctx3):
    G = ctx3.group
    flat = G.mats.reshape(G.order, 9)
    assert len({tuple(r) for r in flat.tolist()}) == G.order
    first = flat[np.arange(G.order), (flat != 0).argmax(axis=1)]
    assert (first == 1).all()
    assert len({tuple(r) for r in G.point_perm.tolist()}) == G.order


def test_identity_and_duality(ctx2):
    G = ctx2.group
    assert G.fixed_counts(G.identity) == (7, 7)
    assert (G.fixed_point_count == G.fixed_line_count).all()
    for g in G.derangement_ids[:10]:
        assert fixed_counts(G.element(g)) == (0, 0)
        assert is_derangement(G.element(g))


def test_incidence_preserved(ctx3):
    G, P = ctx3.group, ctx3.plane
    for g in range(0, G.order, 97):
        pp, lp = G.point_perm[g], G.line_perm[g]
        assert (P.incidence == P.incidence[np.argsort(pp)][:, np.argsort(lp)]).all()


def test_homomorphism_exhaustive_q2(ctx2):
    G = ctx2.group
    g, h = np.meshgrid(np.arange(G.order), np.arange(G.order), indexing="ij")
    gh = G.compose(g.ravel(), h.ravel())
    expect = np.take_along_axis(G.point_perm[h.ravel()], G.point_perm[g.ravel()].astype(np.int64), 1)
    assert (G.point_perm[gh] == expect).all()


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 5615), st.integers(0, 5615), st.integers(0, 5615))
def test_group_law_q3(g, h, k):
    G = ctx(3).group
    assert G.compose(G.identity, g) == g == G.compose(g, G.identity)
    assert G.compose(g, G.inverse(g)) == G.identity
    assert G.inverse(G.inverse(g)) == g
    assert G.compose(G.compose(g, h), k) == G.compose(g, G.compose(h, k))
    assert G.gid_of_matrix(G.element(g).mat) == g


def test_char_poly(ctx2, ctx4):
    G = ctx2.group
    assert G.char_poly(G.identity) == Poly((1, 1, 1, 1))  # (T+1)^3 = (T-1)^3 over GF(2)
    comp = G.gid_of_matrix(((0, 1, 0), (0, 0, 1), (1, 1, 0)))
    assert G.char_poly(comp) == Poly((1, 1, 0, 1))  # T^3 + T + 1
    for c in (ctx2, ctx4):
        G = c.group
        for g in G.derangement_ids[:: max(1, len(G.derangement_ids) // 300)]:
            assert not G.char_poly(g).roots(G.field)


def test_psl_cosets(ctx2, ctx4):
    assert (ctx2.group.psl_coset == 0).all()
    G = ctx4.group
    assert np.bincount(G.psl_coset).tolist() == [20160] * 3
    assert G.psl_coset_index(G.identity) == 0
    # the labelling is a homomorphism onto Z/3
    rng = np.random.default_rng(1)
    g, h = rng.integers(0, G.order, size=(2, 2000))
    assert ((G.psl_coset[g] + G.psl_coset[h]) % 3 == G.psl_coset[G.compose(g, h)]).all()
    assert int(G.is_derangement_mask[G.psl_coset == 0].sum()) == 5760


def test_stabilizers(ctx2, ctx3):
    P = ctx2.plane
    G = ctx2.group
    for p in P.points:
        S = G.stabilizer(p)
        assert len(S) == 24 and G.identity in S
    G3, P3 = ctx3.group, ctx3.plane
    for l in P3.lines:
        assert len(G3.stabilizer(l)) == 432


def test_witness_examples(ctx2):
    G, P = ctx2.group, ctx2.plane
    a = P.point_of((1, 0, 0))
    flag_line = P.line_of((0, 0, 1))  # <e1, e2>
    w = G.witness_fixing_only(a, flag_line)
    assert w.mat == ((1, 0, 0), (1, 1, 0), (0, 1, 1))
    assert w.fixed_counts() == (1, 1)
    anti = P.line_of((1, 0, 0))  # <e2, e3>
    w = G.witness_fixing_only(a, anti)
    assert w.mat == ((1, 0, 0), (0, 0, 1), (0, 1, 1))
    assert w.fixed_points() == [a.id] and w.fixed_lines() == [anti.id]


@pytest.mark.parametrize("q", [2, 3])
def test_witness_exhaustive(q):
    G, P = ctx(q).group, ctx(q).plane
    for a in range(P.n):
        for l in range(P.n):
            w = G.witness_fixing_only(a, l)
            assert w.fixed_points() == [a] and w.fixed_lines() == [l]


def test_workers_do_not_change_group():
    P = plane_new(field_new(3))
    a, b = Group(P, workers=1), Group(P, workers=4)
    assert (a.mats == b.mats).all() and (a.point_perm == b.point_perm).all()
