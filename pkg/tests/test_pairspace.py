import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import ctx
from pgl3ekr import exactla as ex
from pgl3ekr import pairspace as ps
from pgl3ekr.errors import GeometryViolation, TooSmallField
from pgl3ekr.geometry import QuadClass, classify_quadruple


def test_uv_examples():
    assert ps.uv_constants(2) == (0, 2)
    assert ps.uv_constants(3) == (8, 16)
    assert ps.uv_constants(4) == (40, 60)
    for q in range(2, 17):
        u, v = ps.uv_constants(q)
        assert 3 * u == (q - 2) * q * (q * q - 1) and 3 * v == (q - 1) * q * (q * q - 1)


def test_closed_entry_examples():
    assert ps.closed_N_entry(QuadClass.IDENTICAL, 2) == 8
    assert ps.closed_N_entry(QuadClass.GENERAL_POSITION, 3) == 8
    for q in (2, 3, 4):
        assert ps.closed_N_entry(QuadClass.ALL_COLLINEAR, q) == 0


@pytest.mark.parametrize("q", [2, 3])
def test_N_full_closed_form(q):
    c = ctx(q)
    assert (c.N.entries == ps.closed_N_matrix(c.plane)).all()


def test_N_entry_examples(ctx2):
    N, P = ctx2.N, ctx2.plane
    # identical pairs: |D| / (q^2 + q)
    assert N.entry(0, 1, 0, 1) == 8 == 48 // 6
    assert (N.entries[np.arange(P.n) * (P.n + 1)] == 0).all()
    assert int(N.entries.sum()) == 48 * 49


def test_N_symmetries(ctx3):
    E, n = ctx3.N.entries, ctx3.plane.n
    assert (E == E.T).all()
    assert (E == E.reshape(n, n, n, n).transpose(1, 0, 3, 2).reshape(n * n, n * n)).all()


@settings(max_examples=300, deadline=None)
@given(st.lists(st.integers(0, 20), min_size=4, max_size=4))
def test_N_sampled_q4(quad):
    c = ctx(4)
    a, b, cc, d = quad
    expect = ps.closed_N_entry(classify_quadruple(c.plane, a, b, cc, d), 4)
    assert c.N.entry(a, b, cc, d) == expect


def test_N_dump_roundtrip(ctx2, tmp_path):
    path = tmp_path / "n.bin"
    ps.dump_N(ctx2.N, path)
    raw = path.read_bytes()
    assert raw[:4] == b"NMAT" and len(raw) == 16 + 49 * 49 * 8
    back = ps.load_N(path)
    assert back.q == 2 and back.n == 7 and (back.entries == ctx2.N.entries).all()


@pytest.mark.parametrize("q", [2, 3])
def test_gram_closed_form(q):
    c = ctx(q)
    assert (c.gram == ps.closed_gram_A(q)).all()


def test_gram_examples(ctx2):
    A, P = ctx2.gram, ctx2.plane
    n = P.n
    idx = lambda a, b: a * n + b
    assert A[idx(0, 1), idx(0, 1)] == 24
    assert A[idx(0, 1), idx(2, 3)] == 4
    assert A[idx(0, 1), idx(0, 3)] == 0
    assert ex.rank_exact(A) == 37


def test_gram_spectrum_q2(ctx2):
    A = ctx2.gram
    spec = ps.gram_eigenvalues(2)
    assert spec == {168: 1, 28: 36, 0: 12}
    for lam, mult in spec.items():
        assert 49 - ex.rank_exact(A - lam * np.eye(49, dtype=np.int64)) == mult


def test_apply_B(ctx3):
    G, Pr, q = ctx3.group, ctx3.pairs, 3
    nd = ps.nonderangement_ids(G)
    assert (ps.apply_B(Pr.e_diag(4), G) == ps.chi_point_stabilizer(G, 4, nd)).all()
    assert (ps.apply_B(Pr.e_line(2), G) == q * ps.chi_line_stabilizer(G, 2, nd) + 1).all()
    diff = ps.apply_B(Pr.e_line(5) - Pr.e_line(2), G)
    assert (diff == q * (ps.chi_line_stabilizer(G, 5, nd) - ps.chi_line_stabilizer(G, 2, nd))).all()


def test_special_vectors(ctx2, ctx3):
    Pr, P = ctx3.pairs, ctx3.plane
    e1 = Pr.e1_point(3).reshape(P.n, P.n)
    assert e1.sum() == P.n and e1[3].sum() == P.n
    assert Pr.e_line(0).sum() == 16
    assert (Pr.special_vector("e_diag", 2) == Pr.e(2, 2)).all()
    l = int(P.lines_through_point[0][0])
    off = next(a for a in range(P.n) if not P.incidence[a, l])
    with pytest.raises(GeometryViolation):
        Pr.e_point_line(off, l)
    pts = [int(x) for x in P.points_on_line[0]]
    with pytest.raises(GeometryViolation):
        Pr.e_triple_1(*pts[:3])
    with pytest.raises(GeometryViolation):
        ctx2.pairs.e_quad(*[int(x) for x in ctx2.plane.points_on_line[0]], 0)


@pytest.mark.parametrize("q", [2, 3])
def test_v0(q):
    c = ctx(q)
    V = c.pairs.v0_basis(0, 0)
    assert len(V) == 4 * (q * q + q) + 1
    assert ex.rank_exact(np.array(V)) == len(V)
    assert (c.N @ np.array(V).T == 0).all()


def test_f_family():
    with pytest.raises(TooSmallField):
        ctx(2).pairs.f_family(0)
    for q, size in ((3, 5), (4, 11)):
        fam = ctx(q).pairs.f_family(3)
        assert len(fam) == size
        assert ex.rank_exact(np.array(fam)) == size


def test_triples_q3_exhaustive(ctx3):
    Pr, N = ctx3.pairs, ctx3.N
    _, v = ps.uv_constants(3)
    T = ps.noncollinear_triples(ctx3.plane)
    assert len(T) == 13 * 12 * 9
    for t in T[::5]:
        for x in (Pr.e_triple_1(*map(int, t)), Pr.e_triple_2(*map(int, t))):
            assert (N @ x == 13 * v * x).all()


def test_quads_q3(ctx3):
    Pr, N = ctx3.pairs, ctx3.N
    _, v = ps.uv_constants(3)
    for quad in ps.collinear_quadruples(ctx3.plane):
        x = Pr.e_quad(*quad)
        assert (N @ x == 9 * v * x).all()


@pytest.mark.parametrize("q", [2, 3])
def test_point_line_forms(q):
    c = ctx(q)
    Pr = c.pairs
    for a, l in c.plane.flags():
        y = c.N @ Pr.e_point_line(a, l)
        assert (y == Pr.n_point_line_expansion(a, l, q)).all()
        assert (y == Pr.n_point_line_remark(a, l, q)).all()


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=169, max_size=169),
       st.lists(st.integers(-3, 3), min_size=169, max_size=169))
def test_N_bilinear_symmetric(x, y):
    N = ctx(3).N
    x, y = np.array(x), np.array(y)
    assert x @ (N @ y) == y @ (N @ x)
    # N = M^T M is positive semidefinite: x^T N x = |M x|^2
    Mx = ps.apply_A(x, ctx(3).group, ctx(3).group.derangement_ids)
    assert x @ (N @ x) == int((Mx * Mx).sum())


def test_point_and_line_stabilizer_sums_agree(ctx3):
    G = ctx3.group
    n = ctx3.plane.n
    lhs = sum(ps.chi_point_stabilizer(G, a) for a in range(n))
    rhs = sum(ps.chi_line_stabilizer(G, l) for l in range(n))
    assert (lhs == rhs).all()


def test_collinear_quadruples_count():
    P = ctx(3).plane
    assert len(ps.collinear_quadruples(P)) == 13 * len(list(itertools.permutations(range(4), 4)))
