import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mlab.errors import InfiniteQuotient, NotSubmodule
from mlab.linalg import (
    AbelianInvariants,
    SubmoduleModE,
    abelian_invariants_from_relations,
    constrained_kernel,
    kernel_mod,
    order_of_submodule_by_enumeration,
    preimage,
    quotient_invariants,
    quotient_invariants_via_snf,
    smith_normal_form,
)
from oracles import integer_det, smith_diagonal


def _matmul(A, B):
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


def _span(S: SubmoduleModE) -> set:
    """Brute-force span of the generators in a tiny ambient module."""
    out = set()
    gens = [tuple(int(x) for x in g) for g in S.gens]
    for coeffs in itertools.product(range(S.e), repeat=len(gens)):
        v = [0] * S.dim
        for c, g in zip(coeffs, gens):
            v = [(a + c * b) % S.e for a, b in zip(v, g)]
        out.add(tuple(v))
    return out or {tuple([0] * S.dim)}


def _ambient(e, dim):
    return itertools.product(range(e), repeat=dim)


# -- invariants -----------------------------------------------------------------


def test_invariants_validation():
    assert AbelianInvariants((2, 4)).order == 8
    with pytest.raises(ValueError):
        AbelianInvariants((2, 3))
    with pytest.raises(ValueError):
        AbelianInvariants((1, 2))
    assert AbelianInvariants.from_cyclic_orders([2, 3, 4]).factors == (2, 12)
    assert AbelianInvariants.from_cyclic_orders([1, 1]).is_trivial()
    assert AbelianInvariants((2, 12)).p_part(2).factors == (2, 4)
    assert AbelianInvariants((2, 12)).p_part(3).factors == (3,)
    assert str(AbelianInvariants((2, 12))) == "[2, 12]"


def test_relations():
    assert abelian_invariants_from_relations(2, [[2, 0], [0, 4]]).factors == (2, 4)
    assert abelian_invariants_from_relations(2, [[2, 0], [0, 3]]).factors == (6,)
    assert abelian_invariants_from_relations(1, [[1]]).is_trivial()
    assert abelian_invariants_from_relations(0, []).is_trivial()
    with pytest.raises(InfiniteQuotient):
        abelian_invariants_from_relations(2, [[1, 0]])
    with pytest.raises(InfiniteQuotient):
        abelian_invariants_from_relations(1, [])


# -- Smith normal form ------------------------------------------------------------


def test_snf_examples():
    r = smith_normal_form([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
    assert r.diag == (2, 6, 12)
    r = smith_normal_form([[0, 0], [0, 0]])
    assert r.diag == (0, 0)
    r = smith_normal_form([])
    assert r.diag == ()
    with pytest.raises(ValueError):
        smith_normal_form([[1, 2], [3]])


matrices = st.integers(1, 6).flatmap(
    lambda m: st.integers(1, 6).flatmap(
        lambda n: st.lists(st.lists(st.integers(-20, 20), min_size=n, max_size=n), min_size=m, max_size=m)
    )
)


@settings(max_examples=150, deadline=None)
@given(matrices)
def test_snf_properties(A):
    r = smith_normal_form(A)
    assert _matmul(_matmul(r.U, A), r.V) == r.D
    assert abs(integer_det(r.U)) == 1 and abs(integer_det(r.V)) == 1
    m, n = len(A), len(A[0])
    for i in range(m):
        for j in range(n):
            if i != j:
                assert r.D[i][j] == 0
    d = list(r.diag)
    assert all(x >= 0 for x in d)
    for a, b in zip(d, d[1:]):
        assert (b == 0) if a == 0 else (b % a == 0)
    assert d == smith_diagonal(A)
    assert r == smith_normal_form(A)  # deterministic


# -- submodules of (Z/e)^n ---------------------------------------------------------


def test_submodule_basics():
    S = SubmoduleModE(12, 2, [[2, 0], [0, 3]])
    assert S.order == 6 * 4
    assert S.contains([4, 9]) and not S.contains([1, 0])
    assert SubmoduleModE.full(12, 2).order == 144
    assert SubmoduleModE.zero(12, 2).order == 1
    assert SubmoduleModE(1, 3, [[1, 2, 3]]).order == 1
    assert SubmoduleModE(5, 0).order == 1
    T = S.compressed()
    assert T.same_as(S) and T.order == S.order
    assert S <= SubmoduleModE.full(12, 2)
    with pytest.raises(ValueError):
        SubmoduleModE(0, 2)
    with pytest.raises(ValueError):
        _ = S + SubmoduleModE(6, 2)


submodules = st.tuples(
    st.sampled_from([2, 3, 4, 6, 8, 9, 12]),
    st.integers(1, 3),
    st.integers(0, 3),
    st.randoms(use_true_random=False),
).map(lambda t: (t[0], t[1], [[t[3].randrange(t[0]) for _ in range(t[1])] for _ in range(t[2])]))


@settings(max_examples=80, deadline=None)
@given(submodules)
def test_order_and_membership_vs_brute_force(data):
    e, dim, gens = data
    S = SubmoduleModE(e, dim, gens)
    span = _span(S)
    assert S.order == len(span) == order_of_submodule_by_enumeration(S)
    for v in _ambient(e, dim):
        assert S.contains(v) == (v in span)
    assert _span(SubmoduleModE(e, dim, S.basis())) == span


@settings(max_examples=60, deadline=None)
@given(submodules, st.randoms(use_true_random=False))
def test_kernel_and_preimage_vs_brute_force(data, rnd):
    e, dim, gens = data
    rows = rnd.randrange(1, 3)
    M = np.array([[rnd.randrange(e) for _ in range(dim)] for _ in range(rows)], dtype=np.int64)
    K = kernel_mod(M, e)
    kernel = {v for v in _ambient(e, dim) if not ((M @ np.array(v)) % e).any()}
    assert _span(K) == kernel
    V = SubmoduleModE(e, dim, gens)
    W = SubmoduleModE(e, rows, [[rnd.randrange(e) for _ in range(rows)]])
    P = preimage(V, M, W)
    wspan = _span(W)
    expect = {v for v in _span(V) if tuple(int(x) for x in (M @ np.array(v)) % e) in wspan}
    assert _span(P) == expect


def test_constrained_kernel_small():
    # x with 2x in the span of 4 over Z/8: x even
    K = constrained_kernel([[2]], [[4]], 8)
    assert _span(K) == {(0,), (2,), (4,), (6,)}
    with pytest.raises(ValueError):
        constrained_kernel([[1], [1]], [[1]], 8)


@settings(max_examples=80, deadline=None)
@given(submodules, st.randoms(use_true_random=False))
def test_quotient_two_routes_agree(data, rnd):
    e, dim, gens = data
    V = SubmoduleModE(e, dim, gens)
    # W: random multiples of V's generators
    Wg = []
    for g in gens:
        c = rnd.randrange(e)
        Wg.append([(c * x) % e for x in g])
    W = SubmoduleModE(e, dim, Wg)
    q1 = quotient_invariants(V, W)
    q2 = quotient_invariants_via_snf(V, W)
    assert q1 == q2
    assert q1.order * W.order == V.order


def test_quotient_requires_submodule():
    V = SubmoduleModE(4, 1, [[2]])
    W = SubmoduleModE(4, 1, [[1]])
    with pytest.raises(NotSubmodule):
        quotient_invariants(V, W)
    assert quotient_invariants(W, V).factors == (2,)
    assert quotient_invariants(SubmoduleModE.full(6, 2), SubmoduleModE.zero(6, 2)).factors == (6, 6)
