import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mlab.errors import ClosureExceedsCap, InvalidPermutation, InvalidTable, NotNormal, NotPrime
from mlab.groups import (
    all_subgroups,
    abelian_subgroups,
    abelianization_order,
    bicyclic_subgroups,
    build_group_from_perms,
    centralizer,
    commutator_subgroup,
    conjugate,
    double_coset,
    double_coset_reps,
    generating_set,
    group_from_table,
    intersection,
    is_normal,
    iterated_commutator,
    join,
    lower_central_series,
    maximal_by_inclusion,
    nilpotency_class,
    normal_subgroups,
    normalizer,
    permutation_from_cycles,
    require_normal,
    right_transversal,
    subgroup_generated,
    sylow_subgroup,
)


def test_permutation_from_cycles():
    assert permutation_from_cycles([(1, 2, 3)]) == (1, 2, 0)
    assert permutation_from_cycles([(1, 2)], 4) == (1, 0, 2, 3)
    assert permutation_from_cycles([(1,)]) == (0,)
    with pytest.raises(InvalidPermutation):
        permutation_from_cycles([(1, 1, 2)])
    with pytest.raises(InvalidPermutation):
        permutation_from_cycles([(1, 2), (2, 3)])


def test_closure_orders(S3, S4, D4, catalog):
    assert (S3.order, S4.order, D4.order) == (6, 24, 8)
    assert catalog["Q8"].order == 8
    assert catalog["Heis27"].order == 27
    assert all(catalog[f"C{n}"].order == n for n in range(1, 13))


def test_identity_and_inverses(S4):
    mul, n = S4.mul, S4.order
    assert S4.identity == 0
    assert (mul[0] == np.arange(n)).all() and (mul[:, 0] == np.arange(n)).all()
    assert (mul[np.arange(n), S4.inv] == 0).all()


def test_closure_cap():
    gens = [permutation_from_cycles([(1, 2)], 6), permutation_from_cycles([(1, 2, 3, 4, 5, 6)])]
    with pytest.raises(ClosureExceedsCap):
        build_group_from_perms(gens, cap=100)


def test_group_from_table_validation(S3):
    G = group_from_table(S3.mul.tolist(), "S3")
    assert G.order == 6 and (G.mul == S3.mul).all()
    with pytest.raises(InvalidTable):
        group_from_table([[0, 1], [1, 1]])
    # a Latin square with identity that is not associative (order 5 loop)
    loop = [
        [0, 1, 2, 3, 4],
        [1, 0, 3, 4, 2],
        [2, 4, 0, 1, 3],
        [3, 2, 4, 0, 1],
        [4, 3, 1, 2, 0],
    ]
    with pytest.raises(InvalidTable):
        group_from_table(loop)


def test_encoding_matches_between_perm_and_table(S4):
    T = group_from_table(S4.mul.tolist(), "copy")
    assert T.encoding == S4.encoding


def test_sylow_orders_and_determinism(S4, catalog):
    P = sylow_subgroup(S4, 2)
    assert P.order == 8
    assert sylow_subgroup(S4, 2) == P
    assert sylow_subgroup(S4, 3).order == 3
    assert sylow_subgroup(S4, 5).is_trivial()
    with pytest.raises(NotPrime):
        sylow_subgroup(S4, 4)
    for G in catalog.values():
        for p in (2, 3, 5, 7, 11):
            Q = sylow_subgroup(G, p)
            k = G.order
            pp = 1
            while k % p == 0:
                k //= p
                pp *= p
            assert Q.order == pp


def test_normalizers(S4, S3):
    assert normalizer(S4, sylow_subgroup(S4, 2)).order == 8
    assert normalizer(S4, sylow_subgroup(S4, 3)).order == 6
    assert normalizer(S3, sylow_subgroup(S3, 3)).order == 6
    assert normalizer(S3, sylow_subgroup(S3, 2)).order == 2


def test_nilpotency_class(S4, D4, catalog):
    assert nilpotency_class(D4.whole()) == 2
    assert nilpotency_class(catalog["Q8"].whole()) == 2
    assert nilpotency_class(catalog["D8"].whole()) == 3
    assert nilpotency_class(catalog["C12"].whole()) == 1
    assert nilpotency_class(catalog["C1"].whole()) == 0
    assert nilpotency_class(S4.whole()) is None
    assert nilpotency_class(catalog["Heis27"].whole()) == 2


def test_commutators(S4, D4):
    assert commutator_subgroup(S4, S4.whole(), S4.whole()).order == 12
    assert commutator_subgroup(D4, D4.whole(), D4.whole()).order == 2
    series = lower_central_series(S4.whole())
    assert [H.order for H in series] == [24, 12]
    A = D4.whole()
    assert iterated_commutator(D4, A, A, 0) == A
    assert iterated_commutator(D4, A, A, 2).is_trivial()
    assert abelianization_order(S4.whole()) == 2


def test_subgroup_counts(S4, D4, S3, catalog):
    assert len(all_subgroups(S4)) == 30
    assert len(all_subgroups(D4)) == 10
    assert len(normal_subgroups(S4)) == 4
    assert len(normal_subgroups(catalog["Q8"])) == 6
    assert len(all_subgroups(catalog["C2^4"])) == 67
    assert len(abelian_subgroups(S3)) == 5


def test_bicyclic_and_maximal(S4):
    bic = bicyclic_subgroups(S4)
    assert all(H.order in (1, 2, 3, 4) for H in bic)
    maxi = maximal_by_inclusion(bic)
    # V4 (normal), three C4 and three non-normal Klein groups, four C3
    assert sorted(H.order for H in maxi) == [3, 3, 3, 3, 4, 4, 4, 4, 4, 4, 4]


def test_conjugate_is_right_action(S4):
    H = sylow_subgroup(S4, 2)
    for g, h in itertools.product(range(0, 24, 5), range(1, 24, 7)):
        gh = int(S4.mul[g, h])
        assert conjugate(S4, conjugate(S4, H, g), h) == conjugate(S4, H, gh)


def test_transversal_and_double_cosets(S4):
    H = sylow_subgroup(S4, 2)
    T = right_transversal(S4, H)
    assert len(T) == 3 and T == sorted(T) and T[0] == 0
    cosets = [set(S4.mul[H.array, t].tolist()) for t in T]
    assert set().union(*cosets) == set(range(24))
    K = sylow_subgroup(S4, 3)
    reps = double_coset_reps(S4, H, K)
    sizes = [len(double_coset(S4, H, g, K)) for g in reps]
    assert sum(sizes) == 24


def test_normality(S4):
    V = [N for N in normal_subgroups(S4) if N.order == 4][0]
    assert is_normal(S4, V)
    P = sylow_subgroup(S4, 2)
    assert not is_normal(S4, P)
    with pytest.raises(NotNormal):
        require_normal(S4, P)


def test_generating_set(catalog):
    for name in ("S4", "Q8", "C2^4", "Heis27"):
        G = catalog[name]
        gens = generating_set(G.whole())
        assert subgroup_generated(G, gens).is_whole()
    assert len(generating_set(catalog["C2^4"].whole())) == 4


def test_join_intersection_centralizer(S4):
    P = sylow_subgroup(S4, 2)
    Q = conjugate(S4, P, 3)
    I = intersection(P, Q)
    J = join(S4, P, Q)
    assert I.issubset(P) and I.issubset(Q)
    assert P.issubset(J) and Q.issubset(J)
    assert centralizer(S4, range(24)).is_trivial()


def _random_perm(draw, n):
    return tuple(draw(st.permutations(list(range(n)))))


@st.composite
def perm_groups(draw):
    n = draw(st.integers(1, 5))
    k = draw(st.integers(1, 3))
    return build_group_from_perms([_random_perm(draw, n) for _ in range(k)])


@settings(max_examples=40, deadline=None)
@given(perm_groups())
def test_group_axioms_random(G):
    mul = G.mul
    n = G.order
    idx = np.arange(n)
    # associativity, identity and inverses on the table
    left = mul[mul[:, :, None], idx[None, None, :]]
    right = mul[idx[:, None, None], mul[None, :, :]]
    assert (left == right).all()
    assert (mul[idx, G.inv] == G.identity).all()
    # Lagrange and Sylow orders
    for p in (2, 3, 5):
        P = sylow_subgroup(G, p)
        assert n % P.order == 0 and (n // P.order) % p != 0
