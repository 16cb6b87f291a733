"""Finite groups as full multiplication tables, and their subgroup structure.

Every group is a :class:`GroupTable`: elements are the indices ``0..n-1`` and
``mul[x, y]`` is the index of the product ``xy``.  Permutation generators are
composed left to right (``xy`` means "apply x, then y"), so products act on
points from the right.  Subgroups are sorted index tuples into a parent table.

All algorithms are exhaustive scans; they are meant for groups of order at
most a few hundred.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from sympy import factorint, isprime

from .errors import (
    ClosureExceedsCap,
    InvalidPermutation,
    InvalidTable,
    NotNormal,
    NotPrime,
)

DEFAULT_CAP = 256
ASSOCIATIVITY_CHECK_LIMIT = 256


@dataclass(frozen=True, eq=False)
class GroupTable:
    order: int
    mul: np.ndarray
    identity: int
    inv: np.ndarray
    name: str = ""

    def __repr__(self):
        return f"GroupTable({self.name or '?'}, order={self.order})"

    @cached_property
    def element_orders(self) -> np.ndarray:
        n = self.order
        orders = np.zeros(n, dtype=np.int64)
        power = np.arange(n)
        for k in range(1, n + 1):
            hit = (power == self.identity) & (orders == 0)
            orders[hit] = k
            if orders.all():
                break
            power = self.mul[power, np.arange(n)]
        return orders

    @cached_property
    def encoding(self) -> bytes:
        from .catalog import canonical_encoding

        return canonical_encoding(self)

    def whole(self) -> "Subgroup":
        return Subgroup(self, tuple(range(self.order)))

    def trivial(self) -> "Subgroup":
        return Subgroup(self, (self.identity,))

    def is_abelian(self) -> bool:
        return bool((self.mul == self.mul.T).all())


def group_from_table(rows, name: str = "", check: bool = True) -> GroupTable:
    """Validate a Cayley table and wrap it as a :class:`GroupTable`."""
    mul = np.array(rows, dtype=np.int64)
    if mul.ndim != 2 or mul.shape[0] != mul.shape[1] or mul.shape[0] == 0:
        raise InvalidTable("table must be a non-empty square array")
    n = mul.shape[0]
    if mul.min() < 0 or mul.max() >= n:
        raise InvalidTable("table entries out of range")
    perm = np.arange(n)
    if not (np.sort(mul, axis=1) == perm).all() or not (np.sort(mul, axis=0) == perm[:, None]).all():
        raise InvalidTable("table is not a Latin square")
    ids = [e for e in range(n) if (mul[e] == perm).all() and (mul[:, e] == perm).all()]
    if not ids:
        raise InvalidTable("table has no identity element")
    identity = ids[0]
    if check and n <= ASSOCIATIVITY_CHECK_LIMIT:
        for a in range(n):
            # (ab)c == a(bc) for all b, c
            if not (mul[mul[a]] == mul[a][mul]).all():
                raise InvalidTable(f"table is not associative (first failure at element {a})")
    inv = np.argmax(mul == identity, axis=1)
    mul.setflags(write=False)
    inv.setflags(write=False)
    return GroupTable(order=n, mul=mul, identity=int(identity), inv=inv, name=name)


def _check_perm(p: Sequence[int], degree: int):
    if len(p) != degree or sorted(p) != list(range(degree)):
        raise InvalidPermutation(f"not a permutation of 0..{degree - 1}: {list(p)}")


def permutation_from_cycles(cycles: Iterable[Sequence[int]], degree: int | None = None) -> tuple[int, ...]:
    """Image tuple (0-based) of a product of disjoint cycles on points >= 1."""
    cycles = [list(c) for c in cycles]
    seen = set()
    for c in cycles:
        for x in c:
            if not isinstance(x, (int, np.integer)) or x < 1:
                raise InvalidPermutation(f"cycle point {x!r} is not a positive integer")
            if x in seen:
                raise InvalidPermutation(f"point {x} repeated in cycles {cycles}")
            seen.add(x)
    top = max(seen, default=0)
    if degree is None:
        degree = top
    elif top > degree:
        raise InvalidPermutation(f"point {top} exceeds degree {degree}")
    image = list(range(degree))
    for c in cycles:
        for a, b in zip(c, c[1:] + c[:1]):
            image[a - 1] = b - 1
    return tuple(image)


def build_group_from_perms(generators, name: str = "", cap: int = DEFAULT_CAP) -> GroupTable:
    """Close permutation generators into a multiplication table.

    Generators are image tuples (0-based) of a common degree.  Element 0 is the
    identity; the remaining elements appear in breadth-first order of words in
    the generators.
    """
    generators = [tuple(int(x) for x in g) for g in generators]
    degree = max((len(g) for g in generators), default=1)
    for g in generators:
        _check_perm(g, len(g))
    # pad to a common degree
    generators = [g + tuple(range(len(g), degree)) for g in generators]
    ident = tuple(range(degree))
    elements = [ident]
    index = {ident: 0}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in generators:
                y = tuple(g[i] for i in x)  # apply x, then g
                if y not in index:
                    if len(elements) >= cap:
                        raise ClosureExceedsCap(f"group {name!r} has more than {cap} elements")
                    index[y] = len(elements)
                    elements.append(y)
                    nxt.append(y)
        frontier = nxt
    arr = np.array(elements, dtype=np.int64)
    n = len(elements)
    mul = np.empty((n, n), dtype=np.int64)
    for i, x in enumerate(elements):
        mul[i] = [index[tuple(r)] for r in arr[:, list(x)]]
    table = group_from_table(mul, name=name, check=False)
    table.__dict__["permutations"] = elements
    return table


@dataclass(frozen=True, eq=False)
class Subgroup:
    parent: GroupTable
    elements: tuple[int, ...]

    def __post_init__(self):
        if self.parent.order % len(self.elements):
            raise AssertionError("subgroup order does not divide group order")

    def __eq__(self, other):
        return (
            isinstance(other, Subgroup)
            and other.parent is self.parent
            and other.elements == self.elements
        )

    def __hash__(self):
        return hash((id(self.parent), self.elements))

    def __repr__(self):
        return f"Subgroup(order={self.order} of {self.parent.name or '?'})"

    def __len__(self):
        return len(self.elements)

    def __contains__(self, x):
        return bool(self.mask[x])

    @property
    def order(self) -> int:
        return len(self.elements)

    @cached_property
    def array(self) -> np.ndarray:
        return np.array(self.elements, dtype=np.int64)

    @cached_property
    def mask(self) -> np.ndarray:
        m = np.zeros(self.parent.order, dtype=bool)
        m[list(self.elements)] = True
        return m

    @cached_property
    def local_index(self) -> np.ndarray:
        """Parent index -> position in ``elements`` (or -1)."""
        pos = np.full(self.parent.order, -1, dtype=np.int64)
        pos[self.array] = np.arange(self.order)
        return pos

    @cached_property
    def table(self) -> GroupTable:
        """The subgroup as a standalone table, element i = ``elements[i]``."""
        G = self.parent
        mul = self.local_index[G.mul[np.ix_(self.array, self.array)]]
        name = f"{G.name}<{self.order}>" if G.name else ""
        return group_from_table(mul, name=name, check=False)

    def issubset(self, other: "Subgroup") -> bool:
        return bool(other.mask[self.array].all())

    def is_trivial(self) -> bool:
        return self.order == 1

    def is_whole(self) -> bool:
        return self.order == self.parent.order


def as_subgroup(X) -> Subgroup:
    return X.whole() if isinstance(X, GroupTable) else X


def _subgroup_from_mask(G: GroupTable, mask: np.ndarray) -> Subgroup:
    return Subgroup(G, tuple(int(i) for i in np.flatnonzero(mask)))


def _closure_mask(G: GroupTable, gens, base: np.ndarray | None = None) -> np.ndarray:
    gens = np.unique(np.asarray(list(gens), dtype=np.int64))
    mask = np.zeros(G.order, dtype=bool)
    mask[G.identity] = True
    if base is not None:
        mask |= base
        gens = np.union1d(gens, np.flatnonzero(base))
    if gens.size == 0:
        return mask
    frontier = np.flatnonzero(mask)
    while frontier.size:
        prods = G.mul[np.ix_(frontier, gens)].ravel()
        new = np.unique(prods[~mask[prods]])
        mask[new] = True
        frontier = new
    return mask


def subgroup_generated(G: GroupTable, gens: Iterable[int]) -> Subgroup:
    gens = list(gens)
    for g in gens:
        if not 0 <= g < G.order:
            raise IndexError(f"element index {g} out of range for order {G.order}")
    return _subgroup_from_mask(G, _closure_mask(G, gens))


def join(G: GroupTable, *subgroups: Subgroup) -> Subgroup:
    gens = [x for H in subgroups for x in H.elements]
    return subgroup_generated(G, gens)


def intersection(A: Subgroup, B: Subgroup) -> Subgroup:
    return _subgroup_from_mask(A.parent, A.mask & B.mask)


def conjugate(G: GroupTable, H: Subgroup, g: int) -> Subgroup:
    """``H^g = g^-1 H g``."""
    conj = G.mul[G.mul[G.inv[g], H.array], g]
    return Subgroup(G, tuple(int(x) for x in np.sort(conj)))


def is_normal(G: GroupTable, H: Subgroup) -> bool:
    for g in range(G.order):
        conj = G.mul[G.mul[G.inv[g], H.array], g]
        if not H.mask[conj].all():
            return False
    return True


def is_abelian(H) -> bool:
    H = as_subgroup(H)
    a = H.array
    block = H.parent.mul[np.ix_(a, a)]
    return bool((block == block.T).all())


def centralizer(G: GroupTable, S: Iterable[int]) -> Subgroup:
    S = np.asarray(list(S), dtype=np.int64)
    if S.size == 0:
        return G.whole()
    mask = (G.mul[:, S] == G.mul[S, :].T).all(axis=1)
    return _subgroup_from_mask(G, mask)


def normalizer(G: GroupTable, H: Subgroup) -> Subgroup:
    mask = np.zeros(G.order, dtype=bool)
    for g in range(G.order):
        conj = G.mul[G.mul[G.inv[g], H.array], g]
        mask[g] = H.mask[conj].all()
    return _subgroup_from_mask(G, mask)


def p_part_of(n: int, p: int) -> int:
    q = 1
    while n % p == 0:
        n //= p
        q *= p
    return q


def is_prime_power_of(n: int, p: int) -> bool:
    return p_part_of(n, p) == n


def prime_divisors(n: int) -> list[int]:
    return sorted(factorint(n)) if n > 1 else []


def sylow_subgroup(G: GroupTable, p: int) -> Subgroup:
    """A Sylow p-subgroup, grown deterministically inside successive normalizers."""
    if not isprime(p):
        raise NotPrime(f"{p} is not prime")
    target = p_part_of(G.order, p)
    if target == 1:
        return G.trivial()
    orders = G.element_orders
    p_elements = np.array([is_prime_power_of(int(o), p) for o in orders])
    candidates = np.flatnonzero(p_elements & (orders > 1))
    best = candidates[np.argmax(orders[candidates])]  # argmax picks the smallest index on ties
    H = subgroup_generated(G, [int(best)])
    while H.order < target:
        N = normalizer(G, H)
        pick = next(int(y) for y in N.elements if p_elements[y] and not H.mask[y])
        H = _subgroup_from_mask(G, _closure_mask(G, [pick], base=H.mask))
    return H


def commutator(G: GroupTable, x, y):
    """``[x, y] = x^-1 y^-1 x y`` (vectorised over arrays)."""
    return G.mul[G.mul[G.inv[x], G.inv[y]], G.mul[x, y]]


def commutator_subgroup(G: GroupTable, A: Subgroup, B: Subgroup) -> Subgroup:
    a, b = np.meshgrid(A.array, B.array, indexing="ij")
    comms = np.unique(commutator(G, a.ravel(), b.ravel()))
    return subgroup_generated(G, comms)


def iterated_commutator(G: GroupTable, A: Subgroup, B: Subgroup, n: int) -> Subgroup:
    """Left-normed ``[A, B, ..., B]`` with ``n`` copies of ``B``; n = 0 gives A."""
    if n < 0:
        raise ValueError("n must be non-negative")
    C = A
    for _ in range(n):
        C = commutator_subgroup(G, C, B)
    return C


def lower_central_series(H) -> list[Subgroup]:
    """gamma_1 = H, gamma_{i+1} = [gamma_i, H], up to the first repetition."""
    H = as_subgroup(H)
    series = [H]
    while True:
        nxt = commutator_subgroup(H.parent, series[-1], H)
        if nxt == series[-1]:
            return series
        series.append(nxt)


def nilpotency_class(H) -> int | None:
    """Nilpotency class, or ``None`` when the lower central series stalls above 1."""
    series = lower_central_series(H)
    if not series[-1].is_trivial():
        return None
    return len(series) - 1


def commuting_pairs(G: GroupTable) -> list[tuple[int, int]]:
    xs, ys = np.nonzero(G.mul == G.mul.T)
    return [(int(x), int(y)) for x, y in zip(xs, ys)]


def cyclic_powers(G: GroupTable, x: int) -> np.ndarray:
    out = [G.identity]
    y = x
    while y != G.identity:
        out.append(int(y))
        y = G.mul[y, x]
    return np.array(out, dtype=np.int64)


def bicyclic_subgroups(G: GroupTable) -> list[Subgroup]:
    """Distinct subgroups <x, y> over commuting pairs, in pair-scan order."""
    seen = {}
    powers = [cyclic_powers(G, x) for x in range(G.order)]
    for x, y in commuting_pairs(G):
        if y < x:
            continue
        elems = np.unique(G.mul[np.ix_(powers[x], powers[y])])
        key = elems.tobytes()
        if key not in seen:
            seen[key] = Subgroup(G, tuple(int(e) for e in elems))
    return list(seen.values())


def maximal_by_inclusion(subgroups: Sequence[Subgroup]) -> list[Subgroup]:
    out = []
    ordered = sorted(subgroups, key=lambda H: -H.order)
    for H in ordered:
        if not any(H.issubset(K) for K in out):
            out.append(H)
    return sorted(out, key=lambda H: subgroups.index(H))


def right_transversal(G, H) -> list[int]:
    """Smallest element of each right coset Hg (g in G), in increasing order.

    G may be a table or a subgroup containing H.
    """
    G, H = as_subgroup(G), as_subgroup(H)
    mul = G.parent.mul
    covered = np.zeros(G.parent.order, dtype=bool)
    reps = []
    for g in G.elements:
        if not covered[g]:
            reps.append(g)
            covered[mul[H.array, g]] = True
    return reps


def double_coset_reps(G, H, K) -> list[int]:
    """Smallest element of each double coset HgK (g in G), in increasing order."""
    G, H, K = as_subgroup(G), as_subgroup(H), as_subgroup(K)
    mul = G.parent.mul
    covered = np.zeros(G.parent.order, dtype=bool)
    reps = []
    for g in G.elements:
        if not covered[g]:
            reps.append(g)
            covered[mul[mul[H.array, g][:, None], K.array[None, :]].ravel()] = True
    return reps


def double_coset(G: GroupTable, H: Subgroup, g: int, K: Subgroup) -> np.ndarray:
    return np.unique(G.mul[G.mul[H.array, g][:, None], K.array[None, :]])


@dataclass(frozen=True, eq=False)
class Homomorphism:
    source: GroupTable
    target: GroupTable
    image: tuple[int, ...]

    def __post_init__(self):
        img = np.asarray(self.image)
        s, t = self.source, self.target
        if img[s.identity] != t.identity:
            raise ValueError("homomorphism does not preserve the identity")
        if not (img[s.mul] == t.mul[np.ix_(img, img)]).all():
            raise ValueError("map is not a homomorphism")

    def __call__(self, x: int) -> int:
        return self.image[x]

    def is_bijective(self) -> bool:
        return len(set(self.image)) == self.target.order == self.source.order


def conjugation_homomorphism(G: GroupTable, Q: Subgroup, g: int) -> Homomorphism:
    """``x -> g^-1 x g`` from Q onto Q^g, on the subgroups' own tables."""
    Qg = conjugate(G, Q, g)
    images = G.mul[G.mul[G.inv[g], Q.array], g]
    return Homomorphism(Q.table, Qg.table, tuple(int(i) for i in Qg.local_index[images]))


def normal_closure(G: GroupTable, S: Iterable[int]) -> Subgroup:
    S = np.asarray(list(S), dtype=np.int64)
    if S.size == 0:
        return G.trivial()
    conj = G.mul[G.mul[G.inv[:, None], S[None, :]], np.arange(G.order)[:, None]]
    return subgroup_generated(G, np.unique(conj))


def normal_subgroups(G: GroupTable) -> list[Subgroup]:
    """All normal subgroups, sorted by (order, elements)."""
    found = {}
    for x in range(G.order):
        N = normal_closure(G, [x])
        found.setdefault(N.elements, N)
    frontier = list(found.values())
    atoms = list(found.values())
    while frontier:
        nxt = []
        for N in frontier:
            for M in atoms:
                if M.issubset(N):
                    continue
                prod = np.unique(G.mul[np.ix_(N.array, M.array)])
                key = tuple(int(i) for i in prod)
                if key not in found:
                    found[key] = Subgroup(G, key)
                    nxt.append(found[key])
        frontier = nxt
    return sorted(found.values(), key=lambda N: (N.order, N.elements))


def all_subgroups(G: GroupTable) -> list[Subgroup]:
    """Every subgroup, sorted by (order, elements). Exponential in general."""
    cyclic = {}
    for x in range(G.order):
        C = subgroup_generated(G, [x])
        cyclic.setdefault(C.elements, C)
    found = dict(cyclic)
    frontier = list(cyclic.values())
    # every subgroup is a join of cyclic subgroups; one generator per cyclic subgroup
    orders = G.element_orders
    cyclic_gens = sorted({min(x for x in C.elements if orders[x] == C.order) for C in cyclic.values()})
    while frontier:
        nxt = []
        for H in frontier:
            for x in cyclic_gens:
                if H.mask[x]:
                    continue
                K = _subgroup_from_mask(G, _closure_mask(G, [x], base=H.mask))
                if K.elements not in found:
                    found[K.elements] = K
                    nxt.append(K)
        frontier = nxt
    return sorted(found.values(), key=lambda H: (H.order, H.elements))


def abelian_subgroups(G: GroupTable) -> list[Subgroup]:
    """Every abelian subgroup, sorted by (order, elements)."""
    start = G.trivial()
    found = {start.elements: start}
    frontier = [start]
    while frontier:
        nxt = []
        for A in frontier:
            C = centralizer(G, A.elements)
            for x in C.elements:
                if A.mask[x]:
                    continue
                B = _subgroup_from_mask(G, _closure_mask(G, [x], base=A.mask))
                if B.elements not in found:
                    found[B.elements] = B
                    nxt.append(B)
        frontier = nxt
    return sorted(found.values(), key=lambda H: (H.order, H.elements))


def derived_subgroup(H) -> Subgroup:
    H = as_subgroup(H)
    return commutator_subgroup(H.parent, H, H)


def abelianization_order(H) -> int:
    H = as_subgroup(H)
    return H.order // derived_subgroup(H).order


def generating_set(H) -> tuple[int, ...]:
    """A small generating set: greedily add an element of largest order
    (smallest index on ties) outside the subgroup generated so far."""
    H = as_subgroup(H)
    G = H.parent
    orders = G.element_orders
    mask = np.zeros(G.order, dtype=bool)
    mask[G.identity] = True
    gens = []
    while mask.sum() < H.order:
        outside = [x for x in H.elements if not mask[x]]
        x = max(outside, key=lambda y: (orders[y], -y))
        gens.append(int(x))
        mask = _closure_mask(G, [x], base=mask)
    return tuple(gens)


def require_normal(G: GroupTable, Q: Subgroup):
    if not is_normal(G, Q):
        raise NotNormal(f"subgroup of order {Q.order} is not normal in {G.name or 'G'}")
