"""Second cohomology of finite groups with trivial coefficients.

``H^2(G, Q/Z)`` is computed as ``Z^2(G, Z/e) / (B^2 + Bock)`` where e is a
multiple of ``|G|`` and ``Bock`` is the image of the connecting map
``Hom(G, Z/e) -> H^2(G, Z/e)`` coming from ``Z/e -> Q/Z -> Q/Z``.  For a
homomorphism chi with integer lift in ``[0, e)`` the connecting cocycle is the
carry ``(chi(g) + chi(h) - chi(gh)) / e``.

Cochains are normalized: a cochain is a vector indexed by pairs ``(g, h)`` of
non-identity elements ("full" coordinates, dimension ``(n-1)^2``).

A normalized cocycle is determined by its values ``c(x, s)`` for ``s`` in a
generating set S, by walking a spanning tree of the right Cayley graph with
``c(g, hs) = c(g, h) + c(gh, s) - c(h, s)``.  These ``(n-1)|S|`` values are the
"compact" coordinates; every submodule computation (kernels, membership,
quotients) happens there, and ``expand`` maps compact vectors of cocycles back
to full cochains.  A normalized cochain is a cocycle as soon as the cocycle
identity holds for all triples ``(g, h, s)`` with ``s`` in S.
"""

from __future__ import annotations

import os
from collections import OrderedDict
from functools import cached_property, lru_cache

import numpy as np
from scipy import sparse

from .errors import CapExceeded, NotNormal, NotWellDefined
from .groups import (
    GroupTable,
    Subgroup,
    as_subgroup,
    conjugate,
    double_coset_reps,
    generating_set,
    intersection,
    right_transversal,
)
from .linalg import (
    AbelianInvariants,
    SubmoduleModE,
    as_rows,
    kernel_mod,
    preimage,
    prime_powers,
    quotient_invariants,
)

COHOMOLOGY_CAP = 64
MAP_CACHE_SIZE = 4096


def cohomology_cap() -> int:
    return int(os.environ.get("MLAB_MAX_ORDER", COHOMOLOGY_CAP))


class CocycleSpace:
    """Normalized 2-cochains of a group with coefficients in Z/e."""

    def __init__(self, group: GroupTable, e: int):
        n = group.order
        if n > cohomology_cap():
            raise CapExceeded(f"order {n} exceeds the cohomology cap {cohomology_cap()}")
        if e % n:
            raise ValueError(f"modulus {e} is not a multiple of the group order {n}")
        self.group = group
        self.e = int(e)
        mul = group.mul
        ident = group.identity
        nonid = np.array([x for x in range(n) if x != ident], dtype=np.int64)
        self.nonid = nonid
        pos = np.full(n, -1, dtype=np.int64)
        pos[nonid] = np.arange(n - 1)
        self.pos = pos
        m = n - 1
        self.dim = m * m
        coord = np.full((n, n), -1, dtype=np.int64)
        coord[np.ix_(nonid, nonid)] = pos[nonid][:, None] * m + pos[nonid][None, :]
        self.coord = coord

        S = generating_set(group.whole())
        self.generators = S
        ns = len(S)
        self.cdim = m * ns
        cvar = np.full((n, ns), -1, dtype=np.int64)
        cvar[nonid] = pos[nonid][:, None] * ns + np.arange(ns)[None, :]
        self.tree_cols = np.array(
            [coord[x, s] for x in nonid for s in S], dtype=np.int64
        ).reshape(self.cdim)

        # spanning-tree reconstruction: R[g, h] is the compact -> c(g, h) row
        unit = np.zeros((n, ns, self.cdim), dtype=np.int64)
        for x in nonid:
            for si in range(ns):
                unit[x, si, cvar[x, si]] = 1
        R = np.zeros((n, n, self.cdim), dtype=np.int64)
        seen = np.zeros(n, dtype=bool)
        seen[ident] = True
        queue = [ident]
        for h in queue:
            for si, s in enumerate(S):
                k = mul[h, s]
                if not seen[k]:
                    seen[k] = True
                    R[:, k] = R[:, h] + unit[mul[:, h], si] - unit[h, si][None, :]
                    queue.append(int(k))
        self.expand = R[np.ix_(nonid, nonid)].reshape(self.dim, self.cdim)

        # cocycle identity at (g, h, s) for the reconstructed cochain
        gg, hh = np.meshgrid(nonid, nonid, indexing="ij")
        blocks = []
        for s in S:
            blocks.append(
                R[hh, s] - R[mul[gg, hh], s] + R[gg, mul[hh, s]] - R[gg, hh]
            )
        if blocks:
            cons = np.concatenate([b.reshape(-1, self.cdim) for b in blocks])
        else:
            cons = np.zeros((0, self.cdim), dtype=np.int64)
        K = kernel_mod(cons, self.e)
        self.Z2_full = (K.gens @ self.expand.T) % self.e
        self.Z2 = SubmoduleModE(self.e, self.cdim, self.Z2_full[:, self.tree_cols])

        self.B2_full = self._coboundaries()
        self.homs = self._homomorphisms()
        self.bock_full = self._carry_cocycles(self.homs)
        for name, V in (("coboundary", self.B2_full), ("carry cocycle", self.bock_full)):
            if not self.is_cocycle(V).all():
                raise AssertionError(f"{name} generator failed the cocycle identity")
        self.B2 = SubmoduleModE(self.e, self.cdim, self.B2_full[:, self.tree_cols])
        self.B = SubmoduleModE(
            self.e,
            self.cdim,
            np.vstack([self.B2_full, self.bock_full])[:, self.tree_cols],
        )

    def __repr__(self):
        return f"CocycleSpace({self.group.name or '?'}, order={self.group.order}, e={self.e})"

    # -- construction helpers ------------------------------------------------

    def _coboundaries(self) -> np.ndarray:
        mul, nonid = self.group.mul, self.nonid
        gg, hh = np.meshgrid(nonid, nonid, indexing="ij")
        gh = mul[gg, hh]
        out = np.zeros((len(nonid), self.dim), dtype=np.int64)
        for i, x in enumerate(nonid):
            out[i] = ((gg == x).astype(np.int64) + (hh == x) - (gh == x)).ravel()
        return out % self.e

    def _homomorphisms(self) -> np.ndarray:
        """Rows chi (indexed by all elements, chi(1) = 0) spanning Hom(G, Z/e)."""
        G, nonid, pos = self.group, self.nonid, self.pos
        n = G.order
        rows = []
        for g in nonid:
            for s in self.generators:
                # chi(g) + chi(s) - chi(gs) = 0
                r = np.zeros(n - 1, dtype=np.int64)
                r[pos[g]] += 1
                r[pos[s]] += 1
                gs = G.mul[g, s]
                if gs != G.identity:
                    r[pos[gs]] -= 1
                rows.append(r)
        A = np.array(rows, dtype=np.int64).reshape(len(rows), n - 1)
        K = kernel_mod(A, self.e)
        full = np.zeros((K.gens.shape[0], n), dtype=np.int64)
        full[:, nonid] = K.gens
        return full

    def _carry_cocycles(self, homs: np.ndarray) -> np.ndarray:
        mul, nonid, e = self.group.mul, self.nonid, self.e
        gg, hh = np.meshgrid(nonid, nonid, indexing="ij")
        out = []
        for chi in homs:
            s = chi[gg] + chi[hh] - chi[mul[gg, hh]]
            assert (s % e == 0).all()
            out.append((s // e).ravel() % e)
        return np.array(out, dtype=np.int64).reshape(len(out), self.dim)

    @cached_property
    def cocycle_operator(self) -> sparse.csr_matrix:
        """Sparse operator whose kernel (mod e) is the normalized cocycles."""
        mul, coord, nonid = self.group.mul, self.coord, self.nonid
        rows, cols, vals = [], [], []
        r = 0
        for g in nonid:
            for h in nonid:
                gh = mul[g, h]
                for s in self.generators:
                    for (a, b), v in (((h, s), 1), ((gh, s), -1), ((g, mul[h, s]), 1), ((g, h), -1)):
                        c = coord[a, b]
                        if c >= 0:
                            rows.append(r)
                            cols.append(c)
                            vals.append(v)
                    r += 1
        return sparse.csr_matrix(
            (np.array(vals, dtype=np.int64), (rows, cols)), shape=(r, self.dim), dtype=np.int64
        )

    # -- queries ---------------------------------------------------------------

    def is_cocycle(self, V) -> np.ndarray:
        """Per-row flags: is the full cochain a cocycle?"""
        V = as_rows(V, self.dim)
        if V.shape[0] == 0 or self.dim == 0:
            return np.ones(V.shape[0], dtype=bool)
        D = (self.cocycle_operator @ V.T) % self.e
        return ~np.asarray(D).any(axis=0)

    def compact(self, V) -> np.ndarray:
        V = as_rows(V, self.dim)
        return V[:, self.tree_cols] % self.e

    def full(self, C) -> np.ndarray:
        C = as_rows(C, self.cdim)
        return (C @ self.expand.T) % self.e

    def classes(self, S: SubmoduleModE | None = None) -> AbelianInvariants:
        """Invariants of the class group (S + B)/B; S defaults to all cocycles."""
        S = self.Z2 if S is None else S
        return quotient_invariants(S + self.B, self.B)

    def with_boundaries(self, S: SubmoduleModE) -> SubmoduleModE:
        return (S + self.B).compressed()

    def is_trivial_class(self, V) -> np.ndarray:
        """Flags for compact cocycle rows lying in B^2 + Bock."""
        return self.B.contains_rows(V)

    def p_part(self, S: SubmoduleModE, p: int) -> SubmoduleModE:
        """Preimage (containing B) of the Sylow p-subgroup of the classes of S."""
        cofactor = self.e
        while cofactor % p == 0:
            cofactor //= p
        return (S.scaled(cofactor) + self.B).compressed()


_SPACE_CACHE: OrderedDict = OrderedDict()
_SPACE_CACHE_SIZE = 512


def cocycle_space(G, e: int | None = None) -> CocycleSpace:
    """The cocycle space of a group (or of a subgroup's own table), memoized."""
    table = G.table if isinstance(G, Subgroup) else G
    e = table.order if e is None else int(e)
    if table.order > cohomology_cap():  # the cap also applies to cached spaces
        raise CapExceeded(f"order {table.order} exceeds the cohomology cap {cohomology_cap()}")
    key = (table.encoding, e)
    space = _SPACE_CACHE.get(key)
    if space is None:
        space = CocycleSpace(table, e)
        _SPACE_CACHE[key] = space
        if len(_SPACE_CACHE) > _SPACE_CACHE_SIZE:
            _SPACE_CACHE.popitem(last=False)
    else:
        _SPACE_CACHE.move_to_end(key)
    return space


def clear_space_cache():
    _SPACE_CACHE.clear()
    for f in (_restriction, _conjugation, _corestriction):
        f.cache_clear()


def schur_h2(G) -> AbelianInvariants:
    """Invariants of the Schur multiplier ``H^2(G, Q/Z)``."""
    return cocycle_space(G).classes()


def h2_zmod(G, e: int | None = None) -> AbelianInvariants:
    """Invariants of ``H^2(G, Z/e)`` (no Bockstein quotient)."""
    V = cocycle_space(G, e)
    return quotient_invariants(V.Z2, V.B2)


# ---------------------------------------------------------------------------
# maps between cocycle spaces


class LinearMapModE:
    """A cochain map given on full coordinates (target_dim x source_dim).

    ``compact`` is the induced matrix on compact coordinates, valid on
    cocycles.  Construction asserts that cocycles go to cocycles and
    ``B^2 + Bock`` into ``B^2 + Bock``.
    """

    def __init__(self, source: CocycleSpace, target: CocycleSpace, matrix, name: str = "", check: bool = True):
        if source.e != target.e:
            raise ValueError("source and target use different moduli")
        self.source = source
        self.target = target
        self.e = source.e
        self.name = name
        self.matrix = sparse.csr_matrix(matrix, dtype=np.int64)
        if self.matrix.shape != (target.dim, source.dim):
            raise ValueError(f"matrix shape {self.matrix.shape} != {(target.dim, source.dim)}")
        imgs = np.asarray(self.matrix @ source.expand) % self.e
        self.compact = imgs[target.tree_cols] if target.cdim else np.zeros((0, source.cdim), dtype=np.int64)
        if check:
            self.verify()

    def __repr__(self):
        return f"LinearMapModE({self.name}: {self.source!r} -> {self.target!r})"

    def verify(self):
        src, tgt = self.source, self.target
        if src.Z2_full.shape[0]:
            img = np.asarray(self.matrix @ src.Z2_full.T).T % self.e
            if not tgt.is_cocycle(img).all():
                raise NotWellDefined(f"{self.name}: a cocycle maps to a non-cocycle")
        if src.B.gens.shape[0]:
            if not tgt.B.contains_rows(self.on_compact(src.B.gens)).all():
                raise NotWellDefined(f"{self.name}: B^2 + Bock does not map into B^2 + Bock")

    def apply(self, v) -> np.ndarray:
        """Apply to full cochain rows."""
        V = np.array(v, dtype=np.int64, ndmin=2)
        return np.asarray(self.matrix @ V.T).T % self.e

    def on_compact(self, C) -> np.ndarray:
        """Apply to compact cocycle rows."""
        C = as_rows(C, self.source.cdim)
        return (C @ self.compact.T) % self.e

    def image(self, S: SubmoduleModE) -> SubmoduleModE:
        if (S.e, S.dim) != (self.e, self.source.cdim):
            raise ValueError(f"submodule over Z/{S.e} in dim {S.dim} does not match the source space")
        return SubmoduleModE(self.e, self.target.cdim, self.on_compact(S.gens))

    def compose(self, first: "LinearMapModE") -> "LinearMapModE":
        """``self`` after ``first``."""
        return LinearMapModE(
            first.source, self.target, self.matrix @ first.matrix,
            name=f"{self.name}*{first.name}", check=False,
        )


def _pair_sources(big: Subgroup, space: CocycleSpace, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Coordinates in ``space`` (the space of ``big``) of ambient pairs (A, B)."""
    return space.coord[big.local_index[A], big.local_index[B]]


def _target_pairs(small: Subgroup, space: CocycleSpace):
    """Ambient element pairs for every full coordinate of ``small``'s space."""
    amb = small.array[space.nonid]
    X, Y = np.meshgrid(amb, amb, indexing="ij")
    return X.ravel(), Y.ravel()


def _selection(rows_src: np.ndarray, tdim: int, sdim: int):
    keep = rows_src >= 0
    r = np.flatnonzero(keep)
    c = rows_src[keep]
    return sparse.csr_matrix((np.ones(len(r), dtype=np.int64), (r, c)), shape=(tdim, sdim))


def _resolve(G, H):
    big, small = as_subgroup(G), as_subgroup(H)
    if small.parent is not big.parent:
        raise ValueError("subgroups belong to different ambient groups")
    return big, small


def restriction_map(G, H, e: int | None = None) -> LinearMapModE:
    """``res: Z^2(G) -> Z^2(H)``, the coordinate projection onto pairs in H."""
    big, small = _resolve(G, H)
    if not small.issubset(big):
        raise ValueError("H is not a subgroup of G")
    return _restriction(big, small, big.order if e is None else int(e))


@lru_cache(maxsize=MAP_CACHE_SIZE)
def _restriction(big: Subgroup, small: Subgroup, e: int) -> LinearMapModE:
    src, tgt = cocycle_space(big, e), cocycle_space(small, e)
    X, Y = _target_pairs(small, tgt)
    cols = _pair_sources(big, src, X, Y)
    return LinearMapModE(src, tgt, _selection(cols, tgt.dim, src.dim), name="res")


def conjugation_map(G, H, g: int, e: int | None = None) -> LinearMapModE:
    """``conj^g: Z^2(H) -> Z^2(H^g)``, ``(c conj^g)(x, y) = c(g x g^-1, g y g^-1)``."""
    big, H = _resolve(G, H)
    return _conjugation(big, H, int(g), big.order if e is None else int(e))


@lru_cache(maxsize=MAP_CACHE_SIZE)
def _conjugation(big: Subgroup, H: Subgroup, g: int, e: int) -> LinearMapModE:
    amb = big.parent
    Hg = conjugate(amb, H, g)
    src, tgt = cocycle_space(H, e), cocycle_space(Hg, e)
    X, Y = _target_pairs(Hg, tgt)
    gi = amb.inv[g]
    back_x = amb.mul[amb.mul[g, X], gi]
    back_y = amb.mul[amb.mul[g, Y], gi]
    cols = _pair_sources(H, src, back_x, back_y)
    return LinearMapModE(src, tgt, _selection(cols, tgt.dim, src.dim), name=f"conj[{g}]")


def action_on_h2(G, Q, g: int, e: int | None = None) -> LinearMapModE:
    """Action of g on the cocycles of a normal subgroup Q (conjugation with Q^g = Q)."""
    big, Q = _resolve(G, Q)
    if not _normal_in(big, Q):
        raise NotNormal("Q is not normal in G")
    return conjugation_map(G, Q, g, Q.order if e is None else e)


def _normal_in(big: Subgroup, Q: Subgroup) -> bool:
    mul, inv = big.parent.mul, big.parent.inv
    return all(Q.mask[mul[mul[inv[g], Q.array], g]].all() for g in big.elements)


def corestriction_map(G, H, e: int | None = None) -> LinearMapModE:
    """Transfer ``cor: Z^2(H) -> Z^2(G)`` on bar cochains.

    With the canonical right transversal T, ``rho(t, g)`` the representative of
    ``Htg`` and ``h(t, g) = t g rho(t, g)^-1``:
    ``(cor c)(g1, g2) = sum_t c(h(t, g1), h(rho(t, g1), g2))``.
    """
    big, small = _resolve(G, H)
    return _corestriction(big, small, big.order if e is None else int(e))


@lru_cache(maxsize=MAP_CACHE_SIZE)
def _corestriction(big: Subgroup, small: Subgroup, e: int) -> LinearMapModE:
    amb = big.parent
    src, tgt = cocycle_space(small, e), cocycle_space(big, e)
    T = np.array(right_transversal(big, small), dtype=np.int64)
    rep = np.full(amb.order, -1, dtype=np.int64)
    for t in T:
        rep[amb.mul[small.array, t]] = t
    mul, inv = amb.mul, amb.inv
    X, Y = _target_pairs(big, tgt)
    rows_all, cols_all = [], []
    trow = np.arange(tgt.dim)
    for t in T:
        tg1 = mul[t, X]
        r1 = rep[tg1]
        a = mul[tg1, inv[r1]]
        r1g2 = mul[r1, Y]
        r2 = rep[r1g2]
        b = mul[r1g2, inv[r2]]
        cols = _pair_sources(small, src, a, b)
        keep = cols >= 0
        rows_all.append(trow[keep])
        cols_all.append(cols[keep])
    r = np.concatenate(rows_all) if rows_all else np.zeros(0, dtype=np.int64)
    c = np.concatenate(cols_all) if cols_all else np.zeros(0, dtype=np.int64)
    M = sparse.coo_matrix((np.ones(len(r), dtype=np.int64), (r, c)), shape=(tgt.dim, src.dim)).tocsr()
    return LinearMapModE(src, tgt, M, name="cor")


def stable_elements(G, H, e: int | None, S: SubmoduleModE) -> SubmoduleModE:
    """Classes of S (compact cocycles of H) stable with respect to G.

    alpha is stable when ``res_{H cap H^g} alpha == res_{H cap H^g} conj^g alpha``
    for every double coset HgH.  The result contains ``B^2 + Bock`` whenever
    S does.
    """
    big, H = _resolve(G, H)
    amb = big.parent
    e = big.order if e is None else e
    out = S
    for g in double_coset_reps(big, H, H):
        Hg = conjugate(amb, H, g)
        K = intersection(H, Hg)
        res1 = restriction_map(H, K, e)
        res2 = restriction_map(Hg, K, e)
        conj = conjugation_map(big, H, g, e)
        D = (res1.compact - res2.compact @ conj.compact) % e
        out = preimage(out, D, cocycle_space(K, e).B).compressed()
    return out


def classes_coincide(space: CocycleSpace, u, v) -> bool:
    """Do compact cocycles u and v represent the same class in H^2(., Q/Z)?"""
    return bool(space.B.contains(np.asarray(u) - np.asarray(v)))


class H2Class:
    """A cohomology class, compared through membership in ``B^2 + Bock``."""

    def __init__(self, space: CocycleSpace, rep):
        rep = np.asarray(rep, dtype=np.int64) % space.e
        if rep.shape != (space.cdim,):
            raise ValueError("class representative must be a compact cocycle")
        if not space.Z2.contains(rep):
            raise ValueError("representative is not a cocycle")
        self.space = space
        self.rep = rep

    def __eq__(self, other):
        return isinstance(other, H2Class) and other.space is self.space and classes_coincide(self.space, self.rep, other.rep)

    __hash__ = None

    def __add__(self, other):
        return H2Class(self.space, self.rep + other.rep)

    def __rmul__(self, k: int):
        return H2Class(self.space, int(k) * self.rep)

    def is_zero(self) -> bool:
        return bool(self.space.B.contains(self.rep))

    def order(self) -> int:
        k = 1
        while not H2Class(self.space, k * self.rep).is_zero():
            k += 1
        return k


__all__ = [
    "COHOMOLOGY_CAP",
    "CocycleSpace",
    "H2Class",
    "LinearMapModE",
    "action_on_h2",
    "classes_coincide",
    "cocycle_space",
    "conjugation_map",
    "corestriction_map",
    "h2_zmod",
    "prime_powers",
    "restriction_map",
    "schur_h2",
    "stable_elements",
]
