"""Sha^2(G, Q/Z): classes that restrict trivially to every abelian subgroup.

The group is computed as a preimage: starting from all compact cocycles, keep
those whose restriction to each maximal bicyclic subgroup A lies in
``B^2(A) + Bock(A)``.  Bicyclic subgroups already detect Sha^2 (dually, B_0 is
the Schur multiplier modulo the classes coming from commuting pairs), and
restriction is transitive, so the maximal bicyclic subgroups suffice.  The
enumeration over all abelian subgroups is kept as an independent route.

The invariants of Sha^2 equal those of the Bogomolov multiplier B_0(G), its
Q/Z-dual; B_0 itself is never built from a presentation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cohomology import (
    CocycleSpace,
    LinearMapModE,
    action_on_h2,
    cocycle_space,
    restriction_map,
)
from .errors import CapExceeded, NotNormal, SubmoduleViolation
from .groups import (
    GroupTable,
    Subgroup,
    abelian_subgroups,
    as_subgroup,
    bicyclic_subgroups,
    generating_set,
    maximal_by_inclusion,
)
from .linalg import AbelianInvariants, SubmoduleModE, preimage, quotient_invariants

ABELIAN_ENUMERATION_CAP = 32


@dataclass(eq=False)
class Sha2Result:
    group: GroupTable
    invariants: AbelianInvariants
    representatives: SubmoduleModE  # compact cocycles, contains B^2 + Bock
    ambient: CocycleSpace
    tested: tuple = field(default=(), repr=False)  # subgroups (of the local table) intersected over

    @property
    def order(self) -> int:
        return self.invariants.order

    def is_trivial(self) -> bool:
        return self.invariants.is_trivial()

    def full_representatives(self) -> np.ndarray:
        return self.ambient.full(self.representatives.gens)

    def p_part(self, p: int) -> SubmoduleModE:
        return self.ambient.p_part(self.representatives, p)


def _local_table(G) -> GroupTable:
    return G.table if isinstance(G, Subgroup) else G


def _intersect_kernels(T: GroupTable, family, e: int) -> tuple[SubmoduleModE, CocycleSpace]:
    W = cocycle_space(T, e)
    whole = T.whole()
    S = (W.Z2 + W.B).compressed()
    floor = W.B.order
    for A in family:
        if A.is_whole():
            S = W.B
            break
        if S.order == floor:
            break
        res = restriction_map(whole, A, e)
        S = preimage(S, res.compact, cocycle_space(A, e).B).compressed()
    return S, W


def _result(T, S, W, family) -> Sha2Result:
    return Sha2Result(T, W.classes(S), S, W, tuple(family))


def sha2(G, e: int | None = None) -> Sha2Result:
    """Sha^2 of a group (a subgroup is treated through its own table)."""
    T = _local_table(G)
    e = T.order if e is None else int(e)
    # an abelian group is its own abelian subgroup
    family = [T.whole()] if T.is_abelian() else maximal_by_inclusion(bicyclic_subgroups(T))
    S, W = _intersect_kernels(T, family, e)
    return _result(T, S, W, family)


def sha2_via_all_abelian(G, e: int | None = None) -> Sha2Result:
    """Same group, intersecting over every abelian subgroup."""
    T = _local_table(G)
    if T.order > ABELIAN_ENUMERATION_CAP:
        raise CapExceeded(f"abelian subgroup enumeration is limited to order {ABELIAN_ENUMERATION_CAP}")
    e = T.order if e is None else int(e)
    family = abelian_subgroups(T)
    S, W = _intersect_kernels(T, family, e)
    return _result(T, S, W, family)


def bogomolov_multiplier(G) -> AbelianInvariants:
    """Invariants of B_0(G), read off its dual Sha^2(G, Q/Z)."""
    return sha2(G).invariants


# ---------------------------------------------------------------------------
# module structure for a normal subgroup


@dataclass(eq=False)
class ModuleAction:
    """Action of a generating set of G on the compact cocycles of a normal Q."""

    generators: tuple[int, ...]
    maps: tuple[LinearMapModE, ...]
    base: SubmoduleModE  # B^2 + Bock of Q

    @property
    def e(self) -> int:
        return self.base.e

    @property
    def dim(self) -> int:
        return self.base.dim

    def matrix(self, i: int) -> np.ndarray:
        return self.maps[i].compact

    def image(self, i: int, S: SubmoduleModE) -> SubmoduleModE:
        return self.maps[i].image(S) + self.base

    def word(self, letters) -> np.ndarray:
        """Compact matrix of the product of generators (by position), applied left to right."""
        M = np.eye(self.dim, dtype=np.int64)
        for i in letters:
            M = (self.matrix(i) @ M) % self.e
        return M

    def preserves(self, S: SubmoduleModE) -> list[int]:
        """Positions of generators that fail to map S into S + base."""
        target = S + self.base
        return [i for i, f in enumerate(self.maps) if not target.contains_rows(f.on_compact(S.gens)).all()]

    def is_trivial_on(self, S: SubmoduleModE) -> bool:
        for f in self.maps:
            if not self.base.contains_rows(f.on_compact(S.gens) - S.gens).all():
                return False
        return True


def module_action(G, Q, generators=None) -> ModuleAction:
    """Conjugation action of ``generators`` (default: a generating set of G) on Z^2(Q)."""
    big, Q = as_subgroup(G), as_subgroup(Q)
    gens = tuple(generating_set(big)) if generators is None else tuple(int(g) for g in generators)
    e = Q.order
    maps = tuple(action_on_h2(big, Q, g, e) for g in gens)
    return ModuleAction(gens, maps, cocycle_space(Q, e).B)


def sha2_with_action(G, Q) -> tuple[Sha2Result, ModuleAction]:
    big, Q = as_subgroup(G), as_subgroup(Q)
    mul, inv = big.parent.mul, big.parent.inv
    if not all(Q.mask[mul[mul[inv[g], Q.array], g]].all() for g in big.elements):
        raise NotNormal("Q is not normal in G")
    res = sha2(Q)
    action = module_action(big, Q)
    bad = action.preserves(res.representatives)
    if bad:
        raise SubmoduleViolation(f"generator {action.generators[bad[0]]} moves Sha^2(Q) outside itself")
    return res, action


def module_commutator(M: SubmoduleModE, action: ModuleAction, k: int = 1) -> SubmoduleModE:
    """``[M, _k G]`` as a submodule containing the base.

    ``[M, G]`` is the G-submodule generated by ``m x - m`` for m spanning M and
    x among the generators; the result always contains ``action.base``.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    cur = (M + action.base).compressed()
    for _ in range(k):
        diffs = [f.on_compact(cur.gens) - cur.gens for f in action.maps]
        nxt = SubmoduleModE(action.e, action.dim, np.vstack(diffs) if diffs else None) + action.base
        nxt = submodule_closure(nxt, action)
        if nxt.same_as(cur):
            break
        cur = nxt
    return cur


def submodule_closure(S: SubmoduleModE, action: ModuleAction) -> SubmoduleModE:
    """Smallest submodule containing S (and the base) stable under the generators."""
    cur = (S + action.base).compressed()
    while True:
        imgs = [f.on_compact(cur.gens) for f in action.maps]
        nxt = SubmoduleModE(action.e, action.dim, np.vstack([cur.gens, *imgs])).compressed()
        if nxt.order == cur.order:
            return cur
        cur = nxt


def class_invariants(M: SubmoduleModE, action: ModuleAction) -> AbelianInvariants:
    return quotient_invariants(M + action.base, action.base)


__all__ = [
    "ABELIAN_ENUMERATION_CAP",
    "ModuleAction",
    "Sha2Result",
    "bogomolov_multiplier",
    "class_invariants",
    "module_action",
    "module_commutator",
    "sha2",
    "sha2_via_all_abelian",
    "sha2_with_action",
    "submodule_closure",
]
