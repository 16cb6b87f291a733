"""Exact integer and Z/e linear algebra.

Two layers live here:

* :func:`smith_normal_form` works over the integers with Python ints and
  returns the unimodular transforms.  It describes abelian groups given by
  generators and relations.
* :class:`SubmoduleModE` and the kernel/membership/quotient routines work in
  ``(Z/e)^n``.  A module over Z/e splits as a product over the prime powers
  ``q = p^k`` exactly dividing e, and over each Z/q the work is Gaussian
  elimination in Howell form (pivots p^a on a unit-normalised row, plus the
  annihilator row ``p^(k-a) * pivot`` fed back in).  Vectors are rows.

All Z/e arithmetic uses int64 numpy arrays; e must stay below 2**31.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import gcd, prod
from typing import Sequence

import numpy as np
from sympy import factorint

from .errors import InfiniteQuotient, NotSubmodule


# ---------------------------------------------------------------------------
# abelian invariants


@dataclass(frozen=True)
class AbelianInvariants:
    """Invariant factors ``d1 | d2 | ...`` (all >= 2) of a finite abelian group."""

    factors: tuple[int, ...] = ()

    def __post_init__(self):
        fs = tuple(int(f) for f in self.factors)
        object.__setattr__(self, "factors", fs)
        for f in fs:
            if f < 2:
                raise ValueError(f"invariant factor {f} < 2")
        for a, b in zip(fs, fs[1:]):
            if b % a:
                raise ValueError(f"invariant factors {fs} do not form a divisibility chain")

    @classmethod
    def from_cyclic_orders(cls, orders: Sequence[int]) -> "AbelianInvariants":
        """Invariants of a direct sum of cyclic groups of the given orders."""
        by_prime: dict[int, list[int]] = {}
        for n in orders:
            n = int(n)
            if n == 0:
                raise InfiniteQuotient("infinite cyclic summand")
            for p, k in factorint(n).items():
                by_prime.setdefault(p, []).append(p**k)
        width = max((len(v) for v in by_prime.values()), default=0)
        chain = [1] * width
        for powers in by_prime.values():
            powers.sort(reverse=True)
            for i, q in enumerate(powers):
                chain[i] *= q
        return cls(tuple(sorted(f for f in chain if f > 1)))

    @property
    def order(self) -> int:
        return prod(self.factors)

    def is_trivial(self) -> bool:
        return not self.factors

    def p_part(self, p: int) -> "AbelianInvariants":
        return p_part(self, p)

    def as_list(self) -> list[int]:
        return list(self.factors)

    def __str__(self):
        return "[" + ", ".join(str(f) for f in self.factors) + "]"


def p_part(inv: AbelianInvariants, p: int) -> AbelianInvariants:
    """Invariants of the Sylow p-subgroup."""
    out = []
    for d in inv.factors:
        q = 1
        while d % p == 0:
            d //= p
            q *= p
        if q > 1:
            out.append(q)
    return AbelianInvariants(tuple(sorted(out)))


# ---------------------------------------------------------------------------
# integer Smith normal form


@dataclass(frozen=True)
class SNFResult:
    U: list[list[int]]
    D: list[list[int]]
    V: list[list[int]]
    diag: tuple[int, ...]


def _identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_normal_form(A) -> SNFResult:
    """``U @ A @ V == D`` with U, V unimodular and ``diag(D)`` a divisibility chain.

    Pivots are chosen as the entry of least absolute value, first in row-major
    order, so the result is deterministic.
    """
    D = [[int(x) for x in row] for row in A]
    m = len(D)
    n = len(D[0]) if m else 0
    if any(len(row) != n for row in D):
        raise ValueError("ragged matrix")
    U = _identity(m)
    V = _identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for M in (D, V):
            for row in M:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, c):  # row dst += c * row src
        for M in (D, U):
            rs, rd = M[src], M[dst]
            for k in range(len(rd)):
                rd[k] += c * rs[k]

    def add_col(dst, src, c):  # col dst += c * col src
        for M in (D, V):
            for row in M:
                row[dst] += c * row[src]

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    x = D[i][j]
                    if x and (best is None or abs(x) < best[0]):
                        best = (abs(x), i, j)
            if best is None:
                break
            _, i, j = best
            if i != t:
                swap_rows(t, i)
            if j != t:
                swap_cols(t, j)
            piv = D[t][t]
            clean = True
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, -(D[i][t] // piv))
                    clean = clean and D[i][t] == 0
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, -(D[t][j] // piv))
                    clean = clean and D[t][j] == 0
            if not clean:
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % piv),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if t < m and t < n and D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
    diag = tuple(D[i][i] for i in range(min(m, n)))
    return SNFResult(U=U, D=D, V=V, diag=diag)


def abelian_invariants_from_relations(n_gens: int, relations) -> AbelianInvariants:
    """Invariant factors of ``Z^n_gens / rowspace(relations)``."""
    rows = [list(r) for r in relations]
    for r in rows:
        if len(r) != n_gens:
            raise ValueError(f"relation {r} does not have {n_gens} entries")
    if n_gens == 0:
        return AbelianInvariants(())
    if not rows:
        raise InfiniteQuotient("no relations: quotient is free of rank %d" % n_gens)
    diag = list(smith_normal_form(rows).diag)
    diag += [0] * (n_gens - len(diag))
    if 0 in diag:
        raise InfiniteQuotient("relations leave a free summand")
    return AbelianInvariants(tuple(d for d in diag if d > 1))


# ---------------------------------------------------------------------------
# prime-power local elimination


def _valuation(x: np.ndarray, p: int, k: int) -> np.ndarray:
    """p-adic valuation of entries of x modulo p^k (k for zero entries)."""
    v = np.zeros(x.shape, dtype=np.int64)
    y = x.copy()
    live = y != 0
    v[~live] = k
    for _ in range(k):
        div = live & (y % p == 0)
        if not div.any():
            break
        v[div] += 1
        y[div] //= p
        live = div
    return v


@dataclass(frozen=True, eq=False)
class LocalEchelon:
    """Howell basis of a submodule of (Z/p^k)^n.

    ``rows[i]`` has zeros left of ``cols[i]`` and the entry ``p^vals[i]`` there.
    Every element of the module is a unique combination ``sum c_i rows[i]``
    with ``0 <= c_i < p^(k - vals[i])``.
    """

    p: int
    k: int
    dim: int
    cols: tuple[int, ...]
    vals: tuple[int, ...]
    rows: np.ndarray

    @property
    def q(self):
        return self.p**self.k

    @property
    def log_order(self) -> int:
        return sum(self.k - a for a in self.vals)

    def reduce(self, V: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Reduce the rows of V; returns (residuals, member flags)."""
        q = self.q
        R = np.array(V, dtype=np.int64, ndmin=2) % q
        ok = np.ones(R.shape[0], dtype=bool)
        for c, a, row in zip(self.cols, self.vals, self.rows):
            pa = self.p**a
            col = R[:, c]
            ok &= col % pa == 0
            R = (R - (col // pa)[:, None] * row[None, :]) % q
        ok &= ~R.any(axis=1)
        return R, ok


def as_rows(V, dim: int) -> np.ndarray:
    """Coerce a vector or list of vectors to an int64 ``(rows, dim)`` array."""
    A = np.array(V, dtype=np.int64)
    if A.ndim == 2 and A.shape[1] == dim:
        return A
    if dim == 0:
        return np.zeros((A.shape[0] if A.ndim == 2 else int(A.ndim == 1), 0), dtype=np.int64)
    return A.reshape(-1, dim)


def local_echelon(rows: np.ndarray, p: int, k: int, dim: int | None = None) -> LocalEchelon:
    q = p**k
    A = np.array(rows, dtype=np.int64, ndmin=2)
    if dim is None:
        dim = A.shape[1]
    A = as_rows(A, dim) % q
    A = np.unique(A[A.any(axis=1)], axis=0) if A.size else A
    # spare rows for the annihilator multiples fed back after each pivot
    n0 = A.shape[0]
    A = np.vstack([A, np.zeros((dim, dim), dtype=np.int64)])
    free = n0
    cols, vals, out = [], [], []
    for j in range(dim):
        col = A[:, j]
        nz = np.flatnonzero(col)
        if nz.size == 0:
            continue
        v = _valuation(col[nz], p, k)
        r = int(nz[np.argmin(v)])
        a = int(v.min())
        pa = p**a
        pivot = np.zeros(dim, dtype=np.int64)
        pivot[j:] = (A[r, j:] * pow(int(A[r, j]) // pa, -1, q)) % q
        # only rows touching column j change; the pivot row itself becomes zero
        A[nz, j:] = (A[nz, j:] - (col[nz] // pa)[:, None] * pivot[None, j:]) % q
        ann = (pivot * p ** (k - a)) % q
        if ann.any():
            A[free] = ann
            free += 1
        cols.append(j)
        vals.append(a)
        out.append(pivot)
    R = np.array(out, dtype=np.int64).reshape(len(out), dim)
    R.setflags(write=False)
    return LocalEchelon(p, k, dim, tuple(cols), tuple(vals), R)


def _local_kernel(A: np.ndarray, p: int, k: int) -> np.ndarray:
    """Generators (rows) of {x in (Z/p^k)^m : A @ x == 0}, A of shape (r, m)."""
    q = p**k
    A = np.array(A, dtype=np.int64, ndmin=2) % q
    m = A.shape[1]
    if m == 0:
        return np.zeros((0, 0), dtype=np.int64)
    H = local_echelon(A, p, k, dim=m).rows
    h = H.shape[0]
    aug = np.hstack([H.T % q, np.eye(m, dtype=np.int64)])
    E = local_echelon(aug, p, k)
    gens = [row[h:] for c, row in zip(E.cols, E.rows) if c >= h]
    return np.array(gens, dtype=np.int64).reshape(len(gens), m)


def _local_quotient_orders(basis: LocalEchelon, sub: LocalEchelon) -> list[int]:
    """Cyclic orders of span(basis)/span(sub), assuming sub is contained."""
    p, k, q = basis.p, basis.k, basis.q
    B = basis.rows
    s = B.shape[0]
    if s == 0:
        return []
    # relations among the Howell rows: coefficient vectors landing in sub
    aug = np.hstack([B % q, np.eye(s, dtype=np.int64)])
    extra = np.hstack([sub.rows, np.zeros((sub.rows.shape[0], s), dtype=np.int64)])
    E = local_echelon(np.vstack([aug, extra]), p, k)
    rel = [row[basis.dim:] for c, row in zip(E.cols, E.rows) if c >= basis.dim]
    rel = np.array(rel, dtype=np.int64).reshape(len(rel), s)
    return [p**a for a in local_snf_valuations(rel, p, k, s) if a > 0]


def local_snf_valuations(M: np.ndarray, p: int, k: int, ncols: int) -> list[int]:
    """Valuations of the Smith form diagonal of M over Z/p^k, padded with k to ncols."""
    q = p**k
    M = as_rows(M, ncols) % q
    out = []
    while M.size and M.any():
        v = _valuation(M, p, k)
        i, j = np.unravel_index(np.argmin(v), v.shape)
        a = int(v[i, j])
        pa = p**a
        row = (M[i] * pow(int(M[i, j]) // pa, -1, q)) % q
        M = (M - (M[:, j] // pa)[:, None] * row[None, :]) % q
        M = np.delete(np.delete(M, i, axis=0), j, axis=1)
        out.append(a)
    out += [k] * (ncols - len(out))
    return out


# ---------------------------------------------------------------------------
# submodules of (Z/e)^n


def prime_powers(e: int) -> list[tuple[int, int]]:
    return sorted(factorint(e).items())


def _crt_idempotent(e: int, p: int, k: int) -> int:
    q = p**k
    r = e // q
    return (r * pow(r, -1, q)) % e if r > 1 else 1


class SubmoduleModE:
    """The Z/e-span of a list of row vectors in ``(Z/e)^dim``."""

    def __init__(self, e: int, dim: int, gens=None):
        if e < 1:
            raise ValueError("modulus must be positive")
        self.e = int(e)
        self.dim = int(dim)
        G = np.zeros((0, dim), dtype=np.int64) if gens is None else np.array(gens, dtype=np.int64, ndmin=2)
        if self.dim == 0 or G.size == 0:
            G = np.zeros((0, self.dim), dtype=np.int64)
        else:
            G = G.reshape(-1, dim) % self.e
            G = G[G.any(axis=1)]
        G.setflags(write=False)
        self.gens = G

    def __repr__(self):
        return f"SubmoduleModE(e={self.e}, dim={self.dim}, order={self.order})"

    @classmethod
    def full(cls, e: int, dim: int) -> "SubmoduleModE":
        return cls(e, dim, np.eye(dim, dtype=np.int64))

    @classmethod
    def zero(cls, e: int, dim: int) -> "SubmoduleModE":
        return cls(e, dim)

    @cached_property
    def local(self) -> dict[int, LocalEchelon]:
        return {p: local_echelon(self.gens, p, k, dim=self.dim) for p, k in prime_powers(self.e)}

    @property
    def order(self) -> int:
        return prod(E.p**E.log_order for E in self.local.values())

    def is_zero(self) -> bool:
        return self.gens.shape[0] == 0

    def contains(self, v) -> bool:
        return bool(self.contains_rows(np.asarray(v).reshape(1, self.dim))[0])

    def contains_rows(self, V) -> np.ndarray:
        V = as_rows(V, self.dim)
        ok = np.ones(V.shape[0], dtype=bool)
        for E in self.local.values():
            ok &= E.reduce(V)[1]
        return ok

    def contains_module(self, other: "SubmoduleModE") -> bool:
        return bool(self.contains_rows(other.gens).all())

    def __le__(self, other: "SubmoduleModE") -> bool:
        return other.contains_module(self)

    def same_as(self, other: "SubmoduleModE") -> bool:
        return self.contains_module(other) and other.contains_module(self)

    def __add__(self, other: "SubmoduleModE") -> "SubmoduleModE":
        if (self.e, self.dim) != (other.e, other.dim):
            raise ValueError("submodules live in different ambient modules")
        return SubmoduleModE(self.e, self.dim, np.vstack([self.gens, other.gens]))

    def scaled(self, c: int) -> "SubmoduleModE":
        return SubmoduleModE(self.e, self.dim, self.gens * int(c))

    def image(self, M: np.ndarray) -> "SubmoduleModE":
        """Image under the column-convention matrix M (target_dim x dim)."""
        M = np.asarray(M, dtype=np.int64)
        return SubmoduleModE(self.e, M.shape[0], (self.gens @ M.T) % self.e)

    def basis(self) -> np.ndarray:
        """A small generating set: CRT lifts of the local Howell rows."""
        out = []
        for p, E in self.local.items():
            c = _crt_idempotent(self.e, p, E.k)
            out.extend((E.rows * c) % self.e)
        return np.array(out, dtype=np.int64).reshape(len(out), self.dim)

    def compressed(self) -> "SubmoduleModE":
        out = SubmoduleModE(self.e, self.dim, self.basis())
        out.__dict__["local"] = self.local  # same span, same echelon forms
        return out


def membership(v, S: SubmoduleModE) -> bool:
    return S.contains(v)


def kernel_mod(A, e: int) -> SubmoduleModE:
    """``{x : A @ x == 0 (mod e)}`` for an integer matrix A of shape (rows, cols)."""
    A = np.array(A, dtype=np.int64, ndmin=2)
    m = A.shape[1]
    if m == 0:
        return SubmoduleModE(e, 0)
    gens = []
    for p, k in prime_powers(e):
        c = _crt_idempotent(e, p, k)
        gens.extend((_local_kernel(A % p**k, p, k) * c) % e)
    return SubmoduleModE(e, m, np.array(gens, dtype=np.int64).reshape(len(gens), m))


def constrained_kernel(A, B, e: int) -> SubmoduleModE:
    """``{x : exists y, A @ x == B @ y (mod e)}``."""
    A = np.array(A, dtype=np.int64, ndmin=2)
    B = np.array(B, dtype=np.int64, ndmin=2)
    if B.size == 0:
        B = np.zeros((A.shape[0], 0), dtype=np.int64)
    if A.shape[0] != B.shape[0]:
        raise ValueError("A and B must have the same number of rows")
    n = A.shape[1]
    K = kernel_mod(np.hstack([A, -B]), e)
    return SubmoduleModE(e, n, K.gens[:, :n])


def preimage(V: SubmoduleModE, M, W: SubmoduleModE) -> SubmoduleModE:
    """``{v in V : M v in W}`` for a column-convention matrix M."""
    M = np.asarray(M, dtype=np.int64)
    e = V.e
    Vb = V.basis()
    if Vb.shape[0] == 0:
        return SubmoduleModE(e, V.dim)
    if M.size == 0:  # zero target: everything maps into W
        return SubmoduleModE(e, V.dim, Vb)
    images = (Vb @ M.T) % e  # one row per basis vector
    X = constrained_kernel(images.T, W.gens.T.reshape(M.shape[0], -1), e)
    return SubmoduleModE(e, V.dim, (X.gens @ Vb) % e)


def quotient_invariants(V: SubmoduleModE, W: SubmoduleModE) -> AbelianInvariants:
    """Invariant factors of V/W; raises NotSubmodule unless W is inside V."""
    if (V.e, V.dim) != (W.e, W.dim):
        raise ValueError("submodules live in different ambient modules")
    if not V.contains_module(W):
        raise NotSubmodule("W is not contained in V")
    orders = []
    for p in V.local:
        orders.extend(_local_quotient_orders(V.local[p], W.local[p]))
    return AbelianInvariants.from_cyclic_orders(orders)


def quotient_invariants_via_snf(V: SubmoduleModE, W: SubmoduleModE) -> AbelianInvariants:
    """Same as :func:`quotient_invariants`, through integer Smith normal form.

    The relation lattice of V's generators modulo W (and e) is built as an
    integer matrix with ``e * I`` rows appended.
    """
    if not V.contains_module(W):
        raise NotSubmodule("W is not contained in V")
    e = V.e
    r = V.gens.shape[0]
    if r == 0:
        return AbelianInvariants(())
    rel = constrained_kernel(V.gens.T, W.gens.T.reshape(V.dim, -1), e)
    rows = [list(map(int, g)) for g in rel.gens]
    rows += [[e * int(i == j) for j in range(r)] for i in range(r)]
    return abelian_invariants_from_relations(r, rows)


def order_of_submodule_by_enumeration(S: SubmoduleModE) -> int:
    """Brute-force |span S| by closing under addition (tiny cases only)."""
    seen = {tuple([0] * S.dim)}
    frontier = list(seen)
    gens = [tuple(int(x) for x in g) for g in S.gens]
    while frontier:
        nxt = []
        for v in frontier:
            for g in gens:
                w = tuple((a + b) % S.e for a, b in zip(v, g))
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return len(seen)


__all__ = [
    "AbelianInvariants",
    "SNFResult",
    "SubmoduleModE",
    "as_rows",
    "LocalEchelon",
    "abelian_invariants_from_relations",
    "constrained_kernel",
    "kernel_mod",
    "local_echelon",
    "membership",
    "p_part",
    "preimage",
    "quotient_invariants",
    "quotient_invariants_via_snf",
    "smith_normal_form",
]
