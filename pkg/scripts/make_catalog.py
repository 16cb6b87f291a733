"""Regenerate the bundled group catalog under src/mlab/data/catalog.

Groups without a handy small-degree permutation model are written through
their right regular representation.  Each construction is checked against
its element-order statistics and centre size before being written.
"""

import itertools
from collections import Counter
from pathlib import Path

from mlab.groups import build_group_from_perms, centralizer, permutation_from_cycles

OUT = Path(__file__).resolve().parents[1] / "src" / "mlab" / "data" / "catalog"


def cycles_of(perm):
    """1-based disjoint cycle string of a 0-based image tuple ('(1)' for identity)."""
    seen, parts = set(), []
    for i in range(len(perm)):
        if i in seen or perm[i] == i:
            continue
        c, j = [], i
        while j not in seen:
            seen.add(j)
            c.append(j + 1)
            j = perm[j]
        parts.append("(" + " ".join(map(str, c)) + ")")
    return "".join(parts) or "(1)"


def regular(elements, mul, gens):
    idx = {x: i for i, x in enumerate(elements)}
    return [tuple(idx[mul(x, g)] for x in elements) for g in gens]


def metacyclic(m, n, r, s):
    """<x, y | x^m, y^n = x^s, y x y^-1 = x^r> as pairs (i, j) = x^i y^j."""
    assert pow(r, n, m) == 1 % m and (s * r - s) % m == 0
    els = [(i, j) for i in range(m) for j in range(n)]

    def mul(a, b):
        i = (a[0] + b[0] * pow(r, a[1], m)) % m
        j = a[1] + b[1]
        if j >= n:
            i, j = (i + s) % m, j - n
        return (i, j)

    return els, mul, [(1 % m, 0), (0, 1 % n)]


def direct(*parts):
    els = list(itertools.product(*[p[0] for p in parts]))

    def mul(a, b):
        return tuple(p[1](x, y) for p, x, y in zip(parts, a, b))

    ident = tuple(p[0][0] for p in parts)
    gens = []
    for k, p in enumerate(parts):
        for g in p[2]:
            gens.append(ident[:k] + (g,) + ident[k + 1:])
    return els, mul, gens


def pauli():
    # i^k X^a Z^b, with Z X = -X Z
    els = [(k, a, b) for k in range(4) for a in range(2) for b in range(2)]

    def mul(u, v):
        return ((u[0] + v[0] + 2 * u[2] * v[1]) % 4, (u[1] + v[1]) % 2, (u[2] + v[2]) % 2)

    return els, mul, [(0, 1, 0), (0, 0, 1), (1, 0, 0)]


def c2sq_by_c4():
    # (C2 x C2) : C4, generator of C4 swapping the two factors
    els = [(a, b, k) for a in range(2) for b in range(2) for k in range(4)]

    def act(v, k):
        return v if k % 2 == 0 else (v[1], v[0])

    def mul(u, v):
        w = act((v[0], v[1]), u[2])
        return ((u[0] + w[0]) % 2, (u[1] + w[1]) % 2, (u[2] + v[2]) % 4)

    return els, mul, [(1, 0, 0), (0, 0, 1)]


def heisenberg(p):
    els = [(a, b, c) for a in range(p) for b in range(p) for c in range(p)]

    def mul(u, v):
        return ((u[0] + v[0]) % p, (u[1] + v[1]) % p, (u[2] + v[2] + u[0] * v[1]) % p)

    return els, mul, [(1, 0, 0), (0, 1, 0)]


def cyc(n):
    return metacyclic(n, 1, 1, 0)


def from_construction(c):
    els, mul, gens = c
    return regular(els, mul, gens)


def nat(*cycle_lists, degree=None):
    return [permutation_from_cycles(cs, degree) for cs in cycle_lists]


def disjoint_cyclic(*orders):
    """Generators of C_n1 x C_n2 x ... as disjoint cycles."""
    gens, start = [], 1
    for n in orders:
        gens.append([tuple(range(start, start + n))] if n > 1 else [(start,)])
        start += n
    deg = start - 1
    return [permutation_from_cycles(c, deg) for c in gens]


def stats(G):
    return dict(sorted(Counter(int(o) for o in G.element_orders).items()))


# name -> (generators, expected element-order statistics, expected centre order, tags)
ABELIAN = {}
for n in range(1, 13):
    ABELIAN[f"C{n}"] = disjoint_cyclic(n)
for name, orders in [
    ("C2^2", (2, 2)), ("C2^3", (2, 2, 2)), ("C2^4", (2, 2, 2, 2)),
    ("C3^2", (3, 3)), ("C3^3", (3, 3, 3)),
    ("C2xC4", (2, 4)), ("C2xC6", (2, 6)), ("C3xC9", (3, 9)),
]:
    ABELIAN[name] = disjoint_cyclic(*orders)

CORE = {
    "S3": (nat([(1, 2)], [(1, 2, 3)]), {1: 1, 2: 3, 3: 2}, 1),
    "D4": (nat([(1, 2, 3, 4)], [(1, 3)]), {1: 1, 2: 5, 4: 2}, 2),
    "Q8": (from_construction(metacyclic(4, 2, 3, 2)), {1: 1, 2: 1, 4: 6}, 2),
    "D6": (nat([(1, 2, 3, 4, 5, 6)], [(2, 6), (3, 5)]), {1: 1, 2: 7, 3: 2, 6: 2}, 2),
    "Dic3": (from_construction(metacyclic(6, 2, 5, 3)), {1: 1, 2: 1, 3: 2, 4: 6, 6: 2}, 2),
    "A4": (nat([(1, 2, 3)], [(2, 3, 4)]), {1: 1, 2: 3, 3: 8}, 1),
    "S4": (nat([(1, 2)], [(1, 2, 3, 4)]), {1: 1, 2: 9, 3: 8, 4: 6}, 1),
}

ORDER16 = {
    "C16": (from_construction(cyc(16)), {1: 1, 2: 1, 4: 2, 8: 4, 16: 8}, 16),
    "C4xC4": (from_construction(metacyclic(4, 4, 1, 0)), {1: 1, 2: 3, 4: 12}, 16),
    "C2^2:C4": (from_construction(c2sq_by_c4()), {1: 1, 2: 7, 4: 8}, 4),
    "C4:C4": (from_construction(metacyclic(4, 4, 3, 0)), {1: 1, 2: 3, 4: 12}, 4),
    "C8xC2": (from_construction(metacyclic(8, 2, 1, 0)), {1: 1, 2: 3, 4: 4, 8: 8}, 16),
    "M16": (from_construction(metacyclic(8, 2, 5, 0)), {1: 1, 2: 3, 4: 4, 8: 8}, 4),
    "D8": (from_construction(metacyclic(8, 2, 7, 0)), {1: 1, 2: 9, 4: 2, 8: 4}, 2),
    "QD16": (from_construction(metacyclic(8, 2, 3, 0)), {1: 1, 2: 5, 4: 6, 8: 4}, 2),
    "Q16": (from_construction(metacyclic(8, 2, 7, 4)), {1: 1, 2: 1, 4: 10, 8: 4}, 2),
    "C4xC2^2": (disjoint_cyclic(4, 2, 2), {1: 1, 2: 7, 4: 8}, 16),
    "C2xD4": (from_construction(direct(metacyclic(4, 2, 3, 0), cyc(2))), {1: 1, 2: 11, 4: 4}, 4),
    "C2xQ8": (from_construction(direct(metacyclic(4, 2, 3, 2), cyc(2))), {1: 1, 2: 3, 4: 12}, 4),
    "C4oD4": (from_construction(pauli()), {1: 1, 2: 7, 4: 8}, 4),
}

ORDER27 = {
    "Heis27": (from_construction(heisenberg(3)), {1: 1, 3: 26}, 3),
    "M27": (from_construction(metacyclic(9, 3, 4, 0)), {1: 1, 3: 8, 9: 18}, 3),
}


def write(fname, header, groups):
    lines = [f"# {line}" if line else "#" for line in header] + [""]
    for name, entry in groups.items():
        gens, expect_stats, expect_centre = entry if isinstance(entry, tuple) else (entry, None, None)
        G = build_group_from_perms(gens, name)
        if expect_stats is not None:
            assert stats(G) == expect_stats, (name, stats(G))
            centre = centralizer(G, range(G.order)).order
            assert centre == expect_centre, (name, centre)
        lines.append(f"group {name}")
        for g in gens:
            lines.append("perm " + cycles_of(g))
        lines.append("end")
        lines.append("")
        print(f"{fname}: {name} order {G.order}")
    (OUT / fname).write_text("\n".join(lines))


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    write("abelian.grp", ["Abelian groups: cyclic C1-C12, elementary abelian, mixed."], ABELIAN)
    write("core.grp", ["Small non-abelian groups.", "D4 has order 8, D6 has order 12."], CORE)
    write("order16.grp", ["Groups of order 16 other than C2^4 (which lives in abelian.grp)."], ORDER16)
    write("order27.grp", ["Extraspecial groups of order 27: exponent 3 (Heis27) and exponent 9 (M27)."], ORDER27)
