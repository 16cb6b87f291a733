"""Executable checks of local-control and stable-element statements.

Every check returns a :class:`CheckReport`.  A FAIL always carries a witness;
NOT_APPLICABLE records the hypothesis that did not hold, so it can be
re-checked from the report alone.  Groups above the relevant budget are
reported as SKIPPED_BUDGET rather than computed.

Subgroups are described by their order and a generating set of element
indices into the catalog group's table, which is deterministic.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from itertools import product

import numpy as np

from .bogomolov import module_action, module_commutator, sha2, sha2_via_all_abelian, sha2_with_action
from .cohomology import (
    cocycle_space,
    cohomology_cap,
    conjugation_map,
    corestriction_map,
    h2_zmod,
    restriction_map,
    schur_h2,
    stable_elements,
)
from .groups import (
    GroupTable,
    Subgroup,
    abelianization_order,
    all_subgroups,
    as_subgroup,
    bicyclic_subgroups,
    commutator_subgroup,
    conjugate,
    double_coset_reps,
    generating_set,
    intersection,
    is_abelian,
    is_normal,
    is_prime_power_of,
    iterated_commutator,
    join,
    lower_central_series,
    nilpotency_class,
    normal_subgroups,
    normalizer,
    prime_divisors,
    sylow_subgroup,
)
from .errors import NotNormal
from .linalg import SubmoduleModE, preimage, quotient_invariants

log = logging.getLogger(__name__)

PASS = "PASS"
FAIL = "FAIL"
NOT_APPLICABLE = "NOT_APPLICABLE"
SKIPPED_BUDGET = "SKIPPED_BUDGET"
STATUSES = (PASS, FAIL, NOT_APPLICABLE, SKIPPED_BUDGET)


@dataclass
class CheckReport:
    check: str
    group: str
    params: dict
    status: str
    witness: dict = field(default_factory=dict)
    invariants: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")
        if self.status == FAIL and not self.witness:
            raise ValueError("a FAIL report needs a witness")

    def to_json(self) -> dict:
        return asdict(self)

    @property
    def key(self) -> tuple:
        return (self.group, self.check, _freeze(self.params))


def _freeze(x):
    if isinstance(x, dict):
        return tuple(sorted((k, _freeze(v)) for k, v in x.items()))
    if isinstance(x, (list, tuple)):
        return tuple(_freeze(v) for v in x)
    return x


def describe(H: Subgroup) -> dict:
    return {"order": H.order, "generators": list(generating_set(H))}


def _name(G: GroupTable) -> str:
    return G.name or f"group of order {G.order}"


def _inv(x) -> list[int]:
    return x.as_list()


def _skip(check, G, params, limit) -> CheckReport:
    return CheckReport(check, _name(G), params, SKIPPED_BUDGET, {"order": G.order, "limit": limit})


def _over_cap(G) -> bool:
    return G.order > cohomology_cap()


def _p_invariants(space, S: SubmoduleModE, p: int) -> list[int]:
    return _inv(space.classes(space.p_part(S, p)))


# ---------------------------------------------------------------------------
# local control theorems


def _local_control(check, G, p, admissible, hypothesis, compute, explore=False) -> CheckReport:
    params = {"p": int(p)}
    if _over_cap(G):
        return _skip(check, G, params, cohomology_cap())
    P = sylow_subgroup(G, p)
    c = nilpotency_class(P)
    if not admissible(c, p):
        wit = {"hypothesis": hypothesis, "sylow_order": P.order, "class": c}
        if explore:  # data only: outside the hypothesis nothing is claimed
            N = normalizer(G, P)
            lhs, rhs = compute(G.whole(), p), compute(N, p)
            wit["outside_hypothesis"] = {"G": lhs, "N_G(P)": rhs, "equal": lhs == rhs}
        return CheckReport(check, _name(G), params, NOT_APPLICABLE, wit)
    N = normalizer(G, P)
    lhs, rhs = compute(G.whole(), p), compute(N, p)
    inv = {"G": lhs, "N_G(P)": rhs}
    wit = {"sylow_order": P.order, "class": c, "normalizer_order": N.order}
    if lhs == rhs:
        return CheckReport(check, _name(G), params, PASS, wit, inv)
    wit["mismatch"] = {"G": lhs, "N_G(P)": rhs}
    return CheckReport(check, _name(G), params, FAIL, wit, inv)


def _sha_p(H: Subgroup, p: int) -> list[int]:
    return sha2(H).invariants.p_part(p).as_list()


def _schur_p(H: Subgroup, p: int) -> list[int]:
    return schur_h2(H.table).p_part(p).as_list()


def check_theorem_bogomolov(G: GroupTable, p: int, explore: bool = False) -> CheckReport:
    """p-parts of Sha^2(G) and Sha^2(N_G(P)) agree when class(P) <= p.

    With ``explore`` the comparison is also made outside the hypothesis and
    stored in the NOT_APPLICABLE witness.
    """
    return _local_control("theorem_bogomolov", G, p, lambda c, q: c <= q, "class(P) <= p", _sha_p, explore)


def check_theorem_holt(G: GroupTable, p: int, explore: bool = False) -> CheckReport:
    """p-parts of H^2(G) and H^2(N_G(P)) agree when 2 class(P) <= p."""
    return _local_control("theorem_holt", G, p, lambda c, q: 2 * c <= q, "2 class(P) <= p", _schur_p, explore)


# ---------------------------------------------------------------------------
# commutator calculus


def _gamma(B: Subgroup, n: int) -> Subgroup:
    series = lower_central_series(B)
    return series[min(n - 1, len(series) - 1)]


def _product(G: GroupTable, subgroups) -> Subgroup:
    out = G.trivial()
    for H in subgroups:
        out = join(G, out, H)
    return out


def lemma_comm_parts(G: GroupTable, A: Subgroup, B: Subgroup, n: int) -> dict:
    """Both inclusions, plus the variant whose factor indices sum to n - 1."""
    AA = commutator_subgroup(G, A, A)
    lhs1 = iterated_commutator(G, AA, B, n)
    chain = [iterated_commutator(G, A, B, i) for i in range(n + 1)]
    rhs1 = _product(G, (commutator_subgroup(G, chain[i], chain[n - i]) for i in range(1, n + 1)))
    variant = _product(G, (commutator_subgroup(G, chain[i], chain[n - i - 1]) for i in range(1, n)))
    lhs2 = commutator_subgroup(G, _gamma(B, n), A)
    rhs2 = chain[n]
    return {
        "part1": lhs1.issubset(rhs1),
        "part2": lhs2.issubset(rhs2),
        "variant_sum_n_minus_1": lhs1.issubset(variant),
        "orders": {"[A,A,nB]": lhs1.order, "product": rhs1.order, "[gamma_n(B),A]": lhs2.order, "[A,nB]": rhs2.order},
    }


def check_lemma_comm(G: GroupTable, A: Subgroup, B: Subgroup, n: int) -> CheckReport:
    params = {"A": describe(A), "B": describe(B), "n": int(n)}
    if n < 1:
        raise ValueError("n must be at least 1")
    for X in (A, B):
        if not is_normal(G, X):
            raise NotNormal("both subgroups must be normal")
    parts = lemma_comm_parts(G, A, B, n)
    ok = parts["part1"] and parts["part2"]
    return CheckReport("lemma_comm", _name(G), params, PASS if ok else FAIL, parts)


# ---------------------------------------------------------------------------
# stable elements, restriction and corestriction


def check_stable_isomorphism(G: GroupTable, H: Subgroup, p: int, kind: str = "schur") -> CheckReport:
    """res maps the p-part for G isomorphically onto the stable p-part for H."""
    if kind not in ("schur", "sha"):
        raise ValueError("kind must be 'schur' or 'sha'")
    params = {"H": describe(H), "p": int(p), "kind": kind}
    if _over_cap(G):
        return _skip("stable_isomorphism", G, params, cohomology_cap())
    index = G.order // H.order
    if index % p == 0:
        return CheckReport("stable_isomorphism", _name(G), params, NOT_APPLICABLE,
                           {"hypothesis": "p does not divide |G:H|", "index": index})
    e = G.order
    WG, WH = cocycle_space(G, e), cocycle_space(H, e)
    if kind == "schur":
        SG, SH = WG.Z2, WH.Z2
    else:
        SG, SH = sha2(G, e).representatives, sha2(H, e).representatives
    PG, PH = WG.p_part(SG, p), WH.p_part(SH, p)
    res = restriction_map(G, H, e)
    image = res.image(PG) + WH.B
    kernel = preimage(PG, res.compact, WH.B)
    stable = stable_elements(G, H, e, PH)
    inv = {
        "G": _inv(WG.classes(PG)),
        "H": _inv(WH.classes(PH)),
        "stable": _inv(WH.classes(stable)),
        "image": _inv(WH.classes(image)),
    }
    witness = {
        "injective": kernel.order == WG.B.order,
        "image_in_part": PH.contains_module(image),
        "image_in_stable": stable.contains_module(image),
        "orders_match": WG.classes(PG).order == WH.classes(stable).order,
    }
    ok = all(witness.values())
    return CheckReport("stable_isomorphism", _name(G), params, PASS if ok else FAIL, witness, inv)


def check_res_cor_identity(G: GroupTable, H: Subgroup) -> CheckReport:
    """cor o res acts as multiplication by |G:H| on H^2(G)."""
    params = {"H": describe(H)}
    if _over_cap(G):
        return _skip("res_cor_identity", G, params, cohomology_cap())
    e = G.order
    W = cocycle_space(G, e)
    index = G.order // H.order
    M = (corestriction_map(G, H, e).compact @ restriction_map(G, H, e).compact) % e
    Z = W.Z2.basis()
    D = (Z @ M.T - index * Z) % e
    bad = np.flatnonzero(~W.B.contains_rows(D))
    witness = {"index": index, "classes_checked": int(Z.shape[0])}
    if bad.size:
        witness["violating_cocycle"] = [int(x) for x in Z[bad[0]]]
        return CheckReport("res_cor_identity", _name(G), params, FAIL, witness)
    return CheckReport("res_cor_identity", _name(G), params, PASS, witness, {"H2(G)": _inv(W.classes())})


def mackey_terms(G: GroupTable, H: Subgroup, A: Subgroup, e: int):
    """Compact matrices of res^G_A cor^G_H and of the double-coset sum."""
    lhs = (restriction_map(G, A, e).compact @ corestriction_map(G, H, e).compact) % e
    rhs = np.zeros_like(lhs)
    for s in double_coset_reps(G, H, A):
        Hs = conjugate(G, H, s)
        K = intersection(Hs, A)
        term = (
            corestriction_map(A, K, e).compact
            @ restriction_map(Hs, K, e).compact
            @ conjugation_map(G, H, s, e).compact
        )
        rhs = (rhs + term) % e
    return lhs, rhs


def check_mackey(G: GroupTable, H: Subgroup, A: Subgroup) -> CheckReport:
    """Double coset formula for res^G_A cor^G_H, and its vanishing on Sha^2(H)."""
    params = {"H": describe(H), "A": describe(A)}
    if _over_cap(G):
        return _skip("mackey", G, params, cohomology_cap())
    if not is_abelian(A):
        raise ValueError("A must be abelian")
    e = G.order
    WH, WA = cocycle_space(H, e), cocycle_space(A, e)
    lhs, rhs = mackey_terms(G, H, A, e)
    Z = WH.Z2.basis()
    formula_ok = bool(WA.B.contains_rows((Z @ (lhs - rhs).T) % e).all())
    sha_H = sha2(H, e).representatives.basis()
    vanishes = bool(WA.B.contains_rows((sha_H @ lhs.T) % e).all())
    witness = {
        "double_cosets": len(double_coset_reps(G, H, A)),
        "formula": formula_ok,
        "vanishes_on_sha_H": vanishes,
    }
    return CheckReport("mackey", _name(G), params, PASS if formula_ok and vanishes else FAIL, witness)


# ---------------------------------------------------------------------------
# module structure of Sha^2 of a normal subgroup


def central_depth(G: GroupTable, Q: Subgroup) -> int | None:
    """Least c >= 1 with [Q, _c G] = 1, or None if the series stalls above 1."""
    W = G.whole()
    cur, c = Q, 0
    if Q.is_trivial():
        return 1
    while not cur.is_trivial():
        nxt = commutator_subgroup(G, cur, W)
        c += 1
        if nxt == cur:
            return None
        cur = nxt
    return c


def check_prop_zc(G: GroupTable, Q: Subgroup) -> CheckReport:
    """[Q, _c G] = 1 forces [Sha^2(Q), _(c-1) G] = 0."""
    params = {"Q": describe(Q)}
    if _over_cap(G):
        return _skip("prop_zc", G, params, cohomology_cap())
    if not is_normal(G, Q):
        raise NotNormal("Q is not normal in G")
    c = central_depth(G, Q)
    if c is None:
        return CheckReport("prop_zc", _name(G), params, NOT_APPLICABLE,
                           {"hypothesis": "[Q, c G] = 1 for some c", "stalls_at_order": _stall_order(G, Q)})
    sha, action = sha2_with_action(G, Q)
    inv = {"Sha2(Q)": _inv(sha.invariants)}
    if c == 1:
        return CheckReport("prop_zc", _name(G), params, PASS, {"c": 1, "vacuous": True}, inv)
    M = module_commutator(sha.representatives, action, c - 1)
    inv["commutator"] = _inv(quotient_invariants(M, action.base))
    ok = M.order == action.base.order
    return CheckReport("prop_zc", _name(G), params, PASS if ok else FAIL, {"c": c, "vacuous": False}, inv)


def _stall_order(G, Q) -> int:
    W, cur = G.whole(), Q
    while True:
        nxt = commutator_subgroup(G, cur, W)
        if nxt == cur:
            return cur.order
        cur = nxt


def check_cor_ng(G: GroupTable, Q: Subgroup, p: int) -> CheckReport:
    """[Sha^2(Q), G] = [Sha^2(Q), N_G(P)] for a normal p-subgroup Q when class(P) <= p."""
    params = {"Q": describe(Q), "p": int(p)}
    if _over_cap(G):
        return _skip("cor_ng", G, params, cohomology_cap())
    if not is_prime_power_of(Q.order, p):
        return CheckReport("cor_ng", _name(G), params, NOT_APPLICABLE,
                           {"hypothesis": "Q is a p-group", "order": Q.order})
    P = sylow_subgroup(G, p)
    c = nilpotency_class(P)
    if c > p:
        return CheckReport("cor_ng", _name(G), params, NOT_APPLICABLE,
                           {"hypothesis": "class(P) <= p", "sylow_order": P.order, "class": c})
    N = normalizer(G, P)
    sha, actG = sha2_with_action(G, Q)
    actN = module_action(N, Q)
    MG = module_commutator(sha.representatives, actG, 1)
    MN = module_commutator(sha.representatives, actN, 1)
    inv = {
        "Sha2(Q)": _inv(sha.invariants),
        "[Sha2(Q),G]": _inv(quotient_invariants(MG, actG.base)),
        "[Sha2(Q),N_G(P)]": _inv(quotient_invariants(MN, actN.base)),
    }
    wit = {"G_in_N": MN.contains_module(MG), "N_in_G": MG.contains_module(MN), "normalizer_order": N.order}
    ok = wit["G_in_N"] and wit["N_in_G"]
    return CheckReport("cor_ng", _name(G), params, PASS if ok else FAIL, wit, inv)


def check_sha_submodule(G: GroupTable, Q: Subgroup) -> CheckReport:
    """Each generator of G maps Sha^2(Q) into itself and permutes H^2(Q) classes."""
    params = {"Q": describe(Q)}
    if _over_cap(G):
        return _skip("sha_submodule", G, params, cohomology_cap())
    if not is_normal(G, Q):
        raise NotNormal("Q is not normal in G")
    sha = sha2(Q)
    action = module_action(G, Q)
    moved = action.preserves(sha.representatives)
    WQ = cocycle_space(Q, Q.order)
    full = WQ.Z2 + WQ.B
    # invertible on classes: the image of H^2(Q) is all of H^2(Q)
    not_onto = [i for i in range(len(action.maps)) if action.image(i, full).order != full.order]
    witness = {
        "generators": list(action.generators),
        "moving_generators": [action.generators[i] for i in moved],
        "non_invertible_generators": [action.generators[i] for i in not_onto],
    }
    ok = not moved and not not_onto
    return CheckReport("sha_submodule", _name(G), params, PASS if ok else FAIL, witness,
                       {"Sha2(Q)": _inv(sha.invariants)})


# ---------------------------------------------------------------------------
# bookkeeping checks


def check_sha_oracle(G: GroupTable) -> CheckReport:
    """Bicyclic and all-abelian intersections give the same Sha^2."""
    if _over_cap(G):
        return _skip("sha2_oracle", G, {}, cohomology_cap())
    a, b = sha2(G), sha2_via_all_abelian(G)
    same = a.representatives.same_as(b.representatives)
    inv = {"bicyclic": _inv(a.invariants), "all_abelian": _inv(b.invariants)}
    return CheckReport("sha2_oracle", _name(G), {}, PASS if same else FAIL, {"same_submodule": same}, inv)


def check_h2_order(G: GroupTable) -> CheckReport:
    """|H^2(G, Z/|G|)| = |H^2(G, Q/Z)| |G^ab|."""
    if _over_cap(G):
        return _skip("h2_order", G, {}, cohomology_cap())
    zmod, schur = h2_zmod(G), schur_h2(G)
    ab = abelianization_order(G.whole())
    ok = zmod.order == schur.order * ab
    inv = {"H2(G,Z/e)": _inv(zmod), "H2(G,Q/Z)": _inv(schur)}
    return CheckReport("h2_order", _name(G), {}, PASS if ok else FAIL, {"abelianization_order": ab, "holds": ok}, inv)


# ---------------------------------------------------------------------------
# suite


@dataclass(frozen=True)
class SuiteConfig:
    max_order: int = 64
    oracle_max: int = 24
    stable_max: int = 24
    res_cor_max: int = 24
    mackey_max: int = 16
    lemma_max: int = 64
    module_max: int = 32
    explore: bool = False  # also compare theorem sides outside the hypotheses
    jobs: int = 1


def aggregate(check: str, G: GroupTable, params: dict, reports: list[CheckReport]) -> CheckReport:
    """Fold many instance reports into one; the first FAIL becomes the witness."""
    counts = {s: 0 for s in STATUSES}
    for r in reports:
        counts[r.status] += 1
    witness = {"instances": len(reports), "counts": counts}
    failed = [r for r in reports if r.status == FAIL]
    if failed:
        witness["first_failure"] = {"params": failed[0].params, "witness": failed[0].witness}
        status = FAIL
    elif counts[PASS]:
        status = PASS
    elif counts[SKIPPED_BUDGET]:
        status = SKIPPED_BUDGET
    else:
        status = NOT_APPLICABLE
    return CheckReport(check, _name(G), params, status, witness)


def _lemma_family(G: GroupTable) -> CheckReport:
    normals = normal_subgroups(G)
    depth = max(nilpotency_class(G.whole()) or 1, 1)
    reports = []
    variant_differs = 0
    for A, B in product(normals, normals):
        for n in range(1, depth + 1):
            r = check_lemma_comm(G, A, B, n)
            variant_differs += r.witness["variant_sum_n_minus_1"] != r.witness["part1"]
            reports.append(r)
    out = aggregate("lemma_comm", G, {"max_n": depth}, reports)
    out.witness["variant_differs"] = variant_differs
    return out


def _mackey_family(G: GroupTable, H: Subgroup, bicyclic) -> CheckReport:
    return aggregate("mackey", G, {"H": describe(H)}, [check_mackey(G, H, A) for A in bicyclic])


def plan(G: GroupTable, config: SuiteConfig) -> list[tuple]:
    """Job list for one group: (check name, argument tuple)."""
    n = G.order
    jobs = []
    if n > config.max_order:
        return [("skip", ())]
    cap = cohomology_cap()
    primes = prime_divisors(n)
    if n <= min(config.oracle_max, cap):
        jobs += [("sha2_oracle", ()), ("h2_order", ())]
    for p in primes:
        jobs += [("theorem_bogomolov", (p,)), ("theorem_holt", (p,))]
    if n <= config.stable_max:
        for p in primes:
            for kind in ("schur", "sha"):
                jobs.append(("stable_isomorphism", (p, kind)))
    subs = all_subgroups(G) if n <= max(config.res_cor_max, config.mackey_max) else []
    if n <= config.res_cor_max:
        jobs += [("res_cor_identity", (H.elements,)) for H in subs]
    if n <= config.mackey_max:
        jobs += [("mackey", (H.elements,)) for H in subs]
    if n <= config.lemma_max and nilpotency_class(G.whole()) is not None:
        jobs.append(("lemma_comm", ()))
    if n <= config.module_max:
        for Q in normal_subgroups(G):
            jobs += [("prop_zc", (Q.elements,)), ("sha_submodule", (Q.elements,))]
            qp = prime_divisors(Q.order)
            if len(qp) == 1:
                jobs.append(("cor_ng", (Q.elements, qp[0])))
    return jobs


def run_job(G: GroupTable, job: tuple, config: SuiteConfig) -> CheckReport:
    check, args = job
    sub = (lambda els: Subgroup(G, tuple(els)))
    if check == "skip":
        return _skip("suite", G, {}, config.max_order)
    if check == "sha2_oracle":
        return check_sha_oracle(G)
    if check == "h2_order":
        return check_h2_order(G)
    if check == "theorem_bogomolov":
        return check_theorem_bogomolov(G, *args, explore=config.explore)
    if check == "theorem_holt":
        return check_theorem_holt(G, *args, explore=config.explore)
    if check == "stable_isomorphism":
        p, kind = args
        return check_stable_isomorphism(G, sylow_subgroup(G, p), p, kind)
    if check == "res_cor_identity":
        return check_res_cor_identity(G, sub(args[0]))
    if check == "mackey":
        return _mackey_family(G, sub(args[0]), bicyclic_subgroups(G))
    if check == "lemma_comm":
        return _lemma_family(G)
    if check == "prop_zc":
        return check_prop_zc(G, sub(args[0]))
    if check == "sha_submodule":
        return check_sha_submodule(G, sub(args[0]))
    if check == "cor_ng":
        return check_cor_ng(G, sub(args[0]), args[1])
    raise ValueError(f"unknown check {check!r}")


def _run_group(item) -> list[CheckReport]:
    G, config = item
    out = []
    for job in plan(G, config):
        log.debug("%s: %s %s", G.name, *job)
        out.append(run_job(G, job, config))
    return out


def run_suite(catalog, config: SuiteConfig | None = None) -> list[CheckReport]:
    """Run every applicable check on every group, in catalog order."""
    config = config or SuiteConfig()
    groups = [g if isinstance(g, GroupTable) else g.build() for g in catalog]
    items = [(G, config) for G in groups]
    if config.jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as ex:
            chunks = list(ex.map(_run_group, items))
    else:
        chunks = [_run_group(it) for it in items]
    return [r for chunk in chunks for r in chunk]


def summarize(reports: list[CheckReport]) -> dict:
    counts = {s: 0 for s in STATUSES}
    for r in reports:
        counts[r.status] += 1
    return {"total": len(reports), **counts}


__all__ = [
    "CheckReport",
    "FAIL",
    "NOT_APPLICABLE",
    "PASS",
    "SKIPPED_BUDGET",
    "STATUSES",
    "SuiteConfig",
    "aggregate",
    "central_depth",
    "check_cor_ng",
    "check_h2_order",
    "check_lemma_comm",
    "check_mackey",
    "check_prop_zc",
    "check_res_cor_identity",
    "check_sha_oracle",
    "check_sha_submodule",
    "check_stable_isomorphism",
    "check_theorem_bogomolov",
    "check_theorem_holt",
    "describe",
    "lemma_comm_parts",
    "mackey_terms",
    "plan",
    "run_job",
    "run_suite",
    "summarize",
]
