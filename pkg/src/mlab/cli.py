"""Command line entry point: ``mlab <command> FILE ...``.

Exit status is 0 on success, 1 when a check reports FAIL, and 2 for usage,
parse and budget errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import __version__
from .catalog import cached, load_catalog
from .errors import MlabError

log = logging.getLogger("mlab")

REPORT_FORMAT = "mlab-report/1"
RESULT_FORMAT = "mlab-result/1"

CHECKS = (
    "sha2_oracle",
    "h2_order",
    "theorem_bogomolov",
    "theorem_holt",
    "stable_isomorphism",
    "res_cor_identity",
    "mackey",
    "lemma_comm",
    "prop_zc",
    "sha_submodule",
    "cor_ng",
)


class UsageError(Exception):
    pass


def _select(defs, name):
    if name is None:
        return defs
    hits = [d for d in defs if d.name == name]
    if not hits:
        raise UsageError(f"no group named {name!r}")
    return hits


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True)


def _invariant_command(args, kind: str) -> int:
    from .bogomolov import sha2
    from .cohomology import schur_h2

    compute = {"schur": lambda G: schur_h2(G).as_list(), "sha2": lambda G: sha2(G).invariants.as_list()}[kind]
    results = []
    for d in _select(load_catalog(args.file), args.group):
        G = d.build()
        inv = cached(G, kind, G.order, lambda: compute(G))
        results.append({"group": d.name, "kind": kind, "order": G.order, "invariants": list(inv)})
    if args.json:
        print(_dump({"format": RESULT_FORMAT, "results": results}))
    else:
        for r in results:
            print(f"{r['group']}: {r['invariants']}")
    return 0


def cmd_multiplier(args) -> int:
    return _invariant_command(args, "schur")


def cmd_bogomolov(args) -> int:
    return _invariant_command(args, "sha2")


def _one_group(args):
    defs = _select(load_catalog(args.file), args.group)
    return defs[0].build()


def cmd_sylow(args) -> int:
    from .groups import generating_set, nilpotency_class, sylow_subgroup

    G = _one_group(args)
    P = sylow_subgroup(G, args.p)
    print(f"{G.name} p={args.p}: order {P.order}, class {nilpotency_class(P)}, generators {list(generating_set(P))}")
    return 0


def cmd_normalizer(args) -> int:
    from .groups import generating_set, normalizer, sylow_subgroup

    G = _one_group(args)
    N = normalizer(G, sylow_subgroup(G, args.p))
    print(f"{G.name} p={args.p}: N_G(P) order {N.order}, generators {list(generating_set(N))}")
    return 0


def cmd_class(args) -> int:
    from .groups import nilpotency_class, sylow_subgroup

    G = _one_group(args)
    H = G.whole() if args.p is None else sylow_subgroup(G, args.p)
    c = nilpotency_class(H)
    what = G.name if args.p is None else f"{G.name} Sylow {args.p}"
    print(f"{what}: {'not nilpotent' if c is None else f'class {c}'}")
    return 0


def _emit_reports(reports, args, config) -> int:
    from .verifier import FAIL, summarize

    summary = summarize(reports)
    if args.json:
        doc = {
            "format": REPORT_FORMAT,
            "engine": __version__,
            "config": config,
            "reports": [r.to_json() for r in reports],
            "summary": summary,
        }
        text = _dump(doc)
        if getattr(args, "output", None):
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
        else:
            print(text)
    else:
        for r in reports:
            params = " ".join(f"{k}={_short(v)}" for k, v in sorted(r.params.items()))
            print(f"{r.status:<15} {r.group:<10} {r.check:<19} {params}".rstrip())
        print("summary: " + " ".join(f"{k}={v}" for k, v in summary.items()))
    return 1 if summary[FAIL] else 0


def _short(v) -> str:
    if isinstance(v, dict) and "order" in v:
        return f"<order {v['order']}>"
    return str(v)


def cmd_verify(args) -> int:
    from .verifier import SuiteConfig, plan, run_job

    config = SuiteConfig(max_order=args.max_order, explore=args.explore)
    reports = []
    for d in _select(load_catalog(args.file), args.group):
        G = d.build()
        for job in plan(G, config):
            if job[0] == "skip":
                reports.append(run_job(G, job, config))
                continue
            if job[0] != args.check:
                continue
            if args.p is not None and job[0] in ("theorem_bogomolov", "theorem_holt", "stable_isomorphism") and job[1][0] != args.p:
                continue
            reports.append(run_job(G, job, config))
    return _emit_reports(reports, args, {"check": args.check, "p": args.p, "max_order": args.max_order,
                                         "explore": args.explore})


def cmd_suite(args) -> int:
    from dataclasses import asdict

    from .verifier import SuiteConfig, run_suite

    config = SuiteConfig(max_order=args.max_order, explore=args.explore, jobs=args.jobs)
    reports = run_suite(load_catalog(args.file), config)
    cfg = asdict(config)
    cfg.pop("jobs")  # does not affect the results
    return _emit_reports(reports, args, cfg)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mlab", description="Schur and Bogomolov multipliers of finite groups.")
    ap.add_argument("--version", action="version", version=f"mlab {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, need_group=False):
        p.add_argument("file", help="group file or directory of *.grp files")
        p.add_argument("--group", required=need_group, help="restrict to one named group")

    for name, fn, help_ in (
        ("multiplier", cmd_multiplier, "invariants of H^2(G, Q/Z)"),
        ("bogomolov", cmd_bogomolov, "invariants of the Bogomolov multiplier"),
    ):
        p = sub.add_parser(name, help=help_)
        common(p)
        p.add_argument("--json", action="store_true")
        p.set_defaults(func=fn)

    for name, fn in (("sylow", cmd_sylow), ("normalizer", cmd_normalizer)):
        p = sub.add_parser(name, help=f"{name} of a Sylow p-subgroup")
        common(p, need_group=True)
        p.add_argument("-p", type=int, required=True)
        p.set_defaults(func=fn)

    p = sub.add_parser("class", help="nilpotency class of G or of a Sylow p-subgroup")
    common(p, need_group=True)
    p.add_argument("-p", type=int)
    p.set_defaults(func=cmd_class)

    p = sub.add_parser("verify", help="run one check family")
    common(p)
    p.add_argument("--check", required=True, choices=CHECKS)
    p.add_argument("-p", type=int, help="prime (theorem and stable-element checks)")
    p.add_argument("--max-order", type=int, default=64)
    p.add_argument("--explore", action="store_true", help="also compare theorem sides outside the hypotheses")
    p.add_argument("--json", action="store_true")
    p.add_argument("--output", help="write the JSON report here")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("suite", help="run every check on every group")
    p.add_argument("file")
    p.add_argument("--max-order", type=int, default=64)
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--explore", action="store_true", help="also compare theorem sides outside the hypotheses")
    p.add_argument("--json", action="store_true")
    p.add_argument("--output", help="write the JSON report here")
    p.set_defaults(func=cmd_suite)
    return ap


def cli_main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors with status 2
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, MlabError, OSError) as exc:
        print(f"mlab: error: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
