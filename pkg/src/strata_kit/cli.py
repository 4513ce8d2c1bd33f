"""Command-line interface.

Every subcommand reads one JSON document (stdin or --in FILE) and writes
one JSON document to stdout with sorted keys, so output is reproducible
byte for byte.  Exit codes: 0 success, 1 malformed input, 2 domain error,
3 precision exhausted.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .errors import DomainError, PrecisionError, SchemaError
from .minimal import check_factorization, howe_factorize, is_generic, is_minimal
from .strata import (FiltDepth, GroupPresentation, compare_presentations,
                     index_card, presentation_secherre, presentation_yu)
from .translate import (factchar_indices, roundtrip_check, secherre_to_yu,
                        yu_to_secherre)
from .tower import sr, tower_subfield, embeddings as field_embeddings, splitting_field
from . import fuzz as fuzzmod
from . import serialize as ser

SCHEMA_DOC = {
    "schema": ser.SCHEMA,
    "tower": {"base_q": "int (prime power)",
              "levels": [{"f": "int", "e": "int", "twist": "[int, ...]"}]},
    "element": {"field": "int (tower level index, 0 = base)",
                "digits": [["valuation", "[coords]"]],
                "prec": "int | null (null = exact)"},
    "stratum": {"tower": "...", "order": {"m": "int", "d": "int",
                                          "e_A": "int", "b_maximal": "bool"},
                "n": "int", "r": "int", "beta": "element"},
    "datum": {"tower": "...", "tower_degrees": "[int]", "depths": "['a/b']",
              "chunks": "[element | null]", "d": "int", "e_A": "int",
              "N": "int", "trivial_top": "bool", "depth_zero": "bool"},
    "rationals": "strings 'a/b'",
    "depths": {"value": "a/b", "plus": "bool"},
}


def _read_doc(args):
    try:
        if args.infile:
            with open(args.infile, "r", encoding="utf-8") as fh:
                return json.load(fh)
        return json.load(sys.stdin)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON input: {exc}") from exc
    except OSError as exc:
        raise SchemaError(f"cannot read input: {exc}") from exc


def _element_ctx(doc, prec):
    if not isinstance(doc, dict) or "tower" not in doc or "element" not in doc:
        raise SchemaError("document needs tower and element")
    E = ser.tower_from_json(doc["tower"])
    x = ser.element_from_json(doc["element"], E, default_prec=prec)
    return E, x


def _emit(obj):
    sys.stdout.write(ser.dumps(obj) + "\n")


def cmd_expand(args):
    E, x = _element_ctx(_read_doc(args), args.prec)
    out = {"schema": ser.SCHEMA, "element": ser.element_to_json(x, E)}
    if x.digits:
        out["val"] = x.val()
        out["ord"] = ser.rational_str(x.ord())
    _emit(out)


def cmd_sr(args):
    E, x = _element_ctx(_read_doc(args), args.prec)
    rep = sr(x)
    gap = x - rep
    out = {"schema": ser.SCHEMA, "sr": ser.element_to_json(rep, E)}
    out["ord_gap"] = ser.rational_str(gap.ord()) if gap.digits else None
    _emit(out)


def cmd_minimal(args):
    E, x = _element_ctx(_read_doc(args), args.prec)
    rep = is_minimal(x, E.base())
    out = {"schema": ser.SCHEMA,
           "criteria": list(rep.verdicts),
           "in_base": rep.in_base,
           "minimal": rep.minimal}
    if args.dump:
        out["witnesses"] = {k: str(v) for k, v in rep.witnesses.items()}
    _emit(out)


def cmd_factorize(args):
    E, x = _element_ctx(_read_doc(args), args.prec)
    fac = howe_factorize(x, E.base())
    rep = check_factorization(fac)
    out = {"schema": ser.SCHEMA,
           "chunks": [ser.element_to_json(c, E) for c in fac.chunks],
           "fields": [list(K.signature()) for K in fac.fields],
           "jumps": [ser.rational_str(r) for r in fac.depth_jumps()],
           "degenerate": fac.degenerate,
           "certified": rep.ok}
    _emit(out)


def cmd_embeddings(args):
    doc = _read_doc(args)
    if not isinstance(doc, dict) or "tower" not in doc:
        raise SchemaError("document needs tower")
    E = ser.tower_from_json(doc["tower"])
    L = splitting_field(E)
    out = {"schema": ser.SCHEMA,
           "splitting": ser.tower_to_json(L),
           "count": len(field_embeddings(E)),
           "embeddings": [s.to_json() for s in field_embeddings(E)]}
    _emit(out)


def cmd_generic(args):
    doc = _read_doc(args)
    E, x = _element_ctx(doc, args.prec)
    levels = ser._levels_of(E)
    try:
        big = levels[args.big if args.big is not None else len(levels) - 1]
        small = levels[args.small]
    except IndexError:
        raise SchemaError("level index out of range")
    rep = is_generic(x, (tower_subfield(big, E), tower_subfield(small, E)))
    out = {"schema": ser.SCHEMA,
           "ge1": rep.ge1,
           "generic": rep.verdict,
           "depth": ser.rational_str(rep.depth),
           "minimal": rep.minimal_consensus,
           "generates": rep.generates,
           "equivalence_holds": rep.equivalence_holds()}
    _emit(out)


def cmd_stratum2yu(args):
    st = ser.stratum_from_json(_read_doc(args), default_prec=args.prec)
    yu = secherre_to_yu(st)
    _emit(ser.yu_to_json(yu))


def cmd_yu2stratum(args):
    yu = ser.yu_from_json(_read_doc(args), default_prec=args.prec)
    st = yu_to_secherre(yu)
    _emit(ser.stratum_to_json(st))


def cmd_groups(args):
    st = ser.stratum_from_json(_read_doc(args), default_prec=args.prec)
    h1, j, jhat = presentation_secherre(st)
    yu = secherre_to_yu(st, check=False)
    kp, kc, kk = presentation_yu(yu)
    out = {"schema": ser.SCHEMA, "pairs": {}}
    for a, b in ((h1, kp), (j, kc), (jhat, kk)):
        same, diff = compare_presentations(a, b)
        out["pairs"][f"{a.label}/{b.label}"] = {
            "equal": same, "normal_form": a.to_json(),
            **({"diff": diff} if diff else {})}
    _emit(out)


def cmd_indices(args):
    st = ser.stratum_from_json(_read_doc(args), default_prec=args.prec)
    h1, j, jhat = presentation_secherre(st)
    j1 = GroupPresentation(
        "J1", j.tower_degrees, j.e_A, j.N,
        [(0, "MP", FiltDepth(j.normal_form[0][1].value, True))]
        + [(l, "MP", d) for l, d in j.normal_form if l >= 1])
    tab = factchar_indices(st, t=args.t)
    out = {"schema": ser.SCHEMA,
           "J1_H1_q_exponent": index_card(j1, h1),
           "factchar": [{"chunk": i, "v_A": vA, "t_i": ti}
                        for i, vA, ti in tab.rows]}
    _emit(out)


def cmd_fuzz(args):
    rng = fuzzmod.rng_from_seed(args.seed)
    docs = []
    for i in range(args.count):
        if i % 10 == 9:
            st = fuzzmod.random_depth_zero(rng)
        else:
            st = fuzzmod.random_stratum(rng)
        docs.append(ser.stratum_to_json(st))
    _emit({"schema": ser.SCHEMA, "seed": args.seed, "strata": docs})


def _suite_cases(args):
    rng = fuzzmod.rng_from_seed(args.seed)
    for i in range(args.count):
        if i % 10 == 9:
            yield fuzzmod.random_depth_zero(rng)
        else:
            yield fuzzmod.random_stratum(rng)


def cmd_verify(args):
    failures = []
    cases = 0
    if args.suite in ("sr", "minimal"):
        rng = fuzzmod.rng_from_seed(args.seed)
        for _ in range(args.count):
            E = fuzzmod.random_tower(rng)
            x = fuzzmod.random_element(rng, E)
            cases += 1
            try:
                if args.suite == "sr":
                    rep = sr(x)
                    if not (rep.ord() == x.ord()):
                        failures.append("sr ord mismatch")
                else:
                    m = is_minimal(x, E.base())
                    if not m.agree():
                        failures.append("criteria disagree")
            except PrecisionError:
                continue
    elif args.suite == "factorize":
        for st in _suite_cases(args):
            cases += 1
            rep = check_factorization(st.fac)
            if not rep.ok:
                failures.append(rep.clause)
    elif args.suite == "presentations":
        for st in _suite_cases(args):
            cases += 1
            try:
                yu = secherre_to_yu(st)
            except DomainError as exc:
                failures.append(str(exc))
    elif args.suite == "roundtrip":
        for st in _suite_cases(args):
            cases += 1
            rep = roundtrip_check(st)
            if not rep.ok:
                failures.append(str(rep.checks))
    elif args.suite in ("filtration", "oracle"):
        from . import oracle
        from .oracle import chain_from_field, regular_rep, v_A_direct
        from .strata import v_order
        for st in _suite_cases(args):
            E = st.order.pure_over
            if E.degree > 4:
                continue
            cases += 1
            ch = chain_from_field(E)
            got = v_A_direct(regular_rep(st.beta), ch)
            want = v_order(st.beta, st.order)
            if got != want:
                failures.append(f"v_A {got} != {want}")
    else:
        raise SchemaError(f"unknown suite {args.suite!r}")
    _emit({"schema": ser.SCHEMA, "suite": args.suite, "cases": cases,
           "failures": failures[:10], "failure_count": len(failures)})
    if failures:
        raise DomainError(f"suite {args.suite} failed {len(failures)} cases")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="strata-kit",
        description="Exact tame local-field and stratum calculus over GF(q)((t)).")
    parser.add_argument("--prec", type=int,
                        default=int(os.environ.get("STRATA_KIT_PREC", "64")),
                        help="default precision for elements without one")
    parser.add_argument("--schema", action="store_true",
                        help="print the JSON schema sketch and exit")
    sub = parser.add_subparsers(dest="cmd")
    handlers = {}

    def add(name, fn, **extra):
        sp = sub.add_parser(name)
        sp.add_argument("--in", dest="infile", default=None,
                        help="input file (default: stdin)")
        sp.add_argument("--dump", action="store_true",
                        help="include debug detail in output")
        for argname, kw in extra.items():
            sp.add_argument(argname, **kw)
        handlers[name] = fn
        return sp

    add("expand", cmd_expand)
    add("sr", cmd_sr)
    add("minimal", cmd_minimal)
    add("factorize", cmd_factorize)
    add("embeddings", cmd_embeddings)
    add("generic", cmd_generic,
        **{"--big": dict(type=int, default=None,
                         help="tower level index of the larger field"),
           "--small": dict(type=int, default=0,
                           help="tower level index of the smaller field")})
    add("stratum2yu", cmd_stratum2yu)
    add("yu2stratum", cmd_yu2stratum)
    add("groups", cmd_groups)
    add("indices", cmd_indices, **{"--t": dict(type=int, default=0)})
    add("fuzz", cmd_fuzz,
        **{"--seed": dict(type=int, default=0),
           "--count": dict(type=int, default=10)})
    add("verify", cmd_verify,
        **{"--suite": dict(required=True,
                           choices=["sr", "minimal", "factorize", "filtration",
                                    "presentations", "roundtrip", "oracle"]),
           "--seed": dict(type=int, default=0),
           "--count": dict(type=int, default=50)})
    return parser, handlers


def main(argv=None) -> int:
    parser, handlers = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.schema:
            _emit(SCHEMA_DOC)
            return 0
        if not args.cmd:
            parser.print_help()
            return 0
        handlers[args.cmd](args)
        return 0
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 1
    except PrecisionError as exc:
        print(f"precision exhausted: {exc}", file=sys.stderr)
        return 3
    except DomainError as exc:
        clause = f" [{exc.clause}]" if getattr(exc, "clause", None) else ""
        print(f"domain error{clause}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
