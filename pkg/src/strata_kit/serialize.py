"""Deterministic JSON serialization for towers, elements, and strata.

Every document carries the schema tag and serializes with sorted keys so
that output is byte-identical across runs.  Malformed input raises
SchemaError; semantic violations (bad twist, wrong residue coords, ...)
surface as DomainError from the constructors.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .errors import SchemaError
from .residue import make_field
from .strata import OrderSkeleton, StratumSkeleton, make_stratum
from .tower import INF, TameElement, TameField, base_field, extend

SCHEMA = "strata-kit/v1"


def rational_str(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def rational_from_str(s: str) -> Fraction:
    try:
        num, den = s.split("/")
        return Fraction(int(num), int(den))
    except (ValueError, ZeroDivisionError) as exc:
        raise SchemaError(f"bad rational {s!r}") from exc


def tower_to_json(E: TameField) -> dict:
    levels = []
    node = E
    chain = []
    while node.parent is not None:
        chain.append(node)
        node = node.parent
    for nd in reversed(chain):
        levels.append({"f": nd.f_rel, "e": nd.e_rel,
                       "twist": list(nd.twist.coords)})
    return {"base_q": E.q, "levels": levels}


def tower_from_json(obj) -> TameField:
    if not isinstance(obj, dict) or "base_q" not in obj:
        raise SchemaError("tower document needs base_q")
    try:
        cur = base_field(int(obj["base_q"]))
    except (TypeError, ValueError) as exc:
        raise SchemaError("base_q must be a prime power integer") from exc
    for lvl in obj.get("levels", []):
        if not isinstance(lvl, dict) or "f" not in lvl or "e" not in lvl:
            raise SchemaError("tower level needs f and e")
        f, e = int(lvl["f"]), int(lvl["e"])
        res = make_field(cur.p, cur.base_f * cur.f_over_base * f)
        coords = lvl.get("twist", [1])
        if not isinstance(coords, list):
            raise SchemaError("twist must be a coordinate list")
        coords = list(coords) + [0] * (res.f - len(coords))
        cur = extend(cur, f, e, res.elem(coords[:res.f]))
    return cur


def _levels_of(E: TameField):
    chain = []
    node = E
    while node is not None:
        chain.append(node)
        node = node.parent
    return list(reversed(chain))


def element_to_json(x: TameElement, tower: TameField) -> dict:
    levels = _levels_of(tower)
    try:
        idx = next(i for i, nd in enumerate(levels) if nd is x.owner)
    except StopIteration:
        raise SchemaError("element owner is not a level of the given tower")
    digits = sorted((v, list(a.coords)) for v, a in x.digits.items())
    return {"field": idx,
            "digits": [[v, c] for v, c in digits],
            "prec": None if x.prec is INF else int(x.prec)}


def element_from_json(obj, tower: TameField, default_prec=None) -> TameElement:
    if not isinstance(obj, dict) or "digits" not in obj:
        raise SchemaError("element document needs digits")
    levels = _levels_of(tower)
    idx = obj.get("field", len(levels) - 1)
    if not isinstance(idx, int) or not 0 <= idx < len(levels):
        raise SchemaError(f"field index {idx!r} out of range")
    owner = levels[idx]
    digits = {}
    for pair in obj["digits"]:
        if (not isinstance(pair, list) or len(pair) != 2
                or not isinstance(pair[0], int) or not isinstance(pair[1], list)):
            raise SchemaError("digits must be [valuation, coords] pairs")
        v, coords = pair
        coords = list(coords) + [0] * (owner.residue.f - len(coords))
        digits[v] = owner.residue.elem(coords[:owner.residue.f])
    prec = obj.get("prec")
    if prec is None:
        prec = INF if default_prec is None else default_prec
    return TameElement(owner, digits, prec)


def depth_to_json(depth) -> dict:
    return {"value": rational_str(depth.value), "plus": bool(depth.plus)}


def stratum_to_json(st: StratumSkeleton) -> dict:
    E = st.order.pure_over
    return {"schema": SCHEMA,
            "tower": tower_to_json(E),
            "order": {"m": st.order.m, "d": st.order.d, "e_A": st.order.e_A,
                      "b_maximal": st.order.b_maximal},
            "n": st.n, "r": st.r, "kind": st.kind,
            "beta": element_to_json(st.beta, E)}


def stratum_from_json(obj, default_prec=None) -> StratumSkeleton:
    if not isinstance(obj, dict):
        raise SchemaError("stratum document must be an object")
    if obj.get("schema", SCHEMA) != SCHEMA:
        raise SchemaError(f"unknown schema tag {obj.get('schema')!r}")
    if "tower" not in obj or "beta" not in obj:
        raise SchemaError("stratum document needs tower and beta")
    E = tower_from_json(obj["tower"])
    beta = element_from_json(obj["beta"], E, default_prec)
    ospec = obj.get("order", {})
    order = OrderSkeleton(m=int(ospec.get("m", E.degree)),
                          d=int(ospec.get("d", 1)),
                          e_A=int(ospec.get("e_A", E.e_abs)),
                          pure_over=E,
                          b_maximal=bool(ospec.get("b_maximal", True)))
    return make_stratum(order, beta, r=int(obj.get("r", 0)))


def yu_to_json(yu) -> dict:
    E = yu.ambient
    return {"schema": SCHEMA,
            "tower": tower_to_json(E),
            "tower_degrees": list(yu.tower_degrees),
            "depths": [rational_str(r) for r in yu.depths],
            "chunks": [None if c is None else element_to_json(c, E)
                       for c in yu.chunks],
            "d": yu.d, "e_A": yu.e_A, "N": yu.N,
            "trivial_top": yu.trivial_top,
            "depth_zero": yu.depth_zero}


def yu_from_json(obj, default_prec=None):
    from .translate import YuSkeleton
    if not isinstance(obj, dict):
        raise SchemaError("datum document must be an object")
    if obj.get("schema", SCHEMA) != SCHEMA:
        raise SchemaError(f"unknown schema tag {obj.get('schema')!r}")
    for key in ("tower", "depths", "chunks", "d", "e_A", "N"):
        if key not in obj:
            raise SchemaError(f"datum document needs {key}")
    E = tower_from_json(obj["tower"])
    chunks = [None if c is None else element_from_json(c, E, default_prec)
              for c in obj["chunks"]]
    return YuSkeleton(
        ambient=E,
        tower_degrees=tuple(obj.get("tower_degrees",
                                    [E.degree] * (int(obj["d"])) + [1])),
        depths=[rational_from_str(s) for s in obj["depths"]],
        chunks=chunks,
        d=int(obj["d"]), e_A=int(obj["e_A"]), N=int(obj["N"]),
        trivial_top=bool(obj.get("trivial_top", False)),
        depth_zero=bool(obj.get("depth_zero", False)))


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))
