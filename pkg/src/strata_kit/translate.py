"""Bidirectional translation between the two stratum-of-data shapes.

One direction turns a simple stratum (order, n, r, beta) into the tower
datum (nested fields, increasing depths, realizing chunk per step); the
other re-assembles beta from the chunks and rebuilds the stratum.  Both
directions re-verify their postconditions: genericity of every chunk,
equality of the attached group presentations, and on a roundtrip the
agreement of all numerical data with realizers matching up to principal
units.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DomainError
from .minimal import howe_factorize, is_generic
from .strata import (OrderSkeleton, StratumSkeleton, compare_presentations,
                     defining_sequence, make_stratum, presentation_secherre,
                     presentation_yu, standard_order, v_order)
from .tower import TameElement, TameField, tower_subfield, whole_field


@dataclass
class YuSkeleton:
    """Tower-side datum: nested fields E_0 > ... > E_d = F with strictly
    increasing depths and a realizing element per step (None for a
    trivial final step)."""
    ambient: TameField
    tower_degrees: tuple
    depths: list            # Fractions, length d + 1
    chunks: list            # TameElements (ambient), len d + 1, last may be None
    d: int
    e_A: int
    N: int
    trivial_top: bool = False
    depth_zero: bool = False

    def __post_init__(self):
        if len(self.depths) != self.d + 1 or len(self.tower_degrees) != self.d + 1:
            raise DomainError("tower/depth lengths must equal d + 1")
        if self.tower_degrees[-1] != 1:
            raise DomainError("the tower must terminate at the base field")
        body = self.depths[:-1] if self.trivial_top else self.depths
        for a, b in zip(body, body[1:]):
            if not a < b:
                raise DomainError("depths must be strictly increasing")
        if self.trivial_top and self.depths[-1] != self.depths[-2]:
            raise DomainError("a trivial final step must repeat the last depth")

    def to_debug(self):
        return {"degrees": self.tower_degrees, "depths": self.depths,
                "d": self.d, "e_A": self.e_A, "N": self.N,
                "trivial_top": self.trivial_top, "depth_zero": self.depth_zero}


def secherre_to_yu(stratum: StratumSkeleton, check: bool = True) -> YuSkeleton:
    """Stratum -> tower datum.

    The tower is the chunk field chain, extended by the base field when the
    last chunk is not already central; depths are the normalized jumps
    r_{i+1}/e_A capped by n/e_A.  Postconditions (on by default): every
    chunk is generic for its pair of neighbouring fields, and the three
    product presentations agree across the translation.
    """
    stages = defining_sequence(stratum)
    fac = stratum.fac
    order = stratum.order
    e_A, N = order.e_A, order.N
    s = fac.s
    if stratum.n == 0:
        yu = YuSkeleton(stratum.beta.owner, (1,), [Fraction(0)],
                        [stratum.beta], 0, e_A, N, depth_zero=True)
        return yu
    depths = [Fraction(stages[i + 1].r, e_A) for i in range(s)]
    depths.append(Fraction(stratum.n, e_A))
    degrees = [f.degree for f in fac.fields]
    chunks = list(fac.chunks)
    if degrees[-1] == 1:
        d = s
        trivial_top = False
    else:
        d = s + 1
        degrees.append(1)
        depths.append(depths[-1])
        chunks.append(None)
        trivial_top = True
    yu = YuSkeleton(stratum.beta.owner, tuple(degrees), depths, chunks, d,
                    e_A, N, trivial_top=trivial_top)
    if check:
        _check_genericity(stratum, yu)
        _check_presentations(stratum, yu)
    return yu


def _check_genericity(stratum: StratumSkeleton, yu: YuSkeleton):
    """Every realizing chunk must be generic for the pair (its field, the
    next smaller field), at its stated depth."""
    fac = stratum.fac
    ambient = stratum.beta.owner
    for i, c in enumerate(fac.chunks):
        big = fac.fields[i]
        small = (fac.fields[i + 1] if i + 1 < len(fac.fields)
                 else tower_subfield(ambient.base(), ambient))
        if big.degree == 1:
            continue    # central chunk: nothing to certify
        rep = is_generic(c, (big, small))
        if not rep.verdict:
            raise DomainError(f"chunk {i} fails genericity for its field pair",
                              clause="chunk_not_generic")
        if not rep.equivalence_holds():
            raise DomainError(
                "genericity and minimality+generation disagree on a chunk",
                clause="criteria_disagree")


def _check_presentations(stratum: StratumSkeleton, yu: YuSkeleton):
    h1, j, jhat = presentation_secherre(stratum)
    kplus, kcirc, kfull = presentation_yu(yu)
    for a, b in ((h1, kplus), (j, kcirc), (jhat, kfull)):
        same, diff = compare_presentations(a, b)
        if not same:
            raise DomainError(f"presentation mismatch {a.label}/{b.label}: {diff}",
                              clause="presentation_mismatch")


def yu_to_secherre(yu: YuSkeleton, r: int = 0,
                   order: OrderSkeleton | None = None) -> StratumSkeleton:
    """Tower datum -> stratum: beta is the sum of the realizing chunks,
    n = -v_order(beta), and the jump sequence is re-derived and checked
    against the stated depths."""
    real = [c for c in yu.chunks if c is not None]
    if not real:
        raise DomainError("datum carries no realizing chunks")
    E = real[0].owner
    if order is None:
        order = standard_order(E, d=1)
        if order.e_A != yu.e_A:
            order = OrderSkeleton(m=order.m, d=order.d, e_A=yu.e_A,
                                  pure_over=E, b_maximal=order.b_maximal)
    beta = real[0]
    for c in real[1:]:
        beta = beta + c
    if yu.depth_zero:
        return make_stratum(order, beta, r=0)
    st = make_stratum(order, beta, r=r)
    stages = defining_sequence(st)
    derived = [Fraction(stages[i + 1].r, order.e_A) for i in range(len(stages) - 1)]
    derived.append(Fraction(st.n, order.e_A))
    stated = yu.depths[:yu.d] if yu.trivial_top else yu.depths
    stated = list(stated)
    if derived != stated:
        raise DomainError(f"stated depths {stated} disagree with derived {derived}",
                          clause="depth_mismatch")
    return st


@dataclass
class RoundtripReport:
    ok: bool
    checks: dict


def _unit_equivalent(c1: TameElement, c2: TameElement) -> bool:
    """Whether c2 = c1 * (1 + positive-valuation), i.e. ord(c2/c1 - 1) > 0."""
    ratio = c2 / c1
    diff = ratio - ratio.owner.one()
    if not diff.digits:
        return True     # equal within precision
    return diff.ord() > 0


def roundtrip_check(stratum: StratumSkeleton) -> RoundtripReport:
    """stratum -> datum -> stratum, then compare all numerical data and the
    realizers up to principal units."""
    yu = secherre_to_yu(stratum)
    st2 = yu_to_secherre(yu, r=stratum.r)
    checks = {}
    checks["n"] = st2.n == stratum.n
    checks["e_A"] = st2.order.e_A == stratum.order.e_A
    checks["kind"] = st2.kind == stratum.kind
    f1 = [f.degree for f in stratum.fac.fields]
    f2 = [f.degree for f in st2.fac.fields]
    checks["tower"] = f1 == f2
    checks["jumps"] = stratum.fac.depth_jumps() == st2.fac.depth_jumps()
    if checks["tower"] and len(stratum.fac.chunks) == len(st2.fac.chunks):
        checks["realizers"] = all(
            _unit_equivalent(a, b)
            for a, b in zip(stratum.fac.chunks, st2.fac.chunks))
    else:
        checks["realizers"] = False
    return RoundtripReport(all(checks.values()), checks)


@dataclass
class CharacterIndexTable:
    """Per-chunk truncation indices t_i = max(t, floor(-v_A(c_i)/2))."""
    t: int
    rows: list      # (i, v_A(c_i), t_i)


def factchar_indices(stratum: StratumSkeleton, t: int = 0) -> CharacterIndexTable:
    order = stratum.order
    kk = None
    if not stratum.fac.degenerate:
        from .strata import k0
        kk = k0(stratum.beta, order, stratum.fac)
    bound = -kk if kk is not None else stratum.n + 1
    if not (0 <= t < max(bound, 1)):
        raise DomainError(f"truncation level t={t} outside [0, {bound})")
    rows = []
    for i, c in enumerate(stratum.fac.chunks):
        vA = v_order(c, order)
        t_i = max(t, (-vA) // 2)
        rows.append((i, vA, t_i))
    return CharacterIndexTable(t, rows)
