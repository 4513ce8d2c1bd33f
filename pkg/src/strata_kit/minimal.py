"""Minimality tests, genericity tests, and chunk factorization.

Minimality of an element c over a base subfield is decided by three
independent code paths that must agree:

1. classical: gcd(v(c), e) = 1 together with the unit part of c^e
   generating the residue extension;
2. the leading-term representative already generates: base[sr(c)] = base[c];
3. every pair of distinct embeddings of base[c] over the base separates c
   at the critical valuation: ord(sigma(c) - sigma'(c)) = ord(c).

The factorization routine splits the canonical digit expansion of beta
into chunks at exactly the digits that enlarge the generated subfield;
each chunk is then minimal over the next smaller field by construction,
and an independent certifier re-verifies every invariant.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .errors import DomainError, PrecisionError
from .tower import (INF, Subfield, TameElement, TameField, apply_embedding,
                    coerce, sr, subfield_generated, tower_subfield)


def as_subfield(base, ambient: TameField) -> Subfield:
    """Normalize a base given as a tower field into a Subfield of ambient."""
    if isinstance(base, Subfield):
        if base.ambient is not ambient:
            raise DomainError("base subfield lives in a different ambient field")
        return base
    if isinstance(base, TameField):
        return tower_subfield(base, ambient)
    raise DomainError(f"unsupported base type {type(base).__name__}")


# ---------------------------------------------------------------------------
# minimality
# ---------------------------------------------------------------------------

@dataclass
class MinimalityReport:
    """Outcome of the three independent minimality criteria."""
    element: TameElement
    base: Subfield
    in_base: bool
    crit1_classical: bool
    crit2_sr_generates: bool
    crit3_embedding_ord: bool
    witnesses: dict = field(default_factory=dict)

    @property
    def verdicts(self):
        return (self.crit1_classical, self.crit2_sr_generates, self.crit3_embedding_ord)

    @property
    def minimal(self) -> bool:
        if len(set(self.verdicts)) != 1:
            raise DomainError(
                f"minimality criteria disagree: {self.verdicts}; "
                "this is an internal consistency error",
                clause="criteria_disagree")
        return self.crit1_classical

    def agree(self) -> bool:
        return len(set(self.verdicts)) == 1


def is_minimal(c: TameElement, base) -> MinimalityReport:
    """Evaluate all three minimality criteria of c relative to base[c]/base."""
    if not c.digits:
        raise (DomainError("minimality of zero is undefined") if c.prec is INF
               else PrecisionError("element is zero to precision"))
    ambient = c.owner
    base_sub = as_subfield(base, ambient)
    Ec = subfield_generated(base_sub.generators + [c], ambient)
    in_base = Ec.degree == base_sub.degree
    witnesses = {}

    # --- criterion 1: classical numerical test -----------------------------
    if Ec.e_over_base % base_sub.e_over_base != 0:
        raise DomainError("inconsistent ramification between base and base[c]")
    e_rel = Ec.e_over_base // base_sub.e_over_base
    v_frac = c.ord() * Ec.e_over_base
    if v_frac.denominator != 1:
        raise DomainError("valuation of c is not integral in base[c] (inconsistency)")
    v = int(v_frac)
    unit_part = (c ** e_rel) * (base_sub.uniformizer().inverse() ** v)
    if not unit_part.digits:
        raise PrecisionError("unit part of c^e is zero to precision")
    lead_v, r0 = unit_part.leading()
    if lead_v != 0:
        raise DomainError("unit part of c^e does not have valuation 0 (inconsistency)")
    f_rel = Ec.f_over_base // base_sub.f_over_base
    crit1 = (gcd(v, e_rel) == 1) and (base_sub.residue_degree_of(r0) == f_rel)
    witnesses["crit1"] = {"v": v, "e_rel": e_rel, "f_rel": f_rel,
                          "residue_degree": base_sub.residue_degree_of(r0)}

    # --- criterion 2: sr generates the same field --------------------------
    Esr = subfield_generated(base_sub.generators + [sr(c)], ambient)
    crit2 = Esr.degree == Ec.degree
    witnesses["crit2"] = {"deg_sr": Esr.degree, "deg_c": Ec.degree}

    # --- criterion 3: embedding differences sit at the critical ord --------
    crit3 = True
    c_ord = c.ord()
    images = [apply_embedding(h, c) for h in Ec.homs]
    n = len(Ec.homs)
    for i in range(n):
        for j in range(i + 1, n):
            if not base_sub.same_restriction(i, j):
                continue
            if Ec.same_restriction(i, j):
                continue
            diff = images[i] - images[j]
            if not diff.digits:
                if diff.prec is not INF:
                    raise PrecisionError("embedding difference is zero to precision")
                d_ord = None
            else:
                d_ord = diff.ord()
            if d_ord != c_ord:
                crit3 = False
                witnesses.setdefault("crit3_violations", []).append(
                    {"pair": (i, j), "ord": None if d_ord is None else str(d_ord),
                     "expected": str(c_ord)})
    return MinimalityReport(c, base_sub, in_base, crit1, crit2, crit3, witnesses)


# ---------------------------------------------------------------------------
# factorization
# ---------------------------------------------------------------------------

@dataclass
class Factorization:
    """Chunk decomposition beta = sum_i c_i with strictly growing fields.

    ``chunks[i]`` is c_i and ``fields[i]`` is E_i; index 0 is the shallowest
    correction (largest field E_0 = base[beta]) and index s the leading
    chunk (smallest field), so ord(c_0) > ... > ord(c_s) = ord(beta).
    """
    beta: TameElement
    base: TameField
    chunks: list
    fields: list
    degenerate: bool = False

    @property
    def s(self) -> int:
        return len(self.chunks) - 1

    def partial_tail(self, i: int) -> TameElement:
        """beta_i = sum_{j >= i} c_j."""
        out = self.chunks[i]
        for j in range(i + 1, len(self.chunks)):
            out = out + self.chunks[j]
        return out

    def field_tower_signature(self):
        return tuple(K.signature() for K in self.fields)

    def depth_jumps(self):
        """The decreasing ord list (ord(c_0), ..., ord(c_s))."""
        return tuple(c.ord() for c in self.chunks)


def howe_factorize(beta: TameElement, base: TameField) -> Factorization:
    """Split the canonical expansion of beta into minimal chunks.

    Scans digits from the most negative valuation upward, tracking the
    subfield generated by the digits seen so far; a chunk boundary occurs
    exactly where a digit strictly enlarges that subfield.  The output is
    certified by :func:`check_factorization` before being returned.
    """
    if not beta.digits:
        raise (DomainError("cannot factor zero") if beta.prec is INF
               else PrecisionError("beta is zero to precision"))
    ambient = beta.owner
    if not base.is_ancestor_of(ambient):
        raise DomainError("base is not an ancestor of beta's field")
    base_sub = tower_subfield(base, ambient)
    K = base_sub
    groups = []          # scan order: deepest chunk first
    cur = []
    for v in sorted(beta.digits):
        m = ambient.monomial(v, beta.digits[v])
        if K.contains(m):
            cur.append(m)
        else:
            if cur:
                groups.append((cur, K))
            K = subfield_generated(K.generators + [m], ambient)
            cur = [m]
    groups.append((cur, K))
    chunks, fields = [], []
    for idx, (monos, kfield) in enumerate(reversed(groups)):
        total = ambient.zero(INF)
        for m in monos:
            total = total + m
        if idx == 0:
            total = total.truncate(beta.prec)
        chunks.append(total)
        fields.append(kfield)
    fac = Factorization(beta, base, chunks, fields,
                        degenerate=(fields[0].degree == base_sub.degree))
    report = check_factorization(fac)
    if not report.ok:
        raise DomainError(f"factorization failed self-certification: {report.clause}",
                          clause=report.clause)
    return fac


@dataclass
class FactorizationReport:
    ok: bool
    clause: str | None = None
    message: str | None = None


def check_factorization(fac: Factorization) -> FactorizationReport:
    """Independently re-verify every factorization invariant.

    Checks, in order: chunk shape, exact digit sum, strict ord decrease,
    chunk membership, strict field growth and generation, per-chunk
    minimality over the next smaller field, identification of the top
    field with base[beta], and valuation/jump consistency.
    """
    def fail(clause, msg):
        return FactorizationReport(False, clause, msg)

    ambient = fac.beta.owner
    base_sub = tower_subfield(fac.base, ambient)
    n = len(fac.chunks)
    if n == 0 or len(fac.fields) != n:
        return fail("empty_chunk", "no chunks, or chunk/field length mismatch")
    for i, c in enumerate(fac.chunks):
        if not c.digits:
            return fail("empty_chunk", f"chunk {i} is zero")

    total = ambient.zero(INF)
    for c in fac.chunks:
        total = total + c
    if not total.equals(fac.beta):
        return fail("sum_mismatch", "sum of chunks differs from beta")

    ords = [c.ord() for c in fac.chunks]
    for i in range(n - 1):
        if not ords[i] > ords[i + 1]:
            return fail("ord_not_decreasing",
                        f"ord(c_{i}) = {ords[i]} !> ord(c_{i+1}) = {ords[i+1]}")

    for i, (c, K) in enumerate(zip(fac.chunks, fac.fields)):
        if not K.contains(c):
            return fail("chunk_not_in_field", f"chunk {i} is not in its declared field")

    for i in range(n - 1):
        big, small = fac.fields[i], fac.fields[i + 1]
        if not set(big.stabilizer) <= set(small.stabilizer):
            return fail("field_not_nested", f"E_{i+1} is not contained in E_{i}")
        if small.degree >= big.degree:
            return fail("field_not_nested", f"E_{i+1} does not strictly grow to E_{i}")
        gen = subfield_generated(small.generators + [fac.chunks[i]], ambient)
        if gen.degree != big.degree:
            return fail("field_not_generated",
                        f"E_{i+1}[c_{i}] has degree {gen.degree} != {big.degree}")

    # the leading chunk sits over the base; last field must contain base
    if not set(fac.fields[-1].stabilizer) <= set(base_sub.stabilizer):
        return fail("field_not_nested", "E_s does not contain the base")
    if n >= 1 and fac.fields[-1].degree > base_sub.degree:
        gen = subfield_generated(base_sub.generators + [fac.chunks[-1]], ambient)
        if gen.degree != fac.fields[-1].degree:
            return fail("field_not_generated", "base[c_s] does not equal E_s")

    for i in range(n):
        next_base = fac.fields[i + 1] if i + 1 < n else base_sub
        rep = is_minimal(fac.chunks[i], next_base)
        if not rep.agree():
            return fail("criteria_disagree", f"minimality criteria disagree on chunk {i}")
        if not rep.minimal:
            return fail("chunk_not_minimal",
                        f"chunk {i} is not minimal over the next smaller field")

    top = subfield_generated(base_sub.generators + [fac.beta], ambient)
    if top.degree != fac.fields[0].degree or \
            set(top.stabilizer) != set(fac.fields[0].stabilizer):
        return fail("top_field_mismatch", "E_0 is not base[beta]")

    for i in range(n):
        beta_i = fac.partial_tail(i)
        beta_next = fac.partial_tail(i + 1) if i + 1 < n else ambient.zero(INF)
        diff = beta_i - beta_next
        if not diff.digits or diff.ord() != ords[i]:
            return fail("jump_mismatch", f"ord(beta_{i} - beta_{i+1}) != ord(c_{i})")
        vE = ords[i] * fac.fields[i].e_over_base
        if vE.denominator != 1:
            return fail("jump_mismatch",
                        f"v of chunk {i} is not integral in its field")
    return FactorizationReport(True)


# ---------------------------------------------------------------------------
# genericity
# ---------------------------------------------------------------------------

@dataclass
class GenericityReport:
    """GE1-style genericity of c for a Levi step E'/E, with cross-checks."""
    element: TameElement
    level_big: Subfield      # E'
    level_small: Subfield    # E
    depth: Fraction          # r = -ord(c)
    ge1: bool
    minimal_consensus: bool
    generates: bool
    pair_table: list

    @property
    def verdict(self) -> bool:
        return self.ge1

    def equivalence_holds(self) -> bool:
        """Genericity must coincide with (minimality AND generation)."""
        return self.ge1 == (self.minimal_consensus and self.generates)


def is_generic(c: TameElement, levels) -> GenericityReport:
    """GE1 test: all embedding pairs agreeing on E but distinct on E' must
    separate c at ord = ord(c); cross-checked against the minimality test."""
    Eprime, Esmall = levels
    ambient = c.owner
    Eprime = as_subfield(Eprime, ambient)
    Esmall = as_subfield(Esmall, ambient)
    if not set(Eprime.stabilizer) <= set(Esmall.stabilizer):
        raise DomainError("levels are not nested (E must sit inside E')")
    if not Eprime.contains(c):
        raise DomainError("element does not lie in the bigger level E'")
    c_ord = c.ord()
    depth = -c_ord
    images = [apply_embedding(h, c) for h in Eprime.homs]
    nh = len(Eprime.homs)
    ge1 = True
    table = []
    for i in range(nh):
        for j in range(i + 1, nh):
            if not Esmall.same_restriction(i, j):
                continue
            if Eprime.same_restriction(i, j):
                continue
            diff = images[i] - images[j]
            if not diff.digits:
                if diff.prec is not INF:
                    raise PrecisionError("embedding difference is zero to precision")
                d_ord = None
            else:
                d_ord = diff.ord()
            table.append({"pair": (i, j),
                          "ord": None if d_ord is None else str(d_ord)})
            if d_ord != c_ord:
                ge1 = False
    rep = is_minimal(c, Esmall)
    Ec = subfield_generated(Esmall.generators + [c], ambient)
    generates = Ec.degree == Eprime.degree
    minimal_consensus = rep.agree() and rep.minimal
    return GenericityReport(c, Eprime, Esmall, depth, ge1,
                            minimal_consensus, generates, table)
