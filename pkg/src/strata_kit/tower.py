"""Towers of tamely ramified extensions of F = GF(q)((t)).

A tower node carries a relative residue degree ``f_rel``, a relative
ramification index ``e_rel`` prime to p, and a root-of-unity ``twist``
fixing the compatible-uniformizer relation  ``pi_new^e_rel * twist =
pi_parent`` exactly.  Because the base has equal characteristic, every
node is literally a Laurent-series field  k((pi))  over its residue field,
and element arithmetic is plain (finite-precision) Laurent arithmetic;
the tower structure only matters for coercion, embeddings and subfields.

Elements are valuation -> nonzero-digit maps with an explicit precision
bound; precision is propagated pessimistically and equality at working
precision is decided with an explicit error when the window is too small.

Embeddings of a node E into a splitting field L are parameterized by a
Frobenius exponent on the residue field together with the image of the
top uniformizer (a root-of-unity multiple of the uniformizer of L); there
are exactly [E:F] of them and they are enumerated deterministically with
the identity-like embedding first.
"""

from __future__ import annotations

import math
from fractions import Fraction
from math import gcd

from .errors import DomainError, PrecisionError
from . import residue
from .residue import FqElem, FqField, make_field

#: default working precision, in valuation steps of the top field
DEFAULT_PREC = 64

#: minimal number of certain digit positions required beyond the leading
#: digit before two finite-precision values are declared equal
GUARD_DIGITS = 4

INF = math.inf


# ---------------------------------------------------------------------------
# fields
# ---------------------------------------------------------------------------

class TameField:
    """A node in a tower of tamely ramified extensions of GF(q)((t)).

    Immutable after construction; build with :func:`base_field` and
    :func:`extend`.
    """

    __slots__ = ("parent", "p", "base_f", "f_rel", "e_rel", "twist",
                 "residue", "f_over_base", "e_abs", "degree", "acc_twist",
                 "_splitting", "_self_subfield")

    def __init__(self, parent, p, base_f, f_rel, e_rel, twist):
        self.parent = parent
        self.p = p
        self.base_f = base_f          # f0: degree of the base residue field over GF(p)
        self.f_rel = f_rel
        self.e_rel = e_rel
        if parent is None:
            self.f_over_base = 1
            self.e_abs = 1
            self.residue = make_field(p, base_f)
            self.twist = self.residue.one
            self.acc_twist = self.residue.one
        else:
            if e_rel < 1 or f_rel < 1:
                raise DomainError("relative degrees must be >= 1")
            if e_rel % p == 0:
                raise DomainError(f"wild ramification: p = {p} divides e_rel = {e_rel}")
            self.f_over_base = parent.f_over_base * f_rel
            self.e_abs = parent.e_abs * e_rel
            self.residue = make_field(p, base_f * self.f_over_base)
            if isinstance(twist, int):
                twist = self.residue.from_int(twist)
            if twist.owner != self.residue:
                twist = residue.embed(twist, self.residue)
            if twist.is_zero():
                raise DomainError("twist must be a nonzero residue element")
            self.twist = twist
            # pi^e_abs * acc_twist = t, accumulated down the tower
            self.acc_twist = (twist ** parent.e_abs) * residue.embed(parent.acc_twist, self.residue)
        self.degree = self.f_over_base * self.e_abs
        self._splitting = None
        self._self_subfield = None

    # -- structure helpers --------------------------------------------------

    @property
    def q(self) -> int:
        return self.p ** self.base_f

    def base(self) -> "TameField":
        node = self
        while node.parent is not None:
            node = node.parent
        return node

    def ancestors(self):
        """Chain [base, ..., self]."""
        chain = []
        node = self
        while node is not None:
            chain.append(node)
            node = node.parent
        return list(reversed(chain))

    def is_ancestor_of(self, other: "TameField") -> bool:
        node = other
        while node is not None:
            if node is self:
                return True
            node = node.parent
        return False

    def uniformizer(self) -> "TameElement":
        return TameElement(self, {1: self.residue.one}, INF)

    def residue_gen_elem(self) -> "TameElement":
        return TameElement(self, {0: self.residue.generator}, INF)

    def zero(self, prec=DEFAULT_PREC) -> "TameElement":
        return TameElement(self, {}, prec)

    def one(self) -> "TameElement":
        return TameElement(self, {0: self.residue.one}, INF)

    def monomial(self, v: int, coeff: FqElem, prec=INF) -> "TameElement":
        if coeff.owner != self.residue:
            raise DomainError("monomial coefficient must lie in the residue field")
        if coeff.is_zero():
            return TameElement(self, {}, prec)
        return TameElement(self, {v: coeff}, prec)

    def from_base_t_power(self, k: int) -> "TameElement":
        """The element t^k coerced into this field (a single digit)."""
        return coerce(TameElement(self.base(), {k: self.base().residue.one}, INF), self)

    def level_signature(self):
        """Per-level (f_rel, e_rel, twist-dlog) tuples, for serialization."""
        sig = []
        for node in self.ancestors()[1:]:
            sig.append((node.f_rel, node.e_rel,
                        node.residue.dlog(node.twist) if not node.twist.is_zero() else None))
        return tuple(sig)

    def __repr__(self):
        if self.parent is None:
            return f"F(q={self.q})"
        return f"Ext(f={self.f_rel},e={self.e_rel})/{self.parent!r}"


def base_field(q: int) -> TameField:
    """The base field GF(q)((t)), q = p^f0."""
    for p in range(2, q + 1):
        if residue._is_prime(p):
            f0, m = 0, q
            while m % p == 0:
                m //= p
                f0 += 1
            if m == 1 and f0 >= 1:
                return TameField(None, p, f0, 1, 1, None)
            if q % p == 0:
                break
    raise DomainError(f"q = {q} is not a prime power")


def extend(parent: TameField, f_rel: int, e_rel: int, twist) -> TameField:
    """A new tower node with pi^e_rel * twist = pi_parent."""
    return TameField(parent, parent.p, parent.base_f, f_rel, e_rel, twist)


# ---------------------------------------------------------------------------
# elements
# ---------------------------------------------------------------------------

class TameElement:
    """A finite-precision canonical expansion sum_v a_v pi^v.

    ``digits`` maps integer valuations to nonzero residue digits; digits at
    valuations >= ``prec`` are unknown.  ``prec`` may be ``math.inf`` for
    exact elements (finitely many digits, all known).
    """

    __slots__ = ("owner", "digits", "prec")

    def __init__(self, owner: TameField, digits: dict, prec):
        self.owner = owner
        self.digits = {v: a for v, a in digits.items()
                       if not a.is_zero() and v < prec}
        self.prec = prec

    # -- basic state --------------------------------------------------------

    def is_zero_to_prec(self) -> bool:
        return not self.digits

    def val(self):
        """Minimal digit valuation (owner-normalized), or None if zero-to-prec."""
        return min(self.digits) if self.digits else None

    def ord(self) -> Fraction:
        """Valuation normalized to the base field: val / e_abs."""
        if not self.digits:
            if self.prec is INF:
                raise DomainError("ord of exact zero is undefined (+infinity)")
            raise PrecisionError("ord of a zero-to-precision element is uncertain")
        return Fraction(min(self.digits), self.owner.e_abs)

    def leading(self):
        """(valuation, digit) of the leading term."""
        if not self.digits:
            raise DomainError("zero element has no leading term")
        v = min(self.digits)
        return v, self.digits[v]

    # -- arithmetic ---------------------------------------------------------

    def _check(self, other):
        if self.owner is not other.owner:
            raise DomainError("owner mismatch: coerce elements to a common field first")

    def __add__(self, other):
        self._check(other)
        prec = min(self.prec, other.prec)
        digits = dict(self.digits)
        for v, a in other.digits.items():
            s = digits.get(v)
            digits[v] = a if s is None else s + a
        return TameElement(self.owner, digits, prec)

    def __neg__(self):
        return TameElement(self.owner, {v: -a for v, a in self.digits.items()}, self.prec)

    def __sub__(self, other):
        return self + (-other)

    def _val_lower_bound(self):
        return min(self.digits) if self.digits else self.prec

    def __mul__(self, other):
        self._check(other)
        prec = min(self.prec + other._val_lower_bound(),
                   other.prec + self._val_lower_bound())
        digits = {}
        for v, a in self.digits.items():
            for w, b in other.digits.items():
                u = v + w
                if u >= prec:
                    continue
                c = a * b
                s = digits.get(u)
                digits[u] = c if s is None else s + c
        return TameElement(self.owner, digits, prec)

    def inverse(self, rel_prec: int = DEFAULT_PREC) -> "TameElement":
        """Multiplicative inverse.

        Exact monomials invert exactly; otherwise the result carries the
        precision implied by the input (or ``rel_prec`` relative digits for
        exact multi-digit inputs, since the inverse series is infinite).
        """
        if not self.digits:
            if self.prec is INF:
                raise DomainError("division by exact zero")
            raise PrecisionError("division by an element that is zero to precision")
        v, a = self.leading()
        lead_inv = TameElement(self.owner, {-v: a.inverse()}, INF)
        if len(self.digits) == 1 and self.prec is INF:
            return lead_inv
        rel = (self.prec - v) if self.prec is not INF else rel_prec
        if rel <= 0:
            raise PrecisionError("inverse would have no certain digits")
        one = self.owner.one()
        u = (self * lead_inv) - one            # valuation > 0
        u = u.truncate(rel)
        acc = TameElement(self.owner, {0: self.owner.residue.one}, rel)
        term = TameElement(self.owner, {0: self.owner.residue.one}, rel)
        uv = u._val_lower_bound()
        k = uv
        while k < rel:
            term = (term * -u).truncate(rel)
            acc = acc + term
            if term.is_zero_to_prec():
                break
            k += uv
        return (acc * lead_inv).truncate(rel - v)

    def __truediv__(self, other):
        self._check(other)
        return self * other.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = TameElement(self.owner, {0: self.owner.residue.one}, INF)
        b = self
        while e:
            if e & 1:
                result = result * b
            b = b * b
            e >>= 1
        return result

    def truncate(self, prec) -> "TameElement":
        if prec >= self.prec:
            return self
        return TameElement(self.owner, self.digits, prec)

    # -- comparisons --------------------------------------------------------

    def equals(self, other, guard: int = 0) -> bool:
        """Equality of all certain digits; raises PrecisionError when the
        verdict would be 'equal' but fewer than ``guard`` digit positions
        beyond the leading term are certain."""
        self._check(other)
        cut = min(self.prec, other.prec)
        for v in set(self.digits) | set(other.digits):
            if v >= cut:
                continue
            if self.digits.get(v) != other.digits.get(v):
                return False
        if guard and cut is not INF:
            lead = min((min(self.digits) if self.digits else cut),
                       (min(other.digits) if other.digits else cut))
            if cut - lead < guard:
                raise PrecisionError(
                    "equality verdict with fewer than "
                    f"{guard} certain digits beyond the leading term")
        return True

    def freeze(self, cut):
        """Hashable key of the digits below ``cut`` (for set membership)."""
        return tuple(sorted((v, a.coords) for v, a in self.digits.items() if v < cut))

    def __repr__(self):
        terms = ", ".join(f"{v}:{list(a.coords)}" for v, a in sorted(self.digits.items()))
        return f"<{terms} | prec={self.prec} @ {self.owner!r}>"


def arith(x: TameElement, y: TameElement, op: str) -> TameElement:
    """Spec-level arithmetic entry point: op in {add, sub, mul, div}."""
    ops = {"add": lambda: x + y, "sub": lambda: x - y,
           "mul": lambda: x * y, "div": lambda: x / y}
    if op not in ops:
        raise DomainError(f"unknown op {op!r}")
    out = ops[op]()
    if not out.digits and out.prec is not INF and out.prec <= 0:
        raise PrecisionError("result has no certain digits")
    return out


def coerce(x: TameElement, target: TameField) -> TameElement:
    """Rewrite x in the canonical expansion of a descendant field.

    One source digit maps to one target digit: a pi_old^v becomes
    (embed(a) * twist^v) pi_new^(v*e_rel) at each tower step.
    """
    if x.owner is target:
        return x
    chain = []
    node = target
    while node is not None and node is not x.owner:
        chain.append(node)
        node = node.parent
    if node is None:
        raise DomainError("coerce target is not a descendant of the element's field")
    for level in reversed(chain):
        digits = {}
        for v, a in x.digits.items():
            digits[v * level.e_rel] = residue.embed(a, level.residue) * (level.twist ** v)
        prec = x.prec * level.e_rel if x.prec is not INF else INF
        x = TameElement(level, digits, prec)
    return x


def sr(c: TameElement) -> TameElement:
    """The standard representative: the single leading-digit monomial s with
    c * s^-1 in 1 + (maximal ideal)."""
    if not c.digits:
        if c.prec is INF:
            raise DomainError("sr of zero is undefined")
        raise PrecisionError("sr of a zero-to-precision element is uncertain")
    v, a = c.leading()
    return TameElement(c.owner, {v: a}, INF)


# ---------------------------------------------------------------------------
# embeddings
# ---------------------------------------------------------------------------

class Embedding:
    """An F-embedding of a tower node E into a splitting field L.

    Determined by ``frob_exp`` j (residue action a -> embed(a)^(q^j)) and
    ``mu`` (the image of the top uniformizer is mu * pi_L).  The compatible
    uniformizer relations at every level follow from the single constraint
    mu^e_abs = twist_L / tau_j(acc_twist_E), which is enforced on
    construction.
    """

    __slots__ = ("source", "target", "frob_exp", "mu", "_res_cache")

    def __init__(self, source: TameField, target: TameField, frob_exp: int, mu: FqElem):
        self.source = source
        self.target = target
        self.frob_exp = frob_exp
        self.mu = mu
        self._res_cache = {}

    def residue_image(self, a: FqElem) -> FqElem:
        key = a.coords
        out = self._res_cache.get(key)
        if out is None:
            out = residue.frobenius(residue.embed(a, self.target.residue),
                                    self.source.base_f * self.frob_exp)
            self._res_cache[key] = out
        return out

    def __call__(self, x: TameElement) -> TameElement:
        return apply_embedding(self, x)

    def is_identity_like(self) -> bool:
        return self.frob_exp == 0 and self.mu == self.target.residue.one

    def to_json(self):
        return {"frob_exp": self.frob_exp,
                "root_choice": self.target.residue.dlog(self.mu)}

    def __repr__(self):
        return f"Emb(j={self.frob_exp}, mu=g^{self.target.residue.dlog(self.mu)})"


def splitting_field(E: TameField) -> TameField:
    """A single-level extension of the base receiving all [E:F] embeddings."""
    return _splitting_data(E)[0]


def embeddings(E: TameField):
    """All [E:F] embeddings of E into splitting_field(E), deterministically
    ordered (lex in (frob_exp, root choice)), identity-like first."""
    return _splitting_data(E)[1]


def _splitting_data(E: TameField):
    if E._splitting is not None:
        return E._splitting
    base = E.base()
    if E is base:
        E._splitting = (E, [Embedding(E, E, 0, E.residue.one)])
        return E._splitting
    Q = base.q
    fe, e = E.f_over_base, E.e_abs
    fp = fe
    while True:
        if base.p ** (base.base_f * fp) > residue.SIZE_CAP:
            raise DomainError("splitting field exceeds the residue size cap")
        if (Q ** fp - 1) % e == 0:
            kL = make_field(base.p, base.base_f * fp)
            twist_L = residue.embed(E.acc_twist, kL)
            L = extend(base, f_rel=fp, e_rel=e, twist=twist_L)
            homs = _enumerate_embeddings(E, L)
            if homs is not None:
                E._splitting = (L, homs)
                return E._splitting
        fp += fe


def _enumerate_embeddings(E: TameField, L: TameField):
    """All (frob_exp, mu) embedding parameters, or None when L is too small."""
    kL = L.residue
    ML = kL.q - 1
    e = E.e_abs
    Q = E.base().q
    homs = []
    for j in range(E.f_over_base):
        tau_T = residue.frobenius(residue.embed(E.acc_twist, kL), E.base_f * j)
        rhs = L.twist / tau_T
        d = kL.dlog(rhs) if not rhs.is_zero() else None
        if d is None or d % gcd(e, ML) != 0:
            return None
        g = gcd(e, ML)
        step = ML // g
        x0 = (d // g) * pow(e // g, -1, step) % step
        sols = sorted((x0 + k * step) % ML for k in range(g))
        if len(sols) != e:
            return None
        for x in sols:
            homs.append(Embedding(E, L, j, kL.gen_power(x)))
    if len(homs) != E.degree:
        return None
    return homs


def apply_embedding(sigma: Embedding, x: TameElement) -> TameElement:
    """Digit-wise image: a pi^v  ->  tau(a) mu^v pi_L^v."""
    if x.owner is not sigma.source:
        if x.owner.is_ancestor_of(sigma.source):
            x = coerce(x, sigma.source)
        else:
            raise DomainError("element is not owned by the embedding's source")
    digits = {}
    for v, a in x.digits.items():
        digits[v] = sigma.residue_image(a) * (sigma.mu ** v)
    return TameElement(sigma.target, digits, x.prec)


# ---------------------------------------------------------------------------
# subfields
# ---------------------------------------------------------------------------

def _solve_congruence_pair(r1, m1, r2, m2):
    """Intersect x = r1 (mod m1) with x = r2 (mod m2); None if empty."""
    g = gcd(m1, m2)
    if (r2 - r1) % g != 0:
        return None
    lcm = m1 // g * m2
    k = ((r2 - r1) // g * pow(m1 // g, -1, m2 // g)) % (m2 // g) if m2 // g != 1 else 0
    return ((r1 + m1 * k) % lcm, lcm)


class Subfield:
    """The subfield generated over the base by a set of ambient elements.

    Resolved through the embedding enumeration of the ambient field: its
    degree is the number of distinct restriction tuples, and its stabilizer
    is the set of ambient embeddings agreeing with the identity-like one on
    every generator.  Numerical invariants (ramification, residue degree, a
    uniformizing monomial) are recovered from the stabilizer by discrete-log
    congruence solving.
    """

    __slots__ = ("ambient", "generators", "splitting", "homs", "degree",
                 "stabilizer", "restriction_keys", "_invariants")

    def __init__(self, ambient: TameField, generators):
        self.ambient = ambient
        self.generators = [coerce(g, ambient) if g.owner is not ambient else g
                           for g in generators]
        L, homs = _splitting_data(ambient)
        self.splitting = L
        self.homs = homs
        images = [[apply_embedding(h, g) for g in self.generators] for h in homs]
        cut = min([img.prec for row in images for img in row], default=INF)
        if cut is not INF:
            for row in images:
                for img in row:
                    lead = min(img.digits) if img.digits else cut
                    if cut - lead < GUARD_DIGITS:
                        raise PrecisionError(
                            "precision too low to separate embeddings on a generator")
        keys = [tuple(img.freeze(cut) for img in row) for row in images]
        self.restriction_keys = keys
        self.degree = len(set(keys))
        self.stabilizer = [i for i, k in enumerate(keys) if k == keys[0]]
        self._invariants = None

    # -- membership ---------------------------------------------------------

    def contains(self, x: TameElement) -> bool:
        if x.owner is not self.ambient:
            if not x.owner.is_ancestor_of(self.ambient):
                raise DomainError("element does not live in the ambient field")
            x = coerce(x, self.ambient)
        ref = apply_embedding(self.homs[self.stabilizer[0]], x)
        for i in self.stabilizer[1:]:
            if not apply_embedding(self.homs[i], x).equals(ref, guard=0):
                return False
        return True

    def same_restriction(self, i: int, j: int) -> bool:
        """Whether ambient embeddings i and j agree on this subfield."""
        return self.restriction_keys[i] == self.restriction_keys[j]

    # -- numerical invariants ----------------------------------------------

    def _monomial_congruences(self, v: int):
        """Congruences for dlog(a) making a*pi^v fixed by the stabilizer."""
        kL = self.splitting.residue
        ML = kL.q - 1
        Mamb = self.ambient.residue.q - 1
        kappa = ML // Mamb
        Q = self.ambient.base().q
        sol = (0, 1)
        for i in self.stabilizer:
            h = self.homs[i]
            a_i = (kappa * (pow(Q, h.frob_exp, ML) - 1)) % ML
            b_i = (-v * kL.dlog(h.mu)) % ML
            g = gcd(a_i, ML)
            if b_i % g != 0:
                return None
            m_i = ML // g
            r_i = (b_i // g) * pow(a_i // g, -1, m_i) % m_i if m_i != 1 else 0
            sol = _solve_congruence_pair(sol[0], sol[1], r_i, m_i)
            if sol is None:
                return None
        return sol

    def monomial_at(self, v: int):
        """Some monomial a*pi^v in this subfield, or None (a nonzero)."""
        sol = self._monomial_congruences(v)
        if sol is None:
            return None
        coeff = self.ambient.residue.gen_power(sol[0])
        return self.ambient.monomial(v, coeff)

    def _resolve_invariants(self):
        if self._invariants is not None:
            return self._invariants
        e_amb = self.ambient.e_abs
        v_min, unif = None, None
        for v in range(1, e_amb + 1):
            m = self.monomial_at(v)
            if m is not None:
                v_min, unif = v, m
                break
        f_amb = self.ambient.f_over_base
        f_g = 0
        for i in self.stabilizer:
            f_g = gcd(f_g, self.homs[i].frob_exp)
        # residue field of the subfield = fixed field of the stabilizer's
        # Frobenius exponents; gcd with 0 (trivial action) gives f_amb.
        f_over_base = gcd(f_amb, f_g) if f_g else f_amb
        e_over_base = e_amb // v_min
        if e_over_base * f_over_base != self.degree:
            raise DomainError(
                "internal consistency: subfield degree "
                f"{self.degree} != e*f = {e_over_base}*{f_over_base}",
                clause="subfield_invariants")
        self._invariants = (e_over_base, f_over_base, v_min, unif)
        return self._invariants

    @property
    def e_over_base(self) -> int:
        return self._resolve_invariants()[0]

    @property
    def f_over_base(self) -> int:
        return self._resolve_invariants()[1]

    @property
    def min_positive_valuation(self) -> int:
        return self._resolve_invariants()[2]

    def uniformizer(self) -> TameElement:
        """A uniformizing monomial of this subfield, inside the ambient."""
        return self._resolve_invariants()[3]

    def residue_degree_of(self, r0: FqElem) -> int:
        """Degree of a residue element over this subfield's residue field."""
        if r0.is_zero():
            return 1
        step = self.ambient.base_f * self.f_over_base
        d = 1
        cur = residue.frobenius(r0, step)
        while cur != r0:
            cur = residue.frobenius(cur, step)
            d += 1
        return d

    def signature(self):
        return (self.degree, self.e_over_base, self.f_over_base)

    def __repr__(self):
        return f"Subfield(deg={self.degree} of {self.ambient!r})"


def subfield_generated(S, ambient: TameField) -> Subfield:
    """The subfield of the ambient field generated by the elements of S."""
    return Subfield(ambient, list(S))


def contains(K: Subfield, x: TameElement) -> bool:
    return K.contains(x)


def whole_field(ambient: TameField) -> Subfield:
    """The ambient field itself, as a Subfield (cached on the field)."""
    if ambient._self_subfield is None:
        gens = [ambient.residue_gen_elem(), ambient.uniformizer()]
        ambient._self_subfield = Subfield(ambient, gens)
    return ambient._self_subfield


def tower_subfield(level: TameField, ambient: TameField) -> Subfield:
    """A tower ancestor viewed as a Subfield of the ambient field."""
    if not level.is_ancestor_of(ambient):
        raise DomainError("level is not an ancestor of the ambient field")
    gens = [coerce(level.residue_gen_elem(), ambient),
            coerce(level.uniformizer(), ambient)]
    return Subfield(ambient, gens)


def prime_subfield(ambient: TameField) -> Subfield:
    """The base field F, as a Subfield of the ambient field."""
    return Subfield(ambient, [])
