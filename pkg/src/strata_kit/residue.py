"""Exact arithmetic in finite fields GF(p^f), the coefficient layer.

Elements are coordinate vectors in the polynomial basis for a fixed monic
irreducible modulus.  Both the modulus and the distinguished multiplicative
generator are chosen deterministically (lexicographically least), so that
serialized data is portable across runs.  No precomputed polynomial tables
are used; compatibility of embeddings between fields of the same
characteristic is enforced by the index formula
``generator_src -> generator_tgt ** ((p^ft - 1) / (p^fo - 1))``.

Fields are capped at p^f <= 2^16 so that discrete-log tables stay small;
multiplication, division, powers, Frobenius and embeddings all run through
those tables.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

from .errors import DomainError

SIZE_CAP = 2 ** 16


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _prime_factors(n: int) -> list[int]:
    """Distinct prime factors of n by trial division (n <= 2^16 here)."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# ---------------------------------------------------------------------------
# polynomial helpers over GF(p); polynomials are tuples (a_0, a_1, ...)
# with trailing zeros stripped (the zero polynomial is ()).
# ---------------------------------------------------------------------------

def _trim(poly):
    i = len(poly)
    while i > 0 and poly[i - 1] == 0:
        i -= 1
    return tuple(poly[:i])


def _poly_add(a, b, p):
    n = max(len(a), len(b))
    return _trim([((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % p
                  for i in range(n)])


def _poly_mul(a, b, p):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _trim(out)


def _poly_divmod(a, b, p):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    q = [0] * max(0, len(a) - len(b) + 1)
    inv_lead = pow(b[-1], p - 2, p)
    for i in range(len(a) - len(b), -1, -1):
        c = (a[i + len(b) - 1] * inv_lead) % p
        if c:
            q[i] = c
            for j, bj in enumerate(b):
                a[i + j] = (a[i + j] - c * bj) % p
    return _trim(q), _trim(a)


def _poly_mod(a, b, p):
    return _poly_divmod(a, b, p)[1]


def _poly_gcd(a, b, p):
    while b:
        a, b = b, _poly_mod(a, b, p)
    return a


def _poly_powmod(a, e, mod, p):
    result = (1,)
    a = _poly_mod(a, mod, p)
    while e:
        if e & 1:
            result = _poly_mod(_poly_mul(result, a, p), mod, p)
        a = _poly_mod(_poly_mul(a, a, p), mod, p)
        e >>= 1
    return result


def _is_irreducible(m, p):
    """Monic-degree-f irreducibility via x^(p^k) - x criteria."""
    f = len(m) - 1
    x = (0, 1)
    # x^(p^f) == x (mod m)
    if _poly_powmod(x, p ** f, m, p) != _poly_mod(x, m, p):
        return False
    for ell in _prime_factors(f):
        power = _poly_powmod(x, p ** (f // ell), m, p)
        diff = _poly_add(power, _poly_mul((p - 1,), x, p), p)
        if len(_poly_gcd(m, diff, p)) > 1:
            return False
    return True


class FqField:
    """The finite field GF(p^f) with a fixed modulus and generator.

    Immutable after construction.  Use :func:`make_field`; do not call the
    constructor directly (construction builds the full power/dlog tables).
    """

    __slots__ = ("p", "f", "q", "modulus", "generator", "_pow", "_dlog", "zero", "one")

    def __init__(self, p: int, f: int):
        if not _is_prime(p):
            raise DomainError(f"p = {p} is not prime")
        if f < 1:
            raise DomainError(f"f = {f} must be >= 1")
        q = p ** f
        if q > SIZE_CAP:
            raise DomainError(f"p^f = {q} exceeds the size cap {SIZE_CAP}")
        self.p = p
        self.f = f
        self.q = q
        self.modulus = self._least_irreducible()
        self._pow = None
        self._dlog = None
        gen_coords = self._least_generator()
        self._build_tables(gen_coords)
        self.generator = FqElem(self, gen_coords)
        self.zero = FqElem(self, (0,) * f)
        self.one = FqElem(self, tuple([1] + [0] * (f - 1)))

    # -- deterministic construction helpers ---------------------------------

    def _least_irreducible(self):
        p, f = self.p, self.f
        if f == 1:
            return (0, 1)  # x
        for tail in itertools.product(range(p), repeat=f):
            m = tuple(tail) + (1,)
            if _is_irreducible(m, p):
                return m
        raise DomainError("no irreducible polynomial found (unreachable)")

    def _mul_coords(self, a, b):
        prod = _poly_mod(_poly_mul(_trim(a), _trim(b), self.p), self.modulus, self.p)
        return tuple(prod) + (0,) * (self.f - len(prod))

    def _least_generator(self):
        order = self.q - 1
        prime_divs = _prime_factors(order)
        for coords in itertools.product(range(self.p), repeat=self.f):
            if not any(coords):
                continue
            ok = True
            for ell in prime_divs:
                if self._coords_pow(coords, order // ell) == self._one_coords():
                    ok = False
                    break
            if ok:
                return coords
        raise DomainError("no multiplicative generator found (unreachable)")

    def _one_coords(self):
        return tuple([1] + [0] * (self.f - 1))

    def _coords_pow(self, coords, e):
        result = self._one_coords()
        base = coords
        while e:
            if e & 1:
                result = self._mul_coords(result, base)
            base = self._mul_coords(base, base)
            e >>= 1
        return result

    def _build_tables(self, gen_coords):
        powers = []
        dlog = {}
        cur = self._one_coords()
        for i in range(self.q - 1):
            powers.append(cur)
            dlog[cur] = i
            cur = self._mul_coords(cur, gen_coords)
        if cur != self._one_coords():
            raise DomainError("generator does not have full order (unreachable)")
        self._pow = powers
        self._dlog = dlog

    # -- public helpers -----------------------------------------------------

    def elem(self, coords) -> "FqElem":
        coords = tuple(int(c) % self.p for c in coords)
        if len(coords) != self.f:
            raise DomainError(f"coords length {len(coords)} != f = {self.f}")
        return FqElem(self, coords)

    def from_int(self, n: int) -> "FqElem":
        """The image of the integer n (prime-subfield element)."""
        return FqElem(self, tuple([n % self.p] + [0] * (self.f - 1)))

    def gen_power(self, k: int) -> "FqElem":
        """generator ** k (k taken mod q-1)."""
        return FqElem(self, self._pow[k % (self.q - 1)])

    def dlog(self, a: "FqElem") -> int:
        if not any(a.coords):
            raise DomainError("discrete log of zero")
        return self._dlog[a.coords]

    def elements(self):
        """All field elements, deterministic order (0 first, then powers of g)."""
        yield self.zero
        for coords in self._pow:
            yield FqElem(self, coords)

    def __repr__(self):
        return f"GF({self.p}^{self.f})"

    def __eq__(self, other):
        return isinstance(other, FqField) and (self.p, self.f) == (other.p, other.f)

    def __hash__(self):
        return hash(("FqField", self.p, self.f))

    def to_json(self):
        return {
            "p": self.p,
            "f": self.f,
            "modulus": list(self.modulus) + [0] * (self.f + 1 - len(self.modulus)),
            "generator": list(self.generator.coords),
        }


class FqElem:
    """An element of an :class:`FqField`, as polynomial-basis coordinates."""

    __slots__ = ("owner", "coords")

    def __init__(self, owner: FqField, coords):
        self.owner = owner
        self.coords = tuple(coords)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def _check(self, other):
        if self.owner != other.owner:
            raise DomainError("owner mismatch in residue-field arithmetic")

    def __add__(self, other):
        self._check(other)
        p = self.owner.p
        return FqElem(self.owner, tuple((a + b) % p for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other):
        self._check(other)
        p = self.owner.p
        return FqElem(self.owner, tuple((a - b) % p for a, b in zip(self.coords, other.coords)))

    def __neg__(self):
        p = self.owner.p
        return FqElem(self.owner, tuple((-a) % p for a in self.coords))

    def __mul__(self, other):
        self._check(other)
        if self.is_zero() or other.is_zero():
            return self.owner.zero
        fld = self.owner
        return fld.gen_power(fld.dlog(self) + fld.dlog(other))

    def __truediv__(self, other):
        self._check(other)
        if other.is_zero():
            raise DomainError("division by zero in residue field")
        if self.is_zero():
            return self.owner.zero
        fld = self.owner
        return fld.gen_power(fld.dlog(self) - fld.dlog(other))

    def inverse(self):
        return self.owner.one / self

    def __pow__(self, e: int):
        fld = self.owner
        if self.is_zero():
            if e < 0:
                raise DomainError("division by zero in residue field")
            return fld.zero if e else fld.one
        return fld.gen_power(fld.dlog(self) * e)

    def __eq__(self, other):
        return (isinstance(other, FqElem) and self.owner == other.owner
                and self.coords == other.coords)

    def __hash__(self):
        return hash((self.owner.p, self.owner.f, self.coords))

    def __repr__(self):
        return f"{list(self.coords)}@{self.owner!r}"

    def multiplicative_order(self) -> int:
        if self.is_zero():
            raise DomainError("zero has no multiplicative order")
        fld = self.owner
        d = fld.dlog(self)
        from math import gcd
        return (fld.q - 1) // gcd(d, fld.q - 1)


@lru_cache(maxsize=None)
def make_field(p: int, f: int) -> FqField:
    """Deterministic GF(p^f): lex-least monic irreducible modulus, lex-least
    full-order generator.  Cached, so fields are shared by (p, f)."""
    return FqField(p, f)


def arith(a: FqElem, b: FqElem, op: str) -> FqElem:
    """Spec-level arithmetic entry point: op in {add, sub, mul, div}."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise DomainError(f"unknown op {op!r}")


def frobenius(a: FqElem, k: int) -> FqElem:
    """a ** (p^k); frobenius(., f) is the identity."""
    if a.is_zero():
        return a
    fld = a.owner
    return fld.gen_power(fld.dlog(a) * pow(fld.p, k % fld.f, fld.q - 1))


def embed(a: FqElem, target: FqField) -> FqElem:
    """The canonical embedding GF(p^fo) -> GF(p^ft), fixed by sending the
    source generator to target_generator ** ((p^ft - 1)/(p^fo - 1))."""
    src = a.owner
    if src.p != target.p:
        raise DomainError("cannot embed between different characteristics")
    if target.f % src.f != 0:
        raise DomainError(f"degree {src.f} does not divide {target.f}")
    if src.f == target.f:
        return FqElem(target, a.coords)
    if a.is_zero():
        return target.zero
    ratio = (target.q - 1) // (src.q - 1)
    return target.gen_power(src.dlog(a) * ratio)
