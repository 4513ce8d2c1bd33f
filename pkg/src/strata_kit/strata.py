"""Symbolic stratum and filtration-index calculus.

An OrderSkeleton carries the numerical data of a principal hereditary
order inside A = M_m(D) that is pure over a tower field E: the period
constant e_A, the symbolic division-algebra parameter d (the concrete
oracle only realizes d = 1), and whether the centralizer-level order is
maximal.  On top of that this module computes:

- valuations of field elements relative to the order (v_order),
- the critical exponents k_F / k0 through the chunk factorization,
- defining sequences of simple strata with their jump indices,
- the four index <-> depth correspondences between radical powers and
  Moy-Prasad-style depths, and
- the concrete group presentations of both constructions, normalized to
  canonical (level, depth) windows so that equality is decidable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor

from .errors import DomainError
from .minimal import Factorization, howe_factorize
from .tower import Subfield, TameElement, TameField, tower_subfield


# ---------------------------------------------------------------------------
# orders and strata
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OrderSkeleton:
    """Numerical data of a principal hereditary order, pure over a field."""
    m: int
    d: int
    e_A: int
    pure_over: TameField
    b_maximal: bool = True

    def __post_init__(self):
        if self.m < 1 or self.d < 1 or self.e_A < 1:
            raise DomainError("order parameters must be positive")
        if self.e_A % self.d != 0:
            raise DomainError("e_A must be a multiple of the symbolic d")
        e_field = self.pure_over.e_abs
        if self.e_A % e_field != 0:
            raise DomainError("e(E/F) must divide e_A for an E-pure order")
        if self.N % self.pure_over.degree != 0:
            raise DomainError("[E:F] must divide N = m*d")

    @property
    def N(self) -> int:
        return self.m * self.d

    @property
    def e_field(self) -> int:
        return self.pure_over.e_abs


def standard_order(E: TameField, d: int = 1) -> OrderSkeleton:
    """The order attached to the canonical chain of an embedded field E
    inside M_[E:F](F) (split by default), which is E-pure with e_A = e(E/F)
    and maximal centralizer level."""
    if E.degree % d != 0:
        raise DomainError("d must divide [E:F] for the standard order")
    return OrderSkeleton(m=E.degree // d, d=d, e_A=d * E.e_abs, pure_over=E,
                         b_maximal=True)


def v_order(x: TameElement, order: OrderSkeleton) -> int:
    """Order-valuation of a field element: e_A * ord(x), which must land in
    the integers (otherwise the order/field pairing is inconsistent)."""
    if not x.digits:
        raise DomainError("v_order of zero is undefined")
    v = x.ord() * order.e_A
    if v.denominator != 1:
        raise DomainError(
            f"e_A * ord(x) = {v} is not an integer: inconsistent order/field pairing")
    return int(v)


def k_F(beta: TameElement, fac: Factorization | None = None):
    """Critical exponent over the base: None encodes -infinity (central
    beta); otherwise the valuation, in F[beta], of the first chunk of the
    factorization (which is v of beta itself when beta is minimal)."""
    base = beta.owner.base()
    if fac is None:
        fac = howe_factorize(beta, base)
    if fac.degenerate:
        return None
    v = fac.chunks[0].ord() * fac.fields[0].e_over_base
    if v.denominator != 1:
        raise DomainError("k_F is not integral (inconsistency)")
    return int(v)


def k0(beta: TameElement, order: OrderSkeleton, fac: Factorization | None = None):
    """Order-level critical exponent: e_A * k_F(beta) / e(F[beta]/F), with
    None encoding -infinity for central beta."""
    base = beta.owner.base()
    if fac is None:
        fac = howe_factorize(beta, base)
    kf = k_F(beta, fac)
    if kf is None:
        return None
    scaled = Fraction(order.e_A * kf, fac.fields[0].e_over_base)
    if scaled.denominator != 1:
        raise DomainError("k0 is not integral (inconsistency)")
    return int(scaled)


@dataclass
class StratumSkeleton:
    """The numerical data [order, n, r, beta] of a stratum, with the chunk
    factorization of beta attached."""
    order: OrderSkeleton
    n: int
    r: int
    beta: TameElement
    fac: Factorization
    kind: str = field(default="", compare=False)

    def __post_init__(self):
        if not self.kind:
            self.kind = classify_stratum(self)


def classify_stratum(st: StratumSkeleton) -> str:
    if st.n < st.r:
        raise DomainError("stratum requires n >= r")
    v = v_order(st.beta, st.order)
    if st.n == 0 and st.r == 0 and v == 0:
        return "simple"     # depth-zero stratum with a unit entry
    if st.n == st.r:
        return "null"
    if v != -st.n:
        raise DomainError("pure stratum requires v_order(beta) = -n")
    kk = k0(st.beta, st.order, st.fac)
    if kk is None or st.r < -kk:
        return "simple"
    return "pure"


def make_stratum(order: OrderSkeleton, beta: TameElement, r: int = 0,
                 fac: Factorization | None = None) -> StratumSkeleton:
    """Build [order, n, r, beta] with n = -v_order(beta) (or the depth-zero
    stratum n = 0 for a unit of the base ring)."""
    E = order.pure_over
    if beta.owner is not E:
        raise DomainError("beta must be owned by the order's pure field")
    base = E.base()
    if fac is None:
        fac = howe_factorize(beta, base)
    if fac.fields[0].degree != E.degree:
        raise DomainError("order is not pure over F[beta] "
                          f"(degree {fac.fields[0].degree} != {E.degree})")
    v = v_order(beta, order)
    n = max(0, -v)
    if v > 0:
        raise DomainError("beta must have non-positive order valuation")
    if n == 0 and not fac.degenerate:
        raise DomainError("depth-zero strata require a central unit beta")
    return StratumSkeleton(order, n, r, beta, fac)


@dataclass
class DefiningStage:
    """One member [order, n, r_i, beta_i] of a defining sequence."""
    order: OrderSkeleton
    n: int
    r: int
    beta: TameElement
    level_field: Subfield
    k0_value: int | None   # None encodes -infinity


def defining_sequence(stratum: StratumSkeleton) -> list[DefiningStage]:
    """Stages beta_i = sum_{j >= i} c_j with jumps r_{i+1} = -k0(beta_i).

    The jump sequence is strictly increasing, bounded by n, and the last
    tail is minimal (or central); every condition is re-verified here.
    """
    if stratum.kind != "simple":
        raise DomainError("defining sequences are attached to simple strata",
                          clause="not_simple")
    fac = stratum.fac
    order = stratum.order
    e_A = order.e_A
    stages = []
    r_prev = stratum.r
    for i in range(len(fac.chunks)):
        beta_i = fac.partial_tail(i)
        # k0 of beta_i: -infinity when the tail is central, else e_A*ord(c_i)
        if i == len(fac.chunks) - 1 and fac.fields[i].degree == 1:
            k0_i = None
        else:
            scaled = fac.chunks[i].ord() * e_A
            if scaled.denominator != 1:
                raise DomainError("jump index is not integral at the order",
                                  clause="jump_not_integral")
            k0_i = int(scaled)
        r_i = r_prev if i == 0 else -stages[-1].k0_value
        if i > 0:
            if stages[-1].k0_value is None:
                raise DomainError("central tail admits no further stage",
                                  clause="jump_after_central")
            if r_i <= stages[-1].r and not (i == 1 and stratum.r == r_i):
                raise DomainError("jump sequence is not strictly increasing",
                                  clause="jumps_not_increasing")
        stages.append(DefiningStage(order, stratum.n, r_i, beta_i,
                                    fac.fields[i], k0_i))
        r_prev = r_i
    # strictness and the bound by n
    rs = [st.r for st in stages]
    for i in range(1, len(rs)):
        if rs[i] <= rs[i - 1]:
            raise DomainError("jump sequence is not strictly increasing",
                              clause="jumps_not_increasing")
    if stages[-1].k0_value is not None and stratum.n != -v_order(stratum.beta, order):
        raise DomainError("n does not match -v_order(beta)", clause="bad_n")
    if rs and rs[-1] >= stratum.n and stratum.n > 0:
        raise DomainError("last jump must be strictly below n",
                          clause="jump_exceeds_n")
    return stages


# ---------------------------------------------------------------------------
# index <-> depth conversion
# ---------------------------------------------------------------------------

@dataclass(frozen=True, order=False)
class FiltDepth:
    """A depth in the ordered monoid R union {r+}."""
    value: Fraction
    plus: bool = False

    def key(self):
        return (self.value, 1 if self.plus else 0)

    def __le__(self, other):
        return self.key() <= other.key()

    def __lt__(self, other):
        return self.key() < other.key()

    def to_json(self):
        return {"value": f"{self.value.numerator}/{self.value.denominator}",
                "plus": self.plus}

    def __repr__(self):
        return f"{self.value}{'+' if self.plus else ''}"


MODES = ("plain", "plus", "half", "half_plus")


def depth_of_index(n: int, order: OrderSkeleton, mode: str = "plain") -> FiltDepth:
    """The depth attached to a radical-power index, in one of the four
    correspondences: plain P^n <-> n/e_A; plus P^(n+1) <-> (n/e_A)+;
    half P^floor((n+1)/2) <-> n/(2 e_A); half_plus P^(floor(n/2)+1) <->
    (n/(2 e_A))+."""
    if mode not in MODES:
        raise DomainError(f"unknown mode {mode!r}")
    e_A = order.e_A
    if mode == "plain":
        return FiltDepth(Fraction(n, e_A), False)
    if mode == "plus":
        return FiltDepth(Fraction(n, e_A), True)
    if mode == "half":
        return FiltDepth(Fraction(n, 2 * e_A), False)
    return FiltDepth(Fraction(n, 2 * e_A), True)


def index_of_depth(depth: FiltDepth, order: OrderSkeleton, mode: str = "plain") -> int:
    """Inverse of depth_of_index; raises when the depth is not attained
    (the integrality gate n = depth * e_A, resp. 2 e_A)."""
    if mode not in MODES:
        raise DomainError(f"unknown mode {mode!r}")
    e_A = order.e_A
    scale = e_A if mode in ("plain", "plus") else 2 * e_A
    n = depth.value * scale
    if n.denominator != 1:
        raise DomainError(
            f"depth {depth.value} is not attained: {n} fails the integrality gate",
            clause="depth_not_attained")
    n = int(n)
    if mode == "plain":
        return n
    if mode == "plus":
        return n + 1
    if mode == "half":
        return (n + 1) // 2
    return n // 2 + 1


# ---------------------------------------------------------------------------
# group presentations
# ---------------------------------------------------------------------------

#: marker for the non-compact stabilizer factor (chain normalizer /
#: point-stabilizer); ordered below every finite depth.
STAB_MARKER = "stab"


def _depth_sort_key(d):
    if d == STAB_MARKER:
        return (Fraction(-1), -1)
    return d.key()


def _dominates(l1, d1, l2, d2) -> bool:
    """Whether factor (l1, d1) contains factor (l2, d2): a higher (or equal)
    level with a shallower (or equal) depth absorbs the other factor."""
    if l1 < l2:
        return False
    return _depth_sort_key(d1) <= _depth_sort_key(d2)


@dataclass
class GroupPresentation:
    """A product of per-level filtration subgroups, plus its normal form.

    ``factors`` is the raw emitted list of (level, rule, argument); the
    normal form converts every factor to a (level, depth) window, drops
    factors dominated by another, and sorts by level.
    """
    label: str
    tower_degrees: tuple      # [E_i : F] per level, level 0 = biggest field
    e_A: int
    N: int
    factors: list
    normal_form: list = field(default_factory=list)

    def __post_init__(self):
        if not self.normal_form:
            self.normal_form = _normalize(self.factors, self.e_A)

    def to_json(self):
        out = []
        for lvl, dep in self.normal_form:
            if dep == STAB_MARKER:
                out.append({"level": lvl, "depth": "stab"})
            else:
                out.append({"level": lvl,
                            "depth": "r+" if dep.plus else "r",
                            "value": f"{dep.value.numerator}/{dep.value.denominator}"})
        return out


def _convert_factor(level, rule, arg, e_A):
    if rule == "U0B":
        return (level, FiltDepth(Fraction(0), False))
    if rule == "U1B":
        return (level, FiltDepth(Fraction(0), True))
    if rule == "Kfrak":
        return (level, STAB_MARKER)
    if rule == "half_plus":     # B_level ∩ U^(floor(arg/2)+1)
        return (level, FiltDepth(Fraction(arg, 2 * e_A), True))
    if rule == "half":          # B_level ∩ U^(floor((arg+1)/2))
        return (level, FiltDepth(Fraction(arg, 2 * e_A), False))
    if rule == "MP":            # explicit depth
        return (level, arg)
    raise DomainError(f"unknown presentation rule {rule!r}")


def _normalize(factors, e_A):
    converted = [_convert_factor(lvl, rule, arg, e_A) for lvl, rule, arg in factors]
    # per-level: keep the shallowest window only
    best = {}
    for lvl, dep in converted:
        if lvl not in best or _depth_sort_key(dep) < _depth_sort_key(best[lvl]):
            best[lvl] = dep
    items = sorted(best.items())
    # cross-level absorption
    kept = []
    for lvl, dep in items:
        if any(_dominates(l2, d2, lvl, dep) for l2, d2 in items
               if (l2, d2) != (lvl, dep)):
            continue
        kept.append((lvl, dep))
    return kept


def _stratum_levels(stages, base_degree=1):
    """Level field degrees for a defining sequence: fields E_0..E_s, with a
    final base level appended when E_s is not already the base."""
    degs = [st.level_field.degree for st in stages]
    if degs and degs[-1] != base_degree:
        degs.append(base_degree)
    if not degs:
        degs = [base_degree]
    return tuple(degs)


def presentation_secherre(stratum: StratumSkeleton):
    """The three concrete product presentations attached to a simple
    stratum with maximal centralizer-level order, as normalized windows."""
    if not stratum.order.b_maximal:
        raise DomainError("presentations require a maximal centralizer order")
    stages = defining_sequence(stratum)
    degs = _stratum_levels(stages)
    top = len(degs) - 1
    e_A, N = stratum.order.e_A, stratum.order.N
    h1 = [(i, "half_plus", st.r) for i, st in enumerate(stages)]
    h1.append((top, "half_plus", stratum.n))
    j = [(0, "U0B", None)]
    j += [(i, "half", st.r) for i, st in enumerate(stages) if i >= 1]
    j.append((top, "half", stratum.n))
    jhat = [(0, "Kfrak", None)] + j[1:]
    return (GroupPresentation("H1", degs, e_A, N, h1),
            GroupPresentation("J", degs, e_A, N, j),
            GroupPresentation("Jhat", degs, e_A, N, jhat))


def presentation_yu(yu):
    """The three concrete product presentations on the other side, from a
    datum skeleton (duck-typed: needs tower_degrees, depths, d, e_A, N)."""
    degs = tuple(yu.tower_degrees)
    e_A, N = yu.e_A, yu.N
    d = yu.d
    half = [Fraction(r, 2) for r in yu.depths]
    kplus = [(0, "MP", FiltDepth(Fraction(0), True))]
    kplus += [(i, "MP", FiltDepth(half[i - 1], True)) for i in range(1, d + 1)]
    kcirc = [(0, "MP", FiltDepth(Fraction(0), False))]
    kcirc += [(i, "MP", FiltDepth(half[i - 1], False)) for i in range(1, d + 1)]
    kfull = [(0, "Kfrak", None)] + kcirc[1:]
    return (GroupPresentation("Kplus", degs, e_A, N, kplus),
            GroupPresentation("Kcirc", degs, e_A, N, kcirc),
            GroupPresentation("K", degs, e_A, N, kfull))


def compare_presentations(a: GroupPresentation, b: GroupPresentation):
    """Equality of normal forms; returns (equal, diff-dict)."""
    diff = {}
    if a.tower_degrees != b.tower_degrees:
        diff["tower"] = {"a": a.tower_degrees, "b": b.tower_degrees}
        raise DomainError(f"tower mismatch: {diff['tower']}", clause="tower_mismatch")
    if a.e_A != b.e_A or a.N != b.N:
        diff["order"] = {"a": (a.e_A, a.N), "b": (b.e_A, b.N)}
        raise DomainError("order-constant mismatch", clause="order_mismatch")
    if a.normal_form != b.normal_form:
        diff["normal_form"] = {"a": a.to_json(), "b": b.to_json()}
        return False, diff
    return True, {}


def _jump_count(lo: FiltDepth, hi: FiltDepth, e_A: int) -> int:
    """Number of filtration jumps n/e_A in the window [lo, hi)."""
    lo_n = ceil(lo.value * e_A)
    if lo.plus and lo.value * e_A == lo_n:
        lo_n += 1
    hi_n = floor(hi.value * e_A)
    if not hi.plus and hi.value * e_A == hi_n:
        hi_n -= 1
    return max(0, hi_n - lo_n + 1)


def _effective_depth(nf, level):
    """Shallowest window covering a tower slice: min depth over factors at
    this level or deeper in the tower (higher level index)."""
    cands = [dep for lvl, dep in nf if lvl >= level]
    if not cands:
        raise DomainError("presentation has no factor covering a tower slice",
                          clause="uncovered_slice")
    return min(cands, key=_depth_sort_key)


def index_card(num: GroupPresentation, den: GroupPresentation, q: int | None = None):
    """The group index (num : den) as a q-power exponent, computed from
    Lie-lattice digit counts: each tower slice contributes its dimension
    per jump times the number of jumps in its effective depth window."""
    if num.tower_degrees != den.tower_degrees or num.e_A != den.e_A:
        raise DomainError("presentations live over different data")
    e_A, N = num.e_A, num.N
    total = 0
    degs = num.tower_degrees
    prev_dim = 0
    for lvl in range(len(degs)):
        dim = N * N // degs[lvl]
        dn = _effective_depth(num.normal_form, lvl)
        dd = _effective_depth(den.normal_form, lvl)
        step = dim - prev_dim
        prev_dim = dim
        if dn == STAB_MARKER or dd == STAB_MARKER:
            if dn != dd:
                raise DomainError("stabilizer-marker factors admit no finite index",
                                  clause="non_inclusion")
            continue
        if _depth_sort_key(dn) > _depth_sort_key(dd):
            raise DomainError("denominator is not contained in numerator",
                              clause="non_inclusion")
        if step % e_A != 0:
            raise DomainError("per-jump dimension is not integral",
                              clause="dimension_gate")
        total += (step // e_A) * _jump_count(dn, dd, e_A)
    return total
