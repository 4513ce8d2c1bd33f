"""Brute-force matrix/lattice oracle over GF(q)((t)).

Everything here is deliberately independent of the symbolic stratum
calculus: field elements become honest matrices via the regular
representation, hereditary data becomes explicit diagonal lattice chains,
and all filtration questions are answered by valuation bounds, Hermite
normal forms over the power-series ring, and Gaussian elimination.  The
symbolic layer is tested against these answers.

Scope: split ambient algebras M_N(F) with N small (<= 6).
"""

from __future__ import annotations

from .errors import DomainError, PrecisionError
from . import residue
from .tower import DEFAULT_PREC, INF, TameElement, TameField

ORACLE_N_CAP = 6


# ---------------------------------------------------------------------------
# residue-field linear algebra (small, dense, exact)
# ---------------------------------------------------------------------------

def _fp_inverse(mat, p):
    """Inverse of a square matrix of ints over GF(p) by Gaussian elimination."""
    n = len(mat)
    aug = [list(row) + [1 if i == j else 0 for j in range(n)]
           for i, row in enumerate(mat)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] % p), None)
        if piv is None:
            raise DomainError("residue basis matrix is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = pow(aug[col][col], -1, p)
        aug[col] = [x * inv % p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] % p:
                c = aug[r][col]
                aug[r] = [(x - c * y) % p for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def _fq_kernel_vector(cols, k):
    """A nonzero GF(q)-vector lam with sum lam_i * cols[i] = 0, or None.

    ``cols`` is a list of equal-length lists of FqElem over the field k.
    """
    r = len(cols)
    if r == 0:
        return None
    dim = len(cols[0])
    # row-reduce the dim x r matrix, tracking pivot columns
    rows = [[cols[i][u] for i in range(r)] for u in range(dim)]
    pivots = {}
    reduced = []
    for row in rows:
        row = row[:]
        for col, idx in pivots.items():
            c = row[col]
            if not c.is_zero():
                row = [a - c * b for a, b in zip(row, reduced[idx])]
        j = next((i for i in range(r) if not row[i].is_zero()), None)
        if j is None:
            continue
        inv = row[j].inverse()
        row = [a * inv for a in row]
        for idx in range(len(reduced)):
            c = reduced[idx][j]
            if not c.is_zero():
                reduced[idx] = [a - c * b for a, b in zip(reduced[idx], row)]
        pivots[j] = len(reduced)
        reduced.append(row)
        if len(pivots) == r:
            return None
    free = next(i for i in range(r) if i not in pivots)
    lam = [k.zero for _ in range(r)]
    lam[free] = k.one
    for col, idx in pivots.items():
        lam[col] = -reduced[idx][free]
    return lam


class _ResidueDecomposer:
    """Writes residue-field elements of a tower node in the basis
    {g^a * embed(w_j)} with g the residue generator and w_j the polynomial
    basis of the base residue field; yields base-residue coordinates per
    power of g."""

    def __init__(self, field: TameField):
        self.field = field
        self.kE = field.residue
        self.kF = field.base().residue
        self.fob = field.f_over_base
        self.bf = field.base_f
        n = self.kE.f
        cols = []
        for a in range(self.fob):
            ga = self.kE.gen_power(a)
            for j in range(self.bf):
                w = self.kF.elem(tuple([0] * j + [1] + [0] * (self.bf - j - 1)))
                vec = (ga * residue.embed(w, self.kE)).coords
                cols.append(list(vec) + [0] * (n - len(vec)))
        mat = [[cols[c][u] for c in range(n)] for u in range(n)]
        self.inv = _fp_inverse(mat, field.p)

    def coords(self, u):
        """base-residue coefficients (c_0, ..., c_{fob-1}) with
        u = sum_a embed(c_a) * g^a."""
        n = self.kE.f
        vec = list(u.coords) + [0] * (n - len(u.coords))
        lam = [sum(self.inv[r][c] * vec[c] for c in range(n)) % self.field.p
               for r in range(n)]
        out = []
        for a in range(self.fob):
            out.append(self.kF.elem(tuple(lam[a * self.bf:(a + 1) * self.bf])))
        return out


_DECOMPOSERS = {}


def _decomposer(field: TameField) -> _ResidueDecomposer:
    key = id(field)
    if key not in _DECOMPOSERS:
        _DECOMPOSERS[key] = _ResidueDecomposer(field)
    return _DECOMPOSERS[key]


# ---------------------------------------------------------------------------
# matrices over the base field
# ---------------------------------------------------------------------------

def _exact_zero(base: TameField) -> TameElement:
    return TameElement(base, {}, INF)


class Mat:
    """A dense square matrix over the base Laurent-series field."""

    __slots__ = ("base", "n", "rows")

    def __init__(self, base: TameField, rows):
        self.base = base
        self.rows = [list(r) for r in rows]
        self.n = len(self.rows)

    @classmethod
    def zero(cls, base: TameField, n: int) -> "Mat":
        return cls(base, [[_exact_zero(base) for _ in range(n)] for _ in range(n)])

    @classmethod
    def identity(cls, base: TameField, n: int) -> "Mat":
        m = cls.zero(base, n)
        one = base.one()
        for i in range(n):
            m.rows[i][i] = one
        return m

    @classmethod
    def monomial_entry(cls, base: TameField, n: int, i: int, k: int, v: int,
                       coeff) -> "Mat":
        m = cls.zero(base, n)
        m.rows[i][k] = base.monomial(v, coeff)
        return m

    def __add__(self, other):
        return Mat(self.base, [[a + b for a, b in zip(r1, r2)]
                               for r1, r2 in zip(self.rows, other.rows)])

    def __sub__(self, other):
        return Mat(self.base, [[a - b for a, b in zip(r1, r2)]
                               for r1, r2 in zip(self.rows, other.rows)])

    def __matmul__(self, other):
        n = self.n
        out = []
        for i in range(n):
            row = []
            for k in range(n):
                acc = _exact_zero(self.base)
                for j in range(n):
                    a, b = self.rows[i][j], other.rows[j][k]
                    if a.digits and b.digits:
                        acc = acc + a * b
                    else:
                        acc = acc + (a * b)   # keep precision bookkeeping
                row.append(acc)
            out.append(row)
        return Mat(self.base, out)

    def scale(self, x: TameElement) -> "Mat":
        return Mat(self.base, [[a * x for a in r] for r in self.rows])

    def trace(self) -> TameElement:
        acc = _exact_zero(self.base)
        for i in range(self.n):
            acc = acc + self.rows[i][i]
        return acc

    def is_zero(self) -> bool:
        return all(not a.digits for r in self.rows for a in r)

    def __repr__(self):
        return f"Mat({self.n}x{self.n})"


def block_diag(base: TameField, mats) -> Mat:
    n = sum(m.n for m in mats)
    out = Mat.zero(base, n)
    off = 0
    for m in mats:
        for i in range(m.n):
            for j in range(m.n):
                out.rows[off + i][off + j] = m.rows[i][j]
        off += m.n
    return out


def regular_rep(x: TameElement, copies: int = 1) -> Mat:
    """The matrix of multiplication by x on its field viewed as a base
    vector space, in the basis {g^a pi^b} ordered pi-power-major; with
    ``copies`` > 1, the block-diagonal sum of that many copies."""
    E = x.owner
    base = E.base()
    if E.degree * copies > ORACLE_N_CAP:
        raise DomainError(f"oracle capped at N <= {ORACLE_N_CAP}")
    e, f = E.e_abs, E.f_over_base
    dec = _decomposer(E)
    T = E.acc_twist
    Tinv = T.inverse()
    block = Mat.zero(base, E.degree)
    for b_c in range(e):
        for a_c in range(f):
            col = b_c * f + a_c
            basis_el = E.monomial(b_c, E.residue.gen_power(a_c))
            y = x * basis_el
            for v, coeff in y.digits.items():
                b = v % e
                m = (v - b) // e
                u = coeff * (Tinv ** m if m >= 0 else T ** (-m))
                for a, c_a in enumerate(dec.coords(u)):
                    if c_a.is_zero():
                        continue
                    row = b * f + a
                    entry = block.rows[row][col]
                    term = base.monomial(m, c_a)
                    block.rows[row][col] = entry + term
            if y.prec is not INF:
                # digits of y at valuations >= prec are unknown: cap the
                # t-precision of every entry row accordingly
                for b in range(e):
                    cap = -((b - y.prec) // e)
                    for a in range(f):
                        row = b * f + a
                        entry = block.rows[row][col]
                        block.rows[row][col] = TameElement(
                            base, entry.digits, min(entry.prec, cap))
    if copies == 1:
        return block
    return block_diag(base, [block] * copies)


# ---------------------------------------------------------------------------
# lattice chains and radical-power lattices
# ---------------------------------------------------------------------------

class ChainRealized:
    """A uniform lattice chain in the standard space F^N given by a diagonal
    profile: L_j = span of t^ceil((j - c_i)/period) e_i."""

    __slots__ = ("N", "period", "profile")

    def __init__(self, N: int, period: int, profile):
        self.N = N
        self.period = period
        self.profile = tuple(profile)
        if len(self.profile) != N:
            raise DomainError("profile length must equal N")

    def d(self, j: int, i: int) -> int:
        return -((self.profile[i] - j) // self.period)

    def filt_bound(self, n: int):
        """D(i, k) = min valuation of entry (i, k) of a matrix in the n-th
        radical power, by scanning one full period of the chain."""
        e = self.period
        return [[max(self.d(j + n, i) - self.d(j, k) for j in range(e))
                 for k in range(self.N)] for i in range(self.N)]


def uniform_chain(N: int, e_A: int) -> ChainRealized:
    if N % e_A != 0:
        raise DomainError("uniform chain requires e_A | N")
    block = N // e_A
    return ChainRealized(N, e_A, [i // block for i in range(N)])


def chain_from_field(E: TameField, copies: int = 1) -> ChainRealized:
    """The chain matching regular_rep's basis order: each copy of the field
    contributes its pi-power as the profile entry."""
    e, f = E.e_abs, E.f_over_base
    profile = []
    for _ in range(copies):
        for b in range(e):
            profile.extend([b] * f)
    return ChainRealized(E.degree * copies, e, profile)


def v_A_direct(x: Mat, chain: ChainRealized) -> int:
    """max n with x L_j inside L_{j+n} for all j, by membership scan."""
    vals = [x.rows[i][k].val() for i in range(x.n) for k in range(x.n)]
    vals = [v for v in vals if v is not None]
    if not vals:
        raise DomainError("v_A of the zero matrix is undefined")

    def ok(n):
        D = chain.filt_bound(n)
        for i in range(x.n):
            for k in range(x.n):
                v = x.rows[i][k].val()
                if v is not None and v < D[i][k]:
                    return False
        return True

    n = chain.period * (min(vals) - 1)
    while not ok(n):
        n -= 1
    while ok(n + 1):
        n += 1
    return n


# ---------------------------------------------------------------------------
# lattices over the power-series ring
# ---------------------------------------------------------------------------

def _high_part(x: TameElement, cut: int) -> TameElement:
    """The digits of x at valuations >= cut (keeping x's precision)."""
    return TameElement(x.owner, {v: a for v, a in x.digits.items() if v >= cut},
                       x.prec)


class MatrixLattice:
    """A finitely generated o_F-lattice inside F^dim, held as generator
    columns and normalized to a column Hermite form over the series ring:
    pivot entries are monic powers of t, entries in a pivot row of the
    other pivot columns are reduced below the pivot exponent."""

    __slots__ = ("base", "dim", "cols", "pivots")

    def __init__(self, base: TameField, dim: int, cols, canonical=False):
        self.base = base
        self.dim = dim
        self.cols = [list(c) for c in cols]
        self.pivots = None
        if canonical:
            self.canonicalize()

    def canonicalize(self):
        base = self.base
        cols = [c for c in self.cols if any(x.digits for x in c)]
        pivots = []       # (row, exponent, column)
        pivot_cols = []
        for row in range(self.dim):
            cands = []
            for c in cols:
                if any(c is pc for pc in pivot_cols):
                    continue
                v = c[row].val()
                if v is not None:
                    cands.append((v, c))
            if not cands:
                continue
            v = min(x[0] for x in cands)
            col = next(c for w, c in cands if w == v)
            unit = col[row] * base.monomial(-v, base.residue.one)
            inv_unit = unit.inverse()
            col[:] = [x * inv_unit for x in col]
            tv = base.monomial(v, base.residue.one)
            for c2 in cols:
                if c2 is col:
                    continue
                e2 = c2[row]
                if any(c2 is pc for pc in pivot_cols):
                    high = _high_part(e2, v)
                    if not high.digits:
                        continue
                    q = high * base.monomial(-v, base.residue.one)
                else:
                    if e2.val() is None:
                        continue
                    q = e2 * base.monomial(-v, base.residue.one)
                for u in range(self.dim):
                    c2[u] = c2[u] - col[u] * q
            pivots.append((row, v))
            pivot_cols.append(col)
        self.cols = pivot_cols
        self.pivots = pivots
        return self

    def pivot_exponent_sum(self) -> int:
        if self.pivots is None:
            self.canonicalize()
        return sum(v for _, v in self.pivots)

    def rank(self) -> int:
        if self.pivots is None:
            self.canonicalize()
        return len(self.pivots)

    def reduce_vector(self, vec):
        """Remainder of vec after greedy reduction by the canonical columns
        with series-ring coefficients; zero remainder certifies membership."""
        if self.pivots is None:
            self.canonicalize()
        base = self.base
        v = list(vec)
        for (row, a), col in zip(self.pivots, self.cols):
            e = v[row]
            if e.val() is None:
                continue
            if e.val() < a:
                return v    # not reducible: remainder is nonzero
            q = e * base.monomial(-a, base.residue.one)
            for u in range(self.dim):
                v[u] = v[u] - col[u] * q
        return v

    def contains_vector(self, vec, guard: int = 8) -> bool:
        rem = self.reduce_vector(vec)
        return all(not x.digits for x in rem)

    def same_as(self, other: "MatrixLattice") -> bool:
        if self.pivots is None:
            self.canonicalize()
        if other.pivots is None:
            other.canonicalize()
        if self.pivots != other.pivots:
            return False
        for c1, c2 in zip(self.cols, other.cols):
            for x, y in zip(c1, c2):
                if not x.equals(y):
                    return False
        return True


def filt_lattice(chain: ChainRealized, n: int, base: TameField) -> MatrixLattice:
    """The n-th radical power as an o_F-lattice in matrix space
    (row-major flattening)."""
    N = chain.N
    D = chain.filt_bound(n)
    cols = []
    one = base.residue.one
    for i in range(N):
        for k in range(N):
            vec = [_exact_zero(base) for _ in range(N * N)]
            vec[i * N + k] = base.monomial(D[i][k], one)
            cols.append(vec)
    return MatrixLattice(base, N * N, cols, canonical=True)


def lattice_index(L1: MatrixLattice, L2: MatrixLattice) -> int:
    """q-exponent of the index (L1 : L2) for lattices spanning the same
    space, as the difference of pivot exponent sums."""
    if L1.rank() != L2.rank():
        raise DomainError("lattices span different spaces: index undefined")
    if [r for r, _ in L1.pivots] != [r for r, _ in L2.pivots]:
        raise DomainError("lattices span different spaces: index undefined")
    return L2.pivot_exponent_sum() - L1.pivot_exponent_sum()


# ---------------------------------------------------------------------------
# commutants and centralizer intersections
# ---------------------------------------------------------------------------

def commutant_basis(gens, N: int, base: TameField):
    """An F-basis of the commutant of the given matrices, as flattened
    vectors in F^(N*N), by Gaussian elimination on the bracket equations."""
    dim = N * N
    rows = []
    for G in gens:
        for i in range(N):
            for k in range(N):
                row = [_exact_zero(base) for _ in range(dim)]
                for j in range(N):
                    row[i * N + j] = row[i * N + j] + G.rows[j][k]
                    row[j * N + k] = row[j * N + k] - G.rows[i][j]
                rows.append(row)
    pivots = {}
    reduced = []
    for row in rows:
        r = row[:]
        for col, idx in pivots.items():
            c = r[col]
            if c.digits:
                for u in range(dim):
                    r[u] = r[u] - c * reduced[idx][u]
        nz = [(r[u].val(), u) for u in range(dim) if r[u].val() is not None]
        if not nz:
            continue
        _, j = min(nz)
        inv = r[j].inverse()
        r = [x * inv for x in r]
        for idx in range(len(reduced)):
            c = reduced[idx][j]
            if c.digits:
                for u in range(dim):
                    reduced[idx][u] = reduced[idx][u] - c * r[u]
        pivots[j] = len(reduced)
        reduced.append(r)
    basis = []
    for free in range(dim):
        if free in pivots:
            continue
        vec = [_exact_zero(base) for _ in range(dim)]
        vec[free] = base.one()
        for col, idx in pivots.items():
            vec[col] = -reduced[idx][free]
        basis.append(vec)
    return basis


def _min_val(col):
    vals = [x.val() for x in col if x.val() is not None]
    return min(vals) if vals else None


def intersect_with_centralizer(gens, chain: ChainRealized, n: int,
                               base: TameField) -> MatrixLattice:
    """The o_F-lattice (commutant of gens) intersect (n-th radical power),
    by scaling the commutant basis into the unit lattice and saturating:
    while the reductions mod t are dependent, a dependent combination can
    be divided by t and still lies in the commutant span."""
    N = chain.N
    dim = N * N
    D = chain.filt_bound(n)
    basis = commutant_basis(gens, N, base)
    one = base.residue.one
    cols = []
    for vec in basis:
        scaled = [vec[u] * base.monomial(-D[u // N][u % N], one)
                  for u in range(dim)]
        mv = _min_val(scaled)
        if mv is None:
            raise DomainError("zero commutant basis vector")
        cols.append([x * base.monomial(-mv, one) for x in scaled])
    kF = base.residue
    while True:
        res_cols = [[c[u].digits.get(0, kF.zero) for u in range(dim)]
                    for c in cols]
        lam = _fq_kernel_vector(res_cols, kF)
        if lam is None:
            break
        comb = [_exact_zero(base) for _ in range(dim)]
        last = None
        for i, l in enumerate(lam):
            if l.is_zero():
                continue
            last = i
            scal = TameElement(base, {0: l}, INF)
            for u in range(dim):
                comb[u] = comb[u] + cols[i][u] * scal
        for u in range(dim):
            v = comb[u].val()
            if v is not None and v < 1:
                raise PrecisionError("saturation step failed to divide by t")
            comb[u] = comb[u] * base.monomial(-1, one)
        mv = _min_val(comb)
        if mv is None:
            raise PrecisionError("saturation produced a zero column")
        cols[last] = [x * base.monomial(-mv, one) for x in comb]
    out = []
    for c in cols:
        out.append([c[u] * base.monomial(D[u // N][u % N], one)
                    for u in range(dim)])
    return MatrixLattice(base, dim, out, canonical=True)


# ---------------------------------------------------------------------------
# additive characters through the trace pairing
# ---------------------------------------------------------------------------

def absolute_trace(u) -> int:
    """Trace from the residue field down to the prime field, as an integer
    exponent mod p."""
    k = u.owner
    acc = k.zero
    for i in range(k.f):
        acc = acc + residue.frobenius(u, i)
    coords = list(acc.coords) + [0] * (k.f - len(acc.coords))
    if any(coords[1:]):
        raise DomainError("absolute trace left the prime field (bug)")
    return coords[0] % k.p


def eval_psi_c(c: Mat, y: Mat) -> int:
    """Exponent (mod p) of the standard character at trace(c*y): the
    absolute trace of the t^0 digit."""
    z = (c @ y).trace()
    if z.prec is not INF and z.prec <= 0:
        raise PrecisionError("t^0 digit of the trace is below precision")
    d0 = z.digits.get(0)
    if d0 is None:
        return 0
    return absolute_trace(d0)


def psi_witness(delta: Mat, chain: ChainRealized, m: int):
    """A matrix y in the m-th radical power with psi(trace(delta*y)) != 0,
    or None when the character pairing annihilates the whole lattice."""
    base = delta.base
    kF = base.residue
    N = delta.n
    D = chain.filt_bound(m)
    for i in range(N):
        for k in range(N):
            entry = delta.rows[k][i]
            for v, a in entry.digits.items():
                if v + D[i][k] > 0:
                    continue
                s = -v - D[i][k]
                for j in range(kF.f):
                    u = kF.elem(tuple([0] * j + [1] + [0] * (kF.f - j - 1)))
                    if absolute_trace(a * u) % base.p != 0:
                        return Mat.monomial_entry(base, N, i, k, D[i][k] + s, u)
    return None
