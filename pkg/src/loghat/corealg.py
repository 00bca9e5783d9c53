"""Exact integer/rational kernels: polynomials, matrices, Smith normal form,
Sturm counting with quadratic-irrational endpoints, and rational LDL^T
positivity certificates.

Everything here is immutable and pure; no floating point is used anywhere.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

# Arbitrary-precision rational scalar.  fractions.Fraction already satisfies
# the required invariants (always reduced, positive denominator).
BigRat = Fraction

IntMat = tuple[tuple[int, ...], ...]


class CorealgError(ValueError):
    pass


# ---------------------------------------------------------------------------
# integer matrices as plain tuples
# ---------------------------------------------------------------------------

def imat(rows: Iterable[Iterable[int]]) -> IntMat:
    """Normalize a nested sequence of ints into an immutable matrix."""
    out = tuple(tuple(int(x) for x in row) for row in rows)
    if out and any(len(r) != len(out[0]) for r in out):
        raise CorealgError("ragged matrix")
    return out


def imat_identity(n: int) -> IntMat:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def imat_zero(rows: int, cols: int) -> IntMat:
    return tuple((0,) * cols for _ in range(rows))


def imat_shape(a: IntMat) -> tuple[int, int]:
    return (len(a), len(a[0]) if a else 0)


def imat_mul(a: IntMat, b: IntMat) -> IntMat:
    ra, ca = imat_shape(a)
    rb, cb = imat_shape(b)
    if ca != rb:
        raise CorealgError(f"shape mismatch {ra}x{ca} * {rb}x{cb}")
    bt = tuple(zip(*b)) if b else ()
    return tuple(
        tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a
    )


def imat_add(a: IntMat, b: IntMat) -> IntMat:
    return tuple(tuple(x + y for x, y in zip(r, s)) for r, s in zip(a, b))


def imat_sub(a: IntMat, b: IntMat) -> IntMat:
    return tuple(tuple(x - y for x, y in zip(r, s)) for r, s in zip(a, b))


def imat_scale(c: int, a: IntMat) -> IntMat:
    return tuple(tuple(c * x for x in row) for row in a)


def imat_transpose(a: IntMat) -> IntMat:
    return tuple(zip(*a)) if a else ()


def imat_vec(a: IntMat, v: Sequence[int]) -> tuple[int, ...]:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def imat_det(a: IntMat) -> int:
    """Determinant by fraction-free Bareiss elimination."""
    n, m = imat_shape(a)
    if n != m:
        raise CorealgError("determinant of non-square matrix")
    if n == 0:
        return 1
    mat = [list(row) for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if mat[k][k] == 0:
            for i in range(k + 1, n):
                if mat[i][k] != 0:
                    mat[k], mat[i] = mat[i], mat[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                mat[i][j] = (mat[i][j] * mat[k][k] - mat[i][k] * mat[k][j]) // prev
            mat[i][k] = 0
        prev = mat[k][k]
    return sign * mat[n - 1][n - 1]


def imat_adjugate(a: IntMat) -> IntMat:
    """Adjugate: adj(A) * A = det(A) * I, computed exactly via Fraction inverse."""
    n, m = imat_shape(a)
    if n != m:
        raise CorealgError("adjugate of non-square matrix")
    d = imat_det(a)
    if d == 0:
        # fall back to cofactors; only needed for singular input
        return tuple(
            tuple(
                (-1) ** (i + j) * imat_det(_minor(a, j, i)) for j in range(n)
            )
            for i in range(n)
        )
    inv = QMatrix.coerce(a).inverse()
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            x = inv.entries[i][j] * d
            if x.denominator != 1:
                raise CorealgError("non-integral adjugate entry")
            row.append(x.numerator)
        out.append(tuple(row))
    return tuple(out)


def _minor(a: IntMat, i: int, j: int) -> IntMat:
    return tuple(
        tuple(x for cj, x in enumerate(row) if cj != j)
        for ri, row in enumerate(a)
        if ri != i
    )


def imat_kron(a: IntMat, b: IntMat) -> IntMat:
    ra, ca = imat_shape(a)
    rb, cb = imat_shape(b)
    return tuple(
        tuple(a[i // rb][j // cb] * b[i % rb][j % cb] for j in range(ca * cb))
        for i in range(ra * rb)
    )


# ---------------------------------------------------------------------------
# integer polynomials, lowest degree first
# ---------------------------------------------------------------------------

def _trim(coeffs: Sequence) -> tuple:
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class IntPoly:
    """Polynomial with integer coefficients, lowest degree first.

    The zero polynomial has ``coeffs == ()`` and degree -1.
    """

    coeffs: tuple[int, ...]

    def __init__(self, coeffs: Iterable[int]):
        object.__setattr__(self, "coeffs", _trim([int(c) for c in coeffs]))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> int:
        if self.is_zero():
            raise CorealgError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __add__(self, other: "IntPoly") -> "IntPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [0] * (n - len(self.coeffs))
        b = list(other.coeffs) + [0] * (n - len(other.coeffs))
        return IntPoly([x + y for x, y in zip(a, b)])

    def __sub__(self, other: "IntPoly") -> "IntPoly":
        return self + (-other)

    def __neg__(self) -> "IntPoly":
        return IntPoly([-c for c in self.coeffs])

    def __mul__(self, other) -> "IntPoly":
        if isinstance(other, int):
            return IntPoly([other * c for c in self.coeffs])
        if self.is_zero() or other.is_zero():
            return IntPoly([])
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return IntPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "IntPoly":
        out = IntPoly([1])
        for _ in range(n):
            out = out * self
        return out

    def derivative(self) -> "IntPoly":
        return IntPoly([i * c for i, c in enumerate(self.coeffs)][1:])

    def content(self) -> int:
        return math.gcd(*self.coeffs) if self.coeffs else 0

    def primitive(self) -> "IntPoly":
        c = self.content()
        if c == 0:
            return self
        sign = 1 if self.leading > 0 else -1
        return IntPoly([x // (sign * c) for x in self.coeffs])

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            if i == 0:
                t = str(abs(c))
            else:
                mag = "" if abs(c) == 1 else str(abs(c))
                t = f"{mag}θ" if i == 1 else f"{mag}θ^{i}"
            if not terms:
                terms.append(t if c > 0 else "-" + t)
            else:
                terms.append(("+ " if c > 0 else "- ") + t)
        return " ".join(terms)


ONE_POLY = IntPoly([1])
THETA = IntPoly([0, 1])


def poly_divmod_q(num: Sequence[Fraction], den: Sequence[Fraction]):
    """Division with remainder over Q; inputs/outputs are coefficient lists."""
    num = [Fraction(c) for c in num]
    den = [Fraction(c) for c in den]
    while den and den[-1] == 0:
        den.pop()
    if not den:
        raise ZeroDivisionError("polynomial division by zero")
    quo = [Fraction(0)] * max(0, len(num) - len(den) + 1)
    rem = list(num)
    while len(rem) >= len(den) and any(rem):
        while rem and rem[-1] == 0:
            rem.pop()
        if len(rem) < len(den):
            break
        k = len(rem) - len(den)
        q = rem[-1] / den[-1]
        quo[k] = q
        for i, d in enumerate(den):
            rem[k + i] -= q * d
        rem.pop()
    while rem and rem[-1] == 0:
        rem.pop()
    return quo, rem


def poly_divexact(num: IntPoly, den: IntPoly) -> IntPoly:
    """Exact division in Z[θ]; raises if the division leaves a remainder."""
    quo, rem = poly_divmod_q(num.coeffs, den.coeffs)
    if rem:
        raise CorealgError("inexact polynomial division")
    if any(q.denominator != 1 for q in quo):
        raise CorealgError("non-integral exact quotient")
    return IntPoly([q.numerator for q in quo])


def poly_divides(den: IntPoly, num: IntPoly) -> bool:
    if den.is_zero():
        return num.is_zero()
    _, rem = poly_divmod_q(num.coeffs, den.coeffs)
    return not rem


def poly_gcd(a: IntPoly, b: IntPoly) -> IntPoly:
    """Primitive gcd in Z[θ] via the Euclidean algorithm over Q."""
    fa = [Fraction(c) for c in a.coeffs]
    fb = [Fraction(c) for c in b.coeffs]
    while fb:
        _, fr = poly_divmod_q(fa, fb)
        fa, fb = fb, fr
    if not fa:
        return IntPoly([])
    lcm_den = math.lcm(*(c.denominator for c in fa))
    return IntPoly([c * lcm_den for c in fa]).primitive()


def squarefree_part(p: IntPoly) -> IntPoly:
    """p / gcd(p, p'), normalized primitive with positive leading coefficient."""
    if p.is_zero() or p.degree == 0:
        return IntPoly([1])
    g = poly_gcd(p, p.derivative())
    quo, _ = poly_divmod_q(p.coeffs, g.coeffs)
    lcm_den = math.lcm(*(c.denominator for c in quo))
    return IntPoly([c * lcm_den for c in quo]).primitive()


def reciprocal_scale(p: IntPoly, q: int) -> list[Fraction]:
    """Coefficients of θ^deg(p) * p(q/θ), lowest degree first, over Q."""
    d = p.degree
    out = [Fraction(0)] * (d + 1)
    for j, c in enumerate(p.coeffs):
        out[d - j] = Fraction(c) * q**j
    return out


# ---------------------------------------------------------------------------
# rational matrices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QMatrix:
    """Dense rational matrix, row-major, immutable."""

    rows: int
    cols: int
    entries: tuple[tuple[Fraction, ...], ...]

    @classmethod
    def coerce(cls, data) -> "QMatrix":
        if isinstance(data, QMatrix):
            return data
        ent = tuple(tuple(Fraction(x) for x in row) for row in data)
        if ent and any(len(r) != len(ent[0]) for r in ent):
            raise CorealgError("ragged matrix")
        return cls(len(ent), len(ent[0]) if ent else 0, ent)

    @classmethod
    def identity(cls, n: int) -> "QMatrix":
        return cls.coerce([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    def __mul__(self, other: "QMatrix") -> "QMatrix":
        other = QMatrix.coerce(other)
        if self.cols != other.rows:
            raise CorealgError("shape mismatch in matrix product")
        bt = tuple(zip(*other.entries)) if other.entries else ()
        ent = tuple(
            tuple(sum(x * y for x, y in zip(row, col)) for col in bt)
            for row in self.entries
        )
        return QMatrix(self.rows, other.cols, ent)

    def __add__(self, other: "QMatrix") -> "QMatrix":
        return QMatrix.coerce(
            [[x + y for x, y in zip(r, s)] for r, s in zip(self.entries, other.entries)]
        )

    def __sub__(self, other: "QMatrix") -> "QMatrix":
        return QMatrix.coerce(
            [[x - y for x, y in zip(r, s)] for r, s in zip(self.entries, other.entries)]
        )

    def scale(self, c) -> "QMatrix":
        c = Fraction(c)
        return QMatrix.coerce([[c * x for x in row] for row in self.entries])

    def transpose(self) -> "QMatrix":
        return QMatrix(self.cols, self.rows, tuple(zip(*self.entries)) if self.entries else ())

    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_symmetric(self) -> bool:
        return self.is_square() and all(
            self.entries[i][j] == self.entries[j][i]
            for i in range(self.rows)
            for j in range(i)
        )

    def is_integer(self) -> bool:
        return all(x.denominator == 1 for row in self.entries for x in row)

    def to_int(self) -> IntMat:
        if not self.is_integer():
            raise CorealgError("matrix has non-integer entries")
        return tuple(tuple(x.numerator for x in row) for row in self.entries)

    def det(self) -> Fraction:
        if not self.is_square():
            raise CorealgError("determinant of non-square matrix")
        n = self.rows
        mat = [list(row) for row in self.entries]
        det = Fraction(1)
        for k in range(n):
            piv = None
            for i in range(k, n):
                if mat[i][k] != 0:
                    piv = i
                    break
            if piv is None:
                return Fraction(0)
            if piv != k:
                mat[k], mat[piv] = mat[piv], mat[k]
                det = -det
            det *= mat[k][k]
            inv = 1 / mat[k][k]
            for i in range(k + 1, n):
                f = mat[i][k] * inv
                if f == 0:
                    continue
                for j in range(k, n):
                    mat[i][j] -= f * mat[k][j]
        return det

    def inverse(self) -> "QMatrix":
        if not self.is_square():
            raise CorealgError("inverse of non-square matrix")
        n = self.rows
        mat = [list(row) + [Fraction(int(i == j)) for j in range(n)]
               for i, row in enumerate(self.entries)]
        for k in range(n):
            piv = None
            for i in range(k, n):
                if mat[i][k] != 0:
                    piv = i
                    break
            if piv is None:
                raise CorealgError("singular matrix")
            mat[k], mat[piv] = mat[piv], mat[k]
            inv = 1 / mat[k][k]
            mat[k] = [x * inv for x in mat[k]]
            for i in range(n):
                if i != k and mat[i][k] != 0:
                    f = mat[i][k]
                    mat[i] = [x - f * y for x, y in zip(mat[i], mat[k])]
        return QMatrix.coerce([row[n:] for row in mat])

    def rank(self) -> int:
        mat = [list(row) for row in self.entries]
        rank = 0
        col = 0
        while rank < len(mat) and col < self.cols:
            piv = None
            for i in range(rank, len(mat)):
                if mat[i][col] != 0:
                    piv = i
                    break
            if piv is None:
                col += 1
                continue
            mat[rank], mat[piv] = mat[piv], mat[rank]
            inv = 1 / mat[rank][col]
            mat[rank] = [x * inv for x in mat[rank]]
            for i in range(len(mat)):
                if i != rank and mat[i][col] != 0:
                    f = mat[i][col]
                    mat[i] = [x - f * y for x, y in zip(mat[i], mat[rank])]
            rank += 1
            col += 1
        return rank

    def kernel_basis(self) -> list[tuple[Fraction, ...]]:
        """Basis of the right kernel over Q."""
        m = [list(row) for row in self.entries]
        rows, cols = self.rows, self.cols
        pivots: list[int] = []
        r = 0
        for c in range(cols):
            piv = None
            for i in range(r, rows):
                if m[i][c] != 0:
                    piv = i
                    break
            if piv is None:
                continue
            m[r], m[piv] = m[piv], m[r]
            inv = 1 / m[r][c]
            m[r] = [x * inv for x in m[r]]
            for i in range(rows):
                if i != r and m[i][c] != 0:
                    f = m[i][c]
                    m[i] = [x - f * y for x, y in zip(m[i], m[r])]
            pivots.append(c)
            r += 1
            if r == rows:
                break
        free = [c for c in range(cols) if c not in pivots]
        basis = []
        for fc in free:
            v = [Fraction(0)] * cols
            v[fc] = Fraction(1)
            for ri, pc in enumerate(pivots):
                v[pc] = -m[ri][fc]
            basis.append(tuple(v))
        return basis


# ---------------------------------------------------------------------------
# characteristic polynomial
# ---------------------------------------------------------------------------

def char_poly_frac(a: QMatrix) -> list[Fraction]:
    """Monic characteristic polynomial det(θI - A) over Q, lowest degree first.

    Faddeev-LeVerrier recurrence; all divisions are exact over Q.
    """
    if not a.is_square():
        raise CorealgError("characteristic polynomial of non-square matrix")
    n = a.rows
    if n == 0:
        return [Fraction(1)]
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    m = QMatrix.identity(n)
    for k in range(1, n + 1):
        m = a * m
        c = -sum(m.entries[i][i] for i in range(n)) / k
        coeffs[n - k] = c
        if k < n:
            m = m + QMatrix.identity(n).scale(c)
    return coeffs


def char_poly(a) -> IntPoly:
    """Monic characteristic polynomial of a square integer matrix."""
    qa = QMatrix.coerce(a)
    if not qa.is_integer():
        raise CorealgError("char_poly requires integer entries")
    coeffs = char_poly_frac(qa)
    assert all(c.denominator == 1 for c in coeffs)
    return IntPoly([c.numerator for c in coeffs])


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------

def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """g, x, y with x*a + y*b = g = gcd(a, b), g >= 0."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def smith_normal_form(a) -> tuple[IntMat, IntMat, IntMat]:
    """Smith normal form of an integer matrix.

    Returns (U, D, V) with U, V unimodular, D = U*A*V diagonal with
    non-negative entries and d_1 | d_2 | ... .  Entry growth is limited by
    minimal-absolute-value pivot selection and extended-gcd 2x2 unimodular
    steps instead of quotient-and-swap loops.
    """
    a = imat(a)
    rows, cols = imat_shape(a)
    m = [list(r) for r in a]
    u = [list(r) for r in imat_identity(rows)]
    v = [list(r) for r in imat_identity(cols)]

    def swap_rows(i, j):
        m[i], m[j] = m[j], m[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in m:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def gcd_rows(t, i):
        # unimodular 2x2 step making m[t][t] = gcd(m[t][t], m[i][t]), m[i][t] = 0
        at, ai = m[t][t], m[i][t]
        if ai == 0:
            return
        if at != 0 and ai % at == 0:
            q = ai // at
            m[i] = [x - q * y for x, y in zip(m[i], m[t])]
            u[i] = [x - q * y for x, y in zip(u[i], u[t])]
            return
        g, x, y = _xgcd(at, ai)
        pt, pi = at // g, ai // g
        m[t], m[i] = (
            [x * p + y * q for p, q in zip(m[t], m[i])],
            [-pi * p + pt * q for p, q in zip(m[t], m[i])],
        )
        u[t], u[i] = (
            [x * p + y * q for p, q in zip(u[t], u[i])],
            [-pi * p + pt * q for p, q in zip(u[t], u[i])],
        )

    def gcd_cols(t, j):
        at, aj = m[t][t], m[t][j]
        if aj == 0:
            return
        if at != 0 and aj % at == 0:
            q = aj // at
            for row in m:
                row[j] -= q * row[t]
            for row in v:
                row[j] -= q * row[t]
            return
        g, x, y = _xgcd(at, aj)
        pt, pj = at // g, aj // g
        for row in m:
            row[t], row[j] = x * row[t] + y * row[j], -pj * row[t] + pt * row[j]
        for row in v:
            row[t], row[j] = x * row[t] + y * row[j], -pj * row[t] + pt * row[j]

    t = 0
    while t < min(rows, cols):
        piv = None
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                x = abs(m[i][j])
                if x != 0 and (best is None or x < best):
                    best = x
                    piv = (i, j)
        if piv is None:
            break
        swap_rows(t, piv[0])
        swap_cols(t, piv[1])
        while True:
            for i in range(t + 1, rows):
                gcd_rows(t, i)
            for j in range(t + 1, cols):
                gcd_cols(t, j)
            if all(m[i][t] == 0 for i in range(t + 1, rows)) and all(
                m[t][j] == 0 for j in range(t + 1, cols)
            ):
                break
        if m[t][t] < 0:
            m[t] = [-x for x in m[t]]
            u[t] = [-x for x in u[t]]
        # enforce divisibility d_t | entries of the remaining block
        dirty = False
        for i in range(t + 1, rows):
            for j in range(t + 1, cols):
                if m[i][j] % m[t][t] != 0:
                    m[t] = [x + y for x, y in zip(m[t], m[i])]
                    u[t] = [x + y for x, y in zip(u[t], u[i])]
                    dirty = True
                    break
            if dirty:
                break
        if not dirty:
            t += 1

    return imat(u), imat(m), imat(v)


def integer_kernel(a) -> list[tuple[int, ...]]:
    """Basis of the saturated integer kernel {x in Z^n : A x = 0}.

    Unimodular column reduction with extended-gcd steps and systematic
    remainder reduction; much better behaved on the Sylvester-type systems
    used for Hom lattices than a full Smith normal form.
    """
    a = imat(a)
    rows, cols = imat_shape(a)
    if cols == 0:
        return []
    m = [list(col) for col in (zip(*a) if rows else [[]] * cols)]  # columns
    if rows == 0:
        m = [[] for _ in range(cols)]
    v = [[1 if i == j else 0 for i in range(cols)] for j in range(cols)]  # v[j] = column j
    used: list[int] = []
    active = list(range(cols))
    for i in range(rows):
        live = [j for j in active if m[j][i] != 0]
        if not live:
            continue
        while len(live) > 1:
            live.sort(key=lambda j: abs(m[j][i]))
            p = live[0]
            for j in live[1:]:
                q = m[j][i] // m[p][i]
                if q:
                    m[j] = [x - q * y for x, y in zip(m[j], m[p])]
                    v[j] = [x - q * y for x, y in zip(v[j], v[p])]
            live = [j for j in live if m[j][i] != 0]
        p = live[0]
        active.remove(p)
        used.append(p)
    return [tuple(v[j]) for j in active]


def snf_diagonal(a) -> tuple[int, ...]:
    _, d, _ = smith_normal_form(a)
    rows, cols = imat_shape(d)
    return tuple(d[i][i] for i in range(min(rows, cols)))


def cokernel_order(a) -> int:
    """Order of coker(A) for injective A; product of the SNF diagonal."""
    a = imat(a)
    rows, cols = imat_shape(a)
    diag = snf_diagonal(a)
    if len(diag) < cols or any(x == 0 for x in diag):
        raise CorealgError("map is not injective")
    out = 1
    for x in diag:
        out *= x
    return out


# ---------------------------------------------------------------------------
# Sturm counting with endpoints in Q(sqrt(d))
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Endpoint:
    """Interval endpoint: +/-infinity or u + v*sqrt(d) with rational u, v.

    Perfect-square d is folded into the rational part, so a finite endpoint
    has either v == 0 or squarefree-relevant d >= 2.
    """

    u: Fraction
    v: Fraction
    d: int
    infinite: int  # -1, 0, +1

    @classmethod
    def rational(cls, x) -> "Endpoint":
        return cls(Fraction(x), Fraction(0), 1, 0)

    @classmethod
    def quadratic(cls, u, v, d: int) -> "Endpoint":
        u, v = Fraction(u), Fraction(v)
        if d <= 0:
            raise CorealgError("quadratic endpoint needs positive d")
        s = math.isqrt(d)
        if s * s == d:
            return cls.rational(u + v * s)
        if v == 0:
            return cls.rational(u)
        return cls(u, v, d, 0)

    def key(self) -> tuple:
        # ordering key usable only against endpoints sharing d or rational ones
        return (self.infinite, self.u, self.v)


NEG_INF = Endpoint(Fraction(0), Fraction(0), 1, -1)
POS_INF = Endpoint(Fraction(0), Fraction(0), 1, +1)


def _quad_sign(a: Fraction, b: Fraction, d: int) -> int:
    """Exact sign of a + b*sqrt(d), d not a perfect square (or b == 0)."""
    if b == 0:
        return (a > 0) - (a < 0)
    if a == 0:
        return 1 if b > 0 else -1
    if a > 0 and b > 0:
        return 1
    if a < 0 and b < 0:
        return -1
    lhs = a * a
    rhs = b * b * d
    if lhs == rhs:
        return 0  # cannot occur for non-square d
    if a > 0:  # b < 0
        return 1 if lhs > rhs else -1
    return -1 if lhs > rhs else 1  # a < 0, b > 0


def _eval_sign(coeffs: Sequence[Fraction], e: Endpoint) -> int:
    """Exact sign of the polynomial at the endpoint."""
    if e.infinite:
        c = list(coeffs)
        while c and c[-1] == 0:
            c.pop()
        if not c:
            return 0
        lead = 1 if c[-1] > 0 else -1
        deg = len(c) - 1
        if e.infinite > 0:
            return lead
        return lead if deg % 2 == 0 else -lead
    # Horner in Q[sqrt(d)]
    a, b = Fraction(0), Fraction(0)
    for c in reversed(list(coeffs)):
        a, b = a * e.u + b * e.v * e.d + c, a * e.v + b * e.u
    return _quad_sign(a, b, e.d)


def _endpoint_lt(a: Endpoint, b: Endpoint) -> bool:
    if a.infinite or b.infinite:
        return a.infinite < b.infinite
    # a < b  <=>  (a.u - b.u) + a.v*sqrt(a.d) - b.v*sqrt(b.d) < 0
    if a.d == b.d or a.v == 0 or b.v == 0:
        d = max(a.d, b.d)
        va = a.v if a.v != 0 else Fraction(0)
        vb = b.v if b.v != 0 else Fraction(0)
        dd = a.d if a.v != 0 else (b.d if b.v != 0 else 1)
        return _quad_sign(a.u - b.u, va - vb, dd) < 0
    raise CorealgError("cannot compare endpoints over distinct radicals")


def _sign_variations(signs: Sequence[int]) -> int:
    out = 0
    prev = 0
    for s in signs:
        if s == 0:
            continue
        if prev != 0 and s != prev:
            out += 1
        prev = s
    return out


def sturm_count(p: IntPoly, a: Endpoint, b: Endpoint) -> int:
    """Number of distinct real roots of p in the open interval (a, b).

    The squarefree part of p is taken internally, so multiple roots are
    counted once.  Endpoints may be rational, +/-infinity, or u + v*sqrt(d).
    """
    if p.is_zero():
        raise CorealgError("sturm_count of the zero polynomial")
    if not _endpoint_lt(a, b):
        raise CorealgError("need a < b")
    sf = squarefree_part(p)
    if sf.degree <= 0:
        return 0
    chain: list[list[Fraction]] = [
        [Fraction(c) for c in sf.coeffs],
        [Fraction(c) for c in sf.derivative().coeffs],
    ]
    while True:
        last = chain[-1]
        if not last:
            chain.pop()
            break
        if len(last) == 1:
            break
        _, rem = poly_divmod_q(chain[-2], last)
        chain.append([-c for c in rem])
    va = _sign_variations([_eval_sign(c, a) for c in chain])
    vb = _sign_variations([_eval_sign(c, b) for c in chain])
    count = va - vb  # roots in (a, b]
    if not b.infinite and _eval_sign(chain[0], b) == 0:
        count -= 1
    return count


# ---------------------------------------------------------------------------
# exact positive semidefiniteness
# ---------------------------------------------------------------------------

class PsdStatus(enum.Enum):
    PD = "PD"
    PSD_SINGULAR = "PSD-singular"
    INDEFINITE = "indefinite"


def psd_certificate(a) -> tuple[PsdStatus, tuple[Fraction, ...] | None]:
    """Exact PSD verdict by pivoted rational LDL^T elimination.

    Returns (status, witness); for INDEFINITE the witness v is a rational
    vector with v^T A v < 0.
    """
    qa = QMatrix.coerce(a)
    if not qa.is_symmetric():
        raise CorealgError("psd_status requires a symmetric matrix")
    n = qa.rows
    if n == 0:
        return PsdStatus.PD, None
    s = [list(row) for row in qa.entries]  # working Schur complement
    # vecs[i] tracks the original-coordinate vector realizing virtual index i
    vecs = [
        [Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)
    ]
    active = list(range(n))
    rank = 0
    while active:
        # any positive diagonal pivot; remember a negative one if seen
        piv = None
        neg = None
        for i in active:
            if s[i][i] > 0:
                piv = i
                break
            if s[i][i] < 0 and neg is None:
                neg = i
        if piv is None:
            if neg is not None:
                return PsdStatus.INDEFINITE, tuple(vecs[neg])
            # all remaining diagonal entries zero
            off = None
            for i in active:
                for j in active:
                    if i < j and s[i][j] != 0:
                        off = (i, j)
                        break
                if off:
                    break
            if off is None:
                return PsdStatus.PSD_SINGULAR, None
            i, j = off
            # (v_i - sign * v_j)^T A (v_i - sign * v_j) = -2|s_ij|
            sign = 1 if s[i][j] > 0 else -1
            w = [x - sign * y for x, y in zip(vecs[i], vecs[j])]
            return PsdStatus.INDEFINITE, tuple(w)
        d = s[piv][piv]
        rank += 1
        active.remove(piv)
        for i in active:
            f = s[i][piv] / d
            if f == 0:
                continue
            vecs[i] = [x - f * y for x, y in zip(vecs[i], vecs[piv])]
            for j in active:
                s[i][j] -= f * s[piv][j]
            s[i][piv] = Fraction(0)
        for j in active:
            s[piv][j] = Fraction(0)
    return (PsdStatus.PD if rank == n else PsdStatus.PSD_SINGULAR), None


def psd_status(a) -> PsdStatus:
    return psd_certificate(a)[0]
