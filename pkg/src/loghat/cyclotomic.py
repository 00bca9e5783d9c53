"""Exact arithmetic in Q(zeta_r) with the Galois-theoretic predicates the
classification needs: conjugation, trace, inverse-different membership,
total reality and total positivity.

Elements are stored in the power basis 1, zeta, ..., zeta^(phi(r)-1);
arithmetic is reduced modulo the r-th cyclotomic polynomial.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .corealg import (
    POS_INF,
    CorealgError,
    Endpoint,
    IntPoly,
    PsdStatus,
    QMatrix,
    char_poly_frac,
    poly_divexact,
    poly_divmod_q,
    psd_status,
    squarefree_part,
    sturm_count,
)


class CyclotomicError(ValueError):
    pass


def euler_phi(r: int) -> int:
    if r < 1:
        raise CyclotomicError("conductor must be positive")
    out = r
    n = r
    p = 2
    while p * p <= n:
        if n % p == 0:
            while n % p == 0:
                n //= p
            out -= out // p
        p += 1
    if n > 1:
        out -= out // n
    return out


@lru_cache(maxsize=None)
def cyclotomic_poly(r: int) -> IntPoly:
    """The r-th cyclotomic polynomial F_r, by iterated exact division of
    theta^r - 1 by F_d over the proper divisors d of r."""
    if r < 1:
        raise CyclotomicError("conductor must be positive")
    num = IntPoly([-1] + [0] * (r - 1) + [1])
    for d in range(1, r):
        if r % d == 0:
            num = poly_divexact(num, cyclotomic_poly(d))
    assert num.degree == euler_phi(r)
    return num


@lru_cache(maxsize=None)
def _zeta_power(r: int, m: int) -> tuple[Fraction, ...]:
    """Coordinates of zeta_r^m in the power basis."""
    phi = euler_phi(r)
    m %= r
    if m < phi:
        return tuple(Fraction(1) if i == m else Fraction(0) for i in range(phi))
    num = [Fraction(0)] * m + [Fraction(1)]
    _, rem = poly_divmod_q(num, [Fraction(c) for c in cyclotomic_poly(r).coeffs])
    rem += [Fraction(0)] * (phi - len(rem))
    return tuple(rem)


@dataclass(frozen=True)
class CycloElem:
    """Element of Q(zeta_r) in the power basis; carries the conductor r."""

    r: int
    coeffs: tuple[Fraction, ...]

    def __init__(self, r: int, coeffs: Iterable):
        phi = euler_phi(r)
        c = tuple(Fraction(x) for x in coeffs)
        if len(c) != phi:
            raise CyclotomicError(f"need {phi} coordinates for conductor {r}, got {len(c)}")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "coeffs", c)

    # -- constructors ------------------------------------------------------
    @classmethod
    def from_rational(cls, r: int, x) -> "CycloElem":
        phi = euler_phi(r)
        return cls(r, [Fraction(x)] + [0] * (phi - 1))

    @classmethod
    def zeta(cls, r: int) -> "CycloElem":
        return cls(r, _zeta_power(r, 1))

    @classmethod
    def from_poly_coeffs(cls, r: int, coeffs: Sequence) -> "CycloElem":
        """Value of the polynomial (lowest degree first) at zeta_r."""
        phi = euler_phi(r)
        acc = [Fraction(0)] * phi
        for m, c in enumerate(coeffs):
            c = Fraction(c)
            if c == 0:
                continue
            zp = _zeta_power(r, m)
            for i in range(phi):
                acc[i] += c * zp[i]
        return cls(r, acc)

    # -- predicates --------------------------------------------------------
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    # -- field arithmetic ---------------------------------------------------
    def _check(self, other: "CycloElem") -> None:
        if self.r != other.r:
            raise CyclotomicError(f"conductor mismatch: {self.r} vs {other.r}")

    def __add__(self, other: "CycloElem") -> "CycloElem":
        self._check(other)
        return CycloElem(self.r, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other: "CycloElem") -> "CycloElem":
        self._check(other)
        return CycloElem(self.r, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self) -> "CycloElem":
        return CycloElem(self.r, [-a for a in self.coeffs])

    def __mul__(self, other) -> "CycloElem":
        if isinstance(other, (int, Fraction)):
            return CycloElem(self.r, [Fraction(other) * a for a in self.coeffs])
        self._check(other)
        prod = [Fraction(0)] * (2 * len(self.coeffs) - 1 or 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                prod[i + j] += a * b
        return CycloElem.from_poly_coeffs(self.r, prod)

    __rmul__ = __mul__

    def invert(self) -> "CycloElem":
        """Inverse via the extended Euclidean algorithm against F_r."""
        if self.is_zero():
            raise ZeroDivisionError("inversion of 0 in Q(zeta_r)")
        f = [Fraction(c) for c in cyclotomic_poly(self.r).coeffs]
        a = list(self.coeffs)
        # extended gcd of a and f over Q: s*a + t*f = g (constant)
        r0, r1 = a, f
        s0, s1 = [Fraction(1)], [Fraction(0)]
        while any(r1):
            q, rem = poly_divmod_q(r0, r1)
            r0, r1 = r1, rem
            qs1 = _poly_mul_q(q, s1)
            s0, s1 = s1, _poly_sub_q(s0, qs1)
        if len(r0) != 1:
            raise CyclotomicError("element not invertible modulo F_r")
        g = r0[0]
        inv_coeffs = [c / g for c in s0]
        return CycloElem.from_poly_coeffs(self.r, inv_coeffs)

    def __truediv__(self, other) -> "CycloElem":
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / Fraction(other))
        return self * other.invert()

    def galois(self, s: int) -> "CycloElem":
        """Image under zeta -> zeta^s (requires gcd(s, r) = 1)."""
        if math.gcd(s % self.r, self.r) != 1:
            raise CyclotomicError("galois map needs s coprime to r")
        phi = len(self.coeffs)
        acc = [Fraction(0)] * phi
        for j, c in enumerate(self.coeffs):
            if c == 0:
                continue
            zp = _zeta_power(self.r, (s * j) % self.r)
            for i in range(phi):
                acc[i] += c * zp[i]
        return CycloElem(self.r, acc)

    def conj(self) -> "CycloElem":
        """Complex conjugation zeta -> zeta^(-1)."""
        return self.galois(self.r - 1 if self.r > 1 else 1)

    # -- traces and multiplication matrix ------------------------------------
    def mult_matrix(self) -> QMatrix:
        """Rational matrix of multiplication by self on Q(zeta_r), columns
        indexed by the power basis."""
        phi = len(self.coeffs)
        cols = []
        for j in range(phi):
            zj = CycloElem(self.r, _zeta_power(self.r, j))
            cols.append((self * zj).coeffs)
        return QMatrix.coerce([[cols[j][i] for j in range(phi)] for i in range(phi)])

    def trace(self) -> Fraction:
        m = self.mult_matrix()
        return sum(m.entries[i][i] for i in range(m.rows))

    def norm(self) -> Fraction:
        return self.mult_matrix().det()

    def __str__(self) -> str:
        return f"CycloElem(r={self.r}, {list(self.coeffs)})"


def _poly_mul_q(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _poly_sub_q(a, b):
    n = max(len(a), len(b))
    a = list(a) + [Fraction(0)] * (n - len(a))
    b = list(b) + [Fraction(0)] * (n - len(b))
    out = [x - y for x, y in zip(a, b)]
    while out and out[-1] == 0:
        out.pop()
    return out


def trace(x: CycloElem) -> Fraction:
    return x.trace()


def conj(x: CycloElem) -> CycloElem:
    return x.conj()


def is_totally_real(x: CycloElem) -> bool:
    return x.conj() == x


def is_totally_positive(x: CycloElem) -> bool:
    """True iff x is nonzero, fixed by conjugation, and every real embedding
    of x is positive.

    Root location is decided exactly: the squarefree part of the
    characteristic polynomial of multiplication-by-x has all its roots real
    and in (0, oo) iff its Sturm count on (0, oo) equals its degree.
    """
    if x.is_zero() or x.conj() != x:
        return False
    cp = char_poly_frac(x.mult_matrix())
    den = math.lcm(*(c.denominator for c in cp))
    p = IntPoly([c * den for c in cp])
    sf = squarefree_part(p)
    return sturm_count(p, Endpoint.rational(0), POS_INF) == sf.degree


def is_totally_nonneg(x: CycloElem) -> bool:
    """Totally positive or zero; the cone the classification spaces use."""
    return x.is_zero() or is_totally_positive(x)


def in_inverse_different(x: CycloElem) -> bool:
    """Membership in the trace-dual lattice of Z[zeta_r]: Tr(x * y) in Z for
    all y in Z[zeta_r], checked on the power basis."""
    phi = len(x.coeffs)
    for j in range(phi):
        zj = CycloElem(x.r, _zeta_power(x.r, j))
        if (x * zj).trace().denominator != 1:
            return False
    return True


@lru_cache(maxsize=None)
def _discriminant_abs(r: int) -> int:
    """|disc(F_r)| via the trace-form Gram determinant of the power basis."""
    phi = euler_phi(r)
    gram = [
        [
            CycloElem(r, _zeta_power(r, i + j)).trace()
            for j in range(phi)
        ]
        for i in range(phi)
    ]
    d = QMatrix.coerce(gram).det()
    assert d.denominator == 1
    return abs(d.numerator)


@lru_cache(maxsize=None)
def inverse_different_generator(r: int) -> CycloElem:
    """Generator g = 1 / F_r'(zeta_r) of the inverse different.

    The formula is verified internally against the defining trace condition
    (g * zeta^j lies in the trace dual for every basis power j) and by the
    index [d^{-1} : Z[zeta_r]] matching |disc(F_r)|.
    """
    fprime = cyclotomic_poly(r).derivative()
    g = CycloElem.from_poly_coeffs(r, fprime.coeffs).invert()
    phi = euler_phi(r)
    for j in range(phi):
        if not in_inverse_different(g * CycloElem(r, _zeta_power(r, j))):
            raise CyclotomicError(f"inverse-different generator failed trace check for r={r}")
    index = Fraction(1) / abs(g.norm())
    if index != _discriminant_abs(r):
        raise CyclotomicError(f"inverse-different index mismatch for r={r}")
    return g


# ---------------------------------------------------------------------------
# matrices over Q(zeta_r)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CycloMatrix:
    """Square matrix over Q(zeta_r); all entries share the conductor."""

    r: int
    size: int
    entries: tuple[tuple[CycloElem, ...], ...]

    @classmethod
    def from_rows(cls, r: int, rows: Sequence[Sequence[CycloElem]]) -> "CycloMatrix":
        ent = tuple(tuple(rows[i][j] for j in range(len(rows))) for i in range(len(rows)))
        for row in ent:
            for x in row:
                if x.r != r:
                    raise CyclotomicError("conductor mismatch in CycloMatrix")
        return cls(r, len(ent), ent)

    @classmethod
    def identity(cls, r: int, n: int) -> "CycloMatrix":
        one = CycloElem.from_rational(r, 1)
        zero = CycloElem.from_rational(r, 0)
        return cls.from_rows(r, [[one if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def zero(cls, r: int, n: int) -> "CycloMatrix":
        zero = CycloElem.from_rational(r, 0)
        return cls.from_rows(r, [[zero for _ in range(n)] for _ in range(n)])

    def __add__(self, other: "CycloMatrix") -> "CycloMatrix":
        return CycloMatrix.from_rows(
            self.r,
            [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)],
        )

    def __sub__(self, other: "CycloMatrix") -> "CycloMatrix":
        return CycloMatrix.from_rows(
            self.r,
            [[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)],
        )

    def __mul__(self, other: "CycloMatrix") -> "CycloMatrix":
        n = self.size
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = CycloElem.from_rational(self.r, 0)
                for l in range(n):
                    acc = acc + self.entries[i][l] * other.entries[l][j]
                row.append(acc)
            rows.append(row)
        return CycloMatrix.from_rows(self.r, rows)

    def scale(self, c: CycloElem) -> "CycloMatrix":
        return CycloMatrix.from_rows(
            self.r, [[c * x for x in row] for row in self.entries]
        )

    def conj_transpose(self) -> "CycloMatrix":
        n = self.size
        return CycloMatrix.from_rows(
            self.r, [[self.entries[j][i].conj() for j in range(n)] for i in range(n)]
        )

    def is_hermitian(self) -> bool:
        return self == self.conj_transpose()

    def trace_elem(self) -> CycloElem:
        acc = CycloElem.from_rational(self.r, 0)
        for i in range(self.size):
            acc = acc + self.entries[i][i]
        return acc

    def det(self) -> CycloElem:
        n = self.size
        mat = [list(row) for row in self.entries]
        det = CycloElem.from_rational(self.r, 1)
        sign = 1
        for k in range(n):
            piv = None
            for i in range(k, n):
                if not mat[i][k].is_zero():
                    piv = i
                    break
            if piv is None:
                return CycloElem.from_rational(self.r, 0)
            if piv != k:
                mat[k], mat[piv] = mat[piv], mat[k]
                sign = -sign
            det = det * mat[k][k]
            inv = mat[k][k].invert()
            for i in range(k + 1, n):
                if mat[i][k].is_zero():
                    continue
                f = mat[i][k] * inv
                for j in range(k, n):
                    mat[i][j] = mat[i][j] - f * mat[k][j]
        return det * sign if sign == -1 else det

    def invert(self) -> "CycloMatrix":
        n = self.size
        zero = CycloElem.from_rational(self.r, 0)
        one = CycloElem.from_rational(self.r, 1)
        mat = [list(row) + [one if i == j else zero for j in range(n)]
               for i, row in enumerate(self.entries)]
        for k in range(n):
            piv = None
            for i in range(k, n):
                if not mat[i][k].is_zero():
                    piv = i
                    break
            if piv is None:
                raise CyclotomicError("singular matrix over Q(zeta_r)")
            mat[k], mat[piv] = mat[piv], mat[k]
            inv = mat[k][k].invert()
            mat[k] = [x * inv for x in mat[k]]
            for i in range(n):
                if i != k and not mat[i][k].is_zero():
                    f = mat[i][k]
                    mat[i] = [x - f * y for x, y in zip(mat[i], mat[k])]
        return CycloMatrix.from_rows(self.r, [row[n:] for row in mat])

    def is_integral(self) -> bool:
        return all(x.is_integral() for row in self.entries for x in row)

    def regular_rep(self) -> QMatrix:
        """The size*phi(r) rational matrix acting on the power-basis
        coordinates of Q(zeta_r)^size (block (i,j) is the multiplication
        matrix of entry (i,j))."""
        phi = euler_phi(self.r)
        n = self.size * phi
        out = [[Fraction(0)] * n for _ in range(n)]
        for i in range(self.size):
            for j in range(self.size):
                block = self.entries[i][j].mult_matrix()
                for bi in range(phi):
                    for bj in range(phi):
                        out[i * phi + bi][j * phi + bj] = block.entries[bi][bj]
        return QMatrix.coerce(out)
