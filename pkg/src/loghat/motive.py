"""Symbolic log 1-motives over a finite log point: Frobenius characteristic
polynomials, Weil-weight spectra, the isogeny decomposition into a pure log
part and an abelian part, the log/classical splitting, and Weil-polynomial
weight classification.

Abelian varieties appear only through their weight-1 Weil polynomials; the
classical Honda-Tate theorem is taken as the identification of their isogeny
classes with those polynomials.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace
from fractions import Fraction

import sympy

from .corealg import (
    Endpoint,
    IntPoly,
    poly_divexact,
    reciprocal_scale,
    squarefree_part,
    sturm_count,
)
from .cyclotomic import cyclotomic_poly, euler_phi
from .gammamod import GammaModule, cyclotomic_multiplicities, is_simple
from .pairing import LatticePairing, is_pointwise_polarizable


class MotiveError(ValueError):
    pass


def is_prime_power(q: int) -> bool:
    if q < 2:
        return False
    for p in range(2, math.isqrt(q) + 1):
        if q % p == 0:
            while q % p == 0:
                q //= p
            return q == 1
    return True


def _factor_q(p: IntPoly) -> list[IntPoly]:
    """Irreducible integer factors of p over Q, with multiplicity."""
    if p.is_zero():
        raise MotiveError("cannot factor the zero polynomial")
    x = sympy.Symbol("x")
    expr = sum(int(c) * x**i for i, c in enumerate(p.coeffs))
    _, factors = sympy.factor_list(sympy.Poly(expr, x))
    out = []
    for poly, mult in factors:
        coeffs = [int(c) for c in reversed(sympy.Poly(poly, x).all_coeffs())]
        out.extend([IntPoly(coeffs)] * mult)
    return out


def is_irreducible_z(p: IntPoly) -> bool:
    if p.degree < 1:
        return False
    return len(_factor_q(p)) == 1


# ---------------------------------------------------------------------------
# weight classification
# ---------------------------------------------------------------------------

def _perfect_square_root(q: int) -> int | None:
    s = math.isqrt(q)
    return s if s * s == q else None


def weight_check(p: IntPoly, q: int, w: int) -> bool:
    """Whether the monic irreducible p is a Weil polynomial of weight w
    (all complex roots of absolute value q^(w/2)).

    Weight 0 reduces to p being a cyclotomic polynomial; weight 2 to the
    reciprocal normalization being one; weight 1 to the real Weil test
    p = theta^g h(theta + q/theta) with h totally real on (-2 sqrt(q),
    2 sqrt(q)), plus the special factors theta^2 - q and, for square q,
    theta +- sqrt(q).
    """
    if w not in (0, 1, 2):
        raise MotiveError("weight must be 0, 1 or 2")
    if not is_prime_power(q):
        raise MotiveError(f"{q} is not a prime power")
    if not p.is_monic() or p.degree < 1:
        raise MotiveError("weight_check needs a monic polynomial of positive degree")
    if not is_irreducible_z(p):
        raise MotiveError("weight_check needs an irreducible polynomial")
    if w == 0:
        return _is_cyclotomic(p)
    if w == 2:
        rec = reciprocal_scale(p, q)
        lead = rec[-1]
        norm = [c / lead for c in rec]
        if any(c.denominator != 1 for c in norm):
            return False
        return _is_cyclotomic(IntPoly([c.numerator for c in norm]))
    # w == 1
    d = p.degree
    if d == 1:
        s = _perfect_square_root(q)
        return s is not None and p in (IntPoly([-s, 1]), IntPoly([s, 1]))
    if p == IntPoly([-q, 0, 1]):
        return True  # theta^2 - q, irreducible only for non-square q
    if d % 2 != 0:
        return False
    g = d // 2
    h = _real_weil_half(p, q, g)
    if h is None:
        return False
    sq = _perfect_square_root(q)
    if sq is not None:
        lo, hi = Endpoint.rational(-2 * sq), Endpoint.rational(2 * sq)
    else:
        lo, hi = Endpoint.quadratic(0, -2, q), Endpoint.quadratic(0, 2, q)
    return sturm_count(h, lo, hi) == squarefree_part(h).degree


def _is_cyclotomic(p: IntPoly) -> bool:
    d = p.degree
    bound = 2 * d * d + 6
    for r in range(1, bound + 1):
        if euler_phi(r) == d and cyclotomic_poly(r) == p:
            return True
    return False


def cyclotomic_conductor(p: IntPoly) -> int | None:
    d = p.degree
    bound = 2 * d * d + 6
    for r in range(1, bound + 1):
        if euler_phi(r) == d and cyclotomic_poly(r) == p:
            return r
    return None


def _real_weil_half(p: IntPoly, q: int, g: int) -> IntPoly | None:
    """Solve p(theta) = theta^g h(theta + q/theta) for a monic integer h of
    degree g by linear algebra on coefficients; None when no solution."""
    # theta^(g-j) (theta^2 + q)^j has integer coefficients; p = sum h_j * that
    cols = []
    for j in range(g + 1):
        term = IntPoly([0] * (g - j) + [1])  # theta^(g-j)
        term = term * (IntPoly([q, 0, 1]) ** j)
        coeffs = list(term.coeffs) + [0] * (2 * g + 1 - len(term.coeffs))
        cols.append(coeffs)
    target = list(p.coeffs) + [0] * (2 * g + 1 - len(p.coeffs))
    # solve sum_j h_j cols[j] = target over Q
    from .corealg import QMatrix

    mat = QMatrix.coerce([[cols[j][i] for j in range(g + 1)] for i in range(2 * g + 1)])
    aug = QMatrix.coerce(
        [[cols[j][i] for j in range(g + 1)] + [target[i]] for i in range(2 * g + 1)]
    )
    if mat.rank() != aug.rank():
        return None
    # unique solution since the terms are linearly independent
    sol = _solve_overdetermined(mat, target)
    if sol is None or any(x.denominator != 1 for x in sol):
        return None
    return IntPoly([x.numerator for x in sol])


def _solve_overdetermined(mat, target):
    rows = [list(r) + [Fraction(t)] for r, t in zip(mat.entries, target)]
    ncols = mat.cols
    rank = 0
    pivots = []
    for col in range(ncols):
        piv = None
        for i in range(rank, len(rows)):
            if rows[i][col] != 0:
                piv = i
                break
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = 1 / rows[rank][col]
        rows[rank] = [x * inv for x in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[rank])]
        pivots.append(col)
        rank += 1
    for i in range(rank, len(rows)):
        if rows[i][-1] != 0:
            return None
    sol = [Fraction(0)] * ncols
    for i, col in enumerate(pivots):
        sol[col] = rows[i][-1]
    return sol


# ---------------------------------------------------------------------------
# symbolic motives
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeilPoly1:
    """Monic integer polynomial all of whose irreducible factors pass the
    weight-1 test for q; poly = 1 encodes a trivial abelian part."""

    q: int
    poly: IntPoly

    def __post_init__(self):
        if not is_prime_power(self.q):
            raise MotiveError(f"{self.q} is not a prime power")
        if self.poly.is_zero() or not self.poly.is_monic():
            raise MotiveError("Weil polynomial must be monic")
        for f in _factor_q(self.poly):
            if f.degree >= 1 and not weight_check(f, self.q, 1):
                raise MotiveError(f"factor {f} is not a weight-1 Weil polynomial")

    def factors(self) -> list[IntPoly]:
        if self.poly.degree < 1:
            return []
        return _factor_q(self.poly)


@dataclass(frozen=True)
class SymbolicLogOneMotive:
    """Desk-scale stand-in for a pointwise polarizable log 1-motive over the
    log point with chart N^k and residue field F_q: lattice part Y, torus
    character module X, the monodromy pairing between them, the weight-1
    polynomial of the abelian part, and a flag recording a nonzero classical
    component of the defining map."""

    q: int
    k: int
    Y: GammaModule
    X: GammaModule
    pairing: LatticePairing
    abelian: WeilPoly1
    classical_torsion: bool = False

    def __post_init__(self):
        if not is_prime_power(self.q):
            raise MotiveError(f"{self.q} is not a prime power")
        if self.pairing.M != self.Y or self.pairing.N != self.X:
            raise MotiveError("monodromy pairing must live on (Y, X)")
        if self.pairing.k != self.k:
            raise MotiveError("pairing arity must match k")
        if self.abelian.q != self.q:
            raise MotiveError("abelian part must share q")


def torus_charpoly(x: GammaModule, q: int) -> IntPoly:
    """Characteristic polynomial of Frobenius on the torus with character
    module x: (-theta)^n / det * P_x(q / theta), a monic integer polynomial
    whose roots are q / alpha for roots alpha of P_x."""
    if not is_prime_power(q):
        raise MotiveError(f"{q} is not a prime power")
    if x.rank == 0:
        return IntPoly([1])
    px = x.charpoly()
    from .corealg import imat_det

    det = imat_det(x.frob)
    n = x.rank
    sign = (-1) ** n
    rec = reciprocal_scale(px, q)
    coeffs = [Fraction(c * sign, det) for c in rec]
    if any(c.denominator != 1 for c in coeffs):
        raise MotiveError("torus characteristic polynomial not integral")
    out = IntPoly([c.numerator for c in coeffs])
    assert out.is_monic() and out.degree == n
    return out


def frobenius_charpoly_motive(m: SymbolicLogOneMotive) -> IntPoly:
    """P_Y * P_B * P_T; degree rank(Y) + deg(abelian) + rank(X)."""
    p_y = m.Y.charpoly() if m.Y.rank else IntPoly([1])
    p_b = m.abelian.poly if m.abelian.poly.degree >= 1 else IntPoly([1])
    p_t = torus_charpoly(m.X, m.q)
    out = p_y * p_b * p_t
    assert out.degree == m.Y.rank + max(m.abelian.poly.degree, 0) + m.X.rank
    return out


def weight_spectrum(m: SymbolicLogOneMotive) -> list[tuple[int, object]]:
    """Multiset of (weight, class key): weight-0 keys are conductors from Y,
    weight-2 keys conductors from X (the class of q zeta_r^{-1}), weight-1
    keys the irreducible factors of the abelian polynomial."""
    out: list[tuple[int, object]] = []
    for r, a in sorted(cyclotomic_multiplicities(m.Y).items()):
        out.extend([(0, r)] * a)
    for f in m.abelian.factors():
        out.append((1, tuple(f.coeffs)))
    for r, a in sorted(cyclotomic_multiplicities(m.X).items()):
        out.extend([(2, r)] * a)
    return sorted(out, key=repr)


def split_classical(m: SymbolicLogOneMotive) -> SymbolicLogOneMotive:
    """Clear the classical-torsion flag: over a finite field the classical
    component of the defining map is killed by some positive integer, so the
    isogeny class is unchanged and all classification data is preserved."""
    if not m.classical_torsion:
        return m
    return replace(m, classical_torsion=False)


def decompose(
    m: SymbolicLogOneMotive, rng: random.Random | None = None
) -> tuple[LatticePairing, WeilPoly1, SymbolicLogOneMotive]:
    """Split off the abelian part: returns the monodromy pairing (the pure
    log part), the abelian Weil polynomial, and the motive with the
    classical component cleared.  The pairing part must be pointwise
    polarizable; otherwise the input was not a valid polarizable motive."""
    rng = rng or random.Random(0)
    verdict = is_pointwise_polarizable(m.pairing, rng)
    if not verdict.is_yes:
        raise MotiveError(
            f"monodromy pairing is not pointwise polarizable ({verdict.status}: "
            f"{verdict.reason})"
        )
    return m.pairing, m.abelian, split_classical(m)


def honda_tate_1motive(kind: str, data, q: int) -> tuple[int, object]:
    """Class key of a simple 1-motive part: weight-0 conductor for a lattice,
    weight-2 conductor for a torus character module, weight-1 polynomial for
    an abelian variety."""
    if not is_prime_power(q):
        raise MotiveError(f"{q} is not a prime power")
    if kind == "lattice":
        if not is_simple(data):
            raise MotiveError("lattice part is not simple")
        (r, _), = cyclotomic_multiplicities(data).items()
        return (0, r)
    if kind == "torus":
        if not is_simple(data):
            raise MotiveError("torus character module is not simple")
        (r, _), = cyclotomic_multiplicities(data).items()
        return (2, r)
    if kind == "abelian":
        if not isinstance(data, IntPoly) or not is_irreducible_z(data):
            raise MotiveError("abelian part must be an irreducible polynomial")
        if not weight_check(data, q, 1):
            raise MotiveError("polynomial is not weight 1")
        return (1, tuple(data.coeffs))
    raise MotiveError(f"unknown kind {kind!r}")
