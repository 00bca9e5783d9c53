"""Classification layer: invariants of simple classes (Weil pairs for k = 1,
tuples of totally-nonnegative cyclotomic elements, matrix-tuple classes
modulo simultaneous conjugation), equivalence testing, simplicity testing,
polarization parametrizations, and endomorphism-ring descriptors.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

import sympy

from .corealg import IntPoly, QMatrix
from .cyclotomic import (
    CycloElem,
    CycloMatrix,
    cyclotomic_poly,
    euler_phi,
    in_inverse_different,
    is_totally_nonneg,
    is_totally_positive,
)
from .gammamod import (
    GammaModule,
    block_model,
    cyclotomic_multiplicities,
    dual_module,
    hom_space,
    is_simple,
)
from .pairing import LatticePairing, PairingError, _rank1_elements, is_pointwise_polarizable


class ClassifyError(ValueError):
    pass


class UnknownVerdict(RuntimeError):
    """Raised when a decision procedure cannot certify either answer."""


# ---------------------------------------------------------------------------
# invariants
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SimpleClassK1:
    """Classification datum for k = 1: the pair ([zeta_r], [q zeta_r^{-1}])."""

    r: int
    q: int


@dataclass(frozen=True)
class TrkPoint:
    """Tuple of totally-nonnegative elements of Q(zeta_r)^+ summing to 1."""

    r: int
    k: int
    t: tuple[CycloElem, ...]

    def __post_init__(self):
        if len(self.t) != self.k:
            raise ClassifyError("tuple length must be k")
        total = CycloElem.from_rational(self.r, 0)
        for x in self.t:
            if not is_totally_nonneg(x):
                raise ClassifyError("entries must be totally positive or zero")
            total = total + x
        if total != CycloElem.from_rational(self.r, 1):
            raise ClassifyError("entries must sum to 1")


@dataclass(frozen=True)
class TrkMatrixClass:
    """Representative of a matrix-tuple class: k size-a matrices over
    Q(zeta_r) summing to the identity, with a rational witness certifying
    membership (every X_i^T Lambda symmetric PSD in the regular
    representation)."""

    r: int
    k: int
    a: int
    xbar: tuple[CycloMatrix, ...]
    witness: QMatrix

    def __post_init__(self):
        total = CycloMatrix.zero(self.r, self.a)
        for x in self.xbar:
            total = total + x
        if total != CycloMatrix.identity(self.r, self.a):
            raise ClassifyError("representatives must sum to the identity")


@dataclass(frozen=True)
class EndRingDescriptor:
    """Endomorphism ring as a product of matrix rings over cyclotomic
    integers: the list of (r, a(r))."""

    blocks: tuple[tuple[int, int], ...]


# ---------------------------------------------------------------------------
# k = 1 classification
# ---------------------------------------------------------------------------

def weight2_partner(f: IntPoly, q: int, det: int) -> IntPoly:
    """(-theta)^d / det * f(q / theta), cleared to a monic integer
    polynomial; its roots are q / alpha over the roots alpha of f."""
    d = f.degree
    sign = (-1) ** d
    coeffs = [Fraction(0)] * (d + 1)
    for j, c in enumerate(f.coeffs):
        coeffs[d - j] = Fraction(c * q**j * sign, det)
    if any(c.denominator != 1 for c in coeffs):
        raise ClassifyError("weight-2 partner is not integral")
    out = IntPoly([c.numerator for c in coeffs])
    assert out.is_monic()
    return out


def classify_simple_k1(
    p: LatticePairing, q: int, rng: random.Random | None = None
) -> tuple[SimpleClassK1, IntPoly, IntPoly]:
    """Class of a simple k = 1 pairing: the conductor r together with the
    polynomial pair (F_r, G_r), G_r being the weight-2 partner of F_r."""
    if p.k != 1:
        raise ClassifyError("classify_simple_k1 needs k = 1")
    if not is_simple(p.M):
        raise ClassifyError("classify_simple_k1 needs a simple module")
    verdict = is_pointwise_polarizable(p, rng or random.Random(0))
    if not verdict.is_yes:
        raise ClassifyError("pairing is not pointwise polarizable")
    (r, _), = cyclotomic_multiplicities(p.M).items()
    f = cyclotomic_poly(r)
    det = (-1) ** f.degree * f.coeffs[0]
    g = weight2_partner(f, q, det)
    return SimpleClassK1(r, q), f, g


# ---------------------------------------------------------------------------
# rank-1 and rank-a classification
# ---------------------------------------------------------------------------

def classify_rank1(
    p: LatticePairing, rng: random.Random | None = None
) -> TrkPoint:
    """Normalized tuple (t_1/t, ..., t_k/t) for a pairing on a rank-1
    cyclotomic module; well-defined on the isogeny class."""
    rng = rng or random.Random(0)
    verdict = is_pointwise_polarizable(p, rng)
    if not verdict.is_yes:
        raise ClassifyError("pairing is not pointwise polarizable")
    try:
        r, ts = _rank1_elements(p, rng)
    except PairingError as exc:
        raise ClassifyError(str(exc)) from exc
    t = ts[0]
    for x in ts[1:]:
        t = t + x
    if t.is_zero():
        raise ClassifyError("degenerate tuple contradicts polarizability")
    tinv = t.invert()
    return TrkPoint(r, p.k, tuple(x * tinv for x in ts))


def _companion_blocks(p: LatticePairing) -> tuple[int, int]:
    mult = cyclotomic_multiplicities(p.M)
    if len(mult) != 1:
        raise ClassifyError("input must be isotypic; run normal_form first")
    (r, a), = mult.items()
    if block_model([(r, a)]).frob != p.M.frob or dual_module(p.M).frob != p.N.frob:
        raise ClassifyError("input must be in normal form (companion blocks, dual side)")
    return r, a


def _as_cyclo_matrix(r: int, a: int, x) -> CycloMatrix:
    """Read a block matrix commuting with the companion action as a matrix
    over Q(zeta_r): block (i, j) is a polynomial in the companion matrix and
    its first column is the coefficient vector."""
    phi = euler_phi(r)
    q = QMatrix.coerce(x)
    rows = []
    for i in range(a):
        row = []
        for j in range(a):
            col = [q.entries[i * phi + bi][j * phi] for bi in range(phi)]
            row.append(CycloElem(r, col))
        rows.append(row)
    out = CycloMatrix.from_rows(r, rows)
    if out.regular_rep() != q:
        raise ClassifyError("matrix does not commute with the companion action")
    return out


def classify_rank_a(
    p: LatticePairing, rng: random.Random | None = None
) -> TrkMatrixClass:
    """Matrix-tuple class (X_1 X^{-1}, ..., X_k X^{-1}) with X = sum X_i, for
    a normal-form pairing on a copies of Z[zeta_r]; the polarizability
    witness is attached as the membership certificate."""
    rng = rng or random.Random(0)
    r, a = _companion_blocks(p)
    verdict = is_pointwise_polarizable(p, rng)
    if not verdict.is_yes:
        raise ClassifyError("pairing is not pointwise polarizable")
    xbars = [_as_cyclo_matrix(r, a, x) for x in p.X]
    total = CycloMatrix.zero(r, a)
    for x in xbars:
        total = total + x
    xinv = total.invert()
    reps = tuple(x * xinv for x in xbars)
    return TrkMatrixClass(r, p.k, a, reps, verdict.certificate)


def _solve_sylvester(
    c1: tuple[CycloMatrix, ...], c2: tuple[CycloMatrix, ...], r: int, a: int
) -> list[CycloMatrix]:
    """Basis over Q(zeta_r) of {Y : Y X_i = X'_i Y for all i}."""
    zero = CycloElem.from_rational(r, 0)
    ncols = a * a
    rows = []
    for x, xp in zip(c1, c2):
        for i in range(a):
            for j in range(a):
                # (Y x - xp Y)[i][j] as a linear form in Y[u][v]
                row = [zero] * ncols
                for u in range(a):
                    row[i * a + u] = row[i * a + u] + x.entries[u][j]
                for u in range(a):
                    row[u * a + j] = row[u * a + j] - xp.entries[i][u]
                rows.append(row)
    # Gaussian elimination over Q(zeta_r)
    mat = [list(row) for row in rows]
    pivots = []
    rank = 0
    for col in range(ncols):
        piv = None
        for i in range(rank, len(mat)):
            if not mat[i][col].is_zero():
                piv = i
                break
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        inv = mat[rank][col].invert()
        mat[rank] = [v * inv for v in mat[rank]]
        for i in range(len(mat)):
            if i != rank and not mat[i][col].is_zero():
                f = mat[i][col]
                mat[i] = [v - f * w for v, w in zip(mat[i], mat[rank])]
        pivots.append(col)
        rank += 1
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    one = CycloElem.from_rational(r, 1)
    for fc in free:
        vec = [zero] * ncols
        vec[fc] = one
        for ri, pc in enumerate(pivots):
            vec[pc] = zero - mat[ri][fc]
        basis.append(
            CycloMatrix.from_rows(
                r, [[vec[i * a + j] for j in range(a)] for i in range(a)]
            )
        )
    return basis


def same_class(
    c1: TrkMatrixClass, c2: TrkMatrixClass, rng: random.Random | None = None
) -> bool:
    """Whether two matrix-tuple classes coincide, i.e. some invertible Y over
    Q(zeta_r) satisfies Y X_i = X'_i Y for all i.

    The joint Sylvester solution space is computed exactly; an invertible
    element is sought by random small rational combinations.  A negative is
    certified, for solution spaces of dimension at most 3, by showing the
    determinant polynomial vanishes identically on the space; otherwise
    UnknownVerdict is raised.
    """
    rng = rng or random.Random(0)
    if (c1.r, c1.k, c1.a) != (c2.r, c2.k, c2.a):
        return False
    r, a = c1.r, c1.a
    basis = _solve_sylvester(c1.xbar, c2.xbar, r, a)
    if not basis:
        return False
    for _ in range(20):
        coeffs = [rng.randint(-3, 3) for _ in basis]
        cand = CycloMatrix.zero(r, a)
        for c, b in zip(coeffs, basis):
            cand = cand + b.scale(CycloElem.from_rational(r, c))
        if not cand.det().is_zero():
            return True
    if len(basis) <= 3:
        # det is a form of degree a in the coefficients; if it vanishes on a
        # grid of side a+1 it vanishes identically and no invertible
        # combination exists
        grid = range(a + 1)
        points = [[g] for g in grid]
        for _ in range(len(basis) - 1):
            points = [p + [g] for p in points for g in grid]
        for pt in points:
            cand = CycloMatrix.zero(r, a)
            for c, b in zip(pt, basis):
                cand = cand + b.scale(CycloElem.from_rational(r, c))
            if not cand.det().is_zero():
                return True
        return False
    raise UnknownVerdict(
        "no invertible intertwiner found and the solution space is too large "
        "to certify a negative"
    )


# ---------------------------------------------------------------------------
# simplicity
# ---------------------------------------------------------------------------

def _spin(vecs, mats, r: int, a: int):
    """Smallest subspace of Q(zeta_r)^a containing vecs, stable under mats;
    returned as an echelonized basis (list of coordinate lists)."""
    basis: list[list[CycloElem]] = []
    pivots: list[int] = []

    def reduce_and_add(v):
        v = list(v)
        for b, p in zip(basis, pivots):
            if not v[p].is_zero():
                f = v[p]
                v = [x - f * y for x, y in zip(v, b)]
        lead = next((i for i, x in enumerate(v) if not x.is_zero()), None)
        if lead is None:
            return False
        inv = v[lead].invert()
        v = [x * inv for x in v]
        basis.append(v)
        pivots.append(lead)
        return True

    queue = [list(v) for v in vecs]
    while queue:
        v = queue.pop()
        if not reduce_and_add(v):
            continue
        for m in mats:
            queue.append(
                [
                    sum(
                        (m.entries[i][j] * v[j] for j in range(a)),
                        CycloElem.from_rational(r, 0),
                    )
                    for i in range(a)
                ]
            )
        if len(basis) == a:
            break
    return basis


def _algebra_basis(mats, r: int, a: int):
    """Basis of the unital algebra generated by mats inside Mat_a(Q(zeta_r)),
    as echelonized flattened vectors paired with the matrices."""
    zero = CycloElem.from_rational(r, 0)
    flat_basis: list[list[CycloElem]] = []
    pivots: list[int] = []
    members: list[CycloMatrix] = []

    def try_add(m: CycloMatrix) -> bool:
        v = [m.entries[i][j] for i in range(a) for j in range(a)]
        for b, p in zip(flat_basis, pivots):
            if not v[p].is_zero():
                f = v[p]
                v = [x - f * y for x, y in zip(v, b)]
        lead = next((i for i, x in enumerate(v) if not x.is_zero()), None)
        if lead is None:
            return False
        inv = v[lead].invert()
        flat_basis.append([x * inv for x in v])
        pivots.append(lead)
        members.append(m)
        return True

    frontier = [CycloMatrix.identity(r, a)] + list(mats)
    added = [m for m in frontier if try_add(m)]
    while True:
        new = []
        for m in added:
            for g in mats:
                prod = m * g
                if try_add(prod):
                    new.append(prod)
        if not new:
            break
        added = new
    return members


def _commutant_basis(mats, r: int, a: int):
    return _solve_sylvester(tuple(mats), tuple(mats), r, a)


def _matrix_minpoly_q(m: CycloMatrix) -> IntPoly:
    """Minimal polynomial over Q of a matrix over Q(zeta_r), via linear
    dependencies among powers of its rational regular representation."""
    rep = m.regular_rep()
    n = rep.rows
    powers = [QMatrix.identity(n)]
    while True:
        powers.append(rep * powers[-1])
        cols = [
            tuple(pw.entries[i][j] for pw in powers)
            for i in range(n)
            for j in range(n)
        ]
        sys = QMatrix.coerce(cols)
        kern = sys.kernel_basis()
        if kern:
            vec = kern[0]
            den = math.lcm(*(x.denominator for x in vec))
            return IntPoly([int(x * den) for x in vec]).primitive()


def _q_factor_degrees(p: IntPoly) -> list[IntPoly]:
    """Irreducible factors of p over Q via sympy (content dropped)."""
    x = sympy.Symbol("x")
    expr = sum(int(c) * x**i for i, c in enumerate(p.coeffs))
    _, factors = sympy.factor_list(sympy.Poly(expr, x))
    out = []
    for poly, mult in factors:
        coeffs = [int(c) for c in reversed(sympy.Poly(poly, x).all_coeffs())]
        out.extend([IntPoly(coeffs)] * mult)
    return out


def is_simple_class(p: LatticePairing, rng: random.Random | None = None) -> bool:
    """Whether a normal-form isotypic polarizable pairing is simple.

    Simplicity is equivalent to the normalized tuple (X_i X^{-1}) acting on
    Q(zeta_r)^a without a common invariant subspace other than 0 and the
    whole space.  Decision: spinning from basis and random vectors (both the
    tuple and its transpose) detects most invariant subspaces; the certified
    path computes the generated algebra, rejects a nonzero trace radical
    (its image is an invariant subspace), and otherwise inspects the
    commutant: the module is simple iff the commutant is a division algebra,
    which for a commutative commutant reduces to irreducibility over Q of
    the minimal polynomial of a primitive element.
    """
    rng = rng or random.Random(0)
    r, a = _companion_blocks(p)
    if a == 1:
        return True
    verdict = is_pointwise_polarizable(p, rng)
    if not verdict.is_yes:
        raise ClassifyError("pairing is not pointwise polarizable")
    xbars = [_as_cyclo_matrix(r, a, x) for x in p.X]
    total = CycloMatrix.zero(r, a)
    for x in xbars:
        total = total + x
    xinv = total.invert()
    mats = [x * xinv for x in xbars]

    zero = CycloElem.from_rational(r, 0)
    one = CycloElem.from_rational(r, 1)

    def unit_vec(i):
        return [one if j == i else zero for j in range(a)]

    def random_vec():
        return [CycloElem.from_rational(r, rng.randint(-2, 2)) for _ in range(a)]

    transposed = [
        CycloMatrix.from_rows(
            r, [[m.entries[j][i] for j in range(a)] for i in range(a)]
        )
        for m in mats
    ]
    for family in (mats, transposed):
        for i in range(a):
            if len(_spin([unit_vec(i)], family, r, a)) < a:
                return False
        for _ in range(3):
            v = random_vec()
            if all(x.is_zero() for x in v):
                continue
            if len(_spin([v], family, r, a)) < a:
                return False

    algebra = _algebra_basis(mats, r, a)
    if len(algebra) == a * a:
        return True

    # trace-form radical (Dickson, characteristic 0): a degenerate trace
    # form means a nonzero radical J, and J.V is an invariant subspace
    gram = [[(u * v).trace_elem() for v in algebra] for u in algebra]
    if CycloMatrix.from_rows(r, gram).det().is_zero():
        return False

    commutant = _commutant_basis(mats, r, a)
    if len(commutant) == 1:
        return True
    # commutative commutant: field iff the minimal polynomial over Q of a
    # primitive element is irreducible
    is_comm = all(
        (u * v) == (v * u) for u in commutant for v in commutant
    )
    if is_comm:
        dim_q = len(commutant) * euler_phi(r)
        for _ in range(25):
            coeffs = [rng.randint(-4, 4) for _ in commutant]
            g = CycloMatrix.zero(r, a)
            for c, b in zip(coeffs, commutant):
                g = g + b.scale(CycloElem.from_rational(r, c))
            mp = _matrix_minpoly_q(g)
            if mp.degree == dim_q:
                return len(_q_factor_degrees(mp)) == 1
        raise UnknownVerdict("no primitive element found in the commutant")
    # noncommutative commutant of dimension >= 4 over K containing singular
    # elements would witness reducibility; search small combinations
    for _ in range(50):
        coeffs = [rng.randint(-3, 3) for _ in commutant]
        g = CycloMatrix.zero(r, a)
        for c, b in zip(coeffs, commutant):
            g = g + b.scale(CycloElem.from_rational(r, c))
        nonzero = any(
            not g.entries[i][j].is_zero() for i in range(a) for j in range(a)
        )
        if nonzero and g.det().is_zero():
            return False
    raise UnknownVerdict("noncommutative commutant; no certificate found")


# ---------------------------------------------------------------------------
# polarization parametrizations
# ---------------------------------------------------------------------------

def polarizable_rank1(tvec: list[CycloElem]) -> bool:
    """Whether a rank-1 tuple admits a polarization: not all zero, and every
    product t_i conj(t_j) totally positive or zero."""
    if not tvec:
        return False
    if all(t.is_zero() for t in tvec):
        return False
    for ti in tvec:
        for tj in tvec:
            if not is_totally_nonneg(ti * tj.conj()):
                return False
    return True


def check_lambda_t(t: CycloElem, tvec: list[CycloElem]) -> bool:
    """Whether lambda_t polarizes the rank-1 pairing with components tvec:
    every t_i conj(t) totally positive or zero and the sum totally
    positive.  Requires t in the inverse different."""
    if not in_inverse_different(t):
        raise ClassifyError("t must lie in the inverse different")
    total = CycloElem.from_rational(t.r, 0)
    for ti in tvec:
        prod = ti * t.conj()
        if not is_totally_nonneg(prod):
            return False
        total = total + prod
    return is_totally_positive(total)


def endomorphism_ring(p: LatticePairing) -> EndRingDescriptor:
    """Endomorphism ring of a normal-form pairing, as prod Mat_{a(r)}(Z[zeta_r]);
    cross-checked against the equivariant Hom-lattice dimension."""
    blocks = tuple(sorted(cyclotomic_multiplicities(p.M).items()))
    expected = sum(a * a * euler_phi(r) for r, a in blocks)
    actual = len(hom_space(p.M, p.M))
    if actual != expected:
        raise ClassifyError(
            f"Hom dimension {actual} does not match Sigma a(r)^2 phi(r) = {expected}"
        )
    return EndRingDescriptor(blocks)
