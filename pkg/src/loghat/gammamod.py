"""Free Galois modules over a finite field: a finite-rank free Z-module with
the Frobenius acting through a finite-order integer matrix.

Provides validation, Frobenius characteristic polynomials, duals, simplicity,
isotypic splitting into cyclotomic blocks, quasi-inverses of isogenies, and
equivariant Hom lattices.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .corealg import (
    CorealgError,
    IntMat,
    IntPoly,
    QMatrix,
    char_poly,
    cokernel_order,
    imat,
    imat_det,
    imat_identity,
    imat_kron,
    imat_mul,
    imat_shape,
    imat_sub,
    imat_transpose,
    integer_kernel,
    poly_divides,
    poly_divmod_q,
)
from .cyclotomic import cyclotomic_poly, euler_phi


class GammaModuleError(ValueError):
    pass


def conductor_candidates(n: int) -> list[int]:
    """All r with phi(r) <= n (phi(r) >= sqrt(r/2) bounds the search)."""
    if n <= 0:
        return []
    bound = 2 * n * n + 6
    return [r for r in range(1, bound + 1) if euler_phi(r) <= n]


def _cyclotomic_multiplicities(p: IntPoly) -> dict[int, int]:
    """Multiplicities of cyclotomic factors peeled from p by exact division.

    Raises if a non-cyclotomic factor remains: such a matrix has an
    eigenvalue that is not a root of unity.
    """
    n = p.degree
    rest = p
    out: dict[int, int] = {}
    for r in conductor_candidates(n):
        f = cyclotomic_poly(r)
        while poly_divides(f, rest):
            from .corealg import poly_divexact

            rest = poly_divexact(rest, f)
            out[r] = out.get(r, 0) + 1
    if rest.degree != 0:
        raise GammaModuleError(
            "characteristic polynomial has a non-cyclotomic factor; "
            "the action does not factor through a finite quotient"
        )
    return out


@dataclass(frozen=True)
class GammaModule:
    """Free Z-module of finite rank with the Frobenius action frob.

    frob must be invertible over Z and of finite multiplicative order,
    equivalently its minimal polynomial is a squarefree product of
    cyclotomic polynomials.  Use validate() to construct.
    """

    rank: int
    frob: IntMat
    order: int

    def charpoly(self) -> IntPoly:
        return char_poly(self.frob)


def validate(frob) -> GammaModule:
    """Construct a GammaModule, certifying finite order of the action.

    The certificate avoids iterating matrix powers: the order can be
    exponential in the rank, while checking that rad(A) = 0 for the radical
    rad = product of the distinct cyclotomic factors of the characteristic
    polynomial is polynomial-size.
    """
    frob = imat(frob)
    rows, cols = imat_shape(frob)
    if rows != cols:
        raise GammaModuleError("frob must be square")
    n = rows
    if n == 0:
        return GammaModule(0, frob, 1)
    det = imat_det(frob)
    if det not in (1, -1):
        raise GammaModuleError("frob is not invertible over Z")
    mult = _cyclotomic_multiplicities(char_poly(frob))
    rad = IntPoly([1])
    for r in mult:
        rad = rad * cyclotomic_poly(r)
    # evaluate rad at the matrix
    acc = imat([[0] * n] * n)
    power = imat_identity(n)
    for c in rad.coeffs:
        if c:
            acc = imat(
                [[x + c * y for x, y in zip(ra, rp)] for ra, rp in zip(acc, power)]
            )
        power = imat_mul(power, frob)
    if acc != imat([[0] * n] * n):
        raise GammaModuleError(
            "frob has infinite order (non-semisimple unipotent part)"
        )
    order = math.lcm(*mult.keys())
    return GammaModule(n, frob, order)


ZERO_MODULE = GammaModule(0, (), 1)


def trivial_module(rank: int) -> GammaModule:
    return validate(imat_identity(rank))


def companion_module(r: int, copies: int = 1) -> GammaModule:
    """Block-diagonal module with `copies` companion blocks of F_r."""
    f = cyclotomic_poly(r)
    d = f.degree
    n = d * copies
    m = [[0] * n for _ in range(n)]
    for b in range(copies):
        o = b * d
        for i in range(d - 1):
            m[o + i + 1][o + i] = 1
        for i in range(d):
            m[o + i][o + d - 1] = -f.coeffs[i]
    return validate(m)


def frobenius_charpoly(m: GammaModule) -> IntPoly:
    """P_{Y, pi_Y}: all roots are roots of unity by the type invariant."""
    return m.charpoly()


def dual_module(m: GammaModule) -> GammaModule:
    """Dual lattice with the contragredient action (frob^{-1})^T."""
    if m.rank == 0:
        return m
    inv = QMatrix.coerce(m.frob).inverse()
    return validate(inv.transpose().to_int())


def cyclotomic_multiplicities(m: GammaModule) -> dict[int, int]:
    """Map r -> a(r), the multiplicity of F_r in the Frobenius charpoly."""
    if m.rank == 0:
        return {}
    return _cyclotomic_multiplicities(m.charpoly())


def is_simple(m: GammaModule) -> bool:
    """Simple iff the charpoly is a single cyclotomic polynomial F_r."""
    mult = cyclotomic_multiplicities(m)
    return len(mult) == 1 and next(iter(mult.values())) == 1


@dataclass(frozen=True)
class LatticeMap:
    """Gamma-equivariant map between free modules, as a dst.rank x src.rank
    integer matrix."""

    src: GammaModule
    dst: GammaModule
    matrix: IntMat

    def __post_init__(self):
        rows, cols = imat_shape(self.matrix)
        if (rows, cols) != (self.dst.rank, self.src.rank):
            raise GammaModuleError(
                f"matrix shape {rows}x{cols} does not map "
                f"rank {self.src.rank} to rank {self.dst.rank}"
            )
        if self.src.rank and self.dst.rank:
            if imat_mul(self.matrix, self.src.frob) != imat_mul(self.dst.frob, self.matrix):
                raise GammaModuleError("map is not Gamma-equivariant")

    def compose(self, inner: "LatticeMap") -> "LatticeMap":
        if inner.dst is not self.src and inner.dst != self.src:
            raise GammaModuleError("composition mismatch")
        return LatticeMap(inner.src, self.dst, imat_mul(self.matrix, inner.matrix))

    def is_isogeny(self) -> bool:
        return self.src.rank == self.dst.rank and (
            self.src.rank == 0 or imat_det(self.matrix) != 0
        )

    def cokernel_order(self) -> int:
        if self.src.rank == 0 and self.dst.rank == 0:
            return 1
        return cokernel_order(self.matrix)


def quasi_inverse(f: LatticeMap) -> tuple[LatticeMap, int]:
    """For an injective-with-finite-cokernel F, the G with G*F = r*Id_src
    and F*G = r*Id_dst, where r = |det F| and G is the signed adjugate."""
    rows, cols = imat_shape(f.matrix)
    if rows != cols:
        raise GammaModuleError("quasi-inverse needs equal ranks")
    if rows == 0:
        return LatticeMap(f.dst, f.src, ()), 1
    det = imat_det(f.matrix)
    if det == 0:
        raise GammaModuleError("map is not injective")
    r = abs(det)
    inv = QMatrix.coerce(f.matrix).inverse().scale(r)
    g = LatticeMap(f.dst, f.src, inv.to_int())
    return g, r


# ---------------------------------------------------------------------------
# isotypic splitting
# ---------------------------------------------------------------------------

def _idempotent_mod(fr: IntPoly, cofactor: IntPoly, modulus: IntPoly) -> list[Fraction]:
    """CRT idempotent e with e = 1 mod fr and e = 0 mod cofactor,
    as rational coefficients reduced mod modulus."""
    # extended gcd over Q: a*fr + b*cofactor = 1
    r0 = [Fraction(c) for c in fr.coeffs]
    r1 = [Fraction(c) for c in cofactor.coeffs]
    s0, s1 = [Fraction(0)], [Fraction(1)]
    while any(r1):
        q, rem = poly_divmod_q(r0, r1)
        r0, r1 = r1, rem
        t = _polymul(q, s1)
        s0, s1 = s1, _polysub(s0, t)
    g = r0[0]
    b = [c / g for c in s0]
    e = _polymul(b, [Fraction(c) for c in cofactor.coeffs])
    _, e = poly_divmod_q(e, [Fraction(c) for c in modulus.coeffs])
    return e


def _polymul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _polysub(a, b):
    n = max(len(a), len(b))
    a = list(a) + [Fraction(0)] * (n - len(a))
    b = list(b) + [Fraction(0)] * (n - len(b))
    out = [x - y for x, y in zip(a, b)]
    while out and out[-1] == 0:
        out.pop()
    return out


def _poly_at_matrix(coeffs, a: IntMat) -> QMatrix:
    n = imat_shape(a)[0]
    acc = QMatrix.coerce([[0] * n for _ in range(n)])
    power = QMatrix.identity(n)
    qa = QMatrix.coerce(a)
    for c in coeffs:
        if c:
            acc = acc + power.scale(c)
        power = qa * power
    return acc


def _primitive_int_vector(v) -> tuple[int, ...] | None:
    den = math.lcm(*(x.denominator for x in v)) if v else 1
    w = [int(x * den) for x in v]
    g = math.gcd(*w) if any(w) else 0
    if g == 0:
        return None
    return tuple(x // g for x in w)


def split_isotypic(
    m: GammaModule, rng: random.Random | None = None
) -> tuple[list[tuple[int, int]], LatticeMap, int]:
    """Isogeny from the block model prod_r Z[zeta_r]^{a(r)} into m.

    Returns (blocks, psi, cokernel_order) where blocks lists (r, a(r)) in
    increasing r, psi maps the block-companion module injectively into m,
    and the cokernel order is computed via Smith normal form.

    Cyclic vectors are chosen greedily from the isotypic projector images of
    the standard basis, falling back to small random integer vectors.
    """
    rng = rng or random.Random(0)
    mult = cyclotomic_multiplicities(m)
    blocks = sorted(mult.items())
    if m.rank == 0:
        return [], LatticeMap(ZERO_MODULE, m, ()), 1
    radical = IntPoly([1])
    for r, _ in blocks:
        radical = radical * cyclotomic_poly(r)
    n = m.rank
    columns: list[list[Fraction]] = []
    frob_q = QMatrix.coerce(m.frob)
    for r, a_r in blocks:
        fr = cyclotomic_poly(r)
        from .corealg import poly_divexact

        cofactor = poly_divexact(radical, fr)
        e = _idempotent_mod(fr, cofactor, radical)
        proj = _poly_at_matrix(e, m.frob)
        d = fr.degree
        candidates = []
        for j in range(n):
            col = tuple(proj.entries[i][j] for i in range(n))
            v = _primitive_int_vector(col)
            if v is not None:
                candidates.append(v)
        chosen_orbit_cols: list[list[Fraction]] = []
        taken = 0
        ci = 0
        while taken < a_r:
            if ci < len(candidates):
                v = candidates[ci]
                ci += 1
            else:
                w = [rng.randint(-3, 3) for _ in range(n)]
                img = [
                    sum(proj.entries[i][j] * w[j] for j in range(n)) for i in range(n)
                ]
                v = _primitive_int_vector(img)
                if v is None:
                    continue
            orbit = [[Fraction(x) for x in v]]
            for _ in range(d - 1):
                prev = orbit[-1]
                orbit.append(
                    [
                        sum(frob_q.entries[i][j] * prev[j] for j in range(n))
                        for i in range(n)
                    ]
                )
            trial = chosen_orbit_cols + orbit
            mat = QMatrix.coerce([[trial[c][i] for c in range(len(trial))] for i in range(n)])
            if mat.rank() == len(trial):
                chosen_orbit_cols = trial
                taken += 1
        columns.extend(chosen_orbit_cols)
    psi_mat = imat([[int(columns[c][i]) for c in range(len(columns))] for i in range(n)])
    model = _block_model(blocks)
    psi = LatticeMap(model, m, psi_mat)
    order = psi.cokernel_order()
    return blocks, psi, order


def _block_model(blocks: list[tuple[int, int]]) -> GammaModule:
    total = sum(euler_phi(r) * a for r, a in blocks)
    if total == 0:
        return ZERO_MODULE
    mats = []
    for r, a in blocks:
        mats.append(companion_module(r, a).frob)
    n = total
    out = [[0] * n for _ in range(n)]
    off = 0
    for mat in mats:
        k = len(mat)
        for i in range(k):
            for j in range(k):
                out[off + i][off + j] = mat[i][j]
        off += k
    return validate(out)


def block_model(blocks: list[tuple[int, int]]) -> GammaModule:
    """Public accessor for the block-companion module of an (r, a) list."""
    return _block_model(sorted(blocks))


# ---------------------------------------------------------------------------
# Hom lattices
# ---------------------------------------------------------------------------

def hom_space(m: GammaModule, n: GammaModule) -> list[IntMat]:
    """Z-basis of the lattice of equivariant maps A: m -> n, i.e. integer
    solutions of A*frob_m = frob_n*A.  The basis is primitive (saturated)
    because it comes from a unimodular kernel computation."""
    if m.rank == 0 or n.rank == 0:
        return []
    rows = []
    nr, mr = n.rank, m.rank
    for i in range(nr):
        for j in range(mr):
            # coefficient of A[k][l] in (A*frob_m - frob_n*A)[i][j]
            row = [0] * (nr * mr)
            for l in range(mr):
                row[i * mr + l] += m.frob[l][j]
            for k in range(nr):
                row[k * mr + j] -= n.frob[i][k]
            rows.append(row)
    basis = []
    for vec in integer_kernel(imat(rows)):
        basis.append(imat([[vec[i * mr + j] for j in range(mr)] for i in range(nr)]))
    return basis
