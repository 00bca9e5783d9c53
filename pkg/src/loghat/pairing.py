"""Lattice pairings (M, N, Phi) valued in Z^k: validation, morphisms and
isogenies, duals, polarization predicates, the pointwise-polarizability
decision, the sum-pairing collapse to k = 1, and normal-form reduction onto
cyclotomic block models.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .corealg import (
    CorealgError,
    IntMat,
    PsdStatus,
    QMatrix,
    imat,
    imat_det,
    imat_identity,
    imat_mul,
    imat_shape,
    imat_transpose,
    psd_status,
    smith_normal_form,
    snf_diagonal,
)
from .cyclotomic import CycloElem, euler_phi, is_totally_nonneg
from .gammamod import (
    GammaModule,
    GammaModuleError,
    LatticeMap,
    ZERO_MODULE,
    cyclotomic_multiplicities,
    dual_module,
    split_isotypic,
)


class PairingError(ValueError):
    pass


@dataclass(frozen=True)
class LatticePairing:
    """Pairing M x N -> Z^k given by k integer matrices X_i (each of shape
    N.rank x M.rank).  Component i takes (m, n) to m^T X_i^T n, with n in the
    coordinates dual to the chosen basis of N.

    Every X_i must intertwine the Frobenius actions: X_i frob_M equals
    (frob_N^{-1})^T X_i.
    """

    M: GammaModule
    N: GammaModule
    k: int
    X: tuple[IntMat, ...]

    def component(self, i: int) -> IntMat:
        return self.X[i]

    def pairing_value(self, m: Sequence[int], n: Sequence[int]) -> tuple[int, ...]:
        return tuple(
            sum(m[a] * x[b][a] * n[b] for a in range(self.M.rank) for b in range(self.N.rank))
            for x in self.X
        )


def validate_pairing(m: GammaModule, n: GammaModule, k: int, x_mats) -> LatticePairing:
    """Check shapes and exact Gamma-equivariance of every component."""
    if k < 1:
        raise PairingError("need k >= 1")
    xs = tuple(imat(x) for x in x_mats)
    if len(xs) != k:
        raise PairingError(f"expected {k} matrices, got {len(xs)}")
    dual_frob = dual_module(n).frob if n.rank else ()
    for i, x in enumerate(xs):
        rows, cols = imat_shape(x) if m.rank and n.rank else (n.rank, m.rank)
        if m.rank and n.rank and (rows, cols) != (n.rank, m.rank):
            raise PairingError(
                f"component {i}: shape {rows}x{cols}, expected {n.rank}x{m.rank}"
            )
        if m.rank and n.rank:
            lhs = imat_mul(x, m.frob)
            rhs = imat_mul(dual_frob, x)
            if lhs != rhs:
                bad = next(
                    (a, b)
                    for a in range(n.rank)
                    for b in range(m.rank)
                    if lhs[a][b] != rhs[a][b]
                )
                raise PairingError(
                    f"component {i} is not Gamma-equivariant (first offending entry {bad})"
                )
    return LatticePairing(m, n, k, xs)


def sum_matrix(p: LatticePairing) -> IntMat:
    if p.M.rank == 0 or p.N.rank == 0:
        return ()
    acc = p.X[0]
    for x in p.X[1:]:
        acc = imat([[a + b for a, b in zip(r, s)] for r, s in zip(acc, x)])
    return acc


def sum_pairing(p: LatticePairing) -> LatticePairing:
    """Collapse to k = 1 by adding the components; pointwise polarizability
    of the input forces the result non-degenerate."""
    return validate_pairing(p.M, p.N, 1, [sum_matrix(p)] if p.M.rank and p.N.rank else [()])


def dual_pairing(p: LatticePairing) -> LatticePairing:
    """Switch the two factors: (N, M, X_i^T); an involution."""
    xs = [imat_transpose(x) for x in p.X] if p.M.rank and p.N.rank else [() for _ in p.X]
    return validate_pairing(p.N, p.M, p.k, xs)


# ---------------------------------------------------------------------------
# morphisms and isogenies
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PairingMorphism:
    """Morphism src -> dst: psi1 maps M_src to M_dst, psi2 maps N_dst back to
    N_src, and psi2^T X_{src,i} = X_{dst,i} psi1 for every component."""

    src: LatticePairing
    dst: LatticePairing
    psi1: LatticeMap
    psi2: LatticeMap

    def __post_init__(self):
        if self.psi1.src != self.src.M or self.psi1.dst != self.dst.M:
            raise PairingError("psi1 must map M_src to M_dst")
        if self.psi2.src != self.dst.N or self.psi2.dst != self.src.N:
            raise PairingError("psi2 must map N_dst to N_src")
        if self.src.k != self.dst.k:
            raise PairingError("component count mismatch")
        if self.src.M.rank and self.src.N.rank and self.dst.M.rank and self.dst.N.rank:
            for i in range(self.src.k):
                lhs = imat_mul(imat_transpose(self.psi2.matrix), self.src.X[i])
                rhs = imat_mul(self.dst.X[i], self.psi1.matrix)
                if lhs != rhs:
                    raise PairingError(f"morphism square fails at component {i}")


def is_isogeny(phi: PairingMorphism) -> tuple[bool, tuple[int, int] | None]:
    """True iff both sides are injective with finite cokernel; returns the
    two cokernel orders (via Smith normal form) when it is one."""
    if not (phi.psi1.is_isogeny() and phi.psi2.is_isogeny()):
        return False, None
    return True, (phi.psi1.cokernel_order(), phi.psi2.cokernel_order())


# ---------------------------------------------------------------------------
# polarizations
# ---------------------------------------------------------------------------

def _cert_matrices_ok(x_mats: Sequence[IntMat], lam: QMatrix) -> bool:
    """Exact matrix-form polarization check (no equivariance): every
    X_i^T Lambda symmetric PSD and the sum PD."""
    if lam.rows == 0:
        return True
    total = None
    for x in x_mats:
        q = QMatrix.coerce(x).transpose() * lam
        if not q.is_symmetric():
            return False
        if psd_status(q) == PsdStatus.INDEFINITE:
            return False
        total = q if total is None else total + q
    return psd_status(total) == PsdStatus.PD


def is_polarization(p: LatticePairing, lam) -> bool:
    """Whether the equivariant map lam: M -> N is a polarization of p.

    Raises on a non-equivariant lam; returns False when lam is not an
    isogeny or a positivity condition fails.
    """
    if p.M.rank == 0 and p.N.rank == 0:
        return True
    lam = imat(lam)
    rows, cols = imat_shape(lam)
    if (rows, cols) != (p.N.rank, p.M.rank):
        raise PairingError("polarization candidate has wrong shape")
    if imat_mul(lam, p.M.frob) != imat_mul(p.N.frob, lam):
        raise PairingError("polarization candidate is not Gamma-equivariant")
    if p.M.rank != p.N.rank or imat_det(lam) == 0:
        return False
    return _cert_matrices_ok(p.X, QMatrix.coerce(lam))


@dataclass(frozen=True)
class PolarizabilityVerdict:
    status: str  # "yes" | "no" | "unknown"
    tier: str
    certificate: QMatrix | None = None
    reason: str | None = None

    @property
    def is_yes(self) -> bool:
        return self.status == "yes"

    @property
    def is_no(self) -> bool:
        return self.status == "no"


def _sign_adj_transpose(x: IntMat) -> QMatrix:
    """sign(det X) * adj(X^T): makes X^T Lambda = |det| I."""
    q = QMatrix.coerce(imat_transpose(x))
    d = q.det()
    return q.inverse().scale(abs(d))


def _rank1_elements(p: LatticePairing, rng: random.Random) -> tuple[int, list[CycloElem]]:
    """For a pairing whose M and N are both isotypic of type (r, 1), the
    components as elements t_i of Q(zeta_r) in the companion frame."""
    mm = cyclotomic_multiplicities(p.M)
    nn = cyclotomic_multiplicities(p.N)
    if len(mm) != 1 or len(nn) != 1:
        raise PairingError("not isotypic modules")
    (r, a), (rn, an) = next(iter(mm.items())), next(iter(nn.items()))
    if (r, a) != (rn, an) or a != 1:
        raise PairingError("not a rank-1 cyclotomic pairing")
    _, psi_m, _ = split_isotypic(p.M, rng)
    ndual = dual_module(p.N)
    _, psi_nd, _ = split_isotypic(ndual, rng)
    qm = QMatrix.coerce(psi_m.matrix)
    qnd = QMatrix.coerce(psi_nd.matrix)
    ts = []
    for x in p.X:
        xt = qnd.inverse() * QMatrix.coerce(x) * qm
        # commutes with the companion matrix; its first column is the
        # coefficient vector of the corresponding element of Q(zeta_r)
        ts.append(CycloElem(r, [xt.entries[i][0] for i in range(xt.rows)]))
    return r, ts


def _gram_lambda_t(r: int, t: CycloElem) -> QMatrix:
    """Matrix of lambda_t on the power basis: entry (j, l) = Tr(t zeta^(l-j))."""
    phi = euler_phi(r)
    zeta = CycloElem.zeta(r)
    powers = {0: t}
    for m in range(1, phi):
        powers[m] = powers[m - 1] * zeta
    zinv = zeta.invert()
    negpowers = {0: t}
    for m in range(1, phi):
        negpowers[m] = negpowers[m - 1] * zinv
    return QMatrix.coerce(
        [
            [
                (powers[l - j] if l >= j else negpowers[j - l]).trace()
                for l in range(phi)
            ]
            for j in range(phi)
        ]
    )


def _clear_denominators(q: QMatrix) -> QMatrix:
    den = 1
    for row in q.entries:
        for x in row:
            den = math.lcm(den, x.denominator)
    return q.scale(den)


def is_pointwise_polarizable(
    p: LatticePairing, rng: random.Random | None = None
) -> PolarizabilityVerdict:
    """Decide pointwise polarizability.

    The Galois action is trivialized first: a polarization over the
    trivializing open subgroup stays valid over every smaller one, and
    trivialization removes the equivariance constraint, so the decision is a
    pure matrix feasibility question: does some rational Lambda make every
    X_i^T Lambda symmetric PSD with a PD sum?

    Tiers: (T1) k = 1 is decided completely by non-degeneracy; (T2) pairings
    on a rank-1 cyclotomic module are decided completely by total positivity
    of the t_i conj(t_j); (T3) the general case tries exact candidates, then
    a numeric interior-point search over the symmetry slice, rounded back to
    rationals and verified exactly.  A yes always carries an exact
    certificate; a no always carries an exact reason; otherwise unknown.
    """
    rng = rng or random.Random(0)
    if p.M.rank != p.N.rank:
        return PolarizabilityVerdict("no", "rank", reason="M and N have different ranks")
    if p.M.rank == 0:
        return PolarizabilityVerdict("yes", "empty", certificate=QMatrix.coerce([]))
    total = sum_matrix(p)
    if imat_det(total) == 0:
        return PolarizabilityVerdict(
            "no", "sum", reason="sum pairing is degenerate (det = 0)"
        )
    if p.k == 1:
        lam = _sign_adj_transpose(p.X[0])
        assert _cert_matrices_ok(p.X, lam)
        return PolarizabilityVerdict("yes", "T1", certificate=lam)
    mm = cyclotomic_multiplicities(p.M)
    nn = cyclotomic_multiplicities(p.N)
    if mm == nn and len(mm) == 1 and next(iter(mm.values())) == 1:
        return _decide_rank1(p, rng)
    return _decide_general(p, rng)


def _decide_rank1(p: LatticePairing, rng: random.Random) -> PolarizabilityVerdict:
    r, ts = _rank1_elements(p, rng)
    if all(t.is_zero() for t in ts):
        return PolarizabilityVerdict("no", "T2", reason="all components vanish")
    for i, ti in enumerate(ts):
        for j, tj in enumerate(ts):
            prod = ti * tj.conj()
            if not is_totally_nonneg(prod):
                return PolarizabilityVerdict(
                    "no",
                    "T2",
                    reason=(
                        f"t_{i + 1} * conj(t_{j + 1}) is neither totally positive nor zero"
                    ),
                )
    # certificate: transport lambda_t with t = sum t_i through the
    # companion-frame identifications
    t = ts[0]
    for x in ts[1:]:
        t = t + x
    gram = _gram_lambda_t(r, t)
    _, psi_m, _ = split_isotypic(p.M, rng)
    _, psi_nd, _ = split_isotypic(dual_module(p.N), rng)
    qm = QMatrix.coerce(psi_m.matrix)
    qnd = QMatrix.coerce(psi_nd.matrix)
    lam = qnd.inverse().transpose() * gram * qm.inverse()
    lam = _clear_denominators(lam)
    assert _cert_matrices_ok(p.X, lam)
    return PolarizabilityVerdict("yes", "T2", certificate=lam)


def _symmetry_slice_basis(x_mats: Sequence[IntMat]) -> list[QMatrix]:
    """Rational basis of {Lambda : X_i^T Lambda symmetric for all i}."""
    n = imat_shape(x_mats[0])[1]
    rows = []
    for x in x_mats:
        xt = imat_transpose(x)
        for a in range(n):
            for b in range(a):
                # (X^T L)[a][b] - (X^T L)[b][a] = 0
                row = [0] * (n * n)
                for c in range(n):
                    row[c * n + b] += xt[a][c]
                    row[c * n + a] -= xt[b][c]
                rows.append(row)
    if not rows:
        return [QMatrix.identity(n)] if n else []
    basis = QMatrix.coerce(rows).kernel_basis()
    out = []
    for vec in basis:
        out.append(QMatrix.coerce([[vec[i * n + j] for j in range(n)] for i in range(n)]))
    return out


def _round_fraction(x: float, max_den: int = 10**6) -> Fraction:
    return Fraction(x).limit_denominator(max_den)


def _block_gram_candidate(p: LatticePairing) -> QMatrix | None:
    """Trace-form Gram of lambda_1 when M is already in block-companion shape
    and N is its dual; certifies the Hermitian-positive block instances."""
    from .gammamod import block_model

    mult = cyclotomic_multiplicities(p.M)
    blocks = sorted(mult.items())
    if not blocks or block_model(blocks).frob != p.M.frob:
        return None
    if dual_module(p.M).frob != p.N.frob:
        return None
    diag: list[QMatrix] = []
    for r, a in blocks:
        g = _gram_lambda_t(r, CycloElem.from_rational(r, 1))
        diag.extend([g] * a)
    n = p.M.rank
    out = [[Fraction(0)] * n for _ in range(n)]
    off = 0
    for g in diag:
        for i in range(g.rows):
            for j in range(g.cols):
                out[off + i][off + j] = g.entries[i][j]
        off += g.rows
    return QMatrix.coerce(out)


def _least_squares_candidate(
    x_mats: Sequence[IntMat], slice_basis: list[QMatrix], n: int
) -> QMatrix | None:
    """Exact slice point whose summed form is Frobenius-closest to the
    identity; cheap and often lands inside the cone."""
    total_t = QMatrix.coerce(imat_transpose(sum_matrix_raw(x_mats)))
    a_mats = [total_t * s for s in slice_basis]
    m = len(a_mats)
    gram = [
        [
            sum(
                a_mats[i].entries[r][c] * a_mats[j].entries[r][c]
                for r in range(n)
                for c in range(n)
            )
            for j in range(m)
        ]
        for i in range(m)
    ]
    rhs = [sum(a.entries[i][i] for i in range(n)) for a in a_mats]
    gq = QMatrix.coerce(gram)
    if gq.det() == 0:
        return None
    sol = gq.inverse() * QMatrix.coerce([[v] for v in rhs])
    lam = QMatrix.coerce([[0] * n for _ in range(n)])
    for i, s in enumerate(slice_basis):
        lam = lam + s.scale(sol.entries[i][0])
    return _clear_denominators(lam)


def sum_matrix_raw(x_mats: Sequence[IntMat]) -> IntMat:
    acc = x_mats[0]
    for x in x_mats[1:]:
        acc = imat([[a + b for a, b in zip(r, s)] for r, s in zip(acc, x)])
    return acc


def _decide_general(p: LatticePairing, rng: random.Random) -> PolarizabilityVerdict:
    n = p.M.rank
    # exact candidates first
    candidates = [QMatrix.identity(n), _sign_adj_transpose(sum_matrix(p))]
    gram = _block_gram_candidate(p)
    if gram is not None:
        candidates.append(gram)
    slice_basis = _symmetry_slice_basis(p.X)
    if not slice_basis:
        return PolarizabilityVerdict(
            "no", "T3", reason="only Lambda = 0 makes every component symmetric"
        )
    ls = _least_squares_candidate(p.X, slice_basis, n)
    if ls is not None:
        candidates.append(ls)
    for cand in candidates:
        if _cert_matrices_ok(p.X, cand):
            return PolarizabilityVerdict("yes", "T3", certificate=cand)
    import numpy as np

    mats = [np.array([[float(v) for v in row] for row in x], dtype=float).T for x in p.X]
    basis_np = [
        np.array([[float(v) for v in row] for row in s.entries], dtype=float)
        for s in slice_basis
    ]
    m = len(basis_np)
    forms = []  # per constraint: X_i^T S_j for each slice generator
    for xt in mats:
        forms.append([xt @ s for s in basis_np])
    sum_forms = [sum(f[j] for f in forms) for j in range(m)]

    def sym(mat):
        return 0.5 * (mat + mat.T)

    def min_eig_and_vec(mat):
        w, v = np.linalg.eigh(sym(mat))
        return w[0], v[:, 0]

    def objective_and_grad(c):
        vals = []
        grads = []
        for flist in forms + [sum_forms]:
            mat = sum(ci * f for ci, f in zip(c, flist))
            lam, vec = min_eig_and_vec(mat)
            vals.append(lam)
            grads.append(np.array([vec @ sym(f) @ vec for f in flist]))
        worst = int(np.argmin(vals))
        return min(vals), grads[worst]

    def try_round(cvec):
        for max_den in (10**6, 10**4, 100):
            coeffs = [_round_fraction(x, max_den) for x in cvec]
            lam = QMatrix.coerce([[0] * n for _ in range(n)])
            for ci, s in zip(coeffs, slice_basis):
                lam = lam + s.scale(ci)
            lam = _clear_denominators(lam)
            if any(any(v != 0 for v in row) for row in lam.entries) and _cert_matrices_ok(
                p.X, lam
            ):
                return lam
        return None

    c = np.ones(m) / math.sqrt(m)
    best_c, best_val = c.copy(), objective_and_grad(c)[0]
    step = 1.0
    for it in range(1200):
        val, grad = objective_and_grad(c)
        if val > best_val:
            best_val, best_c = val, c.copy()
        if it % 100 == 99 and best_val > -1e-9:
            lam = try_round(best_c)
            if lam is not None:
                return PolarizabilityVerdict("yes", "T3", certificate=lam)
        g = np.linalg.norm(grad)
        if g < 1e-14:
            break
        c = c + step * grad / g
        norm = np.linalg.norm(c)
        if norm > 0:
            c = c / norm
        step = 1.0 / math.sqrt(it + 2)
    lam = try_round(best_c)
    if lam is not None:
        return PolarizabilityVerdict("yes", "T3", certificate=lam)
    return PolarizabilityVerdict(
        "unknown",
        "T3",
        reason="numeric interior-point search found no verifiable certificate",
    )


# ---------------------------------------------------------------------------
# normal form
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NormalForm:
    blocks: tuple[tuple[int, int], ...]
    pairing: LatticePairing  # on (R, R^dual)
    morphism: PairingMorphism  # isogeny normal form -> input
    index: int  # [N^dual : image of psi2^dual]


def normal_form(p: LatticePairing, rng: random.Random | None = None) -> NormalForm:
    """Reduce a pointwise polarizable pairing to the block model
    (R, R^dual, Phi') with R a product of cyclotomic rings.

    Construction: psi1 is the isotypic splitting of M; psi2^dual is
    (sum X_i) psi1, whose image has finite index n in N^dual; Phi'_i sends x
    to the unique preimage of n * Phi_i(psi1 x) under psi2^dual.  The
    returned morphism is verified to be an isogeny.
    """
    rng = rng or random.Random(0)
    verdict = is_pointwise_polarizable(p, rng)
    if not verdict.is_yes:
        raise PairingError(
            f"normal_form requires a pointwise polarizable pairing ({verdict.status})"
        )
    if p.M.rank == 0:
        phi = PairingMorphism(p, p, LatticeMap(ZERO_MODULE, ZERO_MODULE, ()),
                              LatticeMap(ZERO_MODULE, ZERO_MODULE, ()))
        return NormalForm((), p, phi, 1)
    blocks, psi1, _ = split_isotypic(p.M, rng)
    r_mod = psi1.src
    s_mat = imat_mul(sum_matrix(p), psi1.matrix)  # psi2^dual: R -> N^dual
    det_s = imat_det(s_mat)
    if det_s == 0:
        raise PairingError("degenerate sum pairing in normal form")
    idx = 1
    for d in snf_diagonal(s_mat):
        idx *= abs(d)
    s_inv = QMatrix.coerce(s_mat).inverse()
    new_x = []
    for x in p.X:
        prime = s_inv * QMatrix.coerce(imat_mul(x, psi1.matrix)).scale(idx)
        if not prime.is_integer():
            raise PairingError("normal form produced non-integral components")
        new_x.append(prime.to_int())
    r_dual = dual_module(r_mod)
    q = validate_pairing(r_mod, r_dual, p.k, new_x)
    psi1_scaled = LatticeMap(r_mod, p.M, imat([[idx * v for v in row] for row in psi1.matrix]))
    psi2 = LatticeMap(p.N, r_dual, imat_transpose(s_mat))
    phi = PairingMorphism(q, p, psi1_scaled, psi2)
    ok, _ = is_isogeny(phi)
    assert ok
    return NormalForm(tuple(blocks), q, phi, idx)
