"""Monoid-shaped generating functions on cotangent bundles.

A monoid genfun on R^d is an S(p1, p2, x) (so m = 2d, n = d) satisfying the
unit law S(p, 0, x) = S(0, p, x) = <p, x>; associativity then holds either
exactly (symplectic, abelian) or to a controlled order (truncated group
law, semiclassical expansion).  Three families are built here:

* ``symplectic_monoid`` — the closed-form quadratic S for a constant
  invertible bivector;
* ``lie_monoid`` — <x, A(p1, p2)> with A the group law of a Lie algebra,
  truncated at bracket order <= 4;
* ``kontsevich_monoid`` — the semiclassical expansion for an arbitrary
  polynomial Poisson bivector, to first or second order in the formal
  parameter, with the second-order tree weights determined numerically by
  an associativity fit.

Plus the structure types they consume: ``LieStructure`` (structure
constants), ``MatrixRep`` (a faithful matrix representation, used by the
group-law oracle), and ``PolyPoisson`` (a polynomial bivector).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .genfun import PolyGenFun
from .jets import poly_term_jet
from .matfun import mat_exp, mat_log

STRUCTURE_JACOBI_TOL = 1e-12
ORDER2_GATE_FLOOR = 1e-8


# --------------------------------------------------------------------------
# Lie structures and matrix representations
# --------------------------------------------------------------------------

@dataclass
class LieStructure:
    """Structure constants c[k, i, j] = c^k_{ij} of a real Lie algebra,
    i.e. [e_i, e_j] = sum_k c^k_{ij} e_k."""

    d: int
    c: np.ndarray
    name: str = ""

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float)
        if self.c.shape != (self.d, self.d, self.d):
            raise ValueError(f"structure constants must have shape (d,d,d)={self.d}")
        if not np.array_equal(self.c, -self.c.transpose(0, 2, 1)):
            raise ValueError("structure constants are not antisymmetric in the lower indices")
        jac = (np.einsum("mij,lmk->lijk", self.c, self.c)
               + np.einsum("mjk,lmi->lijk", self.c, self.c)
               + np.einsum("mki,lmj->lijk", self.c, self.c))
        worst = float(np.max(np.abs(jac), initial=0.0))
        if worst > STRUCTURE_JACOBI_TOL:
            raise ValueError(f"structure constants violate the Jacobi identity (residual {worst:.3e})")

    def bracket(self, u, v):
        return np.einsum("kij,i,j->k", self.c, np.asarray(u, float), np.asarray(v, float))

    @classmethod
    def so3(cls):
        c = np.zeros((3, 3, 3))
        for i, j, k in [(0, 1, 2), (1, 2, 0), (2, 0, 1)]:
            c[k, i, j] = 1.0
            c[k, j, i] = -1.0
        return cls(3, c, name="so3")

    @classmethod
    def heisenberg(cls):
        c = np.zeros((3, 3, 3))
        c[2, 0, 1] = 1.0
        c[2, 1, 0] = -1.0
        return cls(3, c, name="heisenberg")

    @classmethod
    def abelian(cls, d):
        return cls(d, np.zeros((d, d, d)), name=f"abelian{d}")


@dataclass
class MatrixRep:
    """A matrix representation of a Lie algebra: basis[i] represents e_i."""

    basis: np.ndarray  # (d, N, N)
    name: str = ""

    @property
    def d(self):
        return self.basis.shape[0]

    def matrix(self, v):
        return np.einsum("i,iab->ab", np.asarray(v, float), self.basis)

    def vee(self, M, tol=1e-8):
        """Coordinates of M in the basis span; errors if M leaves the span."""
        A = self.basis.reshape(self.d, -1).T
        sol, *_ = np.linalg.lstsq(A, M.ravel(), rcond=None)
        resid = np.linalg.norm(A @ sol - M.ravel(), ord=np.inf)
        if resid > tol * max(1.0, np.linalg.norm(M, ord=np.inf)):
            raise ValueError(f"matrix is not in the representation span (residual {resid:.3e})")
        return sol

    def bracket_residual(self, structure: LieStructure) -> float:
        """max deviation of [B_i, B_j] from sum_k c^k_{ij} B_k (0 iff the rep
        respects the structure)."""
        worst = 0.0
        for i in range(self.d):
            for j in range(self.d):
                comm = self.basis[i] @ self.basis[j] - self.basis[j] @ self.basis[i]
                target = np.einsum("k,kab->ab", structure.c[:, i, j], self.basis)
                worst = max(worst, float(np.max(np.abs(comm - target))))
        return worst

    @classmethod
    def so3(cls):
        basis = np.zeros((3, 3, 3))
        basis[0] = [[0, 0, 0], [0, 0, -1], [0, 1, 0]]
        basis[1] = [[0, 0, 1], [0, 0, 0], [-1, 0, 0]]
        basis[2] = [[0, -1, 0], [1, 0, 0], [0, 0, 0]]
        return cls(basis, name="so3")

    @classmethod
    def heisenberg(cls):
        # strictly upper triangular 3x3; faithful (the adjoint rep is not)
        basis = np.zeros((3, 3, 3))
        basis[0][0, 1] = 1.0
        basis[1][1, 2] = 1.0
        basis[2][0, 2] = 1.0
        return cls(basis, name="heisenberg")


def builtin_rep(name: str) -> MatrixRep:
    try:
        return {"so3": MatrixRep.so3, "heisenberg": MatrixRep.heisenberg}[name]()
    except KeyError:
        raise ValueError(f"no builtin matrix representation named {name!r}") from None


def group_log(rep: MatrixRep, u, v) -> np.ndarray:
    """The group-law oracle: log(exp(u) exp(v)) computed in a faithful
    matrix representation and pulled back to algebra coordinates."""
    M = mat_exp(rep.matrix(u)) @ mat_exp(rep.matrix(v))
    return rep.vee(mat_log(M))


# --------------------------------------------------------------------------
# Truncated group law as a polynomial, and the lie monoid
# --------------------------------------------------------------------------

def _vp_zero(d):
    return [dict() for _ in range(d)]


def _vp_slot(d, slot):
    """The vector polynomial p^(slot) itself, as a function of (p1, p2)."""
    out = _vp_zero(d)
    for k in range(d):
        e = [0] * (2 * d)
        e[slot * d + k] = 1
        out[k] = {tuple(e): 1.0}
    return out


def _poly_mul(a, b):
    out = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            key = tuple(x + y for x, y in zip(ea, eb))
            out[key] = out.get(key, 0.0) + ca * cb
    return out


def _vp_bracket(u, v, structure: LieStructure):
    d = structure.d
    out = _vp_zero(d)
    for k in range(d):
        acc = {}
        for i in range(d):
            for j in range(d):
                cij = structure.c[k, i, j]
                if cij == 0.0 or not u[i] or not v[j]:
                    continue
                for e, cc in _poly_mul(u[i], v[j]).items():
                    acc[e] = acc.get(e, 0.0) + cij * cc
        out[k] = {e: c for e, c in acc.items() if c != 0.0}
    return out


def _vp_axpy(out, scale, u):
    for k, comp in enumerate(u):
        for e, c in comp.items():
            out[k][e] = out[k].get(e, 0.0) + scale * c


def truncated_group_law(structure: LieStructure, trunc: int):
    """The group law z(p1, p2) with brackets kept through order ``trunc``
    (1 <= trunc <= 4), as a vector of sparse polynomials in (p1, p2)."""
    if not 1 <= trunc <= 4:
        raise ValueError(f"trunc must be between 1 and 4, got {trunc}")
    d = structure.d
    X = _vp_slot(d, 0)
    Y = _vp_slot(d, 1)
    A = _vp_zero(d)
    _vp_axpy(A, 1.0, X)
    _vp_axpy(A, 1.0, Y)
    if trunc >= 2:
        _vp_axpy(A, 0.5, _vp_bracket(X, Y, structure))
    if trunc >= 3:
        XXY = _vp_bracket(X, _vp_bracket(X, Y, structure), structure)
        YYX = _vp_bracket(Y, _vp_bracket(Y, X, structure), structure)
        _vp_axpy(A, 1.0 / 12.0, XXY)
        _vp_axpy(A, 1.0 / 12.0, YYX)
    if trunc >= 4:
        YXXY = _vp_bracket(
            Y, _vp_bracket(X, _vp_bracket(X, Y, structure), structure), structure)
        _vp_axpy(A, -1.0 / 24.0, YXXY)
    return A


def group_law_poly_eval(A, p1, p2):
    """Evaluate a truncated group law at numeric (p1, p2)."""
    pt = np.concatenate([np.asarray(p1, float), np.asarray(p2, float)])
    return np.array([sum(c * poly_term_jet(1.0, e, pt, 0).value for e, c in comp.items())
                     for comp in A])


def lie_monoid(structure: LieStructure, trunc: int = 4) -> PolyGenFun:
    """S(p1, p2, x) = <x, A(p1, p2)> with A the truncated group law."""
    d = structure.d
    A = truncated_group_law(structure, trunc)
    terms = {}
    for k, comp in enumerate(A):
        xe = [0] * d
        xe[k] = 1
        for pe, coeff in comp.items():
            terms[(pe, tuple(xe))] = coeff
    kappa = float(np.linalg.norm(structure.c.ravel()))
    radius = np.inf if kappa == 0.0 else 0.5 * math.log(2.0) / kappa
    return PolyGenFun(terms, 2 * d, d, radius,
                      label=f"lie-{structure.name or 'custom'}-trunc{trunc}")


def abelian_monoid(d) -> PolyGenFun:
    """S = <p1 + p2, x>: the additive monoid, zero bivector."""
    terms = {}
    for i in range(d):
        xe = [0] * d
        xe[i] = 1
        for slot in range(2):
            pe = [0] * (2 * d)
            pe[slot * d + i] = 1
            terms[(tuple(pe), tuple(xe))] = 1.0
    return PolyGenFun(terms, 2 * d, d, np.inf, label=f"abelian-{d}")


# --------------------------------------------------------------------------
# Symplectic monoid
# --------------------------------------------------------------------------

def standard_bivector(d) -> np.ndarray:
    """The block-standard constant bivector [[0, I], [-I, 0]] on even d."""
    if d % 2 != 0:
        raise ValueError(f"a symplectic dimension must be even, got {d}")
    k = d // 2
    jinv = np.zeros((d, d))
    jinv[:k, k:] = np.eye(k)
    jinv[k:, :k] = -np.eye(k)
    return jinv


def symplectic_monoid(d, jinv=None) -> PolyGenFun:
    """S = <p1 + p2, x> + (1/2) p1^T jinv p2 for a constant invertible
    antisymmetric jinv (defaults to the block-standard one)."""
    jinv = standard_bivector(d) if jinv is None else np.asarray(jinv, dtype=float)
    if jinv.shape != (d, d):
        raise ValueError(f"jinv must be {d}x{d}")
    if not np.allclose(jinv, -jinv.T, atol=0.0):
        raise ValueError("jinv must be antisymmetric")
    if abs(np.linalg.det(jinv)) < 1e-300:
        raise ValueError("jinv must be invertible")
    terms = dict(abelian_monoid(d).terms)
    xe0 = (0,) * d
    for i in range(d):
        for j in range(d):
            if jinv[i, j] == 0.0:
                continue
            pe = [0] * (2 * d)
            pe[i] += 1
            pe[d + j] += 1
            terms[(tuple(pe), xe0)] = 0.5 * jinv[i, j]
    return PolyGenFun(terms, 2 * d, d, np.inf, label=f"symplectic-{d}")


# --------------------------------------------------------------------------
# Polynomial Poisson bivectors
# --------------------------------------------------------------------------

class PolyPoisson:
    """A polynomial bivector on R^d, stored as its strict upper triangle.

    ``entries[(i, j)]`` with i < j maps x-exponent tuples to coefficients of
    alpha^{ij}; the lower triangle is the exact negation, the diagonal is
    identically zero.  Construction does not enforce the Jacobi identity
    (verification code must be able to represent broken bivectors);
    ``jacobi_residual`` measures it and the monoid builders require it.
    """

    def __init__(self, d, entries):
        self.d = int(d)
        self.entries = {}
        for (i, j), poly in entries.items():
            i, j = int(i), int(j)
            if not 0 <= i < j < self.d:
                raise ValueError(f"entry ({i}, {j}) is not strictly upper triangular for d={self.d}")
            canon = {}
            for e, c in poly.items():
                e = tuple(int(v) for v in e)
                if len(e) != self.d:
                    raise ValueError("x-exponent length does not match d")
                canon[e] = canon.get(e, 0.0) + float(c)
            canon = {e: c for e, c in canon.items() if c != 0.0}
            if canon:
                self.entries[(i, j)] = canon

    @classmethod
    def from_constant(cls, A):
        A = np.asarray(A, dtype=float)
        d = A.shape[0]
        if not np.allclose(A, -A.T, atol=0.0):
            raise ValueError("constant bivector must be antisymmetric")
        ent = {}
        for i in range(d):
            for j in range(i + 1, d):
                if A[i, j] != 0.0:
                    ent[(i, j)] = {(0,) * d: A[i, j]}
        return cls(d, ent)

    @classmethod
    def linear_from_structure(cls, structure: LieStructure):
        """alpha^{ij}(x) = sum_k c^k_{ij} x_k (the linear bivector attached
        to a Lie algebra)."""
        d = structure.d
        ent = {}
        for i in range(d):
            for j in range(i + 1, d):
                poly = {}
                for k in range(d):
                    v = structure.c[k, i, j]
                    if v != 0.0:
                        e = [0] * d
                        e[k] = 1
                        poly[tuple(e)] = v
                if poly:
                    ent[(i, j)] = poly
        return cls(d, ent)

    def entry_poly(self, i, j):
        """alpha^{ij} as a signed x-polynomial dict (empty on the diagonal)."""
        if i == j:
            return {}
        if i < j:
            return dict(self.entries.get((i, j), {}))
        return {e: -c for e, c in self.entries.get((j, i), {}).items()}

    def matrix_jet(self, x, order=0):
        """(alpha(x), d alpha(x)) with dalpha[i, j, l] = d alpha^{ij} / dx_l
        (the derivative array is None for order 0)."""
        x = np.asarray(x, dtype=float)
        d = self.d
        alpha = np.zeros((d, d))
        dalpha = np.zeros((d, d, d)) if order >= 1 else None
        for (i, j), poly in self.entries.items():
            v = 0.0
            g = np.zeros(d)
            for e, c in poly.items():
                jt = poly_term_jet(c, e, x, 1 if order >= 1 else 0)
                v += jt.value
                if order >= 1:
                    g += jt.grad
            alpha[i, j] = v
            alpha[j, i] = -v
            if order >= 1:
                dalpha[i, j] = g
                dalpha[j, i] = -g
        return alpha, dalpha

    def __call__(self, x):
        return self.matrix_jet(x, 0)[0]

    def jacobi_residual(self, xs) -> float:
        """max over sample points of the cyclic Jacobi sum."""
        worst = 0.0
        for x in np.atleast_2d(xs):
            alpha, dalpha = self.matrix_jet(x, 1)
            t = np.einsum("il,jkl->ijk", alpha, dalpha)
            jac = t + t.transpose(1, 2, 0) + t.transpose(2, 0, 1)
            worst = max(worst, float(np.max(np.abs(jac), initial=0.0)))
        return worst

    def coeff_scale(self) -> float:
        return max((abs(c) for poly in self.entries.values() for c in poly.values()),
                   default=0.0)

    def scaled(self, s):
        return PolyPoisson(self.d, {k: {e: s * c for e, c in poly.items()}
                                    for k, poly in self.entries.items()})


# --------------------------------------------------------------------------
# Semiclassical (Kontsevich-type) monoid
# --------------------------------------------------------------------------

class Order2GateError(RuntimeError):
    """The second-order tree-weight fit failed its residual-floor gate."""

    def __init__(self, fit):
        self.fit = fit
        super().__init__(
            f"order-2 weight fit floor {fit.floor:.3e} exceeds the gate {ORDER2_GATE_FLOOR:.1e}"
        )


@dataclass(frozen=True)
class TreeWeightFit:
    """Result of the order-2 associativity fit."""

    c1: float
    c2: float
    floor: float
    n_rows: int
    seed: int
    eps: float
    levels: int

    @property
    def passed(self) -> bool:
        return self.floor <= ORDER2_GATE_FLOOR


def _first_order_terms(alpha: PolyPoisson, scale: float):
    """(scale/2) * alpha^{ij}(x) p1_i p2_j over all ordered pairs."""
    d = alpha.d
    terms = {}
    for i in range(d):
        for j in range(d):
            for xe, c in alpha.entry_poly(i, j).items():
                pe = [0] * (2 * d)
                pe[i] += 1
                pe[d + j] += 1
                key = (tuple(pe), xe)
                terms[key] = terms.get(key, 0.0) + scale * (0.5 * c)
    return terms


def _poly_derivative(poly, l):
    out = {}
    for e, c in poly.items():
        if e[l] == 0:
            continue
        de = list(e)
        de[l] -= 1
        key = tuple(de)
        out[key] = out.get(key, 0.0) + c * e[l]
    return out


def tree_symbol_terms(alpha: PolyPoisson, which: int):
    """The two independent second-order contractions of the bivector.

    which=1:  sum d_l alpha^{ij} alpha^{lk} p1_i p2_j p1_k
    which=2:  sum d_l alpha^{ij} alpha^{lk} p1_i p2_j p2_k

    (Antisymmetry of alpha makes every other (2,2)-contraction a linear
    combination of these two.)
    """
    if which not in (1, 2):
        raise ValueError("which must be 1 or 2")
    d = alpha.d
    terms = {}
    for i in range(d):
        for j in range(d):
            aij = alpha.entry_poly(i, j)
            if not aij:
                continue
            for l in range(d):
                dij = _poly_derivative(aij, l)
                if not dij:
                    continue
                for k in range(d):
                    alk = alpha.entry_poly(l, k)
                    if not alk:
                        continue
                    prod = _poly_mul(dij, alk)
                    pe = [0] * (2 * d)
                    pe[i] += 1
                    pe[d + j] += 1
                    if which == 1:
                        pe[k] += 1
                    else:
                        pe[d + k] += 1
                    pkey = tuple(pe)
                    for xe, c in prod.items():
                        key = (pkey, xe)
                        terms[key] = terms.get(key, 0.0) + c
    return terms


def kontsevich_monoid(alpha: PolyPoisson, eps: float = 1.0, order: int = 1,
                      weights=None, jacobi_grid=None) -> PolyGenFun:
    """Semiclassical monoid genfun for a polynomial bivector.

    order=1:  S = <p1+p2, x> + (eps/2) alpha^{ij}(x) p1_i p2_j
    order=2:  adds eps^2 (c1 T1 + c2 T2) with (c1, c2) from the
              associativity fit (or ``weights`` if given).

    The bivector must satisfy the Jacobi identity; it is checked on
    ``jacobi_grid`` when provided, else on a small deterministic grid.
    Raises :class:`Order2GateError` when the fit floor exceeds the gate.
    """
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order}")
    if jacobi_grid is None:
        from .grids import sample_box
        jacobi_grid = sample_box(32, alpha.d, -1.0, 1.0, seed=7)
    jr = alpha.jacobi_residual(jacobi_grid)
    if jr > 1e-10:
        raise ValueError(f"bivector violates the Jacobi identity (residual {jr:.3e})")

    d = alpha.d
    terms = dict(abelian_monoid(d).terms)
    for key, c in _first_order_terms(alpha, eps).items():
        terms[key] = terms.get(key, 0.0) + c

    fit = None
    if order >= 2:
        if weights is None:
            fit = fit_tree_weights()
            if not fit.passed:
                raise Order2GateError(fit)
            c1, c2 = fit.c1, fit.c2
        else:
            c1, c2 = weights
        e2 = eps * eps
        for which, cw in ((1, c1), (2, c2)):
            for key, c in tree_symbol_terms(alpha, which).items():
                terms[key] = terms.get(key, 0.0) + e2 * (cw * c)

    kappa = eps * alpha.coeff_scale()
    radius = np.inf if kappa == 0.0 else 0.5 / kappa
    gf = PolyGenFun(terms, 2 * d, d, radius,
                    label=f"kontsevich-d{d}-order{order}-eps{eps:g}")
    gf.eps = eps
    gf.expansion_order = order
    gf.order2_fit = fit
    return gf


# --------------------------------------------------------------------------
# The associativity fit for the order-2 tree weights
# --------------------------------------------------------------------------

def _richardson_leading(values, eps, leading=2):
    """Coefficient of eps^leading from evaluations at eps / 2^i.

    ``values[i] = R(eps / 2^i)``; models R as a polynomial with powers
    leading .. leading + len(values) - 1 and eliminates all but the leading
    power.
    """
    K = len(values)
    powers = np.arange(leading, leading + K)
    V = np.array([[(eps / 2.0 ** i) ** q for q in powers] for i in range(K)])
    coef = np.linalg.solve(V, np.asarray(values, dtype=float))
    return coef[0]


def _fit_instances():
    """Bivectors used by the weight fit: one linear (so3) and one
    non-linear d=2 instance (any single-entry bivector is Poisson)."""
    lin = PolyPoisson.linear_from_structure(LieStructure.so3()).scaled(0.6)
    quad = PolyPoisson(2, {(0, 1): {(0, 0): 0.4, (1, 0): 0.3, (2, 0): 0.25}})
    return [lin, quad]


@lru_cache(maxsize=None)
def fit_tree_weights(seed: int = 11, n_points: int = 24, eps: float = 0.08,
                     levels: int = 4) -> TreeWeightFit:
    """Determine the order-2 tree weights by least squares.

    For candidate weights c the second-order coefficient of the
    associativity defect is affine in c; the coefficient is extracted by
    Richardson elimination over ``levels`` halvings of eps and the affine
    system is solved in the least-squares sense over deterministic sample
    points for each fit instance.  The floor (residual of the solved
    system, in eps^2-coefficient units) reports how associative the fitted
    order-2 monoid can possibly be.
    """
    from .compose import compose
    from .genfun import identity_genfun, tensor
    from .grids import sample_ball, sample_box

    basis = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]
    rows = []
    rhs = []
    for inst_idx, alpha in enumerate(_fit_instances()):
        d = alpha.d
        ps = sample_ball(n_points, 3 * d, 0.35, seed=seed + 100 * inst_idx)
        xs = sample_box(n_points, d, -0.9, 0.9, seed=seed + 100 * inst_idx + 1)
        # defect(q) for each candidate at each eps level
        defect = np.zeros((len(basis), levels, n_points))
        for ci, cand in enumerate(basis):
            for lev in range(levels):
                e = eps / 2.0 ** lev
                S = kontsevich_monoid(alpha, eps=e, order=2, weights=cand)
                I = identity_genfun(d)
                left = compose(S, tensor(S, I))
                right = compose(S, tensor(I, S))
                for qi in range(n_points):
                    p = ps[qi]
                    x = xs[qi]
                    defect[ci, lev, qi] = left(p, x) - right(p, x)
        for qi in range(n_points):
            base = _richardson_leading(defect[0, :, qi], eps)
            col1 = _richardson_leading(defect[1, :, qi], eps) - base
            col2 = _richardson_leading(defect[2, :, qi], eps) - base
            rows.append([col1, col2])
            rhs.append(base)
    A = np.array(rows)
    b = np.array(rhs)
    sol, *_ = np.linalg.lstsq(A, -b, rcond=None)
    floor = float(np.max(np.abs(A @ sol + b), initial=0.0))
    return TreeWeightFit(float(sol[0]), float(sol[1]), floor,
                         n_rows=len(rows), seed=seed, eps=eps, levels=levels)
