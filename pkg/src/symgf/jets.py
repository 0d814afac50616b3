"""Truncated Taylor expansions (jets) of scalar functions of several variables.

A ``Jet`` stores the value and the symmetric derivative tensors of a smooth
function at a point, truncated at a fixed order <= 3.  All higher-order
structure in this library (Hessians of generating functions, third
derivatives needed for Poisson bivectors of composed functions) is carried
through these objects, so the arithmetic here is deliberately boring and
heavily tested: truncated Leibniz products and linear combinations, nothing
else.

Conventions
-----------
* ``grad[i] = dF/dv_i``
* ``hess[i, j] = d^2 F / dv_i dv_j`` (symmetric)
* ``third[i, j, k] = d^3 F / dv_i dv_j dv_k`` (fully symmetric)

Derivative tensors above ``order`` are ``None``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_ORDER = 3


@dataclass
class Jet:
    """Taylor data of a scalar function of ``nvars`` variables at a point."""

    order: int
    value: float
    grad: np.ndarray | None = None
    hess: np.ndarray | None = None
    third: np.ndarray | None = None

    @property
    def nvars(self) -> int:
        return 0 if self.grad is None else self.grad.shape[0]

    def __post_init__(self):
        if not 0 <= self.order <= MAX_ORDER:
            raise ValueError(f"jet order must be in [0, {MAX_ORDER}], got {self.order}")
        self.value = float(self.value)


def jet_const(value, nvars, order) -> Jet:
    """Jet of the constant function ``value``."""
    g = np.zeros(nvars) if order >= 1 else None
    h = np.zeros((nvars, nvars)) if order >= 2 else None
    t = np.zeros((nvars, nvars, nvars)) if order >= 3 else None
    return Jet(order, value, g, h, t)


def jet_var(value, index, nvars, order) -> Jet:
    """Jet of the coordinate function ``v[index]`` evaluated at ``value``."""
    out = jet_const(value, nvars, order)
    if order >= 1:
        out.grad[index] = 1.0
    return out


def jet_add(a: Jet, b: Jet) -> Jet:
    _check_compatible(a, b)
    out = Jet(a.order, a.value + b.value)
    if a.order >= 1:
        out.grad = a.grad + b.grad
    if a.order >= 2:
        out.hess = a.hess + b.hess
    if a.order >= 3:
        out.third = a.third + b.third
    return out


def jet_scale(a: Jet, c: float) -> Jet:
    out = Jet(a.order, c * a.value)
    if a.order >= 1:
        out.grad = c * a.grad
    if a.order >= 2:
        out.hess = c * a.hess
    if a.order >= 3:
        out.third = c * a.third
    return out


def jet_sub(a: Jet, b: Jet) -> Jet:
    return jet_add(a, jet_scale(b, -1.0))


def jet_mul(a: Jet, b: Jet) -> Jet:
    """Truncated Leibniz product of two jets at the same point."""
    _check_compatible(a, b)
    out = Jet(a.order, a.value * b.value)
    if a.order >= 1:
        out.grad = a.value * b.grad + b.value * a.grad
    if a.order >= 2:
        cross = np.outer(a.grad, b.grad)
        out.hess = a.value * b.hess + b.value * a.hess + cross + cross.T
    if a.order >= 3:
        out.third = (
            a.value * b.third
            + b.value * a.third
            + _sym_grad_hess(a.grad, b.hess)
            + _sym_grad_hess(b.grad, a.hess)
        )
    return out


def _sym_grad_hess(g, h):
    # symmetrized g (x) h: the third-order Leibniz cross term
    gh = np.einsum("i,jk->ijk", g, h)
    return gh + gh.transpose(1, 0, 2) + gh.transpose(2, 1, 0)


def _check_compatible(a: Jet, b: Jet):
    if a.order != b.order:
        raise ValueError(f"jet order mismatch: {a.order} vs {b.order}")
    if a.order >= 1 and a.grad.shape != b.grad.shape:
        raise ValueError("jet variable-count mismatch")


def jet_embed(j: Jet, index_map, nvars_out) -> Jet:
    """Re-index a jet into a larger variable space.

    ``index_map[i]`` is the slot in the output space occupied by input
    variable ``i``.  Derivatives with respect to all other output variables
    vanish (the function does not depend on them).
    """
    idx = np.asarray(index_map, dtype=int)
    out = jet_const(j.value, nvars_out, j.order)
    if j.order >= 1:
        out.grad[idx] = j.grad
    if j.order >= 2:
        out.hess[np.ix_(idx, idx)] = j.hess
    if j.order >= 3:
        out.third[np.ix_(idx, idx, idx)] = j.third
    return out


def jet_pullback_linear(j: Jet, E: np.ndarray) -> Jet:
    """Jet of ``v -> F(E v + const)`` given the jet of ``F`` at the image point.

    ``E`` has shape ``(nvars_in, nvars_out)``; only the chain rule for an
    affine substitution is applied (no second-derivative-of-the-map terms),
    which is exactly what stationary-point envelopes need.
    """
    out = Jet(j.order, j.value)
    if j.order >= 1:
        out.grad = j.grad @ E
    if j.order >= 2:
        out.hess = E.T @ j.hess @ E
    if j.order >= 3:
        out.third = np.einsum("abc,ai,bj,ck->ijk", j.third, E, E, E)
    return out


def poly_term_jet(coeff, exps, point, order) -> Jet:
    """Exact jet of the monomial ``coeff * prod_i v_i**exps[i]`` at ``point``.

    Uses falling-factorial derivative formulas rather than repeated jet
    products; exact up to float rounding and much faster for sparse
    polynomials.
    """
    exps = np.asarray(exps, dtype=int)
    point = np.asarray(point, dtype=float)
    n = exps.shape[0]
    out = jet_const(0.0, n, order)
    out.value = coeff * _mono(point, exps)
    if order >= 1:
        for i in np.nonzero(exps)[0]:
            out.grad[i] = coeff * _dmono(point, exps, (i,))
    if order >= 2:
        for i in range(n):
            for jv in range(i, n):
                v = coeff * _dmono(point, exps, (i, jv))
                if v != 0.0:
                    out.hess[i, jv] = v
                    out.hess[jv, i] = v
    if order >= 3:
        for i in range(n):
            for jv in range(i, n):
                for k in range(jv, n):
                    v = coeff * _dmono(point, exps, (i, jv, k))
                    if v != 0.0:
                        for perm in {(i, jv, k), (i, k, jv), (jv, i, k),
                                     (jv, k, i), (k, i, jv), (k, jv, i)}:
                            out.third[perm] = v
    return out


def _mono(point, exps):
    v = 1.0
    for i in np.nonzero(exps)[0]:
        v *= point[i] ** exps[i]
    return v


def _dmono(point, exps, wrt):
    """Partial derivative of the monomial with exponents ``exps`` at ``point``,
    differentiated once per entry of ``wrt`` (repeats allowed)."""
    e = exps.copy()
    c = 1.0
    for i in wrt:
        if e[i] == 0:
            return 0.0
        c *= e[i]
        e[i] -= 1
    return c * _mono(point, e)
