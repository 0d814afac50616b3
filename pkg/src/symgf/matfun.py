"""Dense matrix exponential and logarithm for small matrices.

Only what the Lie-group oracles need: ``mat_exp`` by scaling-and-squaring of
a Taylor core, ``mat_log`` by inverse scaling (repeated principal square
roots via the Denman-Beavers iteration) followed by a Mercator series.
Matrices are plain ``numpy.ndarray``; inputs here are tiny (<= 10 x 10
group representations), so simplicity and verifiable series truncation beat
cleverness.
"""
from __future__ import annotations

import numpy as np

_TAYLOR_THETA = 0.25  # scale ||A|| below this before the exp Taylor core
_LOG_THETA = 0.25     # take square roots until ||M - I|| is below this


def mat_exp(A: np.ndarray) -> np.ndarray:
    """exp(A) by scaling-and-squaring with a convergent Taylor core."""
    A = np.asarray(A, dtype=float)
    _check_square(A)
    norm = np.linalg.norm(A, ord=np.inf)
    s = 0
    if norm > _TAYLOR_THETA:
        s = int(np.ceil(np.log2(norm / _TAYLOR_THETA)))
    B = A / (2.0 ** s)
    E = _exp_taylor(B)
    for _ in range(s):
        E = E @ E
    return E


def _exp_taylor(B, max_terms=30):
    n = B.shape[0]
    term = np.eye(n)
    acc = np.eye(n)
    for k in range(1, max_terms + 1):
        term = term @ B / k
        acc = acc + term
        if np.linalg.norm(term, ord=np.inf) < 1e-18 * max(1.0, np.linalg.norm(acc, ord=np.inf)):
            break
    return acc


def mat_log(M: np.ndarray, max_sqrt=40) -> np.ndarray:
    """Principal log of a matrix with no eigenvalues on the closed negative
    real axis.  Inverse scaling-and-squaring: sqrt until close to I, then
    log(I + X) = X - X^2/2 + X^3/3 - ...
    """
    M = np.asarray(M, dtype=float)
    _check_square(M)
    n = M.shape[0]
    Y = M.copy()
    s = 0
    while np.linalg.norm(Y - np.eye(n), ord=np.inf) > _LOG_THETA:
        if s >= max_sqrt:
            raise np.linalg.LinAlgError("mat_log: inverse scaling did not contract toward I")
        Y = _sqrtm_db(Y)
        s += 1
    L = _log_mercator(Y - np.eye(n))
    return (2.0 ** s) * L


def _log_mercator(X, max_terms=60):
    acc = np.zeros_like(X)
    P = np.eye(X.shape[0])
    for k in range(1, max_terms + 1):
        P = P @ X
        acc = acc + ((-1.0) ** (k + 1) / k) * P
        if np.linalg.norm(P, ord=np.inf) / k < 1e-18:
            break
    return acc


def _sqrtm_db(M, tol=1e-15, max_iter=60):
    """Principal square root by the Denman-Beavers iteration."""
    Y = M.copy()
    Z = np.eye(M.shape[0])
    for _ in range(max_iter):
        Yn = 0.5 * (Y + np.linalg.inv(Z))
        Zn = 0.5 * (Z + np.linalg.inv(Y))
        delta = np.linalg.norm(Yn - Y, ord=np.inf)
        Y, Z = Yn, Zn
        if delta < tol * max(1.0, np.linalg.norm(Y, ord=np.inf)):
            break
    else:
        raise np.linalg.LinAlgError("matrix square root iteration did not converge")
    return Y


def _check_square(A):
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
