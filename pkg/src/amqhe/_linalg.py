"""Small dense linear algebra helpers used by the spectral pipeline.

The 5x5 generators have norms ~g^2*n_l (thousands) while the dominant
spectral gap is ~0.2, so double-precision eigenvectors carry absolute errors
around eps*||M||/gap ~ 1e-12.  That is too coarse for second lambda-
derivatives of the geometric CGF, whose 5-point stencil amplifies absolute
noise by ~64/(12 h^2) ~ 5e6.  The fix is a Newton polish of all eigenpairs
in extended precision (x86 80-bit long double), after which the quadrature
and stencils run in long double as well.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

LD = np.longdouble
CLD = np.clongdouble


def gauss_solve(a, b):
    """Solve a x = b for batched square systems with partial pivoting.

    a: (..., n, n), b: (..., n, m).  Dtype-generic (works in long double and
    complex long double, which LAPACK does not cover).
    """
    a = np.array(a, copy=True)
    b = np.array(b, copy=True)
    n = a.shape[-1]
    batch = a.shape[:-2]
    flat_a = a.reshape((-1, n, n))
    flat_b = b.reshape((-1, n, b.shape[-1]))
    nb = flat_a.shape[0]
    rows = np.arange(nb)
    for col in range(n):
        piv = np.argmax(np.abs(flat_a[:, col:, col]), axis=1) + col
        swap = piv != col
        if np.any(swap):
            idx = rows[swap]
            pidx = piv[swap]
            tmp = flat_a[idx, col].copy()
            flat_a[idx, col] = flat_a[idx, pidx]
            flat_a[idx, pidx] = tmp
            tmpb = flat_b[idx, col].copy()
            flat_b[idx, col] = flat_b[idx, pidx]
            flat_b[idx, pidx] = tmpb
        fac = flat_a[:, col + 1:, col] / flat_a[:, col:col + 1, col]
        flat_a[:, col + 1:, :] -= fac[:, :, None] * flat_a[:, col:col + 1, :]
        flat_b[:, col + 1:, :] -= fac[:, :, None] * flat_b[:, col:col + 1, :]
    x = np.zeros_like(flat_b)
    for row in range(n - 1, -1, -1):
        rhs = flat_b[:, row, :]
        if row + 1 < n:
            rhs = rhs - np.einsum("bk,bkm->bm", flat_a[:, row, row + 1:], x[:, row + 1:, :])
        x[:, row, :] = rhs / flat_a[:, row, row:row + 1]
    return x.reshape(batch + (n, b.shape[-1]))


def batched_inverse(a):
    """Inverse of batched square matrices via gauss_solve (dtype-generic)."""
    n = a.shape[-1]
    eye = np.broadcast_to(np.eye(n, dtype=a.dtype), a.shape).copy()
    return gauss_solve(a, eye)


def polish_eigensystem(m_ext, w64, v64, iters: int = 2):
    """Newton-refine every eigenpair of each matrix in extended precision.

    m_ext: (N, n, n) in long double (real), w64/v64: double-precision
    eigenvalues/eigenvectors used as starting guesses.  Returns
    (w, v, vinv): eigenvalues (N, n), unit-norm right eigenvectors as
    columns of v (N, n, n) and the biorthogonal left rows vinv = v^-1,
    all in complex long double.

    One Newton step solves the bordered system

        [[M - z I, -v], [v*, 0]] [dv, dz] = [-(M v - z v), 0]

    which is quadratically convergent for simple eigenvalues.
    """
    nmat, n, _ = m_ext.shape
    m = m_ext.astype(CLD)
    w = np.zeros((nmat, n), CLD)
    v = np.zeros((nmat, n, n), CLD)
    rhs = np.zeros((nmat, n + 1, 1), CLD)
    for k in range(n):
        vk = v64[:, :, k].astype(CLD)
        vk = vk / np.linalg.norm(vk, axis=1)[:, None]
        zk = w64[:, k].astype(CLD)
        for _ in range(iters):
            resid = np.einsum("nij,nj->ni", m, vk) - zk[:, None] * vk
            jac = np.zeros((nmat, n + 1, n + 1), CLD)
            jac[:, :n, :n] = m
            jac[:, np.arange(n), np.arange(n)] -= zk[:, None]
            jac[:, :n, n] = -vk
            jac[:, n, :n] = vk.conj()
            rhs[:, :n, 0] = -resid
            delta = gauss_solve(jac, rhs)[..., 0]
            vk = vk + delta[:, :n]
            zk = zk + delta[:, n]
            vk = vk / np.linalg.norm(vk, axis=1)[:, None]
        w[:, k] = zk
        v[:, :, k] = vk
    vinv = batched_inverse(v)
    return w, v, vinv


def _legendre_eval(x, n):
    """P_n(x) and P_n'(x) by upward recurrence, dtype-preserving."""
    p0 = np.ones_like(x)
    p1 = x.copy()
    for k in range(2, n + 1):
        p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
    dp = n * (x * p1 - p0) / (x * x - 1)
    return p1, dp


@lru_cache(maxsize=64)
def gauss_legendre(n: int):
    """Gauss-Legendre nodes/weights on [-1, 1] polished to long double."""
    x64, _ = np.polynomial.legendre.leggauss(n)
    x = x64.astype(LD)
    for _ in range(3):
        p, dp = _legendre_eval(x, n)
        x = x - p / dp
    _, dp = _legendre_eval(x, n)
    w = 2 / ((1 - x * x) * dp * dp)
    return x, w
