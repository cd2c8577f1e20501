"""Dense linear algebra over real and complex scalars.

Matrices are plain 2-D numpy arrays. Only two eigenproblems are solved here:
real symmetric (cyclic Jacobi) and circulant (closed-form DFT basis).
Anything else must come with a user-supplied decomposition.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ConvergenceError,
    DimensionError,
    NonFiniteError,
    NotSymmetricError,
    SingularMatrixError,
)

SYMMETRY_TOL = 1e-12
PIVOT_TOL = 1e-12
JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100


def _check_finite(arr: np.ndarray, name: str) -> np.ndarray:
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError(f"{name} contains NaN or infinite entries")
    return arr


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-D float or complex array (copying integer input)."""
    arr = np.asarray(a)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.issubdtype(arr.dtype, np.complexfloating):
        arr = arr.astype(float)
    return _check_finite(arr, name)


def as_vector(v, name: str = "vector") -> np.ndarray:
    arr = np.asarray(v)
    if arr.ndim != 1:
        raise DimensionError(f"{name} must be 1-D, got shape {arr.shape}")
    if not np.issubdtype(arr.dtype, np.complexfloating):
        arr = arr.astype(float)
    return _check_finite(arr, name)


def max_abs(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def matmul(a, b) -> np.ndarray:
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


@dataclass(frozen=True)
class LUFactors:
    """Row-pivoted LU factors packed in one array: ``a[perm] = L @ U``."""

    lu: np.ndarray
    perm: np.ndarray

    @property
    def n(self) -> int:
        return self.lu.shape[0]


def lu_factor(a) -> LUFactors:
    a = as_matrix(a, "a")
    n, m = a.shape
    if n != m:
        raise DimensionError(f"matrix must be square, got {a.shape}")
    scale = max_abs(a)
    if n and scale == 0.0:
        raise SingularMatrixError("matrix is identically zero")
    lu = a.copy()
    perm = np.arange(n)
    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        if abs(lu[p, k]) < PIVOT_TOL * scale:
            raise SingularMatrixError(
                f"pivot {abs(lu[p, k]):.3e} at column {k} is below "
                f"{PIVOT_TOL:g} * max|entry| = {PIVOT_TOL * scale:.3e}"
            )
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            perm[[k, p]] = perm[[p, k]]
        lu[k + 1 :, k] /= lu[k, k]
        lu[k + 1 :, k + 1 :] -= np.outer(lu[k + 1 :, k], lu[k, k + 1 :])
    lu.setflags(write=False)
    perm.setflags(write=False)
    return LUFactors(lu, perm)


def lu_solve(factors: LUFactors, b) -> np.ndarray:
    b = np.asarray(b)
    vector = b.ndim == 1
    rhs = as_matrix(b.reshape(-1, 1) if vector else b, "b")
    if rhs.shape[0] != factors.n:
        raise DimensionError(f"right-hand side has {rhs.shape[0]} rows, expected {factors.n}")
    lu = factors.lu
    x = rhs[factors.perm].astype(np.result_type(lu, rhs), copy=True)
    n = factors.n
    for k in range(n):
        x[k + 1 :] -= np.outer(lu[k + 1 :, k], x[k])
    for k in range(n - 1, -1, -1):
        x[k] /= lu[k, k]
        x[:k] -= np.outer(lu[:k, k], x[k])
    return x[:, 0] if vector else x


def solve(a, b) -> np.ndarray:
    """Solve ``a @ x = b`` by Gaussian elimination with partial pivoting."""
    return lu_solve(lu_factor(a), b)


def asymmetry(s) -> float:
    s = np.asarray(s)
    return max_abs(s - s.T)


def _normalize_columns(u: np.ndarray) -> np.ndarray:
    """Rotate each column so its first significant entry is positive real."""
    u = u.copy()
    for j in range(u.shape[1]):
        col = u[:, j]
        thresh = 1e-12 * max(max_abs(col), 1e-300)
        idx = int(np.argmax(np.abs(col) > thresh))
        lead = col[idx]
        if np.iscomplexobj(u):
            u[:, j] = col * (np.conj(lead) / abs(lead))
        elif lead < 0:
            u[:, j] = -col
    return u


def eig_symmetric(s) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi eigendecomposition of a real symmetric matrix.

    Returns ``(U, lam)`` with ``U`` orthogonal, ``lam`` ascending and
    ``S @ U == U @ diag(lam)``. Each column's first significant entry is
    made positive so the output is deterministic.
    """
    s = as_matrix(s, "s")
    if np.iscomplexobj(s):
        if max_abs(s.imag) > SYMMETRY_TOL:
            raise NotSymmetricError("matrix has nonzero imaginary part")
        s = s.real.copy()
    n, m = s.shape
    if n != m:
        raise DimensionError(f"matrix must be square, got {s.shape}")
    scale = max_abs(s)
    if asymmetry(s) > SYMMETRY_TOL * max(scale, 1.0):
        raise NotSymmetricError(f"max asymmetry {asymmetry(s):.3e} exceeds {SYMMETRY_TOL:g}")
    a = (s + s.T) / 2.0
    v = np.eye(n)
    fro = float(np.linalg.norm(a))
    target = JACOBI_TOL * fro
    for _ in range(JACOBI_MAX_SWEEPS + 1):
        off = float(np.linalg.norm(a - np.diag(np.diag(a))))
        if off <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                diff = a[q, q] - a[p, p]
                if abs(diff) > 1e150 * abs(apq):
                    t = apq / diff
                else:
                    theta = diff / (2.0 * apq)
                    t = np.copysign(1.0, theta) / (abs(theta) + np.hypot(theta, 1.0))
                c = 1.0 / np.hypot(t, 1.0)
                sn = t * c
                ap, aq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * ap - sn * aq
                a[:, q] = sn * ap + c * aq
                rp, rq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * rp - sn * rq
                a[q, :] = sn * rp + c * rq
                a[p, q] = a[q, p] = 0.0
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - sn * vq
                v[:, q] = sn * vp + c * vq
    else:
        raise ConvergenceError(f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps")
    lam = np.diag(a).copy()
    order = np.argsort(lam, kind="stable")
    return _normalize_columns(v[:, order]), lam[order]


def dft_matrix(n: int) -> np.ndarray:
    """Unitary ``U[j, k] = exp(2 pi i jk / n) / sqrt(n)``."""
    if n < 1:
        raise DimensionError("DFT size must be at least 1")
    jk = np.outer(np.arange(n), np.arange(n)) % n
    return np.exp(2j * np.pi * jk / n) / np.sqrt(n)


def circulant(first_row) -> np.ndarray:
    """Matrix with ``C[j, k] = first_row[(k - j) mod n]``."""
    c = as_vector(first_row, "first_row")
    n = c.size
    idx = (np.arange(n)[None, :] - np.arange(n)[:, None]) % n
    return c[idx]


def is_circulant(s, tol: float = 1e-12) -> bool:
    s = np.asarray(s)
    if s.ndim != 2 or s.shape[0] != s.shape[1] or s.shape[0] == 0:
        return False
    return max_abs(s - circulant(s[0])) <= tol * max(max_abs(s), 1.0)


def eig_circulant(first_row) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form eigendecomposition of the circulant matrix with this first row.

    Column ``k`` of the DFT matrix is an eigenvector with eigenvalue
    ``sum_m first_row[m] * exp(2 pi i mk / n)``. Eigenvalues are kept in
    frequency order ``k = 0..n-1``.
    """
    c = as_vector(first_row, "first_row")
    if c.size == 0:
        raise DimensionError("first_row must be non-empty")
    u = dft_matrix(c.size)
    lam = np.sqrt(c.size) * (u @ c)
    return u, lam


def sort_key(lam) -> np.ndarray:
    """Indices ordering eigenvalues by real part, then imaginary part."""
    lam = np.asarray(lam)
    return np.lexsort((np.imag(lam), np.real(lam)))
