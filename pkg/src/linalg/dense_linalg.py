from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from loguru import logger
from scipy.linalg import cho_solve

from src.exceptions import (AsymmetricMatrixError, DimensionMismatchError, NotConvergedError,
                            NotPositiveDefiniteError)

SYMMETRY_RTOL = 1e-12
JACOBI_MAX_SWEEPS = 100


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=float, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class SymMatrix:
    """Dense symmetric n x n matrix in full storage.

    Asymmetry beyond a relative tolerance of 1e-12 is rejected; anything
    smaller is averaged away so that entries(i, j) == entries(j, i) exactly.
    """
    entries: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise DimensionMismatchError(f"Expected a non-empty square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("Matrix contains non-finite entries")
        scale = float(np.max(np.abs(a)))
        asymmetry = float(np.max(np.abs(a - a.T)))
        if asymmetry > SYMMETRY_RTOL * scale:
            raise AsymmetricMatrixError(
                f"Matrix is not symmetric: max |a_ij - a_ji| = {asymmetry:.3e} (scale {scale:.3e})")
        object.__setattr__(self, 'entries', _frozen(0.5 * (a + a.T)))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def identity(cls, n: int) -> "SymMatrix":
        return cls(np.eye(n))

    @classmethod
    def diag(cls, values: Sequence[float]) -> "SymMatrix":
        return cls(np.diag(np.asarray(values, dtype=float)))

    def frobenius_norm(self) -> float:
        return float(np.linalg.norm(self.entries, 'fro'))

    def to_array(self) -> np.ndarray:
        return np.array(self.entries)


@dataclass(frozen=True, eq=False)
class CholeskyFactor:
    n: int
    lower: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return self.lower @ self.lower.T


def _as_vector(v, n: int) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.shape[0] != n:
        raise DimensionMismatchError(f"Expected a vector of length {n}, got shape {v.shape}")
    return v


def matvec(m: SymMatrix, v) -> np.ndarray:
    return m.entries @ _as_vector(v, m.n)


def quadratic_form(m: SymMatrix, v) -> float:
    v = _as_vector(v, m.n)
    return float(v @ (m.entries @ v))


def pivot_tolerance(m: SymMatrix) -> float:
    return m.n * np.finfo(float).eps * max(float(np.max(np.diag(m.entries))), 0.0)


def cholesky_factor(m: SymMatrix) -> CholeskyFactor:
    """Factor m = L L^T.

    Raises NotPositiveDefiniteError when any pivot L_jj^2 is at or below
    n * eps * max(diag(m)).
    """
    tol = pivot_tolerance(m)
    try:
        lower = np.linalg.cholesky(m.entries)
    except np.linalg.LinAlgError as e:
        raise NotPositiveDefiniteError(f"Matrix of order {m.n} is not positive definite: {e}") from e
    pivots = np.diag(lower) ** 2
    smallest = int(np.argmin(pivots))
    if pivots[smallest] <= tol:
        raise NotPositiveDefiniteError(
            f"Pivot {smallest} = {pivots[smallest]:.3e} is below tolerance {tol:.3e}")
    return CholeskyFactor(n=m.n, lower=_frozen(lower))


def cholesky_solve(f: CholeskyFactor, rhs) -> np.ndarray:
    rhs = _as_vector(rhs, f.n)
    return cho_solve((f.lower, True), rhs, check_finite=False)


def _rotation(app: float, aqq: float, apq: float) -> Tuple[float, float]:
    theta = (aqq - app) / (2.0 * apq)
    if abs(theta) > 1e150:
        t = 0.5 / theta
    else:
        t = np.copysign(1.0, theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
    c = 1.0 / np.sqrt(t * t + 1.0)
    return c, t * c


def _givens_apply(a: np.ndarray, c: float, s: float, i: int, j: int, side: str = 'both') -> np.ndarray:
    """Apply the plane rotation (c, s) on rows and/or columns i, j of a, in place."""
    if side in ('both', 'left'):
        a0, a1 = a[i, :].copy(), a[j, :].copy()
        a[i, :] = c * a0 - s * a1
        a[j, :] = s * a0 + c * a1
    if side in ('both', 'right'):
        a0, a1 = a[:, i].copy(), a[:, j].copy()
        a[:, i] = c * a0 - s * a1
        a[:, j] = s * a0 + c * a1
    return a


def jacobi_eigs(m: SymMatrix) -> Tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi eigendecomposition.

    Returns the eigenvalues in ascending order and the matching orthonormal
    eigenvectors as columns.
    """
    n = m.n
    a = m.to_array()
    v = np.eye(n)
    scale = m.frobenius_norm()
    if scale == 0.0 or n == 1:
        return np.diag(a).copy(), v

    tol = n * np.finfo(float).eps * scale
    for sweep in range(JACOBI_MAX_SWEEPS):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= tol:
            logger.debug(f"Jacobi converged after {sweep} sweeps (n={n}, off={off:.3e})")
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                c, s = _rotation(a[p, p], a[q, q], apq)
                _givens_apply(a, c, s, p, q)
                a[p, q] = a[q, p] = 0.0
                _givens_apply(v, c, s, p, q, side='right')
    else:
        logger.error(f"Jacobi iteration did not converge after {JACOBI_MAX_SWEEPS} sweeps (n={n})")
        raise NotConvergedError(f"Jacobi iteration did not converge after {JACOBI_MAX_SWEEPS} sweeps")

    order = np.argsort(np.diag(a), kind='stable')
    return np.diag(a)[order], v[:, order]
