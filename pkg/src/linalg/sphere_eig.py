"""Extreme eigenvalues of a symmetric matrix by conjugate gradient on the unit sphere.

The Rayleigh quotient rho(x) = x^T H x is maximized (or minimized) over
||x|| = 1. Each step moves along a great circle through the current iterate
in the conjugate direction q, with the rotation (c, s) chosen in closed form
so that rho(x c + q s) is extremal on that circle. Search directions are
carried to the new point by parallel transport. Every iterate is
renormalized, every new direction is projected back onto the tangent space,
and the direction is restarted from the gradient every n iterations.
"""
import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Optional, Tuple

import numpy as np
from loguru import logger

from config import settings
from src.exceptions import DegenerateStepError, DimensionMismatchError, NotConvergedError, NotUnitVectorError
from src.linalg.dense_linalg import SymMatrix, jacobi_eigs

UNIT_TOL = 1e-10
TINY = 1e-300
DEFAULT_TOL = 1e-9
DEFAULT_MAX_ITER_FACTOR = 10


class Extreme(str, Enum):
    MAX = 'max'
    MIN = 'min'


class EigMethod(str, Enum):
    SPHERE_CG = 'sphere_cg'
    JACOBI_FALLBACK = 'jacobi_fallback'


@dataclass(frozen=True)
class EigConfig:
    which: Extreme = Extreme.MAX
    tol: float = DEFAULT_TOL
    max_iter: Optional[int] = None
    max_iter_factor: int = DEFAULT_MAX_ITER_FACTOR

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.max_iter is not None and self.max_iter < 1:
            raise ValueError(f"max_iter must be at least 1, got {self.max_iter}")
        if self.max_iter_factor < 1:
            raise ValueError(f"max_iter_factor must be at least 1, got {self.max_iter_factor}")
        object.__setattr__(self, 'which', Extreme(self.which))

    def iteration_cap(self, n: int) -> int:
        return self.max_iter if self.max_iter is not None else self.max_iter_factor * n

    @classmethod
    def from_settings(cls, which: Extreme = Extreme.MAX) -> "EigConfig":
        return cls(which=which, tol=float(settings.EIG.TOL), max_iter_factor=int(settings.EIG.MAX_ITER_FACTOR))


@dataclass(frozen=True, eq=False)
class RayleighState:
    k: int
    x: np.ndarray
    rho: float
    G: np.ndarray
    Q: np.ndarray


@dataclass(frozen=True, eq=False)
class EigEstimate:
    value: float
    vector: np.ndarray
    iterations: int
    converged: bool
    method: EigMethod
    residual: float = 0.0


def _check_unit(x, n: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != n:
        raise DimensionMismatchError(f"Expected a vector of length {n}, got shape {x.shape}")
    norm = np.linalg.norm(x)
    if abs(norm - 1.0) > UNIT_TOL:
        raise NotUnitVectorError(f"Expected a unit vector, got norm {norm:.15g}")
    return x / norm


def rayleigh(h: SymMatrix, x) -> float:
    x = _check_unit(x, h.n)
    return float(x @ (h.entries @ x))


def geodesic_coeffs(a: float, b: float, which: Extreme) -> Tuple[float, float]:
    """Rotation (c, s) extremizing rho(x c + q s) over c^2 + s^2 = 1.

    With a = 2 x^T H q and b = x^T H x - q^T H q the quotient along the circle
    is rho(q) + r/2 + (r/2) cos(2t - phi) where cos(phi) = b/r, sin(phi) = a/r.
    The maximum sits at 2t = phi and the minimum at 2t = phi + pi. The
    returned pair always has c >= 0, and 2 c s = sin(2t) keeps the cross term
    c s a moving rho toward the requested extreme.
    """
    r = math.hypot(a, b)
    if r <= TINY:
        raise DegenerateStepError(f"Rayleigh quotient is constant along the geodesic (r = {r:.3e})")
    sign = 1.0 if Extreme(which) is Extreme.MAX else -1.0
    cos2t, sin2t = sign * b / r, sign * a / r

    # take the square root on the larger half-angle component
    if cos2t >= 0.0:
        c = math.sqrt(0.5 * (1.0 + cos2t))
        s = sin2t / (2.0 * c)
    else:
        s = math.sqrt(0.5 * (1.0 - cos2t))
        c = sin2t / (2.0 * s)
    if c < 0.0:
        c, s = -c, -s
    return c, s


def _tangent(v: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Component of v orthogonal to the unit vector x, projected twice."""
    v = v - (x @ v) * x
    return v - (x @ v) * x


def _transport(v: np.ndarray, x: np.ndarray, q: np.ndarray, c: float, s: float) -> np.ndarray:
    return v - (v @ q) * (x * s + q * (1.0 - c))


def transport(v, x, q, c: float, s: float) -> np.ndarray:
    """Parallel transport of tangent vector v along the geodesic leaving x in direction q."""
    n = len(q)
    x = _check_unit(x, n)
    q = _check_unit(q, n)
    if abs(x @ q) > UNIT_TOL:
        raise ValueError(f"Direction is not tangent at x: x^T q = {x @ q:.3e}")
    if abs(c * c + s * s - 1.0) > UNIT_TOL:
        raise ValueError(f"(c, s) is not on the unit circle: c^2 + s^2 = {c * c + s * s:.15g}")
    v = np.asarray(v, dtype=float)
    if v.shape != (n,):
        raise DimensionMismatchError(f"Expected a vector of length {n}, got shape {v.shape}")
    return _transport(v, x, q, c, s)


def start_vector(n: int, preset: str = 'ones') -> np.ndarray:
    """Named unit start vectors: `alt` (-1, 1, -1, ...), `e1`, and `ones` (1, ..., 1, 1 + 1e-3)."""
    if preset == 'alt':
        x = np.where(np.arange(n) % 2 == 0, -1.0, 1.0)
    elif preset == 'e1':
        x = np.zeros(n)
        x[0] = 1.0
    elif preset == 'ones':
        x = np.ones(n)
        x[-1] += 1e-3
    else:
        raise ValueError(f"Unknown start vector preset '{preset}' (expected alt, e1 or ones)")
    return x / np.linalg.norm(x)


def _is_small(G: np.ndarray, rho: float, tol: float) -> bool:
    return np.linalg.norm(G) <= tol * (1.0 + abs(rho))


def cg_extreme_eig(h: SymMatrix, x0, cfg: EigConfig,
                   callback: Optional[Callable[[RayleighState], None]] = None) -> EigEstimate:
    n = h.n
    H = h.entries
    x = _check_unit(x0, n)
    max_iter = cfg.iteration_cap(n)

    hx = H @ x
    rho = float(x @ hx)
    G = hx - rho * x
    Q = _tangent(G, x)

    def estimate(k: int, converged: bool) -> EigEstimate:
        return EigEstimate(value=rho, vector=x, iterations=k, converged=converged,
                           method=EigMethod.SPHERE_CG, residual=float(np.linalg.norm(G)))

    if _is_small(G, rho, cfg.tol):
        return estimate(0, True)

    restarted = True
    for k in range(max_iter):
        q_norm = np.linalg.norm(Q)
        if q_norm <= TINY:
            Q = _tangent(G, x)
            q_norm = np.linalg.norm(Q)
            restarted = True
        q = Q / q_norm
        hq = H @ q
        a = 2.0 * float(x @ hq)
        b = rho - float(q @ hq)
        try:
            c, s = geodesic_coeffs(a, b, cfg.which)
        except DegenerateStepError:
            if restarted:
                logger.debug(f"Sphere CG stalled on a flat geodesic at iteration {k}")
                break
            Q = _tangent(G, x)
            restarted = True
            continue

        x_new = c * x + s * q
        x_new /= np.linalg.norm(x_new)
        tau_Q = c * Q - (q_norm * s) * x
        tau_G = _transport(G, x, q, c, s)

        hx = H @ x_new
        rho_new = float(x_new @ hx)
        G_new = hx - rho_new * x_new

        denom = float(G @ Q)
        if abs(denom) <= TINY:
            Q_new = G_new.copy()
        else:
            mu = float((G_new - tau_G) @ G_new) / denom
            Q_new = G_new + mu * tau_Q
        Q_new = _tangent(Q_new, x_new)
        if k % n == n - 1:
            Q_new = _tangent(G_new, x_new)
        restarted = k % n == n - 1

        x, rho, G, Q = x_new, rho_new, G_new, Q_new
        if callback is not None:
            callback(RayleighState(k=k + 1, x=x, rho=rho, G=G, Q=Q))
        if _is_small(G, rho, cfg.tol):
            return estimate(k + 1, True)

    raise NotConvergedError(
        f"Sphere CG ({cfg.which.value}) did not converge in {max_iter} iterations, "
        f"residual {np.linalg.norm(G):.3e}", estimate=estimate(max_iter, False))


def _jacobi_pair(h: SymMatrix) -> Tuple[EigEstimate, EigEstimate]:
    values, vectors = jacobi_eigs(h)

    def pick(i: int) -> EigEstimate:
        v = vectors[:, i] / np.linalg.norm(vectors[:, i])
        residual = float(np.linalg.norm(h.entries @ v - values[i] * v))
        return EigEstimate(value=float(values[i]), vector=v, iterations=0, converged=True,
                           method=EigMethod.JACOBI_FALLBACK, residual=residual)

    return pick(0), pick(h.n - 1)


def extreme_eig(h: SymMatrix, x0, cfg: EigConfig) -> EigEstimate:
    """cg_extreme_eig for one extreme, answering from Jacobi when it does not converge."""
    try:
        return cg_extreme_eig(h, x0, cfg)
    except NotConvergedError as e:
        logger.warning(f"{e}; recomputing with Jacobi")
    lo, hi = _jacobi_pair(h)
    return hi if cfg.which is Extreme.MAX else lo


def extreme_pair(h: SymMatrix, cfg: Optional[EigConfig] = None,
                 start_lo=None, start_hi=None) -> Tuple[EigEstimate, EigEstimate]:
    """Smallest and largest eigenvalue of h, falling back to Jacobi if sphere CG fails.

    `cfg.which` is ignored. Missing start vectors default to the `ones` preset.
    """
    cfg = cfg or EigConfig()
    default = start_vector(h.n, 'ones')
    try:
        lo = cg_extreme_eig(h, default if start_lo is None else start_lo, replace(cfg, which=Extreme.MIN))
        hi = cg_extreme_eig(h, default if start_hi is None else start_hi, replace(cfg, which=Extreme.MAX))
        if lo.value <= hi.value:
            return lo, hi
        logger.warning(f"Sphere CG returned lo={lo.value:.6e} > hi={hi.value:.6e}, recomputing with Jacobi")
    except NotConvergedError as e:
        logger.warning(f"{e}; recomputing extremes with Jacobi")
    return _jacobi_pair(h)
