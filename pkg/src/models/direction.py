from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from config import settings
from src.exceptions import ZeroVectorError
from src.linalg.dense_linalg import SymMatrix, cholesky_factor, cholesky_solve

DEFAULT_DELTA = 1e-8
DEFAULT_CAP = 1e12


class GammaCase(str, Enum):
    ZERO = 'zero'
    A = 'a'
    B = 'b'
    MAX_AB = 'max_ab'
    STEEPEST = 'steepest'


@dataclass(frozen=True)
class GammaParams:
    """delta bounds the smallest eigenvalue of B_k from below, cap bounds its condition number."""
    delta: float = DEFAULT_DELTA
    cap: float = DEFAULT_CAP

    def __post_init__(self):
        if not 0 < self.delta < 1:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if not 1 <= self.cap < np.inf:
            raise ValueError(f"cap must be finite and at least 1, got {self.cap}")

    @classmethod
    def from_settings(cls) -> "GammaParams":
        return cls(delta=float(settings.GAMMA.DELTA), cap=float(settings.GAMMA.CAP))


@dataclass(frozen=True, eq=False)
class DirectionInfo:
    gamma: float
    d: np.ndarray
    cos_theta: float
    eig_lo: float
    eig_hi: float
    gamma_case: GammaCase
    rung: int = 1

    @property
    def fallback_used(self) -> bool:
        return self.rung >= 2


def blend_weights(eig_lo: float, eig_hi: float, p: GammaParams) -> Tuple[float, float, GammaCase]:
    """Blend pair (gamma, weight) with B = gamma I + weight H and gamma + weight = 1.

    gamma is the smallest value such that the blended spectrum has its
    minimum at least delta and its condition number at most cap. The weight
    has its own closed form and is never formed as 1 - gamma.
    """
    if eig_lo > eig_hi:
        raise ValueError(f"eig_lo ({eig_lo}) must not exceed eig_hi ({eig_hi})")
    lo_ok = eig_lo >= p.delta
    hi_ok = eig_hi <= eig_lo * p.cap

    if lo_ok and hi_ok:
        return 0.0, 1.0, GammaCase.ZERO

    a, a_weight = 0.0, 1.0
    if not lo_ok:
        assert eig_lo < 1.0
        a = (p.delta - eig_lo) / (1.0 - eig_lo)
        a_weight = (1.0 - p.delta) / (1.0 - eig_lo)
    b, b_weight = 0.0, 1.0
    if not hi_ok:
        excess = eig_hi - eig_lo * p.cap
        b = excess / (p.cap - 1.0 + excess)
        b_weight = (p.cap - 1.0) / (p.cap - 1.0 + excess)

    if not lo_ok and hi_ok:
        gamma, weight, case = a, a_weight, GammaCase.A
    elif lo_ok:
        gamma, weight, case = b, b_weight, GammaCase.B
    elif a_weight <= b_weight:
        gamma, weight, case = a, a_weight, GammaCase.MAX_AB
    else:
        gamma, weight, case = b, b_weight, GammaCase.MAX_AB
    return float(np.clip(gamma, 0.0, 1.0)), float(np.clip(weight, 0.0, 1.0)), case


def select_gamma(eig_lo: float, eig_hi: float, p: GammaParams) -> Tuple[float, GammaCase]:
    gamma, _, case = blend_weights(eig_lo, eig_hi, p)
    return gamma, case


def build_B(h: SymMatrix, gamma: float, weight: Optional[float] = None) -> SymMatrix:
    """gamma I + weight H, where weight defaults to 1 - gamma."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
    if weight is None:
        weight = 1.0 - gamma
    elif not 0.0 <= weight <= 1.0:
        raise ValueError(f"weight must lie in [0, 1], got {weight}")
    return SymMatrix(gamma * np.eye(h.n) + weight * h.entries)


def cos_theta(g, d) -> float:
    g = np.asarray(g, dtype=float)
    d = np.asarray(d, dtype=float)
    g_norm, d_norm = np.linalg.norm(g), np.linalg.norm(d)
    if g_norm == 0.0 or d_norm == 0.0:
        raise ZeroVectorError("cos(theta) is undefined for a zero gradient or direction")
    return float(np.clip(-(g @ d) / (g_norm * d_norm), -1.0, 1.0))


def compute_direction(g, h: SymMatrix, p: GammaParams, eigs: Tuple[float, float]) -> DirectionInfo:
    """Solve (gamma I + weight H) d = -g through a Cholesky factorization.

    NotPositiveDefiniteError propagates: it means the eigenvalue estimates
    did not bound the true spectrum of H.
    """
    g = np.asarray(g, dtype=float)
    if np.linalg.norm(g) == 0.0:
        raise ZeroVectorError("A search direction needs a nonzero gradient")
    eig_lo, eig_hi = eigs
    gamma, weight, case = blend_weights(eig_lo, eig_hi, p)
    factor = cholesky_factor(build_B(h, gamma, weight))
    d = -cholesky_solve(factor, g)
    return DirectionInfo(gamma=gamma, d=d, cos_theta=cos_theta(g, d), eig_lo=float(eig_lo),
                         eig_hi=float(eig_hi), gamma_case=case)


def steepest_direction(g, eigs: Tuple[float, float] = (np.nan, np.nan), rung: int = 1) -> DirectionInfo:
    g = np.asarray(g, dtype=float)
    return DirectionInfo(gamma=1.0, d=-g, cos_theta=1.0, eig_lo=float(eigs[0]), eig_hi=float(eigs[1]),
                         gamma_case=GammaCase.STEEPEST, rung=rung)
