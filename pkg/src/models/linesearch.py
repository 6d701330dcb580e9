from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

import numpy as np
from loguru import logger

from config import settings
from src.exceptions import NotDescentError


class LineSearchStatus(str, Enum):
    WOLFE_SATISFIED = 'wolfe_satisfied'
    MAX_TRIALS_BEST_DECREASE = 'max_trials_best_decrease'


@dataclass(frozen=True)
class WolfeParams:
    sigma1: float = 1e-4
    sigma2: float = 0.9
    alpha0: float = 1.0
    max_trials: int = 60

    def __post_init__(self):
        if not 0 < self.sigma1 < self.sigma2 < 1:
            raise ValueError(f"Need 0 < sigma1 < sigma2 < 1, got sigma1={self.sigma1}, sigma2={self.sigma2}")
        if not self.alpha0 > 0:
            raise ValueError(f"alpha0 must be positive, got {self.alpha0}")
        if self.max_trials < 1:
            raise ValueError(f"max_trials must be at least 1, got {self.max_trials}")

    @classmethod
    def from_settings(cls) -> "WolfeParams":
        return cls(sigma1=float(settings.WOLFE.SIGMA1), sigma2=float(settings.WOLFE.SIGMA2),
                   alpha0=float(settings.WOLFE.ALPHA0), max_trials=int(settings.WOLFE.MAX_TRIALS))


@dataclass(frozen=True)
class LineSearchResult:
    alpha: float
    f_new: float
    evals: int
    status: LineSearchStatus
    dphi_new: float = np.nan


def satisfies_wolfe(phi0: float, dphi0: float, alpha: float, phi_alpha: float, dphi_alpha: float,
                    sigma1: float, sigma2: float) -> bool:
    """Sufficient decrease and (weak) curvature condition at step alpha."""
    sufficient = phi_alpha <= phi0 + sigma1 * alpha * dphi0
    curvature = dphi_alpha >= sigma2 * dphi0
    return bool(sufficient and curvature)


def _cubic_min(a: float, fa: float, fpa: float, b: float, fb: float, fpb: float) -> Optional[float]:
    """Minimizer of the cubic interpolating value and slope at a and b, or None."""
    with np.errstate(all='raise'):
        try:
            d1 = fpa + fpb - 3.0 * (fa - fb) / (a - b)
            radical = d1 * d1 - fpa * fpb
            if radical < 0.0:
                return None
            d2 = np.copysign(np.sqrt(radical), b - a)
            xmin = b - (b - a) * (fpb + d2 - d1) / (fpb - fpa + 2.0 * d2)
        except (ArithmeticError, FloatingPointError):
            return None
    return float(xmin) if np.isfinite(xmin) else None


def _quad_min(a: float, fa: float, fpa: float, b: float, fb: float) -> Optional[float]:
    """Minimizer of the quadratic through (a, fa) with slope fpa and through (b, fb), or None."""
    with np.errstate(all='raise'):
        try:
            db = b - a
            curvature = (fb - fa - fpa * db) / (db * db)
            if curvature <= 0.0:
                return None
            xmin = a - fpa / (2.0 * curvature)
        except (ArithmeticError, FloatingPointError):
            return None
    return float(xmin) if np.isfinite(xmin) else None


def wolfe_search(phi: Callable[[float], float], dphi: Callable[[float], float], p: WolfeParams,
                 phi0: Optional[float] = None, dphi0: Optional[float] = None) -> LineSearchResult:
    """Bracket-and-zoom search for a step satisfying the weak Wolfe conditions.

    Trials expand by doubling until a bracket [lo, hi] is found, where lo
    satisfies sufficient decrease but not curvature and hi violates
    sufficient decrease. The bracket then shrinks by safeguarded cubic
    interpolation, with quadratic interpolation and bisection as fallbacks.
    Non-finite trial values count as "too long".
    """
    evals = 0
    if phi0 is None:
        phi0 = phi(0.0)
        evals += 1
    if dphi0 is None:
        dphi0 = dphi(0.0)
        evals += 1
    if not np.isfinite(phi0):
        raise ValueError(f"phi(0) must be finite, got {phi0}")
    if not dphi0 < 0:
        raise NotDescentError(f"Direction is not a descent direction: dphi(0) = {dphi0}")

    lo, f_lo, df_lo = 0.0, phi0, dphi0
    hi, f_hi, df_hi = np.inf, np.nan, np.nan
    best_alpha, best_f, best_df = None, np.inf, np.nan
    alpha_tried = p.alpha0
    alpha = p.alpha0

    for trial in range(p.max_trials):
        f = phi(alpha)
        evals += 1
        if not np.isfinite(f):
            hi, f_hi, df_hi = alpha, np.nan, np.nan
            alpha_tried = alpha
        else:
            df = dphi(alpha)
            evals += 1
            if best_alpha is None or f < best_f:
                best_alpha, best_f, best_df = alpha, f, df
            if f > phi0 + p.sigma1 * alpha * dphi0:
                hi, f_hi, df_hi = alpha, f, df
            elif df >= p.sigma2 * dphi0:
                assert satisfies_wolfe(phi0, dphi0, alpha, f, df, p.sigma1, p.sigma2)
                return LineSearchResult(alpha=alpha, f_new=f, evals=evals,
                                        status=LineSearchStatus.WOLFE_SATISFIED, dphi_new=df)
            else:
                lo, f_lo, df_lo = alpha, f, df

        if np.isinf(hi):
            alpha = 2.0 * lo
            continue

        width = hi - lo
        if width <= np.finfo(float).eps * max(1.0, hi):
            logger.debug(f"Wolfe bracket collapsed at alpha={lo:.3e} after {trial + 1} trials")
            break
        candidate = None
        if np.isfinite(f_hi) and np.isfinite(df_hi):
            candidate = _cubic_min(lo, f_lo, df_lo, hi, f_hi, df_hi)
        if candidate is None and np.isfinite(f_hi):
            candidate = _quad_min(lo, f_lo, df_lo, hi, f_hi)
        if candidate is None or not lo < candidate < hi:
            candidate = lo + 0.5 * width
        alpha = float(np.clip(candidate, lo + 1e-3 * width, hi - 0.1 * width))

    logger.warning(f"Wolfe search found no Wolfe point in {trial + 1} trials, returning the best trial")
    if best_alpha is None:
        # every trial overflowed; report the shortest step tried
        return LineSearchResult(alpha=alpha_tried, f_new=np.inf, evals=evals,
                                status=LineSearchStatus.MAX_TRIALS_BEST_DECREASE)
    return LineSearchResult(alpha=best_alpha, f_new=best_f, evals=evals,
                            status=LineSearchStatus.MAX_TRIALS_BEST_DECREASE, dphi_new=best_df)
