from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from loguru import logger

from config import settings
from src.data.problems import Problem
from src.exceptions import DimensionMismatchError, EvaluationFailureError, NotPositiveDefiniteError
from src.linalg.dense_linalg import SymMatrix, jacobi_eigs
from src.linalg.sphere_eig import EigConfig, EigEstimate, EigMethod, extreme_pair, start_vector
from src.models.direction import DirectionInfo, GammaCase, GammaParams, compute_direction, steepest_direction
from src.models.linesearch import LineSearchStatus, WolfeParams, wolfe_search

DESCENT_TOL = 1e-12
STALL_RTOL = 1e-16


class NormRule(str, Enum):
    EUCLID = 'euclid'
    INF = 'inf'

    def norm(self, g: np.ndarray) -> float:
        return float(np.linalg.norm(g, np.inf if self is NormRule.INF else 2))


class Method(str, Enum):
    MODIFIED_NEWTON = 'modified_newton'
    STEEPEST = 'steepest'


class SolveStatus(str, Enum):
    CONVERGED = 'converged'
    MAX_ITERATIONS = 'max_iterations'
    LINE_SEARCH_STALLED = 'line_search_stalled'
    EVALUATION_FAILED = 'evaluation_failed'


@dataclass(frozen=True)
class SolverConfig:
    eps: float = 1e-5
    gamma_params: GammaParams = field(default_factory=GammaParams)
    wolfe: WolfeParams = field(default_factory=WolfeParams)
    eig: EigConfig = field(default_factory=EigConfig)
    max_iter: int = 100000
    norm_rule: NormRule = NormRule.EUCLID
    method: Method = Method.MODIFIED_NEWTON
    stall_limit: int = 2

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError(f"eps must be positive, got {self.eps}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be at least 1, got {self.max_iter}")
        if self.stall_limit < 1:
            raise ValueError(f"stall_limit must be at least 1, got {self.stall_limit}")
        object.__setattr__(self, 'norm_rule', NormRule(self.norm_rule))
        object.__setattr__(self, 'method', Method(self.method))

    @classmethod
    def from_settings(cls, **overrides) -> "SolverConfig":
        values = dict(eps=float(settings.SOLVER.EPS), gamma_params=GammaParams.from_settings(),
                      wolfe=WolfeParams.from_settings(), eig=EigConfig.from_settings(),
                      max_iter=int(settings.SOLVER.MAX_ITER), norm_rule=NormRule(settings.SOLVER.NORM_RULE),
                      stall_limit=int(settings.SOLVER.STALL_LIMIT))
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)


@dataclass(frozen=True)
class IterRecord:
    k: int
    f: float
    grad_norm: float
    gamma: float
    alpha: float
    cos_theta: float
    eig_lo: float
    eig_hi: float
    fallback_used: bool
    slope: float = np.nan
    f_new: float = np.nan
    slope_new: float = np.nan
    gamma_case: GammaCase = GammaCase.ZERO
    rung: int = 1
    eig_method: str = EigMethod.SPHERE_CG.value
    ls_evals: int = 0
    ls_status: LineSearchStatus = LineSearchStatus.WOLFE_SATISFIED
    accepted: bool = True


@dataclass(frozen=True, eq=False)
class SolveReport:
    status: SolveStatus
    x_final: np.ndarray
    f_final: float
    grad_norm_final: float
    iterations: int
    trace: Tuple[IterRecord, ...]
    problem: str = ''
    norm_rule: NormRule = NormRule.EUCLID
    f_evals: int = 0


def _is_descent(g: np.ndarray, d: np.ndarray) -> bool:
    return bool(g @ d < -DESCENT_TOL * np.linalg.norm(g) * np.linalg.norm(d))


def safeguard_direction(g, h: SymMatrix, p: GammaParams,
                        sphere_eigs: Tuple[EigEstimate, EigEstimate]) -> DirectionInfo:
    """Direction from the supplied eigenvalue estimates, with a dense fallback.

    Rung 1 uses the estimates as given. If the result is not a descent
    direction, or B_k fails to factor, the estimates are taken to include an
    interior eigenvalue and rung 2 recomputes the extremes by Jacobi. Rung 3
    returns steepest descent and should not be reachable with exact
    eigenvalues.
    """
    g = np.asarray(g, dtype=float)
    lo, hi = sphere_eigs
    try:
        info = compute_direction(g, h, p, (lo.value, hi.value))
        if _is_descent(g, info.d):
            return info
        logger.warning(f"Direction from eigenvalues [{lo.value:.6e}, {hi.value:.6e}] is not a descent "
                       f"direction, recomputing extremes with Jacobi")
    except NotPositiveDefiniteError as e:
        logger.warning(f"{e}; recomputing extremes with Jacobi")

    values, _ = jacobi_eigs(h)
    eigs = (float(values[0]), float(values[-1]))
    try:
        info = compute_direction(g, h, p, eigs)
        if _is_descent(g, info.d):
            return DirectionInfo(gamma=info.gamma, d=info.d, cos_theta=info.cos_theta, eig_lo=info.eig_lo,
                                 eig_hi=info.eig_hi, gamma_case=info.gamma_case, rung=2)
    except NotPositiveDefiniteError as e:
        logger.error(f"B_k built from Jacobi eigenvalues failed to factor: {e}")
    logger.error("Falling back to steepest descent")
    return steepest_direction(g, eigs, rung=3)


class ModifiedNewton:
    """Newton iteration on B_k = gamma_k I + (1 - gamma_k) H(x_k) with a Wolfe line search."""

    def __init__(self, config: Optional[SolverConfig] = None):
        self.config = config or SolverConfig()
        self._starts: Tuple[Optional[np.ndarray], Optional[np.ndarray]] = (None, None)

    def _evaluate(self, problem: Problem, x: np.ndarray) -> Tuple[float, np.ndarray]:
        f = float(problem.f(x))
        g = np.asarray(problem.grad(x), dtype=float)
        if not np.isfinite(f) or not np.all(np.isfinite(g)):
            raise EvaluationFailureError(f"{problem.name}: objective or gradient is not finite at x={x}")
        return f, g

    def _hessian(self, problem: Problem, x: np.ndarray) -> SymMatrix:
        try:
            return problem.hess(x)
        except ValueError as e:
            raise EvaluationFailureError(f"{problem.name}: Hessian evaluation failed at x={x}: {e}") from e

    def _direction(self, g: np.ndarray, h: Optional[SymMatrix]) -> Tuple[DirectionInfo, str]:
        if self.config.method is Method.STEEPEST:
            return steepest_direction(g), ''
        start_lo, start_hi = self._starts
        if start_lo is None:
            start_lo = start_hi = start_vector(h.n, 'ones')
        lo, hi = extreme_pair(h, self.config.eig, start_lo, start_hi)
        self._starts = (lo.vector, hi.vector)
        method = EigMethod.JACOBI_FALLBACK if EigMethod.JACOBI_FALLBACK in (lo.method, hi.method) \
            else EigMethod.SPHERE_CG
        return safeguard_direction(g, h, self.config.gamma_params, (lo, hi)), method.value

    def minimize(self, problem: Problem, x0=None) -> SolveReport:
        cfg = self.config
        x = np.array(problem.x0_default if x0 is None else x0, dtype=float)
        if x.shape != (problem.dim,):
            raise DimensionMismatchError(f"{problem.name}: x0 has shape {x.shape}, expected ({problem.dim},)")
        self._starts = (None, None)
        logger.info(f"Minimizing {problem.name} (n={problem.dim}) with {cfg.method.value}, eps={cfg.eps:g}, "
                    f"norm={cfg.norm_rule.value}")

        f, g = self._evaluate(problem, x)
        f_evals = 1
        trace: List[IterRecord] = []
        stalls = 0
        k = 0
        while True:
            grad_norm = cfg.norm_rule.norm(g)
            if grad_norm < cfg.eps:
                status = SolveStatus.CONVERGED
                break
            if k >= cfg.max_iter:
                status = SolveStatus.MAX_ITERATIONS
                break

            try:
                h = None if cfg.method is Method.STEEPEST else self._hessian(problem, x)
            except EvaluationFailureError as e:
                if k == 0:
                    raise
                logger.error(f"{e}; stopping at the last finite iterate")
                status = SolveStatus.EVALUATION_FAILED
                break
            info, eig_method = self._direction(g, h)
            d = info.d
            slope = float(g @ d)

            def phi(alpha: float) -> float:
                return float(problem.f(x + alpha * d))

            def dphi(alpha: float) -> float:
                return float(np.asarray(problem.grad(x + alpha * d)) @ d)

            ls = wolfe_search(phi, dphi, cfg.wolfe, phi0=f, dphi0=slope)
            f_evals += ls.evals
            accepted = bool(np.isfinite(ls.f_new) and ls.f_new < f)
            failure = None
            if accepted:
                try:
                    f_next, g_next = self._evaluate(problem, x + ls.alpha * d)
                    f_evals += 1
                except EvaluationFailureError as e:
                    accepted, failure = False, e
            record = IterRecord(k=k, f=f, grad_norm=grad_norm, gamma=info.gamma, alpha=ls.alpha,
                                cos_theta=info.cos_theta, eig_lo=info.eig_lo, eig_hi=info.eig_hi,
                                fallback_used=info.fallback_used, slope=slope, f_new=ls.f_new,
                                slope_new=ls.dphi_new, gamma_case=info.gamma_case, rung=info.rung,
                                eig_method=eig_method, ls_evals=ls.evals, ls_status=ls.status, accepted=accepted)
            trace.append(record)
            logger.debug(f"k={k} f={f:.10e} |g|={grad_norm:.3e} gamma={info.gamma:.3e} ({info.gamma_case.value}) "
                         f"alpha={ls.alpha:.3e} cos={info.cos_theta:.3e}")
            k += 1
            if failure is not None:
                logger.error(f"{failure}; stopping at the last finite iterate")
                status = SolveStatus.EVALUATION_FAILED
                break

            if ls.status is LineSearchStatus.MAX_TRIALS_BEST_DECREASE:
                decrease = f - ls.f_new if accepted else 0.0
                stalls = stalls + 1 if decrease < STALL_RTOL * (1.0 + abs(f)) else 0
            else:
                stalls = 0
            if accepted:
                x = x + ls.alpha * d
                f, g = f_next, g_next
            if stalls >= cfg.stall_limit:
                logger.warning(f"{problem.name}: line search stalled {stalls} times in a row at k={k}")
                status = SolveStatus.LINE_SEARCH_STALLED
                grad_norm = cfg.norm_rule.norm(g)
                break

        logger.info(f"{problem.name}: {status.value} after {k} iterations, f={f:.6e}, |g|={grad_norm:.3e}")
        return SolveReport(status=status, x_final=x, f_final=f, grad_norm_final=grad_norm, iterations=k,
                           trace=tuple(trace), problem=problem.name, norm_rule=cfg.norm_rule, f_evals=f_evals)


def minimize(problem: Problem, x0=None, cfg: Optional[SolverConfig] = None) -> SolveReport:
    return ModifiedNewton(cfg).minimize(problem, x0)
