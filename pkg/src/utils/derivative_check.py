from dataclasses import dataclass
from typing import Callable, List, Optional

import numpy as np
from loguru import logger

from config import settings
from src.data.problems import Problem

GRAD_TOL = 1e-6
HESS_TOL = 1e-4


@dataclass(frozen=True)
class DerivativeReport:
    grad_error: float
    hess_error: float
    grad_tol: float = GRAD_TOL
    hess_tol: float = HESS_TOL

    @property
    def passed(self) -> bool:
        return self.grad_error < self.grad_tol and self.hess_error < self.hess_tol


def _central_differences(fun: Callable[[np.ndarray], np.ndarray], x: np.ndarray, h: float) -> np.ndarray:
    """Column i holds (fun(x + h e_i) - fun(x - h e_i)) / 2h."""
    columns = []
    a = np.array(x, dtype=float)
    for i in range(len(x)):
        a[i] = x[i] + h
        forward = np.asarray(fun(a), dtype=float)
        a[i] = x[i] - h
        backward = np.asarray(fun(a), dtype=float)
        a[i] = x[i]
        if not (np.all(np.isfinite(forward)) and np.all(np.isfinite(backward))):
            raise ValueError(f"Non-finite value on the finite-difference stencil at coordinate {i}")
        columns.append((forward - backward) / (2.0 * h))
    return np.stack(columns, axis=-1)


def fd_gradient(f: Callable[[np.ndarray], float], x, h: float) -> np.ndarray:
    if not h > 0:
        raise ValueError(f"Step must be positive, got {h}")
    return _central_differences(f, np.asarray(x, dtype=float), h)


def fd_step(x) -> float:
    return 1e-6 * (1.0 + float(np.max(np.abs(x))))


def _relative_error(analytic: np.ndarray, reference: np.ndarray) -> float:
    return float(np.max(np.abs(analytic - reference)) / max(1.0, np.max(np.abs(reference))))


def check_derivatives(p: Problem, x) -> DerivativeReport:
    """Compare analytic derivatives against central differences.

    The gradient is checked against differences of f, the Hessian against
    differences of the analytic gradient.
    """
    x = np.asarray(x, dtype=float)
    h = fd_step(x)
    grad_error = _relative_error(np.asarray(p.grad(x), dtype=float), fd_gradient(p.f, x, h))
    fd_hess = _central_differences(p.grad, x, h)
    fd_hess = 0.5 * (fd_hess + fd_hess.T)
    hess_error = _relative_error(p.hess(x).entries, fd_hess)
    return DerivativeReport(grad_error=grad_error, hess_error=hess_error,
                            grad_tol=float(settings.CHECK.GRAD_TOL), hess_tol=float(settings.CHECK.HESS_TOL))


def check_points(p: Problem, points: Optional[int] = None, seed: Optional[int] = None) -> List[np.ndarray]:
    """The default start followed by seeded points within unit distance of it."""
    points = int(settings.CHECK.POINTS) if points is None else points
    seed = int(settings.CHECK.SEED) if seed is None else seed
    rng = np.random.default_rng(seed)
    offsets = rng.uniform(-1.0, 1.0, size=(points, p.dim))
    return [np.array(p.x0_default)] + [p.x0_default + offset for offset in offsets]


def check_problem(p: Problem, points: Optional[int] = None, seed: Optional[int] = None) -> List[DerivativeReport]:
    reports = []
    for x in check_points(p, points, seed):
        report = check_derivatives(p, x)
        if not report.passed:
            logger.warning(f"{p.name}: derivative check failed at x={np.array2string(x, precision=4)} "
                           f"(grad {report.grad_error:.2e}, hess {report.hess_error:.2e})")
        reports.append(report)
    return reports
