"""Test problems with analytic gradients and Hessians.

Names follow the lowercase identifiers of the CUTE collection. Only
problems whose minimizers can be verified by hand are included.
"""
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy.linalg import toeplitz

from src.exceptions import DimensionMismatchError, UnknownProblemError
from src.linalg.dense_linalg import SymMatrix, cholesky_factor, cholesky_solve

TOEPLITZ_COEFFS = (
    1.00000000, 0.91189350, 0.75982820, 0.59792770,
    0.41953610, 0.27267350, 0.13446390, 0.00821722,
    -0.09794101, -0.21197350, -0.30446960, -0.34471370,
    -0.34736840, -0.32881280, -0.29269750, -0.24512650,
)
TOEPLITZ_LAMBDA_MIN = 0.00325850037049


@dataclass(frozen=True, eq=False)
class Problem:
    name: str
    dim: int
    f: Callable[[np.ndarray], float]
    grad: Callable[[np.ndarray], np.ndarray]
    hess: Callable[[np.ndarray], SymMatrix]
    x0_default: np.ndarray
    known_min: Optional[Tuple[np.ndarray, float]] = None

    def __post_init__(self):
        x0 = np.array(self.x0_default, dtype=float)
        if x0.shape != (self.dim,):
            raise DimensionMismatchError(f"{self.name}: x0 has shape {x0.shape}, expected ({self.dim},)")
        x0.setflags(write=False)
        object.__setattr__(self, 'x0_default', x0)


def rosenbrock() -> Problem:
    def f(x):
        return 100.0 * (x[1] - x[0] ** 2) ** 2 + (1.0 - x[0]) ** 2

    def grad(x):
        return np.array([-400.0 * x[0] * (x[1] - x[0] ** 2) - 2.0 * (1.0 - x[0]),
                         200.0 * (x[1] - x[0] ** 2)])

    def hess(x):
        return SymMatrix(np.array([[1200.0 * x[0] ** 2 - 400.0 * x[1] + 2.0, -400.0 * x[0]],
                                   [-400.0 * x[0], 200.0]]))

    return Problem('rosenbr', 2, f, grad, hess, np.array([-1.9, 2.0]), (np.array([1.0, 1.0]), 0.0))


def beale() -> Problem:
    coeffs = np.array([1.5, 2.25, 2.625])
    powers = np.arange(1, 4)

    def residuals(x):
        return coeffs - x[0] * (1.0 - x[1] ** powers)

    def f(x):
        return float(np.sum(residuals(x) ** 2))

    def grad(x):
        r = residuals(x)
        dr_dx1 = -(1.0 - x[1] ** powers)
        dr_dx2 = x[0] * powers * x[1] ** (powers - 1)
        return 2.0 * np.array([r @ dr_dx1, r @ dr_dx2])

    def hess(x):
        r = residuals(x)
        dr_dx1 = -(1.0 - x[1] ** powers)
        dr_dx2 = x[0] * powers * x[1] ** (powers - 1)
        d2r_dx1dx2 = powers * x[1] ** (powers - 1)
        d2r_dx2dx2 = x[0] * powers * (powers - 1) * x[1] ** np.maximum(powers - 2, 0)
        h11 = 2.0 * dr_dx1 @ dr_dx1
        h12 = 2.0 * (dr_dx1 @ dr_dx2 + r @ d2r_dx1dx2)
        h22 = 2.0 * (dr_dx2 @ dr_dx2 + r @ d2r_dx2dx2)
        return SymMatrix(np.array([[h11, h12], [h12, h22]]))

    return Problem('beale', 2, f, grad, hess, np.array([1.0, 1.0]), (np.array([3.0, 0.5]), 0.0))


def cube() -> Problem:
    def f(x):
        return 100.0 * (x[1] - x[0] ** 3) ** 2 + (1.0 - x[0]) ** 2

    def grad(x):
        u = x[1] - x[0] ** 3
        return np.array([-600.0 * x[0] ** 2 * u - 2.0 * (1.0 - x[0]), 200.0 * u])

    def hess(x):
        u = x[1] - x[0] ** 3
        h11 = 1800.0 * x[0] ** 4 - 1200.0 * x[0] * u + 2.0
        h12 = -600.0 * x[0] ** 2
        return SymMatrix(np.array([[h11, h12], [h12, 200.0]]))

    return Problem('cube', 2, f, grad, hess, np.array([-1.2, 1.0]), (np.array([1.0, 1.0]), 0.0))


def sisser() -> Problem:
    def f(x):
        return 3.0 * x[0] ** 4 - 2.0 * (x[0] * x[1]) ** 2 + 3.0 * x[1] ** 4

    def grad(x):
        return np.array([12.0 * x[0] ** 3 - 4.0 * x[0] * x[1] ** 2,
                         12.0 * x[1] ** 3 - 4.0 * x[0] ** 2 * x[1]])

    def hess(x):
        h12 = -8.0 * x[0] * x[1]
        return SymMatrix(np.array([[36.0 * x[0] ** 2 - 4.0 * x[1] ** 2, h12],
                                   [h12, 36.0 * x[1] ** 2 - 4.0 * x[0] ** 2]]))

    return Problem('sisser', 2, f, grad, hess, np.array([1.0, 0.1]), (np.array([0.0, 0.0]), 0.0))


def himmelbh() -> Problem:
    def f(x):
        return -3.0 * x[0] - 2.0 * x[1] + 2.0 + x[0] ** 3 + x[1] ** 2

    def grad(x):
        return np.array([3.0 * x[0] ** 2 - 3.0, 2.0 * x[1] - 2.0])

    def hess(x):
        return SymMatrix.diag([6.0 * x[0], 2.0])

    return Problem('himmelbh', 2, f, grad, hess, np.array([0.0, 2.0]), (np.array([1.0, 1.0]), -1.0))


def denschna() -> Problem:
    def f(x):
        return x[0] ** 4 + (x[0] + x[1]) ** 2 + (np.exp(x[1]) - 1.0) ** 2

    def grad(x):
        e = np.exp(x[1])
        s = x[0] + x[1]
        return np.array([4.0 * x[0] ** 3 + 2.0 * s, 2.0 * s + 2.0 * (e - 1.0) * e])

    def hess(x):
        e = np.exp(x[1])
        return SymMatrix(np.array([[12.0 * x[0] ** 2 + 2.0, 2.0],
                                   [2.0, 2.0 + 4.0 * e * e - 2.0 * e]]))

    return Problem('denschna', 2, f, grad, hess, np.array([1.0, 1.0]), (np.array([0.0, 0.0]), 0.0))


def denschnb() -> Problem:
    def f(x):
        u = x[0] - 2.0
        return u ** 2 + (u * x[1]) ** 2 + (x[1] + 1.0) ** 2

    def grad(x):
        u = x[0] - 2.0
        return np.array([2.0 * u * (1.0 + x[1] ** 2), 2.0 * u ** 2 * x[1] + 2.0 * (x[1] + 1.0)])

    def hess(x):
        u = x[0] - 2.0
        h12 = 4.0 * u * x[1]
        return SymMatrix(np.array([[2.0 * (1.0 + x[1] ** 2), h12],
                                   [h12, 2.0 * u ** 2 + 2.0]]))

    return Problem('denschnb', 2, f, grad, hess, np.array([1.0, 1.0]), (np.array([2.0, -1.0]), 0.0))


def denschnf() -> Problem:
    def parts(x):
        s, t = x[0] + x[1], x[0] - x[1]
        return 2.0 * s ** 2 + t ** 2 - 8.0, 5.0 * x[0] ** 2 + (x[1] - 3.0) ** 2 - 9.0

    def f(x):
        p, q = parts(x)
        return p ** 2 + q ** 2

    def jacobian(x):
        s, t = x[0] + x[1], x[0] - x[1]
        return np.array([[4.0 * s + 2.0 * t, 4.0 * s - 2.0 * t],
                         [10.0 * x[0], 2.0 * (x[1] - 3.0)]])

    def grad(x):
        return 2.0 * jacobian(x).T @ np.array(parts(x))

    def hess(x):
        p, q = parts(x)
        j = jacobian(x)
        second_p = np.array([[6.0, 2.0], [2.0, 6.0]])
        second_q = np.array([[10.0, 0.0], [0.0, 2.0]])
        return SymMatrix(2.0 * (j.T @ j + p * second_p + q * second_q))

    return Problem('denschnf', 2, f, grad, hess, np.array([2.0, 0.0]), (np.array([1.0, 1.0]), 0.0))


def vardim(n: int = 10) -> Problem:
    weights = np.arange(1, n + 1, dtype=float)

    def f(x):
        u = x - 1.0
        s = weights @ u
        return float(u @ u + s ** 2 + s ** 4)

    def grad(x):
        u = x - 1.0
        s = weights @ u
        return 2.0 * u + (2.0 * s + 4.0 * s ** 3) * weights

    def hess(x):
        s = weights @ (x - 1.0)
        return SymMatrix(2.0 * np.eye(n) + (2.0 + 12.0 * s ** 2) * np.outer(weights, weights))

    return Problem('vardim', n, f, grad, hess, 1.0 - weights / n, (np.ones(n), 0.0))


def quadratic(a, b, x0=None, name: str = 'quadratic') -> Problem:
    """f(x) = x^T a x / 2 - b^T x for positive definite a."""
    a = a if isinstance(a, SymMatrix) else SymMatrix(np.asarray(a, dtype=float))
    b = np.array(b, dtype=float)
    if b.shape != (a.n,):
        raise DimensionMismatchError(f"b has shape {b.shape}, expected ({a.n},)")
    factor = cholesky_factor(a)
    x_star = cholesky_solve(factor, b)
    A = a.entries

    def f(x):
        return float(0.5 * x @ (A @ x) - b @ x)

    def grad(x):
        return A @ x - b

    def hess(x):
        return a

    start = np.zeros(a.n) if x0 is None else np.asarray(x0, dtype=float)
    return Problem(name, a.n, f, grad, hess, start, (x_star, f(x_star)))


def default_quadratic() -> Problem:
    return quadratic(SymMatrix.diag([1.0, 2.0]), [1.0, 2.0], x0=[5.0, 5.0])


def toeplitz_rayleigh() -> SymMatrix:
    return SymMatrix(toeplitz(np.array(TOEPLITZ_COEFFS)))


_REGISTRY: Dict[str, Callable[[], Problem]] = {
    'beale': beale,
    'cube': cube,
    'denschna': denschna,
    'denschnb': denschnb,
    'denschnf': denschnf,
    'himmelbh': himmelbh,
    'quadratic': default_quadratic,
    'rosenbr': rosenbrock,
    'sisser': sisser,
    'vardim': vardim,
}

STANDARD_SET = ('beale', 'cube', 'denschna', 'denschnb', 'denschnf', 'himmelbh', 'rosenbr', 'sisser', 'vardim')


def problem_names() -> List[str]:
    return sorted(_REGISTRY)


def get_problem(name: str) -> Problem:
    try:
        return _REGISTRY[name]()
    except KeyError:
        raise UnknownProblemError(
            f"Unknown problem '{name}' (known: {', '.join(problem_names())})") from None


def standard_set() -> List[Problem]:
    return [get_problem(name) for name in STANDARD_SET]
