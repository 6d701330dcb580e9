from dataclasses import asdict, dataclass
from typing import Callable, Dict, List, Optional

import pandas as pd
from loguru import logger

from src.data.problems import Problem, standard_set
from src.models.modified_newton import ModifiedNewton, SolverConfig, SolveStatus

BENCH_COLUMNS = ['name', 'dim', 'iter', 'obj', 'grad_norm', 'status']

SUITES: Dict[str, Callable[[], List[Problem]]] = {
    'standard': standard_set,
}


@dataclass(frozen=True)
class BenchRow:
    name: str
    dim: int
    iter: int
    obj: float
    grad_norm: float
    status: str

    @property
    def converged(self) -> bool:
        return self.status == SolveStatus.CONVERGED.value


def suite_names() -> List[str]:
    return sorted(SUITES)


def run_suite(suite: str = 'standard', cfg: Optional[SolverConfig] = None) -> List[BenchRow]:
    """
    Solve every problem of a suite from its default start.

    Args:
        suite (str): Name of a registered suite.
        cfg (SolverConfig): Solver configuration shared by every run.

    Returns:
        List[BenchRow]: One row per problem, sorted by problem name.
    """
    if suite not in SUITES:
        raise ValueError(f"Unknown suite '{suite}' (known: {', '.join(suite_names())})")
    solver = ModifiedNewton(cfg)
    logger.info(f"Running suite '{suite}'")

    rows = []
    for problem in SUITES[suite]():
        report = solver.minimize(problem)
        row = BenchRow(name=problem.name, dim=problem.dim, iter=report.iterations, obj=float(report.f_final),
                       grad_norm=float(report.grad_norm_final), status=report.status.value)
        logger.info(f"{row.name}: iter={row.iter} obj={row.obj:.3e} grad={row.grad_norm:.3e} {row.status}")
        rows.append(row)
    return sorted(rows, key=lambda r: r.name)


def bench_frame(rows: List[BenchRow]) -> pd.DataFrame:
    return pd.DataFrame([asdict(row) for row in rows], columns=BENCH_COLUMNS)
