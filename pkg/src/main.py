import argparse
import sys
from dataclasses import replace
from pathlib import Path
from typing import List, Optional

import numpy as np
from loguru import logger

from config import settings
from src.data.matrix_io import load_matrix, load_problem, load_vector, parse_vector
from src.data.problems import Problem, get_problem, problem_names, toeplitz_rayleigh
from src.exceptions import EvaluationFailureError, ModifiedNewtonError, NotConvergedError, ZeroVectorError
from src.linalg.sphere_eig import EigConfig, Extreme, extreme_eig, extreme_pair, start_vector
from src.models.direction import GammaParams
from src.models.modified_newton import Method, ModifiedNewton, NormRule, SolverConfig, SolveStatus
from src.utils import reporting
from src.utils.benchmark import run_suite, suite_names
from src.utils.derivative_check import check_problem

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILED = 2

START_PRESETS = ('alt', 'e1', 'ones')


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument('--eps', type=float, help='gradient-norm tolerance (default 1e-5)')
    shared.add_argument('--delta', type=float, help='lower bound on the spectrum of B_k (default 1e-8)')
    shared.add_argument('--Delta', dest='cap', type=float, help='condition-number cap for B_k (default 1e12)')
    shared.add_argument('--max-iter', type=int)
    shared.add_argument('--norm', choices=[rule.value for rule in NormRule])
    shared.add_argument('--json', action='store_true', help='write a machine-readable run report')
    shared.add_argument('--verbose', action='store_true', help='log per-iteration detail to stderr')

    parser = _ArgumentParser(prog='mnewton', description='Modified Newton method with sphere-CG eigenvalues.')
    commands = parser.add_subparsers(dest='command', required=True)

    solve = commands.add_parser('solve', parents=[shared], help='minimize a problem')
    solve.add_argument('problem', help=f"problem name ({', '.join(problem_names())}) or quadratic JSON file")
    solve.add_argument('--x0', help='start point as comma-separated values or a vector file')
    solve.add_argument('--method', choices=[method.value for method in Method])

    eig = commands.add_parser('eig', parents=[shared], help='extreme eigenvalues of a symmetric matrix')
    eig.add_argument('matrix', help="matrix file, or 'toeplitz' for the built-in 16 x 16 matrix")
    eig.add_argument('--which', choices=['max', 'min', 'both'], default='both')
    eig.add_argument('--tol', type=float)
    eig.add_argument('--x0', default='ones', help=f"start preset ({', '.join(START_PRESETS)}) or a vector file")

    bench = commands.add_parser('bench', parents=[shared], help='solve every problem of a suite')
    bench.add_argument('--suite', choices=suite_names(), default='standard')
    bench.add_argument('--csv', action='store_true', help='write the table as CSV')

    check = commands.add_parser('check', parents=[shared], help='check analytic derivatives against differences')
    check.add_argument('problem')
    return parser


def configure_logging(verbose: bool = False):
    logger.remove()
    logger.add(sys.stderr, level='DEBUG' if verbose else str(settings.LOGGING.LEVEL))


def solver_config(args: argparse.Namespace) -> SolverConfig:
    gamma_params = GammaParams.from_settings()
    if args.delta is not None:
        gamma_params = replace(gamma_params, delta=args.delta)
    if args.cap is not None:
        gamma_params = replace(gamma_params, cap=args.cap)
    return SolverConfig.from_settings(eps=args.eps, gamma_params=gamma_params, max_iter=args.max_iter,
                                      norm_rule=args.norm, method=getattr(args, 'method', None))


def resolve_problem(name: str) -> Problem:
    path = Path(name)
    if path.is_file():
        return load_problem(path)
    return get_problem(name)


def _start_point(value: Optional[str], problem: Problem) -> Optional[np.ndarray]:
    if value is None:
        return None
    path = Path(value)
    if path.is_file():
        return load_vector(path, problem.dim)
    return parse_vector(value)


def _eig_start(value: str, n: int) -> np.ndarray:
    if value in START_PRESETS:
        return start_vector(n, value)
    x = load_vector(value, n)
    norm = np.linalg.norm(x)
    if norm == 0.0:
        raise ZeroVectorError(f"{value}: start vector is zero")
    return x / norm


def _emit(report: reporting.RunReport, human: str, as_json: bool):
    print(reporting.render(report, human, as_json), end='')


def cmd_solve(args: argparse.Namespace) -> int:
    cfg = solver_config(args)
    problem = resolve_problem(args.problem)
    x0 = _start_point(args.x0, problem)
    result = ModifiedNewton(cfg).minimize(problem, x0)
    report = reporting.RunReport(command='solve', config=reporting.config_payload(cfg),
                                 result=reporting.solve_payload(result))
    _emit(report, reporting.format_solve(result), args.json)
    return EXIT_OK if result.status is SolveStatus.CONVERGED else EXIT_FAILED


def cmd_eig(args: argparse.Namespace) -> int:
    h = toeplitz_rayleigh() if args.matrix == 'toeplitz' else load_matrix(args.matrix)
    eig_cfg = EigConfig.from_settings()
    if args.tol is not None:
        eig_cfg = replace(eig_cfg, tol=args.tol)
    x0 = _eig_start(args.x0, h.n)
    if args.which == 'both':
        lo, hi = extreme_pair(h, eig_cfg, x0, x0)
        estimates = {'min': lo, 'max': hi}
    else:
        estimates = {args.which: extreme_eig(h, x0, replace(eig_cfg, which=Extreme(args.which)))}

    config = {'tol': eig_cfg.tol, 'max_iter': eig_cfg.iteration_cap(h.n), 'x0': args.x0,
              'which': args.which, 'n': h.n}
    report = reporting.RunReport(command='eig', config=config, result=reporting.eig_payload(estimates))
    _emit(report, reporting.format_eig(estimates), args.json)
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    if args.json and args.csv:
        logger.error("--json and --csv are mutually exclusive")
        return EXIT_USAGE
    cfg = solver_config(args)
    rows = run_suite(args.suite, cfg)
    config = dict(reporting.config_payload(cfg), suite=args.suite)
    report = reporting.RunReport(command='bench', config=config, result=reporting.bench_payload(rows))
    human = reporting.format_bench(rows, csv=args.csv).rstrip('\n')
    _emit(report, human, args.json)
    return EXIT_OK if all(row.converged for row in rows) else EXIT_FAILED


def cmd_check(args: argparse.Namespace) -> int:
    problem = resolve_problem(args.problem)
    reports = check_problem(problem)
    config = {'grad_tol': float(settings.CHECK.GRAD_TOL), 'hess_tol': float(settings.CHECK.HESS_TOL),
              'points': int(settings.CHECK.POINTS), 'seed': int(settings.CHECK.SEED)}
    report = reporting.RunReport(command='check', config=config,
                                 result=reporting.check_payload(problem.name, reports))
    _emit(report, reporting.format_check(problem.name, reports), args.json)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAILED


COMMANDS = {
    'solve': cmd_solve,
    'eig': cmd_eig,
    'bench': cmd_bench,
    'check': cmd_check,
}


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code is None else int(e.code)
    configure_logging(args.verbose)

    try:
        return COMMANDS[args.command](args)
    except (NotConvergedError, EvaluationFailureError) as e:
        logger.error(str(e))
        return EXIT_FAILED
    except (ModifiedNewtonError, ValueError, OSError) as e:
        logger.error(str(e))
        return EXIT_USAGE


if __name__ == '__main__':
    sys.exit(main())
