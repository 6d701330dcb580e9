"""Run reports and human-readable tables for the command-line front end.

A RunReport is a JSON document with sorted keys and a two-space indent.
Only plain JSON values are stored in it, so parsing a report and writing it
again reproduces the original text byte for byte. Non-finite numbers are
written as null.
"""
import json
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional

import numpy as np
import pandas as pd

from config import settings
from src.linalg.sphere_eig import EigEstimate
from src.models.modified_newton import IterRecord, SolveReport, SolverConfig
from src.utils.benchmark import BENCH_COLUMNS, BenchRow, bench_frame
from src.utils.derivative_check import DerivativeReport

TRACE_COLUMNS = ['k', 'f', 'grad_norm', 'gamma', 'alpha', 'cos_theta', 'eig_lo', 'eig_hi', 'fallback_used']


def schema_version() -> int:
    return int(settings.REPORT.SCHEMA_VERSION)


def _finite(obj):
    """Copy of a payload with non-finite floats replaced by None."""
    if isinstance(obj, dict):
        return {key: _finite(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(value) for value in obj]
    if isinstance(obj, (float, np.floating)) and not np.isfinite(obj):
        return None
    return obj


@dataclass(frozen=True)
class RunReport:
    command: str
    config: Dict[str, Any]
    result: Any
    schema_version: int = field(default_factory=schema_version)

    def to_dict(self) -> Dict[str, Any]:
        return {'schema_version': self.schema_version, 'command': self.command,
                'config': self.config, 'result': self.result}

    def to_json(self) -> str:
        return json.dumps(_finite(self.to_dict()), sort_keys=True, indent=2, allow_nan=False) + '\n'

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        data = json.loads(text)
        missing = {'schema_version', 'command', 'config', 'result'} - set(data)
        if missing:
            raise ValueError(f"Report is missing keys: {', '.join(sorted(missing))}")
        return cls(command=data['command'], config=data['config'], result=data['result'],
                   schema_version=int(data['schema_version']))


def _value(v):
    return v.value if hasattr(v, 'value') else v


def _floats(v) -> List[float]:
    return [float(x) for x in np.asarray(v, dtype=float)]


def config_payload(cfg: SolverConfig) -> Dict[str, Any]:
    return {
        'eps': cfg.eps,
        'delta': cfg.gamma_params.delta,
        'Delta': cfg.gamma_params.cap,
        'max_iter': cfg.max_iter,
        'norm': cfg.norm_rule.value,
        'method': cfg.method.value,
        'sigma1': cfg.wolfe.sigma1,
        'sigma2': cfg.wolfe.sigma2,
        'alpha0': cfg.wolfe.alpha0,
        'max_trials': cfg.wolfe.max_trials,
        'eig_tol': cfg.eig.tol,
    }


def record_payload(record: IterRecord) -> Dict[str, Any]:
    return {name: (float(v) if isinstance(v, (float, np.floating)) else _value(v))
            for name, v in vars(record).items()}


def solve_payload(report: SolveReport) -> Dict[str, Any]:
    return {
        'problem': report.problem,
        'status': report.status.value,
        'iterations': report.iterations,
        'f_final': float(report.f_final),
        'grad_norm_final': float(report.grad_norm_final),
        'norm_rule': report.norm_rule.value,
        'f_evals': report.f_evals,
        'x_final': _floats(report.x_final),
        'trace': [record_payload(r) for r in report.trace],
    }


def eig_payload(estimates: Mapping[str, EigEstimate]) -> Dict[str, Any]:
    return {which: {'value': float(e.value), 'iterations': e.iterations, 'converged': e.converged,
                    'method': e.method.value, 'residual': float(e.residual), 'vector': _floats(e.vector)}
            for which, e in estimates.items()}


def bench_payload(rows: List[BenchRow]) -> List[Dict[str, Any]]:
    return [{column: getattr(row, column) for column in BENCH_COLUMNS} for row in rows]


def check_payload(problem: str, reports: List[DerivativeReport]) -> Dict[str, Any]:
    return {'problem': problem, 'passed': all(r.passed for r in reports),
            'points': [{'grad_error': r.grad_error, 'hess_error': r.hess_error, 'passed': r.passed}
                       for r in reports]}


def trace_frame(report: SolveReport) -> pd.DataFrame:
    return pd.DataFrame([{c: getattr(r, c) for c in TRACE_COLUMNS} for r in report.trace], columns=TRACE_COLUMNS)


def format_solve(report: SolveReport) -> str:
    lines = []
    if report.trace:
        lines.append(trace_frame(report).to_string(index=False, float_format=lambda v: f"{v:.6e}"))
    lines.append(f"problem: {report.problem}")
    lines.append(f"status: {report.status.value}")
    lines.append(f"iterations: {report.iterations}")
    lines.append(f"f: {report.f_final:.10e}")
    lines.append(f"grad_norm ({report.norm_rule.value}): {report.grad_norm_final:.6e}")
    lines.append(f"x: {np.array2string(np.asarray(report.x_final), precision=8)}")
    return '\n'.join(lines)


def format_eig(estimates: Mapping[str, EigEstimate]) -> str:
    frame = pd.DataFrame([{'which': which, 'value': e.value, 'iterations': e.iterations,
                           'method': e.method.value, 'residual': e.residual}
                          for which, e in estimates.items()])
    return frame.to_string(index=False, float_format=lambda v: f"{v:.10g}")


def format_bench(rows: List[BenchRow], csv: bool = False) -> str:
    frame = bench_frame(rows)
    if csv:
        return frame.to_csv(index=False)
    return frame.to_string(index=False, float_format=lambda v: f"{v:.3e}")


def format_check(problem: str, reports: List[DerivativeReport]) -> str:
    frame = pd.DataFrame([{'point': i, 'grad_error': r.grad_error, 'hess_error': r.hess_error, 'passed': r.passed}
                          for i, r in enumerate(reports)])
    verdict = 'passed' if all(r.passed for r in reports) else 'FAILED'
    return f"{frame.to_string(index=False, float_format=lambda v: f'{v:.2e}')}\n{problem}: {verdict}"


def render(report: RunReport, human: Optional[str], as_json: bool) -> str:
    return report.to_json() if as_json else (human or '') + '\n'
