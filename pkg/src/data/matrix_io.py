import json
from pathlib import Path
from typing import Optional, Union

import numpy as np

from src.data.problems import Problem, quadratic
from src.exceptions import AsymmetricMatrixError, DimensionMismatchError, MatrixFormatError
from src.linalg.dense_linalg import SymMatrix

PathLike = Union[str, Path]


def _parse_reals(tokens, where: str) -> np.ndarray:
    try:
        values = np.array([float(token) for token in tokens])
    except ValueError as e:
        raise MatrixFormatError(f"{where}: {e}") from None
    if not np.all(np.isfinite(values)):
        raise MatrixFormatError(f"{where}: non-finite value")
    return values


def parse_matrix(text: str, source: str = '<string>') -> SymMatrix:
    """Parse the matrix text format: a line holding n, then n rows of n reals."""
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise MatrixFormatError(f"{source}: empty matrix file")
    try:
        n = int(lines[0].strip())
    except ValueError:
        raise MatrixFormatError(f"{source}: first line must be the integer dimension, got '{lines[0].strip()}'") \
            from None
    if n < 1:
        raise MatrixFormatError(f"{source}: dimension must be positive, got {n}")
    rows = lines[1:]
    if len(rows) != n:
        raise MatrixFormatError(f"{source}: expected {n} rows, found {len(rows)}")

    entries = np.empty((n, n))
    for i, row in enumerate(rows):
        tokens = row.split()
        if len(tokens) != n:
            raise MatrixFormatError(f"{source}: row {i + 1} has {len(tokens)} entries, expected {n}")
        entries[i] = _parse_reals(tokens, f"{source}: row {i + 1}")
    try:
        return SymMatrix(entries)
    except AsymmetricMatrixError as e:
        raise AsymmetricMatrixError(f"{source}: {e}") from None


def load_matrix(path: PathLike) -> SymMatrix:
    path = Path(path)
    return parse_matrix(path.read_text(), str(path))


def format_matrix(m: SymMatrix) -> str:
    rows = [' '.join(repr(float(v)) for v in row) for row in m.entries]
    return '\n'.join([str(m.n)] + rows) + '\n'


def write_matrix(m: SymMatrix, path: PathLike) -> Path:
    path = Path(path)
    path.write_text(format_matrix(m))
    return path


def load_vector(path: PathLike, n: Optional[int] = None) -> np.ndarray:
    """Whitespace-separated reals, on one line or many."""
    path = Path(path)
    values = _parse_reals(path.read_text().split(), str(path))
    if values.size == 0:
        raise MatrixFormatError(f"{path}: empty vector file")
    if n is not None and values.size != n:
        raise DimensionMismatchError(f"{path}: vector has {values.size} entries, expected {n}")
    return values


def parse_vector(text: str) -> np.ndarray:
    """Comma-separated reals such as '1,1' or '-1.9, 2'."""
    return _parse_reals([token for token in text.split(',') if token.strip()], f"vector '{text}'")


def load_problem(path: PathLike) -> Problem:
    """Quadratic problem file: JSON object with `a`, `b` and optional `name`, `x0`."""
    path = Path(path)
    try:
        payload = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise MatrixFormatError(f"{path}: invalid JSON ({e})") from None
    if not isinstance(payload, dict) or 'a' not in payload or 'b' not in payload:
        raise MatrixFormatError(f"{path}: expected an object with keys 'a' and 'b'")
    try:
        a = np.array(payload['a'], dtype=float)
        b = np.array(payload['b'], dtype=float)
        x0 = None if payload.get('x0') is None else np.array(payload['x0'], dtype=float)
    except (TypeError, ValueError) as e:
        raise MatrixFormatError(f"{path}: {e}") from None
    return quadratic(a, b, x0=x0, name=str(payload.get('name', path.stem)))
