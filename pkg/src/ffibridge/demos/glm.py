"""Generalized least squares through LAPACK's dggglm.

Solves: minimize the Euclidean norm of y subject to d = A x + B y, the
computation behind the best linear unbiased estimator of a linear model
whose noise covariance factors as B B^T.  Matrices are lists of rows;
LAPACK wants column-major doubles, so inputs go through to_column_major
first.  The solver overwrites its inputs, which is why every call
marshals fresh copies.
"""

from __future__ import annotations

import math
import threading
from typing import Sequence

from .. import calling, ftypes
from ..errors import (
    DimensionMismatch,
    EnvironmentMissing,
    FfiError,
    SolverFailure,
)
from ..loader import default_namespace, open_library
from ..memory import MemoryArena

_DOUBLE = ftypes.float64.size

_state_lock = threading.Lock()
_solver = None
_solver_error: str | None = None

# trailing-underscore Fortran naming first; some providers also export the
# plain name
_SYMBOLS = ("dggglm_", "dggglm")
_PROVIDERS = ("lapack", "openblas")


def _solver_function():
    """13-pointer-argument solver entry point, resolved once: first from
    the process itself, then from known provider libraries."""
    global _solver, _solver_error
    with _state_lock:
        if _solver is not None:
            return _solver
        if _solver_error is not None:
            raise EnvironmentMissing(_solver_error)
        tried = []
        handles = [default_namespace()]
        for provider in _PROVIDERS:
            try:
                handles.append(open_library(provider))
            except FfiError as exc:
                tried.append(str(exc))
        for lib in handles:
            for symbol in _SYMBOLS:
                try:
                    fn = calling.foreign_function(
                        symbol, ftypes.void, [ftypes.address] * 13, lib=lib)
                except FfiError as exc:
                    tried.append(str(exc))
                    continue
                _solver = fn
                return _solver
        _solver_error = "no LAPACK provider found: " + "; ".join(tried)
        raise EnvironmentMissing(_solver_error)


def lapack_available() -> bool:
    try:
        _solver_function()
        return True
    except EnvironmentMissing:
        return False


def _shape(M: Sequence[Sequence[float]], what: str) -> tuple[int, int]:
    rows = len(M)
    if rows == 0:
        raise DimensionMismatch(f"{what} has no rows")
    cols = len(M[0])
    if cols == 0:
        raise DimensionMismatch(f"{what} has no columns")
    if any(len(row) != cols for row in M):
        raise DimensionMismatch(f"{what} is ragged")
    return rows, cols


def to_column_major(M: Sequence[Sequence[float]]) -> list[float]:
    """Flatten a row-major matrix into the column-major double list LAPACK
    expects: entry (i, j) lands at flat index j*rows + i."""
    rows, cols = _shape(M, "matrix")
    out = []
    for j in range(cols):
        for i in range(rows):
            value = M[i][j]
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise DimensionMismatch(
                    f"matrix entry ({i}, {j}) is not a number: {value!r}")
            out.append(float(value))
    return out


def general_linear_model(A: Sequence[Sequence[float]],
                         B: Sequence[Sequence[float]],
                         d: Sequence[float]) -> tuple[list[float], list[float]]:
    """Return (x, y) with d = A x + B y and the norm of y minimal.

    A is n-by-m (n >= m), B is n-by-p, d has length n.  Raises
    SolverFailure when the foreign routine reports a nonzero status and
    EnvironmentMissing when no LAPACK provider can be found.
    """
    n, m = _shape(A, "first matrix")
    nb, p = _shape(B, "second matrix")
    if n != nb:
        raise DimensionMismatch(
            "expected first two arguments to have the same number of rows")
    if len(d) != n:
        raise DimensionMismatch(f"response vector must have length {n}, got {len(d)}")
    if n < m:
        raise DimensionMismatch(
            f"underdetermined system: {n} rows for {m} parameters")
    solver = _solver_function()
    lwork = n + m + p
    with MemoryArena() as arena:
        n_cell = arena.box(n, ftypes.int32)
        m_cell = arena.box(m, ftypes.int32)
        p_cell = arena.box(p, ftypes.int32)
        lda_cell = arena.box(n, ftypes.int32)
        ldb_cell = arena.box(n, ftypes.int32)
        lwork_cell = arena.box(lwork, ftypes.int32)
        a_buf = arena.box(to_column_major(A), ftypes.make_array(ftypes.float64, n * m))
        b_buf = arena.box(to_column_major(B), ftypes.make_array(ftypes.float64, n * p))
        d_buf = arena.box([float(v) for v in d], ftypes.make_array(ftypes.float64, n))
        x_buf = arena.allocate(m * _DOUBLE)
        y_buf = arena.allocate(p * _DOUBLE)
        work = arena.allocate(lwork * _DOUBLE)
        info_cell = arena.box(0, ftypes.int32)
        solver(n_cell, m_cell, p_cell, a_buf, lda_cell, b_buf, ldb_cell,
               d_buf, x_buf, y_buf, work, lwork_cell, info_cell)
        info = info_cell.decode()
        if info != 0:
            raise SolverFailure(f"call to dggglm failed (info = {info})")
        x = x_buf.read_at(0, ftypes.make_array(ftypes.float64, m))
        y = y_buf.read_at(0, ftypes.make_array(ftypes.float64, p))
    return x, y


def residual(A, B, d, x: Sequence[float], y: Sequence[float]) -> float:
    """Euclidean norm of d - A x - B y."""
    n, m = _shape(A, "first matrix")
    nb, p = _shape(B, "second matrix")
    if n != nb or len(d) != n or len(x) != m or len(y) != p:
        raise DimensionMismatch("residual shapes are inconsistent")
    total = 0.0
    for i in range(n):
        r = float(d[i])
        for j in range(m):
            r -= A[i][j] * x[j]
        for j in range(p):
            r -= B[i][j] * y[j]
        total += r * r
    return math.sqrt(total)


# Worked instance used by the CLI demo when no input file is given.
SAMPLE_A = [[1, 2, 3], [4, 1, 2], [5, 6, 7], [3, 4, 6]]
SAMPLE_B = [[1, 0, 0, 0], [2, 3, 0, 0], [4, 5, 1e-5, 0], [7, 8, 9, 10]]
SAMPLE_D = [1, 2, 3, 4]
