"""Discrete Fourier transforms through a dynamically loaded FFTW, a pure
reference transform, and convolution-based polynomial multiplication.

Vectors are plain sequences of complex numbers.  Transforms are
unnormalized: for a length-L vector, transform(+1) of transform(-1) gives
L times the input.  Sign -1 is the forward direction.  Polynomials are
coefficient lists, index k holding the coefficient of x^k.
"""

from __future__ import annotations

import cmath
import csv
import io
import statistics
import threading
import time
from dataclasses import dataclass
from typing import Callable, Sequence

from .. import calling, ftypes
from ..errors import EnvironmentMissing, FfiError, LibraryNotFound
from ..loader import open_library
from ..memory import MemoryArena

FORWARD = -1
INVERSE = +1

# estimate-mode planning: deterministic plans, no measurement runs
PLAN_FLAGS = 64

_DOUBLE = ftypes.float64.size

_state_lock = threading.Lock()
_fftw = None
_fftw_error: str | None = None


def _fftw_functions():
    """Open libfftw3 and prepare the three plan/execute/destroy entry
    points, once per process."""
    global _fftw, _fftw_error
    with _state_lock:
        if _fftw is not None:
            return _fftw
        if _fftw_error is not None:
            raise EnvironmentMissing(_fftw_error)
        try:
            lib = open_library("fftw3")
            plan = calling.foreign_function(
                "fftw_plan_dft_1d", ftypes.address,
                [ftypes.int32, ftypes.address, ftypes.address, ftypes.int32, ftypes.uint32],
                lib=lib,
            )
            execute = calling.foreign_function(
                "fftw_execute", ftypes.void, [ftypes.address], lib=lib)
            destroy = calling.foreign_function(
                "fftw_destroy_plan", ftypes.void, [ftypes.address], lib=lib)
        except (LibraryNotFound, FfiError) as exc:
            _fftw_error = f"FFTW is not available: {exc}"
            raise EnvironmentMissing(_fftw_error) from exc
        _fftw = (lib, plan, execute, destroy)
        return _fftw


def fftw_available() -> bool:
    try:
        _fftw_functions()
        return True
    except EnvironmentMissing:
        return False


def reference_dft(x: Sequence[complex], sign: int) -> list[complex]:
    """Definitional O(n^2) transform: entry k is sum_j x_j w^(sign*j*k)
    with w the principal root of unity for the vector length."""
    if sign not in (FORWARD, INVERSE):
        raise ValueError("sign must be -1 (forward) or +1 (inverse)")
    n = len(x)
    if n == 0:
        raise ValueError("empty vector")
    roots = [cmath.exp(sign * 2j * cmath.pi * r / n) for r in range(n)]
    out = []
    for k in range(n):
        acc = 0j
        for j in range(n):
            acc += complex(x[j]) * roots[(j * k) % n]
        out.append(acc)
    return out


def fast_transform(x: Sequence[complex], sign: int) -> list[complex]:
    """Same transform through FFTW: interleave re/im into a double buffer,
    plan, execute, read back.  Plan destruction is registered as a cleanup
    so it runs exactly once when the call's arena is released."""
    if sign not in (FORWARD, INVERSE):
        raise ValueError("sign must be -1 (forward) or +1 (inverse)")
    n = len(x)
    if n == 0:
        raise ValueError("empty vector")
    _, plan_fn, execute_fn, destroy_fn = _fftw_functions()
    with MemoryArena() as arena:
        inbuf = arena.allocate(2 * n * _DOUBLE)
        outbuf = arena.allocate(2 * n * _DOUBLE)
        for i, value in enumerate(x):
            z = complex(value)
            inbuf.write_at(2 * i * _DOUBLE, ftypes.float64, z.real)
            inbuf.write_at((2 * i + 1) * _DOUBLE, ftypes.float64, z.imag)
        plan = plan_fn(n, inbuf, outbuf, sign, PLAN_FLAGS)
        if int(plan) == 0:
            raise EnvironmentMissing("fftw_plan_dft_1d returned a null plan")
        arena.register_cleanup(lambda: destroy_fn(plan))
        plan_cell = arena.box(plan, ftypes.address)
        execute_fn.invoke_raw([plan_cell.location])
        flat = outbuf.read_at(0, ftypes.make_array(ftypes.float64, 2 * n))
        return [complex(flat[2 * i], flat[2 * i + 1]) for i in range(n)]


def default_transform() -> Callable[[Sequence[complex], int], list[complex]]:
    return fast_transform if fftw_available() else reference_dft


def fft_multiply(f: Sequence[complex], g: Sequence[complex],
                 transform: Callable[[Sequence[complex], int], list[complex]] | None = None,
                 ) -> list[complex]:
    """Product coefficients via the convolution theorem: zero-pad both
    inputs to length m+n+1, transform, multiply pointwise, transform back,
    divide by m+n+1."""
    if not f or not g:
        raise ValueError("polynomials must be non-empty coefficient lists")
    if transform is None:
        transform = default_transform()
    m = len(f) - 1
    n = len(g) - 1
    size = m + n + 1
    fa = [complex(c) for c in f] + [0j] * n
    gb = [complex(c) for c in g] + [0j] * m
    fa_hat = transform(fa, FORWARD)
    gb_hat = transform(gb, FORWARD)
    product = [a * b for a, b in zip(fa_hat, gb_hat)]
    back = transform(product, INVERSE)
    return [c / size for c in back]


def naive_multiply(f: Sequence[complex], g: Sequence[complex]) -> list[complex]:
    """Schoolbook O(len(f)*len(g)) convolution; the baseline the fast path
    is measured against."""
    if not f or not g:
        raise ValueError("polynomials must be non-empty coefficient lists")
    out = [0j] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a == 0:
            continue
        for j, b in enumerate(g):
            out[i + j] += a * b
    return out


@dataclass
class BenchmarkRow:
    degree: int
    naive_ms: float
    fft_ms: float


@dataclass
class BenchmarkReport:
    rows: list[BenchmarkRow]

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out)
        writer.writerow(["degree", "naive_ms", "fft_ms"])
        for row in self.rows:
            writer.writerow([row.degree, f"{row.naive_ms:.3f}", f"{row.fft_ms:.3f}"])
        return out.getvalue()

    def __str__(self) -> str:
        lines = [f"{'degree':>8} {'naive_ms':>12} {'fft_ms':>12}"]
        for row in self.rows:
            lines.append(f"{row.degree:>8} {row.naive_ms:>12.3f} {row.fft_ms:>12.3f}")
        return "\n".join(lines)


def random_polynomial(degree: int, rng) -> list[complex]:
    return [complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(degree + 1)]


def benchmark_multiply(degrees: Sequence[int], runs: int = 5, rng=None) -> BenchmarkReport:
    """Median wall time per degree for the naive and FFT paths.

    Needs FFTW; the point of the comparison is the foreign fast path
    against the host baseline.
    """
    if not fftw_available():
        raise EnvironmentMissing("FFTW is required for the multiplication benchmark")
    if runs < 1:
        raise ValueError("runs must be >= 1")
    if rng is None:
        import random
        rng = random.Random(20240101)
    rows = []
    for degree in degrees:
        f = random_polynomial(degree, rng)
        g = random_polynomial(degree, rng)
        naive_times = []
        fft_times = []
        for _ in range(runs):
            start = time.perf_counter()
            naive_multiply(f, g)
            naive_times.append(time.perf_counter() - start)
            start = time.perf_counter()
            fft_multiply(f, g, transform=fast_transform)
            fft_times.append(time.perf_counter() - start)
        rows.append(BenchmarkRow(
            degree=degree,
            naive_ms=statistics.median(naive_times) * 1e3,
            fft_ms=statistics.median(fft_times) * 1e3,
        ))
    return BenchmarkReport(rows)
