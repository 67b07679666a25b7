"""Compile C at run time, load it, and call it through the FFI.

The workload is the naive doubly recursive Fibonacci definition, chosen
exactly because it is exponentially slow: the same algorithm, compiled,
shows how much of the host-side cost is interpretation overhead rather
than the recurrence itself.  Compilation is the classic two-step
(compile to a PIC object, link it into a shared object) with the
compiler taken from $CC, falling back to cc.
"""

from __future__ import annotations

import atexit
import os
import shutil
import subprocess
import tempfile
import threading
import time
from dataclasses import dataclass

from .. import calling, ftypes
from ..errors import CompileFailed, CompilerMissing, RangeRefused
from ..loader import LibraryHandle, open_library

_FIB_SOURCE = """int fibonacci2(int n)
{
    if (n < 2)
        return n;
    else
        return fibonacci2(n - 1) + fibonacci2(n - 2);
}
"""

_ENTRY_SYMBOL = "fibonacci2"

# F(46) = 1836311903 is the largest Fibonacci number that fits a signed
# 32-bit int; F(47) overflows.
MAX_INT32_INPUT = 46


def host_fibonacci(n: int) -> int:
    """Naive recurrence on the host: F(n) = F(n-1) + F(n-2), F(n<2) = n."""
    if n < 0:
        raise ValueError("Fibonacci input must be nonnegative")
    if n < 2:
        return n
    return host_fibonacci(n - 1) + host_fibonacci(n - 2)


@dataclass
class JitArtifact:
    """A compiled-and-loaded shared object plus its entry point."""

    work_dir: str
    source_path: str
    object_path: str
    library_path: str
    handle: LibraryHandle
    entry: calling.ForeignFunction

    def close(self) -> None:
        """Close the library and remove the working directory. Idempotent."""
        if self.handle.open:
            self.handle.close()
        if os.path.isdir(self.work_dir):
            shutil.rmtree(self.work_dir, ignore_errors=True)

    def __enter__(self) -> "JitArtifact":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def _compiler() -> str:
    cc = os.environ.get("CC", "cc")
    resolved = shutil.which(cc)
    if resolved is None:
        raise CompilerMissing(f"C compiler {cc!r} not found on PATH")
    return resolved


def _run_step(command: list[str]) -> None:
    proc = subprocess.run(command, capture_output=True, text=True)
    if proc.returncode != 0:
        raise CompileFailed(command, proc.stderr.strip())


def jit_compile() -> JitArtifact:
    """Emit the C source, compile it into a shared object in a fresh
    temporary directory, load it, and resolve the entry point."""
    cc = _compiler()
    work_dir = tempfile.mkdtemp(prefix="ffibridge-jit-")
    try:
        source_path = os.path.join(work_dir, "libfib.c")
        object_path = os.path.join(work_dir, "libfib.o")
        library_path = os.path.join(work_dir, "libfib.so")
        with open(source_path, "w") as fh:
            fh.write(_FIB_SOURCE)
        _run_step([cc, "-c", "-fPIC", source_path, "-o", object_path])
        _run_step([cc, "-shared", object_path, "-o", library_path])
        handle = open_library("libfib", explicit_path=library_path)
        entry = calling.foreign_function(
            _ENTRY_SYMBOL, ftypes.int32, [ftypes.int32], lib=handle)
    except BaseException:
        shutil.rmtree(work_dir, ignore_errors=True)
        raise
    return JitArtifact(
        work_dir=work_dir,
        source_path=source_path,
        object_path=object_path,
        library_path=library_path,
        handle=handle,
        entry=entry,
    )


_cache_lock = threading.Lock()
_cached: JitArtifact | None = None


def _cached_artifact() -> JitArtifact:
    global _cached
    with _cache_lock:
        if _cached is None:
            _cached = jit_compile()
            atexit.register(_cached.close)
        return _cached


def _check_range(n: int) -> None:
    if n < 0:
        raise ValueError("Fibonacci input must be nonnegative")
    if n > MAX_INT32_INPUT:
        raise RangeRefused(
            f"F({n}) overflows a 32-bit int; largest supported input is "
            f"{MAX_INT32_INPUT}"
        )


def jit_fibonacci(n: int) -> int:
    """F(n) through the compiled entry point (compiled once per process)."""
    _check_range(n)
    return _cached_artifact().entry(n)


@dataclass
class FibBenchmark:
    n: int
    value: int
    host_seconds: float
    jit_seconds: float        # includes emit + compile + load + call
    jit_warm_seconds: float   # call only, library already compiled

    @property
    def speedup(self) -> float:
        return self.host_seconds / self.jit_seconds

    def __str__(self) -> str:
        return (
            f"F({self.n}) = {self.value}\n"
            f"host:      {self.host_seconds:.4f} s\n"
            f"jit cold:  {self.jit_seconds:.4f} s (compile included)\n"
            f"jit warm:  {self.jit_warm_seconds:.6f} s\n"
            f"speedup:   {self.speedup:.1f}x (cold)"
        )


def benchmark_fib(n: int) -> FibBenchmark:
    """Wall-time comparison of the host recursion against the compiled
    path.  The headline JIT time includes compilation, so a fresh
    artifact is built for the measurement."""
    _check_range(n)
    if n > 40:
        raise RangeRefused("benchmark inputs above 40 take too long on the host side")
    start = time.perf_counter()
    host_value = host_fibonacci(n)
    host_seconds = time.perf_counter() - start

    start = time.perf_counter()
    with jit_compile() as artifact:
        jit_value = artifact.entry(n)
    jit_seconds = time.perf_counter() - start

    warm = _cached_artifact()
    start = time.perf_counter()
    warm_value = warm.entry(n)
    jit_warm_seconds = time.perf_counter() - start

    if not (host_value == jit_value == warm_value):
        raise AssertionError(
            f"paths disagree: host {host_value}, jit {jit_value}, warm {warm_value}")
    return FibBenchmark(
        n=n,
        value=host_value,
        host_seconds=host_seconds,
        jit_seconds=jit_seconds,
        jit_warm_seconds=jit_warm_seconds,
    )
