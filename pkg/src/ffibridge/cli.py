"""Command-line front end.

    ffibridge run <script>          execute a script file
    ffibridge repl                  interactive statement loop
    ffibridge demo fft|glm|jit      run a worked example

Exit codes: 0 success, 1 script error, 2 environment error (a required
library or compiler is missing).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import calling, ftypes
from .demos import fft as fft_demo
from .demos import glm as glm_demo
from .demos import jit as jit_demo
from .errors import (
    CompilerMissing,
    EnvironmentMissing,
    FfiError,
    LibraryNotFound,
    ScriptError,
)
from .loader import SEARCH_PATH_VAR
from .script import Interpreter, parse_line, run_script, validate

EXIT_OK = 0
EXIT_SCRIPT = 1
EXIT_ENVIRONMENT = 2

_ENV_ERRORS = (EnvironmentMissing, CompilerMissing, LibraryNotFound)


def _flush_all_c_streams() -> None:
    """fflush(NULL) through the FFI keeps foreign stdout ahead of ours."""
    try:
        fflush = calling.foreign_function("fflush", ftypes.int32, [ftypes.address])
        fflush(None)
    except FfiError:
        pass


def _emit(line: str) -> None:
    _flush_all_c_streams()
    print(line, flush=True)


def cmd_run(args) -> int:
    try:
        with open(args.script) as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: cannot read script: {exc}", file=sys.stderr)
        return EXIT_SCRIPT
    try:
        run_script(text, emit=_emit)
    except _ENV_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ENVIRONMENT
    except ScriptError as exc:
        cause = exc.__cause__
        if isinstance(cause, _ENV_ERRORS):
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_ENVIRONMENT
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCRIPT
    except FfiError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCRIPT
    finally:
        _flush_all_c_streams()
    return EXIT_OK


def cmd_repl(args) -> int:
    interactive = sys.stdin.isatty()
    if interactive:
        print("ffibridge repl; one statement per line, Ctrl-D to exit")
    with Interpreter() as interp:
        while True:
            if interactive:
                sys.stdout.write("ffi> ")
                sys.stdout.flush()
            line = sys.stdin.readline()
            if not line:
                break
            try:
                stmt = parse_line(line.rstrip("\n"), 1)
                if stmt is None:
                    continue
                validate([stmt], names=interp.names())
                for out in interp.execute(stmt):
                    _emit(out)
                if stmt.kind == "openlib":
                    _emit(f"{stmt.name} : library")
            except FfiError as exc:
                _flush_all_c_streams()
                print(f"error: {exc}", flush=True)
    return EXIT_OK


def cmd_demo(args) -> int:
    try:
        if args.example == "fft":
            return _demo_fft(args)
        if args.example == "glm":
            return _demo_glm(args)
        return _demo_jit(args)
    except _ENV_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ENVIRONMENT
    except FfiError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCRIPT


def _demo_fft(args) -> int:
    import random
    rng = random.Random(args.seed)
    degree = args.degree
    if args.bench:
        report = fft_demo.benchmark_multiply([degree], runs=args.runs, rng=rng)
        sys.stdout.write(report.to_csv())
        return EXIT_OK
    f = fft_demo.random_polynomial(degree, rng)
    g = fft_demo.random_polynomial(degree, rng)
    fast = fft_demo.fft_multiply(f, g)
    slow = fft_demo.naive_multiply(f, g)
    worst = max(abs(a - b) for a, b in zip(fast, slow))
    scale = max(abs(c) for c in slow) or 1.0
    print(f"degree {degree} product: {len(fast)} coefficients")
    print(f"max |fft - naive| = {worst:.3e} (relative {worst / scale:.3e})")
    return EXIT_OK


def _demo_glm(args) -> int:
    if args.input:
        with open(args.input) as fh:
            payload = json.load(fh)
        A, B, d = payload["A"], payload["B"], payload["d"]
    else:
        A, B, d = glm_demo.SAMPLE_A, glm_demo.SAMPLE_B, glm_demo.SAMPLE_D
    x, y = glm_demo.general_linear_model(A, B, d)
    print("x =", " ".join(format(v, ".6g") for v in x))
    print("y =", " ".join(format(v, ".6g") for v in y))
    print(f"residual = {glm_demo.residual(A, B, d, x, y):.3e}")
    return EXIT_OK


def _demo_jit(args) -> int:
    if args.bench:
        print(jit_demo.benchmark_fib(args.n))
        return EXIT_OK
    value = jit_demo.jit_fibonacci(args.n)
    print(f"F({args.n}) = {value}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ffibridge",
        description="load shared libraries, model C types, call foreign functions",
    )
    parser.add_argument("--lib-path", metavar="DIR", action="append", default=[],
                        help=f"directory to prepend to ${SEARCH_PATH_VAR}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a script file")
    p_run.add_argument("script")
    p_run.set_defaults(func=cmd_run)

    p_repl = sub.add_parser("repl", help="interactive statement loop")
    p_repl.set_defaults(func=cmd_repl)

    p_demo = sub.add_parser("demo", help="run a worked example")
    demo_sub = p_demo.add_subparsers(dest="example", required=True)

    p_fft = demo_sub.add_parser("fft", help="polynomial multiplication via FFTW")
    p_fft.add_argument("--degree", type=int, default=8)
    p_fft.add_argument("--bench", action="store_true")
    p_fft.add_argument("--runs", type=int, default=5)
    p_fft.add_argument("--seed", type=int, default=20240101)
    p_fft.set_defaults(func=cmd_demo)

    p_glm = demo_sub.add_parser("glm", help="constrained least squares via LAPACK")
    p_glm.add_argument("--input", metavar="FILE.json",
                       help='JSON object with keys "A", "B", "d"')
    p_glm.set_defaults(func=cmd_demo)

    p_jit = demo_sub.add_parser("jit", help="compile and call C at run time")
    p_jit.add_argument("--n", type=int, default=35)
    p_jit.add_argument("--bench", action="store_true")
    p_jit.set_defaults(func=cmd_demo)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.lib_path:
        existing = os.environ.get(SEARCH_PATH_VAR, "")
        parts = list(args.lib_path) + ([existing] if existing else [])
        os.environ[SEARCH_PATH_VAR] = ":".join(parts)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
