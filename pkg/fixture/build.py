#!/usr/bin/env python3
"""Build the native fixture library.

Two-step compile (object then shared link), compiler from $CC falling
back to cc.  -ffp-contract=off keeps float expressions bit-identical to
their host mirrors.  Prints the built library path on success.

Usage: python3 build.py [out_dir]
"""

from __future__ import annotations

import os
import shutil
import subprocess
import sys

HERE = os.path.dirname(os.path.abspath(__file__))
SOURCE = os.path.join(HERE, "src", "ffib.c")
DEFAULT_OUT = os.path.join(HERE, "build")


class BuildError(RuntimeError):
    pass


def find_compiler() -> str:
    cc = os.environ.get("CC", "cc")
    resolved = shutil.which(cc)
    if resolved is None:
        raise BuildError(f"C compiler {cc!r} not found on PATH")
    return resolved


def build(out_dir: str = DEFAULT_OUT) -> str:
    cc = find_compiler()
    os.makedirs(out_dir, exist_ok=True)
    obj = os.path.join(out_dir, "ffib.o")
    lib = os.path.join(out_dir, "libffib.so")
    steps = [
        [cc, "-c", "-fPIC", "-ffp-contract=off", SOURCE, "-o", obj],
        [cc, "-shared", obj, "-o", lib],
    ]
    for step in steps:
        proc = subprocess.run(step, capture_output=True, text=True)
        if proc.returncode != 0:
            raise BuildError(f"{' '.join(step)}\n{proc.stderr}")
    return lib


def main() -> int:
    out_dir = sys.argv[1] if len(sys.argv) > 1 else DEFAULT_OUT
    try:
        print(build(out_dir))
    except BuildError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
