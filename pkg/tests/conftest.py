"""Shared fixtures: the native oracle library and external-library guards.

Tests that need the native fixture, FFTW, LAPACK, or a C compiler skip
with an explicit reason when the dependency is missing, so the pure-host
part of the suite runs everywhere.
"""

from __future__ import annotations

import json
import os
import shutil
import subprocess
import sys

import pytest

from ffibridge.demos.fft import fftw_available
from ffibridge.demos.glm import lapack_available
from ffibridge.loader import open_library

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
FIXTURE_DIR = os.path.join(ROOT, "fixture")


def compiler_available() -> bool:
    return shutil.which(os.environ.get("CC", "cc")) is not None


requires_fftw = pytest.mark.skipif(
    not fftw_available(), reason="FFTW (libfftw3) is not available on this host")
requires_lapack = pytest.mark.skipif(
    not lapack_available(), reason="no LAPACK provider (dggglm) found on this host")
requires_compiler = pytest.mark.skipif(
    not compiler_available(), reason="no C compiler ($CC or cc) on PATH")


@pytest.fixture(scope="session")
def fixture_library_path(tmp_path_factory):
    """Build (or locate) the native fixture library; skip when impossible."""
    prebuilt = os.environ.get("FFIB_LIBRARY")
    if prebuilt:
        if os.path.isfile(prebuilt):
            return prebuilt
        pytest.skip(f"native fixture skipped: $FFIB_LIBRARY missing ({prebuilt})")
    build_script = os.path.join(FIXTURE_DIR, "build.py")
    if not os.path.isfile(build_script):
        pytest.skip("native fixture skipped: fixture/build.py not present (secondary component unbuilt)")
    if not compiler_available():
        pytest.skip("native fixture skipped: no C compiler on PATH")
    out_dir = tmp_path_factory.mktemp("ffib-build")
    proc = subprocess.run(
        [sys.executable, build_script, str(out_dir)],
        capture_output=True, text=True,
    )
    if proc.returncode != 0:
        pytest.skip(f"native fixture skipped: build failed:\n{proc.stderr}")
    return proc.stdout.strip()


@pytest.fixture(scope="session")
def fixture_lib(fixture_library_path):
    lib = open_library("ffib", explicit_path=fixture_library_path)
    yield lib
    lib.close()


@pytest.fixture(scope="session")
def fixture_manifest():
    path = os.path.join(FIXTURE_DIR, "manifest.json")
    if not os.path.isfile(path):
        pytest.skip("native fixture skipped: manifest.json not present")
    with open(path) as fh:
        return json.load(fh)
