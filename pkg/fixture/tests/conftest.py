"""Build the native library once per session and open it through the
toolkit under test."""

import json
import os
import sys

import pytest

FIXTURE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
REPO_ROOT = os.path.dirname(FIXTURE_DIR)

# standalone checkout support: fall back to the sibling source tree when
# the package is not installed
try:
    import ffibridge  # noqa: F401
except ImportError:
    sys.path.insert(0, os.path.join(REPO_ROOT, "src"))

sys.path.insert(0, FIXTURE_DIR)


@pytest.fixture(scope="session")
def library_path(tmp_path_factory):
    import build

    try:
        return build.build(str(tmp_path_factory.mktemp("ffib")))
    except build.BuildError as exc:
        pytest.skip(f"cannot build the native fixture: {exc}")


@pytest.fixture(scope="session")
def lib(library_path):
    from ffibridge import open_library

    handle = open_library("ffib", explicit_path=library_path)
    yield handle
    handle.close()


@pytest.fixture(scope="session")
def manifest():
    with open(os.path.join(FIXTURE_DIR, "manifest.json")) as fh:
        return json.load(fh)
