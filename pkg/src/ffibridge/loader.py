"""Open shared libraries at run time and resolve symbols to addresses.

Name resolution for a bare name like "fftw3":
  1. decorate with the platform prefix/suffix (libfftw3.so, libfftw3.dylib,
     fftw3.dll),
  2. look for that file in each directory of $FFI_LIBRARY_PATH
     (colon-separated, in order),
  3. fall back to the system loader's default search.

Libraries are opened with local visibility (symbols are not injected into
the global namespace).  Handles are closed explicitly; resolving through
a closed handle is an error, never a dangling pointer.
"""

from __future__ import annotations

import ctypes
import ctypes.util
import os
import sys
import threading
from typing import Callable

from .codec import Address
from .errors import HandleClosed, LibraryLoadError, LibraryNotFound, SymbolNotFound

SEARCH_PATH_VAR = "FFI_LIBRARY_PATH"

_open_close_lock = threading.Lock()


def _dl_api():
    """dlopen/dlsym/dlclose/dlerror out of the running process."""
    last_error = None
    candidates = [None, ctypes.util.find_library("dl"), ctypes.util.find_library("c")]
    for name in candidates:
        try:
            lib = ctypes.CDLL(name)
            dlopen = lib.dlopen
            dlsym = lib.dlsym
            dlclose = lib.dlclose
            dlerror = lib.dlerror
        except (OSError, AttributeError) as exc:
            last_error = exc
            continue
        dlopen.restype = ctypes.c_void_p
        dlopen.argtypes = [ctypes.c_char_p, ctypes.c_int]
        dlsym.restype = ctypes.c_void_p
        dlsym.argtypes = [ctypes.c_void_p, ctypes.c_char_p]
        dlclose.restype = ctypes.c_int
        dlclose.argtypes = [ctypes.c_void_p]
        dlerror.restype = ctypes.c_char_p
        dlerror.argtypes = []
        return dlopen, dlsym, dlclose, dlerror
    raise OSError(f"could not locate the dynamic loader API: {last_error}")


_dlopen, _dlsym, _dlclose, _dlerror = _dl_api()
_DLOPEN_MODE = os.RTLD_NOW | os.RTLD_LOCAL


def _last_dl_message() -> str:
    msg = _dlerror()
    return msg.decode(errors="replace") if msg else ""


def decorate(name: str) -> str:
    """Bare library name -> platform file name ("fftw3" -> "libfftw3.so").
    Paths and already-decorated names pass through unchanged."""
    if os.sep in name or name.endswith((".so", ".dylib", ".dll")) or ".so." in name:
        return name
    if sys.platform == "darwin":
        prefix, suffix = "lib", ".dylib"
    elif sys.platform in ("win32", "cygwin"):
        prefix, suffix = "", ".dll"
    else:
        prefix, suffix = "lib", ".so"
    if prefix and name.startswith(prefix):
        return name + suffix
    return prefix + name + suffix


class LibraryHandle:
    """An open shared library (or the process's own namespace)."""

    def __init__(self, name: str, path: str, handle: int):
        self.name = name
        self.path = path
        self._handle = handle
        self.open = True
        self._cleanups: list[Callable[[], None]] = []

    def resolve(self, symbol: str) -> Address:
        """Address of `symbol`; raises SymbolNotFound / HandleClosed."""
        if not self.open:
            raise HandleClosed(f"library {self.name!r} is closed")
        _last_dl_message()  # clear any stale loader error
        addr = _dlsym(self._handle, symbol.encode())
        if not addr:
            raise SymbolNotFound(self.name, symbol, _last_dl_message())
        return Address(addr)

    def register_cleanup(self, action: Callable[[], None]) -> None:
        if not self.open:
            raise HandleClosed(f"library {self.name!r} is closed")
        self._cleanups.append(action)

    def close(self) -> None:
        """Run registered cleanups (reverse order) and drop the handle.
        Idempotent."""
        if not self.open:
            return
        self.open = False
        while self._cleanups:
            self._cleanups.pop()()
        with _open_close_lock:
            _dlclose(self._handle)
        self._handle = None

    def __enter__(self) -> "LibraryHandle":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def __repr__(self) -> str:
        state = "open" if self.open else "closed"
        return f"<LibraryHandle {self.name!r} {state}>"


def _try_dlopen(path: str) -> int | None:
    with _open_close_lock:
        _last_dl_message()
        handle = _dlopen(path.encode(), _DLOPEN_MODE)
        if handle:
            return handle
        return None


def open_library(name: str, explicit_path: str | None = None) -> LibraryHandle:
    """Open a shared library by bare name or exact file path.

    With explicit_path, exactly that file is opened.  Otherwise the
    decorated name is searched along $FFI_LIBRARY_PATH, then given to the
    system loader.  LibraryNotFound reports every candidate tried.
    """
    if explicit_path is not None:
        if not os.path.isfile(explicit_path):
            raise LibraryNotFound(name, [explicit_path])
        handle = _try_dlopen(explicit_path)
        if handle is None:
            raise LibraryLoadError(
                f"loader rejected {explicit_path}: {_last_dl_message()}"
            )
        return LibraryHandle(name, explicit_path, handle)

    filename = decorate(name)
    tried = []
    for directory in os.environ.get(SEARCH_PATH_VAR, "").split(":"):
        if not directory:
            continue
        candidate = os.path.join(directory, filename)
        tried.append(candidate)
        if os.path.isfile(candidate):
            handle = _try_dlopen(candidate)
            if handle is None:
                raise LibraryLoadError(
                    f"loader rejected {candidate}: {_last_dl_message()}"
                )
            return LibraryHandle(name, candidate, handle)

    tried.append(f"{filename} (system default search)")
    handle = _try_dlopen(filename)
    if handle is not None:
        return LibraryHandle(name, filename, handle)
    message = _last_dl_message()
    if "no such file" in message.lower() or "not found" in message.lower() or not message:
        raise LibraryNotFound(name, tried)
    raise LibraryLoadError(f"loader rejected {filename}: {message}")


def default_namespace() -> LibraryHandle:
    """Pseudo-handle resolving symbols in the running process and the
    shared objects it already loaded."""
    with _open_close_lock:
        handle = _dlopen(None, _DLOPEN_MODE)
    if not handle:
        raise LibraryLoadError(f"cannot open the default namespace: {_last_dl_message()}")
    return LibraryHandle("<process>", "default namespace", handle)


def resolve_symbol(lib: LibraryHandle, symbol: str) -> Address:
    return lib.resolve(symbol)


def close_library(lib: LibraryHandle) -> None:
    lib.close()
