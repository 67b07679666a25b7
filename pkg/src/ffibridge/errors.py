"""Exception hierarchy for the foreign-function toolkit.

Everything raised on purpose by this package derives from FfiError, so
callers can catch one base class at an API boundary.  Environment-level
problems (a missing library or compiler) are kept distinct from caller
mistakes so the CLI can map them to different exit codes.
"""


class FfiError(Exception):
    """Base class for all errors raised by this package."""


# --- library loading ---

class LibraryNotFound(FfiError):
    """No candidate file for the requested library could be loaded."""

    def __init__(self, name, tried):
        self.name = name
        self.tried = list(tried)
        super().__init__(
            f"shared library {name!r} not found (tried: {', '.join(self.tried)})"
        )


class LibraryLoadError(FfiError):
    """A library file exists but the loader refused it."""


class SymbolNotFound(FfiError):
    def __init__(self, library, symbol, detail=""):
        self.library = library
        self.symbol = symbol
        msg = f"symbol {symbol!r} not found in {library}"
        super().__init__(msg + (f": {detail}" if detail else ""))


class HandleClosed(FfiError):
    """Operation on a library handle that has been closed."""


# --- value codec ---

class TypeMismatch(FfiError):
    """Host value cannot be encoded as / decoded from the given type."""


class IntegerOutOfRange(FfiError):
    """Integer does not fit the target scalar width."""


class LengthMismatch(FfiError):
    """List length differs from the array element count."""


class UnknownField(FfiError):
    """Record carries a field the struct/union does not declare."""


class MissingField(FfiError):
    """Record omits a field the struct declares."""


class InteriorNul(FfiError):
    """Text contains an embedded NUL and cannot become a C string."""


class NullAddress(FfiError):
    """A C-string cell holds a null pointer."""


# --- memory ---

class AllocationError(FfiError):
    """Allocation failed or was requested with a non-positive size."""


class OutOfBounds(FfiError):
    """Access outside an alive block's [0, length) range."""


class UseAfterRelease(FfiError):
    """Access through a block or handle that was already released."""


# --- call engine ---

class ArityMismatch(FfiError):
    """Argument count differs from the declared parameter count."""


class UnsupportedType(FfiError):
    """The dispatch engine cannot pass or return this type."""


# --- demos ---

class EnvironmentMissing(FfiError):
    """A required external library is not available on this host."""


class DimensionMismatch(FfiError):
    """Matrix/vector shapes are inconsistent for the requested solve."""


class SolverFailure(FfiError):
    """The foreign solver reported a nonzero status."""


class CompilerMissing(FfiError):
    """No C compiler found (checked $CC, then 'cc')."""


class CompileFailed(FfiError):
    def __init__(self, command, stderr):
        self.command = command
        self.stderr = stderr
        super().__init__(f"compile step failed: {' '.join(command)}\n{stderr}")


class RangeRefused(FfiError):
    """Input refused because the foreign result would overflow its type."""


# --- scripting ---

class ScriptError(FfiError):
    """Parse, validation, or execution error in a CLI script.

    line/column are 1-based when known; statement is the 0-based index of
    the failing statement for execution errors.
    """

    def __init__(self, message, line=None, column=None, statement=None):
        self.line = line
        self.column = column
        self.statement = statement
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where = f" ({where})"
        elif statement is not None:
            where = f" (statement {statement})"
        super().__init__(message + where)
