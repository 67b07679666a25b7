"""ffibridge: load shared libraries, model C data layouts, marshal host
values across the ABI boundary, and call foreign functions at run time.

Quick tour:

    >>> import ffibridge as ffi
    >>> puts = ffi.foreign_function("puts", ffi.int32, [ffi.cstring])
    >>> puts("Hello, world!")
    14

    >>> point = ffi.make_struct([("x", ffi.float64), ("y", ffi.float64)])
    >>> point.size, point.offsets
    (16, (0, 8))

    >>> with ffi.MemoryArena() as arena:
    ...     cell = arena.box(5, ffi.int32)
    ...     cell.decode()
    5
"""

from .calling import ForeignFunction, foreign_function, invoke, invoke_raw
from .codec import (
    NULL,
    Address,
    ForeignValue,
    decode,
    decode_union_member,
    encode,
)
from .errors import FfiError
from .ftypes import (
    Kind,
    TypeDescriptor,
    address,
    alignment_of,
    cstring,
    float32,
    float64,
    int8,
    int16,
    int32,
    int64,
    make_array,
    make_struct,
    make_union,
    size_of,
    uint8,
    uint16,
    uint32,
    uint64,
    void,
)
from .loader import (
    LibraryHandle,
    close_library,
    default_namespace,
    open_library,
    resolve_symbol,
)
from .memory import MemoryArena, MemoryBlock, live_block_count, read_at_address
from .typeexpr import format_type, parse_type

__version__ = "0.1.0"

__all__ = [
    "Address",
    "ForeignFunction",
    "ForeignValue",
    "FfiError",
    "Kind",
    "LibraryHandle",
    "MemoryArena",
    "MemoryBlock",
    "NULL",
    "TypeDescriptor",
    "address",
    "alignment_of",
    "close_library",
    "cstring",
    "decode",
    "decode_union_member",
    "default_namespace",
    "encode",
    "float32",
    "float64",
    "foreign_function",
    "format_type",
    "int8",
    "int16",
    "int32",
    "int64",
    "invoke",
    "invoke_raw",
    "live_block_count",
    "make_array",
    "make_struct",
    "make_union",
    "open_library",
    "parse_type",
    "read_at_address",
    "resolve_symbol",
    "size_of",
    "uint8",
    "uint16",
    "uint32",
    "uint64",
    "void",
]
