"""Foreign type descriptors and their ABI layout.

A TypeDescriptor is an immutable value describing a C type: a scalar, an
array, a struct, or a union.  Size, alignment, and struct field offsets
are computed at construction using natural alignment with trailing
padding (the common 64-bit convention), and are validated against the
platform compiler by the fixture test suite.
"""

from __future__ import annotations

import ctypes
import enum
from dataclasses import dataclass

from .errors import TypeMismatch

WORD_SIZE = ctypes.sizeof(ctypes.c_void_p)


class Kind(enum.Enum):
    VOID = "void"
    INT8 = "int8"
    UINT8 = "uint8"
    INT16 = "int16"
    UINT16 = "uint16"
    INT32 = "int32"
    UINT32 = "uint32"
    INT64 = "int64"
    UINT64 = "uint64"
    FLOAT32 = "float32"
    FLOAT64 = "float64"
    ADDRESS = "address"
    CSTRING = "cstring"
    ARRAY = "array"
    STRUCT = "struct"
    UNION = "union"


_SCALAR_SIZES = {
    Kind.VOID: 0,
    Kind.INT8: 1,
    Kind.UINT8: 1,
    Kind.INT16: 2,
    Kind.UINT16: 2,
    Kind.INT32: 4,
    Kind.UINT32: 4,
    Kind.INT64: 8,
    Kind.UINT64: 8,
    Kind.FLOAT32: 4,
    Kind.FLOAT64: 8,
    Kind.ADDRESS: WORD_SIZE,
    Kind.CSTRING: WORD_SIZE,
}

_COMPOSITE = {Kind.ARRAY, Kind.STRUCT, Kind.UNION}


def _align_up(n: int, a: int) -> int:
    return (n + a - 1) & ~(a - 1)


@dataclass(frozen=True)
class TypeDescriptor:
    """Immutable description of a foreign type with computed layout.

    Do not construct directly; use the scalar singletons below and the
    make_array / make_struct / make_union factories, which validate their
    inputs and fill in the layout fields.
    """

    kind: Kind
    size: int
    alignment: int
    element: TypeDescriptor | None = None
    count: int = 0
    fields: tuple[tuple[str, TypeDescriptor], ...] = ()
    offsets: tuple[int, ...] = ()
    _grammar_names = {
        Kind.VOID: "void", Kind.INT8: "i8", Kind.UINT8: "u8",
        Kind.INT16: "i16", Kind.UINT16: "u16", Kind.INT32: "i32",
        Kind.UINT32: "u32", Kind.INT64: "i64", Kind.UINT64: "u64",
        Kind.FLOAT32: "f32", Kind.FLOAT64: "f64",
        Kind.ADDRESS: "ptr", Kind.CSTRING: "cstr",
    }

    @property
    def is_scalar(self) -> bool:
        return self.kind not in _COMPOSITE and self.kind is not Kind.VOID

    @property
    def is_composite(self) -> bool:
        return self.kind in _COMPOSITE

    def field_type(self, name: str) -> TypeDescriptor:
        for fname, ftype in self.fields:
            if fname == name:
                return ftype
        raise KeyError(name)

    def __str__(self) -> str:
        if self.kind in self._grammar_names:
            return self._grammar_names[self.kind]
        if self.kind is Kind.ARRAY:
            return f"[{self.count} x {self.element}]"
        body = ", ".join(f"{n}:{t}" for n, t in self.fields)
        if self.kind is Kind.STRUCT:
            return "{" + body + "}"
        return "union{" + body + "}"


def _scalar(kind: Kind) -> TypeDescriptor:
    size = _SCALAR_SIZES[kind]
    # alignment of a scalar equals its size; void aligns to 1 by convention
    return TypeDescriptor(kind=kind, size=size, alignment=max(size, 1))


void = _scalar(Kind.VOID)
int8 = _scalar(Kind.INT8)
uint8 = _scalar(Kind.UINT8)
int16 = _scalar(Kind.INT16)
uint16 = _scalar(Kind.UINT16)
int32 = _scalar(Kind.INT32)
uint32 = _scalar(Kind.UINT32)
int64 = _scalar(Kind.INT64)
uint64 = _scalar(Kind.UINT64)
float32 = _scalar(Kind.FLOAT32)
float64 = _scalar(Kind.FLOAT64)
address = _scalar(Kind.ADDRESS)
cstring = _scalar(Kind.CSTRING)

SCALARS = {
    "i8": int8, "u8": uint8, "i16": int16, "u16": uint16,
    "i32": int32, "u32": uint32, "i64": int64, "u64": uint64,
    "f32": float32, "f64": float64, "ptr": address, "cstr": cstring,
    "void": void,
}


def make_array(element: TypeDescriptor, count: int) -> TypeDescriptor:
    """Array of `count` contiguous elements; size = count * element size."""
    if not isinstance(count, int) or isinstance(count, bool) or count < 1:
        raise ValueError(f"array count must be a positive integer, got {count!r}")
    if element.kind is Kind.VOID:
        raise TypeMismatch("array element may not be void")
    return TypeDescriptor(
        kind=Kind.ARRAY,
        size=count * element.size,
        alignment=element.alignment,
        element=element,
        count=count,
    )


def _check_members(what: str, members) -> tuple[tuple[str, TypeDescriptor], ...]:
    members = tuple((str(n), t) for n, t in members)
    if not members:
        raise ValueError(f"{what} needs at least one member")
    seen = set()
    for name, t in members:
        if name in seen:
            raise ValueError(f"duplicate {what} member name {name!r}")
        seen.add(name)
        if t.kind is Kind.VOID:
            raise TypeMismatch(f"{what} member {name!r} may not be void")
    return members


def make_struct(fields) -> TypeDescriptor:
    """Struct with natural alignment: each field starts at the smallest
    multiple of its alignment past the previous field; total size is padded
    to the struct alignment."""
    fields = _check_members("struct", fields)
    offsets = []
    offset = 0
    alignment = 1
    for _, ftype in fields:
        offset = _align_up(offset, ftype.alignment)
        offsets.append(offset)
        offset += ftype.size
        alignment = max(alignment, ftype.alignment)
    return TypeDescriptor(
        kind=Kind.STRUCT,
        size=_align_up(offset, alignment),
        alignment=alignment,
        fields=fields,
        offsets=tuple(offsets),
    )


def make_union(members) -> TypeDescriptor:
    """Union: all members at offset 0; size is the padded maximum."""
    members = _check_members("union", members)
    alignment = max(t.alignment for _, t in members)
    size = _align_up(max(t.size for _, t in members), alignment)
    return TypeDescriptor(
        kind=Kind.UNION,
        size=size,
        alignment=alignment,
        fields=members,
        offsets=tuple(0 for _ in members),
    )


def size_of(t: TypeDescriptor) -> int:
    return t.size


def alignment_of(t: TypeDescriptor) -> int:
    return t.alignment
