"""Convert host values to foreign byte representations and back.

Host values are plain Python objects: int, float, str/bytes, list, dict,
None, and Address (an int subclass marking machine addresses).  Encoding
writes native-endian two's-complement integers and IEEE floats at the
exact declared width; struct padding is always zeroed so encoding the
same value twice yields identical bytes.

C strings always copy: encoding text allocates a NUL-terminated buffer
owned by the same arena (or block) as the pointer cell.
"""

from __future__ import annotations

import ctypes
import struct
from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable

from . import ftypes
from .errors import (
    IntegerOutOfRange,
    InteriorNul,
    LengthMismatch,
    MissingField,
    NullAddress,
    TypeMismatch,
    UnknownField,
)
from .ftypes import Kind, TypeDescriptor

if TYPE_CHECKING:
    from .memory import MemoryArena, MemoryBlock


class Address(int):
    """A machine address.  Behaves as an int but stays distinguishable
    from ordinary integers when values are decoded or printed."""

    def __repr__(self) -> str:
        return f"Address({int(self):#x})"


NULL = Address(0)

_INT_PACK = {
    Kind.INT8: "=b", Kind.UINT8: "=B",
    Kind.INT16: "=h", Kind.UINT16: "=H",
    Kind.INT32: "=i", Kind.UINT32: "=I",
    Kind.INT64: "=q", Kind.UINT64: "=Q",
}
_INT_RANGE = {
    Kind.INT8: (-(1 << 7), (1 << 7) - 1),
    Kind.UINT8: (0, (1 << 8) - 1),
    Kind.INT16: (-(1 << 15), (1 << 15) - 1),
    Kind.UINT16: (0, (1 << 16) - 1),
    Kind.INT32: (-(1 << 31), (1 << 31) - 1),
    Kind.UINT32: (0, (1 << 32) - 1),
    Kind.INT64: (-(1 << 63), (1 << 63) - 1),
    Kind.UINT64: (0, (1 << 64) - 1),
}
_FLOAT_PACK = {Kind.FLOAT32: "=f", Kind.FLOAT64: "=d"}
_POINTER_PACK = "=Q" if ftypes.WORD_SIZE == 8 else "=I"


@dataclass(frozen=True)
class ForeignValue:
    """A typed region of foreign memory holding an encoded value.

    `owner` is the block the region lives in; it must stay alive for as
    long as the value is used.  `decode()` reads the region back as a
    host value.
    """

    type: TypeDescriptor
    location: Address
    owner: "MemoryBlock | None" = None

    def decode(self):
        if self.owner is not None:
            self.owner.require_alive()
        return decode(self.location, self.type)

    def decode_union_member(self, name: str):
        if self.owner is not None:
            self.owner.require_alive()
        return decode_union_member(self.location, self.type, name)


def pointer_value(v) -> int:
    """Coerce v to a raw address: Address, int, None (NULL), MemoryBlock,
    or ForeignValue."""
    from .memory import MemoryBlock

    if v is None:
        return 0
    if isinstance(v, MemoryBlock):
        v.require_alive()
        return int(v.base)
    if isinstance(v, ForeignValue):
        if v.owner is not None:
            v.owner.require_alive()
        return int(v.location)
    if isinstance(v, int) and not isinstance(v, bool):
        return int(v)
    raise TypeMismatch(f"cannot use {type(v).__name__} as an address")


def text_bytes(v) -> bytes:
    if isinstance(v, str):
        data = v.encode("utf-8")
    elif isinstance(v, (bytes, bytearray)):
        data = bytes(v)
    else:
        raise TypeMismatch(f"cannot encode {type(v).__name__} as a C string")
    if b"\x00" in data:
        raise InteriorNul("text contains an interior NUL byte")
    return data


def encode_bytes(v, t: TypeDescriptor, alloc: "Callable[[int], MemoryBlock] | None" = None) -> bytes:
    """Encode host value v as the byte representation of type t.

    `alloc` is used only for C-string members: the text is copied into a
    fresh NUL-terminated block and the returned bytes hold its address.
    """
    kind = t.kind
    if kind in _INT_PACK:
        if not isinstance(v, int):
            raise TypeMismatch(f"cannot encode {type(v).__name__} as {t}")
        lo, hi = _INT_RANGE[kind]
        if not lo <= v <= hi:
            raise IntegerOutOfRange(f"{v} does not fit {t} (range {lo}..{hi})")
        return struct.pack(_INT_PACK[kind], v)
    if kind in _FLOAT_PACK:
        # ints are accepted and rounded to nearest; floats into integer
        # kinds are rejected above, never silently truncated
        if not isinstance(v, (int, float)):
            raise TypeMismatch(f"cannot encode {type(v).__name__} as {t}")
        if kind is Kind.FLOAT32:
            # the C double-to-float conversion: round to nearest, overflow
            # past the float32 range goes to infinity
            return struct.pack(_FLOAT_PACK[kind], ctypes.c_float(float(v)).value)
        return struct.pack(_FLOAT_PACK[kind], float(v))
    if kind is Kind.ADDRESS:
        return struct.pack(_POINTER_PACK, pointer_value(v) & ((1 << (8 * ftypes.WORD_SIZE)) - 1))
    if kind is Kind.CSTRING:
        data = text_bytes(v)
        if alloc is None:
            raise TypeMismatch("C-string encode needs an owning arena or block")
        buf = alloc(len(data) + 1)
        buf.write(0, data + b"\x00")
        return struct.pack(_POINTER_PACK, int(buf.base))
    if kind is Kind.ARRAY:
        if not isinstance(v, (list, tuple)):
            raise TypeMismatch(f"cannot encode {type(v).__name__} as {t}")
        if len(v) != t.count:
            raise LengthMismatch(f"array {t} expects {t.count} elements, got {len(v)}")
        return b"".join(encode_bytes(item, t.element, alloc) for item in v)
    if kind is Kind.STRUCT:
        if not isinstance(v, dict):
            raise TypeMismatch(f"cannot encode {type(v).__name__} as struct {t}")
        names = [n for n, _ in t.fields]
        for key in v:
            if key not in names:
                raise UnknownField(f"struct {t} has no field {key!r}")
        out = bytearray(t.size)
        for (name, ftype), offset in zip(t.fields, t.offsets):
            if name not in v:
                raise MissingField(f"struct {t} requires field {name!r}")
            out[offset:offset + ftype.size] = encode_bytes(v[name], ftype, alloc)
        return bytes(out)
    if kind is Kind.UNION:
        if not isinstance(v, dict):
            raise TypeMismatch(f"cannot encode {type(v).__name__} as union {t}")
        if len(v) != 1:
            raise TypeMismatch(f"union encode takes exactly one member, got {len(v)}")
        (name, member_value), = v.items()
        try:
            mtype = t.field_type(name)
        except KeyError:
            raise UnknownField(f"union {t} has no member {name!r}") from None
        out = bytearray(t.size)
        out[: mtype.size] = encode_bytes(member_value, mtype, alloc)
        return bytes(out)
    raise TypeMismatch(f"cannot encode a value of type {t}")


def decode(location, t: TypeDescriptor):
    """Decode the bytes at `location` as type t.

    Inverse of encode on the encodable domain: integers widen into Python
    ints, floats into Python floats, arrays into lists, structs into
    dicts.  C strings follow the stored pointer and read to the NUL.
    Unions need an explicit member name; use decode_union_member.
    """
    addr = pointer_value(location)
    kind = t.kind
    if kind in _INT_PACK:
        return struct.unpack(_INT_PACK[kind], ctypes.string_at(addr, t.size))[0]
    if kind in _FLOAT_PACK:
        return struct.unpack(_FLOAT_PACK[kind], ctypes.string_at(addr, t.size))[0]
    if kind is Kind.ADDRESS:
        return Address(struct.unpack(_POINTER_PACK, ctypes.string_at(addr, t.size))[0])
    if kind is Kind.CSTRING:
        ptr = struct.unpack(_POINTER_PACK, ctypes.string_at(addr, t.size))[0]
        if ptr == 0:
            raise NullAddress("C-string cell holds a null pointer")
        return ctypes.string_at(ptr).decode("utf-8")
    if kind is Kind.ARRAY:
        esize = t.element.size
        return [decode(addr + i * esize, t.element) for i in range(t.count)]
    if kind is Kind.STRUCT:
        return {
            name: decode(addr + offset, ftype)
            for (name, ftype), offset in zip(t.fields, t.offsets)
        }
    if kind is Kind.UNION:
        raise TypeMismatch("union decode needs a member name; use decode_union_member")
    raise TypeMismatch(f"cannot decode a value of type {t}")


def decode_union_member(location, t: TypeDescriptor, name: str):
    if t.kind is not Kind.UNION:
        raise TypeMismatch(f"{t} is not a union")
    try:
        mtype = t.field_type(name)
    except KeyError:
        raise UnknownField(f"union {t} has no member {name!r}") from None
    return decode(location, mtype)


def encode(v, t: TypeDescriptor, arena: "MemoryArena") -> ForeignValue:
    """Allocate size_of(t) bytes from the arena and write the encoding."""
    if t.kind is Kind.VOID:
        raise TypeMismatch("cannot encode a void value")
    block = arena.allocate(t.size)
    data = encode_bytes(v, t, arena.allocate)
    block.write(0, data)
    return ForeignValue(type=t, location=block.base, owner=block)
