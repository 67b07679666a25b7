"""Typed foreign-function handles and call dispatch.

A ForeignFunction pairs a resolved symbol address with a prepared call
interface (return type plus parameter types).  Dispatch goes through the
host's portable calling-convention engine (ctypes); the interface is
prepared once at construction and reused for every call.

Two call paths exist:

* invoke / __call__: host values are encoded into a per-call scratch
  arena, the call is made, the scratch is released, and the result is
  decoded (void returns None).
* invoke_raw: zero-copy. Every entry of arg_addresses points at storage
  already holding the argument (for a pointer parameter, the storage
  holds the pointer value).  The result lands in engine-owned (or
  caller-supplied) storage and comes back as a ForeignValue.

All type checking happens at construction: a function that constructs
cannot later fail with an unsupported type.  Composite (struct/union/
array) parameters are not dispatched by value; pass their address, as C
APIs built for FFI use expect.  The engine adds no locking; calling a
foreign function from several threads at once is safe only if the callee
itself is.
"""

from __future__ import annotations

import ctypes
from typing import Sequence

from . import codec, ftypes
from .codec import Address, ForeignValue
from .errors import ArityMismatch, FfiError, NullAddress, TypeMismatch, UnsupportedType
from .ftypes import Kind, TypeDescriptor
from .loader import LibraryHandle, default_namespace
from .memory import MemoryArena, MemoryBlock

_CTYPES = {
    Kind.INT8: ctypes.c_int8,
    Kind.UINT8: ctypes.c_uint8,
    Kind.INT16: ctypes.c_int16,
    Kind.UINT16: ctypes.c_uint16,
    Kind.INT32: ctypes.c_int32,
    Kind.UINT32: ctypes.c_uint32,
    Kind.INT64: ctypes.c_int64,
    Kind.UINT64: ctypes.c_uint64,
    Kind.FLOAT32: ctypes.c_float,
    Kind.FLOAT64: ctypes.c_double,
    Kind.ADDRESS: ctypes.c_void_p,
    Kind.CSTRING: ctypes.c_void_p,
}


def _dispatch_type(t: TypeDescriptor, role: str):
    if t.kind is Kind.VOID:
        if role == "return":
            return None
        raise UnsupportedType("void is not a parameter type")
    try:
        return _CTYPES[t.kind]
    except KeyError:
        raise UnsupportedType(
            f"{t} cannot be passed by value; pass its address instead"
        ) from None


class ForeignFunction:
    """A callable wrapper around one foreign symbol."""

    def __init__(self, name: str, target: Address,
                 return_type: TypeDescriptor, param_types: Sequence[TypeDescriptor]):
        self.name = name
        self.target = target
        self.return_type = return_type
        self.param_types = tuple(param_types)
        restype = _dispatch_type(return_type, "return")
        argtypes = [_dispatch_type(t, "parameter") for t in self.param_types]
        prototype = ctypes.CFUNCTYPE(restype, *argtypes)
        self._argtypes = argtypes
        self._cfunc = prototype(int(target))
        self._return_block = (
            MemoryBlock(return_type.size) if return_type.kind is not Kind.VOID else None
        )

    # --- checked path -------------------------------------------------

    def __call__(self, *args):
        return self.invoke(args)

    def invoke(self, args: Sequence):
        """Encode args, call, decode the result (void -> None)."""
        if len(args) != len(self.param_types):
            raise ArityMismatch(
                f"{self.name} takes {len(self.param_types)} arguments, got {len(args)}"
            )
        scratch = None
        cargs = []
        try:
            for index, (value, t) in enumerate(zip(args, self.param_types)):
                try:
                    if t.kind is Kind.ADDRESS:
                        cargs.append(ctypes.c_void_p(codec.pointer_value(value)))
                        continue
                    if isinstance(value, ForeignValue):
                        if value.type != t:
                            raise TypeMismatch(
                                f"foreign value of type {value.type} passed where {t} expected"
                            )
                        if value.owner is not None:
                            value.owner.require_alive()
                        cargs.append(self._argtypes[index].from_address(int(value.location)))
                        continue
                    if t.kind is Kind.CSTRING and isinstance(value, int) and not isinstance(value, bool):
                        # raw pointer to an existing NUL-terminated buffer
                        cargs.append(ctypes.c_void_p(int(value)))
                        continue
                    if scratch is None:
                        scratch = MemoryArena()
                    cell = scratch.box(value, t)
                    if t.kind is Kind.CSTRING:
                        # the callee gets the pointer held in the cell
                        buf_addr = codec.decode(int(cell.location), ftypes.address)
                        cargs.append(ctypes.c_void_p(int(buf_addr)))
                    else:
                        cargs.append(self._argtypes[index].from_address(int(cell.location)))
                except FfiError as exc:
                    raise type(exc)(f"argument {index}: {exc}") from exc
            result = self._cfunc(*cargs)
        finally:
            if scratch is not None:
                scratch.release()
        return self._decode_result(result)

    def _decode_result(self, result):
        kind = self.return_type.kind
        if kind is Kind.VOID:
            return None
        if kind is Kind.ADDRESS:
            return Address(result or 0)
        if kind is Kind.CSTRING:
            if not result:
                raise NullAddress(f"{self.name} returned a null C string")
            return ctypes.string_at(result).decode("utf-8")
        return result

    # --- zero-copy path -----------------------------------------------

    def invoke_raw(self, arg_addresses: Sequence[int], out: ForeignValue | None = None):
        """Call with arguments read directly from caller-prepared storage.

        arg_addresses[i] must point at correctly typed, correctly aligned
        storage for parameter i.  Returns a ForeignValue over the return
        storage (engine-owned and reused across calls unless `out` is
        given), or None for void functions.
        """
        if len(arg_addresses) != len(self.param_types):
            raise ArityMismatch(
                f"{self.name} takes {len(self.param_types)} arguments, "
                f"got {len(arg_addresses)}"
            )
        cargs = [
            argtype.from_address(codec.pointer_value(addr))
            for argtype, addr in zip(self._argtypes, arg_addresses)
        ]
        result = self._cfunc(*cargs)
        if self.return_type.kind is Kind.VOID:
            return None
        if out is None:
            target = self._return_block.view(0, self.return_type)
        else:
            target = out
            if target.owner is not None:
                target.owner.require_alive()
        raw = self._encode_result(result)
        ctypes.memmove(int(target.location), raw, len(raw))
        return target

    def _encode_result(self, result) -> bytes:
        kind = self.return_type.kind
        if kind in (Kind.ADDRESS, Kind.CSTRING):
            return codec.encode_bytes(Address(result or 0), ftypes.address)
        return codec.encode_bytes(result, self.return_type)

    def __repr__(self) -> str:
        params = ", ".join(str(t) for t in self.param_types)
        return f"<ForeignFunction {self.name}: {self.return_type}({params})>"


_process_namespace: LibraryHandle | None = None


def _shared_default_namespace() -> LibraryHandle:
    global _process_namespace
    if _process_namespace is None or not _process_namespace.open:
        _process_namespace = default_namespace()
    return _process_namespace


def foreign_function(symbol: str, return_type: TypeDescriptor,
                     param_types, lib: LibraryHandle | None = None) -> ForeignFunction:
    """Resolve `symbol` and prepare a call interface for it.

    `param_types` may be a single descriptor (one-parameter shorthand) or
    a sequence.  Without `lib`, the symbol is looked up in the process's
    default namespace.  All failures are raised here, not at call time.
    """
    if isinstance(param_types, TypeDescriptor):
        param_types = [param_types]
    owner = lib if lib is not None else _shared_default_namespace()
    target = owner.resolve(symbol)
    return ForeignFunction(symbol, target, return_type, param_types)


def invoke(f: ForeignFunction, args: Sequence):
    return f.invoke(args)


def invoke_raw(f: ForeignFunction, arg_addresses: Sequence[int],
               out: ForeignValue | None = None):
    return f.invoke_raw(arg_addresses, out)
