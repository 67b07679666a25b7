"""Foreign memory: zero-initialized aligned blocks, typed access at
offsets, and deterministic cleanup.

A MemoryBlock is host-owned foreign-visible storage.  All block-relative
reads and writes are bounds checked; reading through a raw address (as
returned by a foreign call) is possible but explicitly unsafe.  Cleanup
actions registered on a block or arena run exactly once, in reverse
registration order, when the owner is released.  Release replaces
GC-driven finalization: it is explicit, ordered, and idempotent.
"""

from __future__ import annotations

import ctypes
import threading
from typing import Callable

from . import codec
from .codec import Address, ForeignValue
from .errors import AllocationError, OutOfBounds, UseAfterRelease
from .ftypes import Kind, TypeDescriptor

BLOCK_ALIGNMENT = 16

_stats_lock = threading.Lock()
_live_blocks = 0


def live_block_count() -> int:
    """Number of currently alive blocks, for leak accounting in tests."""
    return _live_blocks


def _count(delta: int) -> None:
    global _live_blocks
    with _stats_lock:
        _live_blocks += delta


class MemoryBlock:
    """An alive-or-released run of foreign memory, at least 16-byte aligned
    and zero initialized."""

    def __init__(self, length: int, arena: "MemoryArena | None" = None):
        if not isinstance(length, int) or isinstance(length, bool) or length < 1:
            raise AllocationError(f"block length must be a positive integer, got {length!r}")
        try:
            self._buf = ctypes.create_string_buffer(length + BLOCK_ALIGNMENT)
        except MemoryError as exc:
            raise AllocationError(f"allocation of {length} bytes failed") from exc
        raw = ctypes.addressof(self._buf)
        self.base = Address((raw + BLOCK_ALIGNMENT - 1) & ~(BLOCK_ALIGNMENT - 1))
        self.length = length
        self.alive = True
        self._cleanups: list[Callable[[], None]] = []
        self._children: list[MemoryBlock] = []
        self.arena = arena
        _count(+1)

    def require_alive(self) -> None:
        if not self.alive:
            raise UseAfterRelease("block was already released")

    def _check(self, offset: int, size: int) -> None:
        self.require_alive()
        if offset < 0 or offset + size > self.length:
            raise OutOfBounds(
                f"[{offset}, {offset + size}) outside block of length {self.length}"
            )

    def write(self, offset: int, data: bytes) -> None:
        self._check(offset, len(data))
        ctypes.memmove(int(self.base) + offset, data, len(data))

    def read(self, offset: int, size: int) -> bytes:
        self._check(offset, size)
        return ctypes.string_at(int(self.base) + offset, size)

    def write_at(self, offset: int, t: TypeDescriptor, value) -> None:
        """Encode value as t and store it at the given byte offset."""
        self._check(offset, t.size)
        data = codec.encode_bytes(value, t, self._aux_alloc)
        ctypes.memmove(int(self.base) + offset, data, len(data))

    def read_at(self, offset: int, t: TypeDescriptor):
        """Decode a value of type t stored at the given byte offset."""
        self._check(offset, t.size)
        return codec.decode(int(self.base) + offset, t)

    def view(self, offset: int, t: TypeDescriptor) -> ForeignValue:
        """Typed view into this block (no copy)."""
        self._check(offset, t.size)
        return ForeignValue(type=t, location=Address(int(self.base) + offset), owner=self)

    def _aux_alloc(self, n: int) -> "MemoryBlock":
        # C-string buffers belong to the arena that performed the encode,
        # or to this block when it stands alone
        if self.arena is not None and not self.arena.released:
            return self.arena.allocate(n)
        child = MemoryBlock(n)
        self._children.append(child)
        return child

    def register_cleanup(self, action: Callable[[], None]) -> None:
        self.require_alive()
        self._cleanups.append(action)

    def release(self) -> None:
        """Run cleanups in reverse registration order, then free. No-op if
        already released."""
        if not self.alive:
            return
        self.alive = False
        while self._cleanups:
            self._cleanups.pop()()
        while self._children:
            self._children.pop().release()
        self._buf = None
        _count(-1)

    def __enter__(self) -> "MemoryBlock":
        return self

    def __exit__(self, *exc) -> None:
        self.release()

    def __repr__(self) -> str:
        state = "alive" if self.alive else "released"
        return f"<MemoryBlock {self.length}B {state}>"


class MemoryArena:
    """Owns blocks and runs their cleanups at release.

    Releasing the arena releases every owned block (latest first); double
    release is a no-op.  Usable as a context manager.
    """

    def __init__(self):
        self.released = False
        self._blocks: list[MemoryBlock] = []
        self._cleanups: list[Callable[[], None]] = []

    def allocate(self, length: int) -> MemoryBlock:
        if self.released:
            raise UseAfterRelease("arena was already released")
        block = MemoryBlock(length, arena=self)
        self._blocks.append(block)
        return block

    def box(self, value, t: TypeDescriptor) -> ForeignValue:
        """Encode value into fresh memory; the result's address can be
        passed wherever a pointer is expected."""
        if self.released:
            raise UseAfterRelease("arena was already released")
        return codec.encode(value, t, self)

    def register_cleanup(self, action: Callable[[], None]) -> None:
        if self.released:
            raise UseAfterRelease("arena was already released")
        self._cleanups.append(action)

    def release(self) -> None:
        if self.released:
            return
        self.released = True
        while self._cleanups:
            self._cleanups.pop()()
        while self._blocks:
            self._blocks.pop().release()

    @property
    def live_blocks(self) -> int:
        return sum(1 for b in self._blocks if b.alive)

    def __enter__(self) -> "MemoryArena":
        return self

    def __exit__(self, *exc) -> None:
        self.release()


def read_at_address(addr, t: TypeDescriptor):
    """UNSAFE: decode type t at a raw foreign address with no bounds check.

    Only sound for addresses handed out by foreign code (for example a
    buffer a callee filled); a bad address crashes the process like any C
    pointer bug would.
    """
    if t.kind is Kind.VOID:
        return None
    return codec.decode(addr, t)
