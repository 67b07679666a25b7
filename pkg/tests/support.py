"""Independent oracles and hypothesis strategies shared across the suite.

Everything here recomputes expected values from first principles (direct
definitional sums, dense elimination, simple iteration) so the code under
test is never checked against itself.
"""

from __future__ import annotations

import cmath
import struct

from hypothesis import strategies as st

from ffibridge import ftypes
from ffibridge.codec import Address

# --- numeric oracles -------------------------------------------------


def brute_force_dft(x, sign):
    """Direct evaluation of the defining sum, no tables, no reuse."""
    n = len(x)
    out = []
    for k in range(n):
        acc = 0j
        for j in range(n):
            acc += complex(x[j]) * cmath.exp(sign * 2j * cmath.pi * j * k / n)
        out.append(acc)
    return out


def convolve(f, g):
    """Coefficient convolution straight from the product-of-sums formula."""
    out = [0j] * (len(f) + len(g) - 1)
    for i in range(len(f)):
        for j in range(len(g)):
            out[i + j] += complex(f[i]) * complex(g[j])
    return out


def gaussian_solve(matrix, rhs):
    """Dense Gauss-Jordan with partial pivoting over plain Python floats."""
    n = len(matrix)
    aug = [list(map(float, row)) + [float(rhs[i])] for i, row in enumerate(matrix)]
    for col in range(n):
        pivot_row = max(range(col, n), key=lambda r: abs(aug[r][col]))
        if abs(aug[pivot_row][col]) < 1e-300:
            raise ZeroDivisionError("singular system")
        aug[col], aug[pivot_row] = aug[pivot_row], aug[col]
        pivot = aug[col][col]
        for r in range(n):
            if r != col and aug[r][col] != 0.0:
                factor = aug[r][col] / pivot
                for c in range(col, n + 1):
                    aug[r][c] -= factor * aug[col][c]
    return [aug[i][n] / aug[i][i] for i in range(n)]


def constrained_lsq_oracle(A, B, d):
    """Solve min ||y|| s.t. d = A x + B y via the stationarity system.

    Lagrangian stationarity gives A^T l = 0 and y = B^T l; together with
    the constraint that is one dense linear system in (x, y, l).
    """
    n = len(A)
    m = len(A[0])
    p = len(B[0])
    size = m + p + n
    K = [[0.0] * size for _ in range(size)]
    rhs = [0.0] * size
    for i in range(m):                    # A^T l = 0
        for j in range(n):
            K[i][m + p + j] = float(A[j][i])
    for i in range(p):                    # y - B^T l = 0
        K[m + i][m + i] = 1.0
        for j in range(n):
            K[m + i][m + p + j] = -float(B[j][i])
    for i in range(n):                    # A x + B y = d
        for j in range(m):
            K[m + p + i][j] = float(A[i][j])
        for j in range(p):
            K[m + p + i][m + j] = float(B[i][j])
        rhs[m + p + i] = float(d[i])
    solution = gaussian_solve(K, rhs)
    return solution[:m], solution[m:m + p]


def iterative_fib(n):
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a


def float32_round(v):
    return struct.unpack("=f", struct.pack("=f", float(v)))[0]


def norm2(v):
    return sum(float(x) * float(x) for x in v) ** 0.5


# --- hypothesis strategies -------------------------------------------

SCALAR_INT_TYPES = [
    ftypes.int8, ftypes.uint8, ftypes.int16, ftypes.uint16,
    ftypes.int32, ftypes.uint32, ftypes.int64, ftypes.uint64,
]

INT_RANGES = {
    ftypes.int8: (-(1 << 7), (1 << 7) - 1),
    ftypes.uint8: (0, (1 << 8) - 1),
    ftypes.int16: (-(1 << 15), (1 << 15) - 1),
    ftypes.uint16: (0, (1 << 16) - 1),
    ftypes.int32: (-(1 << 31), (1 << 31) - 1),
    ftypes.uint32: (0, (1 << 32) - 1),
    ftypes.int64: (-(1 << 63), (1 << 63) - 1),
    ftypes.uint64: (0, (1 << 64) - 1),
}

_FIELD_NAMES = st.sampled_from(["a", "b", "c", "d", "e", "f", "g", "h"])

_plain_text = st.text(
    alphabet=st.characters(min_codepoint=1, max_codepoint=126), max_size=16)


def descriptor_strategy(include_cstring=True):
    """Union-free descriptors up to depth 3 with at most 8 members."""
    scalars = SCALAR_INT_TYPES + [ftypes.float32, ftypes.float64, ftypes.address]
    if include_cstring:
        scalars = scalars + [ftypes.cstring]
    base = st.sampled_from(scalars)

    def extend(children):
        arrays = st.builds(
            lambda e, n: ftypes.make_array(e, n), children, st.integers(1, 4))
        structs = st.lists(
            st.tuples(_FIELD_NAMES, children),
            min_size=1, max_size=8, unique_by=lambda item: item[0],
        ).map(ftypes.make_struct)
        return arrays | structs

    return st.recursive(base, extend, max_leaves=8)


def value_strategy(t):
    """Well-typed host values for a descriptor."""
    kind = t.kind.value
    if t in INT_RANGES:
        lo, hi = INT_RANGES[t]
        return st.integers(lo, hi)
    if kind == "float32":
        return st.floats(allow_nan=False, allow_infinity=False, width=32)
    if kind == "float64":
        return st.floats(allow_nan=False, allow_infinity=False)
    if kind == "address":
        return st.integers(0, (1 << 48) - 1).map(Address)
    if kind == "cstring":
        return _plain_text
    if kind == "array":
        return st.lists(value_strategy(t.element), min_size=t.count, max_size=t.count)
    if kind == "struct":
        return st.fixed_dictionaries(
            {name: value_strategy(ftype) for name, ftype in t.fields})
    raise AssertionError(f"no value strategy for {t}")
