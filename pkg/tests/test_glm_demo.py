"""Column-major marshalling, the constrained least-squares oracle, and the
foreign solver against both."""

import random

import pytest

from ffibridge.demos import glm
from ffibridge.errors import DimensionMismatch

from conftest import requires_lapack
from support import constrained_lsq_oracle, norm2

GOLDEN_A = [[1, 2, 3], [4, 1, 2], [5, 6, 7], [3, 4, 6]]
GOLDEN_B = [[1, 0, 0, 0], [2, 3, 0, 0], [4, 5, 1e-5, 0], [7, 8, 9, 10]]
GOLDEN_D = [1, 2, 3, 4]
GOLDEN_X = [0.3141, -0.334417, 0.441691]
GOLDEN_Y = [0.0296627, 0.0451036, 0.0585128, 0.0650142]


def random_instance(rng, n, m, p):
    """Well conditioned by construction: B is a dominant-diagonal square
    factor, A has unit-scale entries."""
    A = [[rng.uniform(-1, 1) for _ in range(m)] for _ in range(n)]
    B = [[(1.5 if i == j else 0.0) + 0.3 * rng.uniform(-1, 1)
          for j in range(p)] for i in range(n)]
    d = [rng.uniform(-1, 1) for _ in range(n)]
    return A, B, d


class TestToColumnMajor:
    def test_two_by_two(self):
        assert glm.to_column_major([[1, 2], [3, 4]]) == [1.0, 3.0, 2.0, 4.0]

    def test_column_vector_unchanged(self):
        assert glm.to_column_major([[5], [6]]) == [5.0, 6.0]

    def test_golden_design_matrix(self):
        assert glm.to_column_major(GOLDEN_A) == [
            1, 4, 5, 3, 2, 1, 6, 4, 3, 2, 7, 6]

    def test_ragged_rejected(self):
        with pytest.raises(DimensionMismatch):
            glm.to_column_major([[1, 2], [3]])

    def test_non_numeric_rejected(self):
        with pytest.raises(DimensionMismatch):
            glm.to_column_major([[1, "x"]])

    def test_involution(self):
        rng = random.Random(3)
        rows, cols = 4, 6
        M = [[rng.uniform(-9, 9) for _ in range(cols)] for _ in range(rows)]
        flat = glm.to_column_major(M)
        rebuilt = [[flat[j * rows + i] for j in range(cols)] for i in range(rows)]
        assert rebuilt == M


class TestOracle:
    # pure-host checks of the test oracle itself; these run everywhere
    def test_identity_instance(self):
        n = 4
        I = [[1.0 if i == j else 0.0 for j in range(n)] for i in range(n)]
        d = [1.0, -2.0, 3.0, 0.25]
        x, y = constrained_lsq_oracle(I, I, d)
        assert max(abs(a - b) for a, b in zip(x, d)) < 1e-12
        assert max(abs(v) for v in y) < 1e-12

    def test_solution_is_feasible(self):
        rng = random.Random(8)
        A, B, d = random_instance(rng, 6, 3, 6)
        x, y = constrained_lsq_oracle(A, B, d)
        assert glm.residual(A, B, d, x, y) < 1e-10

    def test_perturbing_x_breaks_feasibility(self):
        rng = random.Random(9)
        A, B, d = random_instance(rng, 5, 2, 5)
        x, y = constrained_lsq_oracle(A, B, d)
        base = glm.residual(A, B, d, x, y)
        bumped = list(x)
        bumped[0] += 1.0
        assert glm.residual(A, B, d, bumped, y) > base + 0.01


class TestResidual:
    def test_exact_zero_for_identity(self):
        I = [[1.0, 0.0], [0.0, 1.0]]
        assert glm.residual(I, I, [2.0, 3.0], [2.0, 3.0], [0.0, 0.0]) < 1e-14

    def test_shape_checks(self):
        with pytest.raises(DimensionMismatch):
            glm.residual([[1.0]], [[1.0]], [1.0], [1.0, 2.0], [0.0])


@requires_lapack
class TestForeignSolver:
    def test_golden_instance(self):
        x, y = glm.general_linear_model(GOLDEN_A, GOLDEN_B, GOLDEN_D)
        assert max(abs(a - b) for a, b in zip(x, GOLDEN_X)) < 1e-4
        assert max(abs(a - b) for a, b in zip(y, GOLDEN_Y)) < 1e-4
        assert glm.residual(GOLDEN_A, GOLDEN_B, GOLDEN_D, x, y) < 1e-6

    def test_identity_leaves_zero_noise(self):
        n = 3
        I = [[1.0 if i == j else 0.0 for j in range(n)] for i in range(n)]
        d = [5.0, -1.0, 0.5]
        x, y = glm.general_linear_model(I, I, d)
        assert max(abs(a - b) for a, b in zip(x, d)) < 1e-12
        assert max(abs(v) for v in y) < 1e-12

    def test_agrees_with_oracle(self):
        rng = random.Random(10)
        for _ in range(6):
            n = rng.randint(3, 8)
            m = rng.randint(1, n - 1)
            A, B, d = random_instance(rng, n, m, n)
            x, y = glm.general_linear_model(A, B, d)
            ox, oy = constrained_lsq_oracle(A, B, d)
            assert max(abs(a - b) for a, b in zip(x, ox)) < 1e-8
            assert max(abs(a - b) for a, b in zip(y, oy)) < 1e-8
            # minimality: the foreign answer is never worse than the oracle
            assert norm2(y) <= norm2(oy) + 1e-8

    def test_feasibility_bound(self):
        rng = random.Random(12)
        A, B, d = random_instance(rng, 7, 4, 7)
        x, y = glm.general_linear_model(A, B, d)
        assert glm.residual(A, B, d, x, y) <= 1e-6 * (1 + norm2(d))

    def test_row_mismatch_rejected(self):
        with pytest.raises(DimensionMismatch, match="same number of rows"):
            glm.general_linear_model([[1.0]], [[1.0], [2.0]], [1.0])

    def test_underdetermined_rejected(self):
        with pytest.raises(DimensionMismatch):
            glm.general_linear_model([[1.0, 2.0]], [[1.0]], [1.0])

    def test_response_length_checked(self):
        with pytest.raises(DimensionMismatch):
            glm.general_linear_model([[1.0], [1.0]], [[1.0], [1.0]], [1.0])

    def test_inputs_not_clobbered(self):
        # dggglm overwrites its working copies; the caller's lists survive
        A = [row[:] for row in GOLDEN_A]
        B = [row[:] for row in GOLDEN_B]
        d = list(GOLDEN_D)
        glm.general_linear_model(A, B, d)
        assert A == GOLDEN_A and B == GOLDEN_B and d == GOLDEN_D
