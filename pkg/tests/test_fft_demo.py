"""Transform correctness against the definitional oracle, and the
convolution-based multiplication pipeline."""

import random

import pytest

from ffibridge.demos import fft

from conftest import requires_fftw
from support import brute_force_dft, convolve


def max_abs_diff(a, b):
    assert len(a) == len(b)
    return max(abs(x - y) for x, y in zip(a, b))


def random_vector(n, rng):
    return [complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(n)]


class TestReferenceDft:
    def test_singleton_is_identity(self):
        for sign in (-1, +1):
            assert fft.reference_dft([3 - 2j], sign) == [3 - 2j]

    def test_delta_transforms_to_all_ones(self):
        out = fft.reference_dft([1, 0, 0, 0], -1)
        assert max_abs_diff(out, [1, 1, 1, 1]) < 1e-12

    def test_known_vector(self):
        # frozen from the brute-force evaluation of the defining sum at
        # the 4th roots of unity
        out = fft.reference_dft([1, 2, 3, 4], -1)
        assert max_abs_diff(out, [10, -2 + 2j, -2 + 0j, -2 - 2j]) < 1e-12
        inv = fft.reference_dft([1, 2, 3, 4], +1)
        assert max_abs_diff(inv, [10, -2 - 2j, -2 + 0j, -2 + 2j]) < 1e-12

    def test_matches_bruteforce_oracle(self):
        rng = random.Random(11)
        for n in (1, 2, 3, 5, 8, 16, 33):
            x = random_vector(n, rng)
            for sign in (-1, +1):
                assert max_abs_diff(
                    fft.reference_dft(x, sign), brute_force_dft(x, sign)) < 1e-9

    def test_linearity(self):
        rng = random.Random(23)
        for n in (2, 7, 33, 64):
            x = random_vector(n, rng)
            y = random_vector(n, rng)
            alpha = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
            beta = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
            combined = fft.reference_dft(
                [alpha * a + beta * b for a, b in zip(x, y)], -1)
            fx = fft.reference_dft(x, -1)
            fy = fft.reference_dft(y, -1)
            expected = [alpha * a + beta * b for a, b in zip(fx, fy)]
            assert max_abs_diff(combined, expected) < 1e-10

    def test_unnormalized_roundtrip(self):
        rng = random.Random(31)
        for n in (1, 2, 9, 30):
            x = random_vector(n, rng)
            back = fft.reference_dft(fft.reference_dft(x, -1), +1)
            scaled = [n * v for v in x]
            scale = max(abs(v) for v in scaled) or 1.0
            assert max_abs_diff(back, scaled) / scale < 1e-8

    def test_bad_sign_rejected(self):
        with pytest.raises(ValueError):
            fft.reference_dft([1], 2)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            fft.reference_dft([], -1)


@requires_fftw
class TestFastTransform:
    def test_singleton(self):
        assert fft.fast_transform([5], -1) == [5 + 0j]

    def test_matches_reference_across_lengths(self):
        rng = random.Random(5)
        lengths = list(range(1, 65)) + [100, 128, 200, 256]
        for n in lengths:
            x = random_vector(n, rng)
            got = fft.fast_transform(x, -1)
            want = fft.reference_dft(x, -1)
            assert max_abs_diff(got, want) < 1e-9 * n

    def test_inverse_direction(self):
        rng = random.Random(6)
        x = random_vector(17, rng)
        assert max_abs_diff(
            fft.fast_transform(x, +1), fft.reference_dft(x, +1)) < 1e-9 * 17

    def test_unnormalized_roundtrip(self):
        rng = random.Random(7)
        for n in (1, 4, 33, 100):
            x = random_vector(n, rng)
            back = fft.fast_transform(fft.fast_transform(x, -1), +1)
            scaled = [n * v for v in x]
            scale = max(abs(v) for v in scaled) or 1.0
            assert max_abs_diff(back, scaled) / scale < 1e-8

    def test_no_block_leak(self):
        from ffibridge.memory import live_block_count

        fft.fast_transform([1, 2j], -1)
        before = live_block_count()
        for _ in range(10):
            fft.fast_transform([1, 2j, -3, 0.5], -1)
        assert live_block_count() == before


class TestMultiply:
    # runs against the pure reference engine so no external library is
    # needed; the FFTW-backed variants live below
    def test_binomial_square(self):
        got = fft.fft_multiply([1, 1], [1, 1], transform=fft.reference_dft)
        assert max_abs_diff(got, [1, 2, 1]) < 1e-10

    def test_multiplicative_identity(self):
        rng = random.Random(13)
        for degree in (0, 1, 5, 33, 64):
            f = random_vector(degree + 1, rng)
            got = fft.fft_multiply(f, [1], transform=fft.reference_dft)
            assert max_abs_diff(got, f) < 1e-9

    def test_commutes(self):
        rng = random.Random(17)
        f = random_vector(9, rng)
        g = random_vector(5, rng)
        fg = fft.fft_multiply(f, g, transform=fft.reference_dft)
        gf = fft.fft_multiply(g, f, transform=fft.reference_dft)
        assert max_abs_diff(fg, gf) < 1e-10

    def test_against_convolution_oracle(self):
        rng = random.Random(19)
        for _ in range(5):
            f = random_vector(rng.randint(1, 60), rng)
            g = random_vector(rng.randint(1, 60), rng)
            got = fft.fft_multiply(f, g, transform=fft.reference_dft)
            want = convolve(f, g)
            scale = max(abs(c) for c in want) or 1.0
            assert max_abs_diff(got, want) / scale < 1e-6

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            fft.fft_multiply([], [1])


class TestNaiveMultiply:
    def test_difference_of_squares(self):
        assert fft.naive_multiply([1, 1], [1, -1]) == [1 + 0j, 0j, -1 + 0j]

    def test_zero_polynomial(self):
        assert fft.naive_multiply([1 + 1j, 2], [0]) == [0j, 0j]

    def test_degree_three_hand_expansion(self):
        rng = random.Random(29)
        f = random_vector(4, rng)
        g = random_vector(4, rng)
        got = fft.naive_multiply(f, g)
        # expand the product sum by hand, one output power at a time
        expected = [
            f[0] * g[0],
            f[0] * g[1] + f[1] * g[0],
            f[0] * g[2] + f[1] * g[1] + f[2] * g[0],
            f[0] * g[3] + f[1] * g[2] + f[2] * g[1] + f[3] * g[0],
            f[1] * g[3] + f[2] * g[2] + f[3] * g[1],
            f[2] * g[3] + f[3] * g[2],
            f[3] * g[3],
        ]
        assert max_abs_diff(got, expected) < 1e-12

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            fft.naive_multiply([1], [])


@requires_fftw
class TestMultiplyThroughFFTW:
    def test_matches_naive_midsize(self):
        rng = random.Random(37)
        f = random_vector(201, rng)
        g = random_vector(201, rng)
        got = fft.fft_multiply(f, g, transform=fft.fast_transform)
        want = fft.naive_multiply(f, g)
        scale = max(abs(c) for c in want)
        assert max_abs_diff(got, want) / scale < 1e-6


@requires_fftw
class TestBenchmark:
    def test_smoke_single_degree(self):
        report = fft.benchmark_multiply([4], runs=1)
        assert len(report.rows) == 1
        row = report.rows[0]
        assert row.degree == 4
        assert row.naive_ms > 0
        assert row.fft_ms > 0
        csv_text = report.to_csv()
        assert csv_text.splitlines()[0] == "degree,naive_ms,fft_ms"
        assert csv_text.splitlines()[1].startswith("4,")

    def test_quadratic_vs_quasilinear_growth(self):
        # doubling the degree should cost the naive path ~4x but the
        # transform path much less; compare growth ratios, not wall times
        report = fft.benchmark_multiply([256, 512], runs=3)
        naive_ratio = report.rows[1].naive_ms / report.rows[0].naive_ms
        fft_ratio = report.rows[1].fft_ms / report.rows[0].fft_ms
        assert naive_ratio > fft_ratio

    def test_zero_runs_rejected(self):
        with pytest.raises(ValueError):
            fft.benchmark_multiply([4], runs=0)
