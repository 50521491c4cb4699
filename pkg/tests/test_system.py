import itertools
import math

import numpy as np
import pytest

from matgibbs import (
    BudgetExceededError,
    InvalidWordError,
    MatrixSystem,
    partition_sum,
    pressure_estimate,
    spectral_norm,
    stacked_products,
    word_product,
)

GOLDEN = (1 + math.sqrt(5)) / 2


def enumerate_partition_sum(system, t, n):
    """Independent oracle: explicit product enumeration with an eigh-based norm."""
    total = 0.0
    for word in itertools.product(range(system.alphabet_size), repeat=n):
        P = np.eye(system.dim)
        for s in word:
            P = P @ system.ops[s]
        top = max(np.linalg.eigvalsh(P.T @ P).max(), 0.0)
        total += math.sqrt(top) ** t
    return total


class TestMatrixSystem:
    def test_rejects_zero_matrix(self):
        with pytest.raises(ValueError, match="zero matrix"):
            MatrixSystem.from_matrices([[[1, 0], [0, 1]], [[0, 0], [0, 0]]])

    def test_rejects_mixed_shapes(self):
        with pytest.raises(ValueError):
            MatrixSystem(np.zeros((2, 2, 3)))

    def test_single_matrix_allowed_for_degenerate_checks(self):
        sys1 = MatrixSystem.from_matrices([[[2.0]]])
        assert sys1.alphabet_size == 1


class TestWordProduct:
    def test_empty_word_gives_identity(self, shear):
        assert np.array_equal(word_product(shear, ()), np.eye(2))

    def test_shear_word_01(self, shear):
        assert np.array_equal(word_product(shear, (0, 1)),
                              np.array([[2.0, 1.0], [1.0, 1.0]]))

    def test_scalar_word_001(self, scalars21):
        assert word_product(scalars21, (0, 0, 1))[0, 0] == 4.0

    def test_symbol_out_of_range(self, shear):
        with pytest.raises(InvalidWordError):
            word_product(shear, (0, 2))

    def test_concatenation_homomorphism(self, shear):
        rng = np.random.default_rng(5)
        for _ in range(50):
            n = int(rng.integers(0, 21))
            cut = int(rng.integers(0, n + 1))
            word = tuple(int(s) for s in rng.integers(0, 2, n))
            whole = word_product(shear, word)
            split = word_product(shear, word[:cut]) @ word_product(shear, word[cut:])
            scale = max(spectral_norm(whole), 1.0)
            assert spectral_norm(whole - split) <= 1e-12 * scale


class TestPartitionSum:
    def test_identity_collection_counts_words(self):
        system = MatrixSystem(np.stack([np.eye(3)] * 3))
        assert partition_sum(system, 1.7, 4) == pytest.approx(81.0, abs=1e-12)

    def test_scalars_square(self, scalars21):
        assert partition_sum(scalars21, 1.0, 2) == pytest.approx(9.0, abs=1e-12)

    def test_shear_n1_is_twice_golden(self, shear):
        value = partition_sum(shear, 1.0, 1)
        assert value == pytest.approx(2 * GOLDEN, abs=1e-12)
        assert value == pytest.approx(enumerate_partition_sum(shear, 1.0, 1), abs=1e-12)

    @pytest.mark.parametrize("t,n", [(0.5, 3), (1.0, 4), (2.0, 5)])
    def test_matches_enumeration_oracle(self, shear, t, n):
        assert partition_sum(shear, t, n) == pytest.approx(
            enumerate_partition_sum(shear, t, n), rel=1e-12)

    def test_budget_guard(self, shear):
        with pytest.raises(BudgetExceededError):
            partition_sum(shear, 1.0, 30, budget=1000)


class TestPressureEstimate:
    def test_scalars_exact_log3(self, scalars21):
        series = pressure_estimate(scalars21, 1.0, 8)
        assert np.allclose(series.per_n_estimates, math.log(3), atol=1e-12)
        assert np.allclose(series.diff_estimates, math.log(3), atol=1e-12)

    def test_identity_pair_gives_log2(self):
        system = MatrixSystem(np.stack([np.eye(2)] * 2))
        series = pressure_estimate(system, 3.0, 6)
        assert np.allclose(series.per_n_estimates, math.log(2), atol=1e-12)

    def test_shear_decreases_toward_log3(self, shear):
        series = pressure_estimate(shear, 1.0, 12)
        per = series.per_n_estimates
        assert per[1] > per[3] > per[7] > per[11]
        assert abs(per[11] - math.log(3)) < 0.1

    def test_subadditivity_exact(self, shear):
        series = pressure_estimate(shear, 1.5, 10)
        logs = series.log_values
        for m in range(1, 10):
            for n in range(1, 11 - m):
                assert logs[m + n - 1] <= logs[m - 1] + logs[n - 1] + 1e-9

    def test_subadditivity_random_nonnegative(self):
        rng = np.random.default_rng(11)
        from conftest import random_nonnegative_system

        for _ in range(5):
            system = random_nonnegative_system(rng, M=3, d=3)
            logs = pressure_estimate(system, 1.0, 6).log_values
            for m in range(1, 6):
                for n in range(1, 7 - m):
                    assert logs[m + n - 1] <= logs[m - 1] + logs[n - 1] + 1e-9


class TestEnumerationIdentity:
    """Sum over words of A_K must equal the matrix power of the sum."""

    @pytest.mark.parametrize("n", [1, 2, 4, 6])
    def test_powers_of_sum(self, shear, n):
        enumerated = sum(
            word_product(shear, w)
            for w in itertools.product(range(2), repeat=n))
        assert np.max(np.abs(enumerated - np.linalg.matrix_power(
            shear.matrix_sum(), n))) <= 1e-10

    def test_powers_of_sum_random(self):
        rng = np.random.default_rng(3)
        from conftest import random_nonnegative_system

        system = random_nonnegative_system(rng, M=3, d=2)
        enumerated = sum(word_product(system, w)
                         for w in itertools.product(range(3), repeat=4))
        assert np.max(np.abs(enumerated - np.linalg.matrix_power(
            system.matrix_sum(), 4))) <= 1e-10

    def test_stacked_products_match_direct(self, shear):
        stack = stacked_products(shear, 3)
        for idx, word in enumerate(itertools.product(range(2), repeat=3)):
            assert np.array_equal(stack[idx], word_product(shear, word))

    def test_stacked_products_reverse(self, shear):
        stack = stacked_products(shear, 3, reverse=True)
        for idx, word in enumerate(itertools.product(range(2), repeat=3)):
            assert np.array_equal(stack[idx],
                                  word_product(shear, tuple(reversed(word))))
