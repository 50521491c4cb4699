import math

import numpy as np
import pytest

from matgibbs import (
    MatrixSystem,
    NonSimpleDominantError,
    NotConeNonnegativeError,
    collection_irreducibility_scan,
    collection_primitivity_scan,
    convergence_defect,
    leading_eigentriple,
    orthant_irreducible,
    orthant_primitive,
    spectral_norm,
    word_product,
)
from conftest import random_nonnegative_system


class TestLeadingEigentriple:
    def test_symmetric_pair_sum(self):
        data = leading_eigentriple([[2, 1], [1, 2]])
        assert data.rho == pytest.approx(3.0, abs=1e-12)
        assert data.gap_ratio == pytest.approx(1 / 3, abs=1e-12)
        # u proportional to (1,1), v scaled to <u,v>=1
        assert data.u[0] == pytest.approx(data.u[1], abs=1e-12)
        assert data.v[0] == pytest.approx(data.v[1], abs=1e-12)
        assert float(data.u @ data.v) == pytest.approx(1.0, abs=1e-12)

    def test_identity_multiplicity_rejected(self):
        with pytest.raises(NonSimpleDominantError):
            leading_eigentriple(np.eye(3))

    def test_scalar(self):
        data = leading_eigentriple([[3.0]])
        assert data.rho == 3.0
        assert float(data.u @ data.v) == 1.0
        assert data.gap_ratio == 0.0

    def test_rotation_rejected(self):
        # complex dominant pair
        with pytest.raises(NonSimpleDominantError):
            leading_eigentriple([[0, -1], [1, 0]])

    def test_negative_dominant_rejected(self):
        with pytest.raises(NonSimpleDominantError):
            leading_eigentriple([[-3, 0], [0, 1]])

    def test_residual_invariants(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            A = rng.random((4, 4)) + 0.1
            data = leading_eigentriple(A)
            rho, u, v = data.rho, data.u, data.v
            assert np.linalg.norm(A @ u - rho * u) <= 1e-10 * rho * np.linalg.norm(u)
            assert np.linalg.norm(A.T @ v - rho * v) <= 1e-10 * rho * np.linalg.norm(v)
            assert float(u @ v) == pytest.approx(1.0, abs=1e-12)
            assert np.min(u) > 0 and np.min(v) > 0


class TestConvergenceDefect:
    def test_exact_rate_symmetric(self):
        data = leading_eigentriple([[2, 1], [1, 2]])
        assert convergence_defect(data, 5) == pytest.approx((1 / 3) ** 5, rel=1e-10)

    def test_n0_is_distance_to_projector(self):
        data = leading_eigentriple([[2, 1], [1, 2]])
        assert convergence_defect(data, 0) == pytest.approx(
            spectral_norm(np.eye(2) - data.projector()), abs=1e-14)
        assert convergence_defect(data, 0) > 0

    def test_rank_one_projector_exact(self):
        u = np.array([1.0, 2.0])
        v = np.array([0.5, 0.25])  # <u,v> = 1
        data = leading_eigentriple(np.outer(u, v))
        for n in (1, 3, 7):
            assert convergence_defect(data, n) <= 1e-12

    def test_decay_bound_constant_fitted_at_2(self):
        # 2x2 positive matrices have real spectrum, so the defect is exactly
        # geometric and the n=2 fit gives the envelope; the noise floor covers
        # matrix-power roundoff once the defect is ~1e-14
        rng = np.random.default_rng(9)
        for _ in range(10):
            A = rng.random((2, 2)) + 0.05
            assert orthant_primitive(A)
            data = leading_eigentriple(A)
            rate = data.gap_ratio + 1e-3
            C = convergence_defect(data, 2) / rate**2
            for n in range(3, 31):
                assert convergence_defect(data, n) <= C * rate**n * (1 + 1e-6) + 1e-13

    def test_decay_bound_envelope_higher_dims(self):
        # complex second eigenvalues make the defect oscillate in phase, so
        # the envelope constant is fitted over a few small n instead of n=2
        rng = np.random.default_rng(9)
        for _ in range(10):
            d = int(rng.integers(3, 6))
            A = rng.random((d, d)) + 0.05
            data = leading_eigentriple(A)
            rate = data.gap_ratio + 1e-3
            C = max(convergence_defect(data, n) / rate**n for n in range(2, 7))
            for n in range(7, 31):
                assert convergence_defect(data, n) <= C * rate**n * (1 + 1e-6) + 1e-13


class TestOrthantTests:
    def test_swap_irreducible_not_primitive(self):
        swap = np.array([[0, 1], [1, 0]])
        assert orthant_irreducible(swap)
        assert not orthant_primitive(swap)

    def test_identity_reducible(self):
        assert not orthant_irreducible(np.eye(2))

    def test_positive_matrix_both(self):
        A = np.array([[2, 1], [1, 2]])
        assert orthant_irreducible(A)
        assert orthant_primitive(A)

    def test_fibonacci_primitive(self):
        assert orthant_primitive(np.array([[1, 1], [1, 0]]))

    def test_negative_entry_rejected(self):
        with pytest.raises(NotConeNonnegativeError):
            orthant_irreducible(np.array([[1, -1], [0, 1]]))

    def test_primitive_implies_irreducible_random(self):
        rng = np.random.default_rng(17)
        checked = 0
        while checked < 200:
            d = int(rng.integers(2, 7))
            A = rng.random((d, d)) * (rng.random((d, d)) < 0.4)
            if not np.any(A):
                continue
            checked += 1
            if orthant_primitive(A):
                assert orthant_irreducible(A)


class TestCollectionScans:
    def test_scalar_delta_is_partition_sum(self, scalars21):
        report = collection_primitivity_scan(scalars21, N=2, L=2)
        # scalars commute: the ratio is sum over |K| = N of the products
        assert report.delta == pytest.approx(9.0, rel=1e-12)
        assert report.passed

    def test_shear_passes(self, shear):
        report = collection_primitivity_scan(shear, N=1, L=3)
        assert report.passed and report.delta > 0

    def test_shear_cross_check_hand_L1(self, shear):
        report = collection_primitivity_scan(shear, N=1, L=1)
        # oracle: direct arithmetic over the 3x3 outer words including empty
        words = [(), (0,), (1,)]
        best = math.inf
        for I in words:
            for J in words:
                PI, PJ = word_product(shear, I), word_product(shear, J)
                total = sum(
                    spectral_norm(PI @ shear.ops[k] @ PJ) for k in range(2))
                best = min(best, total / (spectral_norm(PI) * spectral_norm(PJ)))
        assert report.delta == pytest.approx(best, rel=1e-12)

    def test_reducible_pair_fails(self, reducible_pair):
        report = collection_primitivity_scan(reducible_pair, N=1, L=1)
        assert report.delta <= 1e-12
        assert report.verdict == "failed"

    def test_irreducibility_scan_includes_empty_interior(self, reducible_pair):
        # with the empty word included the reducible pair still fails:
        # A_0 A_1 = 0 and the empty interior leaves the zero product in place
        report = collection_irreducibility_scan(reducible_pair, L=1)
        assert report.delta <= 1e-12

    def test_irreducibility_scan_shear(self, shear):
        report = collection_irreducibility_scan(shear, L=2)
        assert report.passed

    def test_irreducibility_scan_scalars(self, scalars21):
        # scalars commute, so the ratio is the plain sum over |K| <= 1:
        # 1 (empty word) + 2 + 1 = 4, independent of the outer pair
        report = collection_irreducibility_scan(scalars21, L=2)
        assert report.delta == pytest.approx(4.0, rel=1e-12)

    def test_transpose_symmetry(self, shear, reducible_pair):
        rng = np.random.default_rng(23)
        systems = [shear, reducible_pair]
        for _ in range(5):
            systems.append(random_nonnegative_system(rng, M=2, d=3, density=0.5))
        for system in systems:
            transposed = MatrixSystem(system.ops.transpose(0, 2, 1).copy())
            a = collection_irreducibility_scan(system, L=2)
            b = collection_irreducibility_scan(transposed, L=2)
            assert (a.delta > 1e-12) == (b.delta > 1e-12)

    def test_minimizer_is_reported(self, shear):
        report = collection_primitivity_scan(shear, N=1, L=2)
        PI = word_product(shear, report.argmin_left)
        PJ = word_product(shear, report.argmin_right)
        total = sum(spectral_norm(PI @ shear.ops[k] @ PJ) for k in range(2))
        assert report.delta == pytest.approx(
            total / (spectral_norm(PI) * spectral_norm(PJ)), rel=1e-12)
