import numpy as np
import pytest

from matgibbs import MatrixSystem, build_cone_gibbs


@pytest.fixture(scope="session")
def shear():
    """The standard test pair: upper/lower triangular shears."""
    return MatrixSystem.from_matrices([[[1, 1], [0, 1]], [[1, 0], [1, 1]]])


@pytest.fixture(scope="session")
def scalars21():
    """d=1 system (2, 1); its Gibbs state is Bernoulli(2/3, 1/3)."""
    return MatrixSystem.from_matrices([[[2.0]], [[1.0]]])


@pytest.fixture(scope="session")
def reducible_pair():
    """Diagonal projectors with no mixing between the axes."""
    return MatrixSystem.from_matrices([[[1, 0], [0, 0]], [[0, 0], [0, 1]]])


@pytest.fixture(scope="session")
def shear_model(shear):
    return build_cone_gibbs(shear)


@pytest.fixture(scope="session")
def scalar_model(scalars21):
    return build_cone_gibbs(scalars21)


def random_nonnegative_system(rng, M=2, d=2, density=1.0):
    """Entrywise nonnegative random system without zero matrices."""
    while True:
        ops = rng.random((M, d, d))
        if density < 1.0:
            ops = ops * (rng.random((M, d, d)) < density)
        if all(np.any(A) for A in ops):
            return MatrixSystem(ops)
