"""Even tensor-power lifts producing k-Gibbs states.

The k=2 lift acts on symmetric-matrix coordinates by B -> A^T B A (the
operator behind Kusuoka-type measures); the general even-k lift restricts
k-fold Kronecker powers to the symmetric subspace in the monomial basis.
Either way the lifted collection preserves a positive-semidefinite tensor
cone, so the cone-route construction applies with exponent k.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .cone_gibbs import ConeGibbsModel
from .errors import InvalidExponentError, NotIrreducibleError
from .spectral import leading_eigentriple
from .system import DEFAULT_BUDGET, MatrixSystem, spectral_norm, stacked_products
from .words import Word

ORIENTATIONS = ("reverse", "forward")

# Kronecker powers are applied vector-at-a-time; this caps d**k.
_TENSOR_POWER_LIMIT = 2**20


def symmetric_reps(d: int, k: int):
    """Sorted representative words for degree-k monomials over d variables.

    Lexicographic order; for d=2, k=2 this yields (0,0), (0,1), (1,1), i.e.
    the coordinates (b11, b12, b22) on symmetric matrices.
    """
    return list(itertools.combinations_with_replacement(range(d), k))


def rep_multiplicity(rep) -> int:
    """Number of words of the representative's type, k! / prod(counts!)."""
    k = len(rep)
    count = math.factorial(k)
    for sym in set(rep):
        count //= math.factorial(rep.count(sym))
    return count


def lifted_dimension(d: int, k: int) -> int:
    return math.comb(d + k - 1, k)


def _kron_power_apply(X: np.ndarray, vec: np.ndarray, d: int, k: int) -> np.ndarray:
    """Apply X^{tensor k} to a length d**k vector without forming the power."""
    T = vec.reshape((d,) * k)
    for axis in range(k):
        T = np.moveaxis(np.tensordot(X, T, axes=([1], [axis])), 0, axis)
    return T.reshape(-1)


def _flat_index(word, d: int) -> int:
    idx = 0
    for s in word:
        idx = idx * d + s
    return idx


def sym_power_matrix(X: np.ndarray, k: int) -> np.ndarray:
    """Matrix of X^{tensor k} restricted to the symmetric subspace.

    Basis vectors are the monomial symmetric tensors T_alpha (coefficient one
    on every word of the representative's type, no normalization); columns are
    read off at representative rows, which is exact because the symmetric
    subspace is invariant.
    """
    X = np.asarray(X, dtype=float)
    d = X.shape[0]
    if d**k > _TENSOR_POWER_LIMIT:
        raise InvalidExponentError(
            f"tensor power d**k = {d**k} exceeds the supported limit")
    reps = symmetric_reps(d, k)
    rep_rows = np.array([_flat_index(r, d) for r in reps])
    D = len(reps)
    out = np.empty((D, D))
    basis_vec = np.zeros(d**k)
    for col, rep in enumerate(reps):
        support = [_flat_index(w, d) for w in set(itertools.permutations(rep))]
        basis_vec[:] = 0.0
        basis_vec[support] = 1.0
        out[:, col] = _kron_power_apply(X, basis_vec, d, k)[rep_rows]
    return out


@dataclass
class LiftedSystem:
    """A matrix system lifted to the degree-k symmetric coordinate space.

    With the default reverse orientation the operator of symbol i represents
    (A_i^{tensor k})^* , so lifted word products equal the lift of the base
    product over the reversed word (the backwards order of the underlying
    adjoint construction). Forward orientation lifts the transposed system
    instead, aligning lifted products with forward base products.
    """

    base: MatrixSystem
    k: int
    operators: MatrixSystem
    orientation: str

    def __post_init__(self):
        if self.orientation not in ORIENTATIONS:
            raise ValueError(f"orientation must be one of {ORIENTATIONS}")
        self.reps = symmetric_reps(self.base.dim, self.k)
        self.multiplicities = np.array([rep_multiplicity(r) for r in self.reps],
                                       dtype=float)

    @property
    def lifted_dim(self) -> int:
        return self.operators.dim

    def lift_of(self, X) -> np.ndarray:
        """Lifted coordinate operator of a single base-space matrix."""
        mat = np.asarray(X, dtype=float)
        return sym_power_matrix(mat.T if self.orientation == "reverse" else mat,
                                self.k)

    def operator_norm(self, coord_matrix) -> float:
        """Norm of a lifted operator as a map on symmetric tensors.

        The monomial basis is not orthonormal, so the coordinate matrix is
        conjugated by the sqrt-multiplicity scaling before taking the spectral
        norm; this makes ||lift of X|| equal ||X||^k exactly.
        """
        scale = np.sqrt(self.multiplicities)
        return spectral_norm(coord_matrix * scale[:, None] / scale[None, :])

    def word_operator_norm(self, word: Word) -> float:
        P = np.eye(self.lifted_dim)
        for s in word:
            P = P @ self.operators.ops[s]
        return self.operator_norm(P)


def kusuoka_lift(system: MatrixSystem, orientation: str = "reverse") -> LiftedSystem:
    """The k=2 lift assembled directly on symmetric-matrix coordinates.

    Coordinates are (b_ii) and plain (b_ij, i<j) without sqrt(2) scaling; the
    operator of symbol i maps the coordinates of B to those of A_i^T B A_i
    (A_i B A_i^T for forward orientation). Kept independent of the Kronecker
    route so the two constructions can cross-check spectra.
    """
    if orientation not in ORIENTATIONS:
        raise ValueError(f"orientation must be one of {ORIENTATIONS}")
    d = system.dim
    reps = symmetric_reps(d, 2)
    basis = []
    for (i, j) in reps:
        B = np.zeros((d, d))
        B[i, j] += 1.0
        B[j, i] += 1.0
        if i == j:
            B[i, i] = 1.0
        basis.append(B)
    lifted = []
    for A in system.ops:
        cols = []
        for B in basis:
            C = A.T @ B @ A if orientation == "reverse" else A @ B @ A.T
            cols.append([C[i, j] for (i, j) in reps])
        lifted.append(np.array(cols).T)
    return LiftedSystem(base=system, k=2,
                        operators=MatrixSystem(np.stack(lifted)),
                        orientation=orientation)


def tensor_power_lift(system: MatrixSystem, k: int,
                      orientation: str = "reverse") -> LiftedSystem:
    """Even-k lift via Kronecker powers restricted to the symmetric subspace."""
    if k < 2 or k % 2 != 0:
        raise InvalidExponentError(
            f"tensor-power lifts need an even exponent k >= 2, got {k}")
    if orientation not in ORIENTATIONS:
        raise ValueError(f"orientation must be one of {ORIENTATIONS}")
    mats = []
    for A in system.ops:
        mats.append(sym_power_matrix(A.T if orientation == "reverse" else A, k))
    return LiftedSystem(base=system, k=k,
                        operators=MatrixSystem(np.stack(mats)),
                        orientation=orientation)


@dataclass
class LiftPositivityReport:
    """One-sided spanning test behind lift primitivity.

    A failing unit vector v certifies that sum over |I| = N of
    (A_I^* v)(A_I^* v)^T is singular at this N; success over all trials is
    probabilistic evidence only.
    """

    passed: bool
    gap_length: int
    trials: int
    witness: Optional[np.ndarray] = None

    @property
    def verdict(self) -> str:
        return "positive-at-confidence" if self.passed else "failed"


_RANK_TOL = 1e-10


def _spans_full_space(base: MatrixSystem, transposed_stack: np.ndarray,
                      vec: np.ndarray) -> bool:
    family = transposed_stack @ vec            # rows A_I^T v over all |I| = N
    if family.shape[0] < base.dim:
        return False
    svals = np.linalg.svd(family, compute_uv=False)
    if svals[0] == 0.0:
        return False
    return bool(svals[-1] > _RANK_TOL * svals[0])


def lift_positivity_test(lifted: LiftedSystem, N: int, trials: int = 64,
                         seed=0, budget: int = DEFAULT_BUDGET) -> LiftPositivityReport:
    """Check that {A_I^* v : |I| = N} spans the base space for sampled v.

    Basis vectors are tried first as a deterministic short-circuit for clear
    failures, then `trials` seeded unit vectors.
    """
    if N < 1 or trials < 1:
        raise ValueError("positivity test needs N >= 1 and trials >= 1")
    base = lifted.base
    stack = stacked_products(base, N, budget=budget)
    transposed = stack.transpose(0, 2, 1)
    for j in range(base.dim):
        vec = np.zeros(base.dim)
        vec[j] = 1.0
        if not _spans_full_space(base, transposed, vec):
            return LiftPositivityReport(False, N, trials, witness=vec)
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        vec = rng.normal(size=base.dim)
        vec /= np.linalg.norm(vec)
        if not _spans_full_space(base, transposed, vec):
            return LiftPositivityReport(False, N, trials, witness=vec)
    return LiftPositivityReport(True, N, trials)


def coords_to_symmetric(coords: np.ndarray, d: int, dual: bool = False) -> np.ndarray:
    """Symmetric matrix represented by k=2 coordinates.

    Primal coordinates weight the tensors E_ij + E_ji; dual coordinates halve
    the off-diagonals so that the coordinate pairing matches Hilbert-Schmidt.
    """
    out = np.zeros((d, d))
    for coord, (i, j) in zip(coords, symmetric_reps(d, 2)):
        if i == j:
            out[i, i] = coord
        else:
            val = coord / 2.0 if dual else coord
            out[i, j] = val
            out[j, i] = val
    return out


def _eigen_poly_values(coords: np.ndarray, lifted: LiftedSystem,
                       points: np.ndarray, with_multiplicity: bool) -> np.ndarray:
    """Evaluate the degree-k form encoded by eigenvector coordinates."""
    monomials = np.empty((len(lifted.reps), points.shape[0]))
    for idx, rep in enumerate(lifted.reps):
        vals = np.ones(points.shape[0])
        for sym in rep:
            vals = vals * points[:, sym]
        monomials[idx] = vals
    weights = coords * lifted.multiplicities if with_multiplicity else coords
    return weights @ monomials


def _cone_interior_sign(coords: np.ndarray, lifted: LiftedSystem,
                        points: np.ndarray, with_multiplicity: bool,
                        label: str) -> float:
    values = _eigen_poly_values(coords, lifted, points, with_multiplicity)
    scale = np.max(np.abs(values))
    if scale == 0.0:
        raise NotIrreducibleError(f"{label} eigentensor vanishes on test vectors")
    sign = np.sign(values[np.argmax(np.abs(values))])
    if np.any(sign * values < -1e-9 * scale):
        raise NotIrreducibleError(
            f"{label} eigentensor changes sign: lifted cone hypothesis failed")
    return float(sign)


def k_gibbs_measure(lifted: LiftedSystem, trials: int = 64, seed=0,
                    positivity_gap: Optional[int] = None,
                    budget: int = DEFAULT_BUDGET) -> ConeGibbsModel:
    """Cone-route Gibbs model with exponent k built from lifted eigendata.

    Verifies the positive-semidefinite tensor-cone hypotheses (spanning test
    plus cone-interior eigentensors) instead of entrywise positivity, then
    reuses the cone construction verbatim on the lifted operators. Gibbs
    ratios compare against base-product norms, ordered by the orientation.
    """
    gap = positivity_gap if positivity_gap is not None else max(lifted.base.dim, 1)
    report = lift_positivity_test(lifted, gap, trials=trials, seed=seed,
                                  budget=budget)
    if not report.passed:
        raise NotIrreducibleError(
            f"lift positivity failed at gap {gap}: witness {report.witness}")
    data = leading_eigentriple(lifted.operators.matrix_sum())

    d = lifted.base.dim
    rng = np.random.default_rng(seed)
    points = rng.normal(size=(max(trials, 32), d))
    points /= np.linalg.norm(points, axis=1, keepdims=True)
    points = np.concatenate([np.eye(d), points])
    sign_u = _cone_interior_sign(data.u, lifted, points, True, "right")
    if sign_u < 0:
        data.u = -data.u
        data.v = -data.v
    _cone_interior_sign(data.v, lifted, points, False, "left")
    if lifted.k == 2:
        # exact positive-definiteness on the matrix representations
        for coords, dual, label in ((data.u, False, "right"), (data.v, True, "left")):
            eigs = np.linalg.eigvalsh(coords_to_symmetric(coords, d, dual=dual))
            if eigs[0] < -1e-9 * max(eigs[-1], 0.0) or eigs[-1] <= 0:
                raise NotIrreducibleError(
                    f"{label} eigentensor is not positive semidefinite")

    return ConeGibbsModel(system=lifted.operators, spectral=data,
                          pressure=math.log(data.rho),
                          t_exponent=float(lifted.k),
                          norm_system=lifted.base,
                          norm_reverse=(lifted.orientation == "reverse"))
