"""Finite-dimensional Perron-Frobenius engine.

Dominant eigendata with bi-orthogonal normalization, orthant irreducibility
and primitivity tests, rank-one projector convergence defects, and brute-force
scans of the collection-level inequalities
``sum_K ||A_I A_K A_J|| >= delta ||A_I|| ||A_J||``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NonSimpleDominantError, NotConeNonnegativeError
from .system import DEFAULT_BUDGET, MatrixSystem, spectral_norm, stacked_products
from .words import Word, count_words, count_words_up_to, ensure_budget, iter_words_up_to

SIMPLE_DOMINANT_TOL = 1e-8

VERDICT_POSITIVE = "certified-positive-at-scale"
VERDICT_FAILED = "failed"

_DELTA_ZERO_TOL = 1e-12


@dataclass
class SpectralData:
    """Dominant eigentriple (rho, u, v) with <u, v> = 1 and gap data.

    `u` is the right eigenvector (sign-fixed so its largest-magnitude entry
    is positive), `v` the left eigenvector scaled to make the pairing one.
    `gap_ratio` is |lambda_2| / rho over the full eigenvalue list (0 for d=1).
    """

    matrix: np.ndarray
    rho: float
    u: np.ndarray
    v: np.ndarray
    gap_ratio: float
    eigenvalues: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def projector(self) -> np.ndarray:
        return np.outer(self.u, self.v)

    def projector_defect(self, n: int) -> float:
        """|| rho^{-n} A^n - u v^T || in spectral norm."""
        if n < 0:
            raise ValueError("defects need n >= 0")
        power = np.linalg.matrix_power(self.matrix / self.rho, n)
        value = spectral_norm(power - self.projector())
        if not np.isfinite(value):
            raise ArithmeticError(f"matrix power overflowed at n={n}")
        return value


def leading_eigentriple(A, tol: float = SIMPLE_DOMINANT_TOL) -> SpectralData:
    """Dominant eigendata of a cone-nonnegative matrix by dense decomposition.

    Raises NonSimpleDominantError when the top eigenvalue is complex, not
    positive, or within relative tolerance `tol` of the second modulus; either
    way the cone hypothesis needed downstream has failed.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim == 0:
        A = A.reshape(1, 1)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("expected a square matrix")
    d = A.shape[0]
    if d == 1:
        rho = float(A[0, 0])
        if rho <= 0:
            raise NonSimpleDominantError(f"dominant eigenvalue {rho} is not positive")
        return SpectralData(matrix=A, rho=rho, u=np.ones(1), v=np.ones(1),
                            gap_ratio=0.0, eigenvalues=np.array([rho + 0j]))

    w, vl, vr = scipy.linalg.eig(A, left=True, right=True)
    order = np.argsort(-np.abs(w))
    w, vl, vr = w[order], vl[:, order], vr[:, order]
    lam = w[0]
    mod = np.abs(lam)
    if mod == 0.0:
        raise NonSimpleDominantError("matrix is nilpotent: zero spectral radius")
    if abs(lam.imag) > tol * mod or lam.real <= 0:
        raise NonSimpleDominantError(
            f"dominant eigenvalue {lam} is not real positive"
        )
    separation = (mod - np.abs(w[1])) / mod
    if separation <= tol:
        raise NonSimpleDominantError(
            f"dominant eigenvalue not simple: relative separation {separation:.3e}"
        )
    u = np.real(vr[:, 0])
    left = np.real(vl[:, 0])
    if u[np.argmax(np.abs(u))] < 0:
        u = -u
    pairing = float(u @ left)
    if pairing == 0.0:
        raise NonSimpleDominantError("degenerate left/right eigenvector pairing")
    v = left / pairing
    return SpectralData(matrix=A, rho=float(lam.real), u=u, v=v,
                        gap_ratio=float(np.abs(w[1]) / mod), eigenvalues=w)


def convergence_defect(data: SpectralData, n: int) -> float:
    """|| rho^{-n} A^n - u v^T ||; decays like gap_ratio^n for primitive A."""
    return data.projector_defect(n)


def _require_nonnegative(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if np.any(A < 0):
        raise NotConeNonnegativeError("matrix has a negative entry")
    return A


def _bool_matmul(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    return (X.astype(np.int64) @ Y.astype(np.int64)) > 0


def orthant_irreducible(A) -> bool:
    """True iff (I + A)^(d-1) is entrywise strictly positive."""
    A = _require_nonnegative(A)
    d = A.shape[0]
    pattern = (A > 0) | np.eye(d, dtype=bool)
    power = np.eye(d, dtype=bool)
    for _ in range(d - 1):
        power = _bool_matmul(power, pattern)
    return bool(power.all())


def orthant_primitive(A) -> bool:
    """True iff A^m is entrywise positive for some m <= (d-1)^2 + 1.

    Wielandt's exponent bound makes the test terminating and exact on the
    orthant.
    """
    A = _require_nonnegative(A)
    d = A.shape[0]
    pattern = A > 0
    power = pattern
    for _ in range((d - 1) ** 2 + 1):
        if power.all():
            return True
        power = _bool_matmul(power, pattern)
    return bool(power.all())


@dataclass
class PrimitivityReport:
    """Outcome of a brute-force scan of the primitivity-type inequality.

    `gap_length` is the interior word length N (the dimension d for the
    irreducibility variant, where K ranges over all |K| <= d including the
    empty word); `delta` the smallest observed ratio
    sum_K ||A_I A_K A_J|| / (||A_I|| ||A_J||) over the scanned words, and
    `argmin_left`/`argmin_right` the minimizing pair.
    """

    gap_length: int
    delta: float
    scanned_length: int
    verdict: str
    argmin_left: Word
    argmin_right: Word

    @property
    def passed(self) -> bool:
        return self.verdict == VERDICT_POSITIVE


def _ratio_scan(system: MatrixSystem, interiors: np.ndarray, L: int,
                budget: int, gap_length: int) -> PrimitivityReport:
    M = system.alphabet_size
    n_outer = count_words_up_to(M, L, include_empty=True)
    ensure_budget(n_outer * n_outer * interiors.shape[0], budget)
    outer = []
    for word in iter_words_up_to(M, L, include_empty=True):
        P = np.eye(system.dim)
        for s in word:
            P = P @ system.ops[s]
        outer.append((word, P, spectral_norm(P)))

    best = np.inf
    arg = ((), ())
    for left, PL, nL in outer:
        if nL == 0.0:
            continue
        mids = np.einsum("ij,kjl->kil", PL, interiors)
        for right, PR, nR in outer:
            if nR == 0.0:
                continue
            prods = np.einsum("kil,lm->kim", mids, PR)
            total = float(np.linalg.svd(prods, compute_uv=False)[:, 0].sum())
            ratio = total / (nL * nR)
            if ratio < best:
                best, arg = ratio, (left, right)
    verdict = VERDICT_POSITIVE if best > _DELTA_ZERO_TOL else VERDICT_FAILED
    return PrimitivityReport(gap_length=gap_length, delta=float(best),
                             scanned_length=L, verdict=verdict,
                             argmin_left=arg[0], argmin_right=arg[1])


def collection_primitivity_scan(system: MatrixSystem, N: int, L: int,
                                budget: int = DEFAULT_BUDGET) -> PrimitivityReport:
    """Smallest ratio sum_{|K|=N} ||A_I A_K A_J|| / (||A_I|| ||A_J||), |I|,|J| <= L."""
    if N < 1 or L < 1:
        raise ValueError("scan needs N >= 1 and L >= 1")
    interiors = stacked_products(system, N, budget=budget)
    return _ratio_scan(system, interiors, L, budget, gap_length=N)


def collection_irreducibility_scan(system: MatrixSystem, L: int,
                                   budget: int = DEFAULT_BUDGET) -> PrimitivityReport:
    """Same scan with K ranging over all words |K| <= d, empty word included."""
    if L < 1:
        raise ValueError("scan needs L >= 1")
    d = system.dim
    ensure_budget(count_words_up_to(system.alphabet_size, d), budget)
    interiors = np.concatenate(
        [stacked_products(system, n, budget=budget) for n in range(d + 1)])
    return _ratio_scan(system, interiors, L, budget, gap_length=d)
