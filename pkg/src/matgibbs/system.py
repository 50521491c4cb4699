"""Matrix systems, word products, partition sums, and the pressure series.

The matrix norm is fixed to the spectral norm (largest singular value)
throughout the package; every report states this choice.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import MatGibbsError
from .words import (
    Word,
    count_words,
    count_words_up_to,
    ensure_budget,
    validate_word,
)

DEFAULT_BUDGET = 20_000_000

MATRIX_NORM = "spectral"


def spectral_norm(mat) -> float:
    """Largest singular value, the canonical matrix norm for this package."""
    return float(np.linalg.norm(mat, 2))


@dataclass
class MatrixSystem:
    """An ordered collection of M real d x d matrices.

    `ops` has shape (M, d, d). Alphabet symbol i acts by `ops[i]`. No matrix
    may be the zero matrix, so a vanishing product norm always signals product
    degeneracy rather than degenerate input. Single-matrix systems (M=1) are
    permitted for degenerate checks; the CLI schema requires M >= 2.
    """

    ops: np.ndarray

    def __post_init__(self):
        ops = np.asarray(self.ops, dtype=float)
        if ops.ndim != 3 or ops.shape[1] != ops.shape[2]:
            raise ValueError(f"expected shape (M, d, d), got {ops.shape}")
        if ops.shape[0] < 1:
            raise ValueError("a matrix system needs at least one matrix")
        if not np.all(np.isfinite(ops)):
            raise ValueError("matrix entries must be finite")
        for i, A in enumerate(ops):
            if not np.any(A):
                raise ValueError(f"matrix {i} is the zero matrix")
        self.ops = ops

    @classmethod
    def from_matrices(cls, mats) -> "MatrixSystem":
        return cls(np.stack([np.asarray(m, dtype=float) for m in mats]))

    @property
    def alphabet_size(self) -> int:
        return self.ops.shape[0]

    @property
    def dim(self) -> int:
        return self.ops.shape[1]

    def matrix_sum(self) -> np.ndarray:
        return self.ops.sum(axis=0)


def word_product(system: MatrixSystem, word: Word) -> np.ndarray:
    """Product A_I = A_{i_0} A_{i_1} ... A_{i_{n-1}}; the empty word gives I."""
    validate_word(word, system.alphabet_size)
    out = np.eye(system.dim)
    for s in word:
        out = out @ system.ops[s]
    return out


def stacked_products(system: MatrixSystem, length: int,
                     budget: int = DEFAULT_BUDGET, reverse: bool = False) -> np.ndarray:
    """All length-n products as an (M**n, d, d) array in lexicographic word order.

    With reverse=True entry k holds A_{i_{n-1}} ... A_{i_0} for the k-th word.
    Memory is O(M**n d**2); prefer the depth-first sweeps for large n.
    """
    ensure_budget(count_words(system.alphabet_size, length), budget)
    d = system.dim
    out = np.eye(d)[None]
    for _ in range(length):
        if reverse:
            # prepend the new last symbol's matrix
            out = np.einsum("ail,klj->kaij", system.ops, out)
        else:
            out = np.einsum("kil,alj->kaij", out, system.ops)
        out = out.reshape(-1, d, d)
    return out


def _depth_first_norm_sweep(system: MatrixSystem, t: float, wanted, n_max: int,
                            budget: int) -> np.ndarray:
    """Accumulate Z_n = sum over |I| = n of ||A_I||^t for each wanted n <= n_max.

    Single depth-first pass with prefix products cached along the stack, so
    each of the sum(M**n) tree nodes costs one d x d multiply (plus one norm
    when its depth is wanted).
    """
    ensure_budget(count_words_up_to(system.alphabet_size, n_max, include_empty=False),
                  budget)
    M, d = system.alphabet_size, system.dim
    wanted = set(wanted)
    Z = np.zeros(n_max + 1)
    prefix = np.empty((n_max + 1, d, d))
    prefix[0] = np.eye(d)
    # iterative DFS in lexicographic order
    symbol_at = [0] * (n_max + 1)
    depth = 1
    symbol_at[1] = 0
    while depth >= 1:
        a = symbol_at[depth]
        if a >= M:
            depth -= 1
            if depth >= 1:
                symbol_at[depth] += 1
            continue
        np.matmul(prefix[depth - 1], system.ops[a], out=prefix[depth])
        if depth in wanted:
            Z[depth] += spectral_norm(prefix[depth]) ** t
        if depth < n_max:
            depth += 1
            symbol_at[depth] = 0
        else:
            symbol_at[depth] += 1
    return Z


def partition_sum(system: MatrixSystem, t: float, n: int,
                  budget: int = DEFAULT_BUDGET) -> float:
    """Z_n(t) = sum over all M**n words of ||A_I||^t (spectral norm)."""
    if n < 1:
        raise ValueError("partition sums need n >= 1")
    if t < 0:
        raise ValueError("partition sums need t >= 0")
    Z = _depth_first_norm_sweep(system, t, {n}, n, budget)[n]
    if not np.isfinite(Z):
        raise MatGibbsError(f"partition sum overflowed at n={n}, t={t}")
    return float(Z)


@dataclass
class PartitionSumSeries:
    """Both brute-force pressure estimators without extrapolation.

    `log_values[i]` is log Z_{i+1}; `per_n_estimates[i]` is log(Z_{i+1})/(i+1)
    (upper-biased by sub-multiplicativity); `diff_estimates[i]` is
    log Z_{i+2} - log Z_{i+1}.
    """

    t: float
    n_max: int
    log_values: np.ndarray
    per_n_estimates: np.ndarray = field(init=False)
    diff_estimates: np.ndarray = field(init=False)

    def __post_init__(self):
        ns = np.arange(1, self.n_max + 1)
        self.per_n_estimates = self.log_values / ns
        self.diff_estimates = np.diff(self.log_values)

    def per_n(self, n: int) -> float:
        return float(self.per_n_estimates[n - 1])


def pressure_estimate(system: MatrixSystem, t: float, n_max: int,
                      budget: int = DEFAULT_BUDGET) -> PartitionSumSeries:
    """Fill the partition-sum series for n = 1 .. n_max in one sweep."""
    if n_max < 2:
        raise ValueError("pressure estimates need n_max >= 2")
    if t < 0:
        raise ValueError("pressure estimates need t >= 0")
    Z = _depth_first_norm_sweep(system, t, range(1, n_max + 1), n_max, budget)
    if not np.all(np.isfinite(Z[1:])):
        raise MatGibbsError("partition sums overflowed; reduce n_max or t")
    return PartitionSumSeries(t=t, n_max=n_max, log_values=np.log(Z[1:]))
