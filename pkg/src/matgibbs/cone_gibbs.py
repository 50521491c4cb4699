"""Cone-route construction of matrix Gibbs states.

Builds the measure mu[x_0 ... x_{n-1}] = rho^{-n} <A_{x_0} ... A_{x_{n-1}} u, v>
from the dominant eigendata of A = sum_i A_i, and runs its Gibbs-inequality,
Kolmogorov-consistency, variational, and sampling diagnostics. The same model
class carries the lifted systems of :mod:`matgibbs.tensor_lift`, whose Gibbs
ratios compare against base-system product norms raised to the lift exponent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotConeNonnegativeError, NotIrreducibleError
from .spectral import SpectralData, leading_eigentriple, orthant_irreducible
from .system import DEFAULT_BUDGET, MatrixSystem, spectral_norm, stacked_products
from .words import (
    Word,
    count_words,
    count_words_up_to,
    ensure_budget,
    validate_word,
)


@dataclass
class ConeGibbsModel:
    """A matrix Gibbs state presented through cone eigendata.

    `system` holds the matrices that generate cylinder masses (base matrices
    for the orthant route, lifted operators for tensor-power lifts).
    `norm_system` holds the matrices whose word-product norms the Gibbs
    inequality compares against, with `norm_reverse` fixing the word order
    (lifted models with the backwards product convention set it to True).
    `t_exponent` is 1 for raw nonnegative systems and k for lifted systems.
    """

    system: MatrixSystem
    spectral: SpectralData
    pressure: float
    t_exponent: float
    norm_system: MatrixSystem
    norm_reverse: bool = False

    @property
    def alphabet_size(self) -> int:
        return self.system.alphabet_size

    @property
    def rho(self) -> float:
        return self.spectral.rho

    def measure(self, word: Word) -> float:
        """Exact cylinder mass rho^{-n} <A_I u, v>; empty word gives 1."""
        validate_word(word, self.alphabet_size)
        vec = self.spectral.u
        for s in reversed(word):
            vec = self.system.ops[s] @ vec
        return float(self.spectral.v @ vec) * self.rho ** (-len(word))

    def norm_of_product(self, word: Word) -> float:
        """||A_I|| for the word, in the model's norm convention."""
        validate_word(word, self.norm_system.alphabet_size)
        symbols = reversed(word) if self.norm_reverse else word
        P = np.eye(self.norm_system.dim)
        for s in symbols:
            P = P @ self.norm_system.ops[s]
        return spectral_norm(P)

    def joint_mass_table(self, lefts, rights, gap: int,
                         budget: int = DEFAULT_BUDGET) -> np.ndarray:
        """Matrix of sum over |K| = gap of mu(I K J) for I in lefts, J in rights.

        Enumerates every interior word through stacked prefix products; the
        closed form via powers of sum_i A_i lives in :meth:`shift_joint` and
        is kept independent so the two routes can cross-check each other.
        """
        interiors = stacked_products(self.system, gap, budget=budget)
        rows = np.stack([
            self._left_vector(word) for word in lefts
        ])
        cols = np.stack([
            self._right_vector(word) for word in rights
        ])
        table = np.einsum("ai,kij,bj->ab", rows, interiors, cols)
        return table * self.rho ** (-gap)

    def joint_mass(self, left: Word, right: Word, gap: int,
                   budget: int = DEFAULT_BUDGET) -> float:
        return float(self.joint_mass_table([left], [right], gap, budget)[0, 0])

    def shift_joint(self, left: Word, right: Word, k: int) -> float:
        """mu([I] cap sigma^{-k}[J]) for k >= |I|, via the matrix power of the sum.

        Exact for arbitrary k, which makes long-range mixing averages feasible
        where interior enumeration is not.
        """
        if k < len(left):
            raise ValueError("shift must clear the left cylinder: k >= |I|")
        power = np.linalg.matrix_power(self.system.matrix_sum() / self.rho,
                                       k - len(left))
        return float(self._left_vector(left) @ power @ self._right_vector(right))

    def _left_vector(self, word: Word) -> np.ndarray:
        validate_word(word, self.alphabet_size)
        vec = self.spectral.v
        for s in word:
            vec = vec @ self.system.ops[s]
        return vec * self.rho ** (-len(word))

    def _right_vector(self, word: Word) -> np.ndarray:
        validate_word(word, self.alphabet_size)
        vec = self.spectral.u
        for s in reversed(word):
            vec = self.system.ops[s] @ vec
        return vec * self.rho ** (-len(word))


def build_cone_gibbs(system: MatrixSystem) -> ConeGibbsModel:
    """Construct the orthant-route Gibbs state for entrywise nonnegative matrices.

    Requires every matrix entrywise nonnegative and A = sum_i A_i orthant
    irreducible; the pressure is log rho(A).
    """
    if np.any(system.ops < 0):
        raise NotConeNonnegativeError(
            "cone route needs entrywise nonnegative matrices; "
            "use a tensor-power lift for general systems")
    A = system.matrix_sum()
    if not orthant_irreducible(A):
        raise NotIrreducibleError("sum of the matrices is not orthant irreducible")
    data = leading_eigentriple(A)
    if np.min(data.u) <= 0 or np.min(data.v) <= 0:
        raise NotIrreducibleError("dominant eigenvectors are not strictly positive")
    return ConeGibbsModel(system=system, spectral=data,
                          pressure=math.log(data.rho), t_exponent=1.0,
                          norm_system=system, norm_reverse=False)


def cylinder_measure(model: ConeGibbsModel, word: Word) -> float:
    return model.measure(word)


def consistency_check(model: ConeGibbsModel, L: int,
                      budget: int = DEFAULT_BUDGET) -> float:
    """Max Kolmogorov defect over |w| <= L, extending on either side.

    Returns max over words of |sum_i mu[iw] - mu[w]| and |sum_i mu[wi] - mu[w]|.
    """
    if L < 0:
        raise ValueError("consistency check needs L >= 0")
    M, d = model.alphabet_size, model.system.dim
    ensure_budget(count_words_up_to(M, L + 1), budget)
    rho, u, v = model.rho, model.spectral.u, model.spectral.v
    rows = np.einsum("i,aij->aj", v, model.system.ops)   # v^T A_a
    cols = np.einsum("aij,j->ai", model.system.ops, u)   # A_a u
    worst = 0.0
    # iterative depth-first walk with cached prefix products
    prefix = np.empty((L + 1, d, d))
    prefix[0] = np.eye(d)
    symbol_at = [0] * (L + 1)
    depth = 0
    while True:
        P = prefix[depth]
        scale = rho ** (-depth)
        Pu = P @ u
        mass = float(v @ Pu) * scale
        grow_left = float((rows @ Pu).sum()) * scale / rho
        grow_right = float((v @ (P @ cols.T)).sum()) * scale / rho
        worst = max(worst, abs(grow_left - mass), abs(grow_right - mass))
        if depth < L:
            depth += 1
            symbol_at[depth] = 0
            np.matmul(prefix[depth - 1], model.system.ops[0], out=prefix[depth])
            continue
        while depth >= 1:
            symbol_at[depth] += 1
            if symbol_at[depth] < M:
                np.matmul(prefix[depth - 1], model.system.ops[symbol_at[depth]],
                          out=prefix[depth])
                break
            depth -= 1
        else:
            break
    return worst


@dataclass
class GibbsRatioReport:
    """Observed bounds of mu[I] / (e^{-nP} ||A_I||^t) over 1 <= |I| <= L."""

    c_min: float
    C_max: float
    argmin_word: Word
    argmax_word: Word
    scan_length: int
    t_exponent: float

    @property
    def spread(self) -> float:
        return self.C_max / self.c_min


def gibbs_ratio_scan(model: ConeGibbsModel, L: int,
                     budget: int = DEFAULT_BUDGET) -> GibbsRatioReport:
    """Scan the Gibbs sandwich ratios for every word of length 1 .. L."""
    if L < 1:
        raise ValueError("ratio scan needs L >= 1")
    M = model.alphabet_size
    ensure_budget(count_words_up_to(M, L, include_empty=False), budget)
    rho, u, v = model.rho, model.spectral.u, model.spectral.v
    t = model.t_exponent
    same_products = model.norm_system is model.system and not model.norm_reverse

    c_min, C_max = np.inf, 0.0
    arg_min = arg_max = ()
    word = []
    meas_stack = [np.eye(model.system.dim)]
    norm_stack = [np.eye(model.norm_system.dim)]

    def visit():
        nonlocal c_min, C_max, arg_min, arg_max
        P = meas_stack[-1]
        Q = P if same_products else norm_stack[-1]
        norm_t = spectral_norm(Q) ** t
        if norm_t == 0.0:
            raise ArithmeticError(
                f"degenerate product: zero norm at word {tuple(word)}")
        # e^{nP} cancels rho^{-n}, so the ratio needs no large powers
        ratio = float(v @ P @ u) / norm_t
        if ratio < c_min:
            c_min, arg_min = ratio, tuple(word)
        if ratio > C_max:
            C_max, arg_max = ratio, tuple(word)

    def descend():
        for a in range(M):
            word.append(a)
            meas_stack.append(meas_stack[-1] @ model.system.ops[a])
            if not same_products:
                B = model.norm_system.ops[a]
                prev = norm_stack[-1]
                norm_stack.append(B @ prev if model.norm_reverse else prev @ B)
            visit()
            if len(word) < L:
                descend()
            word.pop()
            meas_stack.pop()
            if not same_products:
                norm_stack.pop()

    descend()
    return GibbsRatioReport(c_min=float(c_min), C_max=float(C_max),
                            argmin_word=arg_min, argmax_word=arg_max,
                            scan_length=L, t_exponent=t)


@dataclass
class VariationalReport:
    """Finite-n entropy / Lyapunov sums against the variational principle.

    entropy_n = -(1/n) sum_{|I|=n} mu[I] log mu[I]   (0 log 0 = 0),
    lyapunov_n = (1/n) sum_{|I|=n} mu[I] log ||A_I||,
    defect_n = |entropy_n + t lyapunov_n - P|. The defect shrinks with n but
    the finite-n rate is not pinned by theory; only trends are asserted.
    """

    n: int
    entropy_n: float
    lyapunov_n: float
    defect_n: float
    pressure: float
    t_exponent: float


def variational_check(model: ConeGibbsModel, n: int,
                      budget: int = DEFAULT_BUDGET) -> VariationalReport:
    if n < 1:
        raise ValueError("variational check needs n >= 1")
    M = model.alphabet_size
    ensure_budget(count_words(M, n), budget)
    stack = stacked_products(model.system, n, budget=budget)
    masses = np.einsum("i,kij,j->k", model.spectral.v, stack,
                       model.spectral.u) * model.rho ** (-n)
    same_products = model.norm_system is model.system and not model.norm_reverse
    if same_products:
        norm_stack = stack
    else:
        norm_stack = stacked_products(model.norm_system, n, budget=budget,
                                      reverse=model.norm_reverse)
    norms = np.linalg.svd(norm_stack, compute_uv=False)[:, 0]

    positive = masses > 0.0
    entropy = -float(masses[positive] @ np.log(masses[positive])) / n
    lyap = float(masses[positive] @ np.log(norms[positive])) / n
    defect = abs(entropy + model.t_exponent * lyap - model.pressure)
    return VariationalReport(n=n, entropy_n=entropy, lyapunov_n=lyap,
                             defect_n=defect, pressure=model.pressure,
                             t_exponent=model.t_exponent)


def sample_path(model: ConeGibbsModel, length: int, seed=0) -> Word:
    """Draw a word with the exact cylinder law, symbol by symbol.

    Conditional weights mu[wa] / mu[w] are renormalized to sum to one at each
    step (they already do to within eigen-residuals; renormalizing prevents
    drift over long paths). `seed` may be an int or a numpy Generator.
    """
    if length < 1:
        raise ValueError("paths need length >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    rho, u, v = model.rho, model.spectral.u, model.spectral.v
    cols = np.einsum("aij,j->ai", model.system.ops, u)  # A_a u
    q = v.copy()
    out = []
    for _ in range(length):
        weights = cols @ q / (rho * float(q @ u))
        weights = np.clip(weights, 0.0, None)
        weights /= weights.sum()
        a = int(rng.choice(model.alphabet_size, p=weights))
        out.append(a)
        q = q @ model.system.ops[a]
        q /= float(q @ u)
    return tuple(out)
