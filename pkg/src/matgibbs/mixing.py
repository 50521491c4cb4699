"""Mixing diagnostics over any cylinder measure.

Bradley two-sided ratio scans, psi-coefficients restricted to finite cylinder
algebras, epsilon-independence sums, exact correlation decay for finite-window
observables, and the power-mean inequality chain behind the weak-Bernoulli
argument. Every joint mass is an explicit sum over interior words
``sum_{|K|=gap} mu(I K J)``; measures may provide a vectorized
``joint_mass_table`` but the summation is never replaced by a closed form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol, runtime_checkable

import numpy as np

from .system import DEFAULT_BUDGET, MatrixSystem, stacked_products
from .words import (
    Word,
    count_words,
    count_words_up_to,
    ensure_budget,
    iter_words,
    iter_words_up_to,
    word_index,
)

NOISE_FLOOR = 1e-13

_ZERO_MASS_TOL = 1e-300


@runtime_checkable
class CylinderMeasure(Protocol):
    """What mixing diagnostics need from a measure.

    Implemented by the cone/lift Gibbs models and the transfer-operator
    discretizations: `measure(word)` in [0, 1] with measure(()) == 1,
    `alphabet_size`, `pressure`, `t_exponent`, and `norm_of_product(word)`.
    """

    alphabet_size: int

    def measure(self, word: Word) -> float: ...

    def norm_of_product(self, word: Word) -> float: ...


def joint_mass_table(mu, lefts, rights, gap: int,
                     budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """Matrix of sum_{|K|=gap} mu(I K J) over I in lefts, J in rights."""
    if gap < 0:
        raise ValueError("interior gap must be >= 0")
    fast = getattr(mu, "joint_mass_table", None)
    if fast is not None:
        return np.asarray(fast(lefts, rights, gap, budget))
    M = mu.alphabet_size
    ensure_budget(len(lefts) * len(rights) * count_words(M, gap), budget)
    table = np.zeros((len(lefts), len(rights)))
    for a, left in enumerate(lefts):
        for K in iter_words(M, gap):
            middle = tuple(left) + K
            for b, right in enumerate(rights):
                table[a, b] += mu.measure(middle + tuple(right))
    return table


@dataclass
class BradleyReport:
    """Two-sided ratio bounds mu(I K^N J) / (mu(I) mu(J)) over a word family.

    C_lower <= 1 <= C_upper always, because the ratios average to one over
    the full partition at each block shape.
    """

    gap: int
    scan_length: int
    C_lower: float
    C_upper: float
    argmin: tuple
    argmax: tuple
    excluded_zero_mass: int


def bradley_scan(mu, N: int, L: int, budget: int = DEFAULT_BUDGET) -> BradleyReport:
    """Scan the mixing-inequality ratios over all 1 <= |I|, |J| <= L at gap N."""
    if N < 1 or L < 1:
        raise ValueError("bradley scan needs N >= 1 and L >= 1")
    n_outer = count_words_up_to(mu.alphabet_size, L, include_empty=False)
    ensure_budget(n_outer * n_outer * count_words(mu.alphabet_size, N), budget)
    words = list(iter_words_up_to(mu.alphabet_size, L))
    masses = np.array([mu.measure(w) for w in words])
    table = joint_mass_table(mu, words, words, N, budget)
    denom = np.outer(masses, masses)
    valid = denom > _ZERO_MASS_TOL
    ratios = np.where(valid, table / np.where(valid, denom, 1.0), np.nan)
    if not valid.any():
        raise ValueError("every cylinder pair has zero mass; nothing to scan")
    flat = np.where(valid, ratios, np.inf)
    lo = int(np.argmin(flat))
    flat = np.where(valid, ratios, -np.inf)
    hi = int(np.argmax(flat))
    n = len(words)
    return BradleyReport(
        gap=N, scan_length=L,
        C_lower=float(ratios[np.unravel_index(lo, ratios.shape)]),
        C_upper=float(ratios[np.unravel_index(hi, ratios.shape)]),
        argmin=(words[lo // n], words[lo % n]),
        argmax=(words[hi // n], words[hi % n]),
        excluded_zero_mass=int((~valid).sum()))


def psi_coefficients(mu, gaps, L: int, budget: int = DEFAULT_BUDGET) -> dict:
    """Per-gap (psi_star, psi_prime) restricted to length <= L cylinders.

    The supremum/infimum of the abstract coefficients runs over infinite
    sigma-algebras and is unobservable; the finite-algebra restriction is
    reported together with the scan length.
    """
    out = {}
    for gap in gaps:
        report = bradley_scan(mu, gap, L, budget)
        out[int(gap)] = (report.C_upper, report.C_lower)
    return out


def eps_independence(mu, s: int, r: int, gap: int,
                     budget: int = DEFAULT_BUDGET) -> float:
    """sum over |I|=s, |J|=r of |mu([I] cap sigma^{-gap}[J]) - mu(I) mu(J)|.

    The shifted block must clear the first one: gap >= s.
    """
    if s < 1 or r < 1:
        raise ValueError("block lengths must be >= 1")
    if gap < s:
        raise ValueError(f"gap {gap} must be >= left block length {s}")
    M = mu.alphabet_size
    lefts = list(iter_words(M, s))
    rights = list(iter_words(M, r))
    table = joint_mass_table(mu, lefts, rights, gap - s, budget)
    mass_l = np.array([mu.measure(w) for w in lefts])
    mass_r = np.array([mu.measure(w) for w in rights])
    return float(np.abs(table - np.outer(mass_l, mass_r)).sum())


@dataclass
class CylinderFunction:
    """Step function depending on coordinates 0 .. window-1.

    `values[k]` is the value on the k-th cylinder of the window length in
    lexicographic order; `theta` declares the Hoelder class used when quoting
    decay rates (any theta in (0,1) works for finite-window functions).
    """

    window: int
    values: np.ndarray
    theta: float = 0.5

    @classmethod
    def indicator(cls, word: Word, alphabet_size: int,
                  theta: float = 0.5) -> "CylinderFunction":
        vals = np.zeros(alphabet_size ** len(word))
        vals[word_index(word, alphabet_size)] = 1.0
        return cls(window=len(word), values=np.asarray(vals), theta=theta)

    @classmethod
    def constant(cls, value: float, alphabet_size: int,
                 theta: float = 0.5) -> "CylinderFunction":
        return cls(window=1, values=np.full(alphabet_size, float(value)),
                   theta=theta)

    def mean(self, mu) -> float:
        return float(sum(v * mu.measure(w) for v, w in
                         zip(self.values, iter_words(mu.alphabet_size, self.window))))


@dataclass
class DecayTable:
    """Exact correlation values per shift together with a fitted rate."""

    ns: np.ndarray
    values: np.ndarray
    fitted_rate: float
    theta_f: float
    theta_g: float


def fit_geometric_rate(ns, values, floor: float = NOISE_FLOOR) -> float:
    """Least-squares geometric rate of |values| ~ C rate^n, above the floor."""
    ns = np.asarray(ns, dtype=float)
    vals = np.abs(np.asarray(values, dtype=float))
    mask = vals > floor
    if mask.sum() < 2:
        return float("nan")
    slope = np.polyfit(ns[mask], np.log(vals[mask]), 1)[0]
    return float(np.exp(slope))


def correlation_decay(mu, f: CylinderFunction, g: CylinderFunction, n_list,
                      budget: int = DEFAULT_BUDGET) -> DecayTable:
    """| int f (g o sigma^n) dmu - int f dmu int g dmu | per n, computed exactly.

    Both observables are finite-window step functions, so every integral is a
    finite cylinder sum; overlapping windows (n < window of f) are resolved by
    merging compatible words.
    """
    M = mu.alphabet_size
    f_words = list(iter_words(M, f.window))
    g_words = list(iter_words(M, g.window))
    mean_f, mean_g = f.mean(mu), g.mean(mu)
    values = []
    for n in n_list:
        if n < 0:
            raise ValueError("shifts must be >= 0")
        if n >= f.window:
            table = joint_mass_table(mu, f_words, g_words, n - f.window, budget)
            cross = float(f.values @ table @ g.values)
        else:
            total_len = max(f.window, n + g.window)
            ensure_budget(count_words(M, total_len), budget)
            cross = 0.0
            for w in iter_words(M, total_len):
                fv = f.values[word_index(w[:f.window], M)]
                if fv == 0.0:
                    continue
                gv = g.values[word_index(w[n:n + g.window], M)]
                if gv == 0.0:
                    continue
                cross += fv * gv * mu.measure(w)
        values.append(cross - mean_f * mean_g)
    ns = np.asarray(list(n_list))
    values = np.asarray(values)
    return DecayTable(ns=ns, values=values,
                      fitted_rate=fit_geometric_rate(ns, values),
                      theta_f=f.theta, theta_g=g.theta)


def power_mean_chain_check(system: MatrixSystem, t: float, N: int, L: int,
                           budget: int = DEFAULT_BUDGET) -> float:
    """Minimal slack in the Hoelder-exponent step of the main inequality chain.

    For t > 1 verifies sum_K ||A_I A_K A_J||^t >= M^{-Nt/q} (sum_K ||.||)^t
    with 1/t + 1/q = 1, over all |I|, |J| <= L and |K| = N; for 0 < t <= 1 the
    subadditive variant (sum ||.||)^t <= sum ||.||^t. Returns the smallest
    left/right ratio, which must be >= 1 up to rounding.
    """
    if t <= 0:
        raise ValueError("the chain check needs t > 0")
    if N < 1 or L < 0:
        raise ValueError("need N >= 1 and L >= 0")
    M = system.alphabet_size
    n_outer = count_words_up_to(M, L, include_empty=True)
    ensure_budget(n_outer * n_outer * count_words(M, N), budget)
    interiors = stacked_products(system, N, budget=budget)
    outer = []
    for word in iter_words_up_to(M, L, include_empty=True):
        P = np.eye(system.dim)
        for s in word:
            P = P @ system.ops[s]
        outer.append(P)
    worst = np.inf
    for PL in outer:
        mids = np.einsum("ij,kjl->kil", PL, interiors)
        for PR in outer:
            prods = np.einsum("kil,lm->kim", mids, PR)
            norms = np.linalg.svd(prods, compute_uv=False)[:, 0]
            plain = float(norms.sum())
            if plain == 0.0:
                continue  # vanishing products: both sides are zero
            powered = float((norms**t).sum())
            if t > 1.0:
                ratio = powered / (float(M) ** (N * (1.0 - t)) * plain**t)
            else:
                ratio = powered / plain**t
            worst = min(worst, ratio)
    return float(worst)


@dataclass
class MixingReport:
    """Aggregated mixing diagnostics for one measure."""

    gap: int
    scan_length: int
    C_lower: float
    C_upper: float
    psi: dict = field(default_factory=dict)
    eps: dict = field(default_factory=dict)
    fitted_beta: float = float("nan")
    correlation_rate: float = float("nan")
    theta: float = 0.5
