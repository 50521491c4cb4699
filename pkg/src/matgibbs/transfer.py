"""Discretized transfer operators on real projective space.

Assembles the weighted composition operator
``L_t f(u) = sum_i ||A_i u / ||u|| ||^t f(A_i u bar)`` on a finite grid with
nonnegative interpolation stencils, solves the dominant eigendata by power
iteration, and exposes cylinder measures for arbitrary t > 0 together with
spectral-gap, Hoelder-regularity, contraction, and proximality diagnostics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.sparse

from .errors import (
    CheckFailedError,
    DimensionBudgetError,
    NotInvertibleError,
)
from .system import DEFAULT_BUDGET, MatrixSystem, spectral_norm, word_product
from .words import Word, count_words_up_to, ensure_budget, iter_words, validate_word

MAX_GRID_DIM = 8

_SNAP_TOL = 1e-12


def projective_distance(u, w) -> float:
    """d(u bar, w bar) = min(||u - w||, ||u + w||) over unit representatives."""
    u = np.asarray(u, dtype=float)
    w = np.asarray(w, dtype=float)
    u = u / np.linalg.norm(u)
    w = w / np.linalg.norm(w)
    return float(np.sqrt(max(2.0 - 2.0 * abs(float(u @ w)), 0.0)))


@dataclass
class ProjectiveGrid:
    """R unit vectors with antipodal identification and uniform weights."""

    dim: int
    resolution: int
    points: np.ndarray
    weights: np.ndarray
    _pairwise: Optional[np.ndarray] = field(default=None, repr=False)

    def pairwise_distances(self) -> np.ndarray:
        if self._pairwise is None:
            gram = np.abs(self.points @ self.points.T)
            self._pairwise = np.sqrt(np.clip(2.0 - 2.0 * gram, 0.0, None))
        return self._pairwise

    def stencil(self, vecs: np.ndarray):
        """Interpolation indices and nonnegative weights for unit row vectors.

        d=2 uses linear interpolation in angle; d>=3 inverse-distance weights
        over the 4 nearest grid points. Exact grid hits snap to a single
        point, so grid-preserving maps stay exactly representable.
        """
        R = self.resolution
        if self.dim == 2:
            ang = np.mod(np.arctan2(vecs[:, 1], vecs[:, 0]), np.pi)
            pos = ang * R / np.pi
            base = np.floor(pos)
            frac = pos - base
            j0 = base.astype(int) % R
            idx = np.stack([j0, (j0 + 1) % R], axis=1)
            wts = np.stack([1.0 - frac, frac], axis=1)
            snap = frac < _SNAP_TOL
            wts[snap] = np.array([1.0, 0.0])
            snap_hi = frac > 1.0 - _SNAP_TOL
            wts[snap_hi] = np.array([0.0, 1.0])
            return idx, wts
        gram = np.abs(vecs @ self.points.T)
        dist = np.sqrt(np.clip(2.0 - 2.0 * gram, 0.0, None))
        idx = np.argpartition(dist, 3, axis=1)[:, :4]
        near = np.take_along_axis(dist, idx, axis=1)
        order = np.argsort(near, axis=1)
        idx = np.take_along_axis(idx, order, axis=1)
        near = np.take_along_axis(near, order, axis=1)
        exact = near[:, 0] < _SNAP_TOL
        near[exact] = 1.0  # placeholder; these rows snap to one point below
        wts = (1.0 / near)
        wts /= wts.sum(axis=1, keepdims=True)
        wts[exact] = 0.0
        wts[exact, 0] = 1.0
        return idx, wts

    def interpolate(self, values: np.ndarray, vecs: np.ndarray) -> np.ndarray:
        idx, wts = self.stencil(vecs)
        return (values[idx] * wts).sum(axis=1)


def build_grid(d: int, R: int) -> ProjectiveGrid:
    """Grid on RP^{d-1}: equal angles for d=2, hemisphere samples for d >= 3.

    d=3 uses the Fibonacci spiral on the upper hemisphere; 4 <= d <= 8 a
    deterministic scrambled-Sobol Gaussian sample. Accuracy-sensitive runs
    should use R >= 8; small R is allowed for formula-level checks.
    """
    if d < 2:
        raise ValueError("projective grids need d >= 2; scalar systems use the cone route")
    if d > MAX_GRID_DIM:
        raise DimensionBudgetError(f"projective grids support d <= {MAX_GRID_DIM}")
    if R < 2:
        raise ValueError("grids need at least 2 points")
    if d == 2:
        ang = np.arange(R) * np.pi / R
        pts = np.stack([np.cos(ang), np.sin(ang)], axis=1)
    elif d == 3:
        j = np.arange(R)
        z = (j + 0.5) / R
        r = np.sqrt(1.0 - z * z)
        theta = j * math.pi * (3.0 - math.sqrt(5.0))
        pts = np.stack([r * np.cos(theta), r * np.sin(theta), z], axis=1)
    else:
        from scipy.stats import qmc, norm

        sampler = qmc.Sobol(d, scramble=True, seed=20240211)
        raw = sampler.random(R)
        pts = norm.ppf(np.clip(raw, 1e-12, 1.0 - 1e-12))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        flip = pts[:, -1] < 0
        pts[flip] *= -1.0
    return ProjectiveGrid(dim=d, resolution=R, points=pts,
                          weights=np.full(R, 1.0 / R))


@dataclass
class TransferDiscretization:
    """Solved discrete transfer operator with its eigendata.

    `operator` is the R x R nonnegative stencil matrix; `h` the positive right
    eigenfunction values; `nu` the nonnegative stationary weights normalized
    to sum(h * nu) = 1; `gap_ratio` the deflated-power estimate of
    |lambda_2| / rho.
    """

    system: MatrixSystem
    t: float
    grid: ProjectiveGrid
    operator: scipy.sparse.csr_matrix
    rho: float
    h: np.ndarray
    nu: np.ndarray
    gap_ratio: float
    residual_h: float
    residual_nu: float

    @property
    def alphabet_size(self) -> int:
        return self.system.alphabet_size

    @property
    def pressure(self) -> float:
        return math.log(self.rho)

    @property
    def t_exponent(self) -> float:
        return self.t

    def measure(self, word: Word) -> float:
        return cylinder_measure_t(self, word)

    def norm_of_product(self, word: Word) -> float:
        return spectral_norm(word_product(self.system, word))

    def integrand(self, word: Word):
        """Grid values of u -> ||A_I u||^t h(A_I u bar) for the forward product."""
        P = word_product(self.system, word)
        images = self.grid.points @ P.T
        norms = np.linalg.norm(images, axis=1)
        hvals = self.grid.interpolate(self.h, images / norms[:, None])
        return norms**self.t * hvals


def _power_iteration(op, start: np.ndarray, tol: float, max_iter: int):
    x = start / np.linalg.norm(start)
    lam = 0.0
    for _ in range(max_iter):
        y = op @ x
        lam = float(x @ y)
        if np.max(np.abs(y - lam * x)) <= tol * abs(lam):
            break
        norm = np.linalg.norm(y)
        if norm == 0.0:
            raise CheckFailedError("power iteration collapsed to zero")
        x = y / norm
    residual = float(np.max(np.abs(op @ x - lam * x)) / abs(lam))
    return lam, x, residual


def _gap_estimate(operator, rho: float, h: np.ndarray, nu: np.ndarray,
                  iters: int = 80, burn: int = 20) -> float:
    """|lambda_2| / rho via power iteration on the rank-one deflation."""
    rng = np.random.default_rng(7)
    x = rng.standard_normal(h.shape[0])
    x -= h * float(nu @ x)
    norm = np.linalg.norm(x)
    if norm == 0.0:
        return 0.0
    x /= norm
    logs = []
    for k in range(iters):
        y = operator @ x / rho
        y -= h * float(nu @ y)
        norm = np.linalg.norm(y)
        if norm < 1e-280:
            return 0.0
        if k >= burn:
            logs.append(math.log(norm))
        x = y / norm
    if not logs:
        return 0.0
    return float(min(math.exp(np.mean(logs)), 1.0))


def assemble_transfer(system: MatrixSystem, t: float, grid: ProjectiveGrid,
                      tol: float = 1e-10, max_iter: int = 100_000,
                      ) -> TransferDiscretization:
    """Assemble and solve the discrete transfer operator at exponent t.

    Every matrix must be genuinely invertible (|det| above 1e-12 relative to
    ||A||^d); the assembled matrix is entrywise nonnegative by construction.
    """
    if t < 0:
        raise ValueError("transfer operators need t >= 0")
    if system.dim != grid.dim:
        raise ValueError("system dimension does not match the grid")
    for i, A in enumerate(system.ops):
        if abs(np.linalg.det(A)) <= 1e-12 * spectral_norm(A) ** system.dim:
            raise NotInvertibleError(f"matrix {i} is singular or near-singular")

    R = grid.resolution
    rows, cols, vals = [], [], []
    row_idx = np.arange(R)
    for A in system.ops:
        images = grid.points @ A.T
        norms = np.linalg.norm(images, axis=1)
        idx, wts = grid.stencil(images / norms[:, None])
        weight = norms**t
        for s in range(idx.shape[1]):
            rows.append(row_idx)
            cols.append(idx[:, s])
            vals.append(weight * wts[:, s])
    operator = scipy.sparse.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(R, R)).tocsr()

    rho, h, res_h = _power_iteration(operator, np.ones(R), tol, max_iter)
    _, nu, res_nu = _power_iteration(operator.T, np.ones(R), tol, max_iter)
    h = np.abs(h)
    nu = np.abs(nu)
    if np.min(h) <= 1e-12 * np.max(h):
        raise CheckFailedError(
            "eigenfunction is not strictly positive on the grid; "
            "the discretized operator looks reducible")
    nu /= nu.sum()
    h /= float(h @ nu)
    gap = _gap_estimate(operator, rho, h, nu)
    return TransferDiscretization(system=system, t=t, grid=grid,
                                  operator=operator, rho=float(rho), h=h,
                                  nu=nu, gap_ratio=gap,
                                  residual_h=res_h, residual_nu=res_nu)


def cylinder_measure_t(disc: TransferDiscretization, word: Word) -> float:
    """Quadrature of rho^{-n} ||A_I u||^t h(A_I u bar) against nu.

    A_I is the forward product A_{x_0} ... A_{x_{n-1}}; the operator-order
    reversal of the underlying construction is absorbed exactly by collapsing
    the iterated operator onto the product matrix.
    """
    validate_word(word, disc.alphabet_size)
    if len(word) == 0:
        return float(disc.h @ disc.nu)
    integrand = disc.integrand(word)
    return disc.rho ** (-len(word)) * float(disc.nu @ integrand)


def convergence_defect_t(disc: TransferDiscretization, f, n: int) -> float:
    """Sup-norm defect || rho^{-n} L^n f - <f, nu> h ||_inf on the grid."""
    if n < 0:
        raise ValueError("defects need n >= 0")
    g = np.asarray(f, dtype=float).copy()
    mean = float(g @ disc.nu)
    for _ in range(n):
        g = disc.operator @ g / disc.rho
    return float(np.max(np.abs(g - mean * disc.h)))


def holder_bound_check(disc: TransferDiscretization, word: Word,
                       epsilon: Optional[float] = None) -> float:
    """Grid Hoelder seminorm of the word integrand, relative to ||A_J||^t.

    Estimates sup |g(x) - g(y)| / d(x, y)^epsilon over all grid pairs for
    g(u) = ||A_J u||^t h(A_J u bar), divided by ||A_J||^t. Bounded ratios
    over word families witness the regularity inequality.
    """
    t_bar = min(1.0, disc.t) if disc.t > 0 else 1.0
    eps = t_bar if epsilon is None else float(epsilon)
    if not 0 < eps <= t_bar + 1e-12:
        raise ValueError(f"epsilon must lie in (0, min(1, t)], got {eps}")
    g = disc.integrand(word)
    dist = disc.grid.pairwise_distances()
    mask = dist > _SNAP_TOL
    diffs = np.abs(g[:, None] - g[None, :])[mask]
    semi = float(np.max(diffs / dist[mask] ** eps)) if diffs.size else 0.0
    norm_t = spectral_norm(word_product(disc.system, word)) ** disc.t
    return semi / norm_t


@dataclass
class ContractionReport:
    """Worst observed ratios in the projective contraction inequalities.

    `worst_map_ratio` is d(Au, Aw) ||A u/|u|||| / (||A|| d(u, w)), bounded by
    2; `worst_weight_ratio` is the weight-Hoelder quotient
    |w_A(u)^t - w_A(w)^t| / ((t+1) ||A||^t d(u, w)^min(1,t)), bounded by 1.
    """

    worst_map_ratio: float
    worst_weight_ratio: float
    samples: int
    skipped: int


def projective_contraction_check(system: MatrixSystem, grid: ProjectiveGrid,
                                 samples: int, t: float = 1.0,
                                 max_word_len: int = 4,
                                 seed=0) -> ContractionReport:
    """Sampled verification of the projective contraction inequalities.

    Draws pairs of directions (random and grid-anchored near-pairs) and word
    products up to `max_word_len`, asserting both inequalities with slack
    1 + 1e-9; violations raise CheckFailedError since they would contradict
    exact theory.
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    rng = np.random.default_rng(seed)
    d = system.dim
    products = [word_product(system, w)
                for n in range(1, max_word_len + 1)
                for w in iter_words(system.alphabet_size, n)]
    norms = [spectral_norm(P) for P in products]
    t_bar = min(1.0, t) if t > 0 else 1.0
    worst_map = 0.0
    worst_weight = 0.0
    skipped = 0
    n_grid = grid.points.shape[0]
    for k in range(samples):
        if k % 2 == 0:
            u = rng.standard_normal(d)
        else:
            u = grid.points[k % n_grid] + 0.05 * rng.standard_normal(d)
        w = u + rng.standard_normal(d) * (10.0 ** rng.uniform(-6, 0))
        un, wn = np.linalg.norm(u), np.linalg.norm(w)
        if un == 0.0 or wn == 0.0:
            skipped += 1
            continue
        u, w = u / un, w / wn
        dist = projective_distance(u, w)
        if dist <= 1e-14:
            skipped += 1
            continue
        j = int(rng.integers(len(products)))
        P, nP = products[j], norms[j]
        Pu, Pw = P @ u, P @ w
        wu, ww = np.linalg.norm(Pu), np.linalg.norm(Pw)
        map_ratio = projective_distance(Pu, Pw) * wu / (nP * dist)
        if map_ratio > 2.0 * (1.0 + 1e-9):
            raise CheckFailedError(
                f"projective contraction bound violated: ratio {map_ratio}")
        weight_ratio = abs(wu**t - ww**t) / ((t + 1.0) * nP**t * dist**t_bar)
        if weight_ratio > 1.0 + 1e-9:
            raise CheckFailedError(
                f"weight Hoelder bound violated: ratio {weight_ratio}")
        worst_map = max(worst_map, map_ratio)
        worst_weight = max(worst_weight, weight_ratio)
    return ContractionReport(worst_map_ratio=worst_map,
                             worst_weight_ratio=worst_weight,
                             samples=samples, skipped=skipped)


@dataclass
class ProximalityReport:
    """First product with a simple dominant real eigenvalue, if any."""

    witness: Optional[Word]
    eigenvalue_separation: float

    @property
    def found(self) -> bool:
        return self.witness is not None


_PROXIMAL_TOL = 1e-6


def proximality_search(system: MatrixSystem, max_len: int,
                       budget: int = DEFAULT_BUDGET) -> ProximalityReport:
    """Scan all products up to max_len for a proximal witness.

    A product qualifies when its top-modulus eigenvalue is real and separated
    from the rest by more than 1e-6 relative. Words are scanned by length then
    lexicographically, so the first witness is deterministic.
    """
    if max_len < 1:
        raise ValueError("search needs max_len >= 1")
    ensure_budget(count_words_up_to(system.alphabet_size, max_len), budget)
    if system.dim == 1:
        return ProximalityReport(witness=(0,), eigenvalue_separation=1.0)
    for n in range(1, max_len + 1):
        for word in iter_words(system.alphabet_size, n):
            eigs = np.linalg.eigvals(word_product(system, word))
            order = np.argsort(-np.abs(eigs))
            top = eigs[order[0]]
            mod = abs(top)
            if mod == 0.0 or abs(top.imag) > 1e-9 * mod:
                continue
            separation = (mod - abs(eigs[order[1]])) / mod
            if separation > _PROXIMAL_TOL:
                return ProximalityReport(witness=word,
                                         eigenvalue_separation=float(separation))
    return ProximalityReport(witness=None, eigenvalue_separation=0.0)
