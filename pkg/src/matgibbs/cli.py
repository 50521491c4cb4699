"""Command-line entry point.

Subcommands pressure | gibbs | lift | transfer | mixing | check-all read one
JSON config, write CSV/JSON report tables plus rendered figures into --out,
print one PASS/FAIL line per asserted invariant, and exit 0 iff every
asserted invariant passed. Module errors map to distinct exit codes.
"""

from __future__ import annotations

import argparse
import math
import sys
import traceback

import numpy as np

from . import figures, reports
from .cone_gibbs import (
    ConeGibbsModel,
    build_cone_gibbs,
    consistency_check,
    variational_check,
)
from .config import RunConfig, load_config
from .errors import (
    BudgetExceededError,
    CheckFailedError,
    ConfigError,
    DimensionBudgetError,
    InvalidExponentError,
    InvalidWordError,
    MatGibbsError,
    NonSimpleDominantError,
    NotConeNonnegativeError,
    NotInvertibleError,
    NotIrreducibleError,
)
from .mixing import (
    CylinderFunction,
    bradley_scan,
    correlation_decay,
    eps_independence,
    fit_geometric_rate,
    power_mean_chain_check,
    psi_coefficients,
)
from .spectral import leading_eigentriple
from .system import MATRIX_NORM, MatrixSystem, pressure_estimate, spectral_norm, word_product
from .tensor_lift import (
    kusuoka_lift,
    k_gibbs_measure,
    lift_positivity_test,
    tensor_power_lift,
)
from .transfer import assemble_transfer, build_grid, projective_contraction_check
from .words import iter_words_up_to, word_str

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_BY_ERROR = {
    ConfigError: 2,
    BudgetExceededError: 3,
    NotIrreducibleError: 4,
    NonSimpleDominantError: 5,
    NotInvertibleError: 6,
    InvalidExponentError: 7,
    DimensionBudgetError: 8,
    NotConeNonnegativeError: 9,
    InvalidWordError: 10,
    CheckFailedError: 11,
}
EXIT_UNEXPECTED = 70

CONE_CONSISTENCY_TOL = 1e-10
RESIDUAL_TOL = 1e-8


def _transfer_consistency_tol(dim: int) -> float:
    # the d=2 angle grid interpolates at second order (1e-3 is comfortable at
    # R >= 1024); the scattered-point inverse-distance stencils for d >= 3
    # converge more slowly, so the gate is looser there
    return 1e-3 if dim == 2 else 5e-3


def _print_verdicts(verdicts: dict) -> bool:
    all_ok = True
    for name, ok in verdicts.items():
        print(f"{'PASS' if ok else 'FAIL'} {name}")
        all_ok &= bool(ok)
    return all_ok


def _build_measure(cfg: RunConfig, system: MatrixSystem):
    if cfg.construction == "cone":
        return build_cone_gibbs(system)
    if cfg.construction == "kusuoka":
        return k_gibbs_measure(kusuoka_lift(system), seed=cfg.seed, budget=cfg.budget)
    if cfg.construction == "tensor-k":
        return k_gibbs_measure(tensor_power_lift(system, cfg.k),
                               seed=cfg.seed, budget=cfg.budget)
    grid = build_grid(cfg.dim, cfg.grid_resolution)
    return assemble_transfer(system, cfg.t, grid)


def _cylinder_rows(mu, L: int):
    """Rows (word, mass, norm_t, ratio) for all 1 <= |I| <= L."""
    rows, lengths, ratios = [], [], []
    t = mu.t_exponent
    for word in iter_words_up_to(mu.alphabet_size, L):
        mass = reports.checked_mass(mu.measure(word))
        norm_t = mu.norm_of_product(word) ** t
        ratio = mass * math.exp(len(word) * mu.pressure) / norm_t
        rows.append((word_str(word), mass, norm_t, ratio))
        lengths.append(len(word))
        ratios.append(ratio)
    return rows, np.array(lengths), np.array(ratios)


def _generic_consistency(mu, L: int) -> float:
    worst = 0.0
    M = mu.alphabet_size
    for word in iter_words_up_to(M, L, include_empty=True):
        mass = mu.measure(word)
        left = sum(mu.measure((a,) + word) for a in range(M))
        right = sum(mu.measure(word + (a,)) for a in range(M))
        worst = max(worst, abs(left - mass), abs(right - mass))
    return worst


def _spectral_target(cfg: RunConfig, system: MatrixSystem):
    """log rho reference for the pressure series, when a route provides one."""
    try:
        if cfg.t == 1.0 and np.all(system.ops >= 0):
            return math.log(leading_eigentriple(system.matrix_sum()).rho)
        if cfg.t >= 2 and cfg.t == int(cfg.t) and int(cfg.t) % 2 == 0:
            lift = tensor_power_lift(system, int(cfg.t))
            return math.log(leading_eigentriple(lift.operators.matrix_sum()).rho)
    except MatGibbsError:
        return None
    return None


def cmd_pressure(cfg: RunConfig, out_dir: str, render: bool):
    system = cfg.system()
    series = pressure_estimate(system, cfg.t, cfg.n_max, cfg.budget)
    logs = series.log_values
    violation = 0.0
    for m in range(1, cfg.n_max):
        for n in range(1, cfg.n_max - m + 1):
            violation = max(violation, logs[m + n - 1] - logs[m - 1] - logs[n - 1])
    target = _spectral_target(cfg, system)

    rows = [(n, logs[n - 1], series.per_n_estimates[n - 1],
             series.diff_estimates[n - 2] if n >= 2 else "")
            for n in range(1, cfg.n_max + 1)]
    reports.write_table(out_dir, "pressure_series",
                        ("n", "log_partition_sum", "per_n_estimate", "diff_estimate"),
                        rows, cfg.output_format)
    verdicts = {"pressure.subadditivity": violation <= 1e-9}
    if target is not None:
        verdicts["pressure.matches_spectral_target"] = (
            abs(series.per_n(cfg.n_max) - target) <= 0.1)
    summary = {
        "t": cfg.t,
        "n_max": cfg.n_max,
        "matrix_norm": MATRIX_NORM,
        "P_per_n": series.per_n(cfg.n_max),
        "P_diff": float(series.diff_estimates[-1]),
        "P_spectral_target": target,
        "subadditivity_max_violation": violation,
    }
    if render:
        figures.pressure_figure(series, target, out_dir)
    return summary, verdicts


def cmd_gibbs(cfg: RunConfig, out_dir: str, render: bool):
    system = cfg.system()
    mu = _build_measure(cfg, system)
    rows, lengths, ratios = _cylinder_rows(mu, cfg.scan_length)
    reports.write_table(out_dir, "cylinders", ("word", "mass", "norm_t", "ratio"),
                        rows, cfg.output_format)
    exact = isinstance(mu, ConeGibbsModel)
    if exact:
        defect = consistency_check(mu, min(cfg.scan_length + 1, 8), cfg.budget)
        tol = CONE_CONSISTENCY_TOL
        var = variational_check(mu, min(cfg.n_max, 10), cfg.budget)
    else:
        defect = _generic_consistency(mu, min(cfg.scan_length, 5))
        tol = _transfer_consistency_tol(cfg.dim)
        var = None
    c_min, C_max = float(ratios.min()), float(ratios.max())
    verdicts = {
        "gibbs.consistency": defect <= tol,
        "gibbs.positive_bounds": 0.0 < c_min <= C_max < math.inf,
    }
    summary = {
        "construction": cfg.construction,
        "t_exponent": mu.t_exponent,
        "matrix_norm": MATRIX_NORM,
        "pressure": mu.pressure,
        "rho": math.exp(mu.pressure),
        "gap_ratio": getattr(mu, "gap_ratio", None) if not exact
        else mu.spectral.gap_ratio,
        "c_min": c_min,
        "C_max": C_max,
        "consistency_defect": defect,
        "consistency_tolerance": tol,
    }
    if var is not None:
        summary["variational"] = {
            "n": var.n, "entropy_n": var.entropy_n,
            "lyapunov_n": var.lyapunov_n, "defect_n": var.defect_n,
        }
    if render:
        figures.ratio_figure(lengths, ratios, out_dir)
    return summary, verdicts


def cmd_lift(cfg: RunConfig, out_dir: str, render: bool):
    system = cfg.system()
    lifted = tensor_power_lift(system, cfg.k)
    data = leading_eigentriple(lifted.operators.matrix_sum())
    positivity = lift_positivity_test(lifted, max(cfg.dim, 1),
                                      seed=cfg.seed, budget=cfg.budget)

    rng = np.random.default_rng(cfg.seed)
    norm_err = 0.0
    for _ in range(16):
        n = int(rng.integers(1, 5))
        word = tuple(int(s) for s in rng.integers(0, cfg.alphabet_size, n))
        base = word_product(system, tuple(reversed(word)))
        lift_norm = lifted.word_operator_norm(word)
        norm_err = max(norm_err, abs(lift_norm - spectral_norm(base) ** cfg.k)
                       / spectral_norm(base) ** cfg.k)

    eig_rows = [(i, float(ev.real), float(ev.imag), float(abs(ev)))
                for i, ev in enumerate(data.eigenvalues)]
    reports.write_table(out_dir, "lift_spectrum",
                        ("index", "real", "imag", "modulus"),
                        eig_rows, cfg.output_format)
    verdicts = {
        "lift.positivity": positivity.passed,
        "lift.norm_identity": norm_err <= 1e-8,
    }
    summary = {
        "k": cfg.k,
        "orientation": lifted.orientation,
        "lifted_dim": lifted.lifted_dim,
        "rho": data.rho,
        "pressure": math.log(data.rho),
        "gap_ratio": data.gap_ratio,
        "positivity_verdict": positivity.verdict,
        "norm_identity_max_rel_err": norm_err,
    }
    if cfg.k == 2:
        other = kusuoka_lift(system)
        spec_a = np.sort_complex(np.linalg.eigvals(lifted.operators.matrix_sum()))
        spec_b = np.sort_complex(np.linalg.eigvals(other.operators.matrix_sum()))
        agreement = float(np.max(np.abs(spec_a - spec_b)))
        summary["kusuoka_spectrum_agreement"] = agreement
        verdicts["lift.kusuoka_spectrum_agreement"] = agreement <= 1e-10
    if render:
        figures.spectrum_figure(data.eigenvalues, out_dir)
    return summary, verdicts


def cmd_transfer(cfg: RunConfig, out_dir: str, render: bool):
    system = cfg.system()
    grid = build_grid(cfg.dim, cfg.grid_resolution)
    disc = assemble_transfer(system, cfg.t, grid)
    rows, lengths, ratios = _cylinder_rows(disc, min(cfg.scan_length, 6))
    reports.write_table(out_dir, "cylinders", ("word", "mass", "norm_t", "ratio"),
                        rows, cfg.output_format)
    func_rows = [(j, *(float(x) for x in grid.points[j]),
                  float(disc.h[j]), float(disc.nu[j]))
                 for j in range(grid.resolution)]
    coord_names = tuple(f"x{i}" for i in range(cfg.dim))
    reports.write_table(out_dir, "transfer_function",
                        ("index", *coord_names, "h", "nu"),
                        func_rows, cfg.output_format)

    defect = _generic_consistency(disc, min(cfg.scan_length, 5))
    res_h = float(np.max(np.abs(disc.operator @ disc.h - disc.rho * disc.h))
                  / (disc.rho * np.max(np.abs(disc.h))))
    res_nu = float(np.sum(np.abs(disc.operator.T @ disc.nu - disc.rho * disc.nu))
                   / disc.rho)
    contraction = projective_contraction_check(system, grid, samples=512,
                                               t=cfg.t, seed=cfg.seed)
    verdicts = {
        "transfer.consistency": defect <= _transfer_consistency_tol(cfg.dim),
        "transfer.residuals": max(res_h, res_nu) <= RESIDUAL_TOL,
        "transfer.positive_eigenfunction":
            float(np.min(disc.h)) > 1e-12 * float(np.max(disc.h)),
        "transfer.contraction_bounds":
            contraction.worst_map_ratio <= 2.0 + 1e-9
            and contraction.worst_weight_ratio <= 1.0 + 1e-9,
    }
    summary = {
        "t": cfg.t,
        "grid_resolution": cfg.grid_resolution,
        "matrix_norm": MATRIX_NORM,
        "rho": disc.rho,
        "log_rho": disc.pressure,
        "gap_ratio": disc.gap_ratio,
        "residual_h": res_h,
        "residual_nu": res_nu,
        "consistency_defect": defect,
        "worst_contraction_ratio": contraction.worst_map_ratio,
        "worst_weight_ratio": contraction.worst_weight_ratio,
    }
    if render:
        figures.transfer_figure(disc, out_dir)
    return summary, verdicts


def cmd_mixing(cfg: RunConfig, out_dir: str, render: bool):
    system = cfg.system()
    mu = _build_measure(cfg, system)
    L = min(cfg.scan_length, 3 if isinstance(mu, ConeGibbsModel) else 2)
    N = cfg.gap

    first = bradley_scan(mu, N, L, cfg.budget)
    second = bradley_scan(mu, 2 * N, L, cfg.budget)
    psi = psi_coefficients(mu, [N, 2 * N], L, cfg.budget)
    gaps = list(range(3, 11))
    eps_vals = {g: eps_independence(mu, 2, 2, g, cfg.budget) for g in gaps}
    beta = fit_geometric_rate(np.array(gaps),
                              np.array([eps_vals[g] for g in gaps]))
    decay = correlation_decay(mu, CylinderFunction.indicator((0,), cfg.alphabet_size,
                                                             cfg.theta),
                              CylinderFunction.indicator((0,), cfg.alphabet_size,
                                                         cfg.theta),
                              list(range(1, 13)), cfg.budget)
    chain = power_mean_chain_check(system, cfg.t if cfg.t > 0 else 1.0,
                                   min(N, 4), min(L, 2), cfg.budget)

    reports.write_table(out_dir, "mixing_bradley",
                        ("gap", "C_lower", "C_upper"),
                        [(first.gap, first.C_lower, first.C_upper),
                         (second.gap, second.C_lower, second.C_upper)],
                        cfg.output_format)
    reports.write_table(out_dir, "mixing_psi", ("gap", "psi_star", "psi_prime"),
                        [(g, psi[g][0], psi[g][1]) for g in sorted(psi)],
                        cfg.output_format)
    reports.write_table(out_dir, "mixing_eps", ("gap", "eps_independence"),
                        [(g, eps_vals[g]) for g in gaps], cfg.output_format)
    reports.write_table(out_dir, "mixing_correlation", ("n", "covariance"),
                        list(zip(decay.ns.tolist(), decay.values.tolist())),
                        cfg.output_format)

    gap_ratio = (mu.spectral.gap_ratio if isinstance(mu, ConeGibbsModel)
                 else mu.gap_ratio)
    verdicts = {
        "mixing.bradley_interval_persists":
            first.C_lower - 1e-6 <= second.C_lower
            and second.C_upper <= first.C_upper + 1e-6,
        "mixing.psi_ordering": all(p[1] <= 1.0 + 1e-9 <= p[0] + 2e-9
                                   for p in psi.values()),
        "mixing.power_mean_chain": chain >= 1.0 - 1e-9,
    }
    if gap_ratio < 1.0:
        verdicts["mixing.eps_rate_matches_gap"] = (
            not math.isfinite(beta)) or beta <= gap_ratio + 0.15
    summary = {
        "construction": cfg.construction,
        "scan_length": L,
        "gap": N,
        "bradley": {"N": first.gap, "C_lower": first.C_lower,
                    "C_upper": first.C_upper},
        "bradley_2N": {"N": second.gap, "C_lower": second.C_lower,
                       "C_upper": second.C_upper},
        "psi": {str(g): {"psi_star": psi[g][0], "psi_prime": psi[g][1]}
                for g in sorted(psi)},
        "eps_fitted_beta": beta,
        "correlation_fitted_rate": decay.fitted_rate,
        "power_mean_min_ratio": chain,
        "gap_ratio": gap_ratio,
        "theta": cfg.theta,
    }
    if render:
        figures.decay_figure(
            [("eps-independence s=r=2", gaps, [eps_vals[g] for g in gaps], beta),
             ("corr indicator[0]", decay.ns, decay.values, decay.fitted_rate)],
            out_dir)
    return summary, verdicts


def cmd_check_all(cfg: RunConfig, out_dir: str, render: bool):
    system = cfg.system()
    summary, verdicts = {}, {}

    p_summary, p_verdicts = cmd_pressure(cfg, out_dir, render)
    summary["pressure"] = p_summary
    verdicts.update(p_verdicts)

    gibbs_cfg = cfg
    if cfg.construction == "projective" and np.all(system.ops >= 0):
        # prefer the exact route for the measure-level checks
        gibbs_cfg = RunConfig(**{**cfg.__dict__, "construction": "cone"})
    g_summary, g_verdicts = cmd_gibbs(gibbs_cfg, out_dir, render)
    summary["gibbs"] = g_summary
    verdicts.update(g_verdicts)

    l_summary, l_verdicts = cmd_lift(cfg, out_dir, render)
    summary["lift"] = l_summary
    verdicts.update(l_verdicts)

    transfer_ok = cfg.dim >= 2 and all(
        abs(np.linalg.det(A)) > 1e-12 * spectral_norm(A) ** cfg.dim
        for A in system.ops)
    if transfer_ok:
        t_summary, t_verdicts = cmd_transfer(cfg, out_dir, render)
        summary["transfer"] = t_summary
        verdicts.update(t_verdicts)
        verdicts["check.transfer_vs_pressure"] = (
            abs(t_summary["log_rho"] - p_summary["P_per_n"]) <= 0.1)
        if (cfg.t == cfg.k and cfg.grid_resolution >= 1024):
            verdicts["check.transfer_vs_lift"] = (
                abs(t_summary["rho"] - l_summary["rho"]) <= 1e-3)

    m_summary, m_verdicts = cmd_mixing(gibbs_cfg, out_dir, render)
    summary["mixing"] = m_summary
    verdicts.update(m_verdicts)
    return summary, verdicts


COMMANDS = {
    "pressure": cmd_pressure,
    "gibbs": cmd_gibbs,
    "lift": cmd_lift,
    "transfer": cmd_transfer,
    "mixing": cmd_mixing,
    "check-all": cmd_check_all,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="matgibbs",
        description="Matrix Gibbs states: constructions and ergodic diagnostics")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="path to a JSON run config")
    common.add_argument("--out", default="out", help="output directory")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--budget", type=int, help="override the word budget")
    common.add_argument("--format", choices=("csv", "json"),
                        help="override the table format")
    common.add_argument("--no-figures", action="store_true",
                        help="skip figure rendering")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg.seed = args.seed
        if args.budget is not None:
            cfg.budget = args.budget
        if args.format is not None:
            cfg.output_format = args.format
        summary, verdicts = COMMANDS[args.command](cfg, args.out,
                                                   not args.no_figures)
        all_ok = _print_verdicts(verdicts)
        summary["verdicts"] = {k: bool(v) for k, v in verdicts.items()}
        summary["command"] = args.command
        summary["seed"] = cfg.seed
        reports.write_summary(args.out, summary)
        return EXIT_OK if all_ok else EXIT_CHECK_FAILED
    except MatGibbsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        for klass, code in EXIT_BY_ERROR.items():
            if isinstance(exc, klass):
                return code
        return EXIT_UNEXPECTED
    except Exception:
        traceback.print_exc()
        return EXIT_UNEXPECTED


if __name__ == "__main__":
    sys.exit(main())
