"""Named invariant suites behind the `check` CLI verb.

Each check returns (name, value, tolerance, passed); values are the
measured residuals so a failing run shows how far off it was.  Checks are
grouped into the cv, evolution and spin suites.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import evolution, library, spin, stats, transforms
from .config import NumericConfig, DEFAULT
from .core import (Grid1D, SymplecticFrame, angle_grid, sample_tomogram)

__all__ = ["CheckResult", "run_suite", "SUITES"]


@dataclass
class CheckResult:
    name: str
    value: float
    tolerance: float
    passed: bool

    @staticmethod
    def of(name: str, value: float, tolerance: float) -> "CheckResult":
        return CheckResult(name, float(value), float(tolerance),
                           bool(abs(float(value)) <= float(tolerance)))


def _standard_grids(cfg: NumericConfig):
    return Grid1D(cfg.x_min, cfg.x_max, cfg.n_x), angle_grid(cfg.n_phi)


def _cv_checks(cfg: NumericConfig) -> list:
    out = []
    x_out, phi = _standard_grids(cfg)
    psi_grid = Grid1D(-cfg.psi_half_width, cfg.psi_half_width,
                      cfg.psi_points)

    psi0 = library.fock_wavefunction(0, psi_grid)
    tomo0 = transforms.tomogram_from_wavefunction(psi0, x_out, phi)
    mid = (cfg.n_x - 1) // 2
    quarter = cfg.n_phi // 2
    value = tomo0.values[mid, quarter] - 1.0 / math.sqrt(math.pi)
    out.append(CheckResult.of("ground_peak_inv_sqrt_pi", value, 1e-6))

    psi3 = library.fock_wavefunction(3, psi_grid)
    tomo3 = transforms.tomogram_from_wavefunction(psi3, x_out, phi)
    ref = sample_tomogram(library.fock_tomogram(3), x_out, phi)
    out.append(CheckResult.of(
        "fock3_closed_form_match",
        float(np.max(np.abs(tomo3.values - ref.values))), 1e-6))

    focks = [library.fock_tomogram(n) for n in range(4)]
    mat = stats.orthogonality_matrix(focks, cfg)
    out.append(CheckResult.of(
        "orthogonality_fock_0_3", float(np.max(np.abs(mat - np.eye(4)))),
        1e-3))
    out.append(CheckResult.of(
        "purity_ground",
        stats.transition_probability(focks[0], focks[0], cfg) - 1.0, 1e-3))

    total = library.white_noise_tomogram_pairing(1.0 + 0.0j, 10)
    out.append(CheckResult.of("completeness_coherent_1", total - 1.0, 1e-3))

    out.append(CheckResult.of(
        "uncertainty_ground",
        stats.uncertainty_product(focks[0]) - 0.25, 1e-6))

    coh = library.coherent_tomogram(1.0 + 0.5j)
    xs = np.array([-1.3, 0.2, 0.9])
    base = coh.frame_values(xs, 0.6, 0.8)
    worst = 0.0
    for lam in (0.5, 2.0, -1.0):
        scaled = coh.frame_values(lam * xs, lam * 0.6, lam * 0.8)
        worst = max(worst, float(np.max(np.abs(scaled - base / abs(lam)))))
    out.append(CheckResult.of("homogeneity_coherent", worst, 1e-12))

    s1 = stats.entropy(coh, SymplecticFrame(1.0, 0.0))
    s2 = stats.entropy(coh, SymplecticFrame(2.0, 0.0))
    out.append(CheckResult.of(
        "entropy_scaling_shift", s2 - s1 - math.log(2.0), 1e-6))

    grid_w = Grid1D(cfg.x_min, cfg.x_max, cfg.wigner_points)
    tomo_c = sample_tomogram(coh, x_out, angle_grid(128))
    w = transforms.wigner_from_tomogram(tomo_c, grid_w, grid_w, cfg)
    back = transforms.tomogram_from_wigner(w, x_out, angle_grid(128), cfg)
    rel = (np.linalg.norm(back.values - tomo_c.values)
           / np.linalg.norm(tomo_c.values))
    out.append(CheckResult.of("wigner_roundtrip_coherent", rel, 2e-2))

    psi1 = library.fock_wavefunction(1, psi_grid)
    rho1 = np.outer(psi1.values, psi1.values.conj())
    from .core import DensityKernel

    kernel1 = DensityKernel(psi_grid, rho1)
    w1 = transforms.wigner_from_density(
        kernel1, Grid1D(-6, 6, 129), Grid1D(-6, 6, 129))
    t1 = sample_tomogram(library.fock_tomogram(1), x_out, phi)
    contrast_ok = (float(np.min(w1.values)) < -1e-2
                   and float(np.min(t1.values)) >= 0.0)
    out.append(CheckResult(
        "kernel_contrast_fock1", float(np.min(w1.values)), -1e-2,
        contrast_ok))
    return out


def _evolution_checks(cfg: NumericConfig) -> list:
    out = []
    t_probe = 1.9
    inv_free = evolution.linear_invariants(
        evolution.free_particle_hamiltonian(), t_probe, cfg.ode_dt)
    ref_free = np.array([[1.0, 0.0], [-t_probe, 1.0]])
    out.append(CheckResult.of(
        "lambda_free_motion",
        float(np.max(np.abs(inv_free.lam - ref_free))), 1e-8))

    inv_osc = evolution.linear_invariants(
        evolution.harmonic_oscillator_hamiltonian(), t_probe, cfg.ode_dt)
    c, s = math.cos(t_probe), math.sin(t_probe)
    ref_osc = np.array([[c, s], [-s, c]])
    out.append(CheckResult.of(
        "lambda_oscillator",
        float(np.max(np.abs(inv_osc.lam - ref_osc))), 1e-8))

    p1 = evolution.oscillator(0.7)
    p2 = evolution.oscillator(1.2, t_start=0.7)
    direct = evolution.oscillator(1.9)
    comp = evolution.compose_propagators(p1, p2)
    out.append(CheckResult.of(
        "chapman_kolmogorov_compose",
        float(np.max(np.abs(comp.invariants.lam - direct.invariants.lam))),
        1e-8))

    coh = library.coherent_tomogram(1.0)
    xs = np.linspace(-4, 4, 33)
    period = evolution.propagate_tomogram(
        coh, evolution.oscillator(2 * math.pi))
    worst = 0.0
    for mu, nu in ((1.0, 0.0), (0.6, 0.8)):
        worst = max(worst, float(np.max(np.abs(
            period.frame_values(xs, mu, nu) - coh.frame_values(xs, mu, nu)))))
    out.append(CheckResult.of("oscillator_period_identity", worst, 1e-10))

    point = library.classical_point_tomogram(1.0, 2.0, cfg.delta_width)
    moved = evolution.propagate_tomogram(point, evolution.free_motion(1.0))
    xg = np.linspace(cfg.x_min, cfg.x_max, 4 * cfg.n_x)
    peak_err = 0.0
    for mu, nu in ((1.0, 0.0), (0.6, 0.8), (0.0, 1.0)):
        col = moved.frame_values(xg, mu, nu)
        expected = mu * (1.0 + 1.0 * 2.0) + nu * 2.0
        peak_err = max(peak_err, abs(float(xg[np.argmax(col)]) - expected))
    out.append(CheckResult.of(
        "free_point_peak_shift", peak_err, 2 * (xg[1] - xg[0])))

    for n in range(4):
        value = evolution.oscillator_energy_estimate(n, cfg=cfg)
        out.append(CheckResult.of(f"energy_n{n}", value - (n + 0.5), 1e-4))

    def family(t):
        return evolution.propagate_tomogram(coh, evolution.oscillator(t))

    out.append(CheckResult.of(
        "tie_residual_coherent",
        evolution.oscillator_evolution_residual(family, 0.6, cfg), 1e-5))

    worst = max(evolution.stationarity_residual(library.fock_tomogram(n), cfg)
                for n in range(6))
    out.append(CheckResult.of("stationarity_fock", worst, 1e-6))

    out.append(CheckResult.of(
        "classical_quantum_half_pi",
        evolution.classical_quantum_agreement(1.0 + 0.0j, math.pi / 2, cfg),
        1e-3))
    return out


def _spin_checks(cfg: NumericConfig) -> list:
    out = []
    from .core import SpinState

    rho_up = SpinState(0.5, np.array([[1.0, 0.0], [0.0, 0.0]], complex))
    tomo = spin.spin_tomogram(rho_up, angle_grid(8, 2 * math.pi), 6)
    betas = tomo.beta_nodes
    up = tomo.values[0]
    down = tomo.values[1]
    err_up = float(np.max(np.abs(up - np.cos(betas / 2) ** 2)))
    err_down = float(np.max(np.abs(down - np.sin(betas / 2) ** 2)))
    out.append(CheckResult.of("spin_half_up_cos2", err_up, 1e-12))
    out.append(CheckResult.of("spin_half_down_sin2", err_down, 1e-12))

    rng = np.random.default_rng(cfg.seed)
    worst_u = worst_sym = 0.0
    for _ in range(20):
        j = rng.choice([0.5, 1.0, 1.5, 2.0, 2.5])
        a, b, g = rng.uniform(0, 2 * math.pi), rng.uniform(0, math.pi), \
            rng.uniform(0, 2 * math.pi)
        mat = spin.wigner_D_matrix(j, a, b, g)
        worst_u = max(worst_u, float(np.max(np.abs(
            mat @ mat.conj().T - np.eye(mat.shape[0])))))
        from .core import m_values

        ms = m_values(j)
        for i1, m1 in enumerate(ms):
            for i2, m2 in enumerate(ms):
                mirrored = mat[len(ms) - 1 - i1, len(ms) - 1 - i2]
                sign = (-1.0) ** int(round(m1 - m2))
                worst_sym = max(worst_sym, abs(
                    np.conj(mat[i1, i2]) - sign * mirrored))
    out.append(CheckResult.of("d_matrix_unitarity", worst_u, 1e-12))
    out.append(CheckResult.of("d_conjugation_symmetry", worst_sym, 1e-12))

    worst = 0.0
    for jj in (0, 1, 2):           # j1 = j2 = 1 couples to integers <= 2
        for jp in (0, 1, 2):
            for m in range(-jj, jj + 1):
                for mp in range(-jp, jp + 1):
                    total = sum(
                        (2 * jj + 1) * spin.three_j(1, 1, jj, m1, m2, -m)
                        * spin.three_j(1, 1, jp, m1, m2, -mp)
                        for m1 in (-1, 0, 1) for m2 in (-1, 0, 1))
                    expected = 1.0 if (jj == jp and m == mp) else 0.0
                    worst = max(worst, abs(total - expected))
    out.append(CheckResult.of("three_j_orthogonality_first", worst, 1e-12))

    worst = 0.0
    for m1 in (-1.0, 0.0, 1.0):
        for m2 in (-1.0, 0.0, 1.0):
            for m1p in (-1.0, 0.0, 1.0):
                for m2p in (-1.0, 0.0, 1.0):
                    total = sum(
                        (2 * jj + 1)
                        * spin.three_j(1, 1, jj, m1, m2, -m)
                        * spin.three_j(1, 1, jj, m1p, m2p, -m)
                        for jj in (0, 1, 2)
                        for m in np.arange(-jj, jj + 1))
                    expected = 1.0 if (m1 == m1p and m2 == m2p) else 0.0
                    worst = max(worst, abs(total - expected))
    out.append(CheckResult.of("three_j_orthogonality_second", worst, 1e-12))

    worst = 0.0
    for j in (0.5, 1.0, 1.5, 2.0):
        tj = int(round(2 * j))
        for _ in range(3):
            state = spin.random_spin_state(j, rng)
            tomo = spin.spin_tomogram(
                state, angle_grid(2 * tj + 4, 2 * math.pi), tj + 3)
            back = spin.reconstruct_spin_state(tomo)
            worst = max(worst, float(np.max(np.abs(back.rho - state.rho))))
    out.append(CheckResult.of("spin_roundtrip_random", worst, 1e-10))

    diff = spin.d_orthogonality_check(1.0, 1.0, 1.0,
                                      (0.0, 1.0, -1.0, 1.0, -1.0, 0.0))
    out.append(CheckResult.of("triple_d_integral", diff, 1e-10))
    return out


SUITES = {
    "cv": _cv_checks,
    "evolution": _evolution_checks,
    "spin": _spin_checks,
}


def run_suite(name: str, cfg: NumericConfig = DEFAULT) -> list:
    """Run one named suite, or all of them."""
    if name == "all":
        results = []
        for key in ("cv", "evolution", "spin"):
            results.extend(SUITES[key](cfg))
        return results
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}")
    return SUITES[name](cfg)
