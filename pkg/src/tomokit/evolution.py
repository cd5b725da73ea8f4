"""Time evolution for quadratic Hamiltonians.

With the phase-space vector ordered Q = (p, q), a Hamiltonian
H = (1/2) Q B(t) Q + C(t) Q has linear integrals of motion
I(t) = Lambda(t) Q + Delta(t) mapping the state at time t back to its
initial values.  Hamilton's equations reduce the defining conditions to
the real system

    dLambda/dt = Lambda J B(t),   dDelta/dt = Lambda J C(t),
    J = [[0, 1], [-1, 0]],        Lambda(0) = 1, Delta(0) = 0,

whose closed forms for free motion, Lambda = [[1, 0], [-t, 1]], and the
unit oscillator, Lambda = rotation by t, serve as regression anchors.

The tomographic propagator of such a system is a product of delta
functions and is therefore realized exactly as a frame pullback, never as
a gridded kernel:

    w(X, mu, nu, t) = w0(X + N Lambda^-1 Delta, mu', nu'),
    N = (nu, mu),  (nu', mu') = N Lambda^-1.

The sign and component order are pinned by the free-motion point state,
whose peak must move to X = mu*(x0 + t*p0) + nu*p0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.ndimage import map_coordinates

from .config import DEFAULT, NumericConfig
from .core import (AnalyticTomogram, Grid1D, PhaseDensity, SymplecticFrame,
                   Tomogram, trapezoid)
from .errors import (BoundaryOutflow, NearNode, SymplecticityLost,
                     TimeMismatch)
from .library import coherent_tomogram, fock_tomogram_fourier

__all__ = [
    "QuadraticHamiltonian", "LinearInvariants", "TomographicPropagator",
    "free_particle_hamiltonian", "harmonic_oscillator_hamiltonian",
    "constant_hamiltonian", "linear_invariants", "free_motion", "oscillator",
    "quadratic_propagator", "propagate_tomogram", "compose_propagators",
    "liouville_evolve", "classical_quantum_agreement",
    "stationarity_residual", "oscillator_evolution_residual",
    "oscillator_energy_estimate", "energy_estimate_samples",
]

_J = np.array([[0.0, 1.0], [-1.0, 0.0]])
_DET_TOL = 1e-6
_B_SYMMETRY_TOL = 1e-12
_NODE_FLOOR = 1e-8
_OUTFLOW_TOL = 1e-3

# Standard sample set for residual checks: X values paired with frames on
# and off the optical circle.
RESIDUAL_SAMPLES_X = (-2.0, -0.7, 0.3, 1.1, 2.2)
RESIDUAL_SAMPLES_FRAMES = ((1.0, 0.0), (0.0, 1.0), (0.6, 0.8),
                           (1.2, -0.5), (-0.7, 0.9))

# Default (k, mu, nu) samples for the eigenvalue estimate, chosen inside
# |k| in [0.5, 3] and mu^2+nu^2 in [0.5, 4] and away from Laguerre nodes
# for n <= 5.
ENERGY_SAMPLES = ((0.8, 1.0, 0.0), (1.3, 0.6, 0.8), (2.1, 0.9, -0.7),
                  (0.6, 1.1, 0.9), (1.7, 0.3, 1.2))


@dataclass(frozen=True)
class QuadraticHamiltonian:
    """H = (1/2) Q B(t) Q + C(t) Q acting on Q = (p, q)."""

    b: Callable[[float], np.ndarray]
    c: Callable[[float], np.ndarray]


def constant_hamiltonian(b: np.ndarray, c: Optional[np.ndarray] = None
                         ) -> QuadraticHamiltonian:
    b = np.asarray(b, dtype=float)
    if b.shape != (2, 2):
        raise ValueError("B must be 2x2")
    if abs(b[0, 1] - b[1, 0]) > _B_SYMMETRY_TOL:
        raise ValueError("B must be symmetric")
    c = np.zeros(2) if c is None else np.asarray(c, dtype=float)
    return QuadraticHamiltonian(lambda t: b, lambda t: c)


def free_particle_hamiltonian() -> QuadraticHamiltonian:
    return constant_hamiltonian(np.diag([1.0, 0.0]))


def harmonic_oscillator_hamiltonian() -> QuadraticHamiltonian:
    return constant_hamiltonian(np.eye(2))


@dataclass(frozen=True)
class LinearInvariants:
    """Lambda(t), Delta(t) mapping Q(t) to the initial Q."""

    lam: np.ndarray
    delta: np.ndarray
    t: float

    def det(self) -> float:
        return float(np.linalg.det(self.lam))


def _rk4(h: QuadraticHamiltonian, t0: float, t1: float, dt: float):
    lam = np.eye(2)
    delta = np.zeros(2)
    span = t1 - t0
    if span == 0.0:
        return lam, delta
    n_steps = max(1, math.ceil(abs(span) / dt))
    step = span / n_steps

    def deriv(time, lam_now):
        b = np.asarray(h.b(time), dtype=float)
        if abs(b[0, 1] - b[1, 0]) > _B_SYMMETRY_TOL:
            raise ValueError(f"B(t={time}) is not symmetric")
        c = np.asarray(h.c(time), dtype=float)
        jb = _J @ b
        return lam_now @ jb, lam_now @ (_J @ c)

    t = t0
    for _ in range(n_steps):
        k1l, k1d = deriv(t, lam)
        k2l, k2d = deriv(t + 0.5 * step, lam + 0.5 * step * k1l)
        k3l, k3d = deriv(t + 0.5 * step, lam + 0.5 * step * k2l)
        k4l, k4d = deriv(t + step, lam + step * k3l)
        lam = lam + (step / 6.0) * (k1l + 2 * k2l + 2 * k3l + k4l)
        delta = delta + (step / 6.0) * (k1d + 2 * k2d + 2 * k3d + k4d)
        t += step
    return lam, delta


def linear_invariants(h: QuadraticHamiltonian, t: float,
                      dt: float = DEFAULT.ode_dt) -> LinearInvariants:
    """Integrate the invariants from 0 to t with a fixed-step fourth-order
    scheme.  dt must not exceed 1e-2; SymplecticityLost is raised if
    det(Lambda) drifts beyond 1e-6."""
    if dt > 1e-2 or dt <= 0:
        raise ValueError("dt must lie in (0, 1e-2]")
    if not math.isfinite(t):
        raise ValueError("t must be finite")
    lam, delta = _rk4(h, 0.0, t, dt)
    inv = LinearInvariants(lam, delta, t)
    if abs(inv.det() - 1.0) > _DET_TOL:
        raise SymplecticityLost(
            f"det(Lambda) = {inv.det():.10f} at t = {t}; reduce dt")
    return inv


@dataclass(frozen=True)
class TomographicPropagator:
    """Delta-kernel propagator, stored as its exact frame pullback."""

    kind: str
    invariants: LinearInvariants
    t_start: float
    t_end: float


def free_motion(t: float, t_start: float = 0.0) -> TomographicPropagator:
    lam = np.array([[1.0, 0.0], [-t, 1.0]])
    inv = LinearInvariants(lam, np.zeros(2), t)
    return TomographicPropagator("free_motion", inv, t_start, t_start + t)


def oscillator(t: float, t_start: float = 0.0) -> TomographicPropagator:
    c, s = math.cos(t), math.sin(t)
    lam = np.array([[c, s], [-s, c]])
    inv = LinearInvariants(lam, np.zeros(2), t)
    return TomographicPropagator("oscillator", inv, t_start, t_start + t)


def quadratic_propagator(h: QuadraticHamiltonian, t_end: float,
                         t_start: float = 0.0,
                         dt: float = DEFAULT.ode_dt) -> TomographicPropagator:
    """Propagator for a general quadratic Hamiltonian over [t_start, t_end],
    via the invariants ODE (which handles time-dependent B, C)."""
    if dt > 1e-2 or dt <= 0:
        raise ValueError("dt must lie in (0, 1e-2]")
    lam, delta = _rk4(h, t_start, t_end, dt)
    inv = LinearInvariants(lam, delta, t_end - t_start)
    if abs(inv.det() - 1.0) > _DET_TOL:
        raise SymplecticityLost(
            f"det(Lambda) = {inv.det():.10f}; reduce dt")
    return TomographicPropagator("quadratic", inv, t_start, t_end)


def _inv_2x2(m: np.ndarray) -> np.ndarray:
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    return np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]]) / det


def propagate_tomogram(tomo: Tomogram,
                       prop: TomographicPropagator) -> AnalyticTomogram:
    """Apply the delta-kernel propagator as an exact frame pullback.

    Requires an evaluator-style tomogram because the pullback samples the
    initial state at off-grid frames.
    """
    lam_inv = _inv_2x2(prop.invariants.lam)
    delta = prop.invariants.delta

    def evaluator(x, mu, nu):
        # Row vector N = (nu, mu) times Lambda^{-1}.
        nu_p = nu * lam_inv[0, 0] + mu * lam_inv[1, 0]
        mu_p = nu * lam_inv[0, 1] + mu * lam_inv[1, 1]
        shift = nu_p * delta[0] + mu_p * delta[1]
        return tomo.frame_values(np.asarray(x, float) + shift, mu_p, nu_p)

    return AnalyticTomogram(evaluator)


def compose_propagators(p1: TomographicPropagator,
                        p2: TomographicPropagator) -> TomographicPropagator:
    """Chain p1 over (t1 -> t') with p2 over (t' -> t2).

    Both invariants map states back to their interval start, so the
    composition is Lambda = Lambda1 Lambda2 and
    Delta = Lambda1 Delta2 + Delta1; for quadratic systems this equals the
    direct propagator over (t1 -> t2), the delta-kernel composition law.
    """
    if abs(p1.t_end - p2.t_start) > 1e-12:
        raise TimeMismatch(
            f"p1 ends at {p1.t_end} but p2 starts at {p2.t_start}")
    lam = p1.invariants.lam @ p2.invariants.lam
    delta = p1.invariants.lam @ p2.invariants.delta + p1.invariants.delta
    inv = LinearInvariants(lam, delta, p2.t_end - p1.t_start)
    return TomographicPropagator("quadratic", inv, p1.t_start, p2.t_end)


def liouville_evolve(f: PhaseDensity, h: QuadraticHamiltonian, t: float,
                     dt: float = DEFAULT.ode_dt) -> PhaseDensity:
    """Evolve a classical phase density along the characteristics.

    f(q, p, t) = f0(q0(q, p, t), p0(q, p, t)) with (p0, q0) the linear
    invariants at the current phase point; off-grid values by bilinear
    interpolation, zero outside.  If more than 1e-3 of the mass leaves the
    grid, BoundaryOutflow is raised.
    """
    inv = linear_invariants(h, t, dt)
    q = f.q_grid.points
    p = f.p_grid.points
    qq, pp = np.meshgrid(q, p, indexing="ij")   # both shaped (n_q, n_p)
    p0 = inv.lam[0, 0] * pp + inv.lam[0, 1] * qq + inv.delta[0]
    q0 = inv.lam[1, 0] * pp + inv.lam[1, 1] * qq + inv.delta[1]
    iq = (q0 - f.q_grid.min) / f.q_grid.spacing
    ip = (p0 - f.p_grid.min) / f.p_grid.spacing
    vals = map_coordinates(f.values, [iq.ravel(), ip.ravel()],
                           order=1, mode="constant", cval=0.0)
    out = PhaseDensity(f.q_grid, f.p_grid, vals.reshape(qq.shape))
    loss = f.norm() - out.norm()
    if loss > _OUTFLOW_TOL:
        raise BoundaryOutflow(
            f"{loss:.2e} of the mass left the grid at t = {t}")
    return out


def coherent_phase_density(alpha: complex, q_grid: Grid1D,
                           p_grid: Grid1D) -> PhaseDensity:
    """Classical Gaussian matching a coherent state: center
    (sqrt(2) Re alpha, sqrt(2) Im alpha), unit total mass."""
    qc = math.sqrt(2.0) * alpha.real
    pc = math.sqrt(2.0) * alpha.imag
    q = q_grid.points[:, None]
    p = p_grid.points[None, :]
    vals = np.exp(-(q - qc) ** 2 - (p - pc) ** 2) / math.pi
    return PhaseDensity(q_grid, p_grid, vals)


def classical_quantum_agreement(alpha: complex, t: float,
                                cfg: NumericConfig = DEFAULT) -> float:
    """Max-abs difference between the classically evolved tomogram and the
    quantum frame pullback for a coherent state under the unit oscillator.

    Both routes are exact rotations, so the value measures only grid
    error; it must stay below 1e-3 on the standard grids.
    """
    from .transforms import classical_tomogram

    grid = Grid1D(cfg.x_min, cfg.x_max, cfg.liouville_points)
    f0 = coherent_phase_density(alpha, grid, grid)
    ft = liouville_evolve(f0, harmonic_oscillator_hamiltonian(), t,
                          dt=cfg.ode_dt)
    x_out = Grid1D(cfg.x_min, cfg.x_max, cfg.n_x)
    from .core import angle_grid, sample_tomogram

    phi = angle_grid(cfg.n_phi)
    classical = classical_tomogram(ft, x_out, phi, cfg)
    quantum = sample_tomogram(
        propagate_tomogram(coherent_tomogram(alpha), oscillator(t)),
        x_out, phi)
    return float(np.max(np.abs(classical.values - quantum.values)))


def _frame_partials(tomo: Tomogram, x: np.ndarray, mu: float, nu: float,
                    h: float):
    d_mu = (tomo.frame_values(x, mu + h, nu)
            - tomo.frame_values(x, mu - h, nu)) / (2.0 * h)
    d_nu = (tomo.frame_values(x, mu, nu + h)
            - tomo.frame_values(x, mu, nu - h)) / (2.0 * h)
    return d_mu, d_nu


def stationarity_residual(tomo: Tomogram,
                          cfg: NumericConfig = DEFAULT) -> float:
    """Max of |mu dw/dnu - nu dw/dmu| over the standard sample set.

    Zero (to finite-difference truncation) exactly for energy
    eigenstates, whose tomograms depend on the frame only through
    mu^2 + nu^2; order one for coherent states.
    """
    x = np.asarray(RESIDUAL_SAMPLES_X)
    h = cfg.fd_step
    worst = 0.0
    for mu, nu in RESIDUAL_SAMPLES_FRAMES:
        d_mu, d_nu = _frame_partials(tomo, x, mu, nu, h)
        worst = max(worst, float(np.max(np.abs(mu * d_nu - nu * d_mu))))
    return worst


def oscillator_evolution_residual(family: Callable[[float], Tomogram],
                                  t: float,
                                  cfg: NumericConfig = DEFAULT) -> float:
    """Residual of dw/dt - mu dw/dnu + nu dw/dmu over the sample set for a
    time-indexed tomogram family (central differences in t and frames)."""
    x = np.asarray(RESIDUAL_SAMPLES_X)
    h = cfg.fd_step
    now = family(t)
    before = family(t - h)
    after = family(t + h)
    worst = 0.0
    for mu, nu in RESIDUAL_SAMPLES_FRAMES:
        w_dot = (after.frame_values(x, mu, nu)
                 - before.frame_values(x, mu, nu)) / (2.0 * h)
        d_mu, d_nu = _frame_partials(now, x, mu, nu, h)
        worst = max(worst, float(np.max(np.abs(
            w_dot - mu * d_nu + nu * d_mu))))
    return worst


def energy_estimate_samples(n, samples: Sequence = ENERGY_SAMPLES,
                            cfg: NumericConfig = DEFAULT) -> np.ndarray:
    """Per-sample eigenvalue estimates for number state n.

    Applies the frame-Laplacian operator

        (-1/(2 k^2)) (d^2/dmu^2 + d^2/dnu^2) + (k^2/8)(mu^2 + nu^2)

    to the Fourier component of the number-state tomogram by central
    differences and divides pointwise; every estimate equals n + 1/2 up to
    truncation error.  Samples on a Laguerre node (|value| < 1e-8) raise
    NearNode because the division is ill-posed there.
    """
    h = cfg.fd_step
    out = []
    for k, mu, nu in samples:
        def w(mm, nn):
            return fock_tomogram_fourier(n, k, SymplecticFrame(mm, nn))

        center = w(mu, nu)
        if abs(center) < _NODE_FLOOR:
            raise NearNode(
                f"sample (k={k}, mu={mu}, nu={nu}) sits on a node")
        lap = ((w(mu + h, nu) - 2 * center + w(mu - h, nu)) / h ** 2
               + (w(mu, nu + h) - 2 * center + w(mu, nu - h)) / h ** 2)
        value = (-lap / (2.0 * k * k)
                 + (k * k / 8.0) * (mu * mu + nu * nu) * center)
        out.append(value / center)
    return np.asarray(out)


def oscillator_energy_estimate(n, samples: Sequence = ENERGY_SAMPLES,
                               cfg: NumericConfig = DEFAULT) -> float:
    """Mean of `energy_estimate_samples`; equals n + 1/2 within 1e-4."""
    return float(np.mean(energy_estimate_samples(n, samples, cfg)))
