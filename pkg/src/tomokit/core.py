"""Grids, state containers and invariant validation.

Containers are frozen dataclasses treated as immutable after construction;
array fields are never mutated in place, so instances are safe to share
across threads.  Units are hbar = 1, mass 1, frequency 1 throughout.

The marginal distribution w(X, mu, nu) of the observable X = mu*q + nu*p
is the central object.  It is homogeneous,

    w(s*X, s*mu, s*nu) = w(X, mu, nu) / |s|,

so storing samples on the optical circle mu = cos(phi), nu = sin(phi),
phi in [0, pi), loses nothing; analytic evaluators keep full (mu, nu)
arguments.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Optional

import numpy as np

trapezoid = np.trapezoid if hasattr(np, "trapezoid") else np.trapz

# Validation tolerances, chosen for 256-512 point grids on [-8, 8].
# They are documented here once and not tuned per test.
TOMOGRAM_COLUMN_NORM_TOL = 1e-3
TOMOGRAM_NEGATIVITY_TOL = 1e-12
HOMOGENEITY_TOL = 1e-12
WIGNER_NORM_TOL = 1e-2
PHASE_DENSITY_NORM_TOL = 1e-2
DENSITY_HERMITICITY_TOL = 1e-10
DENSITY_TRACE_TOL = 1e-3
DIAGONAL_NEGATIVITY_TOL = 1e-10
WAVEFUNCTION_NORM_TOL = 1e-3
SPIN_HERMITICITY_TOL = 1e-12
SPIN_TRACE_TOL = 1e-12
SPIN_EIGENVALUE_TOL = 1e-10
SPIN_SUM_TOL = 1e-12

# Frames with |nu| below this band and with phi not exactly 0 or pi have
# no analytic limit and are excluded from quadrature-based evaluation.
NU_FLOOR = 1e-6

# Probe lattice used when validating analytic evaluators.
_PROBE_X = np.array([-2.1, -0.6, 0.0, 0.7, 1.9])
_PROBE_FRAMES = ((1.0, 0.0), (0.0, 1.0), (0.6, 0.8), (-0.8, 0.6))
_PROBE_SCALES = (0.5, 2.0, -1.0)


@dataclass(frozen=True)
class Grid1D:
    """Uniform 1-D grid with inclusive endpoints."""

    min: float
    max: float
    n_points: int

    def __post_init__(self):
        if not self.max > self.min:
            raise ValueError("Grid1D requires max > min")
        if self.n_points < 2:
            raise ValueError("Grid1D requires n_points >= 2")

    @property
    def spacing(self) -> float:
        return (self.max - self.min) / (self.n_points - 1)

    @cached_property
    def points(self) -> np.ndarray:
        return np.linspace(self.min, self.max, self.n_points)

    @cached_property
    def trapezoid_weights(self) -> np.ndarray:
        w = np.full(self.n_points, self.spacing)
        w[0] = w[-1] = 0.5 * self.spacing
        return w


def angle_grid(n: int, span: float = math.pi) -> Grid1D:
    """Uniform angles covering [0, span) with spacing span/n.

    The right endpoint is excluded because the column at span is the
    x-reversed column at 0 (for span = pi) or a repeat (for 2*pi).
    """
    if n < 2:
        raise ValueError("need at least 2 angles")
    return Grid1D(0.0, span * (n - 1) / n, n)


@dataclass(frozen=True)
class SymplecticFrame:
    """Reference-frame label (mu, nu) for the observable mu*q + nu*p."""

    mu: float
    nu: float

    def __post_init__(self):
        if self.mu == 0.0 and self.nu == 0.0:
            raise ValueError("frame (0, 0) is degenerate")

    @property
    def r(self) -> float:
        return math.hypot(self.mu, self.nu)

    @property
    def phi(self) -> float:
        return math.atan2(self.nu, self.mu)


class Tomogram:
    """Positive marginal distribution of X = mu*q + nu*p.

    Subclasses provide `frame_values(x, mu, nu)` for any nonzero frame;
    sampled tomograms extend their optical samples to the full plane via
    homogeneity.
    """

    def frame_values(self, x, mu: float, nu: float) -> np.ndarray:
        raise NotImplementedError

    def optical_values(self, x, phi: float) -> np.ndarray:
        return self.frame_values(x, math.cos(phi), math.sin(phi))


@dataclass(frozen=True)
class AnalyticTomogram(Tomogram):
    """Tomogram backed by a closed-form evaluator (x, mu, nu) -> w."""

    evaluator: Callable[[np.ndarray, float, float], np.ndarray]

    def frame_values(self, x, mu: float, nu: float) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.asarray(self.evaluator(x, float(mu), float(nu)), dtype=float)


@dataclass(frozen=True)
class OpticalTomogram(Tomogram):
    """Tomogram samples w(x_i, phi_j) on the optical circle.

    values has shape (n_x, n_phi); phi_grid must cover [0, pi) with
    uniform spacing pi/n_phi (see `angle_grid`).
    """

    x_grid: Grid1D
    phi_grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        expected = (self.x_grid.n_points, self.phi_grid.n_points)
        if self.values.shape != expected:
            raise ValueError(
                f"values shape {self.values.shape} != (n_x, n_phi) = {expected}"
            )

    def column(self, j: int) -> np.ndarray:
        return self.values[:, j]

    def frame_values(self, x, mu: float, nu: float) -> np.ndarray:
        """Evaluate at an arbitrary frame via the homogeneity extension.

        w(X, mu, nu) = w_optical(X/r, phi) / r  with  r = hypot(mu, nu),
        phi = atan2(nu, mu); a frame in the lower half plane maps to the
        upper half plane with X -> -X.  Interpolation is linear in both
        X/r and phi, with the ring closed by column(pi) = column(0)
        reversed in X.
        """
        x = np.asarray(x, dtype=float)
        r = math.hypot(mu, nu)
        if r == 0.0:
            raise ValueError("frame (0, 0) is degenerate")
        phi = math.atan2(nu, mu)
        y = x / r
        if phi < 0.0:
            phi += math.pi
            y = -y
        if phi >= math.pi:  # atan2(+0.0, -1) == pi
            phi -= math.pi
            y = -y

        n = self.phi_grid.n_points
        step = math.pi / n
        u = phi / step
        j0 = min(int(u), n - 1)
        t = u - j0
        xs = self.x_grid.points
        c0 = np.interp(y, xs, self.values[:, j0], left=0.0, right=0.0)
        if t == 0.0:
            return c0 / r
        if j0 + 1 < n:
            c1 = np.interp(y, xs, self.values[:, j0 + 1], left=0.0, right=0.0)
        else:
            c1 = np.interp(-y, xs, self.values[:, 0], left=0.0, right=0.0)
        return ((1.0 - t) * c0 + t * c1) / r


def sample_tomogram(tomo: Tomogram, x_grid: Grid1D, phi_grid: Grid1D,
                    threads: int = 1) -> OpticalTomogram:
    """Sample any tomogram on an (X, phi) optical lattice.

    Columns are evaluated independently; with threads > 1 they are farmed
    out to a thread pool and reassembled in index order so the result is
    identical to the sequential one.
    """
    x = x_grid.points
    phis = phi_grid.points

    def col(j):
        return tomo.optical_values(x, float(phis[j]))

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            cols = list(pool.map(col, range(len(phis))))
    else:
        cols = [col(j) for j in range(len(phis))]
    return OpticalTomogram(x_grid, phi_grid, np.column_stack(cols))


@dataclass(frozen=True)
class WignerGrid:
    """Phase-space quasidistribution W(q, p); may take negative values.

    Normalization convention: integral of W over (q, p) divided by 2*pi
    equals one.  This makes the tomogram map and its inverse mutually
    consistent as implemented in `transforms`.
    """

    q_grid: Grid1D
    p_grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        expected = (self.q_grid.n_points, self.p_grid.n_points)
        if self.values.shape != expected:
            raise ValueError(f"values shape {self.values.shape} != {expected}")

    def norm(self) -> float:
        inner = trapezoid(self.values, dx=self.p_grid.spacing, axis=1)
        return float(trapezoid(inner, dx=self.q_grid.spacing)) / (2.0 * math.pi)


@dataclass(frozen=True)
class PhaseDensity:
    """Nonnegative classical phase-space density f(q, p), integral one."""

    q_grid: Grid1D
    p_grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        expected = (self.q_grid.n_points, self.p_grid.n_points)
        if self.values.shape != expected:
            raise ValueError(f"values shape {self.values.shape} != {expected}")

    def norm(self) -> float:
        inner = trapezoid(self.values, dx=self.p_grid.spacing, axis=1)
        return float(trapezoid(inner, dx=self.q_grid.spacing))


@dataclass(frozen=True)
class DensityKernel:
    """Coordinate-representation density matrix rho(X, X')."""

    x_grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        n = self.x_grid.n_points
        if self.values.shape != (n, n):
            raise ValueError(f"values shape {self.values.shape} != ({n}, {n})")

    def trace(self) -> float:
        return float(trapezoid(np.real(np.diagonal(self.values)),
                               dx=self.x_grid.spacing))

    def asymmetry(self) -> float:
        return float(np.max(np.abs(self.values - self.values.conj().T)))


@dataclass(frozen=True)
class WaveFunction:
    """Complex wavefunction samples on a coordinate grid."""

    x_grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (self.x_grid.n_points,):
            raise ValueError("values must match x_grid")

    def norm(self) -> float:
        return float(trapezoid(np.abs(self.values) ** 2,
                               dx=self.x_grid.spacing))

    def density(self) -> np.ndarray:
        return np.abs(self.values) ** 2


def m_values(j: float) -> np.ndarray:
    """Projection values j, j-1, ..., -j (index 0 is m = +j)."""
    two_j = int(round(2 * j))
    if abs(2 * j - two_j) > 1e-12 or two_j < 0:
        raise ValueError(f"j = {j} is not a nonnegative half-integer")
    return j - np.arange(two_j + 1)


@dataclass(frozen=True)
class SpinState:
    """Spin-j density matrix, indexed by m = j ... -j (descending)."""

    j: float
    rho: np.ndarray

    def __post_init__(self):
        n = len(m_values(self.j))
        if self.rho.shape != (n, n):
            raise ValueError(f"rho shape {self.rho.shape} != ({n}, {n})")

    @property
    def dim(self) -> int:
        return self.rho.shape[0]


@dataclass(frozen=True)
class SpinTomogram:
    """Probabilities w(m, alpha, beta) of spin projection m along the
    axis rotated by Euler angles (alpha, beta).

    values has shape (2j+1, n_alpha, n_beta) with m descending.  When the
    beta nodes come from a Gauss-Legendre rule in cos(beta), the matching
    weights are stored so the inverse map can integrate exactly; uniform
    beta grids carry beta_weights = None and support forward use only.
    """

    j: float
    alpha_grid: Grid1D
    beta_nodes: np.ndarray
    values: np.ndarray
    beta_weights: Optional[np.ndarray] = None

    def __post_init__(self):
        n_m = len(m_values(self.j))
        expected = (n_m, self.alpha_grid.n_points, len(self.beta_nodes))
        if self.values.shape != expected:
            raise ValueError(f"values shape {self.values.shape} != {expected}")


# ---------------------------------------------------------------------------
# Validation


def _validate_tomogram(tomo: Tomogram) -> list:
    bad = []
    if isinstance(tomo, OpticalTomogram):
        if np.min(tomo.values) < -TOMOGRAM_NEGATIVITY_TOL:
            bad.append(
                "values >= 0 violated: min value %g" % np.min(tomo.values))
        norms = tomo.values.T @ tomo.x_grid.trapezoid_weights
        worst = float(np.max(np.abs(norms - 1.0)))
        if worst > TOMOGRAM_COLUMN_NORM_TOL:
            bad.append(
                "column normalization violated: max deviation %g" % worst)
    elif isinstance(tomo, AnalyticTomogram):
        for mu, nu in _PROBE_FRAMES:
            w = tomo.frame_values(_PROBE_X, mu, nu)
            if np.min(w) < -TOMOGRAM_NEGATIVITY_TOL:
                bad.append("values >= 0 violated at frame (%g, %g)" % (mu, nu))
            for s in _PROBE_SCALES:
                ws = tomo.frame_values(s * _PROBE_X, s * mu, s * nu)
                if np.max(np.abs(ws - w / abs(s))) > HOMOGENEITY_TOL:
                    bad.append(
                        "homogeneity violated at scale %g, frame (%g, %g)"
                        % (s, mu, nu))
        # Normalization probe on a wide scaled grid.
        for mu, nu in ((1.0, 0.0), (0.6, 0.8)):
            r = math.hypot(mu, nu)
            xs = np.linspace(-10.0 * r, 10.0 * r, 2001)
            total = trapezoid(tomo.frame_values(xs, mu, nu), xs)
            if abs(total - 1.0) > TOMOGRAM_COLUMN_NORM_TOL:
                bad.append(
                    "normalization violated at frame (%g, %g): %g"
                    % (mu, nu, total))
    else:
        bad.append("unknown tomogram kind")
    return bad


def _validate_spin_state(state: SpinState) -> list:
    bad = []
    herm = float(np.max(np.abs(state.rho - state.rho.conj().T)))
    if herm > SPIN_HERMITICITY_TOL:
        bad.append("hermiticity violated: asymmetry %g" % herm)
    tr = complex(np.trace(state.rho))
    if abs(tr - 1.0) > SPIN_TRACE_TOL:
        bad.append("trace = 1 violated: trace %s" % tr)
    eigs = np.linalg.eigvalsh(0.5 * (state.rho + state.rho.conj().T))
    if np.min(eigs) < -SPIN_EIGENVALUE_TOL:
        bad.append("positivity violated: min eigenvalue %g" % np.min(eigs))
    return bad


def validate(obj) -> list:
    """Return the list of violated invariants (empty when all hold).

    Diagnostics are returned, never raised, so callers can report several
    problems at once.
    """
    bad = []
    if isinstance(obj, Grid1D):
        return bad  # construction enforces the invariants
    if isinstance(obj, SymplecticFrame):
        return bad
    if isinstance(obj, Tomogram):
        return _validate_tomogram(obj)
    if isinstance(obj, WignerGrid):
        norm = obj.norm()
        if abs(norm - 1.0) > WIGNER_NORM_TOL:
            bad.append("normalization violated: integral/(2*pi) = %g" % norm)
        return bad
    if isinstance(obj, PhaseDensity):
        if np.min(obj.values) < -TOMOGRAM_NEGATIVITY_TOL:
            bad.append("values >= 0 violated: min %g" % np.min(obj.values))
        norm = obj.norm()
        if abs(norm - 1.0) > PHASE_DENSITY_NORM_TOL:
            bad.append("normalization violated: integral = %g" % norm)
        return bad
    if isinstance(obj, DensityKernel):
        asym = obj.asymmetry()
        if asym > DENSITY_HERMITICITY_TOL:
            bad.append("hermiticity violated: asymmetry %g" % asym)
        tr = obj.trace()
        if abs(tr - 1.0) > DENSITY_TRACE_TOL:
            bad.append("trace = 1 violated: trace %g" % tr)
        diag = np.diagonal(obj.values)
        if np.max(np.abs(np.imag(diag))) > DIAGONAL_NEGATIVITY_TOL:
            bad.append("diagonal not real")
        if np.min(np.real(diag)) < -DIAGONAL_NEGATIVITY_TOL:
            bad.append("diagonal negativity: min %g" % np.min(np.real(diag)))
        return bad
    if isinstance(obj, WaveFunction):
        norm = obj.norm()
        if abs(norm - 1.0) > WAVEFUNCTION_NORM_TOL:
            bad.append("normalization violated: integral |psi|^2 = %g" % norm)
        return bad
    if isinstance(obj, SpinState):
        return _validate_spin_state(obj)
    if isinstance(obj, SpinTomogram):
        sums = obj.values.sum(axis=0)
        worst = float(np.max(np.abs(sums - 1.0)))
        if worst > SPIN_SUM_TOL:
            bad.append("sum over m = 1 violated: max deviation %g" % worst)
        return bad
    raise TypeError(f"validate() does not know type {type(obj).__name__}")
