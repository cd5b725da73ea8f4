"""Maps among wavefunctions, density kernels, Wigner functions, classical
phase densities and tomograms.

Forward maps are oscillatory quadratures or line-integral projections;
the inverse map from optical samples to phase space is a filtered
back-projection (Fourier-slice theorem with a ramp filter and cosine
taper).  Classical densities and Wigner functions share one projection
and one inversion code path; only the admissibility check on the
inversion output differs.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.ndimage import map_coordinates
from scipy.special import dawsn

from .config import DEFAULT, NumericConfig
from .core import (DensityKernel, Grid1D, OpticalTomogram, PhaseDensity,
                   Tomogram, WaveFunction, WignerGrid, NU_FLOOR, trapezoid)
from .errors import (ComplexResidue, DegenerateFrame, GridTooCoarse,
                     InsufficientAngles, NegativityDetected,
                     NonHermitianResult, RingingDetected)

__all__ = [
    "tomogram_from_wavefunction", "tomogram_from_density",
    "tomogram_from_wigner", "classical_tomogram", "wigner_from_tomogram",
    "phase_density_from_tomogram", "density_from_tomogram",
    "wigner_from_density",
]

# Fraction of the output maximum that back-projection output may reach in
# the outermost boundary band, and the allowed deviation of its total mass,
# before the input is declared inadmissible (ringing).
_RING_BOUNDARY_FRAC = 0.1
_RING_NORM_TOL = 0.2
# Classical inversions must stay above -1e-3 times their maximum.
_NEGATIVITY_FRAC = 1e-3


def _exact_position_column(density_x, density_vals, x_out, reverse):
    """Analytic nu = 0 limit: the tomogram column is the position density,
    x-reversed for the frame mu = -1."""
    spline = CubicSpline(density_x, density_vals, extrapolate=False)
    xq = -x_out if reverse else x_out
    col = spline(xq)
    return np.nan_to_num(col, nan=0.0, posinf=0.0, neginf=0.0)


def tomogram_from_wavefunction(psi: WaveFunction, x_out: Grid1D,
                               phi_grid: Grid1D, threads: int = 1
                               ) -> OpticalTomogram:
    """Optical tomogram of a pure state by oscillatory quadrature.

    For each angle phi with mu = cos(phi), nu = sin(phi),

        w(X, phi) = |G(X)|^2 / (2*pi*|nu|),
        G(X) = integral dy psi(y) exp(i*mu*y^2/(2*nu) - i*y*X/nu),

    evaluated with the trapezoid rule on psi's own grid.  The chirp phase
    mu*y^2/(2*nu) must advance less than pi per grid step everywhere, or
    the quadrature aliases and GridTooCoarse is raised.  Angles exactly 0
    or pi use the analytic limit |psi(+-X)|^2; other angles inside the
    |nu| < 1e-6 band are rejected as DegenerateFrame.
    """
    y = psi.x_grid.points
    dy = psi.x_grid.spacing
    wy = psi.x_grid.trapezoid_weights * psi.values
    x = x_out.points
    dens = psi.density()
    y_max = max(abs(y[0]), abs(y[-1]))

    def column(j):
        phi = float(phi_grid.points[j])
        mu, nu = math.cos(phi), math.sin(phi)
        if phi == 0.0 or phi == math.pi:
            return _exact_position_column(y, dens, x, reverse=(phi != 0.0))
        if abs(nu) < NU_FLOOR:
            raise DegenerateFrame(
                f"phi = {phi!r} lies in the excluded band around nu = 0")
        phase_step = abs(mu) * y_max * dy / abs(nu)
        if phase_step > math.pi:
            raise GridTooCoarse(
                f"chirp advances {phase_step:.2f} rad per step at phi = "
                f"{phi:.4f}; refine the wavefunction grid")
        kernel = np.exp((0.5j * mu / nu) * y ** 2
                        - (1j / nu) * np.outer(x, y))
        amplitude = kernel @ wy
        return (amplitude.real ** 2 + amplitude.imag ** 2) / (
            2.0 * math.pi * abs(nu))

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            cols = list(pool.map(column, range(phi_grid.n_points)))
    else:
        cols = [column(j) for j in range(phi_grid.n_points)]
    return OpticalTomogram(x_out, phi_grid, np.column_stack(cols))


def tomogram_from_density(rho: DensityKernel, x_out: Grid1D,
                          phi_grid: Grid1D) -> OpticalTomogram:
    """Optical tomogram of a mixed state by double quadrature.

    w(X, phi) = (1/(2*pi*|nu|)) * sum_{Z,Z'} rho(Z,Z') a(Z) conj(a(Z'))
    with a(Z) = exp(i*mu*Z^2/(2*nu) - i*Z*X/nu); the kernel separates in
    (Z, Z'), so for a rank-one rho built from psi on the same grid this
    reproduces `tomogram_from_wavefunction` to machine precision.
    """
    z = rho.x_grid.points
    dz = rho.x_grid.spacing
    wz = rho.x_grid.trapezoid_weights
    x = x_out.points
    x_max = max(abs(x[0]), abs(x[-1]))
    z_max = max(abs(z[0]), abs(z[-1]))
    diag = np.real(np.diagonal(rho.values))

    cols = []
    for j in range(phi_grid.n_points):
        phi = float(phi_grid.points[j])
        mu, nu = math.cos(phi), math.sin(phi)
        if phi == 0.0 or phi == math.pi:
            cols.append(_exact_position_column(z, diag, x,
                                               reverse=(phi != 0.0)))
            continue
        if abs(nu) < NU_FLOOR:
            raise DegenerateFrame(
                f"phi = {phi!r} lies in the excluded band around nu = 0")
        phase_step = (abs(mu) * z_max + x_max) * dz / abs(nu)
        if phase_step > math.pi:
            raise GridTooCoarse(
                f"kernel phase advances {phase_step:.2f} rad per step at "
                f"phi = {phi:.4f}; refine the density grid")
        a = np.exp((0.5j * mu / nu) * z ** 2 - (1j / nu) * np.outer(x, z))
        a_w = a * wz
        m = a_w @ rho.values
        col = np.einsum("xz,xz->x", m, a_w.conj()).real
        cols.append(col / (2.0 * math.pi * abs(nu)))
    return OpticalTomogram(x_out, phi_grid, np.column_stack(cols))


def _interp_guard(values, spacing_q, spacing_p, divisor, tol):
    """Conservative estimate of the bilinear-interpolation error carried
    into one projected column; refuse to project if it exceeds tol.

    The error of linear interpolation is h^2 f''/8 pointwise; integrated
    along a line and allowing for sign cancellation this is bounded by
    h * sum|second differences| / 16 (per unit projection measure).
    """
    est = 0.0
    for axis, h in ((0, spacing_q), (1, spacing_p)):
        d2 = np.abs(np.diff(values, n=2, axis=axis))
        line_total = float(d2.sum(axis=axis).max())
        est = max(est, h * line_total / 16.0 / divisor)
    if est > tol:
        raise GridTooCoarse(
            f"estimated interpolation error {est:.2e} exceeds {tol:.1e}; "
            "refine the phase-space grid")


def _project(values, q_grid: Grid1D, p_grid: Grid1D, x_out: Grid1D,
             phi_grid: Grid1D, two_pi_norm: bool,
             cfg: NumericConfig) -> np.ndarray:
    """Line-integral projection shared by Wigner and classical tomograms.

    w(X, phi) = integral dP F(X cos phi - P sin phi, X sin phi + P cos phi)
    with bilinear interpolation off-grid and zero outside; divided by 2*pi
    for the Wigner normalization.
    """
    divisor = 2.0 * math.pi if two_pi_norm else 1.0
    _interp_guard(values, q_grid.spacing, p_grid.spacing, divisor,
                  cfg.interp_error_tol)
    x = x_out.points
    half = max(abs(q_grid.min), q_grid.max, abs(p_grid.min), p_grid.max)
    n_p_line = 2 * max(q_grid.n_points, p_grid.n_points) + 1
    p_line = np.linspace(-1.5 * half, 1.5 * half, n_p_line)
    dp = p_line[1] - p_line[0]

    out = np.empty((x_out.n_points, phi_grid.n_points))
    for j in range(phi_grid.n_points):
        phi = float(phi_grid.points[j])
        c, s = math.cos(phi), math.sin(phi)
        q = np.add.outer(x * c, -p_line * s)
        p = np.add.outer(x * s, p_line * c)
        iq = (q - q_grid.min) / q_grid.spacing
        ip = (p - p_grid.min) / p_grid.spacing
        samples = map_coordinates(values, [iq.ravel(), ip.ravel()],
                                  order=1, mode="constant", cval=0.0)
        samples = samples.reshape(q.shape)
        out[:, j] = trapezoid(samples, dx=dp, axis=1) / divisor
    return out


def tomogram_from_wigner(w_grid: WignerGrid, x_out: Grid1D,
                         phi_grid: Grid1D,
                         cfg: NumericConfig = DEFAULT) -> OpticalTomogram:
    """Optical tomogram as line integrals of the Wigner function along
    rotated frames (Radon projection with the 1/(2*pi) normalization)."""
    vals = _project(w_grid.values, w_grid.q_grid, w_grid.p_grid,
                    x_out, phi_grid, two_pi_norm=True, cfg=cfg)
    return OpticalTomogram(x_out, phi_grid, vals)


def classical_tomogram(f: PhaseDensity, x_out: Grid1D, phi_grid: Grid1D,
                       cfg: NumericConfig = DEFAULT) -> OpticalTomogram:
    """Optical tomogram of a classical phase density.

    Identical projection code path as `tomogram_from_wigner`; the only
    difference is the missing 2*pi (classical densities integrate to one
    directly).
    """
    vals = _project(f.values, f.q_grid, f.p_grid, x_out, phi_grid,
                    two_pi_norm=False, cfg=cfg)
    return OpticalTomogram(x_out, phi_grid, vals)


def _characteristic_table(tomo: OpticalTomogram, k: np.ndarray) -> np.ndarray:
    """F(k, phi_j) = integral dX w(X, phi_j) exp(i k X), shape (n_k, n_phi)."""
    x = tomo.x_grid.points
    wts = tomo.x_grid.trapezoid_weights
    kernel = np.exp(1j * np.outer(k, x))
    return kernel @ (wts[:, None] * tomo.values)


def _ramp_filter(k: np.ndarray, taper_frac: float) -> np.ndarray:
    """|k| ramp with a cosine rolloff above taper_frac of the band edge."""
    k_max = float(np.max(np.abs(k)))
    h = np.abs(k)
    edge = taper_frac * k_max
    t = np.ones_like(h)
    above = h > edge
    t[above] = 0.5 * (1.0 + np.cos(
        math.pi * (h[above] - edge) / (k_max - edge)))
    return h * t


def _filtered_backprojection(tomo: OpticalTomogram, q_grid: Grid1D,
                             p_grid: Grid1D, cfg: NumericConfig) -> np.ndarray:
    """Invert optical samples to phase space via the Fourier-slice theorem.

    The X-Fourier transform of each column is the characteristic function
    of the target along the ray (k cos phi, k sin phi); homogeneity folds
    the full (mu, nu) plane integral into

        W(q,p) = (1/2pi) int_0^pi dphi int dk |k| F(k,phi) e^{-ik xi},
        xi = q cos phi + p sin phi,

    realized as a ramp-filtered projection g(Y, phi) interpolated along
    xi and summed over angles with the rectangle rule (the integrand is
    pi-periodic, so that rule is spectrally accurate).
    """
    n_phi = tomo.phi_grid.n_points
    if n_phi < 16:
        raise InsufficientAngles(f"{n_phi} angles; need at least 16")

    k_max = math.pi / tomo.x_grid.spacing
    n_k = cfg.k_points + (1 - cfg.k_points % 2)   # odd, so k = 0 is a node
    k = np.linspace(-k_max, k_max, n_k)
    dk = k[1] - k[0]
    f_table = _characteristic_table(tomo, k)
    filt = _ramp_filter(k, cfg.taper_frac) * dk / (2.0 * math.pi)

    # The |k| kink at the origin gives the filtered projections algebraic
    # Y^-2 tails, which the discrete k sum wraps around as a spurious
    # near-constant offset.  Split off a Gaussian reference with unit
    # characteristic value at k = 0: its ramp-filtered transform is known
    # in closed form through the Dawson function, and the residual is
    # smooth enough at k = 0 that its tails alias negligibly.
    f0 = f_table[(n_k - 1) // 2].copy()
    ref_k = np.exp(-0.25 * k * k)
    residual = f_table - np.outer(ref_k, f0)

    y_max = 1.02 * math.hypot(max(abs(q_grid.min), q_grid.max),
                              max(abs(p_grid.min), p_grid.max))
    y = np.linspace(-y_max, y_max, cfg.y_points)
    phase = np.exp(-1j * np.outer(y, k))
    g_ref = (2.0 / math.pi) * (1.0 - 2.0 * y * dawsn(y))
    g = (phase @ (filt[:, None] * residual)).real
    g += np.outer(g_ref, f0.real)

    q = q_grid.points
    p = p_grid.points
    out = np.zeros((q_grid.n_points, p_grid.n_points))
    d_phi = math.pi / n_phi
    for j in range(n_phi):
        phi = float(tomo.phi_grid.points[j])
        xi = np.add.outer(q * math.cos(phi), p * math.sin(phi))
        out += np.interp(xi.ravel(), y, g[:, j]).reshape(xi.shape)
    return out * d_phi


def _ringing_check(values, norm):
    """Reject inversion outputs whose mass or boundary behaviour is far
    outside what an admissible tomogram can produce."""
    if abs(norm - 1.0) > _RING_NORM_TOL:
        raise RingingDetected(
            f"reconstruction mass {norm:.3f} deviates from 1 by more than "
            f"{_RING_NORM_TOL}")
    peak = float(np.max(np.abs(values)))
    band = np.concatenate([
        values[:2, :].ravel(), values[-2:, :].ravel(),
        values[:, :2].ravel(), values[:, -2:].ravel()])
    boundary = float(np.max(np.abs(band)))
    if peak > 0 and boundary > _RING_BOUNDARY_FRAC * peak:
        raise RingingDetected(
            f"boundary amplitude {boundary:.3e} exceeds "
            f"{_RING_BOUNDARY_FRAC} of the peak {peak:.3e}")


def wigner_from_tomogram(tomo: OpticalTomogram, q_grid: Grid1D,
                         p_grid: Grid1D,
                         cfg: NumericConfig = DEFAULT) -> WignerGrid:
    """Wigner function from optical samples by filtered back-projection.

    Raises InsufficientAngles below 16 angles and RingingDetected when the
    output mass or boundary oscillation reveal an inadmissible input.
    """
    vals = _filtered_backprojection(tomo, q_grid, p_grid, cfg)
    w = WignerGrid(q_grid, p_grid, vals)
    _ringing_check(vals, w.norm())
    return w


def phase_density_from_tomogram(tomo: OpticalTomogram, q_grid: Grid1D,
                                p_grid: Grid1D,
                                cfg: NumericConfig = DEFAULT) -> PhaseDensity:
    """Classical phase density from optical samples.

    Same back-projection kernel as `wigner_from_tomogram` divided by 2*pi,
    plus the classical admissibility requirement: the result must be
    nonnegative (up to 1e-3 of its maximum), otherwise the tomogram is
    quantum and NegativityDetected is raised.
    """
    vals = _filtered_backprojection(tomo, q_grid, p_grid, cfg) / (2.0 * math.pi)
    inner = trapezoid(vals, dx=p_grid.spacing, axis=1)
    norm = float(trapezoid(inner, dx=q_grid.spacing))
    _ringing_check(vals, norm)
    vmin, vmax = float(np.min(vals)), float(np.max(vals))
    if vmin < -_NEGATIVITY_FRAC * vmax:
        raise NegativityDetected(
            f"minimum {vmin:.3e} below -{_NEGATIVITY_FRAC} * max {vmax:.3e}; "
            "tomogram is not classically admissible")
    # Residual negatives are inside the admissibility tolerance; clip them
    # so the returned density satisfies its own invariants.
    return PhaseDensity(q_grid, p_grid, np.clip(vals, 0.0, None))


def density_from_tomogram(tomo: OpticalTomogram,
                          x_grid: Grid1D | None = None,
                          cfg: NumericConfig = DEFAULT) -> DensityKernel:
    """Coordinate density matrix from optical samples.

    rho(X, X') = (1/2pi) int dmu F(|(mu, nubar)|, phi(mu, nubar))
                 * exp(-i mu (X + X')/2),   nubar = X - X',

    where F is the characteristic function of the tomogram, extended from
    the optical circle by homogeneity: a frame in the lower half plane is
    the conjugate at the antipodal angle.  The mu integral is truncated at
    the configured radial cutoff; the result is Hermitized after an
    asymmetry check.
    """
    if tomo.phi_grid.n_points < 16:
        raise InsufficientAngles(
            f"{tomo.phi_grid.n_points} angles; need at least 16")
    grid = x_grid or tomo.x_grid
    x = grid.points
    n = grid.n_points

    k_hi = math.hypot(cfg.radial_cutoff, x[-1] - x[0]) * 1.01
    k_tab = np.linspace(0.0, k_hi, 512)
    f_tab = _characteristic_table(tomo, k_tab)          # (n_k, n_phi)
    n_phi = tomo.phi_grid.n_points
    d_phi = math.pi / n_phi
    # Close the interpolation ring: F(k, pi) = conj F(k, 0).
    f_ring = np.concatenate([f_tab, f_tab[:, :1].conj()], axis=1)
    dk_tab = k_tab[1] - k_tab[0]

    def f_lookup(kq, phiq):
        ik = np.clip(kq / dk_tab, 0, len(k_tab) - 1.001)
        ip = np.clip(phiq / d_phi, 0, n_phi - 1e-9)
        i0, p0 = np.floor(ik).astype(int), np.floor(ip).astype(int)
        tk, tp = ik - i0, ip - p0
        v = ((1 - tk) * (1 - tp) * f_ring[i0, p0]
             + tk * (1 - tp) * f_ring[i0 + 1, p0]
             + (1 - tk) * tp * f_ring[i0, p0 + 1]
             + tk * tp * f_ring[i0 + 1, p0 + 1])
        return v

    mu = np.linspace(-cfg.radial_cutoff, cfg.radial_cutoff,
                     cfg.radial_points)
    dmu = mu[1] - mu[0]
    w_mu = np.full(mu.size, dmu)
    w_mu[0] = w_mu[-1] = 0.5 * dmu
    # exp(-i mu (x_i + x_j)/2) separates across the pair (i, j).
    e_half = np.exp(-0.5j * np.outer(mu, x))

    rho = np.zeros((n, n), dtype=complex)
    for d in range(-(n - 1), n):
        i = np.arange(max(0, d), min(n, n + d))
        jdx = i - d
        nu_bar = x[i[0]] - x[jdx[0]]
        k_d = np.hypot(mu, nu_bar)
        if nu_bar >= 0.0:
            # atan2 lands in [0, pi]; the ring table covers phi = pi as
            # the conjugate of the phi = 0 column.
            f_vals = f_lookup(k_d, np.arctan2(nu_bar, mu))
        else:
            # Lower half plane: F(k; mu, nu) = conj F(k; -mu, -nu).
            f_vals = np.conj(f_lookup(k_d, np.arctan2(-nu_bar, -mu)))
        coeff = (w_mu * f_vals) / (2.0 * math.pi)
        rho[i, jdx] = np.einsum("m,mi,mi->i", coeff,
                                e_half[:, i], e_half[:, jdx])

    asym = float(np.max(np.abs(rho - rho.conj().T)))
    if asym > 1e-3:
        raise NonHermitianResult(
            f"reconstructed kernel asymmetry {asym:.2e} exceeds 1e-3")
    rho = 0.5 * (rho + rho.conj().T)
    return DensityKernel(grid, rho)


def wigner_from_density(rho: DensityKernel, q_grid: Grid1D, p_grid: Grid1D
                        ) -> WignerGrid:
    """Wigner function from the density kernel.

    W(q, p) = integral du rho(q + u/2, q - u/2) exp(-i p u), sampled with
    bilinear interpolation of the kernel along anti-diagonals.  A Hermitian
    kernel gives a real result; an imaginary residue above 1e-6 raises
    ComplexResidue.
    """
    x = rho.x_grid.points
    u_half = x[-1] - x[0]
    n_u = 2 * rho.x_grid.n_points - 1
    u = np.linspace(-u_half, u_half, n_u)
    du = u[1] - u[0]

    q = q_grid.points
    a = np.add.outer(q, 0.5 * u)   # first kernel argument
    b = np.add.outer(q, -0.5 * u)  # second kernel argument
    ia = (a - rho.x_grid.min) / rho.x_grid.spacing
    ib = (b - rho.x_grid.min) / rho.x_grid.spacing
    coords = [ia.ravel(), ib.ravel()]
    slab = (map_coordinates(rho.values.real, coords, order=1, cval=0.0)
            + 1j * map_coordinates(rho.values.imag, coords, order=1, cval=0.0)
            ).reshape(a.shape)

    w_u = np.full(n_u, du)
    w_u[0] = w_u[-1] = 0.5 * du
    kernel = np.exp(-1j * np.outer(u, p_grid.points)) * w_u[:, None]
    w_complex = slab @ kernel

    residue = float(np.max(np.abs(w_complex.imag)))
    if residue > 1e-6:
        raise ComplexResidue(
            f"imaginary residue {residue:.2e} exceeds 1e-6; "
            "input kernel is not Hermitian")
    return WignerGrid(q_grid, p_grid, w_complex.real)
