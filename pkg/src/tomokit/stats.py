"""Scalar functionals of tomograms: moments, entropy, uncertainty
products, overlaps and orthogonality checks.

Overlap integrals over the full (mu, nu) plane are evaluated in polar
coordinates; homogeneity turns the X integrals into characteristic
functions, leaving a two-dimensional (radius, angle) quadrature:

    P12 = (1/2pi) int_0^2pi dphi int_0^R dr r F1(r, phi) conj(F2(r, phi)),

with F_i(k, phi) the X-Fourier transform of tomogram i on the optical
circle.  The radial truncation R and its tail test live in the config.
"""
from __future__ import annotations

import math

import numpy as np

from .config import DEFAULT, NumericConfig
from .core import (SymplecticFrame, Tomogram, WignerGrid, trapezoid)
from .errors import ComplexResidue, IntegrationDiverged, NotNormalized

__all__ = ["moment", "entropy", "uncertainty_product",
           "transition_probability", "orthogonality_matrix",
           "wigner_overlap"]

# Quadrature window (in units of the frame radius) wide enough for every
# library state with n <= 8 or |alpha| <= 2.
_X_HALF_WIDTH = 10.0
_X_POINTS = 2001

_ENTROPY_FLOOR = 1e-30
_NORM_ERROR_TOL = 1e-2
_IM_RESIDUE_TOL = 1e-3


def _scaled_axis(frame: SymplecticFrame):
    r = frame.r
    x = np.linspace(-_X_HALF_WIDTH * r, _X_HALF_WIDTH * r, _X_POINTS)
    return x


def moment(tomo: Tomogram, frame: SymplecticFrame, order: int) -> float:
    """Integral of X^order against the tomogram in the given frame.

    Order 0 is the normalization and must come out within 1e-2 of one,
    otherwise NotNormalized is raised (the tomogram does not cover its
    support on the standard window).
    """
    if order not in (0, 1, 2):
        raise ValueError("order must be 0, 1 or 2")
    x = _scaled_axis(frame)
    w = tomo.frame_values(x, frame.mu, frame.nu)
    total = float(trapezoid(w, x))
    if abs(total - 1.0) > _NORM_ERROR_TOL:
        raise NotNormalized(f"order-0 moment {total:.4f} deviates from 1")
    if order == 0:
        return total
    return float(trapezoid(w * x ** order, x))


def entropy(tomo: Tomogram, frame: SymplecticFrame) -> float:
    """Differential entropy -integral w ln w dX of one frame slice (nats).

    Bins below 1e-30 contribute nothing.  Homogeneity implies the scaling
    law S(s*mu, s*nu) = S(mu, nu) + ln|s|.
    """
    x = _scaled_axis(frame)
    w = tomo.frame_values(x, frame.mu, frame.nu)
    integrand = np.where(w > _ENTROPY_FLOOR, -w * np.log(
        np.clip(w, _ENTROPY_FLOOR, None)), 0.0)
    return float(trapezoid(integrand, x))


def uncertainty_product(tomo: Tomogram) -> float:
    """Product of the X-variances in the frames (1, 0) and (0, 1).

    Quantum-admissible tomograms satisfy the value >= 1/4; the value is
    returned regardless so inadmissible (classical point-like) inputs can
    be recognized by the caller.
    """
    product = 1.0
    for mu, nu in ((1.0, 0.0), (0.0, 1.0)):
        frame = SymplecticFrame(mu, nu)
        mean = moment(tomo, frame, 1)
        second = moment(tomo, frame, 2)
        product *= second - mean ** 2
    return product


def _characteristic_matrix(tomo: Tomogram, x: np.ndarray, wts: np.ndarray,
                           phis: np.ndarray, r: np.ndarray) -> np.ndarray:
    """F(phi_i, r_j) for a tomogram sampled on the optical circle."""
    w_cols = np.column_stack([
        tomo.frame_values(x, math.cos(p), math.sin(p)) for p in phis])
    kernel = np.exp(1j * np.outer(x, r)) * wts[:, None]
    return w_cols.T @ kernel


def transition_probability(t1: Tomogram, t2: Tomogram,
                           cfg: NumericConfig = DEFAULT) -> float:
    """Transition probability between two states from their tomograms.

    Implements the overlap of marginal distributions over all frames,
    reduced by homogeneity to the polar quadrature in the module
    docstring.  The imaginary part must cancel (ComplexResidue above
    1e-3) and the radial tail at the cutoff must be negligible
    (IntegrationDiverged above the configured tolerance).
    """
    x = np.linspace(cfg.x_min, cfg.x_max, cfg.n_x)
    dx = x[1] - x[0]
    wts = np.full(x.size, dx)
    wts[0] = wts[-1] = 0.5 * dx
    n_phi = cfg.overlap_angles
    phis = 2.0 * math.pi * np.arange(n_phi) / n_phi
    r = np.linspace(0.0, cfg.radial_cutoff, cfg.radial_points)

    f1 = _characteristic_matrix(t1, x, wts, phis, r)
    f2 = _characteristic_matrix(t2, x, wts, phis, r)
    integrand = f1 * np.conj(f2) * r[None, :]

    tail = float(np.mean(np.abs(integrand[:, -1]))) * cfg.radial_cutoff
    if tail > cfg.tail_tol:
        raise IntegrationDiverged(
            f"radial tail estimate {tail:.2e} at cutoff "
            f"{cfg.radial_cutoff}; states too broad for the truncation")

    radial = trapezoid(integrand, r, axis=1)
    # Euler-Maclaurin endpoint correction: the integrand r*F1*conj(F2) has
    # slope F1(0)*conj(F2(0)) = 1 at r = 0 for normalized states, which
    # otherwise leaves a constant h^2/12 deficit in every overlap.
    dr = r[1] - r[0]
    radial = radial + (dr * dr / 12.0) * f1[:, 0] * np.conj(f2[:, 0])
    value = complex(np.sum(radial) * (2.0 * math.pi / n_phi) / (2.0 * math.pi))
    if abs(value.imag) > _IM_RESIDUE_TOL:
        raise ComplexResidue(
            f"overlap imaginary residue {value.imag:.2e} exceeds 1e-3")
    return float(value.real)


def orthogonality_matrix(states: list, cfg: NumericConfig = DEFAULT
                         ) -> np.ndarray:
    """Matrix of pairwise transition probabilities (at most 8 states).

    Energy eigenstates give the identity; the matrix is assembled in a
    fixed row-major order so results are bit-reproducible.
    """
    if len(states) > 8:
        raise ValueError("orthogonality_matrix supports at most 8 states")
    n = len(states)
    out = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            out[i, j] = transition_probability(states[i], states[j], cfg)
    return out


def wigner_overlap(w1: WignerGrid, w2: WignerGrid) -> float:
    """Transition probability as the phase-space overlap
    (1/2pi) integral W1 W2 dq dp; the independent cross-check route for
    `transition_probability`.  Both grids must match."""
    if (w1.q_grid != w2.q_grid) or (w1.p_grid != w2.p_grid):
        raise ValueError("Wigner grids must match for the overlap")
    inner = trapezoid(w1.values * w2.values, dx=w1.p_grid.spacing, axis=1)
    return float(trapezoid(inner, dx=w1.q_grid.spacing)) / (2.0 * math.pi)
