"""Closed-form state library: oscillator eigenstates, coherent states and
mollified point states, each as an analytic tomogram evaluator.

These evaluators are the oracles the quadrature code is tested against.
Hermite and Laguerre polynomials are evaluated by three-term recurrences
with the Gaussian folded into the starting value, so number states up to
n = 64 stay inside double-precision range.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import AnalyticTomogram, Grid1D, SymplecticFrame, WaveFunction
from .errors import ComplexResidue, GridTooNarrow

MAX_FOCK = 64
MAX_COHERENT_AMPLITUDE = 8.0

_COHERENT_RESIDUE_TOL = 1e-12


@dataclass(frozen=True)
class FockLabel:
    """Number-state label."""

    n: int

    def __post_init__(self):
        if not 0 <= self.n <= MAX_FOCK:
            raise ValueError(f"n must lie in [0, {MAX_FOCK}], got {self.n}")


@dataclass(frozen=True)
class CoherentLabel:
    """Coherent-state label."""

    alpha: complex

    def __post_init__(self):
        if abs(self.alpha) > MAX_COHERENT_AMPLITUDE:
            raise ValueError(
                f"|alpha| must not exceed {MAX_COHERENT_AMPLITUDE}")


def _fock_n(n) -> int:
    if isinstance(n, FockLabel):
        return n.n
    label = FockLabel(int(n))
    return label.n


def _coherent_alpha(a) -> complex:
    if isinstance(a, CoherentLabel):
        return complex(a.alpha)
    label = CoherentLabel(complex(a))
    return label.alpha


def hermite_functions(n_max: int, x: np.ndarray) -> np.ndarray:
    """Orthonormal oscillator eigenfunctions h_0..h_n_max at points x.

    h_n(x) = H_n(x) exp(-x^2/2) / sqrt(2^n n! sqrt(pi)), generated by the
    stable recurrence h_{n+1} = x*sqrt(2/(n+1))*h_n - sqrt(n/(n+1))*h_{n-1}.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1, x.size))
    out[0] = math.pi ** -0.25 * np.exp(-0.5 * x ** 2)
    if n_max >= 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    for n in range(1, n_max):
        out[n + 1] = (x * math.sqrt(2.0 / (n + 1)) * out[n]
                      - math.sqrt(n / (n + 1.0)) * out[n - 1])
    return out


def laguerre(n: int, x: np.ndarray) -> np.ndarray:
    """Laguerre polynomial L_n(x) by the three-term recurrence."""
    x = np.asarray(x, dtype=float)
    if n == 0:
        return np.ones_like(x)
    prev = np.ones_like(x)
    cur = 1.0 - x
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 - x) * cur - k * prev) / (k + 1)
    return cur


def fock_wavefunction(n, grid: Grid1D) -> WaveFunction:
    """Normalized oscillator eigenfunction sampled on `grid`.

    The grid must span at least [-2*sqrt(2n+1), 2*sqrt(2n+1)], twice the
    classical turning point, so the tails are negligible at the stated
    normalization tolerance.
    """
    n = _fock_n(n)
    need = 2.0 * math.sqrt(2 * n + 1)
    if grid.min > -need or grid.max < need:
        raise GridTooNarrow(
            f"grid [{grid.min}, {grid.max}] does not span +-{need:.3f}")
    values = hermite_functions(n, grid.points)[n].astype(complex)
    return WaveFunction(grid, values)


def fock_tomogram(n) -> AnalyticTomogram:
    """Marginal distribution of number state n.

    w_n(X, mu, nu) = h_n(X/sqrt(s))^2 / sqrt(s) with s = mu^2 + nu^2 and
    h_n the orthonormal Hermite function; it depends on the frame only
    through s, which is what makes number states stationary under frame
    rotations.
    """
    n = _fock_n(n)

    def evaluator(x, mu, nu):
        s = mu * mu + nu * nu
        root = math.sqrt(s)
        h = hermite_functions(n, np.asarray(x, float) / root)[n]
        return h * h / root

    return AnalyticTomogram(evaluator)


def fock_tomogram_fourier(n, k: float, frame: SymplecticFrame) -> float:
    """Fourier component (in X) of the number-state tomogram.

    Returns (1/2pi) exp(-k^2 s/4) L_n(k^2 s/2) with s = mu^2 + nu^2; at
    k = 0 this is 1/(2pi) for every n, which encodes normalization.
    """
    n = _fock_n(n)
    s = frame.mu ** 2 + frame.nu ** 2
    u = k * k * s / 2.0
    val = math.exp(-u / 2.0) * float(laguerre(n, np.array([u]))[0])
    return val / (2.0 * math.pi)


def coherent_tomogram(a) -> AnalyticTomogram:
    """Marginal distribution of the coherent state with amplitude alpha.

    The five-term complex exponent is evaluated directly in complex
    arithmetic; its imaginary part cancels identically, and the residue
    is checked against 1e-12 to guard against transcription errors.
    The result is a Gaussian in X with mean sqrt(2)*(Re a * mu + Im a * nu)
    and variance (mu^2 + nu^2)/2.
    """
    alpha = _coherent_alpha(a)
    alpha_c = alpha.conjugate()
    amp2 = abs(alpha) ** 2

    def evaluator(x, mu, nu):
        x = np.asarray(x, dtype=float)
        s = mu * mu + nu * nu
        zp = nu + 1j * mu
        zm = nu - 1j * mu
        exponent = (-amp2 - x * x / s
                    + alpha ** 2 * zp ** 2 / (2 * s)
                    + alpha_c ** 2 * zm ** 2 / (2 * s)
                    - 1j * math.sqrt(2.0) * alpha * x * zp / s
                    + 1j * math.sqrt(2.0) * alpha_c * x * zm / s)
        residue = float(np.max(np.abs(exponent.imag))) if np.ndim(exponent) else abs(exponent.imag)
        if residue > _COHERENT_RESIDUE_TOL * max(1.0, float(np.max(np.abs(exponent.real)))):
            raise ComplexResidue(
                f"coherent exponent imaginary residue {residue:g}")
        return np.exp(exponent.real) / math.sqrt(math.pi * s)

    return AnalyticTomogram(evaluator)


def classical_point_tomogram(x0: float, p0: float, eps: float) -> AnalyticTomogram:
    """Mollified point state: Gaussian of width eps*sqrt(mu^2+nu^2)
    centered at mu*x0 + nu*p0.

    The width scales with the frame radius so the evaluator satisfies the
    same homogeneity law as true tomograms; eps -> 0 recovers the sharp
    line delta(X - mu*x0 - nu*p0).
    """
    if eps <= 0:
        raise ValueError("eps must be positive")

    def evaluator(x, mu, nu):
        x = np.asarray(x, dtype=float)
        s = mu * mu + nu * nu
        width = eps * math.sqrt(s)
        center = mu * x0 + nu * p0
        z = (x - center) / width
        return np.exp(-z * z) / (width * math.sqrt(math.pi))

    return AnalyticTomogram(evaluator)


def white_noise_tomogram_pairing(a, n_max: int) -> float:
    """Sum of transition probabilities from a coherent state into number
    states 0..n_max.

    Completeness of the number states makes the sum approach one as n_max
    grows; the white-noise sum of all number-state tomograms is itself not
    normalizable, so completeness is only ever tested in this paired form.
    """
    from .stats import transition_probability

    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    coh = coherent_tomogram(a)
    total = 0.0
    for n in range(n_max + 1):
        total += transition_probability(coh, fock_tomogram(n))
    return total
