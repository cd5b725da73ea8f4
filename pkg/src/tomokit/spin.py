"""Angular-momentum special functions and spin tomography.

Rotation matrix elements follow the convention

    D^j_{m'm}(alpha, beta, gamma) = e^{i m' gamma} d^j_{m'm}(beta) e^{i m alpha},

with the real small-d built from Jacobi polynomials in the
Condon-Shortley phase.  The phase convention is pinned by three anchors:
the spin-1/2 tomogram values cos^2(beta/2) / sin^2(beta/2), unitarity of
D, and the forward/inverse round trip of the tomography pair.

The spin tomogram is the diagonal of the rotated density matrix,

    w(m, alpha, beta) = (D rho D^dagger)_{mm}  at gamma = 0,

gamma dropping out identically.  The inverse expands the tomogram over
rotation harmonics with 3j-symbol couplings; its angle integrals are
trigonometric polynomials of bounded degree, so a uniform alpha grid of
at least 4j+2 points and a Gauss-Legendre rule in cos(beta) with at least
2j+2 nodes integrate them exactly, giving round trips at 1e-10.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import eval_jacobi, roots_legendre

from .core import Grid1D, SpinState, SpinTomogram, m_values
from .errors import (ComplexResidue, IndexOutOfRange, NonHermitianResult,
                     QuadratureTooCoarse)

__all__ = [
    "EulerAngles", "ThreeJ", "wigner_small_d", "wigner_d_matrix",
    "wigner_D", "wigner_D_matrix", "three_j", "spin_tomogram",
    "reconstruct_spin_state", "d_orthogonality_check", "gauss_legendre_beta",
    "random_spin_state",
]

_HERMITIZE_TOL = 1e-10


def _twice(x, what: str) -> int:
    t = int(round(2.0 * float(x)))
    if abs(2.0 * float(x) - t) > 1e-9:
        raise ValueError(f"{what} = {x} is not a half-integer")
    return t


@dataclass(frozen=True)
class EulerAngles:
    """Rotation parametrized as (alpha, beta, gamma)."""

    alpha: float
    beta: float
    gamma: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.alpha < 2.0 * math.pi:
            raise ValueError("alpha must lie in [0, 2*pi)")
        if not 0.0 <= self.beta <= math.pi:
            raise ValueError("beta must lie in [0, pi]")
        if not 0.0 <= self.gamma < 2.0 * math.pi:
            raise ValueError("gamma must lie in [0, 2*pi)")


@dataclass(frozen=True)
class ThreeJ:
    """Wigner 3j symbol label; selection-rule violations evaluate to 0."""

    j1: float
    j2: float
    j3: float
    m1: float
    m2: float
    m3: float

    def value(self) -> float:
        return three_j(self.j1, self.j2, self.j3, self.m1, self.m2, self.m3)


def _check_projection(j, m, what="m"):
    tj = _twice(j, "j")
    tm = _twice(m, what)
    if (tj - tm) % 2 != 0:
        raise IndexOutOfRange(f"{what} = {m} not in the ladder of j = {j}")
    if abs(tm) > tj:
        raise IndexOutOfRange(f"|{what}| = {abs(m)} exceeds j = {j}")


def wigner_small_d(j, m1, m, beta: float) -> float:
    """Real rotation matrix element d^j
    _{m1 m}(beta), Condon-Shortley phase.

    Evaluated through the Jacobi-polynomial form: with
    k = min(j+m, j-m, j+m1, j-m1) the element is

        (-1)^lam * C(2j-k, k+a)^(1/2) * C(k+b, b)^(-1/2)
        * sin(beta/2)^a * cos(beta/2)^b * P_k^{(a,b)}(cos beta),

    b = 2j - 2k - a, the branch fixing (a, lam) so that a, b >= 0.  The
    binomial prefactor uses log-gamma, so large j stay in range;
    d(beta=0) is the identity.
    """
    _check_projection(j, m1, "m1")
    _check_projection(j, m, "m")
    tj, tm1, tm = _twice(j, "j"), _twice(m1, "m1"), _twice(m, "m")
    jm = (tj + tm) // 2
    jmm = (tj - tm) // 2
    jm1 = (tj + tm1) // 2
    jmm1 = (tj - tm1) // 2
    k = min(jm, jmm, jm1, jmm1)
    if k == jm:
        a = (tm1 - tm) // 2
        lam = a
    elif k == jmm:
        a = (tm - tm1) // 2
        lam = 0
    elif k == jm1:
        a = (tm - tm1) // 2
        lam = 0
    else:
        a = (tm1 - tm) // 2
        lam = a
    b = tj - 2 * k - a
    log_pref = 0.5 * (math.lgamma(tj - k + 1) - math.lgamma(k + a + 1)
                      - math.lgamma(tj - 2 * k - a + 1)
                      - math.lgamma(k + b + 1) + math.lgamma(k + 1)
                      + math.lgamma(b + 1))
    sign = -1.0 if lam % 2 else 1.0
    half = 0.5 * beta
    base = (math.sin(half) ** a) * (math.cos(half) ** b)
    return sign * math.exp(log_pref) * base * float(
        eval_jacobi(k, a, b, math.cos(beta)))


def wigner_d_matrix(j, beta: float) -> np.ndarray:
    """Full (2j+1) x (2j+1) small-d matrix, indices m = j ... -j."""
    ms = m_values(j)
    n = len(ms)
    out = np.empty((n, n))
    for i, m1 in enumerate(ms):
        for l, m in enumerate(ms):
            out[i, l] = wigner_small_d(j, m1, m, beta)
    return out


def wigner_D(j, m1, m, angles: EulerAngles) -> complex:
    """Rotation matrix element e^{i m1 gamma} d^j_{m1 m}(beta) e^{i m alpha}."""
    d = wigner_small_d(j, m1, m, angles.beta)
    return d * np.exp(1j * (m1 * angles.gamma + m * angles.alpha))


def wigner_D_matrix(j, alpha: float, beta: float, gamma: float = 0.0
                    ) -> np.ndarray:
    """Full rotation matrix over (m1, m); unitary to machine precision."""
    ms = m_values(j)
    d = wigner_d_matrix(j, beta)
    left = np.exp(1j * ms * gamma)[:, None]
    right = np.exp(1j * ms * alpha)[None, :]
    return left * d * right


@lru_cache(maxsize=None)
def _three_j_twice(tj1: int, tj2: int, tj3: int,
                   tm1: int, tm2: int, tm3: int) -> float:
    """3j symbol on twice-integer arguments (Racah single sum)."""
    if tm1 + tm2 + tm3 != 0:
        return 0.0
    if abs(tm1) > tj1 or abs(tm2) > tj2 or abs(tm3) > tj3:
        return 0.0
    if tj3 < abs(tj1 - tj2) or tj3 > tj1 + tj2:
        return 0.0
    if (tj1 + tj2 + tj3) % 2 != 0:
        return 0.0
    if (tj1 + tm1) % 2 or (tj2 + tm2) % 2 or (tj3 + tm3) % 2:
        return 0.0

    def fl(two_n):  # log n! for twice-integer 2n
        if two_n % 2:
            raise ValueError("internal: factorial of a non-integer")
        if two_n < 0:
            raise ValueError("internal: factorial of a negative")
        return math.lgamma(two_n // 2 + 1)

    log_delta = 0.5 * (fl(tj1 + tj2 - tj3) + fl(tj1 - tj2 + tj3)
                       + fl(-tj1 + tj2 + tj3) - fl(tj1 + tj2 + tj3 + 2))
    log_norm = 0.5 * (fl(tj1 + tm1) + fl(tj1 - tm1) + fl(tj2 + tm2)
                      + fl(tj2 - tm2) + fl(tj3 + tm3) + fl(tj3 - tm3))

    t_min = max(0, (tj2 - tj3 - tm1) // 2, (tj1 - tj3 + tm2) // 2)
    t_max = min((tj1 + tj2 - tj3) // 2, (tj1 - tm1) // 2, (tj2 + tm2) // 2)
    total = 0.0
    for t in range(t_min, t_max + 1):
        log_den = (fl(2 * t) + fl(tj3 - tj2 + tm1 + 2 * t)
                   + fl(tj3 - tj1 - tm2 + 2 * t)
                   + fl(tj1 + tj2 - tj3 - 2 * t)
                   + fl(tj1 - tm1 - 2 * t) + fl(tj2 + tm2 - 2 * t))
        term = math.exp(log_delta + log_norm - log_den)
        total += -term if t % 2 else term
    phase_exp = (tj1 - tj2 - tm3) // 2
    return -total if phase_exp % 2 else total


def three_j(j1, j2, j3, m1, m2, m3) -> float:
    """Wigner 3j symbol; forbidden index combinations return exactly 0."""
    return _three_j_twice(_twice(j1, "j1"), _twice(j2, "j2"),
                          _twice(j3, "j3"), _twice(m1, "m1"),
                          _twice(m2, "m2"), _twice(m3, "m3"))


def gauss_legendre_beta(n: int):
    """Gauss-Legendre nodes/weights in cos(beta), returned as beta values.

    sum_i w_i g(beta_i) equals the integral of g(beta) sin(beta) d(beta)
    exactly for integrands polynomial in cos(beta) up to degree 2n-1.
    """
    x, w = roots_legendre(n)
    beta = np.arccos(x[::-1])
    return beta, w[::-1].copy()


def spin_tomogram(state: SpinState, alpha_grid: Grid1D, beta_grid
                  ) -> SpinTomogram:
    """Spin tomogram w(m, alpha, beta) = (D rho D^dagger)_{mm}.

    `beta_grid` may be a Grid1D (uniform sampling, forward use only) or an
    integer n requesting n Gauss-Legendre nodes in cos(beta); only the
    latter carries the weights the inverse map needs.
    """
    if isinstance(beta_grid, Grid1D):
        betas = beta_grid.points
        weights = None
    else:
        betas, weights = gauss_legendre_beta(int(beta_grid))
    alphas = alpha_grid.points
    n_m = state.dim
    vals = np.empty((n_m, len(alphas), len(betas)))
    for k, beta in enumerate(betas):
        d = wigner_d_matrix(state.j, float(beta))
        for i, alpha in enumerate(alphas):
            ms = m_values(state.j)
            right = np.exp(1j * ms * float(alpha))
            dm = d * right[None, :]
            diag = np.einsum("ab,bc,ac->a", dm, state.rho, dm.conj())
            if np.max(np.abs(diag.imag)) > 1e-12:
                raise ComplexResidue("tomogram probabilities not real")
            vals[:, i, k] = diag.real
    return SpinTomogram(state.j, alpha_grid, betas, vals, weights)


def reconstruct_spin_state(tomo: SpinTomogram) -> SpinState:
    """Invert a spin tomogram back to the density matrix.

    Expands the tomogram over rotation harmonics of order j3 <= 2j: for
    each (j3, m3) the angle integral

        I(j3, m3, m) = (1/4pi) int dalpha int sin(beta) dbeta
                       w(m, alpha, beta) e^{i m3 alpha} d^{j3}_{0 m3}(beta)

    (the gamma integral is analytic, contributing the 1/4pi) couples into

        rho_{m1' m2'} = sum_{j3 m3} (2j3+1)^2 (j j j3; m1' -m2' m3)
                        sum_m (-1)^{2j + m + m2'} (j j j3; m -m 0)
                        I(j3, m3, m).

    Exactness requires the alpha grid uniform with at least 4j+2 points
    and Gauss-Legendre beta nodes (at least 2j+2); anything less raises
    QuadratureTooCoarse.  The output is Hermitized, with the asymmetry
    asserted below 1e-10.
    """
    j = tomo.j
    tj = _twice(j, "j")
    ms = m_values(j)
    n_m = len(ms)
    n_alpha = tomo.alpha_grid.n_points
    if n_alpha < 2 * tj + 2:
        raise QuadratureTooCoarse(
            f"alpha grid has {n_alpha} points; need >= {2 * tj + 2}")
    if tomo.beta_weights is None:
        raise QuadratureTooCoarse(
            "beta nodes carry no Gauss-Legendre weights; "
            "sample the tomogram with an integer beta_grid")
    if len(tomo.beta_nodes) < tj + 2:
        raise QuadratureTooCoarse(
            f"{len(tomo.beta_nodes)} beta nodes; need >= {tj + 2}")

    alphas = tomo.alpha_grid.points
    d_alpha = 2.0 * math.pi / n_alpha
    wb = tomo.beta_weights

    rho = np.zeros((n_m, n_m), dtype=complex)
    for tj3 in range(0, 2 * tj + 2, 2):   # j3 = 0, 1, ..., 2j (integers)
        j3 = tj3 // 2
        d0 = {m3: np.array([wigner_small_d(j3, 0, m3, float(b))
                            for b in tomo.beta_nodes])
              for m3 in range(-j3, j3 + 1)}
        for m3 in range(-j3, j3 + 1):
            e_alpha = np.exp(1j * m3 * alphas) * d_alpha
            kern = np.outer(e_alpha, d0[m3] * wb)
            # I(j3, m3, m) for every m at once.
            i_vals = np.einsum("mak,ak->m", tomo.values, kern) / (4.0 * math.pi)
            weights_m = np.array([
                three_j(j, j, j3, m, -m, 0) for m in ms])
            for a, m1p in enumerate(ms):
                for bdx, m2p in enumerate(ms):
                    coupling = three_j(j, j, j3, m1p, -m2p, m3)
                    if coupling == 0.0:
                        continue
                    total = 0.0 + 0.0j
                    for mdx, m in enumerate(ms):
                        w3 = weights_m[mdx]
                        if w3 == 0.0:
                            continue
                        # (-1)^{2j + m + m2'}: the exponent is always an
                        # integer, so the sign is exact.
                        exp_int = int(round(tj + m + m2p))
                        sign = -1.0 if exp_int % 2 else 1.0
                        total += sign * w3 * i_vals[mdx]
                    rho[a, bdx] += (tj3 + 1) ** 2 * coupling * total

    asym = float(np.max(np.abs(rho - rho.conj().T)))
    if asym > _HERMITIZE_TOL:
        raise NonHermitianResult(
            f"reconstruction asymmetry {asym:.2e} exceeds {_HERMITIZE_TOL}")
    rho = 0.5 * (rho + rho.conj().T)
    return SpinState(j, rho)


def d_orthogonality_check(j1, j2, j3, idx, n_angle: int | None = None,
                          n_beta: int | None = None) -> float:
    """Quadrature of the triple-D rotation integral minus its 3j product.

    idx = (m1p, m2p, m3p, m1, m2, m3).  The integral over the full Euler
    measure of D^{j1}_{m1p m1} D^{j2}_{m2p m2} D^{j3}_{m3p m3} divided by
    8 pi^2 equals (j1 j2 j3; m1p m2p m3p)(j1 j2 j3; m1 m2 m3); the value
    returned is the signed difference, zero to quadrature accuracy.
    """
    m1p, m2p, m3p, m1, m2, m3 = idx
    j_max = max(j1, j2, j3)
    need_angle = 2 * _twice(j_max, "j") + 2
    need_beta = _twice(j_max, "j") + 2
    n_angle = need_angle if n_angle is None else n_angle
    n_beta = need_beta if n_beta is None else n_beta
    if n_angle < need_angle or n_beta < need_beta:
        raise QuadratureTooCoarse(
            f"need >= {need_angle} angles and {need_beta} beta nodes")

    alphas = 2.0 * math.pi * np.arange(n_angle) / n_angle
    gammas = alphas
    betas, wb = gauss_legendre_beta(n_beta)
    d_ang = 2.0 * math.pi / n_angle

    # Angle sums factorize: alpha couples to (m1 + m2 + m3), gamma to the
    # primed projections.
    s_alpha = np.sum(np.exp(1j * (m1 + m2 + m3) * alphas)) * d_ang
    s_gamma = np.sum(np.exp(1j * (m1p + m2p + m3p) * gammas)) * d_ang
    s_beta = float(np.sum(wb * np.array([
        wigner_small_d(j1, m1p, m1, float(b))
        * wigner_small_d(j2, m2p, m2, float(b))
        * wigner_small_d(j3, m3p, m3, float(b)) for b in betas])))
    quad = s_alpha * s_gamma * s_beta / (8.0 * math.pi ** 2)
    if abs(quad.imag) > 1e-12:
        raise ComplexResidue(f"triple-D integral residue {quad.imag:.2e}")
    product = (three_j(j1, j2, j3, m1p, m2p, m3p)
               * three_j(j1, j2, j3, m1, m2, m3))
    return float(quad.real - product)


def random_spin_state(j, rng: np.random.Generator) -> SpinState:
    """Random positive trace-one density matrix (Wishart construction)."""
    n = len(m_values(j))
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    rho = a @ a.conj().T
    rho /= np.trace(rho).real
    return SpinState(j, rho)
