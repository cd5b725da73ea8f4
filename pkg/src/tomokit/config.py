"""Numeric defaults shared across the toolkit.

All grid sizes, truncation radii and guard thresholds live here so they
are documented once instead of being tuned per call site.  The defaults
assume hbar = 1, unit mass and unit frequency, and 256-512 point grids
on [-8, 8]; they are known to hold for Fock states n <= 5 and coherent
amplitudes |alpha| <= 2.

A JSON file pointed to by the TOMO_CONFIG environment variable (or an
explicit path) may override any field; CLI flags override the file.
"""
from __future__ import annotations

import dataclasses
import json
import os


@dataclasses.dataclass
class NumericConfig:
    # Standard quadrature window for X and phase-space axes.
    x_min: float = -8.0
    x_max: float = 8.0
    n_x: int = 257
    n_phi: int = 64

    # Wavefunction sampling used when building quadrature inputs.
    psi_half_width: float = 10.0
    psi_points: int = 2049

    # Filtered back-projection: ramp filter |k| with a cosine taper above
    # taper_frac of the Nyquist frequency; k and Y are the conjugate grids.
    taper_frac: float = 0.8
    k_points: int = 1025
    y_points: int = 3073
    wigner_points: int = 513

    # Kernel grid for density-matrix reconstruction; re-projections of the
    # kernel are computed on a 16-angle subset because finer angles would
    # alias on a grid this size.
    density_points: int = 513
    density_check_angles: int = 16

    # Polar truncation for overlap integrals over the full (mu, nu) plane;
    # the tail of the radial integrand at radial_cutoff must stay below
    # tail_tol or the integral is reported as diverged.
    radial_cutoff: float = 12.0
    radial_points: int = 385
    overlap_angles: int = 128
    tail_tol: float = 1e-4

    # Estimated bilinear-interpolation error (per projected column) above
    # which phase-space projections refuse to run.
    interp_error_tol: float = 1e-4

    # Finite-difference step for residual and eigenvalue checks; chosen so
    # truncation error dominates double-precision round-off.
    fd_step: float = 1e-4

    # Fixed step for the fourth-order integration of linear invariants.
    ode_dt: float = 1e-3

    # Mollifier width used for delta-like point states.
    delta_width: float = 0.05

    # Phase-space grid for classical Liouville evolution.
    liouville_points: int = 513

    # Determinism knobs surfaced by the CLI.
    seed: int = 42
    threads: int = 1


ENV_VAR = "TOMO_CONFIG"


def load_config(path: str | None = None) -> NumericConfig:
    """Build a NumericConfig from defaults plus an optional JSON overlay.

    `path` wins over the TOMO_CONFIG environment variable.  Unknown keys
    in the file raise KeyError so typos do not silently do nothing.
    """
    cfg = NumericConfig()
    source = path or os.environ.get(ENV_VAR)
    if not source:
        return cfg
    with open(source, "r", encoding="utf-8") as fh:
        overrides = json.load(fh)
    valid = {f.name for f in dataclasses.fields(NumericConfig)}
    for key, value in overrides.items():
        if key not in valid:
            raise KeyError(f"unknown config key: {key!r}")
        setattr(cfg, key, value)
    return cfg


DEFAULT = NumericConfig()
