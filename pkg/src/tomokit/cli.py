"""Command-line surface.

Verbs: state, reconstruct, evolve, overlap, spin-tomogram,
spin-reconstruct, check.  Outputs are CSV plus a JSON manifest per
artifact; all commands are deterministic (fixed reduction orders, RNG
only behind --seed, no wall-clock anywhere in the outputs).

Exit codes: 0 success, 1 check failure, 2 usage or parse error,
3 numeric error (the error class name goes to stderr).
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import checks, evolution, io, library, spin, transforms
from .config import DEFAULT, NumericConfig, load_config
from .core import (Grid1D, OpticalTomogram, SpinState, SpinTomogram,
                   angle_grid, sample_tomogram, validate)
from .errors import ToolkitError, UnknownState
from .stats import transition_probability

_USAGE_EXIT = 2
_NUMERIC_EXIT = 3


def _parse_half_integer(text: str) -> float:
    if "/" in text:
        num, den = text.split("/", 1)
        return float(num) / float(den)
    return float(text)


def _load_spin_state(j_text: str, path: str) -> SpinState:
    j = _parse_half_integer(j_text)
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    re = np.asarray(data["rho_re"], dtype=float)
    im = np.asarray(data.get("rho_im", np.zeros_like(re)), dtype=float)
    return SpinState(j, re + 1j * im)


def parse_state_descriptor(text: str):
    """Parse fock:n | coherent:re,im | classical-point:x0,p0[,eps] |
    spin:j:matrix-file into a state object."""
    kind, _, rest = text.partition(":")
    try:
        if kind == "fock":
            return library.fock_tomogram(int(rest))
        if kind == "coherent":
            parts = [float(v) for v in rest.split(",")]
            if len(parts) == 1:
                parts.append(0.0)
            if len(parts) != 2:
                raise ValueError("coherent takes re[,im]")
            return library.coherent_tomogram(complex(*parts))
        if kind == "classical-point":
            parts = [float(v) for v in rest.split(",")]
            if len(parts) == 2:
                parts.append(DEFAULT.delta_width)
            if len(parts) != 3:
                raise ValueError("classical-point takes x0,p0[,eps]")
            return library.classical_point_tomogram(*parts)
        if kind == "spin":
            j_text, _, path = rest.partition(":")
            if not path:
                raise ValueError("spin takes j:matrix-file")
            return _load_spin_state(j_text, path)
    except (ValueError, OSError, KeyError) as exc:
        raise UnknownState(f"cannot parse state {text!r}: {exc}") from exc
    raise UnknownState(f"unknown state kind {kind!r}")


def _grids(args, cfg: NumericConfig):
    n_x = args.xpoints or cfg.n_x
    n_phi = args.angles or cfg.n_phi
    return Grid1D(cfg.x_min, cfg.x_max, n_x), angle_grid(n_phi)


def _outdir(args) -> str:
    os.makedirs(args.output, exist_ok=True)
    return args.output


def _write_tomogram(tomo: OpticalTomogram, outdir: str, stem: str,
                    extra: dict):
    io.write_manifest(tomo, os.path.join(outdir, stem + ".json"), extra)
    io.write_csv_2d(os.path.join(outdir, stem + ".csv"),
                    "X", tomo.x_grid.points, "phi", tomo.phi_grid.points,
                    tomo.values)


def _cmd_state(args, cfg: NumericConfig) -> int:
    state = parse_state_descriptor(args.descriptor)
    outdir = _outdir(args)
    if isinstance(state, SpinState):
        tomo = spin.spin_tomogram(
            state, angle_grid(args.alpha_points, 2 * math.pi),
            args.beta_nodes)
        io.write_manifest(tomo, os.path.join(outdir, "spin_tomogram.json"),
                          {"descriptor": args.descriptor, "seed": cfg.seed})
        io.write_csv_spin(os.path.join(outdir, "spin_tomogram.csv"), tomo)
        return 0
    x_grid, phi_grid = _grids(args, cfg)
    tomo = sample_tomogram(state, x_grid, phi_grid, threads=cfg.threads)
    _write_tomogram(tomo, outdir, "tomogram",
                    {"descriptor": args.descriptor, "seed": cfg.seed})
    return 0


def _cmd_reconstruct(args, cfg: NumericConfig) -> int:
    try:
        tomo = io.read_manifest(args.input)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        print(f"cannot read tomogram manifest: {exc}", file=sys.stderr)
        return _USAGE_EXIT
    if not isinstance(tomo, OpticalTomogram):
        print("input manifest is not an optical tomogram", file=sys.stderr)
        return _USAGE_EXIT
    bad = validate(tomo)
    if bad:
        print("input tomogram violates invariants: " + "; ".join(bad),
              file=sys.stderr)
        return _USAGE_EXIT
    outdir = _outdir(args)
    grid = Grid1D(cfg.x_min, cfg.x_max, cfg.wigner_points)

    if args.mode == "wigner":
        w = transforms.wigner_from_tomogram(tomo, grid, grid, cfg)
        back = transforms.tomogram_from_wigner(w, tomo.x_grid, tomo.phi_grid,
                                               cfg)
        err = float(np.linalg.norm(back.values - tomo.values)
                    / np.linalg.norm(tomo.values))
        io.write_manifest(w, os.path.join(outdir, "wigner.json"),
                          {"roundtrip_l2": err})
        io.write_csv_2d(os.path.join(outdir, "wigner.csv"), "q",
                        w.q_grid.points, "p", w.p_grid.points, w.values)
    elif args.mode == "classical":
        f = transforms.phase_density_from_tomogram(tomo, grid, grid, cfg)
        back = transforms.classical_tomogram(f, tomo.x_grid, tomo.phi_grid,
                                             cfg)
        err = float(np.linalg.norm(back.values - tomo.values)
                    / np.linalg.norm(tomo.values))
        io.write_manifest(f, os.path.join(outdir, "phase_density.json"),
                          {"roundtrip_l2": err})
        io.write_csv_2d(os.path.join(outdir, "phase_density.csv"), "q",
                        f.q_grid.points, "p", f.p_grid.points, f.values)
    else:  # density
        kernel_grid = Grid1D(cfg.x_min, cfg.x_max, cfg.density_points)
        rho = transforms.density_from_tomogram(tomo, kernel_grid, cfg)
        # Re-project on a coarse angle subset: the quadrature kernel would
        # alias at the input's finest angles on a grid this size.
        check_phi = angle_grid(cfg.density_check_angles)
        x_check = tomo.x_grid
        back = transforms.tomogram_from_density(rho, x_check, check_phi)
        ref = sample_tomogram(tomo, x_check, check_phi)
        err = float(np.linalg.norm(back.values - ref.values)
                    / np.linalg.norm(ref.values))
        io.write_manifest(rho, os.path.join(outdir, "density.json"),
                          {"roundtrip_l2": err})
        io.write_csv_2d(os.path.join(outdir, "density.csv"), "X",
                        rho.x_grid.points, "Xp", rho.x_grid.points,
                        rho.values)
    return 0


def _load_hamiltonian(text: str):
    if text == "free":
        return evolution.free_particle_hamiltonian()
    if text == "oscillator":
        return evolution.harmonic_oscillator_hamiltonian()
    with open(text, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    return evolution.constant_hamiltonian(
        np.asarray(data["B"], dtype=float),
        np.asarray(data.get("C", [0.0, 0.0]), dtype=float))


def _cmd_evolve(args, cfg: NumericConfig) -> int:
    state = parse_state_descriptor(args.descriptor)
    if isinstance(state, SpinState):
        print("evolve applies to continuous-variable states", file=sys.stderr)
        return _USAGE_EXIT
    t = args.time
    if args.hamiltonian == "free":
        prop = evolution.free_motion(t)
    elif args.hamiltonian == "oscillator":
        prop = evolution.oscillator(t)
    else:
        ham = _load_hamiltonian(args.hamiltonian)
        prop = evolution.quadratic_propagator(ham, t, dt=cfg.ode_dt)
    moved = evolution.propagate_tomogram(state, prop)
    x_grid, phi_grid = _grids(args, cfg)
    tomo = sample_tomogram(moved, x_grid, phi_grid, threads=cfg.threads)
    outdir = _outdir(args)
    _write_tomogram(tomo, outdir, "evolved", {
        "descriptor": args.descriptor,
        "hamiltonian": args.hamiltonian,
        "t": t,
        "lambda": prop.invariants.lam.tolist(),
        "delta": prop.invariants.delta.tolist(),
        "seed": cfg.seed,
    })
    return 0


def _cmd_overlap(args, cfg: NumericConfig) -> int:
    t1 = parse_state_descriptor(args.state1)
    t2 = parse_state_descriptor(args.state2)
    if isinstance(t1, SpinState) or isinstance(t2, SpinState):
        print("overlap applies to continuous-variable states",
              file=sys.stderr)
        return _USAGE_EXIT
    value = transition_probability(t1, t2, cfg)
    print(json.dumps({"p12": value}))
    return 0


def _cmd_spin_tomogram(args, cfg: NumericConfig) -> int:
    state = parse_state_descriptor(args.descriptor)
    if not isinstance(state, SpinState):
        print("spin-tomogram needs a spin:j:file descriptor",
              file=sys.stderr)
        return _USAGE_EXIT
    tomo = spin.spin_tomogram(
        state, angle_grid(args.alpha_points, 2 * math.pi), args.beta_nodes)
    outdir = _outdir(args)
    io.write_manifest(tomo, os.path.join(outdir, "spin_tomogram.json"),
                      {"descriptor": args.descriptor, "seed": cfg.seed})
    io.write_csv_spin(os.path.join(outdir, "spin_tomogram.csv"), tomo)
    return 0


def _cmd_spin_reconstruct(args, cfg: NumericConfig) -> int:
    try:
        tomo = io.read_manifest(args.input)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        print(f"cannot read spin tomogram manifest: {exc}", file=sys.stderr)
        return _USAGE_EXIT
    if not isinstance(tomo, SpinTomogram):
        print("input manifest is not a spin tomogram", file=sys.stderr)
        return _USAGE_EXIT
    state = spin.reconstruct_spin_state(tomo)
    outdir = _outdir(args)
    io.write_manifest(state, os.path.join(outdir, "spin_state.json"),
                      {"seed": cfg.seed})
    io.write_csv_2d(os.path.join(outdir, "spin_state.csv"), "m",
                    np.arange(state.dim), "mp", np.arange(state.dim),
                    state.rho)
    return 0


def _cmd_check(args, cfg: NumericConfig) -> int:
    results = checks.run_suite(args.suite, cfg)
    report = {
        "suite": args.suite,
        "checks": [{"check": r.name, "value": r.value,
                    "tolerance": r.tolerance, "pass": r.passed}
                   for r in results],
        "pass": all(r.passed for r in results),
    }
    print(json.dumps(report, indent=1))
    return 0 if report["pass"] else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tomokit",
        description="Tomographic probability toolkit: build, transform, "
                    "evolve and check marginal distributions.")
    parser.add_argument("--config", help="JSON config file "
                        "(default: $TOMO_CONFIG)")
    parser.add_argument("--seed", type=int, help="seed for random-state "
                        "checks (default 42)")
    parser.add_argument("--threads", type=int,
                        help="parallel workers for sampling loops")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_grid_flags(p):
        p.add_argument("--angles", type=int, help="number of phi angles")
        p.add_argument("--xpoints", type=int, help="number of X samples")

    def add_spin_flags(p):
        p.add_argument("--alpha-points", type=int, default=16,
                       help="uniform alpha samples (>= 4j+2)")
        p.add_argument("--beta-nodes", type=int, default=10,
                       help="Gauss-Legendre beta nodes (>= 2j+2)")

    p_state = sub.add_parser("state", help="sample a library state")
    p_state.add_argument("descriptor")
    add_grid_flags(p_state)
    add_spin_flags(p_state)
    p_state.add_argument("-o", "--output", required=True)
    p_state.set_defaults(func=_cmd_state)

    p_rec = sub.add_parser("reconstruct",
                           help="invert a tomogram manifest")
    p_rec.add_argument("input")
    p_rec.add_argument("--mode", choices=("wigner", "density", "classical"),
                       default="wigner")
    p_rec.add_argument("-o", "--output", required=True)
    p_rec.set_defaults(func=_cmd_reconstruct)

    p_evo = sub.add_parser("evolve", help="propagate a state in time")
    p_evo.add_argument("descriptor")
    p_evo.add_argument("--hamiltonian", default="oscillator",
                       help="free | oscillator | JSON file with B, C")
    p_evo.add_argument("-t", "--time", type=float, required=True)
    add_grid_flags(p_evo)
    p_evo.add_argument("-o", "--output", required=True)
    p_evo.set_defaults(func=_cmd_evolve)

    p_ov = sub.add_parser("overlap",
                          help="transition probability of two states")
    p_ov.add_argument("state1")
    p_ov.add_argument("state2")
    p_ov.set_defaults(func=_cmd_overlap)

    p_st = sub.add_parser("spin-tomogram", help="sample a spin tomogram")
    p_st.add_argument("descriptor")
    add_spin_flags(p_st)
    p_st.add_argument("-o", "--output", required=True)
    p_st.set_defaults(func=_cmd_spin_tomogram)

    p_sr = sub.add_parser("spin-reconstruct",
                          help="rebuild a spin density matrix")
    p_sr.add_argument("input")
    p_sr.add_argument("-o", "--output", required=True)
    p_sr.set_defaults(func=_cmd_spin_reconstruct)

    p_chk = sub.add_parser("check", help="run an invariant suite")
    p_chk.add_argument("suite", choices=("all", "cv", "spin", "evolution"))
    p_chk.set_defaults(func=_cmd_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
    except (OSError, ValueError, KeyError) as exc:
        print(f"bad config: {exc}", file=sys.stderr)
        return _USAGE_EXIT
    if args.seed is not None:
        cfg.seed = args.seed
    if args.threads is not None:
        cfg.threads = args.threads
    try:
        return args.func(args, cfg)
    except UnknownState as exc:
        print(f"UnknownState: {exc}", file=sys.stderr)
        return _USAGE_EXIT
    except ToolkitError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return _NUMERIC_EXIT


if __name__ == "__main__":
    sys.exit(main())
