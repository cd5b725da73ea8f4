"""JSON manifests and CSV export for every container type.

Manifest layout: {"schema": 1, "type": <name>, "grids": {...},
"values": row-major list (complex fields split into value_re/value_im),
"meta": {"units": "hbar=1"}}.  CSV files for 2-D real fields carry the
header `# columns: <axis1>,<axis2>,value`; complex fields get paired
value_re,value_im columns and the spin tomogram adds the leading m axis.
Floats are written with 12 significant digits so equal states produce
byte-identical files.
"""
from __future__ import annotations

import json

import numpy as np

from .core import (DensityKernel, Grid1D, OpticalTomogram, PhaseDensity,
                   SpinState, SpinTomogram, WaveFunction, WignerGrid,
                   m_values)

SCHEMA = 1
_META = {"units": "hbar=1"}
_FMT = "%.12g"


def _grid_dict(g: Grid1D) -> dict:
    return {"min": g.min, "max": g.max, "n_points": g.n_points}


def _grid_from(d: dict) -> Grid1D:
    return Grid1D(d["min"], d["max"], d["n_points"])


def to_manifest(obj, extra: dict | None = None) -> dict:
    """Serialize a container to a JSON-ready dict."""
    man = {"schema": SCHEMA, "type": type(obj).__name__, "meta": dict(_META)}
    if isinstance(obj, OpticalTomogram):
        man["grids"] = {"x": _grid_dict(obj.x_grid),
                        "phi": _grid_dict(obj.phi_grid)}
        man["values"] = obj.values.ravel().tolist()
    elif isinstance(obj, (WignerGrid, PhaseDensity)):
        man["grids"] = {"q": _grid_dict(obj.q_grid),
                        "p": _grid_dict(obj.p_grid)}
        man["values"] = obj.values.ravel().tolist()
    elif isinstance(obj, DensityKernel):
        man["grids"] = {"x": _grid_dict(obj.x_grid)}
        man["values_re"] = np.real(obj.values).ravel().tolist()
        man["values_im"] = np.imag(obj.values).ravel().tolist()
    elif isinstance(obj, WaveFunction):
        man["grids"] = {"x": _grid_dict(obj.x_grid)}
        man["values_re"] = np.real(obj.values).tolist()
        man["values_im"] = np.imag(obj.values).tolist()
    elif isinstance(obj, SpinState):
        man["grids"] = {}
        man["j"] = obj.j
        man["values_re"] = np.real(obj.rho).ravel().tolist()
        man["values_im"] = np.imag(obj.rho).ravel().tolist()
    elif isinstance(obj, SpinTomogram):
        man["grids"] = {"alpha": _grid_dict(obj.alpha_grid)}
        man["j"] = obj.j
        man["beta_nodes"] = np.asarray(obj.beta_nodes).tolist()
        man["beta_weights"] = (None if obj.beta_weights is None
                               else np.asarray(obj.beta_weights).tolist())
        man["values"] = obj.values.ravel().tolist()
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")
    if extra:
        man.update(extra)
    return man


def from_manifest(man: dict):
    """Rebuild a container from a manifest dict."""
    kind = man.get("type")
    grids = man.get("grids", {})
    if kind == "OpticalTomogram":
        xg, pg = _grid_from(grids["x"]), _grid_from(grids["phi"])
        vals = np.asarray(man["values"], float).reshape(
            xg.n_points, pg.n_points)
        return OpticalTomogram(xg, pg, vals)
    if kind in ("WignerGrid", "PhaseDensity"):
        qg, pg = _grid_from(grids["q"]), _grid_from(grids["p"])
        vals = np.asarray(man["values"], float).reshape(
            qg.n_points, pg.n_points)
        cls = WignerGrid if kind == "WignerGrid" else PhaseDensity
        return cls(qg, pg, vals)
    if kind == "DensityKernel":
        xg = _grid_from(grids["x"])
        n = xg.n_points
        vals = (np.asarray(man["values_re"], float)
                + 1j * np.asarray(man["values_im"], float)).reshape(n, n)
        return DensityKernel(xg, vals)
    if kind == "WaveFunction":
        xg = _grid_from(grids["x"])
        vals = (np.asarray(man["values_re"], float)
                + 1j * np.asarray(man["values_im"], float))
        return WaveFunction(xg, vals)
    if kind == "SpinState":
        j = man["j"]
        n = len(m_values(j))
        vals = (np.asarray(man["values_re"], float)
                + 1j * np.asarray(man["values_im"], float)).reshape(n, n)
        return SpinState(j, vals)
    if kind == "SpinTomogram":
        j = man["j"]
        ag = _grid_from(grids["alpha"])
        nodes = np.asarray(man["beta_nodes"], float)
        weights = (None if man.get("beta_weights") is None
                   else np.asarray(man["beta_weights"], float))
        n_m = len(m_values(j))
        vals = np.asarray(man["values"], float).reshape(
            n_m, ag.n_points, len(nodes))
        return SpinTomogram(j, ag, nodes, vals, weights)
    raise TypeError(f"cannot deserialize type {kind!r}")


def write_manifest(obj, path, extra: dict | None = None):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(to_manifest(obj, extra), fh, indent=1, sort_keys=True)
        fh.write("\n")


def read_manifest(path):
    with open(path, "r", encoding="utf-8") as fh:
        return from_manifest(json.load(fh))


def _rows(names, columns, values_columns):
    yield "# columns: " + ",".join(names)
    stacked = np.column_stack(columns + values_columns)
    for row in stacked:
        yield ",".join(_FMT % v for v in row)


def write_csv_2d(path, name1, axis1, name2, axis2, values):
    """Write a 2-D field as `axis1,axis2,value` rows (complex splits
    into value_re,value_im)."""
    a1, a2 = np.meshgrid(axis1, axis2, indexing="ij")
    flat = np.asarray(values).ravel()
    if np.iscomplexobj(flat):
        names = [name1, name2, "value_re", "value_im"]
        vals = [np.real(flat), np.imag(flat)]
    else:
        names = [name1, name2, "value"]
        vals = [flat]
    with open(path, "w", encoding="utf-8") as fh:
        for line in _rows(names, [a1.ravel(), a2.ravel()], vals):
            fh.write(line + "\n")


def write_csv_spin(path, tomo: SpinTomogram):
    """Spin tomograms are 3-D; rows are m,alpha,beta,value."""
    ms = m_values(tomo.j)
    mm, aa, bb = np.meshgrid(ms, tomo.alpha_grid.points, tomo.beta_nodes,
                             indexing="ij")
    with open(path, "w", encoding="utf-8") as fh:
        for line in _rows(["m", "alpha", "beta", "value"],
                          [mm.ravel(), aa.ravel(), bb.ravel()],
                          [tomo.values.ravel()]):
            fh.write(line + "\n")
