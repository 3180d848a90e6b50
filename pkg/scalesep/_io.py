"""
File formats: state files, verdict reports, the alpha-sweep CSV and sampled tomograms.

JSON floats are written with Python's shortest round-trip ``repr``; the sweep CSV
fixes nine significant digits so that its output diffs cleanly.
"""
import csv
import json
import pathlib

import numpy as np

from ._api import Error, StateFileError
from ._data import (Diagnostics, DispersionMatrix, GridSpec, SampledTomogram, ScalingVector, Status,
                    SweepConfig, TwoModeCoeffs, Verdict)
from .matrices import symmetrize_validate


__all__ = ["read_state", "write_state", "verdict_report", "verdict_from_report", "write_alpha_csv",
           "write_sampled", "read_sampled", "dumps"]


ALPHA_CSV_HEADER = ("alpha", "det_cx_timereversal", "status")


def dumps(obj):
    """Deterministic JSON: sorted keys, shortest round-trip floats."""
    return json.dumps(obj, indent=4, sort_keys=True)


def _load_json(path):
    try:
        with open(path) as f:
            return json.load(f)
    except OSError as e:
        raise StateFileError(f"cannot read {path}: {e.strerror or e}") from e
    except json.JSONDecodeError as e:
        raise StateFileError(f"{path} is not valid JSON: {e}") from e


def read_state(path):
    """
    :param path: a JSON file ``{"n_modes": N, "mean": [...], "cov": [[...], ...]}``
    :rtype: :class:`scalesep.DispersionMatrix`
    :raises StateFileError: if the file cannot be read or does not describe a state
    """
    data = _load_json(path)
    try:
        n_modes, mean, cov = data["n_modes"], data.get("mean"), data["cov"]
    except (KeyError, TypeError, AttributeError) as e:
        raise StateFileError(f"{path} needs the keys n_modes and cov") from e

    try:
        V = DispersionMatrix(symmetrize_validate(cov), mean)
    except (Error, ValueError, TypeError) as e:
        raise StateFileError(f"{path} does not hold a valid state: {e}") from e
    if V.n_modes != n_modes:
        raise StateFileError(f"{path} declares {n_modes} modes but cov has dimension {V.dim}")
    return V


def write_state(V, path):
    """Write ``V`` (with its mean) as a state file."""
    data = {"n_modes": V.n_modes, "mean": V.mean.tolist(), "cov": V.matrix.tolist()}
    pathlib.Path(path).write_text(dumps(data) + "\n")


def verdict_report(verdict, version, tolerance, grid, mode=None):
    """
    :param verdict: the verdict
    :type verdict: :class:`scalesep.Verdict`
    :param version: version of the tool that produced it
    :param tolerance: eigenvalue threshold used for the verdict
    :param grid: the sweep configuration
    :type grid: :class:`scalesep.SweepConfig`
    :param mode: the mode tested against the rest, ``None`` for the two-mode test
    :returns: a JSON-ready dict
    """
    coeffs = verdict.diagnostics.coeffs
    return {
        "version": version,
        "mode": mode,
        "status": verdict.status.value,
        "witness": None if verdict.witness is None else verdict.witness.x.tolist(),
        "min_det": verdict.min_det,
        "min_eig": verdict.min_eig,
        "diagnostics": {
            "coeffs": None if coeffs is None else {"A": coeffs.A, "B": coeffs.B, "C": coeffs.C},
            "discriminant": verdict.diagnostics.discriminant,
            "simon_lhs": verdict.diagnostics.simon_lhs,
            "simon_rhs": verdict.diagnostics.simon_rhs,
        },
        "tolerance": tolerance,
        "grid": {
            "x_min": grid.x_min,
            "x_max": grid.x_max,
            "points_per_sign": grid.points_per_sign,
            "spacing": grid.spacing,
            "include_time_reversal": grid.include_time_reversal,
        },
    }


def verdict_from_report(report):
    """Inverse of :func:`verdict_report`: ``(verdict, tolerance, grid)``."""
    try:
        coeffs = report["diagnostics"]["coeffs"]
        diagnostics = Diagnostics(coeffs=None if coeffs is None else TwoModeCoeffs(**coeffs),
                                  discriminant=report["diagnostics"]["discriminant"],
                                  simon_lhs=report["diagnostics"]["simon_lhs"],
                                  simon_rhs=report["diagnostics"]["simon_rhs"])
        witness = report["witness"]
        verdict = Verdict(status=Status(report["status"]),
                          witness=None if witness is None else ScalingVector(witness),
                          min_det=report["min_det"],
                          min_eig=report["min_eig"],
                          diagnostics=diagnostics)
        return verdict, report["tolerance"], SweepConfig(**report["grid"])
    except (KeyError, TypeError, ValueError) as e:
        raise StateFileError(f"malformed verdict report: {e}") from e


def write_alpha_csv(rows, file):
    """Write :func:`scalesep.gaussian.alpha_sweep` rows to an open text file."""
    writer = csv.writer(file, lineterminator="\n")
    writer.writerow(ALPHA_CSV_HEADER)
    for row in rows:
        writer.writerow((f"{row.alpha:.9g}", f"{row.det:.9g}", row.status.value))


def _sidecar(path):
    return pathlib.Path(path).with_suffix(".json")


def write_sampled(st, path):
    """
    Write a sampled tomogram as a CSV of ``X1[,X2,...],density`` rows (grid points in
    row-major order) and a JSON sidecar ``{mu, nu, grid}`` next to it.
    """
    path = pathlib.Path(path)
    n = st.grid.ndim
    X = st.grid.mesh().reshape(-1, n)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow([f"X{i + 1}" for i in range(n)] + ["density"])
        for point, value in zip(X, st.values.ravel()):
            writer.writerow([repr(float(x)) for x in point] + [repr(float(value))])

    sidecar = {"mu": st.mu.tolist(), "nu": st.nu.tolist(),
               "grid": {"lo": list(st.grid.lo), "hi": list(st.grid.hi), "count": list(st.grid.count)}}
    _sidecar(path).write_text(dumps(sidecar) + "\n")


def read_sampled(path):
    """Read a sampled tomogram written by :func:`write_sampled`."""
    meta = _load_json(_sidecar(path))
    try:
        grid = GridSpec(**meta["grid"])
        with open(path, newline="") as f:
            reader = csv.reader(f)
            header = next(reader)
            if header[-1] != "density" or len(header) != grid.ndim + 1:
                raise StateFileError(f"{path} has an unexpected header {header}")
            values = np.array([float(row[-1]) for row in reader])
        return SampledTomogram(meta["mu"], meta["nu"], grid, values.reshape(grid.count))
    except OSError as e:
        raise StateFileError(f"cannot read {path}: {e.strerror or e}") from e
    except (KeyError, TypeError, ValueError, StopIteration) as e:
        raise StateFileError(f"malformed sampled tomogram {path}: {e}") from e
