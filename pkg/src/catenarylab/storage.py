"""Flat-file formats: trajectory CSV, classification JSON, run configs.

CSV columns, in order: s, r, dr, kappa, J, x, y with a mandatory header and
LF line endings; floats carry 17 significant digits so a parse reproduces the
written doubles bit for bit.  Every downstream check is recomputable from the
file alone.  JSON reports follow a published schema that rejects unknown
fields; optional values are absent, never null.  All writes go through a
temp-file rename so readers never see partial output.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from dataclasses import asdict
from pathlib import Path

import numpy as np
import jsonschema

from .classify import ClassificationReport, Regime
from .conservation import momentum
from .model import curvature, to_cartesian
from .trajectory import SolverConfig, StopReason, Trajectory

__all__ = [
    "CSV_COLUMNS",
    "REPORT_SCHEMA",
    "atomic_write_text",
    "write_trajectory_csv",
    "read_trajectory_csv",
    "trajectory_provenance",
    "write_provenance_json",
    "report_to_dict",
    "report_from_dict",
    "validate_report",
    "write_report_json",
    "read_report_json",
    "load_run_config",
]

CSV_COLUMNS = ("s", "r", "dr", "kappa", "J", "x", "y")

_SOLVER_SCHEMA = {
    "type": "object",
    "properties": {
        "span": {"type": "number"},
        "rel_tol": {"type": "number"},
        "abs_tol": {"type": "number"},
        "eps_unit": {"type": "number"},
        "eps_origin": {"type": "number"},
        "v_max": {"type": "number"},
        "max_samples": {"type": "integer"},
        "ds_max": {"type": "number"},
        "max_step": {"type": "number"},
        "endgame_delta": {"type": "number"},
        "method": {"type": "string"},
    },
    "required": ["span", "rel_tol", "abs_tol", "eps_unit", "eps_origin", "v_max"],
    "additionalProperties": False,
}

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "alpha": {"type": "number"},
        "r0": {"type": "number"},
        "regime": {"enum": [r.value for r in Regime]},
        "period": {"type": "number"},
        "extrema": {
            "type": "array",
            "items": {"type": "number"},
            "minItems": 2,
            "maxItems": 2,
        },
        "blowup_angle": {"type": "number"},
        "orthogonality_defect": {"type": "number"},
        "momentum_drift": {"type": "number"},
        "angular_extent": {"type": "number"},
        "stop_reason": {"enum": [r.value for r in StopReason]},
        "notes": {"type": "string"},
        "solver": _SOLVER_SCHEMA,
    },
    "required": ["alpha", "r0", "regime", "momentum_drift", "stop_reason", "solver"],
    "additionalProperties": False,
}


def atomic_write_text(path, text: str) -> None:
    """Write text via temp file + rename; newline handling is the caller's."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_trajectory_csv(traj: Trajectory, path) -> None:
    """Emit the sample table with derived columns (curvature, momentum, x, y)."""
    from .dynamics import second_derivative

    ddr = second_derivative(traj.params, traj.r, traj.dr)
    kappa = curvature(traj.r, traj.dr, ddr)
    j = momentum(traj.params, traj.r, traj.dr)
    xy = to_cartesian(traj.samples())
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for i in range(traj.n):
        writer.writerow(
            [
                _fmt(traj.s[i]),
                _fmt(traj.r[i]),
                _fmt(traj.dr[i]),
                _fmt(kappa[i]),
                _fmt(j[i]),
                _fmt(xy[i, 0]),
                _fmt(xy[i, 1]),
            ]
        )
    atomic_write_text(path, buf.getvalue())


def read_trajectory_csv(path) -> dict[str, np.ndarray]:
    """Parse a trajectory CSV back into named float columns."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != CSV_COLUMNS:
            raise ValueError(f"unexpected CSV header {header!r}")
        rows = [[float(x) for x in row] for row in reader if row]
    data = np.asarray(rows, dtype=float)
    if data.ndim != 2 or data.shape[1] != len(CSV_COLUMNS):
        raise ValueError("malformed trajectory CSV")
    return {name: data[:, k] for k, name in enumerate(CSV_COLUMNS)}


def trajectory_provenance(traj: Trajectory) -> dict:
    """Sidecar metadata: what produced the CSV."""
    return {
        "alpha": traj.params.alpha,
        "r0": traj.r0,
        "stop_reason": traj.stop_reason.value,
        "angular_extent": traj.angular_extent,
        "samples": traj.n,
        "solver": asdict(traj.config),
    }


def write_provenance_json(traj: Trajectory, path) -> None:
    atomic_write_text(path, json.dumps(trajectory_provenance(traj), indent=2) + "\n")


def report_to_dict(report: ClassificationReport) -> dict:
    """JSON form of a report; optional fields are omitted when absent."""
    out = {
        "alpha": report.alpha,
        "r0": report.r0,
        "regime": report.regime.value,
        "momentum_drift": report.conservation_drift,
        "angular_extent": report.angular_extent,
        "stop_reason": report.stop_reason.value,
        "solver": asdict(report.solver),
    }
    if report.period is not None:
        out["period"] = report.period
    if report.extrema is not None:
        out["extrema"] = [report.extrema[0], report.extrema[1]]
    if report.blowup_angle is not None:
        out["blowup_angle"] = report.blowup_angle
    if report.orthogonality_defect is not None:
        out["orthogonality_defect"] = report.orthogonality_defect
    if report.notes:
        out["notes"] = report.notes
    validate_report(out)
    return out


def report_from_dict(data: dict) -> ClassificationReport:
    validate_report(data)
    solver = SolverConfig(**data["solver"])
    extrema = data.get("extrema")
    return ClassificationReport(
        alpha=data["alpha"],
        r0=data["r0"],
        regime=Regime(data["regime"]),
        angular_extent=data.get("angular_extent", 0.0),
        conservation_drift=data["momentum_drift"],
        stop_reason=StopReason(data["stop_reason"]),
        solver=solver,
        period=data.get("period"),
        extrema=tuple(extrema) if extrema is not None else None,
        blowup_angle=data.get("blowup_angle"),
        orthogonality_defect=data.get("orthogonality_defect"),
        notes=data.get("notes", ""),
    )


def validate_report(data: dict) -> None:
    """Schema validation; unknown fields are rejected."""
    jsonschema.validate(data, REPORT_SCHEMA)


def write_report_json(report: ClassificationReport, path) -> None:
    atomic_write_text(path, json.dumps(report_to_dict(report), indent=2) + "\n")


def read_report_json(path) -> ClassificationReport:
    with open(path) as fh:
        return report_from_dict(json.load(fh))


def load_run_config(path) -> dict:
    """Flat JSON config whose keys mirror the CLI flags."""
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError("run config must be a JSON object of flag values")
    return data
