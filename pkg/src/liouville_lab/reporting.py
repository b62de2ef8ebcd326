"""Report serialization: JSON payloads with symbolic constants,
fixed-schema CSV emitters, and the deterministic run envelope.

Payloads are reproducible byte for byte for identical inputs; wall
time lives only in the envelope around the payload.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
import math

import numpy as np

from . import __version__


def sym_const(symbol, value):
    """A float annotated with its exact symbolic form, e.g.
    {"symbol": "8*pi", "value": 25.13...}."""
    return {"symbol": symbol, "value": float(value)}


EIGHT_PI_CONST = sym_const("8*pi", 8.0 * math.pi)
FOUR_PI_CONST = sym_const("4*pi", 4.0 * math.pi)


def to_jsonable(obj):
    """Recursively convert dataclasses, numpy scalars and arrays to
    plain JSON types."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name))
                for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


def payload_json(payload) -> str:
    """Deterministic JSON: sorted keys, no whitespace variation."""
    return json.dumps(to_jsonable(payload), sort_keys=True,
                      separators=(",", ":"))


def config_hash(config_dict) -> str:
    return hashlib.sha256(payload_json(config_dict).encode()).hexdigest()[:16]


@dataclasses.dataclass(frozen=True)
class RunReport:
    command: str
    inputs: dict
    results: dict
    wall_time: float
    version: str
    config_digest: str

    def envelope_json(self, indent=2) -> str:
        body = {
            "command": self.command,
            "inputs": to_jsonable(self.inputs),
            "results": to_jsonable(self.results),
            "version": self.version,
            "config_hash": self.config_digest,
            "wall_time": self.wall_time,
        }
        return json.dumps(body, sort_keys=True, indent=indent)

    def payload(self) -> str:
        """Everything except wall time; identical runs agree here."""
        body = {
            "command": self.command,
            "inputs": to_jsonable(self.inputs),
            "results": to_jsonable(self.results),
            "version": self.version,
            "config_hash": self.config_digest,
        }
        return json.dumps(body, sort_keys=True, separators=(",", ":"))


def make_report(command, inputs, results, wall_time, config_dict) -> RunReport:
    return RunReport(command=command, inputs=inputs, results=results,
                     wall_time=float(wall_time), version=__version__,
                     config_digest=config_hash(config_dict))


# ---------------------------------------------------------------------------
# CSV schemas
# ---------------------------------------------------------------------------

def _rows_to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(x)) for x in row])
    return buf.getvalue()


def profile_csv(profile) -> str:
    """Schema ``r,value,derivative``; derivative column uses the
    profile's derivative contract (synthesized if needed)."""
    r = profile.grid.nodes
    v = np.asarray(profile.value(r), dtype=float)
    if profile.has_derivative_data:
        d = np.asarray(profile.derivative(r), dtype=float)
    else:
        d = np.full_like(v, math.nan)
    return _rows_to_csv(["r", "value", "derivative"], zip(r, v, d))


def levels_csv(levels) -> str:
    """Schema ``t,k,mu,monotone_q`` from a LevelFunctions report."""
    return _rows_to_csv(["t", "k", "mu", "monotone_q"],
                        zip(levels.thresholds, levels.k_of_t,
                            levels.mu_of_t, levels.monotone_q))


def shoot_csv(result) -> str:
    """Schema ``r,v,dv`` from a ShootResult profile."""
    return profile_csv(result.profile).replace("r,value,derivative",
                                               "r,v,dv", 1)


def sweep_csv(report) -> str:
    """Schema ``a0,beta,pohozaev_residual,tail_slope``."""
    return _rows_to_csv(
        ["a0", "beta", "pohozaev_residual", "tail_slope"],
        ((row.a0, row.beta, row.pohozaev_residual, row.tail_slope)
         for row in report.rows))


def read_profile_csv(path):
    """Load a ``r,value[,derivative]`` CSV into a RadialProfile."""
    from .radial import RadialGrid, RadialProfile
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        for row in reader:
            rows.append([float(x) for x in row[:3]])
    data = np.asarray(rows, dtype=float)
    grid = RadialGrid(data[:, 0])
    derivs = None
    if data.shape[1] >= 3 and np.all(np.isfinite(data[:, 2])):
        derivs = data[:, 2]
    return RadialProfile.from_samples(grid, data[:, 1], derivatives=derivs)
