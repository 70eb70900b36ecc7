"""CSV / JSON serialization and the device config format.

CSV: comma separated, header row, LF endings, '.' decimal separator, values
written with 17 significant digits so parsing them back is lossless.
JSON: UTF-8 with lexicographically sorted keys for diffability.
All file writes are atomic (temp file in the target directory + rename).
"""
from __future__ import annotations

import csv
import json
import os
import tempfile

import numpy as np

from .errors import HledError, NonUniformTimeBase
from .model import (
    DeviceParams,
    GasReference,
    Geometry,
    MembraneParams,
    ThermalParams,
)


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def format_float(x: float) -> str:
    return format(float(x), ".17g")


def write_csv(path: str, columns: dict) -> None:
    """Write named equal-length columns; round-trips exactly through read_csv."""
    names = list(columns)
    arrays = [np.asarray(columns[n]) for n in names]
    lengths = {len(a) for a in arrays}
    if len(lengths) > 1:
        raise HledError("CSV columns must have equal lengths")
    lines = [",".join(names)]
    for row in zip(*arrays):
        lines.append(",".join(format_float(v) for v in row))
    _atomic_write(path, "\n".join(lines) + "\n")


def read_csv(path: str) -> dict:
    """Read a CSV written by write_csv; returns name -> float array."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise HledError(f"empty CSV: {path}") from None
        rows = [[float(v) for v in row] for row in reader if row]
    if not rows:
        raise HledError(f"CSV has no data rows: {path}")
    data = np.asarray(rows)
    return {name: data[:, i] for i, name in enumerate(header)}


def write_json(path: str, obj) -> None:
    _atomic_write(path, json.dumps(obj, sort_keys=True, indent=2) + "\n")


def uniform_dt(times: np.ndarray, rel_tol: float = 1e-6) -> float:
    """Sample interval of a uniformly spaced time column; raises otherwise."""
    times = np.asarray(times, dtype=float)
    if times.size < 2:
        raise NonUniformTimeBase("need at least two samples")
    steps = np.diff(times)
    dt = float(steps[0])
    if dt <= 0 or np.any(np.abs(steps - dt) > rel_tol * dt):
        raise NonUniformTimeBase("time column is not uniformly spaced")
    return dt


# ---------------------------------------------------------------------------
# Device config: a JSON document mirroring DeviceParams one-to-one.
# Unknown keys are a hard error so typos in physics constants cannot pass
# silently.

_SECTIONS = {
    "geometry": (Geometry, ("d_aperture", "d_absorber", "t_absorber", "t_membrane", "V0")),
    "gas": (GasReference, ("P0", "T0")),
    "thermal": (ThermalParams, ("R_abs", "C_abs", "kappa", "epsilon")),
    "membrane": (MembraneParams, ("k_eff", "volume_feedback")),
}


def device_to_dict(device: DeviceParams) -> dict:
    out = {}
    for section, (_, fields) in _SECTIONS.items():
        group = getattr(device, section)
        out[section] = {name: getattr(group, name) for name in fields}
    return out


def device_from_dict(data: dict, base: DeviceParams) -> DeviceParams:
    """Build a device from a config dict, defaulting omitted fields to base."""
    unknown = set(data) - set(_SECTIONS)
    if unknown:
        raise HledError(f"unknown config section(s): {', '.join(sorted(unknown))}")
    kwargs = {}
    for section, (cls, fields) in _SECTIONS.items():
        base_group = getattr(base, section)
        group_data = data.get(section, {})
        bad = set(group_data) - set(fields)
        if bad:
            raise HledError(
                f"unknown config key(s) in {section}: {', '.join(sorted(bad))}"
            )
        values = {name: group_data.get(name, getattr(base_group, name)) for name in fields}
        kwargs[section] = cls(**values)
    return DeviceParams(**kwargs)
