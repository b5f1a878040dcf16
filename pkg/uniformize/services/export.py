"""Artifact writers and readers: CSV grids, JSON sidecars and reports, PGM images.

Every file is written to a temporary sibling and renamed into place. JSON is
emitted with sorted keys and no timestamps so identical runs give identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np
from PIL import Image

from uniformize.core.exceptions import ConfigurationError
from uniformize.core.grid import BOUNDARY, INTERIOR, GridDomain, GridFunction


def _atomic_write(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp_path = path.with_suffix(path.suffix + ".tmp")
    tmp_path.write_bytes(data)
    tmp_path.rename(path)


def jsonable(value):
    """Plain JSON types: complex as ``[re, im]``, non-finite floats as null."""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return jsonable(value.tolist())
    if isinstance(value, (complex, np.complexfloating)):
        return [jsonable(value.real), jsonable(value.imag)]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value) if math.isfinite(value) else None
    if hasattr(value, "value"):  # enums
        return value.value
    return value


def write_json(path: Path, data: dict) -> None:
    text = json.dumps(jsonable(data), sort_keys=True, indent=2) + "\n"
    _atomic_write(Path(path), text.encode())


def domain_metadata(domain: GridDomain) -> dict:
    return {
        "origin": [domain.origin.real, domain.origin.imag],
        "h": domain.h,
        "nx": domain.nx,
        "ny": domain.ny,
        "interior_nodes": domain.n_interior,
        "level": domain.level,
        "perturbation_steps": domain.perturbation_steps,
        "boundary_loops": len(domain.boundary_loops),
    }


def _csv_bytes(header: list[str], rows) -> bytes:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue().encode()


def _fmt(x: float) -> str:
    return repr(float(x))


def write_grid_csv(path: Path, u: GridFunction, sidecar: dict | None = None) -> None:
    """``i,j,x,y,value`` over live nodes in row-major order, plus ``<name>.json``."""
    path = Path(path)
    domain = u.domain
    ii, jj = np.nonzero(u.live_mask)
    z = domain.z[ii, jj]
    v = u.values[ii, jj]
    rows = ([int(i), int(j), _fmt(p.real), _fmt(p.imag), _fmt(x)] for i, j, p, x in zip(ii, jj, z, v))
    _atomic_write(path, _csv_bytes(["i", "j", "x", "y", "value"], rows))
    meta = {"domain": domain_metadata(domain), "puncture": list(u.puncture) if u.puncture else None}
    write_json(path.with_suffix(".json"), {**meta, **(sidecar or {})})


def read_grid_csv(path: Path, domain: GridDomain) -> np.ndarray:
    """Values of an exported grid CSV on ``domain`` (NaN where absent)."""
    values = np.full(domain.shape, np.nan)
    try:
        with open(path, newline="") as f:
            for row in csv.DictReader(f):
                i, j = int(row["i"]), int(row["j"])
                values[i, j] = float(row["value"])
    except (OSError, KeyError, ValueError, IndexError) as exc:
        raise ConfigurationError(f"Cannot read grid file {path}: {exc}") from exc
    return values


def write_map_csv(path: Path, phi: np.ndarray, domain: GridDomain) -> None:
    ii, jj = np.nonzero(domain.inside)
    z = domain.z[ii, jj]
    w = phi[ii, jj]
    rows = (
        [int(i), int(j), _fmt(p.real), _fmt(p.imag), _fmt(q.real), _fmt(q.imag)]
        for i, j, p, q in zip(ii, jj, z, w)
    )
    _atomic_write(Path(path), _csv_bytes(["i", "j", "x", "y", "re", "im"], rows))


def write_loops_csv(path: Path, domain: GridDomain) -> None:
    rows = (
        [n, _fmt(p.real), _fmt(p.imag)]
        for n, loop in enumerate(domain.boundary_loops)
        for p in loop.points
    )
    _atomic_write(Path(path), _csv_bytes(["loop_id", "x", "y"], rows))


def _pgm(gray: np.ndarray) -> bytes:
    # image rows run from the top (largest y) down; columns follow x
    image = Image.fromarray(np.ascontiguousarray(np.flipud(gray.T).astype(np.uint8)))
    buffer = io.BytesIO()
    image.save(buffer, format="PPM")
    return buffer.getvalue()


def write_mask_pgm(path: Path, domain: GridDomain) -> None:
    """0 exterior, 128 boundary-adjacent, 255 interior."""
    gray = np.zeros(domain.shape, dtype=np.uint8)
    gray[domain.mask == BOUNDARY] = 128
    gray[domain.mask == INTERIOR] = 255
    _atomic_write(Path(path), _pgm(gray))


def write_field_pgm(path: Path, values: np.ndarray, mask: np.ndarray) -> dict:
    """Affine gray rendering of a real field; returns the mapping ``gray = (v - lo) * scale``."""
    v = values[mask & np.isfinite(values)]
    lo = float(v.min()) if v.size else 0.0
    hi = float(v.max()) if v.size else 1.0
    scale = 255.0 / (hi - lo) if hi > lo else 0.0
    gray = np.zeros(values.shape, dtype=np.uint8)
    live = mask & np.isfinite(values)
    gray[live] = np.clip(np.rint((values[live] - lo) * scale), 0, 255).astype(np.uint8)
    _atomic_write(Path(path), _pgm(gray))
    return {"lo": lo, "hi": hi, "scale": scale}
