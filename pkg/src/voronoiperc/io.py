"""Point-set persistence: CSV with an `x,y` header plus a JSON sidecar
carrying the window, model and seed.  Floats are written with repr so a
write/read round trip reproduces the configuration bit for bit.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .geometry import Configuration, Rect


def sidecar_path(path: str | Path) -> Path:
    return Path(path).with_suffix(".json")


def write_points(config: Configuration, path: str | Path) -> Path:
    """Writes the CSV at `path` and the metadata sidecar next to it."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["x", "y"])
        for x, y in config.points:
            writer.writerow([repr(float(x)), repr(float(y))])
    meta = {
        "window": {
            "rho": config.window.rho,
            "area": config.window.area,
            "center": list(config.window.center),
        },
        "model": config.model,
        "seed": config.seed,
        "count": config.n,
    }
    side = sidecar_path(path)
    with open(side, "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2)
        fh.write("\n")
    return side


def read_points(path: str | Path) -> Configuration:
    """Reads a CSV written by write_points; the sidecar is required."""
    path = Path(path)
    side = sidecar_path(path)
    if not side.exists():
        raise FileNotFoundError(f"metadata sidecar {side} is missing")
    with open(side, encoding="utf-8") as fh:
        meta = json.load(fh)
    win = meta["window"]
    window = Rect(rho=float(win["rho"]), area=float(win["area"]), center=tuple(win["center"]))
    rows = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["x", "y"]:
            raise ValueError(f"{path} must start with an 'x,y' header")
        for row in reader:
            if not row:
                continue
            rows.append((float(row[0]), float(row[1])))
    pts = np.array(rows, dtype=np.float64).reshape(-1, 2)
    if "count" in meta and meta["count"] != len(pts):
        raise ValueError(f"sidecar count {meta['count']} != {len(pts)} rows in {path}")
    return Configuration(points=pts, window=window, model=meta.get("model", "user"), seed=meta.get("seed"))
