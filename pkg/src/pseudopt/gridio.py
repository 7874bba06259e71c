"""File formats shared by the solvers, the CLI and downstream plotting.

CSV: comma separated, one header row, LF endings, UTF-8.
JSON: UTF-8, insertion-ordered keys, floats rounded to 12 significant
digits so identical configs reproduce byte-identical files.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

__all__ = [
    "phi_nodes",
    "round12",
    "dump_json",
    "complex_record",
    "write_phi_grid_csv",
    "read_phi_grid_csv",
    "write_columns_csv",
    "read_columns_csv",
]


def phi_nodes(n: int) -> np.ndarray:
    """Uniform periodic azimuthal grid phi_j = 2 pi j / n, j = 0..n-1."""
    if n < 2:
        raise ValueError(f"grid needs at least 2 nodes, got {n}")
    return 2.0 * np.pi * np.arange(n) / n


def round12(value):
    """Round floats (recursively) to 12 significant digits for stable output."""
    if isinstance(value, bool):
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if not math.isfinite(v):
            return v
        return float(f"{v:.12g}")
    if isinstance(value, (complex, np.complexfloating)):
        return complex_record(complex(value))
    if isinstance(value, dict):
        return {k: round12(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [round12(v) for v in value]
    return value


def complex_record(z: complex) -> dict:
    return {"re": round12(float(z.real)), "im": round12(float(z.imag))}


def dump_json(obj, path: str | Path) -> None:
    text = json.dumps(round12(obj), indent=2, ensure_ascii=False, sort_keys=False)
    Path(path).write_text(text + "\n", encoding="utf-8", newline="\n")


def _fmt(v: float) -> str:
    return f"{float(v):.12g}"


def write_columns_csv(path: str | Path, header: list[str], columns) -> None:
    """Write equal-length columns under the given header."""
    cols = [np.asarray(c) for c in columns]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in zip(*cols):
            w.writerow([_fmt(v) for v in row])


def read_columns_csv(path: str | Path, expect_header: list[str] | None = None):
    with open(path, "r", encoding="utf-8", newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        rows = [[float(v) for v in row] for row in r if row]
    if expect_header is not None and header != expect_header:
        raise ValueError(f"{path}: expected header {expect_header}, found {header}")
    data = np.asarray(rows, dtype=float)
    if data.size == 0:
        return header, [np.empty(0) for _ in header]
    return header, [data[:, i] for i in range(data.shape[1])]


def write_phi_grid_csv(path: str | Path, phi: np.ndarray, values: np.ndarray,
                       excluded: np.ndarray | None = None) -> None:
    """Azimuthal complex grid as (phi, re, im); excluded samples are omitted."""
    phi = np.asarray(phi, dtype=float)
    values = np.asarray(values, dtype=complex)
    keep = np.ones(len(phi), dtype=bool)
    if excluded is not None:
        keep = ~np.asarray(excluded, dtype=bool)
    write_columns_csv(path, ["phi", "re", "im"],
                      [phi[keep], values[keep].real, values[keep].imag])


def read_phi_grid_csv(path: str | Path):
    _, cols = read_columns_csv(path, ["phi", "re", "im"])
    phi, re, im = cols
    return phi, re + 1j * im


def require_uniform_phi(phi: np.ndarray) -> int:
    """Check that phi samples form the full uniform periodic grid 2 pi j/n.

    Files written with excluded samples (division exclusion zones) have
    holes and must not be fed back into the periodic solvers as-is.
    """
    phi = np.asarray(phi, dtype=float)
    n = len(phi)
    if n < 8:
        raise ValueError(f"phi grid too small ({n} samples)")
    expected = phi_nodes(n)
    if np.max(np.abs(phi - expected)) > 1e-9:
        raise ValueError(
            "phi samples do not form the uniform periodic grid 2*pi*j/n "
            "(holes from excluded samples, or non-uniform spacing)"
        )
    return n
