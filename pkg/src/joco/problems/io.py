"""Plain-text matrix files for checked-in problem constants.

Format: one header line `name rows cols`, then whitespace-separated
float64 values written with 17 significant digits so they round-trip
exactly. A manifest file lists the sha256 of every constant file; loads
verify against it.
"""

from __future__ import annotations

import hashlib
from importlib import resources
from pathlib import Path

import numpy as np

MANIFEST_NAME = "manifest.txt"


def format_matrix(name: str, values: np.ndarray) -> str:
    values = np.atleast_2d(np.asarray(values, dtype=np.float64))
    rows, cols = values.shape
    lines = [f"{name} {rows} {cols}"]
    for r in range(rows):
        lines.append(" ".join(format(v, ".17g") for v in values[r]))
    return "\n".join(lines) + "\n"


def write_matrix(path: Path, name: str, values: np.ndarray) -> None:
    Path(path).write_text(format_matrix(name, values), encoding="ascii")


def parse_matrix(text: str) -> tuple[str, np.ndarray]:
    lines = text.strip().splitlines()
    header = lines[0].split()
    if len(header) != 3:
        raise ValueError("matrix header must be: name rows cols")
    name, rows, cols = header[0], int(header[1]), int(header[2])
    flat = []
    for line in lines[1:]:
        flat.extend(float(v) for v in line.split())
    values = np.array(flat, dtype=np.float64).reshape(rows, cols)
    return name, values


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("ascii")).hexdigest()


def _read_data_text(fname: str) -> str:
    return (resources.files("joco.problems") / "data" / fname).read_text(encoding="ascii")


def load_manifest() -> dict[str, str]:
    entries = {}
    for line in _read_data_text(MANIFEST_NAME).strip().splitlines():
        digest, fname = line.split()
        entries[fname] = digest
    return entries


def load_constant(fname: str) -> np.ndarray:
    """Load a constant matrix from package data, verifying its checksum."""
    text = _read_data_text(fname)
    manifest = load_manifest()
    if fname not in manifest:
        raise ValueError(f"constant file not in manifest: {fname}")
    digest = sha256_text(text)
    if digest != manifest[fname]:
        raise ValueError(f"checksum mismatch for {fname}: {digest} != {manifest[fname]}")
    _, values = parse_matrix(text)
    return values
