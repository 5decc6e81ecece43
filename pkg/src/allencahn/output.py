"""Snapshot images and run output files.

Images are binary PGM (``P5``): an ASCII header ``P5\\n<width> <height>\\n255\\n``
followed by one unsigned byte per pixel, rows top to bottom. A pixel is
``round((φ + 1) / 2 * 255)`` clipped to [0, 255], so -1 is black and +1 is
white. Columns run along x and rows along y with the largest y at the top.
3D fields are imaged on the z mid-plane ``k = nz // 2``.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .grid import ScalarField, dump_field


def field_to_gray(field: ScalarField) -> np.ndarray:
    """Interior (2D) or z mid-plane (3D) mapped to uint8, shaped (rows=y, cols=x)."""
    phi = np.asarray(field.interior, dtype=np.float64)
    if phi.ndim == 3:
        phi = phi[:, :, phi.shape[2] // 2]
    gray = np.clip(np.rint((phi + 1.0) * 127.5), 0, 255).astype(np.uint8)
    return np.ascontiguousarray(gray.T[::-1])


def write_pgm(gray: np.ndarray, path) -> Path:
    path = Path(path)
    height, width = gray.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
        fh.write(gray.astype(np.uint8).tobytes())
    return path


def read_pgm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    parts = data.split(maxsplit=4)
    if parts[0] != b"P5":
        raise ValueError(f"{path}: not a binary PGM")
    width, height, maxval = int(parts[1]), int(parts[2]), int(parts[3])
    if maxval != 255:
        raise ValueError(f"{path}: only 8-bit PGM supported")
    pixels = np.frombuffer(parts[4][: width * height], dtype=np.uint8)
    return pixels.reshape(height, width)


def write_snapshot(field: ScalarField, path, dump_format: str | None = "binary") -> list[Path]:
    """Write ``<path>.pgm`` and, unless ``dump_format`` is None, ``<path>.raw``."""
    path = Path(path)
    written = [write_pgm(field_to_gray(field), path.with_suffix(".pgm"))]
    if dump_format:
        written.append(dump_field(field, path.with_suffix(".raw"), dump_format))
    return written
