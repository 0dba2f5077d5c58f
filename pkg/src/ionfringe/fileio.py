"""Toolchain-neutral file formats: 16-bit PGM images, CSV tables, JSON
reports.  All writes go through a temp-file-and-rename so partially
written outputs never appear under the target name."""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .imaging import FringeImage


def atomic_write_bytes(path, data: bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path, text: str) -> None:
    atomic_write_bytes(path, text.encode())


def write_json(path, obj) -> None:
    atomic_write_text(path, json.dumps(obj, indent=2) + "\n")


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def write_pgm(path, img: FringeImage) -> float:
    """16-bit big-endian binary PGM, top row = largest out-of-plane angle.

    Pixel values are scaled so the image maximum maps to 65535; returns the
    applied scale (counts-or-intensity per grey level is 1/scale)."""
    pixels = np.asarray(img.pixels, dtype=float)
    top = pixels.max()
    scale = 65535.0 / top if top > 0 else 1.0
    grey = np.rint(pixels[::-1, :] * scale).astype(">u2")
    header = f"P5\n{grey.shape[1]} {grey.shape[0]}\n65535\n".encode()
    atomic_write_bytes(path, header + grey.tobytes())
    return scale


def read_pgm(path) -> np.ndarray:
    """Read a binary 16-bit PGM written by write_pgm (bottom row first)."""
    data = Path(path).read_bytes()
    parts = data.split(b"\n", 3)
    if parts[0] != b"P5":
        raise ValueError("not a binary PGM file")
    width, height = (int(v) for v in parts[1].split())
    maxval = int(parts[2])
    if maxval != 65535:
        raise ValueError(f"expected 16-bit PGM, maxval={maxval}")
    grey = np.frombuffer(parts[3], dtype=">u2", count=width * height).reshape(height, width)
    return grey[::-1, :].astype(np.int64)


def write_image_csv(path, img: FringeImage) -> None:
    """Row-major pixel matrix; axes carried in '#' header lines (radians)."""
    header = (
        f"channel: {img.channel.value}\n"
        "phi_rad: " + " ".join(repr(float(v)) for v in img.phi) + "\n"
        "phi_out_rad: " + " ".join(repr(float(v)) for v in img.phi_out)
    )
    import io

    buf = io.StringIO()
    np.savetxt(buf, img.pixels, delimiter=",", header=header)
    atomic_write_text(path, buf.getvalue())


def write_profile_csv(path, phi: np.ndarray, values: np.ndarray, stderr: np.ndarray) -> None:
    lines = ["phi_rad,value,stderr"]
    for p, v, s in zip(phi, values, stderr):
        lines.append(f"{float(p)!r},{float(v)!r},{float(s)!r}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_profile_csv(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] < 2:
        raise ValueError("profile CSV needs at least phi and value columns")
    phi = data[:, 0]
    values = data[:, 1]
    stderr = data[:, 2] if data.shape[1] > 2 else np.zeros_like(values)
    return phi, values, stderr


def write_trace_csv(path, counts: np.ndarray, bin_width: float) -> None:
    lines = [f"# bin_width_s: {bin_width!r}", "bin_index,counts"]
    for i, c in enumerate(counts):
        lines.append(f"{i},{int(c)}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_trace_csv(path) -> tuple[np.ndarray, float]:
    bin_width = None
    with open(path) as fh:
        first = fh.readline()
        if first.startswith("#") and "bin_width_s:" in first:
            bin_width = float(first.split("bin_width_s:")[1])
    rows = np.loadtxt(path, delimiter=",", comments="#", skiprows=1 if bin_width is None else 2, ndmin=2)
    counts = rows[:, 1].astype(np.int64)
    return counts, (bin_width if bin_width is not None else 5e-3)
