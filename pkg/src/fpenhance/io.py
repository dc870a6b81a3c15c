"""File codecs: PNG rasters, OFD1/FQM1 field files, MIN1 minutiae text.

Field files are explicit little-endian float32 with a 4-byte magic so the
round trip is bit-exact across platforms.
"""

from __future__ import annotations

import math
import struct

import numpy as np
from PIL import Image

from .core import Minutia, MinutiaKind

MAX_DIM = 1 << 20

ORIENTATION_MAGIC = b"OFD1"
FREQUENCY_MAGIC = b"FQM1"


class CodecError(ValueError):
    pass


# ---------------------------------------------------------------------------
# PNG rasters

def read_image(path) -> np.ndarray:
    try:
        with Image.open(path) as im:
            return np.asarray(im.convert("L"), dtype=np.uint8)
    except (OSError, SyntaxError) as exc:
        raise CodecError(f"{path}: cannot read PNG image: {exc}") from exc


def write_image(path, image) -> None:
    img = np.asarray(image, dtype=np.uint8)
    Image.fromarray(img, mode="L").save(path, format="PNG")


def read_mask(path) -> np.ndarray:
    return read_image(path) > 127


def write_mask(path, mask) -> None:
    write_image(path, np.where(np.asarray(mask, bool), 255, 0).astype(np.uint8))


# ---------------------------------------------------------------------------
# Binary field files (OFD1 / FQM1)

def _read_field(path, magic: bytes) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] != magic:
        raise CodecError(
            f"{path}: bad magic at byte offset 0: expected {magic!r}, got {data[:4]!r}"
        )
    if len(data) < 12:
        raise CodecError(f"{path}: truncated header at byte offset {len(data)}")
    width, height = struct.unpack_from("<II", data, 4)
    if not (1 <= width <= MAX_DIM and 1 <= height <= MAX_DIM):
        raise CodecError(f"{path}: dimension overflow at byte offset 4: {width}x{height}")
    expected = 12 + 4 * width * height
    if len(data) != expected:
        raise CodecError(
            f"{path}: truncated payload at byte offset {len(data)} (expected {expected} bytes)"
        )
    values = np.frombuffer(data, dtype="<f4", offset=12).reshape(height, width)
    if not np.all(np.isfinite(values)):
        bad = int(np.flatnonzero(~np.isfinite(values))[0])
        raise CodecError(f"{path}: non-finite value at byte offset {12 + 4 * bad}")
    return values.astype(np.float32)


def _write_field(path, magic: bytes, values) -> None:
    arr = np.ascontiguousarray(values, dtype="<f4")
    if arr.ndim != 2:
        raise CodecError("field must be a 2D array")
    if not np.all(np.isfinite(arr)):
        raise CodecError("field contains non-finite values")
    height, width = arr.shape
    with open(path, "wb") as fh:
        fh.write(magic)
        fh.write(struct.pack("<II", width, height))
        fh.write(arr.tobytes())


def read_orientation(path) -> np.ndarray:
    return _read_field(path, ORIENTATION_MAGIC)


def write_orientation(path, angles) -> None:
    _write_field(path, ORIENTATION_MAGIC, angles)


def read_frequency(path) -> np.ndarray:
    return _read_field(path, FREQUENCY_MAGIC)


def write_frequency(path, freqs) -> None:
    _write_field(path, FREQUENCY_MAGIC, freqs)


# ---------------------------------------------------------------------------
# MIN1 minutiae text

def read_minutiae(path) -> list[Minutia]:
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise CodecError(f"{path}: line 1: empty file")
    header = lines[0].split()
    if len(header) != 2 or header[0] != "MIN1":
        raise CodecError(f"{path}: line 1: bad header {lines[0]!r}")
    try:
        count = int(header[1])
    except ValueError as exc:
        raise CodecError(f"{path}: line 1: bad count {header[1]!r}") from exc
    if count < 0 or len(lines) < 1 + count:
        raise CodecError(
            f"{path}: line {len(lines)}: truncated file, expected {count} minutiae"
        )
    out = []
    for i in range(count):
        lineno = i + 2
        parts = lines[1 + i].split()
        if len(parts) != 4:
            raise CodecError(f"{path}: line {lineno}: expected 4 fields, got {len(parts)}")
        try:
            x, y, direction = float(parts[0]), float(parts[1]), float(parts[2])
        except ValueError as exc:
            raise CodecError(f"{path}: line {lineno}: bad number") from exc
        if not all(math.isfinite(v) for v in (x, y, direction)):
            raise CodecError(f"{path}: line {lineno}: non-finite value")
        try:
            kind = MinutiaKind(parts[3])
        except ValueError as exc:
            raise CodecError(f"{path}: line {lineno}: bad kind {parts[3]!r}") from exc
        out.append(Minutia(x, y, direction, kind))
    return out


def write_minutiae(path, minutiae) -> None:
    minutiae = list(minutiae)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"MIN1 {len(minutiae)}\n")
        for m in minutiae:
            fh.write(f"{m.x!r} {m.y!r} {m.direction!r} {m.kind.value}\n")
