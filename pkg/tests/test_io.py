import math
import struct

import numpy as np
import pytest

from fpenhance import io
from fpenhance.core import Minutia, MinutiaKind


def test_image_roundtrip(tmp_path, rng):
    img = rng.integers(0, 256, (17, 23)).astype(np.uint8)
    path = tmp_path / "img.png"
    io.write_image(path, img)
    assert np.array_equal(io.read_image(path), img)


def test_mask_roundtrip_binary_values(tmp_path, rng):
    mask = rng.random((9, 11)) < 0.5
    path = tmp_path / "mask.png"
    io.write_mask(path, mask)
    assert np.array_equal(io.read_mask(path), mask)
    # foreground is stored as 255, background as 0
    raw = io.read_image(path)
    assert set(np.unique(raw)) <= {0, 255}


def test_orientation_roundtrip_bit_exact(tmp_path, rng):
    field = rng.uniform(0, np.pi, (13, 7)).astype(np.float32)
    path = tmp_path / "o.ofd"
    io.write_orientation(path, field)
    back = io.read_orientation(path)
    assert back.dtype == np.float32
    assert np.array_equal(back, field)


def test_frequency_roundtrip_bit_exact(tmp_path, rng):
    field = rng.uniform(0.05, 0.3, (5, 31)).astype(np.float32)
    path = tmp_path / "f.fqm"
    io.write_frequency(path, field)
    assert np.array_equal(io.read_frequency(path), field)


def test_field_magic_mismatch(tmp_path):
    path = tmp_path / "x.ofd"
    io.write_frequency(path, np.ones((2, 2), np.float32) * 0.1)
    with pytest.raises(io.CodecError, match="byte offset 0"):
        io.read_orientation(path)


def test_field_truncation_reports_offset(tmp_path):
    path = tmp_path / "t.ofd"
    io.write_orientation(path, np.zeros((4, 4), np.float32))
    data = path.read_bytes()
    path.write_bytes(data[:-5])
    with pytest.raises(io.CodecError, match="truncated"):
        io.read_orientation(path)


def test_field_non_finite_rejected(tmp_path):
    path = tmp_path / "n.ofd"
    payload = struct.pack("<II", 2, 1) + struct.pack("<ff", 1.0, math.inf)
    path.write_bytes(b"OFD1" + payload)
    with pytest.raises(io.CodecError, match="non-finite value at byte offset 16"):
        io.read_orientation(path)


def test_field_dimension_overflow(tmp_path):
    path = tmp_path / "d.ofd"
    path.write_bytes(b"OFD1" + struct.pack("<II", 0xFFFFFFFF, 1))
    with pytest.raises(io.CodecError, match="dimension overflow"):
        io.read_orientation(path)


def test_minutiae_roundtrip(tmp_path):
    minutiae = [
        Minutia(12.5, 40.0, 1.5708, MinutiaKind.BIFURCATION),
        Minutia(0.0, 0.0, 0.0, MinutiaKind.ENDING),
        Minutia(3.25, 7.75, 6.28, MinutiaKind.ENDING),
    ]
    path = tmp_path / "m.min"
    io.write_minutiae(path, minutiae)
    assert io.read_minutiae(path) == minutiae


def test_minutiae_line_format(tmp_path):
    path = tmp_path / "m.min"
    path.write_text("MIN1 1\n12.5 40 1.5708 B\n")
    (m,) = io.read_minutiae(path)
    assert (m.x, m.y, m.kind) == (12.5, 40.0, MinutiaKind.BIFURCATION)
    assert m.direction == pytest.approx(math.pi / 2, abs=1e-4)


def test_minutiae_truncated_reports_line(tmp_path):
    path = tmp_path / "m.min"
    path.write_text("MIN1 3\n1 2 0 E\n")
    with pytest.raises(io.CodecError, match="line"):
        io.read_minutiae(path)


def test_minutiae_bad_kind(tmp_path):
    path = tmp_path / "m.min"
    path.write_text("MIN1 1\n1 2 0 Q\n")
    with pytest.raises(io.CodecError, match="line 2"):
        io.read_minutiae(path)


def test_minutiae_bad_header(tmp_path):
    path = tmp_path / "m.min"
    path.write_text("MINX 1\n1 2 0 E\n")
    with pytest.raises(io.CodecError, match="line 1"):
        io.read_minutiae(path)
