import math

import numpy as np
import pytest

from oracles import fringe_mp
from wavecgh import build_block_lut, lut_cache_load, lut_cache_store, make_scene, point_fringe
from wavecgh.errors import CorruptFileError, StaleCacheError
from wavecgh.lut import fringe_grid, load_or_build_luts, lut_cache_path


def test_on_axis_fringe():
    s = make_scene(z=0.1)
    f = point_fringe(s, 0, 0)
    assert abs(f) == pytest.approx(10.0, rel=1e-15)
    assert f == pytest.approx(np.exp(1j * s.k * 0.1) * 10.0, rel=1e-12)


def test_fringe_symmetry():
    s = make_scene()
    a = point_fringe(s, 5, -3)
    assert a == point_fringe(s, -5, 3) == point_fringe(s, 3, 5)


def test_fringe_matches_high_precision():
    s = make_scene(532e-9, 8e-6, 0.1, 256)
    inv_r, phase, wrapped = fringe_mp(532e-9, 8e-6, 0.1, 100, 0)
    dx = 100 * s.pitch
    r = math.sqrt(dx * dx + s.z * s.z)
    assert abs(1 / r - float(inv_r)) <= 1e-12 * float(inv_r)
    assert abs(s.k * r - float(phase)) <= 1e-12 * float(phase)
    f = point_fringe(s, 100, 0)
    assert abs(abs(f) - float(inv_r)) <= 1e-12 * float(inv_r)
    dphi = abs((np.angle(f) - float(wrapped) + math.pi) % (2 * math.pi) - math.pi)
    assert dphi <= 4 * np.finfo(float).eps * float(phase)


def test_b1_lut_is_sampled_fringe(scene16):
    lut = build_block_lut(scene16, 1)
    n = scene16.plane_size
    offs = np.arange(-(n - 1), n)
    np.testing.assert_array_equal(lut.support, fringe_grid(scene16, offs[None, :], offs[:, None]))
    for dx, dy in [(0, 0), (3, -7), (-15, 15), (15, -15)]:
        inv_r, _, wrapped = fringe_mp(scene16.wavelength, scene16.pitch, scene16.z, dx, dy)
        expected = complex(float(inv_r) * np.exp(1j * float(wrapped)))
        assert lut.offset(dx, dy) == pytest.approx(expected, rel=1e-9)


def test_b1_lut_symmetries(scene16):
    s = build_block_lut(scene16, 1).support
    np.testing.assert_array_equal(s, s[:, ::-1])
    np.testing.assert_array_equal(s, s[::-1, :])
    np.testing.assert_array_equal(s, s.T)


@pytest.mark.parametrize("b", [2, 4, 8])
def test_composition_from_children(scene16, b):
    parent = build_block_lut(scene16, b).support
    child = build_block_lut(scene16, b // 2).support
    h = b // 2
    m = parent.shape[0]
    # child offsets (0,0),(0,h),(h,0),(h,h); valid where all shifted reads are in range
    composed = (
        child[h:, h:] + child[h:, :-h] + child[:-h, h:] + child[:-h, :-h]
    )
    region = parent[h:, h:]
    rel = np.abs(region - composed) / np.abs(region)
    assert rel.max() <= 1e-12
    assert composed.shape == (m - h, m - h)


def test_b2_matches_four_unit_fringes(scene16):
    n = scene16.plane_size
    lut = build_block_lut(scene16, 2)
    for dx, dy in [(0, 0), (5, -2), (-14, 15), (15, 15)]:
        expected = sum(point_fringe(scene16, dx - px, dy - py) for py in (0, 1) for px in (0, 1))
        assert lut.offset(dx, dy) == pytest.approx(expected, rel=1e-13)


def test_block_on_axis_bound(scene16):
    lut = build_block_lut(scene16, 8)
    single = abs(point_fringe(scene16, 0, 0))
    assert abs(lut.offset(0, 0)) <= 64 * single


def test_magnitude_radially_non_increasing(scene16):
    s = build_block_lut(scene16, 1).support
    n = scene16.plane_size
    axis = np.abs(s[n - 1, n - 1 :])
    assert np.all(np.diff(axis) <= 0)
    diag = np.abs(np.diag(s)[n - 1 :])
    assert np.all(np.diff(diag) <= 0)


def test_unsupported_block_size(scene16):
    with pytest.raises(ValueError):
        build_block_lut(scene16, 3)
    with pytest.raises(ValueError):
        build_block_lut(make_scene(plane_size=4), 8)


def test_crop_anchor(scene16):
    lut = build_block_lut(scene16, 4)
    crop = lut.crop(1, 2)
    # hologram pixel (y, x) sees offset (x - 8, y - 4) from anchor (4, 8)
    assert crop[4, 8] == lut.offset(0, 0)
    assert crop[0, 0] == lut.offset(-8, -4)
    assert crop.shape == (16, 16)


def test_cache_roundtrip(tmp_path, scene16):
    lut = build_block_lut(scene16, 4)
    path = tmp_path / "b4.cghl"
    lut_cache_store(lut, path)
    m = 2 * 16 - 1
    assert path.stat().st_size == 36 + m * m * 8
    back = lut_cache_load(path, scene16, 4)
    np.testing.assert_array_equal(back.support, lut.support.astype(np.complex64))
    # storing the loaded LUT again is bit-exact
    lut_cache_store(back, tmp_path / "again.cghl")
    assert (tmp_path / "again.cghl").read_bytes() == path.read_bytes()


def test_cache_stale_and_corrupt(tmp_path, scene16):
    path = tmp_path / "b2.cghl"
    lut_cache_store(build_block_lut(scene16, 2), path)
    other = make_scene(wavelength=633e-9, plane_size=16)
    with pytest.raises(StaleCacheError):
        lut_cache_load(path, other, 2)
    with pytest.raises(StaleCacheError):
        lut_cache_load(path, scene16, 4)
    truncated = tmp_path / "trunc.cghl"
    truncated.write_bytes(path.read_bytes()[:20])
    with pytest.raises(CorruptFileError):
        lut_cache_load(truncated, scene16, 2)
    short = tmp_path / "short.cghl"
    short.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(CorruptFileError):
        lut_cache_load(short, scene16, 2)
    bad = tmp_path / "bad.cghl"
    bad.write_bytes(b"XXXX" + path.read_bytes()[4:])
    with pytest.raises(CorruptFileError):
        lut_cache_load(bad, scene16, 2)
    with pytest.raises(FileNotFoundError):
        lut_cache_load(tmp_path / "missing.cghl", scene16, 2)


def test_load_or_build_rebuilds_stale(tmp_path, scene16, caplog):
    caplog.set_level("INFO", logger="wavecgh.lut")
    load_or_build_luts(scene16, tmp_path)
    assert len(list(tmp_path.glob("*.cghl"))) == 4
    caplog.clear()
    load_or_build_luts(scene16, tmp_path)
    assert caplog.text.count("cache hit") == 4
    other = make_scene(wavelength=633e-9, plane_size=16)
    lut_cache_store(build_block_lut(other, 1), lut_cache_path(tmp_path, 1, 16))
    caplog.clear()
    luts = load_or_build_luts(scene16, tmp_path)
    assert "stale" in caplog.text
    assert luts[1].scene == scene16
