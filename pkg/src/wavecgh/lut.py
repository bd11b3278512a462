"""Shift-invariant fringe look-up tables.

A unit point source at distance ``z`` contributes ``exp(1j*k*r) / r`` to the
hologram plane, ``r = sqrt((dx*pitch)**2 + (dy*pitch)**2 + z**2)``. A block
LUT of size ``B`` is the superposition of the ``B*B`` unit fringes of a
``B x B`` footprint, sampled on the ``(2N-1) x (2N-1)`` grid of offsets from
the footprint's top-left pixel. Applying a block anywhere on the ``N x N``
plane is then a crop of that support.
"""

from __future__ import annotations

import logging
import os
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import CorruptFileError, StaleCacheError, VersionMismatchError
from .field import SceneParams

logger = logging.getLogger(__name__)

BLOCK_SIZES = (1, 2, 4, 8)

LUT_MAGIC = b"CGHL"
LUT_VERSION = 1
_LUT_HEADER = struct.Struct("<4sHHIddd")


def fringe_grid(scene: SceneParams, dx, dy) -> np.ndarray:
    """Unit-amplitude point fringe at integer pixel offsets (broadcasting)."""
    dx = np.asarray(dx, dtype=np.float64) * scene.pitch
    dy = np.asarray(dy, dtype=np.float64) * scene.pitch
    r = np.sqrt(dx * dx + dy * dy + scene.z * scene.z)
    return np.exp(1j * scene.k * r) / r


def point_fringe(scene: SceneParams, dx: int, dy: int) -> complex:
    return complex(fringe_grid(scene, dx, dy))


@dataclass(frozen=True)
class FringeLut:
    """Block fringe support; ``support[N-1+dy, N-1+dx]`` is offset ``(dx, dy)``."""

    block_size: int
    support: np.ndarray
    scene: SceneParams

    def __post_init__(self):
        n = self.scene.plane_size
        if self.support.shape != (2 * n - 1, 2 * n - 1):
            raise ValueError(
                f"support shape {self.support.shape} does not match plane size {n}"
            )
        self.support.setflags(write=False)

    @property
    def grid_size(self) -> int:
        """Side of the coefficient grid this block size tiles."""
        return self.scene.plane_size // self.block_size

    def crop(self, row: int, col: int) -> np.ndarray:
        """Plane-sized window for the block anchored at coefficient cell ``(row, col)``."""
        n = self.scene.plane_size
        y0 = n - 1 - row * self.block_size
        x0 = n - 1 - col * self.block_size
        return self.support[y0 : y0 + n, x0 : x0 + n]

    def offset(self, dx: int, dy: int) -> complex:
        n = self.scene.plane_size
        return complex(self.support[n - 1 + dy, n - 1 + dx])


def build_block_lut(scene: SceneParams, block_size: int) -> FringeLut:
    n = scene.plane_size
    if block_size not in BLOCK_SIZES:
        raise ValueError(f"block_size must be one of {BLOCK_SIZES}, got {block_size!r}")
    if block_size > n:
        raise ValueError(f"block_size {block_size} exceeds plane size {n}")
    b = block_size
    # Unit fringes on offsets [-(N-1)-(B-1), N-1]; each footprint point p
    # contributes the window shifted by p.
    offsets = np.arange(-(n - 1) - (b - 1), n)
    base = fringe_grid(scene, offsets[None, :], offsets[:, None])
    m = 2 * n - 1
    support = np.zeros((m, m), dtype=np.complex128)
    for py in range(b):
        for px in range(b):
            support += base[b - 1 - py : b - 1 - py + m, b - 1 - px : b - 1 - px + m]
    return FringeLut(b, support, scene)


def build_luts(scene: SceneParams, block_sizes=BLOCK_SIZES) -> dict:
    return {b: build_block_lut(scene, b) for b in block_sizes}


def lut_cache_store(lut: FringeLut, path) -> None:
    s = lut.scene
    header = _LUT_HEADER.pack(
        LUT_MAGIC, LUT_VERSION, lut.block_size, s.plane_size, s.wavelength, s.pitch, s.z
    )
    payload = lut.support.astype(np.complex64).astype("<c8").tobytes()
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(header)
        fh.write(payload)
    os.replace(tmp, path)


def read_lut_header(path) -> tuple:
    """Return ``(block_size, scene)`` stored in a cache file header."""
    with open(path, "rb") as fh:
        raw = fh.read(_LUT_HEADER.size)
    return _parse_lut_header(raw, path)


def _parse_lut_header(raw: bytes, path) -> tuple:
    if len(raw) < _LUT_HEADER.size:
        raise CorruptFileError(f"{path}: truncated LUT header")
    magic, version, block_size, n, wavelength, pitch, z = _LUT_HEADER.unpack(raw)
    if magic != LUT_MAGIC:
        raise CorruptFileError(f"{path}: bad magic {magic!r}, expected {LUT_MAGIC!r}")
    if version != LUT_VERSION:
        raise VersionMismatchError(f"{path}: LUT format version {version}, expected {LUT_VERSION}")
    try:
        scene = SceneParams(wavelength, pitch, z, n)
    except ValueError as exc:
        raise CorruptFileError(f"{path}: invalid scene in header ({exc})") from exc
    return block_size, scene


def lut_cache_load(path, scene: SceneParams, block_size: int) -> FringeLut:
    """Load a cached LUT, checking it was built for ``scene`` and ``block_size``."""
    with open(path, "rb") as fh:
        raw = fh.read()
    stored_b, stored_scene = _parse_lut_header(raw[: _LUT_HEADER.size], path)
    if stored_b != block_size or stored_scene != scene:
        raise StaleCacheError(
            f"{path}: cache holds B={stored_b} for {stored_scene}, "
            f"expected B={block_size} for {scene}"
        )
    m = 2 * scene.plane_size - 1
    payload = raw[_LUT_HEADER.size :]
    if len(payload) != m * m * 8:
        raise CorruptFileError(f"{path}: payload is {len(payload)} bytes, expected {m * m * 8}")
    support = np.frombuffer(payload, dtype="<c8").reshape(m, m).astype(np.complex128)
    return FringeLut(block_size, support, scene)


def lut_cache_path(cache_dir, block_size: int, plane_size: int) -> Path:
    return Path(cache_dir) / f"lut_B{block_size}_N{plane_size}.cghl"


def load_or_build_luts(scene: SceneParams, cache_dir=None, block_sizes=BLOCK_SIZES) -> dict:
    """Fetch LUTs from ``cache_dir``, rebuilding missing or stale entries.

    Without a cache directory the LUTs are built in memory at full precision.
    Cached LUTs are single precision on disk.
    """
    if cache_dir is None:
        return build_luts(scene, block_sizes)
    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    luts = {}
    for b in block_sizes:
        path = lut_cache_path(cache_dir, b, scene.plane_size)
        if path.exists():
            try:
                luts[b] = lut_cache_load(path, scene, b)
                logger.info("cache hit: %s", path)
                continue
            except StaleCacheError:
                logger.info("stale cache, rebuilding: %s", path)
            except CorruptFileError:
                logger.info("corrupt cache, rebuilding: %s", path)
        else:
            logger.info("cache miss, building: %s", path)
        lut_cache_store(build_block_lut(scene, b), path)
        luts[b] = lut_cache_load(path, scene, b)
    return luts
