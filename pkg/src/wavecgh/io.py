"""Image loading and hologram serialization.

Hologram files (``.cgh``) are little-endian::

    magic "CGH1" | version u16 | N u32 | wavelength f64 | pitch f64 | z f64
    N*N interleaved float32 (re, im), row-major
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import CorruptFileError, VersionMismatchError
from .field import SceneParams, check_complex_field, check_real_image

HOLOGRAM_MAGIC = b"CGH1"
HOLOGRAM_VERSION = 1
_HOLO_HEADER = struct.Struct("<4sHIddd")
HOLOGRAM_HEADER_SIZE = _HOLO_HEADER.size

# Rec. 601 luma weights.
_LUMA = np.array([0.299, 0.587, 0.114])

_SUPPORTED_FORMATS = {"PNG", "PPM"}


def _read_pixels(path):
    path = Path(path)
    try:
        with Image.open(path) as im:
            fmt = im.format
            mode = im.mode
            im.load()
            data = np.asarray(im)
    except FileNotFoundError:
        raise
    except (OSError, SyntaxError) as exc:
        raise ValueError(f"{path}: unsupported or unreadable image ({exc})") from exc
    if fmt not in _SUPPORTED_FORMATS:
        raise ValueError(f"{path}: unsupported image format {fmt}; expected PNG or PGM")
    return mode, data


def _max_value(mode: str, path) -> float:
    if mode in ("L", "LA", "RGB", "RGBA", "P"):
        return 255.0
    # Pillow rescales PGM maxval > 255 to 16 bits and opens 16-bit PNG as I;16.
    if mode.startswith("I;16") or mode == "I":
        return 65535.0
    raise ValueError(f"{path}: unsupported pixel mode {mode}")


def load_saliency(path) -> np.ndarray:
    """Load a single-channel 8/16-bit PNG or PGM as a ``[0, 1]`` map."""
    mode, data = _read_pixels(path)
    if data.ndim != 2 or mode == "P":
        channels = data.shape[2] if data.ndim == 3 else 1
        raise ValueError(f"{path}: saliency must be single-channel grayscale, got mode {mode} ({channels} channels)")
    return check_real_image(data.astype(np.float64) / _max_value(mode, path), name=str(path))


def load_image(path) -> np.ndarray:
    """Load an object image as ``[0, 1]`` intensities.

    Color inputs are reduced to Rec. 601 luma; alpha is dropped.
    """
    mode, data = _read_pixels(path)
    if mode == "P":
        with Image.open(path) as im:
            data = np.asarray(im.convert("RGB"))
        mode = "RGB"
    scale = _max_value(mode, path)
    img = data.astype(np.float64)
    if img.ndim == 3:
        img = img[..., 0] if mode == "LA" else img[..., :3] @ _LUMA
    return check_real_image(img / scale, name=str(path))


def save_hologram(field, scene: SceneParams, path) -> None:
    h = check_complex_field(field, name="hologram")
    n = scene.plane_size
    if h.shape != (n, n):
        raise ValueError(f"hologram shape {h.shape} does not match scene plane size {n}")
    header = _HOLO_HEADER.pack(
        HOLOGRAM_MAGIC, HOLOGRAM_VERSION, n, scene.wavelength, scene.pitch, scene.z
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(h.astype("<c8").tobytes())


def load_hologram(path):
    """Return ``(field, scene)``; the field is promoted back to ``complex128``."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < HOLOGRAM_HEADER_SIZE:
        raise CorruptFileError(f"{path}: truncated hologram header")
    magic, version, n, wavelength, pitch, z = _HOLO_HEADER.unpack(raw[:HOLOGRAM_HEADER_SIZE])
    if magic != HOLOGRAM_MAGIC:
        raise CorruptFileError(f"{path}: bad magic {magic!r}, expected {HOLOGRAM_MAGIC!r}")
    if version != HOLOGRAM_VERSION:
        raise VersionMismatchError(f"{path}: hologram format version {version}, expected {HOLOGRAM_VERSION}")
    try:
        scene = SceneParams(wavelength, pitch, z, n)
    except ValueError as exc:
        raise CorruptFileError(f"{path}: invalid scene in header ({exc})") from exc
    payload = raw[HOLOGRAM_HEADER_SIZE:]
    if len(payload) != n * n * 8:
        raise CorruptFileError(f"{path}: payload is {len(payload)} bytes, expected {n * n * 8}")
    field = np.frombuffer(payload, dtype="<c8").reshape(n, n).astype(np.complex128)
    return field, scene


def magnitude_to_uint8(values, normalize: bool = True) -> np.ndarray:
    mag = np.abs(np.asarray(values))
    if normalize:
        lo, hi = float(mag.min()), float(mag.max())
        scaled = (mag - lo) / (hi - lo) if hi > lo else np.zeros_like(mag)
    else:
        scaled = np.clip(mag, 0.0, 1.0)
    return np.round(scaled * 255.0).astype(np.uint8)


def save_magnitude_png(field, path, normalize: bool = True) -> None:
    """Write ``|field|`` as 8-bit grayscale.

    ``normalize`` maps ``[min, max]`` onto ``[0, 255]``; otherwise magnitudes
    are clamped to ``[0, 1]`` first.
    """
    Image.fromarray(magnitude_to_uint8(field, normalize)).save(path, format="PNG")
