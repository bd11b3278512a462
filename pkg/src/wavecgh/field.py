"""Shared grid types, scene geometry and the operator counter.

Images and fields are plain 2D numpy arrays (``float64`` and ``complex128``);
the ``check_*`` helpers play the role sklearn's ``check_array`` plays for
estimators and are used at every public entry point.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

#: Level labels understood by :class:`OpCounter`, in pipeline order.
LEVELS = ("base_LLL", "refine_LL", "refine_L", "refine_full", "pointwise_oracle")

#: Default bench scene: 532 nm, 8 um pitch, 10 cm, 256 x 256.
DEFAULT_WAVELENGTH = 532e-9
DEFAULT_PITCH = 8e-6
DEFAULT_Z = 0.1
DEFAULT_SIZE = 256


def is_power_of_two(n) -> bool:
    return isinstance(n, (int, np.integer)) and n > 0 and (n & (n - 1)) == 0


def _from_flat(data, width, height, dtype):
    arr = np.asarray(data, dtype=dtype)
    if width is None and height is None:
        return arr
    if width is None or height is None:
        raise ValueError("width and height must be given together")
    if arr.size != width * height:
        raise ValueError(
            f"data length {arr.size} does not match {width} x {height} = {width * height}"
        )
    return arr.reshape(height, width)


def real_image(data, width: int | None = None, height: int | None = None) -> np.ndarray:
    """Build a validated real image, optionally from row-major flat data."""
    return check_real_image(_from_flat(data, width, height, np.float64))


def complex_field(data, width: int | None = None, height: int | None = None) -> np.ndarray:
    """Build a validated complex field, optionally from row-major flat data."""
    return check_complex_field(_from_flat(data, width, height, np.complex128))


def check_real_image(image, *, name: str = "image", pipeline: bool = False) -> np.ndarray:
    """Validate a real 2D grid and return it as ``float64``.

    With ``pipeline=True`` the image must also be square with a power-of-two
    side of at least 8, which is what three clean Haar levels need.
    """
    arr = np.asarray(image)
    if np.iscomplexobj(arr):
        raise ValueError(f"{name} must be real-valued")
    arr = arr.astype(np.float64, copy=False)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2D, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or Inf")
    if pipeline:
        check_plane_shape(arr.shape, name=name)
    return arr


def check_complex_field(field, *, name: str = "field") -> np.ndarray:
    arr = np.asarray(field).astype(np.complex128, copy=False)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2D, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or Inf")
    return arr


def check_plane_shape(shape, *, name: str = "image", min_side: int = 8) -> int:
    h, w = shape
    if h != w:
        raise ValueError(f"{name} must be square, got {h} x {w}")
    if not is_power_of_two(int(h)) or h < min_side:
        raise ValueError(f"{name} side must be a power of two >= {min_side}, got {h}")
    return int(h)


@dataclass(frozen=True)
class SceneParams:
    """Object/hologram plane geometry.

    Both planes are ``plane_size`` square pixels of side ``pitch`` and sit
    parallel at distance ``z``.
    """

    wavelength: float = DEFAULT_WAVELENGTH
    pitch: float = DEFAULT_PITCH
    z: float = DEFAULT_Z
    plane_size: int = DEFAULT_SIZE

    def __post_init__(self):
        for field_name in ("wavelength", "pitch", "z"):
            value = getattr(self, field_name)
            if not isinstance(value, (int, float, np.floating)) or not math.isfinite(value):
                raise ValueError(f"{field_name} must be a finite number, got {value!r}")
            if value <= 0:
                raise ValueError(f"{field_name} must be positive, got {value!r}")
            object.__setattr__(self, field_name, float(value))
        if not is_power_of_two(self.plane_size):
            raise ValueError(f"plane_size must be a power of two, got {self.plane_size!r}")
        object.__setattr__(self, "plane_size", int(self.plane_size))

    @property
    def k(self) -> float:
        """Wave number in rad/m."""
        return 2.0 * math.pi / self.wavelength

    def with_size(self, plane_size: int) -> "SceneParams":
        return SceneParams(self.wavelength, self.pitch, self.z, plane_size)

    def to_dict(self) -> dict:
        return {
            "wavelength": self.wavelength,
            "pitch": self.pitch,
            "z": self.z,
            "plane_size": self.plane_size,
        }


def make_scene(
    wavelength: float = DEFAULT_WAVELENGTH,
    pitch: float = DEFAULT_PITCH,
    z: float = DEFAULT_Z,
    plane_size: int = DEFAULT_SIZE,
) -> SceneParams:
    return SceneParams(wavelength, pitch, z, plane_size)


class OpCounter:
    """Per-level tally of LUT block applications.

    One operator is one shift, multiply and add of a LUT block onto the
    hologram plane. Updates are lock-protected so concurrent workers can share
    a counter; since only integer addition is involved the final total never
    depends on update order.
    """

    def __init__(self, counts: Mapping[str, int] | None = None):
        self._lock = threading.Lock()
        self._counts = {level: 0 for level in LEVELS}
        if counts:
            for level, n in counts.items():
                self.add(level, n)

    def add(self, level: str, n: int = 1) -> "OpCounter":
        if level not in self._counts:
            raise KeyError(f"unknown level {level!r}; expected one of {LEVELS}")
        n = int(n)
        if n < 0:
            raise ValueError(f"operator increment must be non-negative, got {n}")
        with self._lock:
            self._counts[level] += n
        return self

    def merge(self, other: "OpCounter") -> "OpCounter":
        for level, n in other.per_level.items():
            self.add(level, n)
        return self

    def __getitem__(self, level: str) -> int:
        return self._counts[level]

    @property
    def per_level(self) -> dict:
        with self._lock:
            return dict(self._counts)

    def cumulative(self, levels: Iterable[str] = LEVELS[:4]) -> dict:
        """Running totals over ``levels`` in the order given."""
        out, total = {}, 0
        counts = self.per_level
        for level in levels:
            total += counts[level]
            out[level] = total
        return out

    def __eq__(self, other):
        if not isinstance(other, OpCounter):
            return NotImplemented
        return self.per_level == other.per_level

    def __repr__(self):
        inner = ", ".join(f"{k}={v}" for k, v in self.per_level.items() if v)
        return f"OpCounter({inner})"


def counter_add(counter: OpCounter, level: str, n: int) -> OpCounter:
    return counter.add(level, n)
