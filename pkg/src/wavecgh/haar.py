"""Averaging-normalized 2D Haar pyramid.

For each 2x2 block ``[[c00, c01], [c10, c11]]`` the analysis step produces::

    a = (c00 + c01 + c10 + c11) / 4
    h = (c00 - c01 + c10 - c11) / 4
    v = (c00 + c01 - c10 - c11) / 4
    d = (c00 - c01 - c10 + c11) / 4

so the approximation is the mean of its footprint and synthesis is a pure
sign pattern with no scaling. Functions are linear and accept complex input.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

Details = Tuple[np.ndarray, np.ndarray, np.ndarray]

# Subband names per level, finest first.
_DETAIL_NAMES = (("H", "V", "D"), ("LH", "LV", "LD"), ("LLH", "LLV", "LLD"))


def _as_grid(x, name="image"):
    arr = np.asarray(x)
    if not np.iscomplexobj(arr):
        arr = arr.astype(np.float64, copy=False)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2D, got shape {arr.shape}")
    return arr


def _split(x):
    c00 = x[0::2, 0::2]
    c01 = x[0::2, 1::2]
    c10 = x[1::2, 0::2]
    c11 = x[1::2, 1::2]
    a = (c00 + c01 + c10 + c11) / 4
    h = (c00 - c01 + c10 - c11) / 4
    v = (c00 + c01 - c10 - c11) / 4
    d = (c00 - c01 - c10 + c11) / 4
    return a, h, v, d


def _merge(a, h, v, d):
    m, n = a.shape
    out = np.empty((2 * m, 2 * n), dtype=np.result_type(a, h, v, d))
    out[0::2, 0::2] = a + h + v + d
    out[0::2, 1::2] = a - h + v - d
    out[1::2, 0::2] = a + h - v - d
    out[1::2, 1::2] = a - h - v + d
    return out


@dataclass
class HaarPyramid:
    """Coarsest approximation plus detail triples ``(h, v, d)``, finest first.

    With three levels the subbands follow the naming ``LLL, LLH, LLV, LLD``
    (N/8), ``LH, LV, LD`` (N/4) and ``H, V, D`` (N/2).
    """

    approx: np.ndarray
    details: List[Details] = field(default_factory=list)
    original_size: int = 0

    def __post_init__(self):
        side = self.approx.shape[0]
        for level in range(len(self.details) - 1, -1, -1):
            side *= 2
            for band in self.details[level]:
                if band.shape != (side // 2, side // 2):
                    raise ValueError(
                        f"detail subband at level {level + 1} has shape {band.shape}, "
                        f"expected {(side // 2, side // 2)}"
                    )
        if self.approx.shape[0] != self.approx.shape[1]:
            raise ValueError("approximation subband must be square")
        if not self.original_size:
            self.original_size = side
        elif self.original_size != side:
            raise ValueError(f"original_size {self.original_size} inconsistent with subbands ({side})")

    @property
    def levels(self) -> int:
        return len(self.details)

    @property
    def subbands(self) -> dict:
        """Named subbands; only defined for the three-level pipeline pyramid."""
        if self.levels != 3:
            raise ValueError("named subbands require a 3-level pyramid")
        out = {"LLL": self.approx}
        for names, bands in zip(_DETAIL_NAMES, self.details):
            out.update(zip(names, bands))
        return out

    def __getattr__(self, name):
        if name in {"LLL", "LLH", "LLV", "LLD", "LH", "LV", "LD", "H", "V", "D"}:
            return self.subbands[name]
        raise AttributeError(name)

    def approximation(self, level: int) -> np.ndarray:
        """Approximation image at ``level`` (0 is the original resolution)."""
        if not 0 <= level <= self.levels:
            raise ValueError(f"level must be in [0, {self.levels}], got {level}")
        a = self.approx
        for lvl in range(self.levels - 1, level - 1, -1):
            a = _merge(a, *self.details[lvl])
        return a


def haar_analyze(image, levels: int = 3) -> HaarPyramid:
    x = _as_grid(image)
    if levels < 1:
        raise ValueError(f"levels must be >= 1, got {levels}")
    h, w = x.shape
    if h != w:
        raise ValueError(f"image must be square, got {h} x {w}")
    if h % (2**levels):
        raise ValueError(f"image side {h} is not divisible by 2**{levels}")
    details = []
    a = x
    for _ in range(levels):
        a, dh, dv, dd = _split(a)
        details.append((dh, dv, dd))
    return HaarPyramid(a, details, h)


def haar_synthesize(pyramid: HaarPyramid) -> np.ndarray:
    return pyramid.approximation(0)


def expand_residual(detail_h, detail_v, detail_d) -> np.ndarray:
    """Finer level minus the replicated coarser approximation.

    This is one synthesis step with the approximation set to zero. Note that
    the plain sum ``h + v + d`` is only the top-left child of each block.
    """
    h = _as_grid(detail_h, "detail_h")
    v = _as_grid(detail_v, "detail_v")
    d = _as_grid(detail_d, "detail_d")
    if not (h.shape == v.shape == d.shape):
        raise ValueError(f"detail subbands differ in shape: {h.shape}, {v.shape}, {d.shape}")
    return _merge(np.zeros_like(h), h, v, d)


def upsample_replicate(coarse, factor: int) -> np.ndarray:
    c = _as_grid(coarse, "coarse")
    if not isinstance(factor, (int, np.integer)) or factor < 2 or factor & (factor - 1):
        raise ValueError(f"factor must be a power of two >= 2, got {factor!r}")
    return np.kron(c, np.ones((factor, factor)))
