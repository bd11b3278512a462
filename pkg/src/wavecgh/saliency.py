"""Block-max quantization of saliency maps to the Haar level resolutions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .field import check_real_image

FACTORS = (2, 4, 8)


def block_max(image: np.ndarray, factor: int) -> np.ndarray:
    n = image.shape[0]
    m = n // factor
    return image.reshape(m, factor, m, factor).max(axis=(1, 3))


@dataclass(frozen=True)
class SaliencyPyramid:
    full: np.ndarray
    by_factor: dict

    def at(self, factor: int) -> np.ndarray:
        """Saliency at ``N/factor`` resolution; factor 1 is the full map."""
        return self.full if factor == 1 else self.by_factor[factor]


def quantize_saliency(full) -> SaliencyPyramid:
    s = check_real_image(full, name="saliency")
    if s.shape[0] != s.shape[1]:
        raise ValueError(f"saliency must be square, got {s.shape}")
    if s.shape[0] % 8:
        raise ValueError(f"saliency side {s.shape[0]} is not divisible by 8")
    if s.min() < 0.0 or s.max() > 1.0:
        raise ValueError(f"saliency values must lie in [0, 1], got [{s.min()}, {s.max()}]")
    return SaliencyPyramid(s, {f: block_max(s, f) for f in FACTORS})


def uniform_saliency(n: int, value: float = 1.0) -> np.ndarray:
    """Fallback map used when no external saliency is supplied."""
    return np.full((n, n), float(value))
