"""SSIM scoring and the per-stage quality/operator report."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .field import SceneParams, check_real_image
from .propagation import reconstruct
from .synthesis import REFINE_LEVELS, STAGES, ProgressiveResult

SSIM_WINDOW = 8
SSIM_K1 = 0.01
SSIM_K2 = 0.03


def _window_mean(x, window):
    return sliding_window_view(x, (window, window)).mean(axis=(-2, -1))


def ssim_map(a, b, window: int = SSIM_WINDOW, k1: float = SSIM_K1, k2: float = SSIM_K2,
             dynamic_range: float | None = None) -> np.ndarray:
    """Per-window SSIM over all unit-stride ``window x window`` box windows."""
    a = check_real_image(a, name="a")
    b = check_real_image(b, name="b")
    if a.shape != b.shape:
        raise ValueError(f"image shapes differ: {a.shape} vs {b.shape}")
    if window < 1 or window > min(a.shape):
        raise ValueError(f"window {window} does not fit images of shape {a.shape}")
    if dynamic_range is None:
        dynamic_range = max(a.max(), b.max()) - min(a.min(), b.min())
    if dynamic_range <= 0:
        raise ValueError("dynamic_range must be positive")
    c1 = (k1 * dynamic_range) ** 2
    c2 = (k2 * dynamic_range) ** 2

    mu_a = _window_mean(a, window)
    mu_b = _window_mean(b, window)
    var_a = _window_mean(a * a, window) - mu_a * mu_a
    var_b = _window_mean(b * b, window) - mu_b * mu_b
    cov = _window_mean(a * b, window) - mu_a * mu_b
    num = (2 * mu_a * mu_b + c1) * (2 * cov + c2)
    den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2)
    return num / den


def ssim(a, b, window: int = SSIM_WINDOW, k1: float = SSIM_K1, k2: float = SSIM_K2,
         dynamic_range: float | None = None) -> float:
    """Mean SSIM with uniform windows.

    ``dynamic_range`` defaults to the joint value range of both images.
    """
    return float(ssim_map(a, b, window, k1, k2, dynamic_range).mean())


@dataclass
class MetricsReport:
    ssim_per_stage: dict
    ops_per_stage: dict
    ops_cumulative: dict
    pointwise_ops: int
    dynamic_range: float
    window: int = SSIM_WINDOW
    k1: float = SSIM_K1
    k2: float = SSIM_K2
    intensity: bool = False
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "ssim_settings": {
                "window": self.window,
                "weighting": "uniform box, unit stride",
                "k1": self.k1,
                "k2": self.k2,
                "dynamic_range": self.dynamic_range,
                "reconstruction": "intensity" if self.intensity else "magnitude",
            },
            "stages": {
                stage: {
                    "ssim": self.ssim_per_stage[stage],
                    "ops": self.ops_per_stage[stage],
                    "ops_cumulative": self.ops_cumulative[stage],
                }
                for stage in STAGES
            },
            "pointwise_ops": self.pointwise_ops,
            **self.extra,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_table(self) -> str:
        rows = [("stage", "ops", "cumulative", "vs point-wise", "SSIM")]
        for stage in STAGES:
            cum = self.ops_cumulative[stage]
            rows.append((
                stage,
                str(self.ops_per_stage[stage]),
                str(cum),
                f"{cum / self.pointwise_ops:.4f}",
                f"{self.ssim_per_stage[stage]:.6f}",
            ))
        rows.append(("pointwise", str(self.pointwise_ops), str(self.pointwise_ops), "1.0000", "1.000000"))
        widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
        lines = [
            f"# SSIM: {self.window}x{self.window} uniform windows, k1={self.k1}, k2={self.k2}, "
            f"L={self.dynamic_range:.6g} ({'intensity' if self.intensity else 'magnitude'})"
        ]
        for i, row in enumerate(rows):
            lines.append("  ".join(
                cell.ljust(w) if j == 0 else cell.rjust(w) for j, (cell, w) in enumerate(zip(row, widths))
            ))
            if i == 0:
                lines.append("  ".join("-" * w for w in widths))
        return "\n".join(lines) + "\n"


def build_report(result: ProgressiveResult, oracle_recon, scene: SceneParams,
                 intensity: bool = False, window: int = SSIM_WINDOW, k1: float = SSIM_K1,
                 k2: float = SSIM_K2) -> MetricsReport:
    """Score every stage snapshot against the point-wise reconstruction."""
    oracle_recon = check_real_image(oracle_recon, name="oracle_recon")
    dynamic_range = float(oracle_recon.max() - oracle_recon.min())
    scores = {}
    for stage in STAGES:
        recon = reconstruct(result.holograms[stage], scene, intensity=intensity)
        scores[stage] = ssim(recon, oracle_recon, window, k1, k2, dynamic_range)
    counts = result.ops.per_level
    levels = ("base_LLL",) + REFINE_LEVELS
    ops = {stage: counts[level] for stage, level in zip(STAGES, levels)}
    return MetricsReport(
        ssim_per_stage=scores,
        ops_per_stage=ops,
        ops_cumulative=result.cumulative_ops(),
        pointwise_ops=scene.plane_size**2,
        dynamic_range=dynamic_range,
        window=window,
        k1=k1,
        k2=k2,
        intensity=intensity,
    )
