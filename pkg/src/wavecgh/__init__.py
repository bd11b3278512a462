"""Progressive, saliency-gated computer-generated holography from a Haar pyramid."""

__version__ = "0.1.0"

from .field import (
    LEVELS,
    OpCounter,
    SceneParams,
    complex_field,
    counter_add,
    make_scene,
    real_image,
)
from .haar import HaarPyramid, expand_residual, haar_analyze, haar_synthesize, upsample_replicate
from .lut import FringeLut, build_block_lut, build_luts, lut_cache_load, lut_cache_store, point_fringe
from .saliency import SaliencyPyramid, quantize_saliency, uniform_saliency
from .io import load_hologram, load_image, load_saliency, save_hologram, save_magnitude_png
from .synthesis import (
    STAGES,
    ProgressiveResult,
    RefinementPlan,
    apply_block,
    refine,
    synthesize_base,
    synthesize_pointwise_oracle,
    synthesize_progressive,
)
from .propagation import PropagationKernel, build_kernel, propagate, reconstruct
from .metrics import MetricsReport, build_report, ssim
from .estimators import AngularSpectrumReconstructor, ProgressiveHologram
