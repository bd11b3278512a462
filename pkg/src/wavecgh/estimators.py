"""scikit-learn style front ends.

Each estimator works on one 2D plane at a time: ``fit`` fixes the geometry
(and builds the fringe LUTs), ``transform`` maps an object to its hologram
or a hologram to its reconstruction. Both compose in a
:class:`sklearn.pipeline.Pipeline`.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .field import (
    DEFAULT_PITCH,
    DEFAULT_WAVELENGTH,
    DEFAULT_Z,
    SceneParams,
    check_complex_field,
    check_plane_shape,
    check_real_image,
)
from .lut import load_or_build_luts
from .propagation import build_kernel, propagate
from .synthesis import (
    ProgressiveResult,
    RefinementPlan,
    apply_random_phase,
    synthesize_pointwise_oracle,
    synthesize_progressive,
)


class ProgressiveHologram(TransformerMixin, BaseEstimator):
    """Object image to progressive hologram.

    Parameters
    ----------
    wavelength, pitch, z : float
        Scene geometry in meters. The plane size is taken from the object
        passed to ``fit``.
    t_ll, t_l, t_full : float
        Saliency thresholds for the three refinement stages.
    engine : {"fft", "direct"}
        Block accumulation engine; both give the same hologram and counts.
    n_jobs : int, optional
        Worker threads for the direct engine.
    lut_cache : path, optional
        Directory for cached LUTs. Cached LUTs are single precision.
    random_phase_seed : int, optional
        Attach a seeded random phase to the object before synthesis.

    Attributes
    ----------
    scene_ : SceneParams
    luts_ : dict
    saliency_ : ndarray
    result_ : ProgressiveResult
        Snapshots, operator counts and masks from the last ``transform``.
    """

    def __init__(self, wavelength=DEFAULT_WAVELENGTH, pitch=DEFAULT_PITCH, z=DEFAULT_Z,
                 t_ll=0.5, t_l=0.7, t_full=0.9, engine="fft", n_jobs=None, lut_cache=None,
                 random_phase_seed=None):
        self.wavelength = wavelength
        self.pitch = pitch
        self.z = z
        self.t_ll = t_ll
        self.t_l = t_l
        self.t_full = t_full
        self.engine = engine
        self.n_jobs = n_jobs
        self.lut_cache = lut_cache
        self.random_phase_seed = random_phase_seed

    def _plan(self):
        return RefinementPlan(self.t_ll, self.t_l, self.t_full)

    def fit(self, X, y=None, saliency=None):
        X = check_real_image(X, name="X", pipeline=True)
        self._plan()
        self.scene_ = SceneParams(self.wavelength, self.pitch, self.z, X.shape[0])
        self.luts_ = load_or_build_luts(self.scene_, self.lut_cache)
        self.saliency_ = None if saliency is None else check_real_image(saliency, name="saliency")
        return self

    def _object(self, X):
        X = check_real_image(X, name="X", pipeline=True)
        if X.shape[0] != self.scene_.plane_size:
            raise ValueError(f"X side {X.shape[0]} differs from fitted plane size {self.scene_.plane_size}")
        if self.random_phase_seed is not None:
            return apply_random_phase(X, self.random_phase_seed)
        return X

    def synthesize(self, X, saliency=None) -> ProgressiveResult:
        check_is_fitted(self, "scene_")
        saliency = self.saliency_ if saliency is None else saliency
        self.result_ = synthesize_progressive(
            self._object(X), saliency, self.scene_, self._plan(), self.luts_, self.engine, self.n_jobs
        )
        return self.result_

    def transform(self, X, saliency=None):
        """Fully refined hologram of ``X``."""
        return self.synthesize(X, saliency).final

    def pointwise(self, X):
        """Point-wise reference hologram of ``X`` (no decomposition, no gating)."""
        check_is_fitted(self, "scene_")
        return synthesize_pointwise_oracle(
            self._object(X), self.scene_, lut=self.luts_[1], engine=self.engine, n_jobs=self.n_jobs
        )


class AngularSpectrumReconstructor(TransformerMixin, BaseEstimator):
    """Hologram to reconstructed magnitude (or intensity) by back-propagation."""

    def __init__(self, wavelength=DEFAULT_WAVELENGTH, pitch=DEFAULT_PITCH, z=DEFAULT_Z,
                 intensity=False):
        self.wavelength = wavelength
        self.pitch = pitch
        self.z = z
        self.intensity = intensity

    def fit(self, X, y=None):
        X = check_complex_field(X, name="X")
        n = check_plane_shape(X.shape, name="X", min_side=1)
        self.scene_ = SceneParams(self.wavelength, self.pitch, self.z, n)
        self.kernel_ = build_kernel(self.scene_, -self.scene_.z)
        return self

    def transform(self, X):
        check_is_fitted(self, "kernel_")
        mag = np.abs(propagate(X, self.kernel_))
        return mag * mag if self.intensity else mag
