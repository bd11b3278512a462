"""Angular spectrum propagation with orthonormal DFTs."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .field import SceneParams, check_complex_field


@dataclass(frozen=True)
class PropagationKernel:
    """Transfer function in ``numpy.fft`` frequency order.

    ``transfer`` is unit-modulus on the propagating band and zero on the
    evanescent band.
    """

    scene: SceneParams
    z: float
    transfer: np.ndarray

    @property
    def direction(self) -> str:
        return "forward" if self.z > 0 else "inverse"

    @property
    def propagating(self) -> np.ndarray:
        fx, fy = _frequencies(self.scene)
        return fx**2 + fy**2 <= 1.0 / self.scene.wavelength**2


def _frequencies(scene: SceneParams):
    f = np.fft.fftfreq(scene.plane_size, d=scene.pitch)
    return np.meshgrid(f, f, indexing="xy")


def build_kernel(scene: SceneParams, z_signed: float) -> PropagationKernel:
    if not z_signed:
        raise ValueError("propagation distance must be non-zero")
    fx, fy = _frequencies(scene)
    arg = 1.0 / scene.wavelength**2 - fx**2 - fy**2
    band = arg >= 0
    transfer = np.zeros(arg.shape, dtype=np.complex128)
    transfer[band] = np.exp(2j * np.pi * z_signed * np.sqrt(arg[band]))
    transfer.setflags(write=False)
    return PropagationKernel(scene, float(z_signed), transfer)


def has_evanescent_samples(scene: SceneParams) -> bool:
    """True when the sampled band reaches beyond ``1/wavelength``.

    The largest sampled radial frequency is ``sqrt(2) / (2 * pitch)``.
    """
    return np.sqrt(2.0) / (2.0 * scene.pitch) > 1.0 / scene.wavelength


def propagate(field, kernel: PropagationKernel) -> np.ndarray:
    u = check_complex_field(field)
    if u.shape != kernel.transfer.shape:
        raise ValueError(f"field shape {u.shape} does not match kernel {kernel.transfer.shape}")
    spectrum = np.fft.fft2(u, norm="ortho")
    return np.fft.ifft2(spectrum * kernel.transfer, norm="ortho")


def reconstruct(hologram, scene: SceneParams, intensity: bool = False) -> np.ndarray:
    """Back-propagate a hologram by ``-z`` and return its magnitude (or intensity)."""
    u = propagate(hologram, build_kernel(scene, -scene.z))
    mag = np.abs(u)
    return mag * mag if intensity else mag
