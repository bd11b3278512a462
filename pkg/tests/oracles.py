"""Independent reference evaluations used by the tests.

None of these touch the LUT, Haar or window code of the package.
"""

import math

import mpmath
import numpy as np


def pointwise_hologram(obj, wavelength, pitch, z):
    """Direct double loop over object points of A/r * exp(j k r)."""
    obj = np.asarray(obj)
    n = obj.shape[0]
    k = 2 * math.pi / wavelength
    yy, xx = np.mgrid[0:n, 0:n]
    out = np.zeros((n, n), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            a = obj[i, j]
            if a == 0:
                continue
            r = np.sqrt(((xx - j) * pitch) ** 2 + ((yy - i) * pitch) ** 2 + z * z)
            out += a * np.exp(1j * k * r) / r
    return out


def fringe_mp(wavelength, pitch, z, dx, dy, dps=50):
    """Arbitrary-precision (1/r, k*r, k*r mod 2pi) for one unit point."""
    with mpmath.workdps(dps):
        lam, p, zz = mpmath.mpf(wavelength), mpmath.mpf(pitch), mpmath.mpf(z)
        r = mpmath.sqrt((dx * p) ** 2 + (dy * p) ** 2 + zz**2)
        k = 2 * mpmath.pi / lam
        phase = k * r
        return 1 / r, phase, mpmath.fmod(phase, 2 * mpmath.pi)


def block_max(image, factor):
    image = np.asarray(image)
    m = image.shape[0] // factor
    out = np.empty((m, m))
    for i in range(m):
        for j in range(m):
            out[i, j] = max(
                image[p, q]
                for p in range(i * factor, (i + 1) * factor)
                for q in range(j * factor, (j + 1) * factor)
            )
    return out


def ssim_literal(a, b, window, k1, k2, dynamic_range):
    """Mean SSIM by explicit per-window loops with population statistics."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c1 = (k1 * dynamic_range) ** 2
    c2 = (k2 * dynamic_range) ** 2
    h, w = a.shape
    scores = []
    for i in range(h - window + 1):
        for j in range(w - window + 1):
            pa = a[i : i + window, j : j + window].ravel().tolist()
            pb = b[i : i + window, j : j + window].ravel().tolist()
            n = len(pa)
            ma = math.fsum(pa) / n
            mb = math.fsum(pb) / n
            va = math.fsum((x - ma) ** 2 for x in pa) / n
            vb = math.fsum((x - mb) ** 2 for x in pb) / n
            cab = math.fsum((x - ma) * (y - mb) for x, y in zip(pa, pb)) / n
            scores.append((2 * ma * mb + c1) * (2 * cab + c2) / ((ma * ma + mb * mb + c1) * (va + vb + c2)))
    return math.fsum(scores) / len(scores)


def rel_max_error(actual, expected):
    return float(np.max(np.abs(actual - expected)) / np.max(np.abs(expected)))
