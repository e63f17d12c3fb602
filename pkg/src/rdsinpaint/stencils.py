"""Fixed finite-difference kernels: Gaussian smoothing, Sobel derivatives,
central second differences and the delta-weighted Laplacian.

All operators use mirrored boundaries (boundary cells duplicated) unless noted.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from . import _kernels
from .image_core import as_image

DEFAULT_DELTA = math.sqrt(2.0) - 1.0
TRUNCATION = 5.0


def check_delta(delta: float) -> float:
    delta = float(delta)
    if not 0.0 <= delta <= 1.0:
        raise ValueError(f"delta must lie in [0, 1], got {delta}")
    return delta


def kernel_radius(sigma: float) -> int:
    return int(math.ceil(TRUNCATION * sigma))


@lru_cache(maxsize=64)
def _half_kernel(sigma: float) -> np.ndarray:
    radius = kernel_radius(sigma)
    x = np.arange(radius + 1, dtype=np.float64)
    half = np.exp(-0.5 * (x / sigma) ** 2)
    half /= half[0] + 2.0 * half[1:].sum()
    half.flags.writeable = False
    return half


def gaussian_kernel(sigma: float) -> np.ndarray:
    """Sampled Gaussian truncated at ``ceil(5 sigma)`` and renormalised to unit sum.

    Returns the full symmetric tap array of length ``2 r + 1``; ``sigma = 0``
    gives the identity kernel ``[1.0]``.
    """
    sigma = float(sigma)
    if sigma < 0:
        raise ValueError(f"sigma must be non-negative, got {sigma}")
    if sigma == 0:
        return np.ones(1)
    half = _half_kernel(sigma)
    return np.concatenate([half[:0:-1], half])


def gaussian_convolve(img, sigma: float, boundary: str = "mirror") -> np.ndarray:
    """Separable Gaussian convolution with ``mirror`` or ``zero`` boundaries.

    The x-then-y and y-then-x passes are averaged so that the result is exactly
    equivariant under transposition of the grid.
    """
    img = as_image(img)
    sigma = float(sigma)
    if sigma < 0:
        raise ValueError(f"sigma must be non-negative, got {sigma}")
    if boundary not in ("mirror", "zero"):
        raise ValueError(f"boundary must be 'mirror' or 'zero', got {boundary!r}")
    if sigma == 0:
        return img.copy()
    return _kernels.gaussian_2d(img, _half_kernel(sigma), boundary == "zero")


def sobel_x(img, h: float = 1.0) -> np.ndarray:
    return _kernels.sobel(as_image(img), float(h))[0]


def sobel_y(img, h: float = 1.0) -> np.ndarray:
    return _kernels.sobel(as_image(img), float(h))[1]


def sobel(img, h: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Both Sobel derivatives ``(d/dx, d/dy)`` with the 1/(8h) normalisation."""
    return _kernels.sobel(as_image(img), float(h))


def second_derivatives(img, h: float = 1.0) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Central differences ``(uxx, uyy, uxy)``; ``uxy`` uses the four diagonal neighbours."""
    return _kernels.second_derivatives(as_image(img), float(h))


def delta_laplacian(img, delta: float = DEFAULT_DELTA, h: float = 1.0) -> np.ndarray:
    """Convex combination of the axial 5-point and the diagonal Laplacian.

    ``(1 - delta)`` weights the axial stencil, ``delta`` the diagonal one
    (which carries an extra factor 1/2 for its sqrt(2) spacing).
    """
    return _kernels.delta_laplacian(as_image(img), check_delta(delta), float(h))
