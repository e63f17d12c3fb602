"""Structure tensor, its dominant eigenvector and the second derivative along it."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .image_core import as_channels, as_image
from .stencils import _half_kernel, gaussian_convolve, second_derivatives

# eigenvalue-coincidence tolerance relative to |jxx| + |jyy|
ISOTROPY_RTOL = 1e-14


@dataclass(frozen=True)
class StructureField:
    """Per-pixel tensor entries and the unit dominant eigenvector ``(c, s)``."""

    jxx: np.ndarray
    jxy: np.ndarray
    jyy: np.ndarray
    c: np.ndarray
    s: np.ndarray

    @classmethod
    def from_tensor(cls, jxx, jxy, jyy) -> "StructureField":
        c, s = _kernels.eigenvector_field(jxx, jxy, jyy, ISOTROPY_RTOL)
        return cls(jxx, jxy, jyy, c, s)

    @property
    def shape(self) -> tuple[int, int]:
        return self.jxx.shape

    def flipped_sign(self) -> "StructureField":
        return StructureField(self.jxx, self.jxy, self.jyy, -self.c, -self.s)


def dominant_eigenvector(jxx: float, jxy: float, jyy: float) -> tuple[float, float]:
    """Unit eigenvector for the larger eigenvalue of a symmetric 2x2 matrix.

    The first nonzero component is positive.  Isotropic or zero tensors
    return the tie-break ``(1, 0)``.
    """
    return _kernels.dominant_eigenvector(float(jxx), float(jxy), float(jyy), ISOTROPY_RTOL)


def dominant_eigenvalue(jxx, jxy, jyy):
    return 0.5 * ((jxx + jyy) + np.sqrt((jxx - jyy) ** 2 + 4.0 * jxy**2))


def _gradient_products(img, sigma: float, h: float):
    return _kernels.sobel_products(gaussian_convolve(img, sigma, "mirror"), float(h))


def joint_mean(arrays) -> np.ndarray:
    """Channel mean written as ``a_0 + sum(a_c - a_0) / n``.

    Identical channels reproduce ``a_0`` bit-for-bit.
    """
    first = arrays[0]
    if len(arrays) == 1:
        return first
    offset = np.zeros_like(first)
    for other in arrays[1:]:
        offset += other - first
    return first + offset / len(arrays)


def smooth_tensor(jxx, jxy, jyy, rho: float) -> StructureField:
    """Integrate the tensor entries at scale ``rho`` with zero boundaries.

    ``jxx`` and ``jyy`` use opposite separable pass orders, so a transposed
    image yields exactly the transposed tensor; ``jxy`` averages both orders.
    """
    if rho == 0:
        return StructureField.from_tensor(jxx.copy(), jxy.copy(), jyy.copy())
    half = _half_kernel(float(rho))
    return StructureField.from_tensor(
        _kernels.gaussian_xy(jxx, half, True),
        _kernels.gaussian_2d(jxy, half, True),
        _kernels.gaussian_yx(jyy, half, True),
    )


def _check_scales(sigma, rho):
    if sigma < 0 or rho < 0:
        raise ValueError(f"scales must be non-negative, got sigma={sigma}, rho={rho}")


def structure_tensor(img, sigma: float, rho: float, h: float = 1.0) -> StructureField:
    """``J_rho(grad u_sigma)`` with Sobel gradients of the presmoothed image."""
    _check_scales(sigma, rho)
    img = as_image(img)
    return smooth_tensor(*_gradient_products(img, sigma, h), rho)


def structure_tensor_presmoothed(v, rho: float, h: float = 1.0) -> StructureField:
    """Structure tensor of an image that is already smoothed at the noise scale."""
    return smooth_tensor(*_kernels.sobel_products(as_image(v), float(h)), rho)


def joint_structure_tensor(imgs, sigma: float, rho: float, h: float = 1.0) -> StructureField:
    """Channel-averaged structure tensor, eigen-analysed after averaging."""
    _check_scales(sigma, rho)
    imgs = as_channels(imgs)
    products = [_gradient_products(channel, sigma, h) for channel in imgs]
    jxx = joint_mean([p[0] for p in products])
    jxy = joint_mean([p[1] for p in products])
    jyy = joint_mean([p[2] for p in products])
    return smooth_tensor(jxx, jxy, jyy, rho)


def directional_second_derivative_presmoothed(v, c, s, h: float = 1.0) -> np.ndarray:
    """``c^2 v_xx + 2 c s v_xy + s^2 v_yy`` for an already smoothed ``v``."""
    uxx, uyy, uxy = second_derivatives(v, h)
    return _kernels.directional_combine(uxx, uyy, uxy, c, s)


def directional_second_derivative(img, field: StructureField, sigma: float, h: float = 1.0) -> np.ndarray:
    """Second derivative of ``u_sigma`` along the field's dominant direction."""
    img = as_image(img)
    if field.shape != img.shape:
        raise ValueError(f"field shape {field.shape} does not match image shape {img.shape}")
    v = gaussian_convolve(img, sigma, "mirror")
    return directional_second_derivative_presmoothed(v, field.c, field.s, h)


def gradient_direction(gx, gy, eps: float = 1e-12):
    """Normalised gradient ``(c, s)`` and the mask of pixels with a usable gradient."""
    norm = np.sqrt(gx * gx + gy * gy)
    valid = norm >= eps
    safe = np.where(valid, norm, 1.0)
    return np.where(valid, gx / safe, 1.0), np.where(valid, gy / safe, 0.0), valid
