"""Delta-weighted upwind approximations of |grad u| for PDE dilation and erosion."""

from __future__ import annotations

import math

from . import _kernels
from .image_core import as_image
from .stencils import DEFAULT_DELTA, check_delta


def upwind_dilation_magnitude(img, delta: float = DEFAULT_DELTA, h: float = 1.0):
    """Upwind ``|grad u|`` for dilation: only differences toward brighter neighbours count.

    The axial Rouy-Tourin term is weighted by ``(1 - delta) / h`` and its
    diagonal variant by ``delta / (sqrt(2) h)``.
    """
    return _kernels.upwind_dilation(as_image(img), check_delta(delta), float(h))


def upwind_erosion_magnitude(img, delta: float = DEFAULT_DELTA, h: float = 1.0):
    """Upwind ``|grad u|`` for erosion (flipped differences); non-negative."""
    return _kernels.upwind_erosion(as_image(img), check_delta(delta), float(h))


def morphology_time_step_bound(delta: float = DEFAULT_DELTA, h: float = 1.0) -> float:
    """Largest stable explicit time step ``h / (sqrt(2) (1 - delta) + delta)``."""
    if h <= 0:
        raise ValueError(f"grid size must be positive, got {h}")
    delta = check_delta(delta)
    return h / (math.sqrt(2.0) * (1.0 - delta) + delta)


def dilation_step(img, tau: float, delta: float = DEFAULT_DELTA, h: float = 1.0):
    return img + tau * upwind_dilation_magnitude(img, delta, h)


def erosion_step(img, tau: float, delta: float = DEFAULT_DELTA, h: float = 1.0):
    return img - tau * upwind_erosion_magnitude(img, delta, h)
