"""Regularised diffusion-shock inpainting with a stability-bounded explicit scheme.

Each step evaluates, at the old time level,

    u_c += tau * (g * Lap(u_c) - (1 - g) * S(d_ww (u_c)_sigma) * M_c)

where ``g`` is the Charbonnier weight of the channel-averaged squared
gradient of ``u_nu``, ``w`` the dominant eigenvector of the joint structure
tensor, and ``M_c`` the upwind dilation (S < 0) or erosion (S > 0) magnitude.
Known pixels are held at their data values.
"""

from __future__ import annotations

import logging
import math
import time

import numpy as np

from . import _kernels
from .guidance import guidance
from .image_core import as_channels, as_mask
from .params import RdsParams, check_time_step
from .report import SolverReport
from .shock_filters import gradient_direction_derivative
from .stencils import _half_kernel
from .structure import smooth_tensor, directional_second_derivative_presmoothed, joint_mean

logger = logging.getLogger(__name__)


def _smooth(channel, sigma):
    return _kernels.gaussian_2d(channel, _half_kernel(sigma), False) if sigma > 0 else channel


def blending_weight(u: np.ndarray, params: RdsParams) -> np.ndarray:
    """Joint Charbonnier weight ``g(mean_c |grad (u_c)_nu|^2)``."""
    if math.isinf(params.lam):
        return np.ones(u.shape[1:])
    squares = [_kernels.sobel_square(_smooth(channel, params.nu), params.h) for channel in u]
    return _kernels.charbonnier(joint_mean(squares), params.lam)


def shock_guidance(u: np.ndarray, params: RdsParams) -> np.ndarray:
    """Per-channel guidance ``S_eps(L (u_c)_sigma)``, shape ``(n_c, H, W)``."""
    smoothed = [_smooth(channel, params.sigma) for channel in u]
    if params.shock == "coherence":
        products = [_kernels.sobel_products(v, params.h) for v in smoothed]
        field = smooth_tensor(*(joint_mean([p[k] for p in products]) for k in range(3)), params.rho)
        second = [directional_second_derivative_presmoothed(v, field.c, field.s, params.h) for v in smoothed]
    else:
        second = [gradient_direction_derivative(v, params.h) for v in smoothed]
    return np.stack([guidance(d, params.epsilon, params.guidance) for d in second])


class _StepTerms:
    """Weight and guidance, recomputed every ``params.lag`` steps."""

    def __init__(self, params: RdsParams):
        self.params = params
        self.age = params.lag
        self.g = None
        self.s = None

    def get(self, u):
        if self.age >= self.params.lag:
            self.g = blending_weight(u, self.params)
            self.s = None if math.isinf(self.params.lam) else shock_guidance(u, self.params)
            self.age = 0
        self.age += 1
        return self.g, self.s


def _advance(u, known, params: RdsParams, g, s) -> tuple[np.ndarray, float]:
    new = np.empty_like(u)
    largest = 0.0
    for c, channel in enumerate(u):
        shock = s[c] if s is not None else g
        change = _kernels.rds_update(
            channel, known, g, shock, s is not None, params.delta, params.h, params.tau, new[c]
        )
        largest = max(largest, change)
    return new, largest


def _check_run(u, mask, params: RdsParams):
    check_time_step(params.tau, params.tau_bound)
    if not mask.any():
        raise ValueError("inpainting mask contains no known pixels")


def rds_step(u, mask, params: RdsParams) -> np.ndarray:
    """One explicit RDS step; known pixels keep their current values."""
    u = as_channels(u)
    mask = as_mask(mask, u.shape[1:])
    _check_run(u, mask, params)
    g = blending_weight(u, params)
    s = None if math.isinf(params.lam) else shock_guidance(u, params)
    return _advance(u, mask, params, g, s)[0]


def initial_state(f: np.ndarray, mask: np.ndarray, init: str = "mean") -> np.ndarray:
    """Known pixels from ``f``; unknown ones set to the channel mean of the known data (or 0)."""
    u = np.empty_like(f)
    for c, channel in enumerate(f):
        fill = math.fsum(channel[mask].tolist()) / int(mask.sum()) if init == "mean" else 0.0
        u[c] = np.where(mask, channel, fill)
    return u


def inpaint_vector(f, mask, params: RdsParams, callback=None) -> tuple[np.ndarray, SolverReport]:
    """Inpaint a ``(n_c, H, W)`` image with channel-coupled weight and structure tensor.

    Stops when the largest update over unknown pixels drops below
    ``params.stop_tolerance`` or after ``params.max_iterations`` steps.
    ``callback(k, u)`` is called after every step.
    """
    f = as_channels(f)
    mask = as_mask(mask, f.shape[1:])
    _check_run(f, mask, params)
    u = initial_state(f, mask, params.init)
    report = SolverReport.start(u)
    terms = _StepTerms(params)
    start = time.perf_counter()
    k = 0
    update = 0.0
    if mask.all():
        report.finish(0, 0.0, 0.0)
        return u, report
    while k < params.max_iterations:
        g, s = terms.get(u)
        u, update = _advance(u, mask, params, g, s)
        k += 1
        report.observe(u)
        if callback is not None:
            callback(k, u)
        if update < params.stop_tolerance:
            break
    report.finish(k, update, time.perf_counter() - start)
    logger.info("RDS inpainting: %d iterations, max update %.3g, %.2f s", k, update, report.wall_seconds)
    return u, report


def inpaint(f, mask, params: RdsParams, callback=None) -> tuple[np.ndarray, SolverReport]:
    """Inpaint a scalar ``(H, W)`` or multi-channel image; the output keeps the input's layout."""
    arr = np.asarray(f, dtype=np.float64)
    result, report = inpaint_vector(arr, mask, params, callback)
    return (result[0] if arr.ndim == 2 else result), report


__all__ = [
    "blending_weight",
    "initial_state",
    "inpaint",
    "inpaint_vector",
    "rds_step",
    "shock_guidance",
]
