"""Error and shape measures for comparing results against references."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import ndimage
from skimage import measure

from .image_core import as_channels

PEAK = 255.0


@dataclass(frozen=True)
class Metrics:
    mse: float
    psnr: float
    binary_accuracy: float

    def as_dict(self) -> dict:
        return asdict(self)


def compute_metrics(result, reference) -> Metrics:
    """MSE over all pixels and channels, PSNR over the 255 range, and binary accuracy.

    Both images are thresholded at the reference's ``(min + max) / 2`` for the
    accuracy.  PSNR is ``inf`` for identical images.
    """
    u = as_channels(result)
    ref = as_channels(reference)
    if u.shape != ref.shape:
        raise ValueError(f"shape mismatch: result {u.shape} vs reference {ref.shape}")
    mse = float(np.mean((u - ref) ** 2))
    psnr = math.inf if mse == 0 else 10.0 * math.log10(PEAK * PEAK / mse)
    level = 0.5 * (float(ref.min()) + float(ref.max()))
    accuracy = float(np.mean((u > level) == (ref > level)))
    return Metrics(mse=mse, psnr=psnr, binary_accuracy=accuracy)


def threshold(img, level: float = 0.5 * PEAK) -> np.ndarray:
    return np.asarray(img, dtype=np.float64) > level


def connected_components(binary) -> int:
    """Number of 4-connected foreground components."""
    return int(ndimage.label(np.asarray(binary, dtype=bool))[1])


def contour_perimeter(img, level: float = 0.5 * PEAK) -> float:
    """Length of the marching-squares isoline of ``img`` at ``level``."""
    total = 0.0
    for contour in measure.find_contours(np.asarray(img, dtype=np.float64), level):
        total += float(np.sum(np.hypot(*np.diff(contour, axis=0).T)))
    return total


def isoperimetric_ratio(img, level: float = 0.5 * PEAK) -> float:
    """``4 pi A / P^2`` of the thresholded region; 1 for a perfect disk."""
    area = float(np.count_nonzero(threshold(img, level)))
    perimeter = contour_perimeter(img, level)
    return 0.0 if perimeter == 0 else 4.0 * math.pi * area / perimeter**2


def binary_fraction(img, tol: float = 1.0, low: float = 0.0, high: float = PEAK) -> float:
    """Fraction of pixels within ``tol`` of ``low`` or ``high``."""
    arr = np.asarray(img, dtype=np.float64)
    return float(np.mean((np.abs(arr - low) <= tol) | (np.abs(arr - high) <= tol)))


def touches_borders(binary) -> tuple[bool, bool, bool, bool]:
    """Whether the foreground reaches the (left, right, top, bottom) image borders."""
    b = np.asarray(binary, dtype=bool)
    return bool(b[:, 0].any()), bool(b[:, -1].any()), bool(b[0].any()), bool(b[-1].any())
