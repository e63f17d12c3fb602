"""Tonal control: Charbonnier weight and the sigmoidal shock guidance."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

GUIDANCE_KINDS = ("arctan", "sign")


@dataclass(frozen=True)
class GuidanceConfig:
    lam: float
    epsilon: float = 0.0
    kind: str = "arctan"

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"contrast parameter must be positive, got {self.lam}")
        if self.kind not in GUIDANCE_KINDS:
            raise ValueError(f"guidance kind must be one of {GUIDANCE_KINDS}, got {self.kind!r}")
        if self.epsilon < 0:
            raise ValueError(f"epsilon must be non-negative, got {self.epsilon}")
        if self.kind == "arctan" and self.epsilon == 0:
            raise ValueError("arctan guidance needs epsilon > 0; use kind='sign' for the limit")


def charbonnier_weight(sq_grad, lam: float):
    """``1 / sqrt(1 + s / lam^2)``, in (0, 1] and strictly decreasing in ``s``.

    ``lam = inf`` gives the constant weight 1 (pure diffusion).
    """
    if not lam > 0:
        raise ValueError(f"contrast parameter must be positive, got {lam}")
    sq_grad = np.asarray(sq_grad, dtype=np.float64)
    if np.any(sq_grad < 0):
        raise ValueError("squared gradient must be non-negative")
    out = 1.0 / np.sqrt(1.0 + sq_grad / (lam * lam))
    return out if out.ndim else float(out)


def sigmoid_guidance(x, cfg: GuidanceConfig):
    """``(2 / pi) arctan(x / epsilon)``, or ``sgn(x)`` (with sgn(0) = 0) for kind 'sign'."""
    return guidance(x, cfg.epsilon, cfg.kind)


def guidance(x, epsilon: float, kind: str = "arctan"):
    x = np.asarray(x, dtype=np.float64)
    if kind == "sign":
        out = np.sign(x)
    elif kind == "arctan":
        out = (2.0 / math.pi) * np.arctan(x / epsilon)
    else:
        raise ValueError(f"guidance kind must be one of {GUIDANCE_KINDS}, got {kind!r}")
    return out if out.ndim else float(out)
