"""Solver parameters, stability bounds and the two-parameter coupling."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

from .guidance import GUIDANCE_KINDS
from .morphology import morphology_time_step_bound
from .stencils import DEFAULT_DELTA, check_delta

SHOCK_KINDS = ("coherence", "alvarez_mazorra")
INIT_KINDS = ("mean", "zero")
TAU_SAFETY = 0.95
SCALE_COUPLING = 1.6
TONAL_COUPLING = 0.15


class StabilityError(ValueError):
    """The requested time step violates the maximum-minimum stability bound."""


def diffusion_time_step_bound(delta: float = DEFAULT_DELTA, h: float = 1.0) -> float:
    """Largest explicit time step ``h^2 / (4 - 2 delta)`` for the delta-Laplacian."""
    if h <= 0:
        raise ValueError(f"grid size must be positive, got {h}")
    return h * h / (4.0 - 2.0 * check_delta(delta))


def stable_time_step_bound(delta: float = DEFAULT_DELTA, h: float = 1.0) -> float:
    return min(diffusion_time_step_bound(delta, h), morphology_time_step_bound(delta, h))


def default_time_step(delta: float = DEFAULT_DELTA, h: float = 1.0) -> float:
    return TAU_SAFETY * stable_time_step_bound(delta, h)


@dataclass(frozen=True)
class RdsParams:
    """All parameters of an RDS evolution.

    ``lam = inf`` switches off the shock term (homogeneous diffusion).
    ``tau = None`` selects 0.95 times the stability bound.  ``lag`` recomputes
    the weight and the guidance every ``lag`` steps.
    """

    sigma: float
    rho: float
    nu: float
    lam: float
    epsilon: float
    delta: float = DEFAULT_DELTA
    tau: float | None = None
    guidance: str = "arctan"
    shock: str = "coherence"
    max_iterations: int = 100_000
    stop_tolerance: float = 1e-3
    h: float = 1.0
    init: str = "mean"
    lag: int = 1
    tau_bound: float = field(init=False, repr=False)

    def __post_init__(self):
        for name in ("sigma", "rho", "nu", "epsilon"):
            value = getattr(self, name)
            if not value >= 0 or math.isnan(value):
                raise ValueError(f"{name} must be non-negative, got {value}")
        if not self.lam > 0:
            raise ValueError(f"lam must be positive, got {self.lam}")
        if self.guidance not in GUIDANCE_KINDS:
            raise ValueError(f"guidance must be one of {GUIDANCE_KINDS}, got {self.guidance!r}")
        if self.guidance == "arctan" and self.epsilon == 0:
            raise ValueError("arctan guidance needs epsilon > 0")
        if self.shock not in SHOCK_KINDS:
            raise ValueError(f"shock must be one of {SHOCK_KINDS}, got {self.shock!r}")
        if self.init not in INIT_KINDS:
            raise ValueError(f"init must be one of {INIT_KINDS}, got {self.init!r}")
        if self.max_iterations < 0 or self.lag < 1 or self.stop_tolerance < 0:
            raise ValueError("max_iterations >= 0, lag >= 1 and stop_tolerance >= 0 are required")
        check_delta(self.delta)
        bound = stable_time_step_bound(self.delta, self.h)
        object.__setattr__(self, "tau_bound", bound)
        if self.tau is None:
            object.__setattr__(self, "tau", TAU_SAFETY * bound)
        check_time_step(self.tau, bound)

    def as_dict(self) -> dict:
        d = asdict(self)
        d.pop("tau_bound")
        return d


def check_time_step(tau: float, bound: float) -> None:
    if not tau > 0:
        raise ValueError(f"time step must be positive, got {tau}")
    if tau > bound:
        raise StabilityError(f"time step {tau} exceeds the stability bound {bound:.6g}")


def couple_parameters(sigma: float, lam: float, **overrides) -> RdsParams:
    """Two-parameter RDS setup: ``rho = nu = 1.6 sigma`` and ``epsilon = 0.15 lam``."""
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if not lam > 0:
        raise ValueError(f"lam must be positive, got {lam}")
    scale = SCALE_COUPLING * sigma
    values = dict(sigma=sigma, rho=scale, nu=scale, lam=lam, epsilon=TONAL_COUPLING * lam)
    values.update(overrides)
    return RdsParams(**values)


def homogeneous_diffusion_params(**overrides) -> RdsParams:
    """Degenerate configuration with weight g = 1 everywhere."""
    values = dict(sigma=0.0, rho=0.0, nu=0.0, lam=math.inf, epsilon=math.inf)
    values.update(overrides)
    return RdsParams(**values)
