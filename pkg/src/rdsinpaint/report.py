"""Run statistics shared by the shock filter and the inpainting solver."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .image_core import write_key_values


@dataclass
class SolverReport:
    iterations_run: int = 0
    final_max_update: float = 0.0
    wall_seconds: float = 0.0
    observed_min: float = np.inf
    observed_max: float = -np.inf
    input_min: float = np.inf
    input_max: float = -np.inf

    @classmethod
    def start(cls, u: np.ndarray) -> "SolverReport":
        lo, hi = float(np.min(u)), float(np.max(u))
        return cls(input_min=lo, input_max=hi, observed_min=lo, observed_max=hi)

    def observe(self, u: np.ndarray) -> None:
        self.observed_min = min(self.observed_min, float(np.min(u)))
        self.observed_max = max(self.observed_max, float(np.max(u)))

    def finish(self, iterations: int, max_update: float, seconds: float) -> None:
        self.iterations_run = iterations
        self.final_max_update = max_update
        self.wall_seconds = seconds

    def within_bounds(self, tol: float = 1e-9) -> bool:
        return self.observed_min >= self.input_min - tol and self.observed_max <= self.input_max + tol

    def as_dict(self) -> dict:
        return asdict(self)

    def write(self, path) -> None:
        write_key_values({k: repr(v) if isinstance(v, float) else v for k, v in self.as_dict().items()}, path)
