"""Solver tolerances and iteration limits.

The tolerance hierarchy is fixed: root residuals are tighter than gradient
residuals, which are tighter than geometric classification, which is tighter
than limit comparisons.  Geometric decisions (cone membership, center bands)
must never be finer than the root solvers that feed them.
"""

from __future__ import annotations

import os
from dataclasses import dataclass


@dataclass(frozen=True)
class SolverConfig:
    eps_root: float = 1e-12
    eps_grad: float = 1e-10
    eps_geom: float = 1e-9
    eps_limit: float = 1e-6
    max_iter: int = 200

    def __post_init__(self):
        for name in ("eps_root", "eps_grad", "eps_geom", "eps_limit"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.max_iter <= 0:
            raise ValueError("max_iter must be positive")

    @classmethod
    def from_env(cls, environ=None, **overrides) -> "SolverConfig":
        """Build a config from KMS_CAYLEY_EPS_* variables, then overrides."""
        env = os.environ if environ is None else environ
        kwargs = {}
        for field, var in (
            ("eps_root", "KMS_CAYLEY_EPS_ROOT"),
            ("eps_grad", "KMS_CAYLEY_EPS_GRAD"),
            ("eps_geom", "KMS_CAYLEY_EPS_GEOM"),
            ("eps_limit", "KMS_CAYLEY_EPS_LIMIT"),
        ):
            if var in env:
                kwargs[field] = float(env[var])
        kwargs.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**kwargs)


DEFAULT_CONFIG = SolverConfig()
