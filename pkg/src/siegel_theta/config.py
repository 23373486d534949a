"""Run-wide numerical settings."""

from __future__ import annotations

import os
from dataclasses import dataclass, replace

ENV_EPS = "SIEGEL_THETA_EPS"


@dataclass(frozen=True)
class Config:
    eps: float = 1e-10
    pd_tol: float = 1e-12
    matrix_tol: float = 1e-10
    check_radius: int = 1
    seed: int = 0

    def __post_init__(self):
        if not 1e-15 < self.eps < 1e-2:
            raise ValueError("eps must lie in (1e-15, 1e-2)")
        if not (self.pd_tol > 0 and self.matrix_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.check_radius < 1:
            raise ValueError("check_radius must be at least 1")

    @classmethod
    def from_env(cls, **overrides) -> "Config":
        cfg = cls()
        raw = os.environ.get(ENV_EPS)
        if raw:
            cfg = replace(cfg, eps=float(raw))
        overrides = {k: v for k, v in overrides.items() if v is not None}
        return replace(cfg, **overrides)
