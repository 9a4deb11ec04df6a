"""Tolerance settings shared by every module."""

from __future__ import annotations

import os
from dataclasses import dataclass, replace

ENV_TOL = "CONERETRACT_TOL"


@dataclass(frozen=True)
class ToleranceConfig:
    """One set of numerical tolerances.

    ``base`` is the relative tolerance used for membership and residual
    checks. ``absolute`` is the floor used where no natural scale exists.
    A property counts as violated once its residual exceeds
    ``violation_factor * base``.
    """

    base: float = 1e-9
    absolute: float = 1e-12
    parallel: float = 1e-10
    violation_factor: float = 10.0
    max_dim: int = 8
    face_budget: int = 20000

    @property
    def violation(self) -> float:
        return self.violation_factor * self.base

    def with_base(self, base: float) -> "ToleranceConfig":
        if not base > 0:
            raise ValueError(f"tolerance must be positive, got {base!r}")
        return replace(self, base=float(base))

    @classmethod
    def from_env(cls, environ=None) -> "ToleranceConfig":
        environ = os.environ if environ is None else environ
        raw = environ.get(ENV_TOL)
        cfg = cls()
        if raw:
            cfg = cfg.with_base(float(raw))
        return cfg


DEFAULT = ToleranceConfig()


def resolve(tol: ToleranceConfig | None) -> ToleranceConfig:
    return DEFAULT if tol is None else tol
