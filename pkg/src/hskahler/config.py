"""Tolerance and seed configuration.

All numerical decisions in the package go through a `Config`.  The
defaults below are the documented contract; tests pin them.  Every
tolerance is either absolute or explicitly relative, as noted.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass


@dataclass(frozen=True)
class Config:
    # absolute, for algebraic identities on O(1)-scaled data
    tol_alg: float = 1e-9
    # absolute, for Jacobi / first-Bianchi residuals
    tol_jacobi: float = 1e-8
    # relative to the largest singular value, for rank decisions
    tol_rank: float = 1e-8
    # scaled by max(1, ||rhs||) in the feasibility test
    tol_feas: float = 1e-8
    # scaled by max(1, largest structure-constant magnitude) in certificates
    tol_cert: float = 1e-8
    # relative to the spectral scale, for joint-diagonalization residuals
    tol_diag: float = 1e-8
    # coefficient pruning threshold on canonicalized forms
    prune: float = 1e-14
    # seed for every randomized routine (joint diagonalization, searches)
    seed: int = 0

    def replace(self, **kw) -> "Config":
        return dataclasses.replace(self, **kw)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "Config":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValueError(f"unknown config fields: {', '.join(unknown)}")
        return cls(**data)


DEFAULT_CONFIG = Config()

TOOL_VERSION = "0.1.0"
