"""Explicit estimate constants derived from C1 and the energy.

With C2 = C1 + |E| the derivative bound uses C = C2 + 2*sqrt(C2) and window
radius K = 1/sqrt(C2); the persistence-of-modulus bound uses
delta = -1/2 + sqrt(1/4 + 1/(2*C2)), equivalently the positive root of
C2*d*(d+1) = 1/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateConstants


@dataclass(frozen=True)
class Energy:
    """Complex spectral parameter."""

    re: float
    im: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.re) and math.isfinite(self.im)):
            raise ValueError("energy components must be finite")

    @property
    def as_complex(self) -> complex:
        return complex(self.re, self.im)

    @property
    def modulus(self) -> float:
        return abs(self.as_complex)

    def is_real(self, tol: float = 0.0) -> bool:
        return abs(self.im) <= tol

    @classmethod
    def of(cls, value) -> "Energy":
        if isinstance(value, Energy):
            return value
        if isinstance(value, dict):
            return cls(float(value.get("re", 0.0)), float(value.get("im", 0.0)))
        z = complex(value)
        return cls(z.real, z.imag)

    def to_dict(self):
        return {"re": self.re, "im": self.im}


@dataclass(frozen=True)
class EstimateConstants:
    """Bundle (C1, E, C2, C, K, delta); the L^p exponent is per-check."""

    c1: float
    energy: Energy
    c2: float
    c_bound: float
    k_radius: float
    delta: float

    def validate(self, tol: float = 1e-12):
        """Re-assert the defining identities (used when echoing into reports)."""
        scale = max(1.0, self.c2)
        # equality with c1 + |E| unless a caller-supplied floor lifted c2
        assert self.c2 >= self.c1 + self.energy.modulus - tol * scale
        assert abs(self.c_bound - (self.c2 + 2 * math.sqrt(self.c2))) <= tol * max(1.0, self.c_bound)
        assert abs(self.k_radius - 1 / math.sqrt(self.c2)) <= tol * max(1.0, self.k_radius)
        assert abs(self.c2 * self.delta * (self.delta + 1) - 0.5) <= tol
        assert abs(self.c_bound - self.c2 * (1 + 2 * self.k_radius)) <= tol * max(1.0, self.c_bound)

    def to_dict(self):
        return {
            "c1": self.c1,
            "energy": self.energy.to_dict(),
            "c2": self.c2,
            "c_bound": self.c_bound,
            "k_radius": self.k_radius,
            "delta": self.delta,
        }


def constants_for(c1: float, energy, c2_floor: float = 0.0) -> EstimateConstants:
    """Compute the estimate constants for given C1 >= 0 and energy.

    Raises DegenerateConstants when C2 = 0 (V_- identically zero and E = 0):
    K and delta are unbounded there, and clamping silently would fabricate
    constants.  Callers may opt in to a positive c2_floor instead.
    """
    c1 = float(c1)
    if not math.isfinite(c1) or c1 < 0:
        raise ValueError("c1 must be finite and nonnegative")
    if c2_floor < 0:
        raise ValueError("c2_floor must be nonnegative")
    energy = Energy.of(energy)
    c2 = max(c1 + energy.modulus, float(c2_floor))
    if c2 <= 0.0:
        raise DegenerateConstants(
            "C2 = C1 + |E| = 0; K and delta are unbounded (set a c2_floor to proceed)"
        )
    x = 1.0 / (2.0 * c2)
    if x > 1e16:
        # sqrt(1/4 + x) = sqrt(x) to machine precision here, and x itself may
        # overflow for subnormal c2, so use the asymptotic form directly
        delta = 1.0 / math.sqrt(2.0 * c2) - 0.5
    else:
        # stable form of -1/2 + sqrt(1/4 + x): avoids cancellation for small x
        delta = x / (0.5 + math.sqrt(0.25 + x))
    return EstimateConstants(
        c1=c1,
        energy=energy,
        c2=c2,
        c_bound=c2 + 2.0 * math.sqrt(c2),
        k_radius=1.0 / math.sqrt(c2),
        delta=delta,
    )
