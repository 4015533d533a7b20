"""Piecewise-constant potentials and the uniform local L1 constant of their
negative part.

A potential is described by finitely many constant cells and extended by zero
outside the described interval.  All integrals of the negative part are closed
form, and the sliding-window supremum

    sup_x  integral_{x}^{x+1} max(-V(y), 0) dy

is computed exactly: the window integral is piecewise linear in x, so its
maximum is attained at a breakpoint of either window edge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class PiecewisePotential:
    """Real potential, constant on cells [x_i, x_{i+1}), zero outside.

    breakpoints: strictly increasing abscissae x_0 < ... < x_n (n+1 of them)
    values: n cell values
    """

    breakpoints: tuple
    values: tuple

    def __post_init__(self):
        bp = tuple(float(b) for b in self.breakpoints)
        vals = tuple(float(v) for v in self.values)
        if len(bp) < 2:
            raise ValueError("need at least two breakpoints (one cell)")
        if len(vals) != len(bp) - 1:
            raise ValueError("values must have one entry per cell")
        if not all(math.isfinite(b) for b in bp):
            raise ValueError("breakpoints must be finite")
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("values must be finite")
        if any(b1 <= b0 for b0, b1 in zip(bp, bp[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)

    @property
    def support(self):
        """Described interval [x_0, x_n]; V vanishes outside it."""
        return (self.breakpoints[0], self.breakpoints[-1])

    @property
    def bp_array(self):
        return np.asarray(self.breakpoints)

    @property
    def value_array(self):
        return np.asarray(self.values)

    @property
    def negative_values(self):
        """Cell values of the negative part V_-(x) = max(-V(x), 0)."""
        return np.maximum(-self.value_array, 0.0)

    def value_at(self, x):
        """Evaluate V at x (scalar or array); right-continuous on cells,
        zero outside the described interval."""
        x = np.asarray(x, dtype=float)
        bp = self.bp_array
        idx = np.searchsorted(bp, x, side="right") - 1
        inside = (x >= bp[0]) & (x <= bp[-1])
        idx = np.clip(idx, 0, len(self.values) - 1)
        out = np.where(inside, self.value_array[idx], 0.0)
        return out if out.ndim else float(out)

    def scaled(self, lam):
        """The potential lam * V on the same cells."""
        return PiecewisePotential(self.breakpoints, tuple(lam * v for v in self.values))

    def translated(self, t):
        """V(x - t): all breakpoints shifted by t."""
        return PiecewisePotential(tuple(b + t for b in self.breakpoints), self.values)

    def reflected(self):
        """V(-x): cells mirrored about the origin."""
        return PiecewisePotential(
            tuple(-b for b in reversed(self.breakpoints)),
            tuple(reversed(self.values)),
        )

    def to_dict(self):
        return {"breakpoints": list(self.breakpoints), "values": list(self.values)}

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(d["breakpoints"]), tuple(d["values"]))


@dataclass(frozen=True)
class WindowIntegralProfile:
    """Exact profile of F(x) = integral_x^{x+1} V_- evaluated at every
    candidate kink, plus its supremum and (smallest) maximizer."""

    candidates: tuple
    integrals: tuple
    supremum: float
    argmax: float


def _check_interval(a, b):
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("integration endpoints must be finite")
    if a > b:
        raise ValueError(f"empty interval: a={a} > b={b}")


def negative_part_integral(V: PiecewisePotential, a: float, b: float) -> float:
    """Exact integral of V_- over [a, b] (zero extension outside the cells)."""
    _check_interval(float(a), float(b))
    bp = V.bp_array
    vminus = V.negative_values
    lo = np.maximum(bp[:-1], a)
    hi = np.minimum(bp[1:], b)
    lengths = np.maximum(hi - lo, 0.0)
    return float(np.dot(lengths, vminus))


def _cumulative_vminus(V: PiecewisePotential):
    """Knots and values of G(t) = integral_{x_0}^{t} V_-, piecewise linear."""
    bp = V.bp_array
    widths = np.diff(bp)
    cum = np.concatenate([[0.0], np.cumsum(widths * V.negative_values)])
    return bp, cum


def window_integral(V: PiecewisePotential, x, length: float = 1.0):
    """F(x) = integral over [x, x+length] of V_-, vectorized in x."""
    bp, cum = _cumulative_vminus(V)
    x = np.asarray(x, dtype=float)
    g_hi = np.interp(x + length, bp, cum, left=0.0, right=cum[-1])
    g_lo = np.interp(x, bp, cum, left=0.0, right=cum[-1])
    out = g_hi - g_lo
    return out if out.ndim else float(out)


def c1_sup(V: PiecewisePotential) -> WindowIntegralProfile:
    """Exact supremum of the unit-window integral of V_-.

    F is continuous, piecewise linear, with kinks only where x or x+1 crosses
    a breakpoint; it vanishes for x <= x_0 - 1 and x >= x_n.  Evaluating F at
    all kinks (clipped to [x_0 - 1, x_n]) therefore yields the exact sup.
    Ties are broken toward the smallest abscissa.
    """
    bp = V.bp_array
    lo, hi = bp[0] - 1.0, bp[-1]
    cands = np.unique(np.clip(np.concatenate([bp, bp - 1.0]), lo, hi))
    F = window_integral(V, cands)
    sup = float(np.max(F))
    tol = 1e-12 * (1.0 + abs(sup))
    arg = float(cands[np.flatnonzero(F >= sup - tol)[0]])
    return WindowIntegralProfile(
        candidates=tuple(cands.tolist()),
        integrals=tuple(F.tolist()),
        supremum=sup,
        argmax=arg,
    )


def _square_well(depth, width):
    depth = float(depth)
    width = float(width)
    if width <= 0:
        raise ValueError("square_well width must be positive")
    return PiecewisePotential((0.0, width), (-depth,))


def _spike_lattice(g, period, cap, cell, span):
    g = float(g)
    period = float(period)
    cap = float(cap)
    cell = float(cell)
    span = float(span)
    if min(period, cap, cell, span) <= 0 or g < 0:
        raise ValueError("spike_lattice parameters must be positive")
    n = int(round(span / cell))
    if n < 1:
        raise ValueError("span too small for the requested cell width")
    bp = np.arange(n + 1) * cell
    mids = (bp[:-1] + bp[1:]) / 2
    # one spike per period, centered in the period
    centers = (np.floor(mids / period) + 0.5) * period
    dist = np.abs(mids - centers)
    with np.errstate(divide="ignore"):
        depth = np.where(dist > 0, g / np.sqrt(dist), np.inf)
    vals = -np.minimum(depth, cap)
    return PiecewisePotential(tuple(bp.tolist()), tuple(vals.tolist()))


def _random_step(cells, low, high, seed, min_width=0.05, max_width=0.5):
    cells = int(cells)
    low = float(low)
    high = float(high)
    if cells < 1:
        raise ValueError("random_step needs at least one cell")
    if high <= low:
        raise ValueError("random_step value range is empty")
    if not (0 < min_width <= max_width):
        raise ValueError("random_step width range invalid")
    rng = np.random.default_rng(seed)
    # widths quantized to 1e-3 so breakpoints land on any grid of step 1e-4
    wlo = max(1, int(round(min_width * 1000)))
    whi = max(wlo, int(round(max_width * 1000)))
    widths = rng.integers(wlo, whi + 1, size=cells) * 1e-3
    bp = np.concatenate([[0.0], np.cumsum(widths)])
    vals = rng.uniform(low, high, size=cells)
    return PiecewisePotential(tuple(bp.tolist()), tuple(vals.tolist()))


def make_family(kind: str, params: dict, seed=None) -> PiecewisePotential:
    """Construct a corpus potential; deterministic for fixed (kind, params, seed).

    kinds:
      square_well(depth, width)         -> V = -depth on [0, width]
      spike_lattice(g, period, cap, cell, span)
            -> discretized -g/sqrt(|x-m|) spikes, truncated at depth cap
      random_step(cells, low, high)     -> seeded uniform cell values
    """
    params = dict(params)
    if kind == "square_well":
        return _square_well(params.get("depth", 1.0), params.get("width", 1.0))
    if kind == "spike_lattice":
        return _spike_lattice(
            params.get("g", 1.0),
            params.get("period", 1.0),
            params.get("cap", 100.0),
            params.get("cell", 1e-3),
            params.get("span", 5.0),
        )
    if kind == "random_step":
        return _random_step(
            params.get("cells", 20),
            params.get("low", -2.0),
            params.get("high", 2.0),
            params.get("seed", seed),
            params.get("min_width", 0.05),
            params.get("max_width", 0.5),
        )
    raise ValueError(f"unknown potential family: {kind!r}")
