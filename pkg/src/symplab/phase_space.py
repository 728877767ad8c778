"""Slice integrals of symplectic currents: omega, slice independence, gauge degeneracy.

A current provider maps spacetime points ``(P, D+1)`` to J^mu ``(P, D+1)``
(upper index).  On a constant-time slice of a periodic box the flux is
omega = sum J^0 h^D, summed with a fixed binary-tree topology so results are
bit-reproducible.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError, PreconditionError

CurrentProvider = Callable[[np.ndarray], np.ndarray]

DEGENERACY_TOL = 1e-9
FLOOR_FACTOR = 1e-6


def tree_sum(x) -> float:
    """Sum with a fixed pairwise topology (independent of numpy's blocking)."""
    v = np.ravel(np.asarray(x, dtype=float))
    if v.size == 0:
        return 0.0
    while v.size > 1:
        if v.size % 2:
            v = np.append(v, 0.0)
        v = v[0::2] + v[1::2]
    return float(v[0])


@dataclass(frozen=True)
class SliceSpec:
    time: float
    L: float
    N: int
    D: int = 3
    origin: float = 0.0

    def __post_init__(self):
        if self.N < 8:
            raise DomainError("slices need at least 8 points per axis")
        if not self.L > 0 or self.D < 1:
            raise DomainError("slice box must have positive size and dimension")

    @property
    def h(self) -> float:
        return self.L / self.N

    @property
    def weight(self) -> float:
        return self.h ** self.D

    @property
    def volume(self) -> float:
        return self.L ** self.D

    def weights_sum(self) -> float:
        return self.weight * self.N ** self.D

    def points(self, stride: int = 1) -> np.ndarray:
        """Spacetime points (N^D, D+1) in C order over the spatial axes."""
        x = self.origin + np.arange(0, self.N, stride) * self.h
        grid = np.array(list(itertools.product(x, repeat=self.D))).reshape(-1, self.D)
        return np.concatenate([np.full((len(grid), 1), self.time), grid], axis=1)

    def at(self, time: float) -> SliceSpec:
        return SliceSpec(time, self.L, self.N, self.D, self.origin)


@dataclass(frozen=True)
class OmegaValue:
    value: float
    slice: SliceSpec
    error: float     # |omega(N) - omega(N/2)| from the even-index subgrid

    def __post_init__(self):
        if not self.error >= 0:
            raise ValueError("error estimate must be non-negative")


def _flux(provider: CurrentProvider, sl: SliceSpec, stride: int = 1) -> float:
    pts = sl.points(stride)
    J = np.asarray(provider(pts), dtype=float)
    if J.shape != (len(pts), sl.D + 1):
        raise DomainError(f"current provider returned shape {J.shape}, expected {(len(pts), sl.D + 1)}")
    return tree_sum(J[:, 0]) * (sl.h * stride) ** sl.D


def integrate_slice(provider: CurrentProvider, sl: SliceSpec, estimate_error: bool = True) -> OmegaValue:
    value = _flux(provider, sl)
    err = abs(value - _flux(provider, sl, 2)) if estimate_error and sl.N % 2 == 0 and sl.N >= 16 else 0.0
    return OmegaValue(value, sl, err)


@dataclass
class SliceReport:
    omegas: list[OmegaValue]
    deviation: float        # max pairwise |d omega| / max(max |omega|, floor)
    max_abs: float
    floor: float
    warnings: list[str] = field(default_factory=list)

    def passes(self, tol: float) -> bool:
        return self.deviation <= tol


def slice_independence(provider: CurrentProvider, slices: list[SliceSpec], norm1: float = 1.0, norm2: float = 1.0,
                       on_shell: bool = True) -> SliceReport:
    """Compare omega across constant-time slices.

    ``norm1``/``norm2`` are the variation sizes entering the normalization
    floor 1e-6 |h1| |h2| V.
    """
    if len(slices) < 2:
        raise PreconditionError("need at least two slices")
    oms = [integrate_slice(provider, s, estimate_error=False) for s in slices]
    vals = np.array([o.value for o in oms])
    max_abs = float(np.max(np.abs(vals[:, None] - vals[None, :])))
    floor = FLOOR_FACTOR * norm1 * norm2 * slices[0].volume
    dev = max_abs / max(float(np.max(np.abs(vals))), floor)
    warns = [] if on_shell else ["inputs are off-shell: deviation measures the violation"]
    return SliceReport(oms, dev, max_abs, floor, warns)


def slice_norm(values: np.ndarray) -> float:
    """Max-norm of a variation sampled on a slice."""
    return float(np.max(np.abs(values), initial=0.0))


def ball_rule(center, radius: float, D: int, order: int = 24) -> tuple[np.ndarray, np.ndarray]:
    """Product rule on a D-ball (D <= 3): Gauss-Legendre in r (and cos theta), trapezoid in phi.

    Exact up to high polynomial degree, so smooth integrands supported in the
    ball converge spectrally, unlike a grid sum across the ball's edge.
    """
    c = np.asarray(center, float)
    x, w = np.polynomial.legendre.leggauss(order)
    r = 0.5 * radius * (x + 1)
    wr = 0.5 * radius * w
    if D == 1:
        pts = (c[0] + radius * x)[:, None]
        return pts, radius * w
    nphi = 2 * order
    phi = 2 * np.pi * np.arange(nphi) / nphi
    wphi = np.full(nphi, 2 * np.pi / nphi)
    if D == 2:
        R, P = np.meshgrid(r, phi, indexing="ij")
        pts = np.stack([R * np.cos(P), R * np.sin(P)], -1).reshape(-1, 2) + c
        return pts, (np.outer(wr * r, wphi)).ravel()
    if D == 3:
        ct, wt = x, w
        st = np.sqrt(1 - ct ** 2)
        R, T, P = np.meshgrid(r, np.arange(order), phi, indexing="ij")
        pts = np.stack([R * st[T] * np.cos(P), R * st[T] * np.sin(P), R * ct[T]], -1).reshape(-1, 3) + c
        wts = np.einsum("i,j,k->ijk", wr * r ** 2, wt, wphi).ravel()
        return pts, wts
    raise DomainError("ball rule supports D <= 3")


def integrate_ball(provider: CurrentProvider, time: float, center, radius: float, D: int,
                   order: int = 24) -> tuple[float, float]:
    """(omega over the ball, |difference| from the rule at 2/3 the order)."""
    vals = []
    for o in (order, max(4, 2 * order // 3)):
        pts, w = ball_rule(center, radius, D, o)
        pts = np.concatenate([np.full((len(pts), 1), time), pts], axis=1)
        J = np.asarray(provider(pts), dtype=float)
        if J.shape != (len(pts), D + 1):
            raise DomainError(f"current provider returned shape {J.shape}, expected {(len(pts), D + 1)}")
        vals.append(tree_sum(J[:, 0] * w))
    return vals[0], abs(vals[0] - vals[1])


@dataclass
class DegeneracyReport:
    omega: OmegaValue
    gauge_norm: float
    probe_norm: float
    tol: float = DEGENERACY_TOL
    grid_value: float | None = None     # plain Riemann sum over the slice, for comparison

    @property
    def bound(self) -> float:
        return self.tol * self.gauge_norm * self.probe_norm

    @property
    def passes(self) -> bool:
        return abs(self.omega.value) <= self.bound


def slice_support(center, radius: float, sl: SliceSpec) -> float:
    """Radius of the generator's support on the slice (0 if it misses); must lie inside the box."""
    c = np.asarray(center, float)
    if c.shape != (sl.D + 1,) or not radius > 0:
        raise PreconditionError("generator must be a bump with spacetime center and positive radius")
    dt = abs(sl.time - c[0])
    if dt >= radius:
        return 0.0
    r = float(np.sqrt(radius ** 2 - dt ** 2))
    lo, hi = sl.origin, sl.origin + sl.L
    if np.any(c[1:] - r <= lo) or np.any(c[1:] + r >= hi):
        raise PreconditionError("generator support reaches the slice boundary")
    return r


def degeneracy_check(provider: CurrentProvider, sl: SliceSpec, generator, gauge_norm: float,
                     probe_norm: float, tol: float = DEGENERACY_TOL, order: int = 24,
                     grid: bool = False) -> DegeneracyReport:
    """omega(h_gauge, h_probe) for a gauge direction generated by a compact bump.

    The current is bilinear, so it vanishes outside the generator's support
    and omega is the integral over the support ball, done with
    :func:`ball_rule`.  ``grid`` also records the plain slice Riemann sum.
    """
    center = getattr(generator, "center", None)
    radius = getattr(generator, "radius", None)
    if center is None or radius is None:
        raise PreconditionError("gauge generator is not compactly supported")
    r = slice_support(center, radius, sl)
    if r == 0.0:
        value, err = 0.0, 0.0
    else:
        value, err = integrate_ball(provider, sl.time, np.asarray(center, float)[1:], r, sl.D, order)
    grid_value = integrate_slice(provider, sl, estimate_error=False).value if grid else None
    return DegeneracyReport(OmegaValue(value, sl, err), gauge_norm, probe_norm, tol, grid_value)
