"""Pointwise jets of analytic and grid-sampled test fields.

A :class:`Jet2` holds values and exact partial derivatives at a batch of
points.  Arrays are laid out as ``(P, *components)`` for the value,
``(P, *components, n)`` for first derivatives and ``(P, *components, n, n)``
for second derivatives, with ``n = D + 1`` spacetime coordinates and the
derivative indices last.  An optional third-derivative block is carried for
gauge generators, whose jets feed a second-order operator after one
differentiation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import Alg
from .errors import DomainError


@dataclass(frozen=True, eq=False)
class Jet2:
    point: np.ndarray
    value: np.ndarray
    first: np.ndarray
    second: np.ndarray
    third: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.point.shape[-1]

    @property
    def npoints(self) -> int:
        return self.point.shape[0]

    @property
    def comp_shape(self) -> tuple[int, ...]:
        return self.value.shape[1:]

    def __add__(self, other: Jet2) -> Jet2:
        return _combine(self, other, 1.0, 1.0)

    def __sub__(self, other: Jet2) -> Jet2:
        return _combine(self, other, 1.0, -1.0)

    def scale(self, a: float) -> Jet2:
        return Jet2(self.point, a * self.value, a * self.first, a * self.second,
                    None if self.third is None else a * self.third)

    def __rmul__(self, a: float) -> Jet2:
        return self.scale(a)

    def truncate(self) -> Jet2:
        return Jet2(self.point, self.value, self.first, self.second)

    def symmetry_defect(self) -> float:
        return float(np.max(np.abs(self.second - np.swapaxes(self.second, -1, -2)), initial=0.0))

    # lifts into the algebra
    def taylor_value(self) -> Alg:
        return Alg.taylor(self.value, self.first)

    def taylor_first(self) -> Alg:
        return Alg.taylor(self.first, self.second)

    def taylor_second(self) -> Alg:
        if self.third is None:
            raise DomainError("third derivatives not available")
        return Alg.taylor(self.second, self.third)


def _combine(a: Jet2, b: Jet2, ca: float, cb: float) -> Jet2:
    third = None
    if a.third is not None and b.third is not None:
        third = ca * a.third + cb * b.third
    return Jet2(a.point, ca * a.value + cb * b.value, ca * a.first + cb * b.first,
                ca * a.second + cb * b.second, third)


def zero_jet(points: np.ndarray, comp_shape: tuple[int, ...], third: bool = False) -> Jet2:
    points = np.atleast_2d(np.asarray(points, float))
    p, n = points.shape
    z = np.zeros((p,) + comp_shape)
    return Jet2(points, z, np.zeros(z.shape + (n,)), np.zeros(z.shape + (n, n)),
                np.zeros(z.shape + (n, n, n)) if third else None)


class TestField:
    """Base class: subclasses return derivative blocks up to a requested order."""

    __test__ = False  # not a pytest class
    kind: str = "abstract"
    comp_shape: tuple[int, ...] = ()
    n: int = 0

    def derivatives(self, points: np.ndarray, order: int) -> list[np.ndarray]:
        raise NotImplementedError

    def to_config(self) -> dict:
        raise NotImplementedError

    def __add__(self, other: TestField) -> SumField:
        return SumField((self, other))


def jet_of(field: TestField, points, order: int = 2) -> Jet2:
    """Jet of ``field`` at one point or a batch of points (order 2 or 3)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[-1] != field.n:
        raise DomainError(f"point has {pts.shape[-1]} coordinates, field expects {field.n}")
    blocks = field.derivatives(pts, order)
    return Jet2(pts, blocks[0], blocks[1], blocks[2], blocks[3] if order >= 3 else None)


# polynomial ------------------------------------------------------------

def monomials(n: int, degree: int) -> np.ndarray:
    exps = [e for e in itertools.product(range(degree + 1), repeat=n) if sum(e) <= degree]
    exps.sort(key=lambda e: (sum(e), tuple(-x for x in e)))
    return np.array(exps, dtype=int).reshape(-1, n)


@dataclass(frozen=True, eq=False)
class PolynomialField(TestField):
    """sum_m coef[m] * prod_i x_i**exps[m, i]; total degree at most 4."""

    exps: np.ndarray
    coef: np.ndarray
    kind: str = field(default="polynomial", init=False)

    def __post_init__(self):
        if self.exps.ndim != 2 or self.exps.shape[0] != self.coef.shape[0]:
            raise ValueError("exponent/coefficient mismatch")
        if self.exps.size and self.exps.sum(axis=1).max() > 4:
            raise ValueError("polynomial degree above 4")

    @property
    def n(self) -> int:
        return self.exps.shape[1]

    @property
    def comp_shape(self) -> tuple[int, ...]:
        return self.coef.shape[1:]

    def _basis(self, pts: np.ndarray, alpha: Sequence[int]) -> np.ndarray:
        # d^alpha of every monomial, shape (P, M)
        e = self.exps - np.asarray(alpha)
        fac = np.ones(len(self.exps))
        for i, a in enumerate(alpha):
            for k in range(a):
                fac = fac * (self.exps[:, i] - k)
        ok = np.all(e >= 0, axis=1) & (fac != 0)
        e = np.where(ok[:, None], e, 0)
        vals = np.prod(pts[:, None, :] ** e[None, :, :], axis=-1)
        return vals * (fac * ok)[None, :]

    def derivatives(self, points: np.ndarray, order: int) -> list[np.ndarray]:
        n = self.n
        out = []
        for k in range(order + 1):
            shape = (points.shape[0],) + self.comp_shape + (n,) * k
            block = np.zeros(shape)
            for idx in itertools.product(range(n), repeat=k):
                if list(idx) != sorted(idx):
                    continue
                alpha = np.bincount(np.array(idx, dtype=int), minlength=n) if k else np.zeros(n, int)
                vals = np.tensordot(self._basis(points, alpha), self.coef, axes=(1, 0))
                for perm in set(itertools.permutations(idx)):
                    block[(Ellipsis,) + perm] = vals
            out.append(block)
        return out

    def to_config(self) -> dict:
        return {"kind": self.kind, "exps": self.exps.tolist(), "coef": self.coef.tolist()}


def random_polynomial(rng: np.random.Generator, n: int, comp_shape: tuple[int, ...] = (),
                      degree: int = 3, scale: float = 1.0, normalize: bool = False,
                      symmetric: bool = False) -> PolynomialField:
    """Coefficients uniform in [-1, 1].

    ``normalize`` divides by the number of monomials so that |value| <= scale
    on the unit cube; ``symmetric`` symmetrizes the last two component axes.
    """
    exps = monomials(n, degree)
    coef = rng.uniform(-1.0, 1.0, size=(len(exps),) + comp_shape)
    if symmetric:
        coef = 0.5 * (coef + np.swapaxes(coef, -1, -2))
    if normalize:
        coef = coef / len(exps)
    return PolynomialField(exps, scale * coef)


def constant_field(value, n: int) -> PolynomialField:
    value = np.asarray(value, dtype=float)
    return PolynomialField(np.zeros((1, n), dtype=int), value[None])


# plane wave --------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PlaneWaveField(TestField):
    """amplitude * cos(k.x + phase), with k.x = k_mu x^mu summed plainly."""

    amplitude: np.ndarray
    k: np.ndarray
    phase: float = 0.0
    kind: str = field(default="plane-wave", init=False)

    @property
    def n(self) -> int:
        return len(self.k)

    @property
    def comp_shape(self) -> tuple[int, ...]:
        return np.shape(self.amplitude)

    def derivatives(self, points: np.ndarray, order: int) -> list[np.ndarray]:
        k = np.asarray(self.k, float)
        amp = np.asarray(self.amplitude, float)
        arg = points @ k + self.phase
        trig = [np.cos(arg), -np.sin(arg), -np.cos(arg), np.sin(arg)]
        out = []
        kk = np.ones(())
        for m in range(order + 1):
            block = trig[m].reshape((-1,) + (1,) * (amp.ndim + m)) * np.multiply.outer(amp, kk)[None]
            out.append(block)
            kk = np.multiply.outer(kk, k)
        return out

    def to_config(self) -> dict:
        return {"kind": self.kind, "amplitude": np.asarray(self.amplitude).tolist(),
                "k": np.asarray(self.k).tolist(), "phase": self.phase}


# bump ------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class BumpField(TestField):
    """amplitude * (1 - r^2)^4 for r = |x - center| / radius < 1, zero outside."""

    center: np.ndarray
    radius: float
    amplitude: np.ndarray
    kind: str = field(default="bump", init=False)

    @property
    def n(self) -> int:
        return len(self.center)

    @property
    def comp_shape(self) -> tuple[int, ...]:
        return np.shape(self.amplitude)

    def derivatives(self, points: np.ndarray, order: int) -> list[np.ndarray]:
        n = self.n
        amp = np.asarray(self.amplitude, float)
        d = (points - np.asarray(self.center, float)) / self.radius
        u = 1.0 - np.sum(d * d, axis=-1)
        inside = u > 0
        u = np.where(inside, u, 0.0)
        ui = -2.0 * d / self.radius                       # (P, n)
        uij = -2.0 * np.eye(n) / self.radius**2           # constant
        scal = [u**4]
        if order >= 1:
            scal.append(4 * u[:, None] ** 3 * ui)
        if order >= 2:
            scal.append(12 * u[:, None, None] ** 2 * ui[:, :, None] * ui[:, None, :]
                        + 4 * u[:, None, None] ** 3 * uij[None])
        if order >= 3:
            t = 24 * u[:, None, None, None] * np.einsum("pi,pj,pk->pijk", ui, ui, ui)
            t = t + 12 * u[:, None, None, None] ** 2 * (
                np.einsum("ij,pk->pijk", uij, ui) + np.einsum("ik,pj->pijk", uij, ui)
                + np.einsum("jk,pi->pijk", uij, ui))
            scal.append(t)
        out = []
        for m, s in enumerate(scal):
            s = s * inside.reshape((-1,) + (1,) * m)
            # (P, *comp, n^m)
            block = np.einsum("p...,c->pc...", s, amp.reshape(-1)).reshape(
                (points.shape[0],) + amp.shape + (n,) * m)
            out.append(block)
        return out

    def to_config(self) -> dict:
        return {"kind": self.kind, "center": np.asarray(self.center).tolist(), "radius": self.radius,
                "amplitude": np.asarray(self.amplitude).tolist()}


# sums ------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SumField(TestField):
    parts: tuple[TestField, ...]
    kind: str = field(default="sum", init=False)

    @property
    def n(self) -> int:
        return self.parts[0].n

    @property
    def comp_shape(self) -> tuple[int, ...]:
        return self.parts[0].comp_shape

    def derivatives(self, points: np.ndarray, order: int) -> list[np.ndarray]:
        acc = None
        for p in self.parts:
            blocks = p.derivatives(points, order)
            acc = blocks if acc is None else [a + b for a, b in zip(acc, blocks)]
        return acc

    def to_config(self) -> dict:
        return {"kind": self.kind, "parts": [p.to_config() for p in self.parts]}


# grid-sampled ------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GridField(TestField):
    """Values on a periodic grid; derivatives by second-order central differences.

    ``values`` has shape ``(N_0, ..., N_{n-1}, *components)`` and node ``m``
    sits at ``origin + m * spacing``.
    """

    values: np.ndarray
    spacing: np.ndarray
    origin: np.ndarray
    kind: str = field(default="grid-sampled", init=False)
    truncation_order: int = field(default=2, init=False)

    @property
    def n(self) -> int:
        return len(self.spacing)

    @property
    def comp_shape(self) -> tuple[int, ...]:
        return self.values.shape[self.n:]

    def _indices(self, points: np.ndarray) -> np.ndarray:
        rel = (points - self.origin) / self.spacing
        idx = np.rint(rel)
        if np.max(np.abs(rel - idx), initial=0.0) > 1e-9:
            raise DomainError("point is not on the lattice and interpolation is not enabled")
        dims = np.array(self.values.shape[: self.n])
        return np.mod(idx.astype(int), dims)

    def _at(self, idx: np.ndarray, shift: np.ndarray) -> np.ndarray:
        dims = np.array(self.values.shape[: self.n])
        j = np.mod(idx + shift, dims)
        return self.values[tuple(j.T)]

    def derivatives(self, points: np.ndarray, order: int) -> list[np.ndarray]:
        if order > 2:
            raise DomainError("grid-sampled fields carry at most second derivatives")
        n, h = self.n, np.asarray(self.spacing, float)
        idx = self._indices(points)
        unit = np.eye(n, dtype=int)
        out = [self._at(idx, np.zeros(n, int))]
        if order >= 1:
            d1 = [(self._at(idx, unit[i]) - self._at(idx, -unit[i])) / (2 * h[i]) for i in range(n)]
            out.append(np.stack(d1, axis=-1))
        if order >= 2:
            p = points.shape[0]
            d2 = np.zeros((p,) + self.comp_shape + (n, n))
            for i in range(n):
                for j in range(n):
                    if i == j:
                        v = (self._at(idx, unit[i]) - 2 * out[0] + self._at(idx, -unit[i])) / h[i] ** 2
                    else:
                        v = (self._at(idx, unit[i] + unit[j]) - self._at(idx, unit[i] - unit[j])
                             - self._at(idx, unit[j] - unit[i]) + self._at(idx, -unit[i] - unit[j])) / (4 * h[i] * h[j])
                    d2[..., i, j] = v
            out.append(d2)
        return out

    def to_config(self) -> dict:
        return {"kind": self.kind, "shape": list(self.values.shape), "spacing": np.asarray(self.spacing).tolist(),
                "origin": np.asarray(self.origin).tolist()}


def sample_grid(field_: TestField, shape: Sequence[int], spacing: Sequence[float],
                origin: Sequence[float] | None = None) -> GridField:
    """Sample an analytic field on a periodic grid."""
    spacing = np.asarray(spacing, float)
    origin = np.zeros(len(spacing)) if origin is None else np.asarray(origin, float)
    axes = [origin[i] + spacing[i] * np.arange(s) for i, s in enumerate(shape)]
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(shape))
    vals = field_.derivatives(mesh, 0)[0]
    return GridField(vals.reshape(tuple(shape) + field_.comp_shape), spacing, origin)


def random_points(rng: np.random.Generator, count: int, n: int, half_width: float = 1.0) -> np.ndarray:
    return rng.uniform(-half_width, half_width, size=(count, n))
