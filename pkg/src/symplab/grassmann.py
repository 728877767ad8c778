"""Scalars and matrices over the two-generator Grassmann algebra.

Generators e1, e2 satisfy e1*e1 = e2*e2 = 0 and e1*e2 = -e2*e1.  A variation
pair (h1, h2) enters as the odd element e1*h1 + e2*h2, and the coefficient of
e1e2 of a product reads off the antisymmetrized two-form.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .algebra import Alg
from .errors import DomainError, SingularMatrixError


@dataclass(frozen=True, eq=False)
class GrassmannScalar:
    b: float = 0.0
    e1: float = 0.0
    e2: float = 0.0
    e12: float = 0.0

    def __add__(self, other: GrassmannScalar | float) -> GrassmannScalar:
        o = _as_scalar(other)
        return GrassmannScalar(self.b + o.b, self.e1 + o.e1, self.e2 + o.e2, self.e12 + o.e12)

    __radd__ = __add__

    def __sub__(self, other: GrassmannScalar | float) -> GrassmannScalar:
        return self + (-_as_scalar(other))

    def __rsub__(self, other: GrassmannScalar | float) -> GrassmannScalar:
        return _as_scalar(other) - self

    def __neg__(self) -> GrassmannScalar:
        return GrassmannScalar(-self.b, -self.e1, -self.e2, -self.e12)

    def __mul__(self, other: GrassmannScalar | float) -> GrassmannScalar:
        return g_mul(self, _as_scalar(other))

    def __rmul__(self, other: float) -> GrassmannScalar:
        return g_mul(_as_scalar(other), self)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.b, self.e1, self.e2, self.e12)

    @property
    def nilpotent(self) -> GrassmannScalar:
        return GrassmannScalar(0.0, self.e1, self.e2, self.e12)


E1 = GrassmannScalar(e1=1.0)
E2 = GrassmannScalar(e2=1.0)
ONE = GrassmannScalar(b=1.0)


def _as_scalar(x: GrassmannScalar | float) -> GrassmannScalar:
    return x if isinstance(x, GrassmannScalar) else GrassmannScalar(b=float(x))


def g_mul(a: GrassmannScalar, b: GrassmannScalar) -> GrassmannScalar:
    return GrassmannScalar(
        a.b * b.b,
        a.b * b.e1 + a.e1 * b.b,
        a.b * b.e2 + a.e2 * b.b,
        a.b * b.e12 + a.e12 * b.b + a.e1 * b.e2 - a.e2 * b.e1,
    )


def g_lift(phi: Callable[[float], float], dphi: Callable[[float], float], a: GrassmannScalar) -> GrassmannScalar:
    """phi(a) = phi(body) + phi'(body) * nilpotent; exact since the nilpotent part squares to zero."""
    with np.errstate(all="raise"):
        try:
            v = float(phi(a.b))
            d = float(dphi(a.b))
        except (FloatingPointError, ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"function undefined at body {a.b}") from exc
    if not (np.isfinite(v) and np.isfinite(d)):
        raise DomainError(f"function undefined at body {a.b}")
    return GrassmannScalar(v, d * a.e1, d * a.e2, d * a.e12)


def two_form_part(a: GrassmannScalar) -> float:
    return a.e12


@dataclass(frozen=True, eq=False)
class GrassmannMatrix:
    """Square matrix stored as four real coefficient matrices."""

    b: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    e12: np.ndarray

    @classmethod
    def from_parts(cls, b, e1=None, e2=None, e12=None) -> GrassmannMatrix:
        b = np.array(b, dtype=float)
        z = np.zeros_like(b)
        return cls(b, z if e1 is None else np.array(e1, float), z if e2 is None else np.array(e2, float),
                   z if e12 is None else np.array(e12, float))

    @property
    def size(self) -> int:
        return self.b.shape[0]

    def entry(self, i: int, j: int) -> GrassmannScalar:
        return GrassmannScalar(self.b[i, j], self.e1[i, j], self.e2[i, j], self.e12[i, j])

    @property
    def nilpotent(self) -> GrassmannMatrix:
        return GrassmannMatrix(np.zeros_like(self.b), self.e1, self.e2, self.e12)

    def __matmul__(self, other: GrassmannMatrix) -> GrassmannMatrix:
        return GrassmannMatrix(
            self.b @ other.b,
            self.b @ other.e1 + self.e1 @ other.b,
            self.b @ other.e2 + self.e2 @ other.b,
            self.b @ other.e12 + self.e12 @ other.b + self.e1 @ other.e2 - self.e2 @ other.e1,
        )

    def __add__(self, other: GrassmannMatrix) -> GrassmannMatrix:
        return GrassmannMatrix(self.b + other.b, self.e1 + other.e1, self.e2 + other.e2, self.e12 + other.e12)

    def __sub__(self, other: GrassmannMatrix) -> GrassmannMatrix:
        return GrassmannMatrix(self.b - other.b, self.e1 - other.e1, self.e2 - other.e2, self.e12 - other.e12)

    def trace(self) -> GrassmannScalar:
        return GrassmannScalar(np.trace(self.b), np.trace(self.e1), np.trace(self.e2), np.trace(self.e12))


def _body_inverse(b: np.ndarray) -> np.ndarray:
    cond = np.linalg.cond(b)
    if not np.isfinite(cond) or cond > 1e14:
        raise SingularMatrixError("singular body matrix", cond)
    return np.linalg.inv(b)


def g_inverse(m: GrassmannMatrix) -> GrassmannMatrix:
    binv = GrassmannMatrix.from_parts(_body_inverse(m.b))
    n = m.nilpotent
    first = binv @ n @ binv
    return binv - first + first @ n @ binv


def g_det(m: GrassmannMatrix) -> GrassmannScalar:
    binv = GrassmannMatrix.from_parts(_body_inverse(m.b))
    x = binv @ m.nilpotent
    t = x.trace()
    t2 = (x @ x).trace()
    return float(np.linalg.det(m.b)) * (ONE + t + 0.5 * (t * t - t2))


def cofactor_det(m: GrassmannMatrix) -> GrassmannScalar:
    """Laplace expansion along the first row, products taken in row order."""
    n = m.size
    if n == 1:
        return m.entry(0, 0)
    total = GrassmannScalar()
    for j in range(n):
        keep = [c for c in range(n) if c != j]
        minor = GrassmannMatrix(*(p[1:][:, keep] for p in (m.b, m.e1, m.e2, m.e12)))
        term = m.entry(0, j) * cofactor_det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def lift_two_form(fn: Callable[[Alg], Alg], b: np.ndarray, h1: np.ndarray, h2: np.ndarray) -> np.ndarray:
    """e1e2 part of fn(b + e1 h1 + e2 h2) for a functional of the background alone.

    This is delta^2 fn, which vanishes: the symmetric second variation meets
    the antisymmetric product e1e2 + e2e1 = 0.
    """
    return fn(Alg.grassmann(b, h1, h2)).e12()
