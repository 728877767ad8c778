"""Array-valued elements of a small truncated nilpotent algebra.

An :class:`Alg` value is a numpy array of coefficients over the basis

    {1, e1, e2, e1e2}  x  {1, dx_0, ..., dx_{n-1}}

where e1, e2 are anticommuting generators (the two field-space variations)
and dx_lambda are commuting infinitesimals with dx_i dx_j = 0 (first-order
Taylor jets, used to differentiate composite expressions exactly).  Either
factor may be absent, in which case its basis collapses to {1}.

Layout of ``data``: ``(basis, *point_axes, *component_axes)``.  Component
axes are addressed by einsum letters; point axes are absorbed by ``...``.
Products are always formed in operand order, so odd factors keep their sign.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

# Grassmann index -> (e1 count, e2 count)
_G_PRODUCT = {
    (0, 0): (0, 1.0), (0, 1): (1, 1.0), (0, 2): (2, 1.0), (0, 3): (3, 1.0),
    (1, 0): (1, 1.0), (2, 0): (2, 1.0), (3, 0): (3, 1.0),
    (1, 2): (3, 1.0), (2, 1): (3, -1.0),
}


@lru_cache(maxsize=None)
def _table(ng1: int, nt1: int, ng2: int, nt2: int):
    if nt1 > 1 and nt2 > 1 and nt1 != nt2:
        raise ValueError("mismatched Taylor dimensions")
    ng, nt = max(ng1, ng2), max(nt1, nt2)
    rows = []
    for g1 in range(ng1):
        for g2 in range(ng2):
            hit = _G_PRODUCT.get((g1, g2))
            if hit is None:
                continue
            gk, sign = hit
            for t1 in range(nt1):
                for t2 in range(nt2):
                    if t1 and t2:
                        continue
                    tk = t1 or t2
                    rows.append((gk * nt + tk, g1 * nt1 + t1, g2 * nt2 + t2, sign))
    rows.sort()
    k = np.array([r[0] for r in rows])
    i = np.array([r[1] for r in rows])
    j = np.array([r[2] for r in rows])
    s = np.array([r[3] for r in rows])
    uk, starts = np.unique(k, return_index=True)
    return ng, nt, i, j, s, uk, starts


def _embed(data: np.ndarray, ng: int, nt: int, ng_new: int, nt_new: int) -> np.ndarray:
    if (ng, nt) == (ng_new, nt_new):
        return data
    out = np.zeros((ng_new * nt_new,) + data.shape[1:], dtype=data.dtype)
    for g in range(ng):
        for t in range(nt):
            out[g * nt_new + t] = data[g * nt + t]
    return out


class Alg:
    """Coefficient array over the Grassmann x Taylor basis."""

    __slots__ = ("data", "ng", "nt")
    __array_priority__ = 1000

    def __init__(self, data, ng: int = 1, nt: int = 1):
        data = np.asarray(data, dtype=float)
        if data.shape[0] != ng * nt:
            raise ValueError(f"leading axis {data.shape[0]} != {ng}*{nt}")
        self.data = data
        self.ng = ng
        self.nt = nt

    # construction ------------------------------------------------------
    @classmethod
    def const(cls, arr) -> Alg:
        arr = np.asarray(arr, dtype=float)
        return cls(arr[None], 1, 1)

    @classmethod
    def grassmann(cls, b, e1=None, e2=None, e12=None) -> Alg:
        b = np.asarray(b, dtype=float)
        parts = [b] + [np.zeros_like(b) if p is None else np.broadcast_to(np.asarray(p, float), b.shape)
                       for p in (e1, e2, e12)]
        return cls(np.stack(parts), 4, 1)

    @classmethod
    def taylor(cls, value, grad) -> Alg:
        """Value with gradient along a trailing axis of ``grad``."""
        value = np.asarray(value, dtype=float)
        grad = np.asarray(grad, dtype=float)
        n = grad.shape[-1]
        return cls(np.concatenate([value[None], np.moveaxis(grad, -1, 0)]), 1, n + 1)

    @staticmethod
    def lift(x) -> Alg:
        return x if isinstance(x, Alg) else Alg.const(x)

    # inspection ---------------------------------------------------------
    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape[1:]

    def part(self, g: int = 0, t: int = 0) -> np.ndarray:
        """Coefficient of one basis element (zero if not carried)."""
        if g >= self.ng or t >= self.nt:
            return np.zeros(self.shape)
        return self.data[g * self.nt + t]

    @property
    def body(self) -> np.ndarray:
        return self.data[0]

    def value(self) -> Alg:
        """Drop the Taylor infinitesimals."""
        return Alg(self.data[:: self.nt], self.ng, 1)

    def grad(self) -> Alg:
        """Exact first derivatives, appended as a trailing component axis."""
        if self.nt == 1:
            raise ValueError("no Taylor part to differentiate")
        blocks = []
        for g in range(self.ng):
            sl = self.data[g * self.nt + 1:(g + 1) * self.nt]
            blocks.append(np.moveaxis(sl, 0, -1))
        return Alg(np.stack(blocks), self.ng, 1)

    def e12(self) -> np.ndarray:
        return self.part(3, 0)

    # linear structure ---------------------------------------------------
    def _coerce(self, other) -> tuple[np.ndarray, np.ndarray, int, int]:
        o = Alg.lift(other)
        if o.nt > 1 and self.nt > 1 and o.nt != self.nt:
            raise ValueError("mismatched Taylor dimensions")
        ng, nt = max(self.ng, o.ng), max(self.nt, o.nt)
        a = _embed(self.data, self.ng, self.nt, ng, nt)
        b = _embed(o.data, o.ng, o.nt, ng, nt)
        return a, b, ng, nt

    def __add__(self, other) -> Alg:
        a, b, ng, nt = self._coerce(other)
        return Alg(a + b, ng, nt)

    __radd__ = __add__

    def __sub__(self, other) -> Alg:
        a, b, ng, nt = self._coerce(other)
        return Alg(a - b, ng, nt)

    def __rsub__(self, other) -> Alg:
        a, b, ng, nt = self._coerce(other)
        return Alg(b - a, ng, nt)

    def __neg__(self) -> Alg:
        return Alg(-self.data, self.ng, self.nt)

    def __mul__(self, other) -> Alg:
        if np.isscalar(other):
            return Alg(self.data * other, self.ng, self.nt)
        return product(self, other, np.multiply)

    def __rmul__(self, other) -> Alg:
        if np.isscalar(other):
            return Alg(self.data * other, self.ng, self.nt)
        return product(other, self, np.multiply)

    def __truediv__(self, other) -> Alg:
        if np.isscalar(other):
            return Alg(self.data / other, self.ng, self.nt)
        return self * reciprocal(other)

    def __getitem__(self, key) -> Alg:
        if not isinstance(key, tuple):
            key = (key,)
        return Alg(self.data[(slice(None),) + key], self.ng, self.nt)

    def map(self, fn: Callable[[np.ndarray], np.ndarray]) -> Alg:
        """Apply a linear map to every coefficient array."""
        return Alg(np.stack([fn(d) for d in self.data]), self.ng, self.nt)

    def __repr__(self) -> str:
        return f"Alg(ng={self.ng}, nt={self.nt}, shape={self.shape})"


def product(x, y, fn: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> Alg:
    """Bilinear ``fn`` lifted to the algebra, x on the left."""
    x, y = Alg.lift(x), Alg.lift(y)
    ng, nt, i, j, s, uk, starts = _table(x.ng, x.nt, y.ng, y.nt)
    terms = fn(x.data[i], y.data[j])
    terms = terms * s.reshape((-1,) + (1,) * (terms.ndim - 1))
    red = np.add.reduceat(terms, starts, axis=0) if len(i) > 1 else terms
    out = np.zeros((ng * nt,) + terms.shape[1:])
    out[uk] = red
    return Alg(out, ng, nt)


def _spec_parts(spec: str) -> tuple[list[str], str]:
    lhs, out = spec.replace(" ", "").split("->")
    return lhs.split(","), out


def ein(spec: str, *ops) -> Alg:
    """Order-preserving einsum over component axes; point axes broadcast.

    Operands are contracted pairwise from the left, so the Grassmann sign of
    each product follows the written operand order.
    """
    ins, out = _spec_parts(spec)
    if len(ins) != len(ops):
        raise ValueError("operand count does not match spec")
    if len(ops) == 1:
        x = Alg.lift(ops[0])
        sub = f"Z...{ins[0]}->Z...{out}"
        return Alg(np.einsum(sub, x.data), x.ng, x.nt)
    acc, acc_idx = Alg.lift(ops[0]), ins[0]
    for k in range(1, len(ops)):
        later = set("".join(ins[k + 1:]) + out)
        keep = "".join(dict.fromkeys(c for c in acc_idx + ins[k] if c in later))
        if k == len(ops) - 1:
            keep = out
        sub = f"Z...{acc_idx},Z...{ins[k]}->Z...{keep}"
        acc = product(acc, ops[k], lambda a, b, sub=sub: np.einsum(sub, a, b, optimize=True))
        acc_idx = keep
    return acc


# nonlinear lifts -------------------------------------------------------

def apply_series(x, derivs: Sequence[np.ndarray]) -> Alg:
    """f(x) from f and its derivatives at the body: exact, the algebra is nilpotent.

    The nilpotent part n satisfies n**4 = 0, so three derivatives suffice.
    """
    x = Alg.lift(x)
    body = x.body
    n = x - Alg.const(body)
    out = Alg.const(derivs[0])
    power = None
    fact = 1.0
    for k in range(1, min(len(derivs), 4)):
        power = n if power is None else power * n
        fact *= k
        out = out + power * Alg.const(derivs[k] / fact)
    return out


def sqrt(x) -> Alg:
    b = Alg.lift(x).body
    if np.any(b < 0):
        raise ValueError("square root of a negative body")
    r = np.sqrt(b)
    return apply_series(x, [r, 0.5 / r, -0.25 / r**3, 0.375 / r**5])


def log(x) -> Alg:
    b = Alg.lift(x).body
    if np.any(b <= 0):
        raise ValueError("logarithm of a non-positive body")
    return apply_series(x, [np.log(b), 1 / b, -1 / b**2, 2 / b**3])


def exp(x) -> Alg:
    e = np.exp(Alg.lift(x).body)
    return apply_series(x, [e, e, e, e])


def reciprocal(x) -> Alg:
    b = Alg.lift(x).body
    if np.any(b == 0):
        raise ZeroDivisionError("reciprocal of a zero body")
    return apply_series(x, [1 / b, -1 / b**2, 2 / b**3, -6 / b**4])


def _body_part(m: Alg) -> Alg:
    return Alg.const(m.body)


def inv(m) -> Alg:
    """Matrix inverse over the last two component axes (truncated Neumann series)."""
    m = Alg.lift(m)
    binv = np.linalg.inv(m.body)
    n = m - _body_part(m)
    b = Alg.const(binv)
    out = b
    term = b
    for _ in range(3):
        term = -ein("ij,jk,kl->il", term, n, b)
        out = out + term
    return out


def det(m) -> Alg:
    """Determinant over the last two axes: det(B) exp(tr log(1 + B^-1 N))."""
    m = Alg.lift(m)
    detb = np.linalg.det(m.body)
    x = ein("ij,jk->ik", np.linalg.inv(m.body), m - _body_part(m))
    x2 = ein("ij,jk->ik", x, x)
    x3 = ein("ij,jk->ik", x2, x)
    t = ein("ii->", x) - ein("ii->", x2) * 0.5 + ein("ii->", x3) * (1.0 / 3.0)
    return exp(t) * Alg.const(detb)
