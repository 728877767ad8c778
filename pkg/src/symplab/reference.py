"""Flat-space scalar operators used to exercise the adjoint machinery."""

from __future__ import annotations

import numpy as np

from .adjoint import AdjointTriple, BoundaryCurrent, LinearOperator, Lifted
from .algebra import Alg, ein
from .jets import Jet2


def minkowski(n: int) -> np.ndarray:
    """Signature (-, +, ..., +)."""
    eta = np.eye(n)
    eta[0, 0] = -1.0
    return eta


def _eta_of(x: Alg) -> np.ndarray:
    return minkowski(x.shape[-1])


def covector_pairing(bg, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.einsum("mn,pm,pn->p", minkowski(x.shape[-1]), x, y)


def _box(bg, a: Lifted) -> Alg:
    return ein("mn,mn->", _eta_of(a.d), a.dd)


def _box_current(bg, f: Lifted, g: Lifted) -> Alg:
    eta = _eta_of(f.d)
    return ein("mn,,n->m", eta, f.v, g.d) - ein("mn,n,->m", eta, f.d, g.v)


def _third_or_nan(j: Jet2) -> np.ndarray:
    # order-capped input: the top block of the output jet is unavailable
    if j.third is None:
        return np.full(j.second.shape + (j.n,), np.nan)
    return j.third


def _grad_jet(bg, j: Jet2) -> Jet2:
    return Jet2(j.point, j.first, j.second, _third_or_nan(j))


def _div_jet(bg, j: Jet2) -> Jet2:
    eta = minkowski(j.n)
    return Jet2(j.point, np.einsum("mn,pmn->p", eta, j.first), np.einsum("mn,pmna->pa", eta, j.second),
                np.einsum("mn,pmnab->pab", eta, _third_or_nan(j)))


def _neg(jet_fn):
    return lambda bg, j: jet_fn(bg, j).scale(-1.0)


def box_triple(n: int) -> AdjointTriple:
    """Flat d'Alembertian with J = f d^mu g - (d^mu f) g."""
    op = LinearOperator("box", 2, _box)
    return AdjointTriple(op, op, BoundaryCurrent("box", _box_current))


def gradient_triple(n: int) -> AdjointTriple:
    """grad: scalar -> covector; adjoint -div; J^nu = u^nu g."""
    op = LinearOperator("grad", 1, lambda bg, a: a.d, (), (n,), covector_pairing, _grad_jet)
    adj = LinearOperator("-div", 1, lambda bg, a: -ein("mn,mn->", _eta_of(a.d), a.d), (n,), (),
                         covector_pairing, _neg(_div_jet))
    cur = BoundaryCurrent("grad", lambda bg, u, g: ein("mn,m,->n", _eta_of(u.v), u.v, g.v))
    return AdjointTriple(op, adj, cur)


def divergence_triple(n: int) -> AdjointTriple:
    """div: covector -> scalar; adjoint -grad; J^nu = f v^nu."""
    op = LinearOperator("div", 1, lambda bg, a: ein("mn,mn->", _eta_of(a.d), a.d), (n,), (), _plain, _div_jet)
    adj = LinearOperator("-grad", 1, lambda bg, a: -a.d, (), (n,), _plain, _neg(_grad_jet))
    cur = BoundaryCurrent("div", lambda bg, f, v: ein("mn,,m->n", _eta_of(v.v), f.v, v.v))
    return AdjointTriple(op, adj, cur)


def _plain(bg, x, y):
    return x * y if x.ndim == 1 else np.einsum("mn,pm,pn->p", minkowski(x.shape[-1]), x, y)


def _zeros_like(f: Lifted, n: int) -> Alg:
    z = np.zeros(f.v.body.shape[:1] + (n,))
    return Alg(np.zeros((f.v.ng * f.v.nt,) + z.shape), f.v.ng, f.v.nt)


def identity_triple(n: int) -> AdjointTriple:
    op = LinearOperator("id", 0, lambda bg, a: a.v, (), (), _plain, lambda bg, j: j)
    return AdjointTriple(op, op, BoundaryCurrent("id", lambda bg, f, g: _zeros_like(f, n)))


def multiplication_triple(n: int) -> AdjointTriple:
    """Multiplication by the background scalar phi; self-adjoint with zero current."""

    def fn(bg, a: Lifted) -> Alg:
        return bg.v * a.v

    op = LinearOperator("mul", 0, fn)
    return AdjointTriple(op, op, BoundaryCurrent("mul", lambda bg, f, g: _zeros_like(f, n)))
