"""Operators, adjoints and boundary currents.

For an operator P with adjoint P+ and current J the identity checked here is

    <f, P g> - <P+ f, g> = div J(f, g)

pointwise, where <.,.> is the operator's trace pairing.  Currents are written
once as algebra expressions; evaluating them on Taylor-lifted jets yields the
exact divergence, and a central-difference divergence is kept as an
independent cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .algebra import Alg, ein
from .errors import ContractError, DomainError, UnsupportedOrderError
from .jets import Jet2, TestField, jet_of


@dataclass(frozen=True)
class Lifted:
    """Value and derivative blocks of one field as algebra elements."""

    v: Alg
    d: Alg
    dd: Alg | None = None

    @property
    def taylor(self) -> bool:
        return self.v.nt > 1


def lift(jet: Jet2 | None, taylor: bool = False) -> Lifted | None:
    if jet is None:
        return None
    if taylor:
        dd = jet.taylor_second() if jet.third is not None else None
        return Lifted(jet.taylor_value(), jet.taylor_first(), dd)
    return Lifted(Alg.const(jet.value), Alg.const(jet.first), Alg.const(jet.second))


def lift_background(bg: Any, taylor: bool = False) -> Any:
    if bg is None:
        return None
    if isinstance(bg, Jet2):
        return lift(bg, taylor)
    return tuple(lift(b, taylor) for b in bg)


def jets_of_background(bg_field: Any, points: np.ndarray, order: int = 2) -> Any:
    if bg_field is None:
        return None
    if isinstance(bg_field, TestField):
        return jet_of(bg_field, points, order)
    return tuple(jet_of(b, points, order) for b in bg_field)


def plain_pairing(bg: Any, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    axes = tuple(range(1, x.ndim))
    return np.sum(x * y, axis=axes) if axes else x * y


@dataclass(frozen=True)
class LinearOperator:
    """A linear differential operator of order <= 2.

    ``fn(bg, arg)`` maps lifted background and argument data to the output
    value; ``jet_fn`` (optional) returns the output as a :class:`Jet2`, which
    is what composition needs.
    """

    name: str
    order: int
    fn: Callable[[Any, Lifted], Alg]
    in_shape: tuple[int, ...] = ()
    out_shape: tuple[int, ...] = ()
    pairing: Callable[[Any, np.ndarray, np.ndarray], np.ndarray] = plain_pairing
    jet_fn: Callable[[Any, Jet2], Jet2] | None = None

    def apply(self, bg: Any, arg: Jet2) -> np.ndarray:
        if arg.comp_shape != self.in_shape:
            raise ContractError(f"{self.name}: argument shape {arg.comp_shape} != {self.in_shape}")
        return self.fn(lift_background(bg), lift(arg)).body

    def jet(self, bg: Any, arg: Jet2) -> Jet2:
        if self.jet_fn is None:
            raise UnsupportedOrderError(f"{self.name} has no jet evaluation")
        return self.jet_fn(bg, arg)


@dataclass(frozen=True)
class BoundaryCurrent:
    """J(f, g) as an algebra expression; divergence by exact differentiation.

    ``weight`` (optional) returns a density w so that the divergence is the
    covariant one, (1/w) d_mu (w J^mu).
    """

    name: str
    fn: Callable[[Any, Lifted, Lifted], Alg]
    weight: Callable[[Any], Alg] | None = None

    def eval(self, bg: Any, f: Jet2, g: Jet2) -> np.ndarray:
        return self.fn(lift_background(bg), lift(f), lift(g)).body

    def div(self, bg: Any, f: Jet2, g: Jet2) -> np.ndarray:
        return self.div_terms(bg, f, g).sum(axis=-1)

    def div_terms(self, bg: Any, f: Jet2, g: Jet2) -> np.ndarray:
        """Per-direction pieces d_mu (w J^mu) / w, shape (P, n)."""
        bgt = lift_background(bg, taylor=True)
        j = self.fn(bgt, lift(f, True), lift(g, True))
        if self.weight is not None:
            w = self.weight(bgt)
            return ein("mm->m", ein("m,->m", j, w).grad()).body / w.body[..., None]
        return ein("mm->m", j.grad()).body


@dataclass
class IdentityResidualReport:
    samples: int
    max_abs: float
    max_rel: float
    points: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))

    def passes(self, tol: float) -> bool:
        return self.max_rel <= tol

    def merge(self, other: IdentityResidualReport) -> IdentityResidualReport:
        pts = other.points if other.max_rel > self.max_rel else self.points
        return IdentityResidualReport(self.samples + other.samples, max(self.max_abs, other.max_abs),
                                      max(self.max_rel, other.max_rel), pts)

    def as_dict(self) -> dict:
        return {"samples": self.samples, "max_abs": self.max_abs, "max_rel": self.max_rel}


def summarize(residual: np.ndarray, terms: Sequence[np.ndarray], points: np.ndarray,
              worst: int = 3) -> IdentityResidualReport:
    """Aggregate residuals; relative values divide by max(1, largest |term|)."""
    residual = np.asarray(residual, float).reshape(len(points), -1)
    mags = np.max(np.stack([np.abs(np.asarray(t, float)).reshape(len(points), -1) for t in terms]), axis=0)
    absr = np.abs(residual)
    rel = absr / np.maximum(1.0, mags)
    per_point = rel.max(axis=1)
    order = np.argsort(-per_point, kind="stable")[:worst]
    return IdentityResidualReport(len(points), float(absr.max(initial=0.0)), float(per_point.max(initial=0.0)),
                                  np.asarray(points)[order])


def _jets(x: TestField | Jet2, points: np.ndarray, order: int = 2) -> Jet2:
    return x if isinstance(x, Jet2) else jet_of(x, points, order)


def identity_terms(P: LinearOperator, Pdag: LinearOperator, J: BoundaryCurrent, bg: Any,
                   f: Jet2, g: Jet2) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(<f, P g>, <P+ f, g>, div J) at every point."""
    if f.comp_shape != Pdag.in_shape or g.comp_shape != P.in_shape:
        raise ContractError("field rank does not match the operator pair")
    a = P.pairing(bg, f.value, P.apply(bg, g))
    b = P.pairing(bg, Pdag.apply(bg, f), g.value)
    return a, b, J.div(bg, f, g)


def adjoint_identity_residual(P: LinearOperator, Pdag: LinearOperator, J: BoundaryCurrent,
                              f: TestField | Jet2, g: TestField | Jet2, points: np.ndarray,
                              background: Any = None) -> IdentityResidualReport:
    """Residual of <f, P g> - <P+ f, g> - div J at each point."""
    points = np.atleast_2d(np.asarray(points, float))
    bg = jets_of_background(background, points) if not _is_jets(background) else background
    fj, gj = _jets(f, points), _jets(g, points)
    a, b, d = identity_terms(P, Pdag, J, bg, fj, gj)
    return summarize(a - b - d, [a, b, d], points)


def _is_jets(bg: Any) -> bool:
    return isinstance(bg, Jet2) or (isinstance(bg, tuple) and all(isinstance(b, Jet2) for b in bg))


def self_adjointness_check(P: LinearOperator, J: BoundaryCurrent, f: TestField | Jet2,
                           g: TestField | Jet2, points: np.ndarray, background: Any = None) -> IdentityResidualReport:
    return adjoint_identity_residual(P, P, J, f, g, points, background)


def fd_divergence(J: BoundaryCurrent, background: Any, f: TestField, g: TestField,
                  points: np.ndarray, step: float) -> np.ndarray:
    """Central-difference divergence of J.eval, an oracle independent of the Taylor path."""
    if J.weight is not None:
        raise DomainError("finite-difference oracle covers flat divergences only")
    points = np.atleast_2d(np.asarray(points, float))
    n = points.shape[1]
    total = np.zeros(len(points))
    for mu in range(n):
        e = np.zeros(n)
        e[mu] = step
        vals = []
        for pts in (points + e, points - e):
            vals.append(J.eval(jets_of_background(background, pts), jet_of(f, pts), jet_of(g, pts))[:, mu])
        total += (vals[0] - vals[1]) / (2 * step)
    return total


def fd_order(J: BoundaryCurrent, background: Any, f: TestField, g: TestField, points: np.ndarray,
             steps: Sequence[float] = (0.02, 0.01, 0.005)) -> tuple[float, list[float]]:
    """Convergence order of the finite-difference divergence towards the exact one."""
    exact = J.div(jets_of_background(background, points), jet_of(f, points), jet_of(g, points))
    errs = [float(np.max(np.abs(fd_divergence(J, background, f, g, points, s) - exact))) for s in steps]
    slope = np.polyfit(np.log(steps), np.log(errs), 1)[0]
    return float(slope), errs


# composition -------------------------------------------------------------

@dataclass(frozen=True)
class AdjointTriple:
    op: LinearOperator
    adj: LinearOperator
    current: BoundaryCurrent


def composition_current(Q: AdjointTriple, R: AdjointTriple) -> AdjointTriple:
    """(QR, R+Q+, J) with J(f, g) = J_Q(f, R g) + J_R(Q+ f, g)."""
    if Q.op.order + R.op.order > 2:
        raise UnsupportedOrderError(f"composed order {Q.op.order + R.op.order} exceeds 2")
    if Q.op.in_shape != R.op.out_shape:
        raise ContractError("operators are not composable")

    def qr_jet(bg, arg: Jet2) -> Jet2:
        return Q.op.jet(bg, R.op.jet(bg, arg))

    def rq_jet(bg, arg: Jet2) -> Jet2:
        return R.adj.jet(bg, Q.adj.jet(bg, arg))

    order = Q.op.order + R.op.order
    op = JetOperator(f"{Q.op.name}*{R.op.name}", order, _no_fn, R.op.in_shape, Q.op.out_shape,
                     Q.op.pairing, qr_jet)
    adj = JetOperator(f"{R.adj.name}*{Q.adj.name}", order, _no_fn, Q.adj.in_shape, R.adj.out_shape,
                      Q.op.pairing, rq_jet)
    return AdjointTriple(op, adj, ComposedCurrent(f"J[{Q.op.name}*{R.op.name}]", _no_current, None, Q, R))


def _no_fn(bg, arg):
    raise UnsupportedOrderError("composite operators are evaluated through jets")


def _no_current(bg, f, g):
    raise UnsupportedOrderError("composite currents are evaluated through jets")


@dataclass(frozen=True)
class JetOperator(LinearOperator):
    """Operator whose value is read off its own jet evaluation."""

    def apply(self, bg: Any, arg: Jet2) -> np.ndarray:
        if arg.comp_shape != self.in_shape:
            raise ContractError(f"{self.name}: argument shape {arg.comp_shape} != {self.in_shape}")
        return self.jet(bg, arg).value


@dataclass(frozen=True)
class ComposedCurrent(BoundaryCurrent):
    q: AdjointTriple | None = None
    r: AdjointTriple | None = None

    def eval(self, bg: Any, f: Jet2, g: Jet2) -> np.ndarray:
        q, r = self.q, self.r
        return q.current.eval(bg, f, r.op.jet(bg, g)) + r.current.eval(bg, q.adj.jet(bg, f), g)

    def div_terms(self, bg: Any, f: Jet2, g: Jet2) -> np.ndarray:
        q, r = self.q, self.r
        return q.current.div_terms(bg, f, r.op.jet(bg, g)) + r.current.div_terms(bg, q.adj.jet(bg, f), g)


def sum_triple(Q: AdjointTriple, R: AdjointTriple) -> AdjointTriple:
    """(Q + R, Q+ + R+, J_Q + J_R)."""
    op = LinearOperator(f"{Q.op.name}+{R.op.name}", max(Q.op.order, R.op.order),
                        lambda bg, a: Q.op.fn(bg, a) + R.op.fn(bg, a), Q.op.in_shape, Q.op.out_shape, Q.op.pairing)
    adj = LinearOperator(f"{Q.adj.name}+{R.adj.name}", max(Q.op.order, R.op.order),
                         lambda bg, a: Q.adj.fn(bg, a) + R.adj.fn(bg, a), Q.adj.in_shape, Q.adj.out_shape,
                         Q.op.pairing)
    cur = BoundaryCurrent(f"{Q.current.name}+{R.current.name}",
                          lambda bg, f, g: Q.current.fn(bg, f, g) + R.current.fn(bg, f, g))
    return AdjointTriple(op, adj, cur)
