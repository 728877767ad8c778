"""Named verification scenarios: (theory, check) -> list of check records.

Each scenario draws its data from ``sampling.seed`` and reports one record per
verified relation, each with an explicit tolerance.  Lattice scenarios that
measure convergence run at N and 2N unless ``single_level`` is requested
(sweeps supply their own levels).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import algebra as al
from . import gravity as gr
from . import lattice as lat
from . import phase_space as ps
from . import yang_mills as ym
from .adjoint import (BoundaryCurrent, IdentityResidualReport, adjoint_identity_residual, composition_current,
                      fd_order, self_adjointness_check, sum_triple, summarize)
from .algebra import Alg
from .config import ScenarioConfig
from .conventions import C_GR, C_YM
from .errors import ConfigError, InstabilityError, PreconditionError
from .grassmann import lift_two_form
from .jets import BumpField, PolynomialField, constant_field, jet_of, random_points, random_polynomial
from .reference import box_triple, divergence_triple, gradient_triple, identity_triple, minkowski, multiplication_triple
from .report import CheckRecord

SATURATION_FLOOR = 1e-11
MIN_ORDER = 1.8

DEFAULT_TOLERANCES = {
    "box": 1e-10, "composition": 1e-10, "sum-law": 1e-10, "multiplication": 0.0, "box-self-adjoint": 1e-10,
    "box-on-shell": 1e-11, "fd-order": MIN_ORDER,
    "ym-adjoint": 1e-10, "ym-self-adjoint": 1e-10, "operator-forms": 1e-12, "trace-identity": 1e-12,
    "field-equation-oracle": 1e-12,
    "plane-wave-pair": 1e-11, "background-annihilation": 1e-12,
    "exactness": 1e-10, "crnkovic-witten": 1e-12, "closedness": 1e-12,
    "slice-omega": 1e-10, "degeneracy": 1e-9, "zero-form": 1e-12,
    "lattice-divergence": 0.15, "gauss-growth": lat.GAUSS_GROWTH_LIMIT, "lattice-omega": MIN_ORDER,
    "einstein-adjoint": 1e-9, "einstein-self-adjoint": 1e-9, "einstein-background": 1e-12,
    "einstein-forms": 1e-11, "tt-pair": 1e-11, "potential-on-shell": 1e-11, "trivial-pair": 1e-13,
    "current-forms": 1e-11, "potential-forms": 1e-11, "t-trace": 1e-12, "t-density": 1e-12,
    "t-divergence": 1e-11, "exactness-flat": 1e-10, "exactness-perturbed": 1e-10,
}


@dataclass
class Context:
    cfg: ScenarioConfig
    single_level: bool = False

    @property
    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.cfg.seed)

    def tol(self, name: str) -> float:
        return self.cfg.tolerances.get(name, DEFAULT_TOLERANCES[name])


def _identity_record(name: str, rep: IdentityResidualReport, tol: float, **details) -> CheckRecord:
    worst = rep.points[0].tolist() if len(rep.points) else []
    return CheckRecord(name, "max_rel", rep.max_rel, tol, rep.passes(tol), samples=rep.samples,
                       details={"max_abs": rep.max_abs, "worst_point": worst, **details})


def _residual_record(name: str, residual, terms, points, tol: float, **details) -> CheckRecord:
    return _identity_record(name, summarize(residual, terms, points), tol, **details)


def _points(ctx: Context, rng: np.random.Generator, half_width: float = 1.0) -> np.ndarray:
    return random_points(rng, ctx.cfg.points, ctx.cfg.n, half_width)


# reference operator ------------------------------------------------------------------

def _integer_polynomial(rng: np.random.Generator, n: int, degree: int = 2) -> PolynomialField:
    from .jets import monomials

    exps = monomials(n, degree)
    return PolynomialField(exps, rng.integers(-3, 4, size=len(exps)).astype(float))


def reference_adjoint(ctx: Context) -> list[CheckRecord]:
    rng, n = ctx.rng, ctx.cfg.n
    pts = _points(ctx, rng)
    f, g = random_polynomial(rng, n), random_polynomial(rng, n)
    box = box_triple(n)
    recs = [_identity_record("box", adjoint_identity_residual(box.op, box.adj, box.current, f, g, pts), ctx.tol("box"))]
    comp = composition_current(divergence_triple(n), gradient_triple(n))
    recs.append(_identity_record("composition", adjoint_identity_residual(comp.op, comp.adj, comp.current, f, g, pts),
                                 ctx.tol("composition"), operator=comp.op.name))
    both = sum_triple(box, identity_triple(n))
    recs.append(_identity_record("sum-law", adjoint_identity_residual(both.op, both.adj, both.current, f, g, pts),
                                 ctx.tol("sum-law"), operator=both.op.name))
    # integer data keeps every product exact, so the F+ = F pairing must vanish identically
    phi, a, b = (_integer_polynomial(rng, n) for _ in range(3))
    ipts = rng.integers(-3, 4, size=(ctx.cfg.points, n)).astype(float)
    mul = multiplication_triple(n)
    rep = adjoint_identity_residual(mul.op, mul.adj, mul.current, a, b, ipts, background=phi)
    recs.append(CheckRecord("multiplication", "max_abs", rep.max_abs, ctx.tol("multiplication"),
                            rep.max_abs <= ctx.tol("multiplication"), samples=rep.samples))
    return recs


def reference_self_adjoint(ctx: Context) -> list[CheckRecord]:
    rng, n = ctx.rng, ctx.cfg.n
    pts = _points(ctx, rng)
    box = box_triple(n)
    rep = self_adjointness_check(box.op, box.current, random_polynomial(rng, n), random_polynomial(rng, n), pts)
    return [_identity_record("box-self-adjoint", rep, ctx.tol("box-self-adjoint"))]


def _null_scalar_wave(rng: np.random.Generator, n: int):
    from .jets import PlaneWaveField

    d = n - 1
    ks = rng.normal(size=d)
    ks *= rng.uniform(0.5, 2.0) / np.linalg.norm(ks)
    return PlaneWaveField(np.array(rng.uniform(0.5, 1.5)), np.concatenate([[-np.linalg.norm(ks)], ks]),
                          rng.uniform(0, 2 * np.pi))


def reference_conservation(ctx: Context) -> list[CheckRecord]:
    rng, n = ctx.rng, ctx.cfg.n
    pts = _points(ctx, rng, 2.0)
    f, g = _null_scalar_wave(rng, n), _null_scalar_wave(rng, n)
    box = box_triple(n)
    fj, gj = jet_of(f, pts), jet_of(g, pts)
    terms = box.current.div_terms(None, fj, gj)
    return [_residual_record("box-on-shell", terms.sum(axis=-1), [terms], pts, ctx.tol("box-on-shell"))]


def _order_record(name: str, J: BoundaryCurrent, bg, f, g, pts, tol: float) -> CheckRecord:
    order, errs = fd_order(J, bg, f, g, pts)
    if max(errs) <= SATURATION_FLOOR:
        return CheckRecord(name, "order", float("nan"), tol, True, "saturated", len(pts), {"errors": errs})
    return CheckRecord(name, "order", order, tol, order >= tol, order, len(pts), {"errors": errs})


def reference_convergence(ctx: Context) -> list[CheckRecord]:
    rng, n = ctx.rng, ctx.cfg.n
    pts = random_points(rng, min(ctx.cfg.points, 50), n)
    box = box_triple(n)
    return [_order_record("fd-order", box.current, None, random_polynomial(rng, n), random_polynomial(rng, n), pts,
                          ctx.tol("fd-order"))]


# Yang-Mills, analytic -------------------------------------------------------------------

def _grp(ctx: Context) -> ym.GaugeGroupSpec:
    return ym.group("u1" if ctx.cfg.theory == "maxwell" else "su2")


def _ym_data(ctx: Context, grp: ym.GaugeGroupSpec, rng: np.random.Generator):
    n = ctx.cfg.n
    return [random_polynomial(rng, n, (n, grp.dim)) for _ in range(3)]


def ym_adjoint(ctx: Context) -> list[CheckRecord]:
    rng, n, grp = ctx.rng, ctx.cfg.n, _grp(ctx)
    A, f, g = _ym_data(ctx, grp, rng)
    pts = _points(ctx, rng)
    t = ym.ym_triple(grp, n)
    recs = [_identity_record("ym-adjoint", adjoint_identity_residual(t.op, t.adj, t.current, f, g, pts, background=A),
                             ctx.tol("ym-adjoint"), group=grp.name)]
    sub = pts[: min(len(pts), 200)]
    Aj, gj = jet_of(A, sub), jet_of(g, sub)
    first = ym.ym_linop_apply(grp, Aj, gj)
    second = ym.ym_linop_apply_second_form(grp, Aj, gj)
    recs.append(_residual_record("operator-forms", first - second, [first, second], sub, ctx.tol("operator-forms")))
    F, _ = ym.field_strength(grp, Aj)
    tr = ym.trace_identity_residual(grp, F, jet_of(f, sub).value, gj.value)
    recs.append(_residual_record("trace-identity", tr, [np.abs(F).max() * np.ones_like(tr)], sub,
                                 ctx.tol("trace-identity")))
    r1, r2 = ym.ym_residual(grp, Aj), ym.ym_residual_indexwise(grp, Aj)
    recs.append(_residual_record("field-equation-oracle", r1 - r2, [r1, r2], sub, ctx.tol("field-equation-oracle")))
    return recs


def ym_self_adjoint(ctx: Context) -> list[CheckRecord]:
    rng, n, grp = ctx.rng, ctx.cfg.n, _grp(ctx)
    A, f, g = _ym_data(ctx, grp, rng)
    t = ym.ym_triple(grp, n)
    rep = self_adjointness_check(t.op, t.current, f, g, _points(ctx, rng), background=A)
    return [_identity_record("ym-self-adjoint", rep, ctx.tol("ym-self-adjoint"), group=grp.name)]


def _need_waves(ctx: Context) -> None:
    if ctx.cfg.dimension < 2:
        raise ConfigError("transverse plane waves need dimension >= 2")


def _partner_wave(rng: np.random.Generator, grp: ym.GaugeGroupSpec, w) -> object:
    """Null wave with the same covector and an independent transverse polarization and phase."""
    k = w.k
    ks = k[1:]
    pol = np.zeros((len(k), grp.dim))
    for a in range(grp.dim):
        v = rng.normal(size=len(ks))
        pol[1:, a] = v - (v @ ks) / (ks @ ks) * ks
    return ym.null_plane_wave(grp, k, pol, rng.uniform(0, 2 * np.pi))


def maxwell_conservation(ctx: Context) -> list[CheckRecord]:
    _need_waves(ctx)
    rng, n, grp = ctx.rng, ctx.cfg.n, _grp(ctx)
    A, h1, h2 = (ym.random_null_wave(rng, grp, n) for _ in range(3))
    pts = _points(ctx, rng, 2.0)
    Aj, j1, j2 = jet_of(A, pts), jet_of(h1, pts), jet_of(h2, pts)
    div, terms = ym.ym_current_divergence(grp, Aj, j1, j2)
    recs = [_residual_record("plane-wave-pair", div, [terms], pts, ctx.tol("plane-wave-pair"))]
    P = ym.ym_linop_apply(grp, Aj, Aj)
    recs.append(_residual_record("background-annihilation", P, [np.abs(Aj.second).max() * np.ones_like(P)], pts,
                                 ctx.tol("background-annihilation")))
    return recs


def ym_exactness(ctx: Context) -> list[CheckRecord]:
    rng, n, grp = ctx.rng, ctx.cfg.n, _grp(ctx)
    A, h1, h2 = _ym_data(ctx, grp, rng)
    pts = _points(ctx, rng)
    Aj, j1, j2 = jet_of(A, pts), jet_of(h1, pts), jet_of(h2, pts)
    ext, res = ym.ym_potential_exactness(grp, Aj, j1, j2)
    J = ym.ym_current(grp, Aj, j1, j2)
    recs = [_residual_record("exactness", res, [ext, C_YM * J @ minkowski(n)], pts, ctx.tol("exactness"), c_ym=C_YM, group=grp.name)]
    zero = jet_of(constant_field(np.zeros((n, grp.dim)), n), pts)
    ext0, _ = ym.ym_potential_exactness(grp, zero, j1, j2)
    cw = ym.crnkovic_witten_form(grp, j1, j2)
    recs.append(_residual_record("crnkovic-witten", ext0 - cw, [ext0, cw], pts, ctx.tol("crnkovic-witten")))
    recs.append(_closedness_ym(ctx, rng, grp, Aj, j1, j2))
    return recs


def _ym_functionals(n: int, dim: int) -> dict[str, Callable[[Alg], Alg]]:
    eta = minkowski(n)

    def quad(x):
        return al.ein("mn,ma,na->", eta, x, x)

    return {"A.A": quad, "(A.A)^2": lambda x: quad(x) * quad(x), "exp(A.A)": lambda x: al.exp(quad(x)),
            "(A_m A_n)^2": lambda x: al.ein("ma,na,mb,nb->", x, x, x, x)}


def _closedness_ym(ctx, rng, grp, Aj, j1, j2) -> CheckRecord:
    worst = 0.0
    for fn in _ym_functionals(ctx.cfg.n, grp.dim).values():
        e12 = lift_two_form(fn, Aj.value, j1.value, j2.value)
        body = fn(Alg.const(Aj.value)).body
        scale = np.maximum(1.0, np.abs(body)) * np.abs(j1.value).max() * np.abs(j2.value).max()
        worst = max(worst, float(np.max(np.abs(e12) / scale)))
    tol = ctx.tol("closedness")
    return CheckRecord("closedness", "max_rel", worst, tol, worst <= tol, samples=Aj.npoints * 4)


def maxwell_slice(ctx: Context) -> list[CheckRecord]:
    _need_waves(ctx)
    rng, n, grp = ctx.rng, ctx.cfg.n, _grp(ctx)
    L = ctx.cfg.L
    w1 = ym.random_null_wave(rng, grp, n, box=L)
    w2 = _partner_wave(rng, grp, w1)
    A = ym.random_null_wave(rng, grp, n, box=L)
    prov = _ym_provider(grp, A, w1, w2)
    period = 2 * np.pi / abs(w1.k[0])
    slices = [ps.SliceSpec(f * period, L, ctx.cfg.N, ctx.cfg.dimension) for f in (0.0, 0.25, 0.5)]
    pts = slices[0].points()
    rep = ps.slice_independence(prov, slices, ps.slice_norm(jet_of(w1, pts).value), ps.slice_norm(jet_of(w2, pts).value))
    return [_slice_record(rep, ctx.tol("slice-omega"))]


def _slice_record(rep: ps.SliceReport, tol: float) -> CheckRecord:
    return CheckRecord("slice-omega", "deviation", rep.deviation, tol, rep.passes(tol),
                       samples=len(rep.omegas), details={"omega": [o.value for o in rep.omegas],
                                                         "times": [o.slice.time for o in rep.omegas],
                                                         "floor": rep.floor, "max_abs": rep.max_abs})


def _ym_provider(grp, A, h1, h2) -> ps.CurrentProvider:
    def prov(pts):
        return ym.ym_current(grp, jet_of(A, pts), jet_of(h1, pts), jet_of(h2, pts))
    return prov


def _bump(ctx: Context, rng: np.random.Generator, amplitude: np.ndarray) -> BumpField:
    L = ctx.cfg.L
    c = np.concatenate([[rng.uniform(-0.1, 0.1)], L / 2 + rng.uniform(-0.05, 0.05, size=ctx.cfg.dimension) * L])
    return BumpField(c, 0.4 * L, amplitude)


def maxwell_degeneracy(ctx: Context) -> list[CheckRecord]:
    _need_waves(ctx)
    rng, n, grp = ctx.rng, ctx.cfg.n, _grp(ctx)
    if not grp.abelian:
        raise ConfigError("analytic degeneracy scenarios are Abelian (maxwell) or gravity")
    L = ctx.cfg.L
    probe = ym.random_null_wave(rng, grp, n, box=L)
    eps = _bump(ctx, rng, rng.normal(size=grp.dim))
    A = constant_field(np.zeros((n, grp.dim)), n)

    def prov(pts):
        Aj = jet_of(A, pts)
        return ym.ym_current(grp, Aj, ym.pure_gauge_variation(grp, Aj, eps), jet_of(probe, pts))

    sl = ps.SliceSpec(0.0, L, ctx.cfg.N, ctx.cfg.dimension)
    pts = sl.points()
    hg = ym.pure_gauge_variation(grp, jet_of(A, pts), eps)
    rep = ps.degeneracy_check(prov, sl, eps, ps.slice_norm(hg.value), ps.slice_norm(jet_of(probe, pts).value),
                              ctx.tol("degeneracy"), grid=True)
    return [_degeneracy_record(rep)]


def _degeneracy_record(rep: ps.DegeneracyReport) -> CheckRecord:
    ratio = abs(rep.omega.value) / (rep.gauge_norm * rep.probe_norm)
    return CheckRecord("degeneracy", "omega_over_norms", ratio, rep.tol, rep.passes, samples=1,
                       details={"omega": rep.omega.value, "quadrature_error": rep.omega.error,
                                "gauge_norm": rep.gauge_norm, "probe_norm": rep.probe_norm,
                                "grid_sum": rep.grid_value})


def maxwell_zero_form(ctx: Context) -> list[CheckRecord]:
    _need_waves(ctx)
    rng, n, grp = ctx.rng, ctx.cfg.n, _grp(ctx)
    if not grp.abelian:
        raise ConfigError("the zero-form current is defined for Abelian fields only")
    A1, A2 = ym.random_null_wave(rng, grp, n), ym.random_null_wave(rng, grp, n)
    pts = _points(ctx, rng, 2.0)
    j1, j2 = jet_of(A1, pts), jet_of(A2, pts)
    J, div = ym.abelian_zero_form(grp, j1, j2)
    return [_residual_record("zero-form", div, [np.abs(J).max() * np.ones_like(div)], pts, ctx.tol("zero-form"))]


def maxwell_convergence(ctx: Context) -> list[CheckRecord]:
    _need_waves(ctx)
    rng, n, grp = ctx.rng, ctx.cfg.n, _grp(ctx)
    A, h1, h2 = (ym.random_null_wave(rng, grp, n) for _ in range(3))
    pts = random_points(rng, min(ctx.cfg.points, 50), n)
    return [_order_record("fd-order", ym.ym_symplectic_current(grp), A, h1, h2, pts, ctx.tol("fd-order"))]


# Yang-Mills, lattice ---------------------------------------------------------------------

def _lattice_data(ctx: Context):
    rng = ctx.rng
    grp = ym.group("su2")
    D = ctx.cfg.dimension
    bg = lat.random_smooth_data(rng, D, grp.dim, 0.1)
    return grp, [bg] + [lat.random_smooth_data(rng, D, grp.dim, 0.1, wave_numbers=bg.modes) for _ in range(2)]


def lattice_run(ctx: Context, N: int) -> lat.EvolutionResult:
    cfg = ctx.cfg.at_level(N)
    grp, (bg, d1, d2) = _lattice_data(ctx)
    state = lat.self_dual_state(grp, bg.sample(N, cfg.L), cfg.L)
    p1 = lat.linearized_data(state, d1.sample(N, cfg.L))
    p2 = lat.linearized_data(state, d2.sample(N, cfg.L), lam=1.0)
    return lat.leapfrog_evolve(state, cfg.time_step, cfg.step_count, (p1, p2))


def _levels(ctx: Context) -> list[int]:
    return [ctx.cfg.N] if ctx.single_level else [ctx.cfg.N, 2 * ctx.cfg.N]


def _gauss_record(runs: list[lat.EvolutionResult], tol: float) -> CheckRecord:
    growth = max(float(r.gauss_history.max() / max(r.gauss_history[0], 1e-300)) for r in runs)
    return CheckRecord("gauss-growth", "max_over_initial", growth, tol, growth <= tol,
                       details={"initial": [float(r.gauss_history[0]) for r in runs]})


def su2_conservation(ctx: Context) -> list[CheckRecord]:
    levels = _levels(ctx)
    runs = [lattice_run(ctx, N) for N in levels]
    divs = [float(r.div_history.max()) for r in runs]
    tol = ctx.tol("lattice-divergence")
    if len(runs) == 1:
        rec = CheckRecord("lattice-divergence", "max_abs", divs[0], math.inf, True, samples=len(runs[0].div_history),
                          details={"N": levels})
    else:
        ratio = divs[0] / divs[1]
        rec = CheckRecord("lattice-divergence", "ratio", ratio, tol, abs(ratio / 4 - 1) <= tol, math.log2(ratio),
                          len(runs[0].div_history), {"N": levels, "max_div": divs})
    return [rec, _gauss_record(runs, ctx.tol("gauss-growth"))]


def su2_slice(ctx: Context) -> list[CheckRecord]:
    levels = _levels(ctx)
    runs = [lattice_run(ctx, N) for N in levels]
    devs = [float(np.ptp(r.omega) / max(np.max(np.abs(r.omega)), 1e-300)) for r in runs]
    tol = ctx.tol("lattice-omega")
    if len(runs) == 1:
        rec = CheckRecord("lattice-omega", "deviation", devs[0], math.inf, True, samples=len(runs[0].omega),
                          details={"N": levels})
    elif max(devs) <= SATURATION_FLOOR:
        rec = CheckRecord("lattice-omega", "order", math.nan, tol, True, "saturated", len(runs[0].omega),
                          {"N": levels, "deviation": devs, "omega": [float(r.omega[0]) for r in runs]})
    else:
        order = math.log2(devs[0] / devs[1])
        rec = CheckRecord("lattice-omega", "order", order, tol, order >= tol, order, len(runs[0].omega),
                          {"N": levels, "deviation": devs})
    return [rec, _gauss_record(runs, ctx.tol("gauss-growth"))]


# gravity ---------------------------------------------------------------------------------

def _metric(ctx: Context, rng: np.random.Generator, perturbed: bool = True):
    n = ctx.cfg.n
    return gr.perturbed_metric_field(rng, n) if perturbed else gr.flat_metric_field(n)


def _sym(rng: np.random.Generator, n: int):
    return random_polynomial(rng, n, (n, n), symmetric=True)


def gravity_adjoint(ctx: Context) -> list[CheckRecord]:
    rng, n = ctx.rng, ctx.cfg.n
    g = _metric(ctx, rng)
    f, h = _sym(rng, n), _sym(rng, n)
    pts = _points(ctx, rng)
    t = gr.gr_triple(n)
    recs = [_identity_record("einstein-adjoint", adjoint_identity_residual(t.op, t.adj, t.current, f, h, pts,
                                                                          background=g), ctx.tol("einstein-adjoint"))]
    sub = pts[: min(len(pts), 200)]
    gj, hj = jet_of(g, sub), jet_of(h, sub)
    e_g, _ = gr.gr_linop_apply(gj, gj)
    recs.append(_residual_record("einstein-background", e_g, [np.abs(gj.second).max() * np.ones_like(e_g)], sub,
                                 ctx.tol("einstein-background")))
    explicit, conn = gr.gr_linop_apply(gj, hj)
    tr = np.einsum("pab,pab->p", np.linalg.inv(gj.value), conn)
    reversed_ = 2 * conn - gj.value * tr[:, None, None]
    recs.append(_residual_record("einstein-forms", explicit - reversed_, [explicit, reversed_], sub,
                                 ctx.tol("einstein-forms"), relation="explicit = 2 conn - g tr(conn)"))
    return recs


def gravity_self_adjoint(ctx: Context) -> list[CheckRecord]:
    rng, n = ctx.rng, ctx.cfg.n
    g = _metric(ctx, rng)
    t = gr.gr_triple(n)
    rep = self_adjointness_check(t.op, t.current, _sym(rng, n), _sym(rng, n), _points(ctx, rng), background=g)
    return [_identity_record("einstein-self-adjoint", rep, ctx.tol("einstein-self-adjoint"))]


def _need_tt(ctx: Context) -> None:
    if ctx.cfg.dimension != 3:
        raise ConfigError("transverse-traceless waves need dimension 3")


def gravity_conservation(ctx: Context) -> list[CheckRecord]:
    _need_tt(ctx)
    rng, n = ctx.rng, ctx.cfg.n
    w1, w2 = gr.random_tt_wave(rng, n), gr.random_tt_wave(rng, n)
    pts = _points(ctx, rng, 2.0)
    flat = jet_of(gr.flat_metric_field(n), pts)
    j1, j2 = jet_of(w1, pts), jet_of(w2, pts)
    div, terms = gr.gr_current_divergence(flat, j1, j2)
    recs = [_residual_record("tt-pair", div, [terms], pts, ctx.tol("tt-pair"))]
    pot = gr.gr_potential_current("s")
    terms = pot.div_terms(flat, j1, j1)
    recs.append(_residual_record("potential-on-shell", terms.sum(axis=-1), [terms], pts,
                                 ctx.tol("potential-on-shell")))
    g = _metric(ctx, rng)
    gj = jet_of(g, pts[: min(len(pts), 200)])
    J = gr.gr_current(gj, gj, gj)
    recs.append(CheckRecord("trivial-pair", "max_abs", float(np.abs(J).max()), ctx.tol("trivial-pair"),
                            float(np.abs(J).max()) <= ctx.tol("trivial-pair"), samples=gj.npoints))
    return recs


def gravity_exactness(ctx: Context) -> list[CheckRecord]:
    rng, n = ctx.rng, ctx.cfg.n
    h1, h2 = _sym(rng, n), _sym(rng, n)
    pts = _points(ctx, rng)
    recs = []
    for name, perturbed in (("exactness-flat", False), ("exactness-perturbed", True)):
        g = _metric(ctx, rng, perturbed)
        gj, j1, j2 = jet_of(g, pts), jet_of(h1, pts), jet_of(h2, pts)
        ext, res = gr.gr_exactness(gj, j1, j2)
        w = np.sqrt(np.abs(np.linalg.det(gj.value)))[:, None]
        recs.append(_residual_record(name, res, [ext, C_GR * w * gr.gr_current(gj, j1, j2)], pts, ctx.tol(name),
                                     c_gr=C_GR))
    J = gr.gr_current(gj, j1, j2)
    s_form = gr.gr_current_s_form(gj, j1, j2)
    g_form = gr.gr_current_gamma_form(gj, j1, j2)
    res = np.concatenate([J - 2 * g_form, J + 2 * s_form], axis=1)
    recs.append(_residual_record("current-forms", res, [np.concatenate([J, J], 1),
                                                        np.concatenate([2 * g_form, 2 * s_form], 1)], pts, ctx.tol("current-forms"),
                                 relation="extraction = 2 gamma-form = -2 S-form"))
    t22, t23 = gr.gr_potential(gj, j1)
    k = n / 2 - 1
    recs.append(_residual_record("potential-forms", t22 - k * t23, [t22, k * t23], pts, ctx.tol("potential-forms"),
                                 relation=f"S-form = {k:g} gamma-form"))
    recs.append(_closedness_gr(ctx, gj, j1, j2))
    return recs


def _gr_functionals() -> dict[str, Callable[[Alg], Alg]]:
    return {"sqrt|g|": gr.sqrt_det, "ln|g|": lambda x: al.log(al.det(x) * -1.0),
            "tr(g^-1)": lambda x: al.ein("mm->", al.inv(x)), "tr(g g)": lambda x: al.ein("mn,nm->", x, x)}


def _closedness_gr(ctx: Context, gj, j1, j2) -> CheckRecord:
    worst = 0.0
    for fn in _gr_functionals().values():
        e12 = lift_two_form(fn, gj.value, j1.value, j2.value)
        body = fn(Alg.const(gj.value)).body
        scale = np.maximum(1.0, np.abs(body)) * np.abs(j1.value).max() * np.abs(j2.value).max()
        worst = max(worst, float(np.max(np.abs(e12) / scale)))
    tol = ctx.tol("closedness")
    return CheckRecord("closedness", "max_rel", worst, tol, worst <= tol, samples=gj.npoints * 4)


def gravity_t_tensor(ctx: Context) -> list[CheckRecord]:
    rng, n = ctx.rng, ctx.cfg.n
    g = _metric(ctx, rng)
    h = _sym(rng, n)
    pts = _points(ctx, rng)
    gj, hj = jet_of(g, pts), jet_of(h, pts)
    T, Ta = gr.t_tensor(gj, hj)
    _, t23 = gr.gr_potential(gj, hj)
    trace = np.einsum("pmn,pamn->pa", np.linalg.inv(gj.value), T)
    recs = [_residual_record("t-trace", trace + t23, [trace, t23], pts, ctx.tol("t-trace"),
                             relation="g^mn T^a_mn = -theta^a")]
    w = np.sqrt(np.abs(np.linalg.det(gj.value)))[:, None]
    recs.append(_residual_record("t-density", Ta + w * t23, [Ta, w * t23], pts, ctx.tol("t-density"),
                                 relation="T^a = -sqrt(g) theta^a"))
    if ctx.cfg.dimension == 3:
        wave = gr.random_tt_wave(rng, n)
        flat = jet_of(gr.flat_metric_field(n), pts)
        wj = jet_of(wave, pts)
        div = gr.t_tensor_divergence(flat, wj)
        recs.append(_residual_record("t-divergence", div, [np.abs(wj.second).max() * np.ones_like(div)], pts,
                                     ctx.tol("t-divergence")))
    return recs


def _tt_partner(rng: np.random.Generator, w) -> object:
    k = w.k
    nhat = k[1:] / np.linalg.norm(k[1:])
    a = rng.normal(size=3)
    a -= (a @ nhat) * nhat
    a /= np.linalg.norm(a)
    b = np.cross(nhat, a)
    cp, cx = rng.normal(size=2)
    e = np.zeros((4, 4))
    e[1:, 1:] = cp * (np.outer(a, a) - np.outer(b, b)) + cx * (np.outer(a, b) + np.outer(b, a))
    return gr.tt_wave(k, e, 1.0, rng.uniform(0, 2 * np.pi))


def _gr_provider(h1, h2) -> ps.CurrentProvider:
    flat = gr.flat_metric_field(4)

    def prov(pts):
        return gr.gr_current(jet_of(flat, pts), jet_of(h1, pts), jet_of(h2, pts))
    return prov


def gravity_slice(ctx: Context) -> list[CheckRecord]:
    _need_tt(ctx)
    rng, L = ctx.rng, ctx.cfg.L
    w1 = gr.random_tt_wave(rng, 4, box=L)
    w2 = _tt_partner(rng, w1)
    period = 2 * np.pi / abs(w1.k[0])
    slices = [ps.SliceSpec(f * period, L, ctx.cfg.N, 3) for f in (0.0, 0.25, 0.5)]
    pts = slices[0].points()
    rep = ps.slice_independence(_gr_provider(w1, w2), slices, ps.slice_norm(jet_of(w1, pts).value),
                                ps.slice_norm(jet_of(w2, pts).value))
    return [_slice_record(rep, ctx.tol("slice-omega"))]


def gravity_degeneracy(ctx: Context) -> list[CheckRecord]:
    _need_tt(ctx)
    rng, L = ctx.rng, ctx.cfg.L
    probe = gr.random_tt_wave(rng, 4, box=L)
    xi = _bump(ctx, rng, rng.normal(size=4))
    flat = gr.flat_metric_field(4)

    def prov(pts):
        gj = jet_of(flat, pts)
        return gr.gr_current(gj, gr.diffeo_variation(gj, xi), jet_of(probe, pts))

    sl = ps.SliceSpec(0.0, L, ctx.cfg.N, 3)
    pts = sl.points()
    hx = gr.diffeo_variation(jet_of(flat, pts), xi)
    rep = ps.degeneracy_check(prov, sl, xi, ps.slice_norm(hx.value), ps.slice_norm(jet_of(probe, pts).value),
                              ctx.tol("degeneracy"), order=16)
    return [_degeneracy_record(rep)]


def gravity_convergence(ctx: Context) -> list[CheckRecord]:
    rng, n = ctx.rng, ctx.cfg.n
    pts = random_points(rng, min(ctx.cfg.points, 20), n)
    flat = gr.flat_metric_field(n)
    plain = BoundaryCurrent("gr-flat", lambda bg, f, g: gr.k_current_alg(bg, f, g) * 2.0)
    return [_order_record("fd-order", plain, flat, _sym(rng, n), _sym(rng, n), pts, ctx.tol("fd-order"))]


# registry --------------------------------------------------------------------------------

REGISTRY: dict[tuple[str, str], Callable[[Context], list[CheckRecord]]] = {
    ("reference-dalembert", "adjoint-identity"): reference_adjoint,
    ("reference-dalembert", "self-adjoint"): reference_self_adjoint,
    ("reference-dalembert", "conservation"): reference_conservation,
    ("reference-dalembert", "convergence"): reference_convergence,
    ("maxwell", "adjoint-identity"): ym_adjoint,
    ("maxwell", "self-adjoint"): ym_self_adjoint,
    ("maxwell", "conservation"): maxwell_conservation,
    ("maxwell", "exactness"): ym_exactness,
    ("maxwell", "slice-independence"): maxwell_slice,
    ("maxwell", "degeneracy"): maxwell_degeneracy,
    ("maxwell", "zero-form"): maxwell_zero_form,
    ("maxwell", "convergence"): maxwell_convergence,
    ("su2", "adjoint-identity"): ym_adjoint,
    ("su2", "self-adjoint"): ym_self_adjoint,
    ("su2", "exactness"): ym_exactness,
    ("su2", "conservation"): su2_conservation,
    ("su2", "slice-independence"): su2_slice,
    ("su2", "convergence"): su2_conservation,
    ("gravity", "adjoint-identity"): gravity_adjoint,
    ("gravity", "self-adjoint"): gravity_self_adjoint,
    ("gravity", "conservation"): gravity_conservation,
    ("gravity", "exactness"): gravity_exactness,
    ("gravity", "t-tensor"): gravity_t_tensor,
    ("gravity", "slice-independence"): gravity_slice,
    ("gravity", "degeneracy"): gravity_degeneracy,
    ("gravity", "convergence"): gravity_convergence,
}

# module.operation -> scenarios exercising it (audited by ``list-checks``)
COVERAGE: dict[str, list[tuple[str, str]]] = {
    "jets.jet_of": [("reference-dalembert", "adjoint-identity")],
    "algebra.ein": [("reference-dalembert", "adjoint-identity"), ("gravity", "exactness")],
    "algebra.det": [("gravity", "exactness")],
    "algebra.inv": [("gravity", "adjoint-identity")],
    "grassmann.lift_two_form": [("maxwell", "exactness"), ("gravity", "exactness")],
    "adjoint.adjoint_identity_residual": [("reference-dalembert", "adjoint-identity"), ("su2", "adjoint-identity")],
    "adjoint.self_adjointness_check": [("reference-dalembert", "self-adjoint"), ("gravity", "self-adjoint")],
    "adjoint.composition_current": [("reference-dalembert", "adjoint-identity")],
    "adjoint.sum_triple": [("reference-dalembert", "adjoint-identity")],
    "adjoint.fd_order": [("reference-dalembert", "convergence"), ("maxwell", "convergence")],
    "yang_mills.field_strength": [("su2", "adjoint-identity")],
    "yang_mills.ym_residual": [("su2", "adjoint-identity")],
    "yang_mills.ym_linop_apply": [("su2", "adjoint-identity"), ("maxwell", "conservation")],
    "yang_mills.trace_identity_residual": [("su2", "adjoint-identity")],
    "yang_mills.ym_current": [("maxwell", "exactness"), ("maxwell", "slice-independence")],
    "yang_mills.ym_current_divergence": [("maxwell", "conservation")],
    "yang_mills.ym_potential_exactness": [("maxwell", "exactness"), ("su2", "exactness")],
    "yang_mills.crnkovic_witten_form": [("maxwell", "exactness")],
    "yang_mills.abelian_zero_form": [("maxwell", "zero-form")],
    "yang_mills.pure_gauge_variation": [("maxwell", "degeneracy")],
    "lattice.leapfrog_evolve": [("su2", "conservation"), ("su2", "slice-independence")],
    "lattice.pair_current": [("su2", "conservation")],
    "gravity.gr_linop_apply": [("gravity", "adjoint-identity")],
    "gravity.gr_current": [("gravity", "conservation"), ("gravity", "exactness")],
    "gravity.gr_current_s_form": [("gravity", "exactness")],
    "gravity.gr_current_gamma_form": [("gravity", "exactness")],
    "gravity.gr_current_divergence": [("gravity", "conservation")],
    "gravity.gr_potential": [("gravity", "exactness"), ("gravity", "t-tensor")],
    "gravity.gr_exactness": [("gravity", "exactness")],
    "gravity.t_tensor": [("gravity", "t-tensor")],
    "gravity.t_tensor_divergence": [("gravity", "t-tensor")],
    "gravity.tt_wave": [("gravity", "conservation"), ("gravity", "slice-independence")],
    "gravity.diffeo_variation": [("gravity", "degeneracy")],
    "phase_space.integrate_slice": [("maxwell", "slice-independence"), ("maxwell", "degeneracy")],
    "phase_space.slice_independence": [("maxwell", "slice-independence"), ("gravity", "slice-independence")],
    "phase_space.degeneracy_check": [("maxwell", "degeneracy"), ("gravity", "degeneracy")],
    "scenarios.convergence_sweep": [("su2", "conservation"), ("maxwell", "conservation")],
}


def scenario(cfg: ScenarioConfig) -> Callable[[Context], list[CheckRecord]]:
    try:
        return REGISTRY[(cfg.theory, cfg.check)]
    except KeyError:
        raise ConfigError(f"check {cfg.check!r} is not defined for theory {cfg.theory!r}") from None


def run_scenario(cfg: ScenarioConfig, single_level: bool = False) -> tuple[list[CheckRecord], float]:
    """Execute one scenario; numerical instability becomes a failed record."""
    fn = scenario(cfg)
    t0 = time.perf_counter()
    try:
        recs = fn(Context(cfg, single_level))
    except InstabilityError as exc:
        recs = [CheckRecord(cfg.check, "error", math.nan, 0.0, False, details={"error": str(exc)})]
    return recs, time.perf_counter() - t0


def fit_order(hs, values) -> float | str:
    """Least-squares slope of log(value) against log(h), or "saturated" at the roundoff floor."""
    values = np.asarray(values, float)
    if np.all(values <= SATURATION_FLOOR):
        return "saturated"
    if np.any(values <= 0):
        raise PreconditionError("cannot fit an order through non-positive residuals above the floor")
    return float(np.polyfit(np.log(hs), np.log(values), 1)[0])


def convergence_sweep(cfg: ScenarioConfig, levels: list[int], min_order: float = 2.0 - 0.3) -> tuple[list[CheckRecord], dict]:
    """Run the scenario at each grid level and fit the order of its leading record."""
    if len(levels) < 3:
        raise PreconditionError("a convergence sweep needs at least three levels")
    if len(set(levels)) != len(levels) or min(levels) < 8:
        raise PreconditionError("levels must be distinct grid sizes >= 8")
    values, timings, names = [], {}, []
    for N in levels:
        recs, dt = run_scenario(cfg.at_level(N), single_level=True)
        lead = recs[0]
        values.append(lead.value)
        names.append(lead.name)
        timings[f"{cfg.theory}/{cfg.check}@N={N}"] = dt
    hs = [cfg.L / N for N in levels]
    order = fit_order(hs, values)
    passed = order == "saturated" or order >= min_order
    rec = CheckRecord(f"{names[0]}-order", "order", math.nan if order == "saturated" else order, min_order, passed,
                      order, len(levels), {"levels": list(levels), "h": hs, "values": values})
    return [rec], timings
