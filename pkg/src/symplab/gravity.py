"""Linearized gravity: connection variations, the operator E, S-tensor, currents and potentials.

Metric jets have value shape (n, n).  All expressions are written against the
algebra so the same code yields plain values, exact derivatives (Taylor lifts)
and the e1e2 extraction of field-space forms (Grassmann lifts).  Background
factors always precede variation slots in products.  The density sqrt(g) means
sqrt(|det g|) for Lorentzian metrics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import algebra as al
from .adjoint import AdjointTriple, BoundaryCurrent, LinearOperator, Lifted, lift
from .algebra import Alg, ein
from .errors import InvalidPolarizationError, SingularMatrixError, UnsupportedOrderError
from .jets import Jet2, PlaneWaveField, TestField, constant_field, jet_of
from .reference import minkowski


@dataclass(frozen=True)
class ChristoffelData:
    value: np.ndarray      # Gamma^a_mn, (P, n, n, n)
    first: np.ndarray      # d_l Gamma^a_mn, (P, n, n, n, n)


def check_metric(g: np.ndarray, min_det: float = 1e-12) -> None:
    d = np.linalg.det(g)
    if np.any(np.abs(d) < min_det):
        cond = float(np.max(np.linalg.cond(g)))
        raise SingularMatrixError("degenerate metric", cond)


# building blocks on lifted data ---------------------------------------------

def inverse(G: Lifted) -> Alg:
    return al.inv(G.v)


def christoffel_alg(G: Lifted, ginv: Alg | None = None) -> Alg:
    """Gamma^a_mn as (a, m, n)."""
    ginv = inverse(G) if ginv is None else ginv
    d = G.d  # (i, j, l) = d_l g_ij
    low = (ein("nbm->bmn", d) + ein("mbn->bmn", d) - ein("mnb->bmn", d)) * 0.5
    return ein("ab,bmn->amn", ginv, low)


def cov_d_tensor(gamma: Alg, h: Lifted) -> Alg:
    """nabla_l h_rc as (l, r, c)."""
    return (ein("rcl->lrc", h.d) - ein("slr,sc->lrc", gamma, h.v) - ein("slc,rs->lrc", gamma, h.v))


def delta_christoffel_alg(ginv: Alg, gamma: Alg, h: Lifted) -> Alg:
    """dGamma^a_mn = 1/2 g^ab (nabla_m h_nb + nabla_n h_mb - nabla_b h_mn)."""
    nh = cov_d_tensor(gamma, h)
    inner = ein("mnb->bmn", nh) + ein("nmb->bmn", nh) - ein("bmn->bmn", nh)
    return ein("ab,bmn->amn", ginv, inner) * 0.5


def _taylor(x: Lifted) -> Lifted:
    if x.taylor:
        return x
    return Lifted(Alg.taylor(x.v.body, x.d.body), Alg.taylor(x.d.body, x.dd.body))


def _cov_d_mixed3(gamma: Alg, X: Alg) -> Alg:
    """nabla_l X^a_mn for Taylor-lifted X, as (l, a, m, n)."""
    g0 = gamma.value()
    dX = ein("amnl->lamn", X.grad())
    X0 = X.value()
    return (dX + ein("als,smn->lamn", g0, X0) - ein("slm,asn->lamn", g0, X0) - ein("sln,ams->lamn", g0, X0))


def sqrt_det(G: Alg) -> Alg:
    return al.sqrt(-al.det(G)) if np.all(np.linalg.det(G.body) < 0) else al.sqrt(al.det(G))


# operators -------------------------------------------------------------------

def _e11_alg(G: Lifted, h: Lifted) -> Alg:
    gt, ht = _taylor(G), _taylor(h)
    ginv = inverse(gt)
    gamma = christoffel_alg(gt, ginv)
    dgam = delta_christoffel_alg(ginv, gamma, ht)
    ndg = _cov_d_mixed3(gamma, dgam)  # nabla_l dGamma^a_mn
    return ein("aamn->mn", ndg) - ein("mana->mn", ndg)


def _second_cov(G: Lifted, h: Lifted) -> tuple[Alg, Alg]:
    """(g^-1, nabla_r nabla_s h_ab as (r, s, a, b))."""
    gt, ht = _taylor(G), _taylor(h)
    ginv = inverse(gt)
    gamma = christoffel_alg(gt, ginv)
    nh = cov_d_tensor(gamma, ht)  # Taylor (s, a, b)
    g0 = gamma.value()
    nh0 = nh.value()
    h2 = (ein("sabr->rsab", nh.grad()) - ein("trs,tab->rsab", g0, nh0)
          - ein("tra,stb->rsab", g0, nh0) - ein("trb,sat->rsab", g0, nh0))
    return ginv.value(), h2


def _e12_alg(G: Lifted, h: Lifted) -> Alg:
    ginv, H = _second_cov(G, h)
    gl = G.v.value() if G.v.nt > 1 else G.v
    t1 = ein("br,rmnb->mn", ginv, H)
    t2 = ein("br,rnmb->mn", ginv, H)
    t3 = ein("rs,rsmn->mn", ginv, H)
    t4 = ein("ab,mnab->mn", ginv, H)
    box_tr = ein("ab,rs,rsab->", ginv, ginv, H)
    dd_tr = ein("br,as,rsab->", ginv, ginv, H)
    return t1 + t2 - t3 - t4 + ein("mn,->mn", gl, box_tr - dd_tr)


def gr_linop_apply(g: Jet2, h: Jet2) -> tuple[np.ndarray, np.ndarray]:
    """([E(h)] from the explicit second-order form, the connection-variation form)."""
    check_metric(g.value)
    G, H = lift(g), lift(h)
    return _e12_alg(G, H).body, _e11_alg(G, H).body


def gr_pairing(bg, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """B^mn E_mn with indices raised by the background metric."""
    ginv = np.linalg.inv(bg.value if isinstance(bg, Jet2) else bg)
    return np.einsum("pma,pnb,pab,pmn->p", ginv, ginv, x, y)


# S tensor ----------------------------------------------------------------------

def s_tensor_alg(ginv: Alg) -> Alg:
    """S^{m a b l r c} with unit-weight-1/2 symmetrizations."""
    e = lambda spec: ein(spec, ginv, ginv, ginv)  # noqa: E731
    out = "->mablrc"
    t1 = (e("mr,ca,bl" + out) + e("mc,ra,bl" + out) + e("mr,cb,al" + out) + e("mc,rb,al" + out)) * 0.25
    t2 = (e("ml,ar,cb" + out) + e("ml,ac,rb" + out)) * 0.25
    t3 = (e("ma,bl,rc" + out) + e("mb,al,rc" + out)) * 0.25
    t4 = (e("ab,mr,cl" + out) + e("ab,mc,rl" + out)) * 0.25
    t5 = e("ab,ml,rc" + out) * 0.5
    S = t1 - t2 - t3 - t4 + t5
    # pin the (ab) and (rc) symmetries bit-exactly
    S = (S + ein("mablrc->mbalrc", S)) * 0.5
    return (S + ein("mablrc->mablcr", S)) * 0.5


def s_tensor(g: np.ndarray) -> np.ndarray:
    """S at one metric value (n, n) or a batch (P, n, n)."""
    g = np.asarray(g, float)
    check_metric(g.reshape((-1,) + g.shape[-2:]))
    return s_tensor_alg(Alg.const(np.linalg.inv(g))).body


def k_current_alg(G: Lifted, B: Lifted, A: Lifted) -> Alg:
    """S (B_ab nabla_l A_rc - nabla_l B_rc A_ab), operands in written order."""
    ginv = inverse(G)
    gamma = christoffel_alg(G, ginv)
    S = s_tensor_alg(ginv)
    nA = cov_d_tensor(gamma, A)
    nB = cov_d_tensor(gamma, B)
    return ein("mablrc,ab,lrc->m", S, B.v, nA) - ein("mablrc,lrc,ab->m", S, nB, A.v)


# currents -----------------------------------------------------------------------

def _chunks(n: int, size: int):
    for s in range(0, n, size):
        yield slice(s, min(n, s + size))


def _sub(j: Jet2, sl: slice) -> Jet2:
    return Jet2(j.point[sl], j.value[sl], j.first[sl], j.second[sl], None if j.third is None else j.third[sl])


def _batched(fn, *jets: Jet2, size: int = 128):
    p = jets[0].npoints
    parts = [fn(*(_sub(j, sl) for j in jets)) for sl in _chunks(p, size)]
    if isinstance(parts[0], tuple):
        return tuple(np.concatenate([q[i] for q in parts]) for i in range(len(parts[0])))
    return np.concatenate(parts)


def odd_pair(h1: Lifted, h2: Lifted) -> Lifted:
    z = np.zeros_like(h1.v.body)
    return Lifted(Alg.grassmann(z, h1.v.body, h2.v.body), Alg.grassmann(np.zeros_like(h1.d.body), h1.d.body, h2.d.body))


def extended(G: Lifted, h1: Lifted, h2: Lifted) -> Lifted:
    return Lifted(Alg.grassmann(G.v.body, h1.v.body, h2.v.body), Alg.grassmann(G.d.body, h1.d.body, h2.d.body))


def gr_current(g: Jet2, h1: Jet2, h2: Jet2) -> np.ndarray:
    """Symplectic current: e1e2 part of the S-tensor bilinear with both slots e1 h1 + e2 h2."""
    check_metric(g.value)

    def run(g, h1, h2):
        nn = odd_pair(lift(h1), lift(h2))
        return k_current_alg(lift(g), nn, nn).e12()

    return _batched(run, g, h1, h2)


def gr_current_s_form(g: Jet2, h1: Jet2, h2: Jet2) -> np.ndarray:
    """S (dg2_ab nabla_l dg1_rc - nabla_l dg2_rc dg1_ab)."""
    return _batched(lambda g, a, b: k_current_alg(lift(g), lift(b), lift(a)).body, g, h1, h2)


def _gamma_form_alg(G: Lifted, h1: Lifted, h2: Lifted) -> Alg:
    ginv = inverse(G)
    gamma = christoffel_alg(G, ginv)

    def half(ha: Lifted, hb: Lifted) -> Alg:
        dg = delta_christoffel_alg(ginv, gamma, ha)
        up = -ein("ar,bs,rs->ab", ginv, ginv, hb.v)           # variation of the inverse metric
        dlog = ein("rs,rs->", ginv, hb.v)
        bracket = up + ein("ab,->ab", ginv, dlog) * 0.5
        return ein("mab,ab->m", dg, bracket) - ein("nan,ma->m", dg, bracket)

    return half(h1, h2) - half(h2, h1)


def gr_current_gamma_form(g: Jet2, h1: Jet2, h2: Jet2) -> np.ndarray:
    """dGamma_1 ^ [dg_2^ab + 1/2 g^ab dlng_2] - trace part - (1 <-> 2)."""
    return _batched(lambda g, a, b: _gamma_form_alg(lift(g), lift(a), lift(b)).body, g, h1, h2)


def sqrt_g_weight(bg: Lifted) -> Alg:
    return sqrt_det(bg.v)


def gr_symplectic_current() -> BoundaryCurrent:
    """Canonical current as a closed form (twice the S bilinear), covariant divergence."""
    return BoundaryCurrent("gr-omega", lambda bg, f, g: k_current_alg(bg, f, g) * 2.0, sqrt_g_weight)


def gr_triple(n: int, factor: float | None = None) -> AdjointTriple:
    """(E, E, factor * S-bilinear current) with covariant divergence; factor defaults to the frozen one."""
    from .conventions import E_CURRENT_FACTOR

    factor = E_CURRENT_FACTOR if factor is None else factor
    op = LinearOperator("einstein", 2, _e12_alg, (n, n), (n, n), gr_pairing)
    cur = BoundaryCurrent("gr-s", lambda bg, f, g: k_current_alg(bg, f, g) * factor, sqrt_g_weight)
    return AdjointTriple(op, op, cur)


def gr_current_divergence(g: Jet2, h1: Jet2, h2: Jet2) -> tuple[np.ndarray, np.ndarray]:
    cur = gr_symplectic_current()
    terms = _batched(lambda g, a, b: cur.div_terms(g, a, b), g, h1, h2)
    return terms.sum(axis=-1), terms


# potentials ------------------------------------------------------------------------

def potential_s_alg(G: Lifted, h: Lifted) -> Alg:
    ginv = inverse(G)
    gamma = christoffel_alg(G, ginv)
    return ein("mablrc,ab,lrc->m", s_tensor_alg(ginv), G.v, cov_d_tensor(gamma, h))


def potential_gamma_alg(G: Lifted, h: Lifted) -> Alg:
    ginv = inverse(G)
    gamma = christoffel_alg(G, ginv)
    dg = delta_christoffel_alg(ginv, gamma, h)
    return ein("ma,nan->m", ginv, dg) - ein("ab,mab->m", ginv, dg)


def gr_potential(g: Jet2, h: Jet2) -> tuple[np.ndarray, np.ndarray]:
    """(S g nabla h form, connection-variation form) of theta^m."""
    check_metric(g.value)
    return _batched(lambda g, h: (potential_s_alg(lift(g), lift(h)).body, potential_gamma_alg(lift(g), lift(h)).body),
                    g, h)


def gr_potential_current(form: str = "s") -> BoundaryCurrent:
    """theta^m wrapped as a current of (background, h, unused) for divergence checks."""
    fn = potential_s_alg if form == "s" else potential_gamma_alg
    return BoundaryCurrent(f"gr-theta-{form}", lambda bg, h, _unused: fn(bg, h), sqrt_g_weight)


def gr_exactness(g: Jet2, h1: Jet2, h2: Jet2, c: float | None = None,
                 form: str = "s") -> tuple[np.ndarray, np.ndarray]:
    """(e1e2 part of sqrt(g) theta under g -> g + e1 h1 + e2 h2, residual against c sqrt(g) J)."""
    from .conventions import C_GR

    c = C_GR if c is None else c
    check_metric(g.value)
    fn = potential_s_alg if form == "s" else potential_gamma_alg

    def run(g, h1, h2):
        l1, l2 = lift(h1), lift(h2)
        ext = extended(lift(g), l1, l2)
        return ein(",m->m", sqrt_det(ext.v), fn(ext, odd_pair(l1, l2))).e12()

    extraction = _batched(run, g, h1, h2)
    w = np.sqrt(np.abs(np.linalg.det(g.value)))[:, None]
    return extraction, extraction - c * w * gr_current(g, h1, h2)


# T tensor -----------------------------------------------------------------------

def t_tensor(g: Jet2, h: Jet2) -> tuple[np.ndarray, np.ndarray]:
    """(T^a_mn = dGamma^a_mn - delta^a_m dGamma^l_nl, T^a = sqrt(g) g^mn T^a_mn)."""
    check_metric(g.value)
    G, H = lift(g), lift(h)
    ginv = inverse(G)
    dg = delta_christoffel_alg(ginv, christoffel_alg(G, ginv), H).body
    n = g.n
    T = dg - np.einsum("am,plnl->pamn", np.eye(n), dg)
    w = np.sqrt(np.abs(np.linalg.det(g.value)))
    return T, w[:, None] * np.einsum("pmn,pamn->pa", ginv.body, T)


def t_tensor_divergence(g: Jet2, h: Jet2) -> np.ndarray:
    """nabla_a T^a_mn, shape (P, n, n)."""
    gt, ht = _taylor(lift(g)), _taylor(lift(h))
    ginv = inverse(gt)
    gamma = christoffel_alg(gt, ginv)
    dg = delta_christoffel_alg(ginv, gamma, ht)
    nd = _cov_d_mixed3(gamma, dg)  # (l, a, m, n)
    div_dg = ein("aamn->mn", nd)
    trace_grad = ein("mlnl->mn", nd)  # nabla_m dGamma^l_nl
    return (div_dg - trace_grad).body


# analytic perturbations ---------------------------------------------------------------

def tt_wave(k, polarization, amplitude: float = 1.0, phase: float = 0.0) -> PlaneWaveField:
    """h_mn = amplitude * e_mn cos(k.x + phase) after checking the TT conditions against eta."""
    k = np.asarray(k, float)
    e = np.asarray(polarization, float)
    n = len(k)
    eta = minkowski(n)
    scale = max(1.0, float(np.max(np.abs(k)))) ** 2 * max(1.0, float(np.max(np.abs(e))))
    bad = []
    if abs(k @ eta @ k) > 1e-12 * scale:
        bad.append("k is not null")
    if np.max(np.abs(e - e.T)) > 0:
        bad.append("polarization not symmetric")
    if np.max(np.abs(np.einsum("mr,r,mn->n", eta, k, e))) > 1e-12 * scale:
        bad.append("not transverse (k^m e_mn != 0)")
    if abs(np.einsum("mn,mn->", eta, e)) > 1e-12 * scale:
        bad.append("not traceless")
    if np.max(np.abs(e[0])) > 0:
        bad.append("e_0n != 0")
    if bad:
        raise InvalidPolarizationError("; ".join(bad))
    return PlaneWaveField(amplitude * e, k, phase)


def plus_polarization(n: int, axis: int = 3) -> np.ndarray:
    """e_11 = -e_22 = 1 for a wave travelling along ``axis``."""
    e = np.zeros((n, n))
    e[1, 1], e[2, 2] = 1.0, -1.0
    return e


def random_tt_wave(rng: np.random.Generator, n: int, amplitude: float = 1.0, box: float | None = None) -> PlaneWaveField:
    """Random direction; two-parameter transverse-traceless polarization (needs n >= 4)."""
    d = n - 1
    if box is None:
        nhat = rng.normal(size=d)
        nhat /= np.linalg.norm(nhat)
        kspace = rng.uniform(0.5, 2.0) * nhat
    else:
        m = np.zeros(d)
        while not np.any(m):
            m = rng.integers(-1, 2, size=d).astype(float)
        kspace = 2 * np.pi * m / box
    w = np.linalg.norm(kspace)
    nhat = kspace / w
    # orthonormal pair transverse to nhat
    a = rng.normal(size=d)
    a -= (a @ nhat) * nhat
    a /= np.linalg.norm(a)
    b = np.cross(nhat, a) if d == 3 else None
    if b is None:
        raise InvalidPolarizationError("transverse-traceless waves need three spatial dimensions")
    cp, cx = rng.normal(size=2)
    sp = cp * (np.outer(a, a) - np.outer(b, b)) + cx * (np.outer(a, b) + np.outer(b, a))
    e = np.zeros((n, n))
    e[1:, 1:] = sp
    return tt_wave(np.concatenate([[-w], kspace]), e, amplitude, rng.uniform(0, 2 * np.pi))


def diffeo_variation(g: Jet2, xi: TestField | Jet2) -> Jet2:
    """h_mn = nabla_m xi_n + nabla_n xi_m for a constant background metric."""
    if np.max(np.abs(g.first), initial=0.0) > 0 or np.max(np.abs(g.second), initial=0.0) > 0:
        raise UnsupportedOrderError("diffeomorphism directions are built on constant metrics only")
    x = xi if isinstance(xi, Jet2) else jet_of(xi, g.point, 3)
    if x.third is None:
        raise UnsupportedOrderError("generator needs third derivatives")
    val = x.first + np.swapaxes(x.first, 1, 2)
    d1 = x.second + np.swapaxes(x.second, 1, 2)
    d2 = x.third + np.swapaxes(x.third, 1, 2)
    return Jet2(g.point, val, d1, d2)


def flat_metric_field(n: int) -> TestField:
    return constant_field(minkowski(n), n)


def perturbed_metric_field(rng: np.random.Generator, n: int, amplitude: float = 0.2, degree: int = 3) -> TestField:
    """eta + amplitude * (random symmetric polynomial bounded by 1 on the unit cube)."""
    from .jets import random_polynomial

    return flat_metric_field(n) + random_polynomial(rng, n, (n, n), degree, amplitude, normalize=True, symmetric=True)
