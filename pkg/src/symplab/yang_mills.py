"""Yang-Mills fields: curvature, linearized operator, symplectic current and potential.

Lie-algebra valued fields are stored by real components in an anti-Hermitian
basis T^a with Tr(T^a T^b) = -1/2 delta^ab, so [X, Y]^a = f^abc X^b Y^c and
Tr(X Y) = -1/2 X^a Y^a.  A gauge potential has value shape (n, dim) with the
spacetime index first.  Brackets are written background-first so that
field-space variations always sit to the right in every product.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .adjoint import AdjointTriple, BoundaryCurrent, LinearOperator, Lifted, lift
from .algebra import Alg, ein
from .conventions import TRACE_NORM
from .errors import InvalidPolarizationError, UnsupportedError
from .jets import Jet2, PlaneWaveField, TestField, jet_of
from .reference import minkowski


@dataclass(frozen=True, eq=False)
class GaugeGroupSpec:
    name: str
    generators: np.ndarray  # (dim, N, N) complex, anti-Hermitian

    @property
    def dim(self) -> int:
        return self.generators.shape[0]

    @property
    def abelian(self) -> bool:
        return not np.any(self.structure)

    @property
    def structure(self) -> np.ndarray:
        return _structure(self.name)

    def matrix(self, x: np.ndarray) -> np.ndarray:
        """x^a T^a for components along the last axis."""
        return np.tensordot(x, self.generators, axes=([-1], [0]))

    def anti_hermitian_defect(self) -> float:
        t = self.generators
        return float(np.max(np.abs(t + np.conj(np.swapaxes(t, -1, -2)))))

    def trace_form(self) -> np.ndarray:
        return np.real(np.einsum("aij,bji->ab", self.generators, self.generators))


def _su2_generators() -> np.ndarray:
    sigma = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex)
    return -0.5j * sigma


def _u1_generators() -> np.ndarray:
    return np.array([[[-1j / np.sqrt(2.0)]]])


@lru_cache(maxsize=None)
def _structure(name: str) -> np.ndarray:
    t = group(name).generators
    comm = np.einsum("aij,bjk->abik", t, t) - np.einsum("bij,ajk->abik", t, t)
    # f^abc = -2 Tr([T^a, T^b] T^c)
    f = -2.0 * np.real(np.einsum("abij,cji->abc", comm, t))
    f[np.abs(f) < 1e-15] = 0.0
    return f


def group(name: str) -> GaugeGroupSpec:
    key = name.lower().replace("(", "").replace(")", "")
    if key == "su2":
        return GaugeGroupSpec("su2", _su2_generators())
    if key == "u1":
        return GaugeGroupSpec("u1", _u1_generators())
    raise UnsupportedError(f"unknown gauge group {name!r}")


def bracket(grp: GaugeGroupSpec, x: Alg, y: Alg, spec: str) -> Alg:
    """[x, y] on Lie-algebra components; ``spec`` names the algebra axis 'a', e.g. 'ma,na->mna'."""
    ins, out = spec.split("->")
    xs, ys = ins.split(",")
    return ein(f"Abc,{xs.replace('a', 'b')},{ys.replace('a', 'c')}->{out.replace('a', 'A')}",
               grp.structure, x, y)


def _tr(x: Alg, y: Alg, spec: str) -> Alg:
    return ein(spec, x, y) * TRACE_NORM


# covariant derivatives --------------------------------------------------------

def cov_d(grp: GaugeGroupSpec, A: Alg, X: Lifted) -> Alg:
    """(D_m X_n)^a = d_m X_n^a + [A_m, X_n]^a, value shape (m, n, a)."""
    return ein("nam->mna", X.d) + bracket(grp, A, X.v, "ma,na->mna")


def field_strength_alg(grp: GaugeGroupSpec, A: Lifted) -> Alg:
    dA = ein("nam->mna", A.d)
    return dA - ein("mna->nma", dA) + bracket(grp, A.v, A.v, "ma,na->mna")


def delta_field_strength_alg(grp: GaugeGroupSpec, A: Alg, h: Lifted) -> Alg:
    dh = cov_d(grp, A, h)
    return dh - ein("mna->nma", dh)


def _taylor(x: Lifted) -> Lifted:
    if x.taylor:
        return x
    return Lifted(Alg.taylor(x.v.body, x.d.body), Alg.taylor(x.d.body, x.dd.body))


def _eta(n: int) -> np.ndarray:
    return minkowski(n)


def field_strength(grp: GaugeGroupSpec, A: Jet2, h: Jet2 | None = None) -> tuple[np.ndarray, np.ndarray | None]:
    """(F_mn, dF_mn) at each point, shape (P, n, n, dim)."""
    la = lift(A)
    F = field_strength_alg(grp, la).body
    dF = None if h is None else delta_field_strength_alg(grp, la.v, lift(h)).body
    return F, dF


def _cov_div(grp: GaugeGroupSpec, A: Lifted, X: Alg) -> Alg:
    """D^m X_mn for a Taylor-lifted X, output shape (n, a)."""
    eta = _eta(A.v.shape[-2])
    dX = X.grad()  # (m, n, a, r)
    return ein("mr,mnar->na", eta, dX) + ein("mr,rmna->na", eta, bracket(grp, A.v.value(), X.value(), "ra,mna->rmna"))


def ym_residual(grp: GaugeGroupSpec, A: Jet2) -> np.ndarray:
    """D^m F_mn at each point, shape (P, n, dim)."""
    la = _taylor(lift(A))
    F = field_strength_alg(grp, la)
    return _cov_div(grp, la, F).body


def ym_residual_indexwise(grp: GaugeGroupSpec, A: Jet2) -> np.ndarray:
    """Loop-based assembly of D^m F_mn, an independent cross-check."""
    f = grp.structure
    n, dim = A.comp_shape
    eta = np.diag(_eta(n))
    out = np.zeros((A.npoints, n, dim))
    a, da, dda = A.value, A.first, A.second
    for p in range(A.npoints):
        F = np.zeros((n, n, dim))
        dF = np.zeros((n, n, dim, n))
        for m in range(n):
            for v in range(n):
                for x in range(dim):
                    F[m, v, x] = da[p, v, x, m] - da[p, m, x, v]
                    for r in range(n):
                        dF[m, v, x, r] = dda[p, v, x, m, r] - dda[p, m, x, v, r]
                    for b in range(dim):
                        for c in range(dim):
                            if f[x, b, c] == 0:
                                continue
                            F[m, v, x] += f[x, b, c] * a[p, m, b] * a[p, v, c]
                            for r in range(n):
                                dF[m, v, x, r] += f[x, b, c] * (da[p, m, b, r] * a[p, v, c] + a[p, m, b] * da[p, v, c, r])
        for v in range(n):
            for x in range(dim):
                s = 0.0
                for m in range(n):
                    s += eta[m] * dF[m, v, x, m]
                    for b in range(dim):
                        for c in range(dim):
                            s += eta[m] * f[x, b, c] * a[p, m, b] * F[m, v, c]
                out[p, v, x] = s
    return out


# linearized operator -------------------------------------------------------

def _ym_op_alg(grp: GaugeGroupSpec, A: Lifted, h: Lifted) -> Alg:
    at, ht = _taylor(A), _taylor(h)
    dF = delta_field_strength_alg(grp, at.v, ht)
    F = field_strength_alg(grp, A)
    eta = _eta(A.v.shape[-2])
    return _cov_div(grp, at, dF) + ein("mr,rmna->na", eta, bracket(grp, h.v, F, "ra,mna->rmna"))


def ym_linop_apply(grp: GaugeGroupSpec, A: Jet2, h: Jet2) -> np.ndarray:
    """[P(h)]_n = D^m dF_mn + [h^m, F_mn], shape (P, n, dim)."""
    return _ym_op_alg(grp, lift(A), lift(h)).body


def _second_cov(grp: GaugeGroupSpec, A: Lifted, h: Lifted) -> Alg:
    """D_r D_m h_n as (r, m, n, a)."""
    at, ht = _taylor(A), _taylor(h)
    Dh = cov_d(grp, at.v, ht)  # Taylor (m, n, a)
    return ein("mnar->rmna", Dh.grad()) + bracket(grp, at.v.value(), Dh.value(), "ra,mna->rmna")


def ym_linop_apply_second_form(grp: GaugeGroupSpec, A: Jet2, h: Jet2, swapped: bool = False) -> np.ndarray:
    """[d^a_n D^m D_m - D^a D_n] h_a + [h_a, F^a_n], derivatives applied right to left.

    ``swapped`` reads the middle term as D_n D^a h_a instead.
    """
    la, lh = lift(A), lift(h)
    eta = _eta(la.v.shape[-2])
    dd = _second_cov(grp, la, lh)  # (r, m, n, a) = D_r D_m h_n
    box = ein("rm,rmna->na", eta, dd)
    if swapped:
        mid = ein("ar,nrab->nb", eta, dd)
    else:
        mid = ein("ar,rnab->nb", eta, dd)
    F = field_strength_alg(grp, la)
    comm = ein("rm,rmna->na", eta, bracket(grp, lh.v, F, "ra,mna->rmna"))
    return (box - mid + comm).body


def ym_pairing(bg, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Tr(x^n y_n) for (P, n, dim) arrays."""
    return TRACE_NORM * np.einsum("mn,pma,pna->p", _eta(x.shape[1]), x, y)


# currents --------------------------------------------------------------

def _raised_antisym(grp: GaugeGroupSpec, A: Alg, X: Lifted) -> Alg:
    """D^[m X^n] = D^m X^n - D^n X^m, shape (m, n, a)."""
    eta = _eta(A.shape[-2])
    d = cov_d(grp, A, X)
    up = ein("mr,ns,rsa->mna", eta, eta, d)
    return up - ein("mna->nma", up)


def pair_current_alg(grp: GaugeGroupSpec, A: Alg, B: Lifted, C: Lifted) -> Alg:
    """Tr[B_n D^[m C^n] - D^[m B^n] C_n] in written operand order."""
    return (_tr(B.v, _raised_antisym(grp, A, C), "na,mna->m")
            - _tr(_raised_antisym(grp, A, B), C.v, "mna,na->m"))


def ym_pair_current(grp: GaugeGroupSpec, A: Jet2, B: Jet2, C: Jet2) -> np.ndarray:
    return pair_current_alg(grp, lift(A).v, lift(B), lift(C)).body


def ym_triple(grp: GaugeGroupSpec, n: int) -> AdjointTriple:
    """(P, P, J) for a Yang-Mills background passed as the operator background."""
    shape = (n, grp.dim)
    op = LinearOperator(f"ym-{grp.name}", 2, lambda bg, h: _ym_op_alg(grp, bg, h), shape, shape, ym_pairing)
    cur = BoundaryCurrent(f"ym-{grp.name}", lambda bg, f, g: pair_current_alg(grp, bg.v, f, g))
    return AdjointTriple(op, op, cur)


def odd_pair(h1: Lifted, h2: Lifted) -> Lifted:
    """e1 h1 + e2 h2 as a Grassmann element."""
    z = np.zeros_like(h1.v.body)
    zd = np.zeros_like(h1.d.body)
    return Lifted(Alg.grassmann(z, h1.v.body, h2.v.body), Alg.grassmann(zd, h1.d.body, h2.d.body))


def extended(bg: Lifted, h1: Lifted, h2: Lifted) -> Lifted:
    """background + e1 h1 + e2 h2."""
    return Lifted(Alg.grassmann(bg.v.body, h1.v.body, h2.v.body),
                  Alg.grassmann(bg.d.body, h1.d.body, h2.d.body),
                  None if bg.dd is None else Alg.grassmann(bg.dd.body, h1.dd.body, h2.dd.body))


def ym_current(grp: GaugeGroupSpec, A: Jet2, h1: Jet2, h2: Jet2) -> np.ndarray:
    """Symplectic current: e1e2 part of the pair current with both slots e1 h1 + e2 h2."""
    nn = odd_pair(lift(h1), lift(h2))
    return pair_current_alg(grp, lift(A).v, nn, nn).e12()


def ym_current_closed(grp: GaugeGroupSpec, A: Jet2, h1: Jet2, h2: Jet2) -> np.ndarray:
    """2 Tr[h1_n D^[m h2^n] - h2_n D^[m h1^n]]."""
    la, l1, l2 = lift(A), lift(h1), lift(h2)
    return 2.0 * (_tr(l1.v, _raised_antisym(grp, la.v, l2), "na,mna->m")
                  - _tr(l2.v, _raised_antisym(grp, la.v, l1), "na,mna->m")).body


def ym_current_alg(grp: GaugeGroupSpec, A: Lifted, h1: Lifted, h2: Lifted) -> Alg:
    return (_tr(h1.v, _raised_antisym(grp, A.v, h2), "na,mna->m")
            - _tr(h2.v, _raised_antisym(grp, A.v, h1), "na,mna->m")) * 2.0


def ym_symplectic_current(grp: GaugeGroupSpec) -> BoundaryCurrent:
    """Closed-form symplectic current with background A, as a divergence-capable current."""
    return BoundaryCurrent(f"ym-omega-{grp.name}", lambda bg, f, g: ym_current_alg(grp, bg, f, g))


def ym_current_divergence(grp: GaugeGroupSpec, A: Jet2, h1: Jet2, h2: Jet2) -> tuple[np.ndarray, np.ndarray]:
    """(d_m J^m, per-direction terms)."""
    terms = ym_symplectic_current(grp).div_terms(A, h1, h2)
    return terms.sum(axis=-1), terms


# potential and exactness -------------------------------------------------

def potential_alg(grp: GaugeGroupSpec, A: Lifted, dA: Lifted) -> Alg:
    """theta_m = Tr[A^n dF_mn - F_mn dA^n]."""
    eta = _eta(A.v.shape[-2])
    F = field_strength_alg(grp, A)
    dF = delta_field_strength_alg(grp, A.v, dA)
    a_up = ein("nr,ra->na", eta, A.v)
    return (_tr(a_up, dF, "na,mna->m")
            - _tr(ein("mra,rn->mna", F, eta), dA.v, "mna,na->m"))


def ym_potential(grp: GaugeGroupSpec, A: Jet2, h: Jet2) -> np.ndarray:
    return potential_alg(grp, lift(A), lift(h)).body


def ym_potential_extraction(grp: GaugeGroupSpec, A: Jet2, h1: Jet2, h2: Jet2) -> np.ndarray:
    la, l1, l2 = lift(A), lift(h1), lift(h2)
    return potential_alg(grp, extended(la, l1, l2), odd_pair(l1, l2)).e12()


def ym_potential_exactness(grp: GaugeGroupSpec, A: Jet2, h1: Jet2, h2: Jet2,
                           c: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """(two-form part of theta_m, residual against c * J_m) per point and component."""
    from .conventions import C_YM

    c = C_YM if c is None else c
    ext = ym_potential_extraction(grp, A, h1, h2)
    j_low = ym_current(grp, A, h1, h2) @ _eta(A.comp_shape[0])
    return ext, ext - c * j_low


def crnkovic_witten_form(grp: GaugeGroupSpec, h1: Jet2, h2: Jet2) -> np.ndarray:
    """2 Tr(dA^n ^ dF_mn) on a vanishing background, read canonically."""
    zero = Alg.const(np.zeros_like(h1.value))
    nn = odd_pair(lift(h1), lift(h2))
    dF = delta_field_strength_alg(grp, zero, nn)
    eta = _eta(h1.comp_shape[0])
    return (_tr(ein("nr,ra->na", eta, nn.v), dF, "na,mna->m") * 2.0).e12()


# Abelian specializations --------------------------------------------------

def _abelian_only(grp: GaugeGroupSpec) -> None:
    if not grp.abelian:
        raise UnsupportedError("the zero-form current is defined for Abelian fields only")


def zero_form_alg(A1: Lifted, A2: Lifted) -> Alg:
    """A1_n F2^mn - A2_n F1^mn (first algebra component)."""
    u1 = group("u1")
    eta = _eta(A1.v.shape[-2])
    F1 = field_strength_alg(u1, A1)
    F2 = field_strength_alg(u1, A2)
    up = lambda F: ein("mr,ns,rsa->mna", eta, eta, F)  # noqa: E731
    return ein("na,mna->m", A1.v, up(F2)) - ein("na,mna->m", A2.v, up(F1))


def abelian_zero_form(grp: GaugeGroupSpec, A1: Jet2, A2: Jet2) -> tuple[np.ndarray, np.ndarray]:
    """(J^m, d_m J^m) for two Abelian backgrounds."""
    _abelian_only(grp)
    cur = BoundaryCurrent("zero-form", lambda bg, f, g: zero_form_alg(f, g))
    return cur.eval(None, A1, A2), cur.div(None, A1, A2)


# gauge directions -----------------------------------------------------------

def pure_gauge_variation(grp: GaugeGroupSpec, A: Jet2, eps: TestField | Jet2) -> Jet2:
    """h_m = d_m eps + [A_m, eps] with exact first and second derivatives."""
    e = eps if isinstance(eps, Jet2) else jet_of(eps, A.point, 3)
    if e.third is None:
        raise UnsupportedError("gauge generator needs third derivatives")
    f = grp.structure
    a, da, dda = A.value, A.first, A.second
    ev, de, dde, ddde = e.value, e.first, e.second, e.third
    val = np.moveaxis(de, -1, 1) + np.einsum("abc,pmb,pc->pma", f, a, ev)
    d1 = (np.moveaxis(dde, -2, 1)
          + np.einsum("abc,pmbl,pc->pmal", f, da, ev) + np.einsum("abc,pmb,pcl->pmal", f, a, de))
    d2 = (np.moveaxis(ddde, -3, 1)
          + np.einsum("abc,pmblk,pc->pmalk", f, dda, ev)
          + np.einsum("abc,pmbl,pck->pmalk", f, da, de)
          + np.einsum("abc,pmbk,pcl->pmalk", f, da, de)
          + np.einsum("abc,pmb,pclk->pmalk", f, a, dde))
    return Jet2(A.point, val, d1, d2)


def gauge_orbit_shift(grp: GaugeGroupSpec, A: Jet2, h: Jet2, eps: Jet2, s: float) -> tuple[Jet2, Jet2]:
    """(A + s D eps, h + s [h, eps]) to first order in s."""
    dA = pure_gauge_variation(grp, A, eps)
    f = grp.structure
    hv = h.value + s * np.einsum("abc,pmb,pc->pma", f, h.value, eps.value)
    hd = h.first + s * (np.einsum("abc,pmbl,pc->pmal", f, h.first, eps.value)
                        + np.einsum("abc,pmb,pcl->pmal", f, h.value, eps.first))
    hdd = h.second + s * (np.einsum("abc,pmblk,pc->pmalk", f, h.second, eps.value)
                          + np.einsum("abc,pmbl,pck->pmalk", f, h.first, eps.first)
                          + np.einsum("abc,pmbk,pcl->pmalk", f, h.first, eps.first)
                          + np.einsum("abc,pmb,pclk->pmalk", f, h.value, eps.second))
    return A + dA.scale(s), Jet2(h.point, hv, hd, hdd)


# trace identity -----------------------------------------------------------

def trace_identity_residual(grp: GaugeGroupSpec, F: np.ndarray, B: np.ndarray, C: np.ndarray) -> np.ndarray:
    """Tr{B^n [C_a, F^a_n] - [B_a, F^a_n] C^n - [F_mn, B^m C^n]} with matrices, per point."""
    n = B.shape[1]
    eta = _eta(n)
    Fm, Bm, Cm = grp.matrix(F), grp.matrix(B), grp.matrix(C)
    Fmix = np.einsum("ar,prnij->panij", eta, Fm)          # F^a_n
    Bup = np.einsum("nr,prij->pnij", eta, Bm)
    Cup = np.einsum("nr,prij->pnij", eta, Cm)
    com = lambda x, y: x @ y - y @ x  # noqa: E731
    t1 = np.einsum("pnij,panji->p", Bup, com(Cm[:, :, None], Fmix))
    t2 = np.einsum("panij,pnji->p", com(Bm[:, :, None], Fmix), Cup)
    BC = np.einsum("pmij,pnjk->pmnik", Bup, Cup)
    t3 = np.einsum("pmnii->p", com(Fm, BC))
    return np.real(t1 - t2 - t3)


# analytic solutions ---------------------------------------------------------

def null_plane_wave(grp: GaugeGroupSpec, k: np.ndarray, polarization: np.ndarray, phase: float = 0.0) -> PlaneWaveField:
    """A_m = e_m cos(k.x + phase) with eta^{mn} k_m k_n = 0 and eta^{mn} k_m e_n = 0."""
    k = np.asarray(k, float)
    pol = np.asarray(polarization, float)
    eta = _eta(len(k))
    scale = max(1.0, float(np.max(np.abs(k))) ** 2)
    if abs(k @ eta @ k) > 1e-12 * scale:
        raise InvalidPolarizationError("wave covector is not null")
    if np.max(np.abs(np.einsum("m,mn,na->a", k, eta, pol)), initial=0.0) > 1e-12 * scale * max(1.0, np.abs(pol).max()):
        raise InvalidPolarizationError("polarization not transverse (Lorenz condition)")
    return PlaneWaveField(pol, k, phase)


def random_null_wave(rng: np.random.Generator, grp: GaugeGroupSpec, n: int, omega: float | None = None,
                     amplitude: float = 1.0, box: float | None = None) -> PlaneWaveField:
    """Random null, transverse wave.  With ``box`` the spatial covector is commensurate with the box."""
    d = n - 1
    if box is None:
        nhat = rng.normal(size=d)
        nhat /= np.linalg.norm(nhat)
        w = omega if omega is not None else rng.uniform(0.5, 2.0)
        kspace = w * nhat
    else:
        m = np.zeros(d)
        while not np.any(m):
            m = rng.integers(-1, 2, size=d).astype(float)
        kspace = 2 * np.pi * m / box
        w = np.linalg.norm(kspace)
    k = np.concatenate([[-w], kspace])
    pol = np.zeros((n, grp.dim))
    for a in range(grp.dim):
        v = rng.normal(size=d)
        v -= (v @ kspace) / (kspace @ kspace) * kspace
        pol[1:, a] = amplitude * v
    return null_plane_wave(grp, k, pol, rng.uniform(0, 2 * np.pi))
