"""Temporal-gauge Yang-Mills on a periodic lattice, with linearized pairs.

Fields live on the nodes of an N^D periodic grid of spacing h = L/N; spatial
derivatives are second-order central differences.  Arrays are laid out as
``(D, N, ..., N, dim)`` for the spatial gauge potential A_i and electric field
E_i = d_t A_i, and component sums use the positive form -2 Tr(XY) = X^a Y^a.

Time stepping is the staggered (velocity-Verlet form of) leapfrog: E is kicked
by half steps around each drift of A, so the integer-time E equals the average
of the two neighbouring half-step values.  Linearized fields (a, e) are pushed
with the exact linearization of the same discrete step.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import ConfigError, InstabilityError
from .phase_space import tree_sum
from .yang_mills import GaugeGroupSpec, group as gauge_group

CFL_LIMIT = 0.5
GAUSS_GROWTH_LIMIT = 10.0


@dataclass
class LatticeGaugeState:
    group: GaugeGroupSpec
    L: float
    A: np.ndarray          # (D, N..., dim)
    E: np.ndarray          # (D, N..., dim)
    time: float = 0.0
    step: int = 0

    @property
    def D(self) -> int:
        return self.A.shape[0]

    @property
    def N(self) -> int:
        return self.A.shape[1]

    @property
    def h(self) -> float:
        return self.L / self.N

    def copy(self) -> LatticeGaugeState:
        return replace(self, A=self.A.copy(), E=self.E.copy())


@dataclass
class LinearizedPair:
    """A solution of the linearized equations: potential a_i and its time derivative e_i."""
    a: np.ndarray
    e: np.ndarray

    def copy(self) -> LinearizedPair:
        return LinearizedPair(self.a.copy(), self.e.copy())


# discrete calculus --------------------------------------------------------------

def _d(x: np.ndarray, axis: int, h: float) -> np.ndarray:
    """Central difference along spatial ``axis`` of an (N..., dim) field."""
    return (np.roll(x, -1, axis) - np.roll(x, 1, axis)) / (2 * h)


_LEVI = np.zeros((3, 3, 3))
for _a, _b, _c in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    _LEVI[_a, _b, _c], _LEVI[_a, _c, _b] = 1.0, -1.0


def _br(f: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """[x, y]^a = f^abc x^b y^c over the last axis."""
    if not f.any():
        return np.zeros(np.broadcast_shapes(x.shape, y.shape))
    if f.shape == (3, 3, 3) and np.array_equal(f, _LEVI):
        return np.cross(x, y)
    return np.einsum("abc,...b,...c->...a", f, x, y)


def _cov(f, A, x, i, h):
    """D_i x = d_i x + [A_i, x]."""
    return _d(x, i, h) + _br(f, A[i], x)


def field_strength(grp: GaugeGroupSpec, A: np.ndarray, h: float) -> np.ndarray:
    """F_ij, shape (D, D, N..., dim)."""
    f = grp.structure
    D = A.shape[0]
    F = np.zeros((D,) + A.shape)
    for i in range(D):
        for j in range(i + 1, D):
            F[i, j] = _d(A[j], i, h) - _d(A[i], j, h) + _br(f, A[i], A[j])
            F[j, i] = -F[i, j]
    return F


def linearized_field_strength(grp: GaugeGroupSpec, A: np.ndarray, a: np.ndarray, h: float) -> np.ndarray:
    """f_ij = D_i a_j - D_j a_i."""
    f = grp.structure
    D = A.shape[0]
    out = np.zeros((D,) + A.shape)
    for i in range(D):
        for j in range(i + 1, D):
            out[i, j] = _cov(f, A, a[j], i, h) - _cov(f, A, a[i], j, h)
            out[j, i] = -out[i, j]
    return out


def force(grp: GaugeGroupSpec, A: np.ndarray, h: float, F: np.ndarray | None = None) -> np.ndarray:
    """d_t E_i = D_j F_ji."""
    f = grp.structure
    F = field_strength(grp, A, h) if F is None else F
    D = A.shape[0]
    out = np.zeros_like(A)
    for i in range(D):
        for j in range(D):
            if j != i:
                out[i] += _cov(f, A, F[j, i], j, h)
    return out


def linearized_force(grp: GaugeGroupSpec, A: np.ndarray, a: np.ndarray, h: float,
                     F: np.ndarray | None = None) -> np.ndarray:
    """d_t e_i = D_j f_ji + [a_j, F_ji]."""
    f = grp.structure
    F = field_strength(grp, A, h) if F is None else F
    fl = linearized_field_strength(grp, A, a, h)
    D = A.shape[0]
    out = np.zeros_like(A)
    for i in range(D):
        for j in range(D):
            if j != i:
                out[i] += _cov(f, A, fl[j, i], j, h) + _br(f, a[j], F[j, i])
    return out


def gauss(grp: GaugeGroupSpec, A: np.ndarray, E: np.ndarray, h: float) -> np.ndarray:
    """D_i E_i, shape (N..., dim)."""
    f = grp.structure
    return sum(_cov(f, A, E[i], i, h) for i in range(A.shape[0]))


def linearized_gauss(grp: GaugeGroupSpec, A: np.ndarray, E: np.ndarray, p: LinearizedPair, h: float) -> np.ndarray:
    f = grp.structure
    return sum(_cov(f, A, p.e[i], i, h) + _br(f, p.a[i], E[i]) for i in range(A.shape[0]))


def magnetic(grp: GaugeGroupSpec, A: np.ndarray, h: float) -> np.ndarray:
    """B_i = 1/2 eps_ijk F_jk (three spatial dimensions)."""
    if A.shape[0] != 3:
        raise ConfigError("magnetic field needs D = 3")
    F = field_strength(grp, A, h)
    return np.stack([F[1, 2], F[2, 0], F[0, 1]])


def linearized_magnetic(grp: GaugeGroupSpec, A: np.ndarray, a: np.ndarray, h: float) -> np.ndarray:
    if A.shape[0] != 3:
        raise ConfigError("magnetic field needs D = 3")
    fl = linearized_field_strength(grp, A, a, h)
    return np.stack([fl[1, 2], fl[2, 0], fl[0, 1]])


def energy(state: LatticeGaugeState) -> float:
    """1/2 sum (E.E + 1/2 F_ij.F_ij) h^D."""
    F = field_strength(state.group, state.A, state.h)
    dens = 0.5 * (np.einsum("i...a,i...a->...", state.E, state.E) + 0.5 * np.einsum("ij...a,ij...a->...", F, F))
    return tree_sum(dens) * state.h ** state.D


# symplectic current ----------------------------------------------------------------

def pair_current(grp: GaugeGroupSpec, A: np.ndarray, p1: LinearizedPair, p2: LinearizedPair,
                 h: float, e1: np.ndarray | None = None, e2: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """(J^0, J^i) of two linearized solutions with a_0 = 0.

    J^0 = a1.e2 - a2.e1 and J^i = a2_j.f1_ij - a1_j.f2_ij.
    """
    e1 = p1.e if e1 is None else e1
    e2 = p2.e if e2 is None else e2
    j0 = np.einsum("i...a,i...a->...", p1.a, e2) - np.einsum("i...a,i...a->...", p2.a, e1)
    f1 = linearized_field_strength(grp, A, p1.a, h)
    f2 = linearized_field_strength(grp, A, p2.a, h)
    ji = np.einsum("j...a,ij...a->i...", p2.a, f1) - np.einsum("j...a,ij...a->i...", p1.a, f2)
    return j0, ji


def spatial_divergence(ji: np.ndarray, h: float) -> np.ndarray:
    return sum(_d(ji[i], i, h) for i in range(ji.shape[0]))


# evolution ---------------------------------------------------------------------------

@dataclass
class EvolutionResult:
    state: LatticeGaugeState
    pairs: list[LinearizedPair]
    gauss_history: np.ndarray                 # max |D_i E_i| at each integer step
    div_history: np.ndarray = field(default_factory=lambda: np.zeros(0))   # max |d_mu J^mu| at interior steps
    omega: np.ndarray = field(default_factory=lambda: np.zeros(0))   # slice integrals at integer times
    times: np.ndarray = field(default_factory=lambda: np.zeros(0))


def check_cfl(h: float, dt: float) -> None:
    if not dt > 0:
        raise ConfigError("time step must be positive")
    if dt > CFL_LIMIT * h:
        raise ConfigError(f"dt = {dt} exceeds the stability margin {CFL_LIMIT} h = {CFL_LIMIT * h}")


def leapfrog_evolve(state: LatticeGaugeState, dt: float, steps: int,
                    pairs: tuple[LinearizedPair, LinearizedPair] | None = None,
                    gauss_floor: float | None = None) -> EvolutionResult:
    """Advance ``steps`` steps of size ``dt``; inputs are not modified.

    With a pair of linearized solutions, the slice integral of J^0 is recorded
    at every integer time, together with the discrete divergence
    (J^0(n+1) - J^0(n-1)) / 2dt + d_i J^i(n) at interior integer steps.
    """
    check_cfl(state.h, dt)
    if steps < 0:
        raise ConfigError("steps must be non-negative")
    grp, h = state.group, state.h
    st = state.copy()
    ps = [p.copy() for p in pairs] if pairs else []
    vol = h ** st.D

    g0 = float(np.max(np.abs(gauss(grp, st.A, st.E, h))))
    floor = h * h * max(1e-3, float(np.max(np.abs(st.A)))) if gauss_floor is None else gauss_floor
    limit = GAUSS_GROWTH_LIMIT * max(g0, floor)
    gauss_hist = [g0]

    F = field_strength(grp, st.A, h)
    acc = force(grp, st.A, h, F)
    lacc = [linearized_force(grp, st.A, p.a, h, F) for p in ps]

    omegas, divs, times = [], [], []
    window: list[tuple[np.ndarray, np.ndarray]] = []

    def observe():
        j0, ji = pair_current(grp, st.A, ps[0], ps[1], h)
        omegas.append(tree_sum(j0) * vol)
        times.append(st.time)
        window.append((j0, ji))
        if len(window) == 3:
            (jm, _), (_, jic), (jp, _) = window
            div = (jp - jm) / (2 * dt) + spatial_divergence(jic, h)
            divs.append(float(np.max(np.abs(div))))
            window.pop(0)

    if ps:
        observe()
    for k in range(1, steps + 1):
        E_half = st.E + 0.5 * dt * acc
        e_half = [p.e + 0.5 * dt * la for p, la in zip(ps, lacc)]
        st.A = st.A + dt * E_half
        for p, eh in zip(ps, e_half):
            p.a = p.a + dt * eh
        F = field_strength(grp, st.A, h)
        acc = force(grp, st.A, h, F)
        lacc = [linearized_force(grp, st.A, p.a, h, F) for p in ps]
        st.E = E_half + 0.5 * dt * acc
        for p, eh, la in zip(ps, e_half, lacc):
            p.e = eh + 0.5 * dt * la
        st.step = state.step + k
        st.time = state.time + k * dt
        gk = float(np.max(np.abs(gauss(grp, st.A, st.E, h))))
        gauss_hist.append(gk)
        if not np.isfinite(gk) or gk > limit:
            raise InstabilityError(f"Gauss residual {gk:.3e} exceeds {GAUSS_GROWTH_LIMIT}x its reference {limit / GAUSS_GROWTH_LIMIT:.3e}")
        if ps:
            observe()
    return EvolutionResult(st, ps, np.array(gauss_hist), np.array(divs), np.array(omegas), np.array(times))


# initial data --------------------------------------------------------------------------

def grid_coordinates(D: int, N: int, L: float) -> np.ndarray:
    """Node coordinates, shape (D, N...)."""
    x = np.arange(N) * (L / N)
    return np.stack(np.meshgrid(*([x] * D), indexing="ij"))


@dataclass(frozen=True)
class SmoothData:
    """Sum of low Fourier modes: sum_m c_m cos(2 pi m.x / L) + s_m sin(2 pi m.x / L)."""
    modes: np.ndarray      # (M, D) integer wave numbers
    cos: np.ndarray        # (M, D, dim)
    sin: np.ndarray        # (M, D, dim)

    def sample(self, N: int, L: float) -> np.ndarray:
        D = self.modes.shape[1]
        x = grid_coordinates(D, N, L)
        out = np.zeros((D,) + (N,) * D + (self.cos.shape[-1],))
        for m, c, s in zip(self.modes, self.cos, self.sin):
            ph = 2 * np.pi * np.tensordot(m, x, axes=1) / L
            out += np.einsum("...,ia->i...a", np.cos(ph), c) + np.einsum("...,ia->i...a", np.sin(ph), s)
        return out


def random_smooth_data(rng: np.random.Generator, D: int, dim: int, amplitude: float = 0.1,
                       modes: int = 3, kmax: int = 1, wave_numbers: np.ndarray | None = None) -> SmoothData:
    """Random low-mode data with max |value| <= amplitude.

    ``wave_numbers`` fixes the mode set; pairs of fields on disjoint modes are
    orthogonal on the box, so variations should share the background's modes.
    """
    if wave_numbers is not None:
        ms = list(np.asarray(wave_numbers, int))
        modes = len(ms)
    else:
        ms = []
    while len(ms) < modes:
        m = rng.integers(-kmax, kmax + 1, size=D)
        if np.any(m):
            ms.append(m)
    c = rng.uniform(-1, 1, size=(modes, D, dim))
    s = rng.uniform(-1, 1, size=(modes, D, dim))
    scale = amplitude / (np.abs(c).sum(axis=0) + np.abs(s).sum(axis=0)).max()
    return SmoothData(np.array(ms), c * scale, s * scale)


def self_dual_state(grp: GaugeGroupSpec, A: np.ndarray, L: float, kappa: float = 1.0) -> LatticeGaugeState:
    """E = kappa B (D = 3), so Gauss holds up to the O(h^2) lattice Bianchi defect; E = 0 otherwise."""
    h = L / A.shape[1]
    E = kappa * magnetic(grp, A, h) if A.shape[0] == 3 else np.zeros_like(A)
    return LatticeGaugeState(grp, L, A, E)


def linearized_data(state: LatticeGaugeState, a: np.ndarray, kappa: float = 1.0,
                    lam: float = 0.0) -> LinearizedPair:
    """e = kappa dB[a] + lam B: the variation of E = kappa B along a and along kappa.

    Both pieces satisfy the linearized Gauss law up to the O(h^2) lattice
    Bianchi defect.  Pairs with lam = 0 only have vanishing mutual omega
    (the curl is symmetric), so at least one pair should carry lam != 0.
    """
    if state.D == 3:
        e = kappa * linearized_magnetic(state.group, state.A, a, state.h)
        if lam:
            e = e + lam * magnetic(state.group, state.A, state.h)
    else:
        e = np.zeros_like(a)
    return LinearizedPair(a, e)


# snapshots -------------------------------------------------------------------------------

SNAPSHOT_VERSION = 1


def save_snapshot(path: str | Path, state: LatticeGaugeState, dt: float,
                  pairs: list[LinearizedPair] | None = None) -> None:
    """Binary .npz snapshot; header records D, N, h, dt, group, L, time, step."""
    header = {"version": SNAPSHOT_VERSION, "D": state.D, "N": state.N, "h": state.h, "dt": dt,
              "group": state.group.name, "L": state.L, "time": state.time, "step": state.step,
              "pairs": len(pairs or [])}
    arrays = {"A": state.A, "E": state.E}
    for k, p in enumerate(pairs or []):
        arrays[f"a{k}"] = p.a
        arrays[f"e{k}"] = p.e
    with open(path, "wb") as fh:
        np.savez(fh, header=np.array(json.dumps(header, sort_keys=True)), **arrays)


def load_snapshot(path: str | Path) -> tuple[LatticeGaugeState, float, list[LinearizedPair]]:
    with np.load(path, allow_pickle=False) as z:
        header = json.loads(str(z["header"]))
        if header.get("version") != SNAPSHOT_VERSION:
            raise ConfigError(f"unsupported snapshot version {header.get('version')}")
        state = LatticeGaugeState(gauge_group(header["group"]), header["L"], z["A"].copy(), z["E"].copy(),
                                  header["time"], header["step"])
        pairs = [LinearizedPair(z[f"a{k}"].copy(), z[f"e{k}"].copy()) for k in range(header["pairs"])]
    if state.D != header["D"] or state.N != header["N"]:
        raise ConfigError("snapshot header does not match array shapes")
    return state, header["dt"], pairs
