from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symplab import gravity as gr
from symplab import phase_space as ps
from symplab import yang_mills as ym
from symplab.errors import DomainError, PreconditionError
from symplab.jets import BumpField, constant_field, jet_of

U1 = ym.group("u1")
L = 2 * np.pi


def _zero_provider(pts):
    return np.zeros((len(pts), pts.shape[1]))


def test_tree_sum_is_order_independent_of_blocking():
    x = np.random.default_rng(0).normal(size=1001)
    assert ps.tree_sum(x) == pytest.approx(np.sum(x), rel=1e-13)
    assert ps.tree_sum([]) == 0.0
    assert ps.tree_sum(np.arange(10.0)) == 45.0


@given(st.lists(st.integers(-1000, 1000), min_size=1, max_size=200))
def test_tree_sum_exact_on_integers(xs):
    assert ps.tree_sum(np.array(xs, float)) == float(sum(xs))


def test_zero_current():
    assert ps.integrate_slice(_zero_provider, ps.SliceSpec(0.0, L, 8)).value == 0.0


def test_constant_density():
    sl = ps.SliceSpec(0.0, L, 16)

    def prov(pts):
        out = np.zeros((len(pts), 4))
        out[:, 0] = 0.5
        return out

    om = ps.integrate_slice(prov, sl)
    assert om.value == pytest.approx(0.5 * L ** 3, rel=1e-15)
    assert om.error == pytest.approx(0.0, abs=1e-12)


def test_slice_validation():
    with pytest.raises(DomainError):
        ps.SliceSpec(0.0, L, 4)
    with pytest.raises(ValueError):
        ps.OmegaValue(1.0, ps.SliceSpec(0.0, L, 8), -1.0)
    with pytest.raises(DomainError):
        ps.integrate_slice(lambda pts: np.zeros((len(pts), 2)), ps.SliceSpec(0.0, L, 8))


def _maxwell_pair(rng):
    w1 = ym.random_null_wave(rng, U1, 4, box=L)
    k = w1.k
    v = rng.normal(size=3)
    v -= (v @ k[1:]) / (k[1:] @ k[1:]) * k[1:]
    pol = np.zeros((4, 1))
    pol[1:, 0] = v
    w2 = ym.null_plane_wave(U1, k, pol, 1.1)
    A = constant_field(np.zeros((4, 1)), 4)

    def prov(pts):
        return ym.ym_current(U1, jet_of(A, pts), jet_of(w1, pts), jet_of(w2, pts))

    return prov, w1, w2


def test_plane_wave_omega_is_resolved_spectrally(rng):
    prov, _, _ = _maxwell_pair(rng)
    vals = [ps.integrate_slice(prov, ps.SliceSpec(0.3, L, N)).value for N in (8, 16, 32)]
    assert abs(vals[0]) > 1e-2
    assert abs(vals[1] - vals[2]) <= 1e-12 * abs(vals[2])


def test_maxwell_slice_independence(rng):
    prov, w1, w2 = _maxwell_pair(rng)
    period = 2 * np.pi / abs(w1.k[0])
    rep = ps.slice_independence(prov, [ps.SliceSpec(f * period, L, 16) for f in (0, 0.25, 0.5)])
    assert rep.passes(1e-10) and not rep.warnings


def test_gravity_slice_independence(rng):
    w1 = gr.random_tt_wave(rng, 4, box=L)
    w2 = gr.tt_wave(w1.k, np.asarray(w1.amplitude)[::1].T * 0.5, 1.0, 0.9)
    flat = gr.flat_metric_field(4)

    def prov(pts):
        return gr.gr_current(jet_of(flat, pts), jet_of(w1, pts), jet_of(w2, pts))

    period = 2 * np.pi / abs(w1.k[0])
    rep = ps.slice_independence(prov, [ps.SliceSpec(f * period, L, 8) for f in (0, 0.25, 0.5)], 1.0, 1.0)
    assert rep.passes(1e-10)


def test_off_shell_inputs_warn():
    rep = ps.slice_independence(_zero_provider, [ps.SliceSpec(t, L, 8) for t in (0, 1)], on_shell=False)
    assert rep.warnings and rep.deviation == 0.0
    with pytest.raises(PreconditionError):
        ps.slice_independence(_zero_provider, [ps.SliceSpec(0, L, 8)])


def test_ball_rule_volume_and_moments():
    for D, vol in ((1, 2.0), (2, np.pi), (3, 4 * np.pi / 3)):
        pts, w = ps.ball_rule(np.zeros(D), 1.0, D, 12)
        assert w.sum() == pytest.approx(vol, rel=1e-14)
        assert np.sum(w * pts[:, 0] ** 2) == pytest.approx(vol / (D + 2), rel=1e-13)
    with pytest.raises(DomainError):
        ps.ball_rule(np.zeros(4), 1.0, 4)


def _degeneracy(rng, amplitude):
    probe = ym.random_null_wave(rng, U1, 4, box=L)
    eps = BumpField(np.array([0.05, L / 2, L / 2 + 0.1, L / 2]), 0.4 * L, np.array([amplitude]))
    A = constant_field(np.zeros((4, 1)), 4)

    def prov(pts):
        Aj = jet_of(A, pts)
        return ym.ym_current(U1, Aj, ym.pure_gauge_variation(U1, Aj, eps), jet_of(probe, pts))

    return prov, eps


def test_gauge_direction_is_degenerate(rng):
    prov, eps = _degeneracy(rng, 1.3)
    sl = ps.SliceSpec(0.0, L, 16)
    rep = ps.degeneracy_check(prov, sl, eps, 1.0, 1.0, grid=True)
    assert rep.passes and abs(rep.omega.value) <= 1e-12
    assert rep.grid_value is not None


def test_zero_generator(rng):
    prov, eps = _degeneracy(rng, 0.0)
    rep = ps.degeneracy_check(prov, ps.SliceSpec(0.0, L, 8), eps, 1.0, 1.0)
    assert rep.omega.value == 0.0


def test_gravity_diffeo_direction_is_degenerate(rng):
    probe = gr.random_tt_wave(rng, 4, box=L)
    xi = BumpField(np.array([0.0, L / 2, L / 2, L / 2]), 0.4 * L, rng.normal(size=4))
    flat = gr.flat_metric_field(4)

    def prov(pts):
        g = jet_of(flat, pts)
        return gr.gr_current(g, gr.diffeo_variation(g, xi), jet_of(probe, pts))

    rep = ps.degeneracy_check(prov, ps.SliceSpec(0.0, L, 8), xi, 1.0, 1.0, order=12)
    assert abs(rep.omega.value) <= 1e-9


def test_degeneracy_preconditions(rng):
    prov, _ = _degeneracy(rng, 1.0)
    sl = ps.SliceSpec(0.0, L, 8)
    with pytest.raises(PreconditionError):
        ps.degeneracy_check(prov, sl, constant_field(np.ones(1), 4), 1.0, 1.0)
    edge = BumpField(np.array([0.0, 0.5, L / 2, L / 2]), 1.0, np.ones(1))
    with pytest.raises(PreconditionError):
        ps.degeneracy_check(prov, sl, edge, 1.0, 1.0)
    far = BumpField(np.array([10.0, L / 2, L / 2, L / 2]), 1.0, np.ones(1))
    assert ps.degeneracy_check(prov, sl, far, 1.0, 1.0).omega.value == 0.0


@settings(max_examples=10, deadline=None)
@given(st.floats(0.1, 1.0))
def test_slice_norm_is_max_norm(s):
    assert ps.slice_norm(np.array([[s, -2 * s]])) == pytest.approx(2 * s)
