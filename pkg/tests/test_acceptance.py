"""Acceptance suite: one test group per numbered criterion, tolerances pinned here.

Each check records itself with the ``criterion`` fixture, and the terminal summary
prints one PASS/FAIL line per criterion.  Literal readings that do not hold are
kept as strict xfails next to the relation that does hold.
"""

from __future__ import annotations

import time
from functools import lru_cache

import numpy as np
import pytest

from symplab import config
from symplab import gravity as gr
from symplab.adjoint import adjoint_identity_residual
from symplab.cli import main
from symplab.conventions import C_GR, C_YM
from symplab.jets import jet_of, random_points, random_polynomial
from symplab.scenarios import run_scenario

SAMPLES = 1000
TOL_YM_ADJOINT = 1e-10
TOL_GR_ADJOINT = 1e-9
TOL_FORMS = 1e-11
TOL_EXACTNESS = 1e-10
TOL_ANALYTIC_CONSERVATION = 1e-11
LATTICE_RATIO, LATTICE_RATIO_REL, MIN_ORDER, GAUSS_GROWTH = 4.0, 0.15, 1.8, 10.0
TOL_SLICE = 1e-10
TOL_DEGENERACY = 1e-9
TOL_TRIVIAL, TOL_ZERO_FORM = 1e-13, 1e-12
TOL_CLOSEDNESS = 1e-12
TOL_COMPOSITION = 1e-10
RUNTIME_YM, RUNTIME_GR = 10.0, 30.0


@lru_cache(maxsize=None)
def run(theory: str, check: str, points: int = SAMPLES, seed: int = 0, **extra):
    text = f"theory = {theory}\ncheck = {check}\nsampling.points = {points}\nsampling.seed = {seed}\n"
    text += "".join(f"{k.replace('_', '.')} = {v}\n" for k, v in extra.items())
    recs, dt = run_scenario(config.loads(text))
    return {r.name: r for r in recs}, dt


def _rel(diff, *terms) -> float:
    scale = max(1.0, *(float(np.max(np.abs(t))) for t in terms))
    return float(np.max(np.abs(diff))) / scale


@pytest.fixture(scope="module")
def gr_data():
    rng = np.random.default_rng(7)
    pts = random_points(rng, SAMPLES, 4)
    g = jet_of(gr.perturbed_metric_field(rng, 4), pts)
    h1, h2 = (jet_of(random_polynomial(rng, 4, (4, 4), symmetric=True), pts) for _ in range(2))
    return g, h1, h2


# 1 ------------------------------------------------------------------------------------

@pytest.mark.parametrize("theory,group", [("maxwell", "u1"), ("su2", "su2")])
def test_criterion_01_ym_adjoint_identity(criterion, theory, group):
    recs, dt = run(theory, "adjoint-identity")
    rec = recs["ym-adjoint"]
    assert rec.samples >= SAMPLES
    ok = rec.value <= TOL_YM_ADJOINT and dt <= RUNTIME_YM
    criterion(1, f"{group} residual {rec.value:.1e} in {dt:.1f}s", ok)
    assert ok


# 2 ------------------------------------------------------------------------------------

def test_criterion_02_einstein_adjoint_identity(criterion):
    recs, dt = run("gravity", "adjoint-identity")
    rec = recs["einstein-adjoint"]
    assert rec.samples >= SAMPLES
    ok = rec.value <= TOL_GR_ADJOINT and dt <= RUNTIME_GR
    criterion(2, f"factor-2 current residual {rec.value:.1e} in {dt:.1f}s", ok)
    assert ok


@pytest.mark.xfail(strict=True, reason="the unit-weight current has half the required divergence")
def test_criterion_02_unit_weight_current(criterion):
    rng = np.random.default_rng(0)
    g = gr.perturbed_metric_field(rng, 4)
    t = gr.gr_triple(4, factor=1.0)
    sym = [random_polynomial(rng, 4, (4, 4), symmetric=True) for _ in range(2)]
    rep = adjoint_identity_residual(t.op, t.adj, t.current, *sym, random_points(rng, SAMPLES, 4), background=g)
    assert criterion(2, f"unit-weight current residual {rep.max_rel:.1e}", rep.max_rel <= TOL_GR_ADJOINT)


# 3 ------------------------------------------------------------------------------------

def test_criterion_03_potential_forms(criterion, gr_data):
    g, h1, _ = gr_data
    s_form, gamma_form = gr.gr_potential(g, h1)
    r = _rel(s_form - gamma_form, s_form, gamma_form)
    assert criterion(3, f"potential forms {r:.1e}", r <= TOL_FORMS)


def test_criterion_03_measured_form_relations(gr_data):
    g, h1, h2 = gr_data
    s_form, gamma_form = gr.gr_current_s_form(g, h1, h2), gr.gr_current_gamma_form(g, h1, h2)
    r_current = _rel(s_form + gamma_form, s_form, gamma_form)
    T, _ = gr.t_tensor(g, h1)
    trace = np.einsum("pmn,pamn->pa", np.linalg.inv(g.value), T)
    _, theta = gr.gr_potential(g, h1)
    r_trace = _rel(trace + theta, trace, theta)
    assert r_current <= TOL_FORMS and r_trace <= TOL_FORMS


@pytest.mark.xfail(strict=True, reason="the two current forms agree only up to an overall sign")
def test_criterion_03_current_forms_literal(criterion, gr_data):
    g, h1, h2 = gr_data
    s_form, gamma_form = gr.gr_current_s_form(g, h1, h2), gr.gr_current_gamma_form(g, h1, h2)
    r = _rel(s_form - gamma_form, s_form, gamma_form)
    assert criterion(3, f"current forms literal {r:.1e}", r <= TOL_FORMS)


@pytest.mark.xfail(strict=True, reason="the trace of T equals minus the potential")
def test_criterion_03_t_trace_literal(criterion, gr_data):
    g, h1, _ = gr_data
    T, _ = gr.t_tensor(g, h1)
    trace = np.einsum("pmn,pamn->pa", np.linalg.inv(g.value), T)
    _, theta = gr.gr_potential(g, h1)
    r = _rel(trace - theta, trace, theta)
    assert criterion(3, f"T trace literal {r:.1e}", r <= TOL_FORMS)


# 4 ------------------------------------------------------------------------------------

def test_criterion_04_exactness(criterion):
    assert (C_YM, C_GR) == (1.0, 0.5)
    checks = [("u1", run("maxwell", "exactness")[0]["exactness"]),
              ("su2", run("su2", "exactness")[0]["exactness"])]
    recs, _ = run("gravity", "exactness")
    checks += [("gr flat", recs["exactness-flat"]), ("gr perturbed", recs["exactness-perturbed"])]
    ok = True
    for label, rec in checks:
        ok &= criterion(4, f"{label} {rec.value:.1e}", rec.value <= TOL_EXACTNESS and rec.samples >= SAMPLES)
    assert ok


# 5 ------------------------------------------------------------------------------------

def test_criterion_05_analytic_conservation(criterion):
    pw = run("maxwell", "conservation")[0]["plane-wave-pair"]
    tt = run("gravity", "conservation")[0]["tt-pair"]
    ok = criterion(5, f"maxwell pair {pw.value:.1e}", pw.value <= TOL_ANALYTIC_CONSERVATION)
    ok &= criterion(5, f"tt pair {tt.value:.1e}", tt.value <= TOL_ANALYTIC_CONSERVATION)
    assert ok and pw.samples >= SAMPLES and tt.samples >= SAMPLES


# 6 ------------------------------------------------------------------------------------

def test_criterion_06_lattice_conservation(criterion):
    recs, _ = run("su2", "conservation", seed=11, grid_N=16)
    div, gauss = recs["lattice-divergence"], recs["gauss-growth"]
    ratio = div.value
    ok = criterion(6, f"N 16->32 ratio {ratio:.2f}", abs(ratio / LATTICE_RATIO - 1) <= LATTICE_RATIO_REL)
    ok &= criterion(6, f"order {np.log2(ratio):.2f}", np.log2(ratio) >= MIN_ORDER)
    ok &= criterion(6, f"gauss growth {gauss.value:.2f}", gauss.value <= GAUSS_GROWTH)
    assert ok


# 7 ------------------------------------------------------------------------------------

def test_criterion_07_slice_independence(criterion):
    ok = True
    for theory in ("maxwell", "gravity"):
        rec = run(theory, "slice-independence")[0]["slice-omega"]
        assert rec.samples >= 3
        ok &= criterion(7, f"{theory} {rec.value:.1e}", rec.value <= TOL_SLICE)
    lat = run("su2", "slice-independence", seed=11, grid_N=16)[0]["lattice-omega"]
    # omega is a discrete invariant of the scheme, so its deviation sits at roundoff on both grids
    saturated = lat.order == "saturated"
    ok &= criterion(7, "lattice " + ("saturated" if saturated else f"order {lat.order:.2f}"),
                    saturated or lat.order >= MIN_ORDER)
    assert ok


# 8 ------------------------------------------------------------------------------------

def test_criterion_08_degeneracy(criterion):
    ok = True
    for theory in ("maxwell", "gravity"):
        rec = run(theory, "degeneracy")[0]["degeneracy"]
        ok &= criterion(8, f"{theory} {rec.value:.1e}", rec.value <= TOL_DEGENERACY)
    assert ok


# 9 ------------------------------------------------------------------------------------

def test_criterion_09_trivial_currents(criterion):
    triv = run("gravity", "conservation")[0]["trivial-pair"]
    zf = run("maxwell", "zero-form")[0]["zero-form"]
    ok = criterion(9, f"trivial pair {triv.value:.1e}", triv.value <= TOL_TRIVIAL)
    ok &= criterion(9, f"zero-form {zf.value:.1e}", zf.value <= TOL_ZERO_FORM)
    assert ok


# 10 -----------------------------------------------------------------------------------

def test_criterion_10_closedness(criterion):
    ok = True
    for theory in ("maxwell", "su2", "gravity"):
        rec = run(theory, "exactness")[0]["closedness"]
        ok &= criterion(10, f"{theory} {rec.value:.1e}", rec.value <= TOL_CLOSEDNESS and rec.samples >= SAMPLES)
    assert ok


# 11 -----------------------------------------------------------------------------------

def test_criterion_11_composition(criterion):
    rec = run("reference-dalembert", "adjoint-identity")[0]["composition"]
    assert criterion(11, f"composed box {rec.value:.1e}", rec.value <= TOL_COMPOSITION and rec.samples >= SAMPLES)


# 12 -----------------------------------------------------------------------------------

def test_criterion_12_determinism(criterion, tmp_path, monkeypatch):
    cfg = tmp_path / "s.cfg"
    cfg.write_text("theory = su2\ncheck = conservation\ngrid.N = 8\nsampling.seed = 5\n"
                   "output.report = r.json\noutput.csv = r.csv\n")
    blobs = []
    for i in range(2):
        monkeypatch.setenv("SYMPLAB_OUTPUT_DIR", str(tmp_path / str(i)))
        main(["run", str(cfg)])
        blobs.append(tuple((tmp_path / str(i) / f).read_bytes() for f in ("r.json", "r.csv")))
    assert criterion(12, "su2 lattice report and csv byte-identical", blobs[0] == blobs[1])
