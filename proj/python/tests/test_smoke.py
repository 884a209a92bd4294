"""Smoke tests for the torlevy python module: surface-level checks that the
bindings drive the same machinery the C++ suites verify in depth."""

import math

import numpy as np
import pytest

import torlevy as tl


@pytest.fixture
def grid():
    return tl.TorusGrid(1, 64)


def sample_sin(grid, k=1):
    x = np.array([grid.point(i)[0] for i in range(grid.n)])
    return tl.GridFunction.from_values(grid, np.sin(k * x).astype(complex))


def test_spectral_roundtrip(grid):
    f = sample_sin(grid, 3)
    spec = f.spectrum()
    assert abs(spec[3] - (-0.5j)) < 1e-12
    assert abs(spec[-3] - 0.5j) < 1e-12
    back = tl.GridFunction.from_values(grid, f.values())
    assert np.max(np.abs(back.values() - f.values())) < 1e-12


def test_lp_norm_closed_form(grid):
    f = sample_sin(grid)
    assert abs(tl.lp_norm(f, 2.0) - math.sqrt(math.pi)) < 1e-10


def test_translate_is_spectral_shift(grid):
    f = sample_sin(grid)
    g = tl.translate(f, [math.pi])
    assert np.max(np.abs(g.values() + f.values())) < 1e-12


def test_operator_matches_char_exponent(grid):
    nu = tl.stable_measure(1.5, [([1.0], 0.5), ([-1.0], 0.5)])
    f = sample_sin(grid, 2)
    out, _tail = tl.apply_operator(f, nu, tl.kernel_constant(1.0))
    psi = tl.char_exponent(nu, [2.0])
    assert abs(psi.imag) < 1e-8
    expected = psi.real * f.values()
    rel = np.max(np.abs(out.values() - expected)) / np.max(np.abs(expected))
    assert rel < 1e-4


def test_imex_constants_are_stationary(grid):
    nu = tl.stable_measure(1.2, [([1.0], 0.5), ([-1.0], 0.5)])
    c = tl.GridFunction.constant(grid, 2.0)
    prob = tl.Problem(grid, nu, tl.kernel_constant(1.0), c, 0.5, 2.0)
    solver = tl.CauchySolver(prob)
    sol = solver.solve_imex(16)
    assert (sol.final_state() - c).max_abs() < 1e-12
    report = solver.apriori_report(sol, 0)
    assert report["ratio"] >= 0.0


def test_hypothesis_violation_raises(grid):
    nu = tl.stable_measure(1.5, [([1.0], 1.0), ([-1.0], 1.0)])
    f = sample_sin(grid)
    with pytest.raises(tl.TorlevyHypothesisError):
        # p = 3 is the excluded exponent for alpha = 1.5
        tl.Problem(grid, nu, tl.kernel_constant(1.0), f, 0.5, 3.0)


def test_sampler_is_deterministic():
    nu = tl.stable_measure(0.8, [([1.0], 1.0)])
    cfg = tl.SamplerConfig()
    cfg.n_paths = 200
    cfg.r_cut = 0.2
    cfg.seed = 7
    a = tl.sample_increments(nu, cfg, 0.0, 1.0)
    b = tl.sample_increments(nu, cfg, 0.0, 1.0)
    assert np.array_equal(a, b)
    cfg.seed = 8
    c = tl.sample_increments(nu, cfg, 0.0, 1.0)
    assert not np.array_equal(a, c)


def test_nonlinear_energy_decreases(grid):
    theta0 = sample_sin(grid)
    sol = tl.solve_nonlinear(theta0, alpha=1.2, n_steps=50, horizon=0.2)
    energy = np.array(sol.energy)
    assert np.all(np.diff(energy) <= 1e-6 * energy[0])
    assert energy[-1] < energy[0]
