import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from spherehhd.pointwise import (
    GridSpec,
    analyze_z,
    eval_Y,
    eval_Z,
    eval_gradY,
    legendre_norm,
    legendre_table,
    synthesize,
    synthesize_from_potentials,
)
from spherehhd.spectra import TangentField, ZSpectrum

from conftest import random_potentials

INTERIOR = [0.3, 1.1, 1.9, 2.7]


def test_legendre_constant():
    for x in (-0.9, 0.0, 0.7):
        assert legendre_norm(0, 0, x) == pytest.approx(math.sqrt(0.5), rel=1e-15)


def test_legendre_degree_one():
    assert legendre_norm(1, 0, 1.0) == pytest.approx(math.sqrt(1.5), rel=1e-15)
    assert legendre_norm(1, 0, 0.5) == pytest.approx(math.sqrt(1.5) * 0.5, rel=1e-14)


def test_legendre_sectorial_positive():
    # the Condon-Shortley phase is cancelled by the normalization prefactor
    for m in range(1, 6):
        assert legendre_norm(m, m, 0.3) > 0.0


def test_legendre_orthonormality_by_quadrature():
    x, w = np.polynomial.legendre.leggauss(32)
    for m in (0, 1, 3):
        tab = legendre_table(m, 20, x)
        gram = (tab * w) @ tab.T
        assert_allclose(gram, np.eye(tab.shape[0]), atol=1e-13)


def test_legendre_domain_errors():
    with pytest.raises(ValueError):
        legendre_norm(2, 3, 0.5)
    with pytest.raises(ValueError):
        legendre_norm(2, 1, 1.5)


def test_gauss_grid_integrates_polynomials_exactly():
    grid = GridSpec(12, 8)
    for k in range(2 * 12):
        exact = (1.0 - (-1.0) ** (k + 1)) / (k + 1)
        assert abs(np.sum(grid.weights * grid.x**k) - exact) < 1e-13


def test_eval_Y_constant_mode():
    for th in INTERIOR:
        assert eval_Y(0, 0, th, 1.3) == pytest.approx(0.28209479177387814, rel=1e-15)


def test_eval_Z_low_order():
    for th in INTERIOR:
        assert eval_Z(0, 1, th, 0.0) == pytest.approx(0.3989422804014327, rel=1e-15)


def test_eval_Y_index_error():
    with pytest.raises(ValueError):
        eval_Y(1, 2, 0.5, 0.5)
    with pytest.raises(ValueError):
        eval_Z(0, 2, 0.5, 0.5)


def test_z_orthonormal_on_sphere():
    n = 10
    grid = GridSpec.for_degree(n)
    modes = [(l, m) for m in range(-3, 4) for l in range(abs(abs(m) - 1), 5)]
    scale = 2 * np.pi / grid.n_phi
    for li, mi in modes:
        zi = eval_Z(li, mi, grid.theta[:, None], grid.phi[None, :])
        for lj, mj in modes:
            zj = eval_Z(lj, mj, grid.theta[:, None], grid.phi[None, :])
            val = float(np.sum(grid.weights[:, None] * zi * zj) * scale)
            expected = 1.0 if (li, mi) == (lj, mj) else 0.0
            assert abs(val - expected) < 1e-12


def test_gradient_zero_for_constant():
    th_comp, ph_comp = eval_gradY(0, 0, 1.0, 2.0)
    assert th_comp == 0.0 and ph_comp == 0.0


def test_gradient_matches_finite_differences(rng):
    h = 1e-5
    for _ in range(100):
        l = int(rng.integers(1, 9))
        m = int(rng.integers(-l, l + 1))
        th = float(rng.uniform(0.2, np.pi - 0.2))
        ph = float(rng.uniform(0.0, 2 * np.pi))
        gth, gph = eval_gradY(l, m, th, ph)
        fd_th = (eval_Y(l, m, th + h, ph) - eval_Y(l, m, th - h, ph)) / (2 * h)
        fd_ph = (eval_Y(l, m, th, ph + h) - eval_Y(l, m, th, ph - h)) / (2 * h) / math.sin(th)
        assert abs(gth - fd_th) < 1e-7
        assert abs(gph - fd_ph) < 1e-7


def test_gradient_specific_values():
    # central difference at a fixed interior point
    h = 1e-5
    gth, _ = eval_gradY(3, 2, 1.0, 0.3)
    fd = (eval_Y(3, 2, 1.0 + h, 0.3) - eval_Y(3, 2, 1.0 - h, 0.3)) / (2 * h)
    assert abs(gth - fd) < 1e-8
    # d/dphi cos(phi) vanishes at phi = 0
    _, gph = eval_gradY(1, 1, np.pi / 2, 0.0)
    assert abs(gph) < 1e-15


def test_gradient_pole_rejected():
    with pytest.raises(ValueError):
        eval_gradY(2, 1, 0.0, 0.3)


def test_synthesize_zero_field():
    grid = GridSpec.for_degree(4)
    vth, vph = synthesize(TangentField.zeros(4), grid)
    assert not np.any(vth) and not np.any(vph)


def test_synthesize_single_mode_matches_eval():
    n = 6
    field = TangentField.zeros(n)
    field.theta[3, 2] = 1.0
    grid = GridSpec.for_degree(n)
    vth, vph = synthesize(field, grid)
    expected = eval_Z(3, 2, grid.theta[:, None], grid.phi[None, :])
    assert_allclose(vth, expected, atol=1e-14)
    assert not np.any(vph)


def test_analyze_synthesize_roundtrip(rng):
    n = 10
    field = TangentField(ZSpectrum(n), ZSpectrum(n))
    field.theta.flat()[:] = rng.standard_normal(field.theta.size)
    field.phi.flat()[:] = rng.standard_normal(field.phi.size)
    grid = GridSpec.for_degree(n)
    vth, vph = synthesize(field, grid)
    back = analyze_z(vth, vph, grid, n)
    assert np.max(np.abs(back.theta.flat() - field.theta.flat())) < 1e-12
    assert np.max(np.abs(back.phi.flat() - field.phi.flat())) < 1e-12


def test_analyze_zero_samples():
    n = 5
    grid = GridSpec.for_degree(n)
    zero = np.zeros((grid.n_theta, grid.n_phi))
    out = analyze_z(zero, zero, grid, n)
    assert out.theta.norm() == 0.0 and out.phi.norm() == 0.0


def test_analyze_single_mode():
    n = 6
    grid = GridSpec.for_degree(n)
    samples = eval_Z(2, 1, grid.theta[:, None], grid.phi[None, :])
    out = analyze_z(samples, np.zeros_like(samples), grid, n)
    assert out.theta[2, 1] == pytest.approx(1.0, abs=1e-13)
    rest = out.theta.flat().copy()
    rest[np.abs(rest - 1.0) < 1e-10] = 0.0
    assert np.max(np.abs(rest)) < 1e-13


def test_under_resolved_grid_rejected():
    grid = GridSpec(4, 8)
    with pytest.raises(ValueError):
        analyze_z(np.zeros((4, 8)), np.zeros((4, 8)), grid, 6)
    with pytest.raises(ValueError):
        synthesize(TangentField.zeros(6), grid)


def test_synthesis_routes_agree():
    n = 12
    s, t = random_potentials(n, seed=31)
    grid = GridSpec.for_degree(n)
    from spherehhd.solver import differentiate

    via_field = synthesize(differentiate(s, t), grid)
    via_potentials = synthesize_from_potentials(s, t, grid)
    assert np.max(np.abs(via_field[0] - via_potentials[0])) < 1e-11
    assert np.max(np.abs(via_field[1] - via_potentials[1])) < 1e-11
    # a potentials pair dispatches to the second route
    vth, vph = synthesize((s, t), grid)
    assert np.array_equal(vth, via_potentials[0])
    assert np.array_equal(vph, via_potentials[1])
