import numpy as np
import pytest
from numpy.testing import assert_allclose

from spherehhd.operators import (
    BandedMatrix,
    build_A,
    build_B,
    build_order_system,
    cscy_to_z,
    shuffle_permutation,
    z_to_cscy,
)
from spherehhd.pointwise import eval_Y, eval_Z
from spherehhd.recurrences import alpha, beta, delta
from spherehhd.solver import differentiate

from conftest import random_potentials


def test_banded_matrix_basics():
    mat = BandedMatrix(4, 3, lower_bw=1, upper_bw=1)
    mat.set_diagonal(0, [1.0, 2.0, 3.0])
    mat.set_diagonal(1, [4.0, 5.0, 6.0])
    dense = mat.toarray()
    x = np.array([1.0, 1.0, 1.0])
    assert_allclose(mat.matvec(x), dense @ x)
    assert mat.entry(3, 0) == 0.0  # outside the band
    with pytest.raises(IndexError):
        mat.entry(4, 0)


def test_build_A_values_n3_m1():
    expected = np.array([[0.0, -1.3416407864998738], [0.4472135954999579, 0.0], [0.0, 0.9561828874675149]])
    assert_allclose(build_A(3, 1).toarray(), expected, atol=1e-15)


def test_build_A_smallest_system():
    assert_allclose(build_A(2, 1).toarray(), [[0.0], [0.4472135954999579]], atol=1e-15)


@pytest.mark.parametrize("n,m", [(5, 1), (9, 4), (17, 16), (12, 3)])
def test_build_A_zero_main_diagonal(n, m):
    dense = build_A(n, m).toarray()
    assert not np.any(np.diagonal(dense))
    assert dense.shape == (n + 1 - m, n - m)


def test_build_A_order_zero_shape():
    a0 = build_A(6, 0)
    assert a0.shape == (7, 5)
    dense = a0.toarray()
    # columns are potential degrees 1..5; each column couples degrees l' -/+ 1
    for j, lp in enumerate(range(1, 6)):
        nz = np.nonzero(dense[:, j])[0]
        assert list(nz) == [lp - 1, lp + 1]


def test_build_B_structure():
    assert_allclose(build_B(4, 2).toarray(), [[2.0, 0.0], [0.0, 2.0], [0.0, 0.0]])
    assert_allclose(build_B(2, 1).toarray(), [[1.0], [0.0]])
    assert_allclose(build_B(5, 4).toarray(), [[4.0], [0.0]])


def test_build_domain_errors():
    with pytest.raises(ValueError):
        build_A(4, 4)
    with pytest.raises(ValueError):
        build_B(4, 0)
    with pytest.raises(ValueError):
        build_B(4, 4)


def test_shuffle_permutation_examples():
    # 0-based equivalents of collecting odd 1-based indices before even ones
    assert list(shuffle_permutation(6)) == [0, 2, 4, 1, 3, 5]
    assert list(shuffle_permutation(2)) == [0, 1]
    assert list(shuffle_permutation(8)) == [0, 2, 4, 6, 1, 3, 5, 7]
    with pytest.raises(ValueError):
        shuffle_permutation(5)


def test_order_system_pentadiagonal():
    system = build_order_system(3, 1)
    assert system.shuffled.shape == (6, 4)
    lower, upper = system.shuffled.bandwidths_used()
    assert lower <= 2 and upper <= 2


def test_order_system_matches_blocks_small():
    system = build_order_system(2, 1)
    a = system.A.toarray()
    b = system.B.toarray()
    dense = np.block([[a, b], [b, a]])
    expected = np.array(
        [[0.0, 1.0], [0.4472135954999579, 0.0], [1.0, 0.0], [0.0, 0.4472135954999579]]
    )
    assert_allclose(dense, expected, atol=1e-15)


@pytest.mark.parametrize("n,m", [(5, 2), (9, 1), (9, 8), (16, 7)])
def test_order_system_scatter_identity(n, m):
    system = build_order_system(n, m)
    a = system.A.toarray()
    b = system.B.toarray()
    dense = np.block([[a, b], [b, a]])
    shuffled = system.shuffled.toarray()
    # interleaving scatters entry (i, j) of the block system to
    # (perm_rows[i], perm_cols[j]) of the pentadiagonal system
    assert np.array_equal(shuffled[np.ix_(system.perm_rows, system.perm_cols)], dense)


def test_z_to_cscy_zero():
    assert not np.any(z_to_cscy(np.zeros(9), 1, 8))


def test_z_to_cscy_unit_vector():
    # unit tangential coefficient at degree 0, order 1 feeds only degree 1
    n = 3
    z = np.zeros(n + 1)
    z[0] = 1.0
    w = z_to_cscy(z, 1, n)
    expected = np.zeros(n)
    expected[0] = beta(0, 1)
    assert_allclose(w, expected, atol=1e-16)
    assert expected[0] == pytest.approx(np.sqrt(2 / 3), rel=1e-15)


def test_z_to_cscy_length_check():
    with pytest.raises(ValueError):
        z_to_cscy(np.zeros(5), 1, 8)
    with pytest.raises(ValueError):
        cscy_to_z(np.zeros(5), 1, 8)


def test_cscy_to_z_zero():
    assert not np.any(cscy_to_z(np.zeros(8), 1, 8))


def test_cscy_to_z_unit_top_degree():
    # a unit csc-harmonic coefficient at the top degree n enters through the
    # square parity chain: the top equation forces z_{n-1} = 1/beta(n-1),
    # and the lower equations cascade down that chain
    n, m = 6, 1
    w = np.zeros(n - m + 1)
    w[-1] = 1.0
    z = cscy_to_z(w, m, n)
    assert z[(n - 1) - (m - 1)] == pytest.approx(1.0 / beta(n - 1, m), rel=1e-15)
    expected = np.zeros(n - m + 2)
    expected[5] = 1.0 / beta(5, 1)
    expected[3] = -alpha(5, 1) * expected[5] / beta(3, 1)
    expected[1] = -alpha(3, 1) * expected[3] / beta(1, 1)
    assert_allclose(z, expected, atol=1e-15)
    # the conversion is exactly invertible on this data: no tail is dropped
    assert_allclose(z_to_cscy(z, m, n), w, atol=1e-15)


@pytest.mark.parametrize("n", [4, 8, 16, 33, 64])
def test_conversion_exact_on_differentiated_data(n):
    s, t = random_potentials(n, seed=n)
    field = differentiate(s, t)
    for comp in (field.theta, field.phi):
        for m in comp.orders():
            if abs(m) > n - 1:
                continue
            z = comp.order_slice(m)
            w = z_to_cscy(z, m, n)
            z2 = cscy_to_z(w, m, n)
            scale = max(1.0, np.max(np.abs(z)))
            assert np.max(np.abs(z2 - z)) / scale < 1e-12


def test_roundtrip_on_exact_data_order_two():
    n = 8
    s, t = random_potentials(n, seed=77)
    field = differentiate(s, t)
    z = field.theta.order_slice(2)
    w = z_to_cscy(z, 2, n)
    z2 = cscy_to_z(w, 2, n)
    assert np.max(np.abs(z2 - z)) < 1e-13


def test_pointwise_conversion_identity_with_tail(rng):
    # sum_l z_l Z_{l,1} == sum_l w_l cscY_{l,1} + beta(n,1) z_n cscY_{n+1,1}
    n, m = 8, 1
    z = rng.standard_normal(n - abs(m - 1) + 1)
    w = z_to_cscy(z, m, n)
    for th in np.linspace(0.2, np.pi - 0.2, 20):
        ph = 0.7
        lhs = sum(z[k] * eval_Z(abs(m - 1) + k, m, th, ph) for k in range(len(z)))
        csc = 1.0 / np.sin(th)
        rhs = sum(w[k] * eval_Y(m + k, m, th, ph) * csc for k in range(len(w)))
        rhs += beta(n, m) * z[-1] * eval_Y(n + 1, m, th, ph) * csc
        assert abs(lhs - rhs) < 1e-12


def test_pointwise_single_mode_identity():
    # Z_{l,m} = alpha cscY_{l-1,m} + beta cscY_{l+1,m} at interior nodes (|m| >= 1)
    for th in np.linspace(0.15, np.pi - 0.15, 7):
        csc = 1.0 / np.sin(th)
        for m in (1, 2, 5, -1, -3):
            mu = abs(m)
            for l in range(max(mu - 1, 1), 9):
                rhs = beta(l, mu) * eval_Y(l + 1, m, th, 0.4) * csc
                if l - 1 >= mu:
                    rhs += alpha(l, mu) * eval_Y(l - 1, m, th, 0.4) * csc
                assert abs(eval_Z(l, m, th, 0.4) - rhs) < 1e-13


def test_pointwise_identity_sign_flips_at_order_zero():
    # at m = 0 the tangential basis uses order-one Legendre functions and the
    # recurrence coefficients produce the negated combination
    for th in (0.4, 1.3, 2.2):
        csc = 1.0 / np.sin(th)
        for l in (1, 2, 4, 7):
            rhs = alpha(l, 0) * eval_Y(l - 1, 0, th, 0.0) * csc
            rhs += beta(l, 0) * eval_Y(l + 1, 0, th, 0.0) * csc
            assert abs(eval_Z(l, 0, th, 0.0) + rhs) < 1e-13


def test_m_zero_conversion_roundtrip():
    n = 9
    s, t = random_potentials(n, seed=13)
    field = differentiate(s, t)
    z = field.theta.order_slice(0)
    w = z_to_cscy(z, 0, n)
    z2 = cscy_to_z(w, 0, n)
    assert np.max(np.abs(z2 - z)) < 1e-13


def test_delta_consistency_in_A():
    # subdiagonal of A holds the higher-degree derivative coefficients
    a = build_A(6, 2).toarray()
    for j, lp in enumerate(range(2, 6)):
        assert a[j + 1, j] == pytest.approx(delta(lp, 2), rel=1e-15)


def _chain_solve_reference(w, m, n):
    """Naive sequential substitution, for cross-checking the vectorized scan."""
    mu = abs(m)
    if mu == 0:
        z = np.zeros(n)
        for l in range(1, n + 1):  # bottom-up, both parities interleaved
            acc = -w[l - 1]
            if l - 2 >= 1:
                acc -= beta(l - 2, 0) * z[l - 3]
            z[l - 1] = acc / alpha(l, 0)
        return z
    z = np.zeros(n - mu + 2)
    for l in range(n, mu - 2, -1):  # top-down
        if l + 1 > n:
            continue  # free top coefficient of the deficient chain stays zero
        acc = w[l + 1 - mu]
        if l + 2 <= n:
            acc -= alpha(l + 2, mu) * z[l + 2 - (mu - 1)]
        z[l - (mu - 1)] = acc / beta(l, mu)
    return z


@pytest.mark.parametrize("n,m", [(8, 1), (8, 0), (9, 3), (40, 1), (401, 350), (128, 127)])
def test_vectorized_chain_matches_reference(n, m, rng):
    # includes a long high-order chain whose scan products underflow to zero
    length = n + 1 if m == 0 else n - abs(m) + 1
    w = rng.standard_normal(length)
    fast = cscy_to_z(w, m, n)
    slow = _chain_solve_reference(w, m, n)
    assert_allclose(fast, slow, rtol=1e-12, atol=1e-12)
