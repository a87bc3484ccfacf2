import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import toeplitz

from nqdecoherence.core import DeformationBath, OhmicFermionicBath, PiezoBath, RegisterGeometry
from nqdecoherence.decay import (DecayProfile, cache_size, clear_cache, decay_profile,
                                 e_factor, e_tilde_factor, kernel_at, q1_r, q1_secular_rate,
                                 q2_r, q_fermionic, q_fermionic_closed, sin_minus_x,
                                 toeplitz_form, toeplitz_quadratic)
from nqdecoherence.errors import DomainError
from nqdecoherence.quadrature import QuadratureConfig

# Toy problem (c_L = 1, q0 = 0.5, d = 4, g = 1, omega_c = 1).  Reference
# values from 30-digit mpmath quadrature split at the oscillation nodes.
TOY_REFERENCE = {
    (2, 0, 1.0): 0.12025202884329818,
    (1, 0, 1.0): -0.13399291289066879,
    (2, 1, 1.0): 0.0016546116334667913,
    (1, 1, 1.0): -0.00013026561068771486,
    (2, 2, 3.0): 0.0010958501481251125,
    (1, 2, 3.0): -7.2725041911733357e-5,
    (2, 1, 6.0): 0.025825416806777006,
}
# same toy problem at beta = 2
TOY_REFERENCE_WARM = {(0, 1.0): 0.13189237830943089, (1, 6.0): 0.068875660687131816}
# deformation coupling with omega_s^2 = 1
TOY_DEFORMATION = {(2, 0, 2.0): 0.52, (1, 1, 5.0): -0.0098763627973372592}


def kernel(which):
    return q2_r if which == 2 else q1_r


@pytest.mark.parametrize("key", sorted(TOY_REFERENCE))
def test_toy_kernels(toy_geometry, toy_piezo, key):
    which, r, t = key
    assert kernel(which)(toy_piezo, toy_geometry, r, t) == pytest.approx(TOY_REFERENCE[key],
                                                                         rel=1e-9)


@pytest.mark.parametrize("key", sorted(TOY_REFERENCE_WARM))
def test_toy_kernels_finite_temperature(toy_geometry, key):
    bath = PiezoBath(g=1.0, omega_c=1.0, temperature=7.64e-12 / 2)
    r, t = key
    assert q2_r(bath, toy_geometry, r, t) == pytest.approx(TOY_REFERENCE_WARM[key], rel=1e-9)


@pytest.mark.parametrize("key", sorted(TOY_DEFORMATION))
def test_toy_deformation(toy_geometry, key):
    bath = DeformationBath(omega_s_sq=1.0, omega_c=1.0)
    which, r, t = key
    assert kernel(which)(bath, toy_geometry, r, t) == pytest.approx(TOY_DEFORMATION[key],
                                                                    rel=1e-9)


@pytest.mark.parametrize("r", [0, 1, 5])
def test_zero_time(toy_geometry, toy_piezo, r):
    geom = toy_geometry.with_n(10)
    assert q2_r(toy_piezo, geom, r, 0.0) == 0.0
    assert q1_r(toy_piezo, geom, r, 0.0) == 0.0


def test_figure_scale_plateau(fig_geometry, fig_piezo):
    q = q2_r(fig_piezo, fig_geometry, 0, 100e-12)
    # 25-digit mpmath value of the same integral
    assert q == pytest.approx(0.004138245, rel=1e-6)
    assert 5 < 2 * fig_geometry.n_qubits * q < 100


def test_phase_kernels_decrease_with_r(fig_geometry, fig_piezo):
    for t in (10e-12, 50e-12, 100e-12):
        mags = [abs(q1_r(fig_piezo, fig_geometry, r, t)) for r in (1, 2, 3)]
        assert mags[0] > mags[1] > mags[2]


def test_decay_kernels_decrease_beyond_r2(fig_geometry, fig_piezo):
    for t in (1e-12, 10e-12, 50e-12, 100e-12):
        mags = [abs(q2_r(fig_piezo, fig_geometry, r, t)) for r in range(2, 12)]
        assert all(b <= a * (1 + 1e-8) for a, b in zip(mags, mags[1:]))


def test_temperature_monotone(toy_geometry):
    values = [q2_r(PiezoBath(g=1.0, omega_c=1.0, temperature=T), toy_geometry, 0, 2.0)
              for T in (0.0, 1e-12, 4e-12, 2e-11)]
    assert all(b >= a for a, b in zip(values, values[1:]))


def test_q1_ignores_temperature(toy_geometry):
    cold = q1_r(PiezoBath(g=1.0, omega_c=1.0), toy_geometry, 1, 3.0)
    warm = q1_r(PiezoBath(g=1.0, omega_c=1.0, temperature=1e-11), toy_geometry, 1, 3.0)
    assert cold == warm


def test_secular_rate(toy_geometry, toy_piezo):
    rate = q1_secular_rate(toy_piezo, toy_geometry, 0)
    t = 400.0
    # what is left after removing -t * rate stays bounded while t * rate grows
    remainder = q1_r(toy_piezo, toy_geometry, 0, t) + t * rate
    assert abs(remainder) < 1e-2 * t * rate


def test_kernel_sign_extension(toy_geometry, toy_piezo):
    assert kernel_at(toy_piezo, toy_geometry, 2, 1, -2.0) == q2_r(toy_piezo, toy_geometry, 1, 2.0)
    assert kernel_at(toy_piezo, toy_geometry, 1, 1, -2.0) == -q1_r(toy_piezo, toy_geometry, 1, 2.0)


def test_domain_errors(toy_geometry, toy_piezo):
    with pytest.raises(DomainError):
        q2_r(toy_piezo, toy_geometry, 0, -1.0)
    with pytest.raises(DomainError):
        q2_r(OhmicFermionicBath(), toy_geometry, 0, 1.0)
    with pytest.raises(DomainError):
        q1_r(toy_piezo, toy_geometry, -1, 1.0)


# -- fermionic kernels ------------------------------------------------------

def test_fermionic_examples():
    assert q_fermionic(1.0, 1.0, 0.0, 3.0, 2) == pytest.approx(0.5 * math.log(10), rel=1e-12)
    assert q_fermionic(1.0, 1.0, 0.0, 1.0, 1) == pytest.approx(math.pi / 4 - 1, rel=1e-12)
    assert q_fermionic(1.0, 1.0, 0.0, 0.0, 2) == 0.0
    assert q_fermionic(1.0, 1.0, 0.0, 0.0, 1) == 0.0


@pytest.mark.parametrize("temperature", [7.64e-12 / 2, 7.64e-12 * 3])
@pytest.mark.parametrize("t", [0.3, 3.0, 10.0])
def test_fermionic_closed_form_finite_temperature(temperature, t):
    quad = q_fermionic(1.0, 1.0, temperature, t, 2, method="quadrature")
    assert quad == pytest.approx(q_fermionic_closed(1.0, 1.0, temperature, t, 2), rel=1e-10)


def test_fermionic_auto_switches_to_closed_form():
    t = 1e-10
    auto = q_fermionic(9.3e-8, 1.3e15, 0.0, t, 2)
    assert auto == q_fermionic_closed(9.3e-8, 1.3e15, 0.0, t, 2)


def test_fermionic_bad_method():
    with pytest.raises(DomainError):
        q_fermionic(1.0, 1.0, 0.0, 1.0, 2, method="guess")


# -- profiles ----------------------------------------------------------------

def test_profile_single_qubit(toy_geometry, toy_piezo):
    p = decay_profile(toy_piezo, toy_geometry.with_n(1), 1.0)
    assert p.q2.shape == (1,)
    assert p.matrix(2)[0, 0] == 2 * q2_r(toy_piezo, toy_geometry, 0, 1.0)
    assert p.matrix(1)[0, 0] == 2 * q1_r(toy_piezo, toy_geometry, 0, 1.0)


def test_profile_matrix_against_jordan_powers(toy_geometry, toy_piezo):
    p = decay_profile(toy_piezo, toy_geometry, 2.0, truncate=False)
    jordan = np.eye(3, k=1)
    for m in (1, 2):
        q = p.q(m)
        dense = q[0] * (np.eye(3) + np.eye(3))
        for r in (1, 2):
            jr = np.linalg.matrix_power(jordan, r)
            dense = dense + 2 * q[r] * (jr + jr.T)
        np.testing.assert_allclose(p.matrix(m), dense, rtol=0, atol=1e-15)


def test_profile_zero_time(toy_geometry, toy_piezo):
    p = decay_profile(toy_piezo, toy_geometry, 0.0)
    assert not np.any(p.matrix(1)) and not np.any(p.matrix(2))


def test_fermionic_profile_is_diagonal(toy_geometry):
    bath = OhmicFermionicBath(eta=0.1, omega_c_f=1.0)
    p = decay_profile(bath, toy_geometry, 2.0)
    q2f = q_fermionic(0.1, 1.0, 0.0, 2.0, 2)
    np.testing.assert_allclose(p.matrix(2), 8 * q2f * np.eye(3), rtol=1e-15)


def test_truncation_records_r_max(fig_geometry, fig_piezo):
    geom = fig_geometry.with_n(80)
    trunc = decay_profile(fig_piezo, geom, 5e-12)
    full = decay_profile(fig_piezo, geom, 5e-12, truncate=False)
    assert 0 < trunc.r_max < 79 and trunc.truncated
    assert full.r_max == 79
    ones = np.ones(80)
    assert toeplitz_quadratic(trunc, 2, ones, ones) == pytest.approx(
        toeplitz_quadratic(full, 2, ones, ones), rel=1e-8)


def test_truncation_respects_light_cone(fig_geometry, fig_piezo):
    # at 1 ns the phonon front has crossed 12 spacings
    p = decay_profile(fig_piezo, fig_geometry.with_n(40), 1e-9)
    assert p.r_max >= 15


# -- Toeplitz forms ----------------------------------------------------------

def test_most_offdiagonal_form(fig_geometry, fig_piezo):
    geom = fig_geometry.with_n(50)
    p = decay_profile(fig_piezo, geom, 5e-12)
    two = 2 * np.ones(50)
    lam = 0.25 * toeplitz_quadratic(p, 2, two, two)
    assert lam == pytest.approx(2 * 50 * p.q2[0] * (1 + e_factor(p)), rel=1e-12)


def test_orthogonal_vectors_with_diagonal_kernel():
    q = np.array([0.7, 0.0, 0.0, 0.0])
    assert toeplitz_form(q, [1, 0, 1, 0], [0, 1, 0, -1]) == 0.0


@settings(max_examples=30)
@given(st.integers(0, 2 ** 31))
def test_form_against_dense(seed):
    rng = np.random.default_rng(seed)
    q, x, y = rng.normal(size=(3, 5))
    dense = x @ (2 * toeplitz(q)) @ y
    assert toeplitz_form(q, x, y) == pytest.approx(dense, rel=1e-12, abs=1e-12)


def test_form_dimension_mismatch():
    with pytest.raises(DomainError):
        toeplitz_form([1.0, 0.5], [1, 1, 1], [1, 1])


def test_form_symmetric_for_decay_kernel(toy_geometry, toy_piezo):
    p = decay_profile(toy_piezo, toy_geometry, 1.5)
    x, y = np.array([1.0, -2.0, 0.5]), np.array([0.3, 0.1, -1.0])
    assert toeplitz_quadratic(p, 2, x, y) == pytest.approx(toeplitz_quadratic(p, 2, y, x),
                                                           rel=1e-14)


def test_decay_form_nonnegative(toy_geometry, toy_piezo):
    geom = toy_geometry.with_n(8)
    rng = np.random.default_rng(7)
    for t in (0.5, 3.0, 20.0):
        p = decay_profile(toy_piezo, geom, t, truncate=False)
        for _ in range(200):
            x = rng.normal(size=8)
            assert toeplitz_quadratic(p, 2, x, x) >= 0
        assert np.linalg.eigvalsh(p.matrix(2)).min() > -1e-14


# -- e factors ---------------------------------------------------------------

def test_e_factors_single_qubit(toy_geometry, toy_piezo):
    p = decay_profile(toy_piezo, toy_geometry.with_n(1), 1.0)
    assert e_factor(p) == 0.0 and e_tilde_factor(p) == 0.0


def test_e_tilde_below_one_at_10ps(fig_geometry, fig_piezo):
    p = decay_profile(fig_piezo, fig_geometry, 10e-12)
    assert abs(e_factor(p)) <= e_tilde_factor(p) < 1


def test_e_factors_need_positive_time(toy_geometry, toy_piezo):
    p = decay_profile(toy_piezo, toy_geometry, 0.0)
    with pytest.raises(DomainError):
        e_factor(p)
    with pytest.raises(DomainError):
        e_tilde_factor(p)


@given(st.lists(st.floats(-1, 1), min_size=2, max_size=12))
def test_e_bounded_by_e_tilde(tail):
    q2 = np.array([1.0] + tail)
    p = DecayProfile(1.0, np.zeros_like(q2), q2, len(q2) - 1)
    assert abs(e_factor(p)) <= e_tilde_factor(p) + 1e-15


# -- cache -------------------------------------------------------------------

def test_cache_concurrent_consistency(toy_geometry):
    clear_cache()
    bath = PiezoBath(g=0.7, omega_c=1.3)
    args = [(r, t) for r in range(3) for t in (0.5, 1.0, 2.0)] * 4
    with ThreadPoolExecutor(4) as pool:
        first = list(pool.map(lambda a: q2_r(bath, toy_geometry, *a), args))
    serial = [q2_r(bath, toy_geometry, *a) for a in args]
    assert first == serial
    assert cache_size() == 9


def test_cache_shared_across_register_sizes(toy_piezo):
    clear_cache()
    small = RegisterGeometry(3, 0.5, 4.0, 1.0)
    q2_r(toy_piezo, small, 1, 1.25)
    before = cache_size()
    q2_r(toy_piezo, small.with_n(30), 1, 1.25)
    assert cache_size() == before


def test_sin_minus_x_series_matches_direct():
    x = np.array([0.099, 0.05, -0.02])
    np.testing.assert_allclose(sin_minus_x(x), np.sin(x) - x, rtol=1e-10)
