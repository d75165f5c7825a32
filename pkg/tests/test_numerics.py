"""Tests for the shared dense numerical utilities."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bistable_pwa.numerics import (
    DivergenceError,
    bracket_root,
    eigenvalues,
    fft_magnitudes,
    integrate_ode,
    real_positive_roots,
    svd,
)
from bistable_pwa.params import KernelConstants


# ---------------------------------------------------------------------------
# integrate_ode
# ---------------------------------------------------------------------------

def test_rk4_exponential_decay():
    t, X = integrate_ode(lambda t, x: -x, 0.0, 1.0, 1e-3, [1.0])
    assert abs(X[-1, 0] - np.exp(-1.0)) < 1e-6


def test_rk4_harmonic_oscillator_closes():
    f = lambda t, x: np.array([x[1], -x[0]])
    t, X = integrate_ode(f, 0.0, 2.0 * np.pi, 1e-3, [1.0, 0.0])
    assert np.max(np.abs(X[-1] - [1.0, 0.0])) < 1e-5


def test_rk4_order():
    # halving dt reduces the error ~16x for a 4th-order method
    def err(dt):
        _, X = integrate_ode(lambda t, x: -x, 0.0, 1.0, dt, [1.0])
        return abs(X[-1, 0] - np.exp(-1.0))

    ratio = err(2e-3) / err(1e-3)
    assert 16.0 * 0.7 < ratio < 16.0 * 1.3


def test_rk4_final_partial_step_lands_on_t1():
    t, X = integrate_ode(lambda t, x: -x, 0.0, 1.00037, 1e-3, [1.0])
    assert t[-1] == pytest.approx(1.00037, abs=0.0)
    assert abs(X[-1, 0] - np.exp(-1.00037)) < 1e-6


def test_rk4_divergence_reports_time():
    with pytest.raises(DivergenceError) as exc:
        integrate_ode(lambda t, x: x**3, 0.0, 10.0, 1e-2, [1.0])
    assert 0.0 < exc.value.t <= 10.0


def test_rk4_rejects_bad_arguments():
    with pytest.raises(ValueError):
        integrate_ode(lambda t, x: -x, 0.0, 1.0, -1e-3, [1.0])
    with pytest.raises(ValueError):
        integrate_ode(lambda t, x: -x, 1.0, 0.0, 1e-3, [1.0])
    with pytest.raises(ValueError):
        integrate_ode(lambda t, x: -x, 0.0, 1.0, 1e-3, [np.nan])


# ---------------------------------------------------------------------------
# real_positive_roots
# ---------------------------------------------------------------------------

def test_roots_quadratic():
    assert real_positive_roots([-1.0, 0.0, 1.0]) == pytest.approx([1.0])


def test_roots_cubic_mixed_signs():
    # (x - 2)(x - 3)(x + 1) = x^3 - 4x^2 + x + 6
    assert real_positive_roots([6.0, 1.0, -4.0, 1.0]) == pytest.approx([2.0, 3.0])


def test_roots_none_positive():
    assert real_positive_roots([1.0, 2.0, 1.0]) == []


def test_roots_degree_zero_rejected():
    with pytest.raises(ValueError):
        real_positive_roots([1.0])


def test_roots_match_dense_sign_scan():
    # fold quartic of the large-orbit branch at a fixed frequency; the
    # oracle is a dense bisection scan for sign changes
    from bistable_pwa.bifurcation import _amp_from_g  # noqa: F401  (import check)
    from bistable_pwa.hydro import xi_constants
    from bistable_pwa.params import NondimParams

    p = NondimParams()
    Om = 0.9
    xi1, xib1 = xi_constants(Om, p.kernel)
    P = Om**2 + p.omega_n**2 - 2.0 * Om * p.delta1 * xi1
    c = Om * (p.delta1 * xib1 + p.delta2)
    b3 = 3.0 * p.gamma / 4.0
    b5 = 3.0 * p.gamma**2 / (128.0 * p.omega_n**2)
    coeffs = [c**2 + P**2, -4.0 * P * b3, 3.0 * b3**2 - 6.0 * P * b5,
              8.0 * b3 * b5, 5.0 * b5**2]
    roots = real_positive_roots(coeffs)

    poly = lambda s: np.polyval(coeffs[::-1], s)
    grid = np.linspace(1e-9, 1.0, 1_000_001)
    vals = poly(grid)
    scan = [bracket_root(poly, grid[i], grid[i + 1])
            for i in np.nonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))[0]]
    assert roots == pytest.approx(scan, rel=1e-6)


@given(st.lists(st.floats(0.1, 5.0), min_size=1, max_size=4))
@settings(max_examples=50, deadline=None)
def test_roots_cross_oracle_with_eigenvalues(rs):
    # companion eigenvalues and the root finder agree on products of
    # distinct positive linear factors
    rs = sorted(rs)
    if any(b - a < 1e-3 for a, b in zip(rs, rs[1:])):
        return
    coeffs = np.poly(rs)[::-1]  # ascending
    got = real_positive_roots(coeffs, tol=1e-6)
    assert got == pytest.approx(rs, rel=1e-6, abs=1e-8)


# ---------------------------------------------------------------------------
# svd / eigenvalues
# ---------------------------------------------------------------------------

def test_svd_identity():
    _, s, _ = svd(np.eye(3))
    assert s == pytest.approx([1.0, 1.0, 1.0])


def test_svd_rank_one():
    m = np.outer([1.0, 2.0, 3.0], [4.0, 5.0])
    _, s, _ = svd(m)
    assert np.sum(s > 1e-12) == 1


def test_svd_reconstructs():
    rng = np.random.default_rng(0)
    m = rng.normal(size=(6, 4))
    U, s, Vt = svd(m)
    assert np.max(np.abs(U @ np.diag(s) @ Vt - m)) < 1e-10 * np.max(np.abs(m))


def test_hankel_of_kernel_has_rank_three():
    from bistable_pwa.era import ImpulseSequence, build_hankel
    from bistable_pwa.hydro import impulse_response

    t = np.arange(0, 65) * 0.05
    seq = ImpulseSequence(dt=0.05, samples=impulse_response(t))
    H0, _ = build_hankel(seq, 30, 30)
    _, s, _ = svd(H0)
    assert s[3] / s[2] < 1e-2


def test_eigenvalues_diagonal():
    ev = sorted(eigenvalues(np.diag([1.0, 2.0, 3.0])).real)
    assert ev == pytest.approx([1.0, 2.0, 3.0])


def test_eigenvalues_radiation_matrix():
    ev = eigenvalues(KernelConstants().A)
    for z in (-0.8, -0.8 + 0.8j, -0.8 - 0.8j):
        assert np.min(np.abs(ev - z)) < 1e-12


def test_eigenvalues_rotation():
    th = 0.7
    R = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    ev = eigenvalues(R)
    assert sorted(ev.imag) == pytest.approx([-np.sin(th), np.sin(th)])


# ---------------------------------------------------------------------------
# fft_magnitudes
# ---------------------------------------------------------------------------

def test_fft_pure_cosine_peak():
    Om = 1.3
    dt = 0.05
    t = np.arange(4096) * dt
    freqs, mags = fft_magnitudes(np.cos(Om * t), dt)
    assert abs(freqs[np.argmax(mags)] - Om) < 2.0 * np.pi / (4096 * dt)


def test_fft_subharmonic_detection():
    Om = 1.2
    dt = 0.05
    t = np.arange(8192) * dt
    y = np.cos(Om * t) + 0.3 * np.cos(0.5 * Om * t)
    freqs, mags = fft_magnitudes(y, dt)
    top2 = np.sort(freqs[np.argsort(mags)[::-1][:2]])
    assert top2 == pytest.approx([0.5 * Om, Om], abs=2.0 * np.pi / (8192 * dt))


def test_fft_parseval():
    rng = np.random.default_rng(1)
    y = rng.normal(size=1024)
    _, mags = fft_magnitudes(y, 0.01)
    # fold the doubled one-sided magnitudes back into two-sided energy
    energy = (mags[0] ** 2 + 0.5 * np.sum(mags[1:-1] ** 2) + mags[-1] ** 2)
    assert energy == pytest.approx(np.mean(y**2), rel=1e-8)


def test_fft_rejects_short_input():
    with pytest.raises(ValueError):
        fft_magnitudes(np.ones(4), 0.1)
