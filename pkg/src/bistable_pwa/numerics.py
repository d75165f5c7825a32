"""Small dense numerical utilities shared by all solver modules.

Thin, deterministic wrappers around numpy/scipy primitives plus a classical
fixed-step RK4 integrator.  The fixed step is deliberate: stroboscopic
sampling requires trajectories that land exactly on multiples of the forcing
period, which adaptive steppers complicate.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import brentq

__all__ = [
    "DivergenceError",
    "integrate_ode",
    "rk4_step",
    "real_positive_roots",
    "svd",
    "eigenvalues",
    "fft_magnitudes",
    "bracket_root",
]


class DivergenceError(RuntimeError):
    """Raised when an integration produces a non-finite state."""

    def __init__(self, t: float):
        super().__init__(f"non-finite state encountered at t = {t:.6g}")
        self.t = t


def rk4_step(f, t, x, dt):
    """One classical Runge-Kutta step of size ``dt``."""
    k1 = f(t, x)
    k2 = f(t + 0.5 * dt, x + 0.5 * dt * k1)
    k3 = f(t + 0.5 * dt, x + 0.5 * dt * k2)
    k4 = f(t + dt, x + dt * k3)
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate_ode(f, t0, t1, dt, x0):
    """Integrate ``x' = f(t, x)`` with fixed-step RK4.

    The trajectory is sampled at ``t0 + k*dt``; a shortened final step lands
    exactly on ``t1``.

    Returns
    -------
    (t, X) : ndarray, ndarray
        Sample times and states (one row per sample).

    Raises
    ------
    DivergenceError
        If the state stops being finite.
    """
    if dt <= 0.0 or t1 <= t0:
        raise ValueError("require dt > 0 and t1 > t0")
    x = np.asarray(x0, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("initial state must be finite")
    fv = lambda t, y: np.asarray(f(t, y), dtype=float)
    n_full = int(np.floor((t1 - t0) / dt + 1e-12))
    ts = [t0]
    xs = [x]
    t = t0
    for _ in range(n_full):
        x = rk4_step(fv, t, x, dt)
        t += dt
        if not np.all(np.isfinite(x)):
            raise DivergenceError(t)
        ts.append(t)
        xs.append(x)
    if t1 - t > 1e-12 * max(1.0, abs(t1)):
        x = rk4_step(fv, t, x, t1 - t)
        if not np.all(np.isfinite(x)):
            raise DivergenceError(t1)
        ts.append(t1)
        xs.append(x)
    return np.array(ts), np.array(xs)


def real_positive_roots(coeffs, tol=1e-8):
    """Real positive roots of a polynomial with ascending coefficients.

    Roots come from the companion-matrix eigenvalues (``numpy.roots``) and
    are kept when their imaginary part is negligible, they are strictly
    positive, and the normalized residual is below ``tol``.  Near-duplicate
    roots are collapsed.

    Returns a sorted list (possibly empty).
    """
    c = np.asarray(coeffs, dtype=float)
    if c.size < 2:
        raise ValueError("polynomial degree must be at least 1")
    # trim trailing (leading-degree) zeros
    nz = np.nonzero(np.abs(c) > 0.0)[0]
    if nz.size == 0:
        raise ValueError("zero polynomial")
    c = c[: nz[-1] + 1]
    if c.size < 2:
        return []
    rr = np.roots(c[::-1])
    scale = np.max(np.abs(c))
    out = []
    for r in rr:
        if abs(r.imag) > 1e-8 * max(1.0, abs(r.real)):
            continue
        x = r.real
        if x <= 0.0:
            continue
        res = abs(np.polyval(c[::-1], x))
        norm = scale * max(1.0, abs(x)) ** (c.size - 1)
        if res > tol * norm:
            continue
        out.append(x)
    out.sort()
    dedup = []
    for x in out:
        if not dedup or abs(x - dedup[-1]) > 1e-9 * max(1.0, abs(x)):
            dedup.append(x)
    return dedup


def svd(m):
    """Singular value decomposition ``U, s, Vt`` of a dense matrix."""
    return np.linalg.svd(np.asarray(m, dtype=float), full_matrices=False)


def eigenvalues(m):
    """Complex eigenvalues of a dense square matrix."""
    return np.linalg.eigvals(np.asarray(m, dtype=float))


def fft_magnitudes(samples, dt):
    """One-sided FFT magnitude spectrum of a uniformly sampled real series.

    Parameters
    ----------
    samples : array_like
        Real series; length must be at least 8 (power of two recommended).
    dt : float
        Sample spacing.

    Returns
    -------
    (freqs, mags) : ndarray, ndarray
        Angular-frequency bins and amplitude magnitudes (two-sided energy
        folded into the positive bins).
    """
    y = np.asarray(samples, dtype=float)
    if y.size < 8:
        raise ValueError("need at least 8 samples")
    n = y.size
    spec = np.fft.rfft(y) / n
    mags = np.abs(spec)
    # fold negative frequencies; the Nyquist bin (even n) has no mirror
    last = mags.size if n % 2 else mags.size - 1
    mags[1:last] *= 2.0
    freqs = 2.0 * np.pi * np.fft.rfftfreq(n, d=dt)
    return freqs, mags


def bracket_root(f, a, b, xtol=1e-12):
    """Root of a scalar function on a sign-changing bracket [a, b]."""
    return brentq(f, a, b, xtol=xtol)
