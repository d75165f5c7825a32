"""Radiation hydrodynamics of the hemispherical buoy.

Provides the analytic radiation impulse response, its closed-form Fourier
projections (radiation damping and the in-phase/quadrature kernel constants
used by the perturbation solvers), and the dimensionless wave forcing.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import expm

from .params import BuoyGeometry, KernelConstants, NondimParams

__all__ = [
    "impulse_response",
    "impulse_response_realized",
    "xi_constants",
    "radiation_damping",
    "ogilvie_kernel",
    "g_wave",
    "wave_force",
]


def impulse_response(t, kernel: KernelConstants | None = None):
    """Analytic radiation impulse response ``hbar(t)``.

    ``hbar(t) = exp(-mu t) (lam1 + lam2 cos(mu t) + lam3 sin(mu t))``.
    """
    k = kernel or KernelConstants()
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0):
        raise ValueError("t must be non-negative")
    return np.exp(-k.mu * t) * (
        k.lam1 + k.lam2 * np.cos(k.mu * t) + k.lam3 * np.sin(k.mu * t)
    )


def impulse_response_realized(t, kernel: KernelConstants | None = None):
    """Impulse response ``C expm(A t) B`` of the state-space realization."""
    k = kernel or KernelConstants()
    tt = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.array([k.C @ expm(k.A * ti) @ k.B for ti in tt])
    return out if np.ndim(t) else out[0]


def xi_constants(omega, kernel: KernelConstants | None = None):
    """In-phase and quadrature Fourier projections of the kernel.

    For the convolution ``conv(hbar, Y')`` acting on ``Y = a cos(omega t)``,
    the secular part is ``(xi_bar * Y' ) + (xi * omega * Y)``-like; the two
    constants are the sine and cosine projections

        xi(omega)     = integral_0^inf hbar(s) sin(omega s) ds,
        xi_bar(omega) = integral_0^inf hbar(s) cos(omega s) ds,

    evaluated in closed form for the exponential-trigonometric kernel.

    Returns
    -------
    (xi, xi_bar) : float, float
    """
    k = kernel or KernelConstants()
    w = np.asarray(omega, dtype=float)
    if np.any(w <= 0.0):
        raise ValueError("omega must be positive")
    mu = k.mu
    d1 = mu**2 + w**2
    d2 = 4.0 * mu**4 + w**4
    xi = (
        k.lam1 * w / d1
        + k.lam2 * w**3 / d2
        + 2.0 * k.lam3 * mu**2 * w / d2
    )
    xi_bar = (
        k.lam1 * mu / d1
        + k.lam2 * mu * (2.0 * mu**2 + w**2) / d2
        + k.lam3 * mu * (2.0 * mu**2 - w**2) / d2
    )
    return xi, xi_bar


def radiation_damping(Omega, kernel: KernelConstants | None = None):
    """Dimensionless radiation damping curve ``Bbar(Omega)``.

    The cosine transform of the impulse response, i.e. the quadrature
    projection ``xi_bar`` evaluated at the wave frequency.
    """
    return xi_constants(Omega, kernel)[1]


def ogilvie_kernel(t, Omega_grid=None, kernel: KernelConstants | None = None):
    """Reconstruct ``hbar(t)`` from the damping curve by the Ogilvie sum.

    Discretizes ``hbar(t) = (2/pi) * integral Bbar(w) cos(w t) dw`` on the
    given frequency grid (default (0, 8] with step 0.01).  Used to generate
    demonstration impulse data for the identification pipeline.
    """
    if Omega_grid is None:
        Omega_grid = np.arange(0.01, 8.0 + 1e-12, 0.01)
    w = np.asarray(Omega_grid, dtype=float)
    dw = np.diff(w, prepend=w[0] - (w[1] - w[0]))
    B = radiation_damping(w, kernel)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = (2.0 / np.pi) * np.einsum("j,ij->i", B * dw, np.cos(np.outer(t, w)))
    return out


def g_wave(amplitude_ratio, Omega, params: NondimParams, kernel=None):
    """Dimensionless wave-forcing amplitude.

    ``g_wave = (A/R) * (1/delta1) * (1/Omega) * sqrt(3 Bbar(Omega) / pi)``.
    Linear in the wave amplitude.
    """
    if Omega <= 0.0:
        raise ValueError("Omega must be positive")
    Bbar = radiation_damping(Omega, kernel or params.kernel)
    if Bbar <= 0.0:
        raise ValueError(f"radiation damping non-positive at Omega={Omega}")
    return (
        amplitude_ratio
        * (1.0 / params.delta1)
        * (1.0 / Omega)
        * np.sqrt(3.0 * Bbar / np.pi)
    )


def wave_force(geometry: BuoyGeometry, amplitude_ratio, Omega, params: NondimParams):
    """Dimensional Haskind wave force and the dimensionless forcing.

    Returns
    -------
    (f_wave, g) : float, float
        ``f_wave = A sqrt(2 rho g^3 B(omega) / omega^3)`` with the damping
        curve rescaled to dimensional units, and the dimensionless
        ``g_wave`` actually used by the solvers.
    """
    g = g_wave(amplitude_ratio, Omega, params)
    A = amplitude_ratio * geometry.R
    omega_c = np.sqrt(geometry.grav / geometry.R)
    omega = Omega * omega_c
    B_dim = radiation_damping(Omega, params.kernel) * geometry.M * omega_c
    f_wave = A * np.sqrt(2.0 * geometry.rho * geometry.grav**3 * B_dim / omega**3)
    return f_wave, g
