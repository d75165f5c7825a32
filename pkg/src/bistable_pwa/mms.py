"""Method-of-multiple-scales steady states of the bi-stable absorber.

Two perturbation families are evaluated:

* intra-well: oscillations about one stable equilibrium, expanded in the
  well-local coordinate ``z`` with natural frequency ``omega_o``;
* inter-well: large orbits spanning both wells, expanded about the unstable
  origin with the cubic term balancing the negative linear stiffness.

Each family yields slow-flow (modulation) equations whose fixed points give
steady-state amplitude/phase pairs, a local (Jacobian) stability flag, a
time-domain reconstruction, and closed-form average power.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hydro import g_wave, xi_constants
from .numerics import real_positive_roots
from .params import BuoyGeometry, NondimParams

__all__ = [
    "SteadyState",
    "intrawell_steady_states",
    "interwell_steady_states",
    "steady_states",
    "reconstruct_response",
    "average_power",
    "capture_width_ratio",
    "branch_sweep",
]


@dataclass(frozen=True)
class SteadyState:
    """One steady-state solution of a slow-flow family."""

    Omega: float
    a0: float
    psi0: float
    branch: str  # 'Br' | 'Bn' | 'BL'
    stable: bool
    eigs: tuple
    g: float


# ---------------------------------------------------------------------------
# slow-flow coefficient helpers
# ---------------------------------------------------------------------------

def _intra_coeffs(Omega, params: NondimParams):
    """(c, sigma', kappa, G-scale) of the intra-well slow flow.

    The detuning and damping are uniformized so that at vanishing amplitude
    the relation reproduces the exact linear response of the well-local
    oscillator, with the kernel projections evaluated at the forcing
    frequency: ``sigma' = -(omega_o^2 - Omega^2 + delta1 Omega xi(Omega))
    / (2 omega_o)``.  Near resonance this reduces to the leading-order
    detuning ``Omega - omega_o`` minus the radiation shift.
    """
    wo = params.omega_o
    xi1, xib1 = xi_constants(Omega, params.kernel)
    c = Omega * (params.delta1 * xib1 + params.delta2) / (2.0 * wo)
    sp = -(wo**2 - Omega**2 + params.delta1 * Omega * xi1) / (2.0 * wo)
    return c, sp, params.kappa, 2.0 * wo


def _inter_coeffs(Omega, params: NondimParams):
    """Coefficients of the inter-well steady-state relation.

    The relation is ``(c_full a)^2 + (P a - b3 a^3 - b5 a^5)^2 = g^2`` with
    the kernel projections evaluated at the response frequency.
    """
    xi1, xib1 = xi_constants(Omega, params.kernel)
    P = Omega**2 + params.omega_n**2 - 2.0 * Omega * params.delta1 * xi1
    c_full = Omega * (params.delta1 * xib1 + params.delta2)
    b3 = 3.0 * params.gamma / 4.0
    b5 = 3.0 * params.gamma**2 / (128.0 * params.omega_n**2)
    return P, c_full, b3, b5


def _slowflow_stability(c, q, dq_ds, s):
    """Eigenvalues of the Cartesian slow-flow Jacobian at a fixed point.

    In Cartesian coordinates the Jacobian has trace ``-2c`` and determinant
    ``c^2 + q(q + 2 s dq/ds)`` where ``q(s)`` is the amplitude-dependent
    detuning and ``s = a^2``; the fixed point is stable iff the determinant
    is positive (the trace is negative for any damped system).
    """
    det = c**2 + q * (q + 2.0 * s * dq_ds)
    tr = -2.0 * c
    disc = tr**2 / 4.0 - det
    if disc >= 0.0:
        r = np.sqrt(disc)
        eigs = (tr / 2.0 - r, tr / 2.0 + r)
    else:
        r = np.sqrt(-disc)
        eigs = (complex(tr / 2.0, -r), complex(tr / 2.0, r))
    stable = bool(max(np.real(eigs)) < 0.0)
    return stable, eigs


# ---------------------------------------------------------------------------
# steady states
# ---------------------------------------------------------------------------

def intrawell_steady_states(Omega, g, params: NondimParams):
    """Steady states of the well-local (intra-well) slow flow.

    Roots of the cubic (in ``a^2``) frequency-response relation; branch
    labels follow the response topology: the branch connected to the
    high-frequency tail is ``Br``, the resonant fold pair is ``Bn``.
    """
    wo = params.omega_o
    if abs(Omega - wo) >= wo:
        raise ValueError("Omega outside the intra-well detuning neighbourhood")
    c, sp, kap, scale = _intra_coeffs(Omega, params)
    if g == 0.0:
        return [SteadyState(Omega, 0.0, 0.0, "Br", True, (-c, -c), g)]
    G = g / scale
    roots = real_positive_roots(
        [-(G**2), sp**2 + c**2, 2.0 * sp * kap, kap**2]
    )
    aa = sorted(np.sqrt(roots))
    out = []
    for i, a in enumerate(aa):
        s = a * a
        q = sp + kap * s
        sin_psi = c * a / G
        cos_psi = -(sp * a + kap * a**3) / G
        psi = float(np.arctan2(sin_psi, cos_psi))
        stable, eigs = _slowflow_stability(c, q, kap, s)
        branch = "Br" if (len(aa) == 1 or i == 0) else "Bn"
        out.append(SteadyState(float(Omega), float(a), psi, branch, stable, eigs, g))
    return out


def interwell_steady_states(Omega, g, params: NondimParams):
    """Steady states of the inter-well (both-well-spanning) slow flow.

    Roots of the quintic (in ``a^2``) relation.  Roots whose reconstructed
    orbit does not span both wells (``max|Y| <= Y_s``) are discarded as
    inconsistent with the inter-well ansatz.
    """
    if Omega <= 0.0:
        raise ValueError("Omega must be positive")
    if g == 0.0:
        return []
    P, c_full, b3, b5 = _inter_coeffs(Omega, params)
    # polynomial in s = a^2 from (c a)^2 + (P a - b3 a^3 - b5 a^5)^2 = g^2
    coeffs = [
        -(g**2),
        P**2 + c_full**2,
        -2.0 * P * b3,
        b3**2 - 2.0 * P * b5,
        2.0 * b3 * b5,
        b5**2,
    ]
    roots = real_positive_roots(coeffs)
    c = c_full / (2.0 * Omega)
    out = []
    for s in sorted(roots):
        a = float(np.sqrt(s))
        if _interwell_peak(a, params) <= params.Y_s:
            continue
        sin_psi = -c_full * a / g
        cos_psi = (P * a - b3 * a**3 - b5 * a**5) / g
        psi = float(np.arctan2(sin_psi, cos_psi))
        q = (-0.5 * P + (3.0 * params.gamma / 8.0) * s
             + (3.0 * params.gamma**2 / (256.0 * params.omega_n**2)) * s**2) / Omega
        dq = ((3.0 * params.gamma / 8.0)
              + (3.0 * params.gamma**2 / (128.0 * params.omega_n**2)) * s) / Omega
        stable, eigs = _slowflow_stability(c, q, dq, s)
        out.append(SteadyState(float(Omega), a, psi, "BL", stable, eigs, g))
    return out


def _interwell_peak(a0, params: NondimParams):
    """Peak |Y| of the reconstructed inter-well orbit."""
    wn2 = params.omega_n**2
    R3 = params.gamma * a0**3 / (32.0 * wn2) \
        + 3.0 * params.gamma**2 * a0**5 / (1024.0 * wn2**2)
    R5 = params.gamma**2 * a0**5 / (1024.0 * wn2**2)
    return a0 + R3 + R5


def steady_states(Omega, amplitude_ratio, params: NondimParams):
    """All steady states (both families) at one frequency and wave amplitude."""
    g = g_wave(amplitude_ratio, Omega, params)
    out = []
    wo = params.omega_o
    if abs(Omega - wo) < wo:
        out.extend(intrawell_steady_states(Omega, g, params))
    out.extend(interwell_steady_states(Omega, g, params))
    return out


# ---------------------------------------------------------------------------
# reconstruction, power, CWR
# ---------------------------------------------------------------------------

def reconstruct_response(state: SteadyState, params: NondimParams, t):
    """Time-domain reconstruction ``(Y(t), v(t))`` of a steady state."""
    t = np.asarray(t, dtype=float)
    Om, a0, psi = state.Omega, state.a0, state.psi0
    phase = Om * t - psi
    if state.branch == "BL":
        wn2 = params.omega_n**2
        R3 = params.gamma * a0**3 / (32.0 * wn2) \
            + 3.0 * params.gamma**2 * a0**5 / (1024.0 * wn2**2)
        R5 = params.gamma**2 * a0**5 / (1024.0 * wn2**2)
        Y = a0 * np.cos(phase) + R3 * np.cos(3.0 * phase) + R5 * np.cos(5.0 * phase)
        wv = params.omega_n
    else:
        wo = params.omega_o
        eta = params.eta
        z = a0 * np.cos(phase) + (eta / (2.0 * wo**2)) * (
            -a0**2 + (a0**2 / 3.0) * np.cos(2.0 * phase)
        )
        Y = z - params.Y_s
        wv = wo
    th = params.theta
    v = (wv**2 / (wv**2 + th**2)) * a0 * np.cos(phase) \
        - (wv * th / (wv**2 + th**2)) * a0 * np.sin(phase)
    return Y, v


def average_power(state: SteadyState, params: NondimParams):
    """Closed-form average absorbed power ``(1/T) int delta2 Ydot^2 dt``."""
    Om, a0 = state.Omega, state.a0
    if state.branch == "BL":
        return params.delta2 * (
            0.5 * Om**2 * a0**2
            + 9.0 * params.gamma**2 * Om**2 * a0**6 / (2048.0 * params.omega_n**4)
        )
    wo = params.omega_o
    return params.delta2 * (
        0.5 * Om**2 * a0**2
        + params.eta**2 * Om**2 * a0**4 / (18.0 * wo**4)
    )


def capture_width_ratio(P_avg, amplitude_ratio, Omega,
                        geometry: BuoyGeometry | None = None):
    """Capture width ratio ``6 (m + m_inf) Omega P / (rho R A^2)``.

    Evaluated with the dimensionless groups; for the neutral hemispherical
    buoy ``(m + m_inf) = (3/2) M`` the prefactor reduces to
    ``6 pi Omega / (A/R)^2``.
    """
    if amplitude_ratio <= 0.0:
        raise ValueError("wave amplitude must be positive for CWR")
    geo = geometry or BuoyGeometry()
    mass_ratio = (geo.m + geo.m_inf) / geo.M  # (m + m_inf) / (2/3 pi rho R^3)
    return 6.0 * mass_ratio * (2.0 * np.pi / 3.0) * Omega * P_avg / amplitude_ratio**2


def branch_sweep(Omega_grid, amplitude_ratio, params: NondimParams,
                 geometry: BuoyGeometry | None = None):
    """Sample all branches over a frequency grid.

    Returns a list of dict rows ``{Omega, a0, psi0, branch, stable, P_avg,
    CWR}`` sorted by (branch, Omega).
    """
    rows = []
    for Om in np.asarray(Omega_grid, dtype=float):
        try:
            states = steady_states(float(Om), amplitude_ratio, params)
        except ValueError:
            continue
        for st in states:
            P = average_power(st, params)
            rows.append({
                "Omega": st.Omega,
                "a0": st.a0,
                "psi0": st.psi0,
                "branch": st.branch,
                "stable": int(st.stable),
                "P_avg": P,
                "CWR": capture_width_ratio(P, amplitude_ratio, st.Omega, geometry),
            })
    rows.sort(key=lambda r: (r["branch"], r["Omega"], r["a0"]))
    return rows
