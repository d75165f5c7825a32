"""Bifurcation loci of the bi-stable absorber in the (A/R, Omega) plane.

Five structures are traced analytically:

* ``Cf1`` — cyclic fold of the inter-well branch (tangency of the quintic
  steady-state relation);
* ``Cf2``/``Cf3`` — cyclic-fold pair of the intra-well resonant branch;
* ``PD`` — first period-doubling of the intra-well branch, from the
  subharmonic instability of a Mathieu-type variational equation;
* ``SB1``/``SB2`` — symmetry breaking of the inter-well branch, from Floquet
  multipliers of the five-state variational (monodromy) system.

Every locus point carries the residual of its defining equation so the
curves can be re-verified independently of the root finder.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .hydro import g_wave, xi_constants
from .mms import interwell_steady_states, intrawell_steady_states
from .numerics import bracket_root, real_positive_roots
from .params import NondimParams

__all__ = [
    "GConstants",
    "KConstants",
    "BifurcationLocus",
    "g_constants",
    "k_constants",
    "monodromy",
    "floquet_multipliers",
    "interwell_stability_metric",
    "cf1_locus",
    "cf_intrawell_locus",
    "pd_locus",
    "pd_crossings",
    "sb_locus",
    "sb_intervals",
    "sb_window",
    "SB_MIN_WIDTH",
]


# ---------------------------------------------------------------------------
# parametric-term constants
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GConstants:
    """Parametric stiffness constants of the intra-well variational equation."""

    G0: float
    G1: float
    G2: float
    G3: float
    G4: float


@dataclass(frozen=True)
class KConstants:
    """Harmonic amplitudes and parametric constants of the inter-well
    variational equation."""

    R1: float
    R3: float
    R5: float
    K0: float
    K2: float
    K4: float
    K6: float
    K8: float
    K10: float

    @property
    def harmonics(self):
        return (self.K2, self.K4, self.K6, self.K8, self.K10)


def g_constants(a0: float, params: NondimParams) -> GConstants:
    """Parametric constants of the intra-well perturbation at amplitude a0."""
    if a0 < 0.0:
        raise ValueError("a0 must be nonnegative")
    wo = params.omega_o
    eta = params.eta
    gam = params.gamma
    s2 = a0 * a0
    s4 = s2 * s2
    G0 = (wo**2 - (eta**2 / wo**2) * s2 + 1.5 * gam * s2
          + (3.0 * gam * eta**2 / (4.0 * wo**4)) * s4
          + (gam * eta**2 / (24.0 * wo**4)) * s4)
    G1 = 2.0 * eta * a0 - (2.5 * gam * eta / wo**2) * a0**3
    G2 = ((eta**2 / (3.0 * wo**2)) * s2 + 1.5 * gam * s2
          - (gam * eta**2 / (2.0 * wo**4)) * s4)
    G3 = (gam * eta / (2.0 * wo**2)) * a0**3
    G4 = (gam * eta**2 / (24.0 * wo**4)) * s4
    return GConstants(G0, G1, G2, G3, G4)


def k_constants(a0: float, Omega: float, params: NondimParams,
                convention: str = "parametric") -> KConstants:
    """Parametric constants of the inter-well variational equation.

    ``convention`` selects the denominator frequency of the higher-harmonic
    amplitudes: ``parametric`` uses the forcing frequency, ``response`` uses
    the linearized well-crossing frequency (for sensitivity studies).
    """
    if a0 < 0.0:
        raise ValueError("a0 must be nonnegative")
    if convention == "parametric":
        w2 = Omega**2
    elif convention == "response":
        w2 = params.omega_n**2
    else:
        raise ValueError(f"unknown convention: {convention}")
    gam = params.gamma
    R1 = a0
    R3 = gam * a0**3 / (32.0 * w2) + 3.0 * gam**2 * a0**5 / (1024.0 * w2**2)
    R5 = gam**2 * a0**5 / (1024.0 * w2**2)
    K0 = -params.omega_n**2 + 3.0 * gam * (R1**2 / 2 + R3**2 / 2 + R5**2 / 2)
    K2 = 3.0 * gam * (R1**2 / 2 + R1 * R3 + R3 * R5)
    K4 = 3.0 * gam * (R1 * R3 + R1 * R5)
    K6 = 3.0 * gam * (R3**2 / 2 + R1 * R5)
    K8 = 3.0 * gam * R3 * R5
    K10 = 3.0 * gam * R5**2 / 2
    return KConstants(R1, R3, R5, K0, K2, K4, K6, K8, K10)


# ---------------------------------------------------------------------------
# monodromy of the inter-well variational system
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def _monodromy_run(K0, Kh, Om, d1, d2, A, B, C, n_steps):
    """RK4 integration of the 5x5 fundamental system over one parametric
    period T = pi/Omega."""
    T = np.pi / Om
    dt = T / n_steps
    Phi = np.eye(5)
    M = np.zeros((5, 5))
    M[0, 1] = 1.0
    M[1, 1] = -d2
    for j in range(3):
        M[1, 2 + j] = -d1 * C[j]
        M[2 + j, 1] = B[j]
        for l in range(3):
            M[2 + j, 2 + l] = A[j, l]
    t = 0.0
    for _ in range(n_steps):
        f = K0
        for n in range(Kh.shape[0]):
            f += Kh[n] * np.cos(2.0 * (n + 1) * Om * t)
        M[1, 0] = -f
        k1 = M @ Phi
        f = K0
        for n in range(Kh.shape[0]):
            f += Kh[n] * np.cos(2.0 * (n + 1) * Om * (t + 0.5 * dt))
        M[1, 0] = -f
        k2 = M @ (Phi + 0.5 * dt * k1)
        k3 = M @ (Phi + 0.5 * dt * k2)
        f = K0
        for n in range(Kh.shape[0]):
            f += Kh[n] * np.cos(2.0 * (n + 1) * Om * (t + dt))
        M[1, 0] = -f
        k4 = M @ (Phi + dt * k3)
        Phi = Phi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t += dt
    return Phi


def monodromy(Omega: float, a0: float, params: NondimParams,
              n_steps: int = 2000, convention: str = "parametric"):
    """Fundamental matrix of the inter-well variational system over one
    parametric period ``T = pi/Omega``.

    States: perturbation ``(p, p')`` plus the three radiation states.
    """
    if Omega <= 0.0:
        raise ValueError("Omega must be positive")
    kc = k_constants(a0, Omega, params, convention)
    k = params.kernel
    Phi = _monodromy_run(kc.K0, np.array(kc.harmonics), Omega,
                         params.delta1, params.delta2,
                         k.A, k.B, k.C, n_steps)
    if not np.all(np.isfinite(Phi)):
        raise FloatingPointError(
            f"monodromy integration diverged (Omega={Omega}, a0={a0}, "
            f"n_steps={n_steps})")
    return Phi


def floquet_multipliers(Omega: float, a0: float, params: NondimParams,
                        n_steps: int = 2000):
    """Floquet multipliers of the periodic orbit over one full forcing
    period.

    The variational coefficients repeat with half the forcing period, so the
    full-period multipliers are the squares of the half-period ones.
    """
    lam_half = np.linalg.eigvals(monodromy(Omega, a0, params, n_steps))
    return lam_half**2


def interwell_stability_metric(Omega: float, g: float, params: NondimParams,
                               n_steps: int = 2000):
    """min over inter-well steady states of max |Floquet multiplier|.

    Returns ``(metric, a0)`` for the best (most stable) root, or
    ``(None, None)`` when no inter-well steady state exists.
    """
    states = interwell_steady_states(Omega, g, params)
    best = (None, None)
    for st in states:
        m = float(np.max(np.abs(floquet_multipliers(Omega, st.a0, params,
                                                    n_steps))))
        if best[0] is None or m < best[0]:
            best = (m, st.a0)
    return best


# ---------------------------------------------------------------------------
# locus container
# ---------------------------------------------------------------------------

@dataclass
class BifurcationLocus:
    """One bifurcation curve: list of (Omega_b, A/R, a_b) with residuals."""

    kind: str  # 'Cf1' | 'Cf2' | 'Cf3' | 'PD' | 'SB1' | 'SB2'
    points: list = field(default_factory=list)  # (Omega_b, A_over_R, a_b)
    residuals: list = field(default_factory=list)

    def add(self, Omega_b, A_over_R, a_b, residual):
        self.points.append((float(Omega_b), float(A_over_R), float(a_b)))
        self.residuals.append(float(residual))

    def sort(self):
        order = np.argsort([p[0] for p in self.points])
        self.points = [self.points[i] for i in order]
        self.residuals = [self.residuals[i] for i in order]
        return self


def _amp_from_g(g: float, Omega: float, params: NondimParams) -> float:
    """Invert the linear wave-force map: amplitude ratio giving forcing g."""
    return g / g_wave(1.0, Omega, params)


# ---------------------------------------------------------------------------
# cyclic folds
# ---------------------------------------------------------------------------

def cf1_locus(params: NondimParams, Omega_grid) -> BifurcationLocus:
    """Cyclic-fold locus of the inter-well branch.

    Fold points are stationary points of the forcing magnitude along the
    response curve: with ``s = a^2`` and the steady-state relation
    ``g^2(s) = c^2 s + (P - b3 s - b5 s^2)^2 s``, the tangency condition
    ``dg^2/ds = 0`` is a quartic in ``s`` (degree 8 in the amplitude).
    """
    locus = BifurcationLocus("Cf1")
    for Om in np.asarray(Omega_grid, dtype=float):
        xi1, xib1 = xi_constants(Om, params.kernel)
        P = Om**2 + params.omega_n**2 - 2.0 * Om * params.delta1 * xi1
        c = Om * (params.delta1 * xib1 + params.delta2)
        b3 = 3.0 * params.gamma / 4.0
        b5 = 3.0 * params.gamma**2 / (128.0 * params.omega_n**2)
        quartic = [c**2 + P**2, -4.0 * P * b3, 3.0 * b3**2 - 6.0 * P * b5,
                   8.0 * b3 * b5, 5.0 * b5**2]
        for s in real_positive_roots(quartic):
            a_b = float(np.sqrt(s))
            Q = P - b3 * s - b5 * s**2
            g2 = c**2 * s + Q**2 * s
            if g2 <= 0.0:
                continue
            resid = float(np.polyval(quartic[::-1], s))
            locus.add(Om, _amp_from_g(np.sqrt(g2), Om, params), a_b, resid)
    return locus.sort()


def cf_intrawell_locus(params: NondimParams, Omega_grid):
    """Cyclic-fold pair of the intra-well resonant branch.

    Folds satisfy ``3 kappa^2 s^2 + 4 sigma' kappa s + sigma'^2 + c^2 = 0``
    with ``s = a^2``; the two roots trace the high- and low-amplitude folds
    (returned as ``Cf2`` and ``Cf3``), coalescing where the discriminant
    ``sigma'^2 - 3 c^2`` vanishes.
    """
    wo = params.omega_o
    xi0, xib0 = xi_constants(wo, params.kernel)
    c = 0.5 * (params.delta1 * xib0 + params.delta2)
    kap = params.kappa
    cf2 = BifurcationLocus("Cf2")
    cf3 = BifurcationLocus("Cf3")
    for Om in np.asarray(Omega_grid, dtype=float):
        sp = (Om - wo) - 0.5 * params.delta1 * xi0
        disc = sp**2 - 3.0 * c**2
        if disc < 0.0:
            continue
        r = np.sqrt(disc)
        for locus, s in ((cf2, (-2.0 * sp + r) / (3.0 * kap)),
                         (cf3, (-2.0 * sp - r) / (3.0 * kap))):
            if s <= 0.0:
                continue
            G2 = s * ((sp + kap * s)**2 + c**2)
            g = 2.0 * wo * np.sqrt(G2)
            resid = 3.0 * kap**2 * s**2 + 4.0 * sp * kap * s + sp**2 + c**2
            locus.add(Om, _amp_from_g(g, Om, params), np.sqrt(s), resid)
    cf2.sort()
    cf3.sort()
    if kap > 0.0:
        cf2.kind, cf3.kind = cf3.kind, cf2.kind
        cf2, cf3 = cf3, cf2
    return {"Cf2": cf2, "Cf3": cf3}


# ---------------------------------------------------------------------------
# period doubling
# ---------------------------------------------------------------------------

def _pd_residual(Omega: float, a0: float, params: NondimParams):
    """Residual of the subharmonic-instability boundary at (Omega, a0).

    The boundary balances the detuning of the forcing from twice the
    perturbation frequency ``sqrt(G0)`` (with its radiation shift) against
    the leading parametric-term amplitude ``G1``.
    """
    gc = g_constants(a0, params)
    if gc.G0 <= 0.0:
        return None
    w = np.sqrt(gc.G0)
    xi2, xib2 = xi_constants(w, params.kernel)
    d1, d2 = params.delta1, params.delta2
    return ((w * Omega - 2.0 * gc.G0 - d1 * w * xi2)**2
            + (d1 * w * xib2 + d2 * w)**2
            - gc.G1**2 / 4.0)


def _pd_branch_amplitude(Omega: float, g: float, params: NondimParams):
    """Amplitude of the intra-well branch used for the pd boundary (the
    largest steady-state root at this frequency and forcing)."""
    try:
        states = intrawell_steady_states(Omega, g, params)
    except ValueError:
        return None
    if not states:
        return None
    return max(st.a0 for st in states)


def pd_crossings(params: NondimParams, amplitude_ratio: float,
                 Omega_range=(0.9, 1.9), n_grid=200):
    """Frequencies where the pd residual changes sign at fixed amplitude.

    Scans the frequency range on a uniform grid following the largest
    intra-well root and refines each sign change by bisection.
    """
    Oms = np.linspace(Omega_range[0], Omega_range[1], n_grid + 1)

    def resid(Om):
        g = g_wave(amplitude_ratio, Om, params)
        a0 = _pd_branch_amplitude(Om, g, params)
        if a0 is None:
            return None
        return _pd_residual(Om, a0, params)

    out = []
    prev = None
    for Om in Oms:
        r = resid(Om)
        if r is None:
            prev = None
            continue
        if prev is not None and prev[1] * r < 0.0:
            root = bracket_root(lambda x: resid(x), prev[0], Om)
            out.append(float(root))
        prev = (Om, r)
    return out


def pd_locus(params: NondimParams, Omega_grid,
             amp_range=(1e-4, 0.4)) -> BifurcationLocus:
    """First period-doubling locus: for each frequency, the wave amplitude
    at which the intra-well branch loses subharmonic stability.

    At fixed Omega the residual is scanned in amplitude ratio and the
    lowest sign change is refined by bisection.
    """
    locus = BifurcationLocus("PD")
    for Om in np.asarray(Omega_grid, dtype=float):

        def resid_amp(A):
            g = g_wave(A, Om, params)
            a0 = _pd_branch_amplitude(Om, g, params)
            if a0 is None:
                return None
            return _pd_residual(Om, a0, params)

        grid = np.linspace(amp_range[0], amp_range[1], 120)
        prev = None
        found = None
        for A in grid:
            r = resid_amp(A)
            if r is None:
                prev = None
                continue
            if prev is not None and prev[1] * r < 0.0:
                found = bracket_root(lambda x: resid_amp(x), prev[0], A)
                break
            prev = (A, r)
        if found is None:
            continue
        g = g_wave(found, Om, params)
        a_b = _pd_branch_amplitude(Om, g, params)
        locus.add(Om, found, a_b, resid_amp(found))
    return locus.sort()


# ---------------------------------------------------------------------------
# symmetry breaking
# ---------------------------------------------------------------------------

def _sb_metric(params, amplitude_ratio, n_steps):
    """Floquet metric minus one, with nonexistent branches mapped to +inf."""
    def metric(Om):
        try:
            g = g_wave(amplitude_ratio, Om, params)
        except ValueError:
            return np.inf
        m, _ = interwell_stability_metric(Om, g, params, n_steps)
        return np.inf if m is None else m - 1.0
    return metric


def sb_intervals(params: NondimParams, amplitude_ratio: float,
                 Omega_range=(0.35, 1.0), step=0.01, tol=1e-4,
                 n_steps=2000):
    """Maximal stable windows of the inter-well branch at fixed amplitude.

    The stability metric (max Floquet-multiplier magnitude of the most
    stable branch root) is scanned over the frequency range; each edge
    where it crosses one — including edges where the branch terminates by
    fold, carrying its +1 multiplier out of existence — is refined by
    bisection to ``tol``.  Returns a list of (low, high) frequency pairs.
    """
    metric = _sb_metric(params, amplitude_ratio, n_steps)
    grid = np.arange(Omega_range[0], Omega_range[1] + step / 2, step)
    vals = [metric(Om) for Om in grid]

    def refine(lo, hi, stable_lo):
        # invariant: exactly one of metric(lo), metric(hi) is below zero
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if (metric(mid) < 0.0) == stable_lo:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    out = []
    start = None
    for i, Om in enumerate(grid):
        stable = vals[i] < 0.0
        if stable and start is None:
            if i == 0:
                start = float(Om)
            else:
                start = refine(float(grid[i - 1]), float(Om), False)
        elif not stable and start is not None:
            out.append((start, refine(float(grid[i - 1]), float(Om), True)))
            start = None
    if start is not None:
        out.append((start, float(grid[-1])))
    return out


#: Minimum credible window width — two frequency-scan steps.  Narrower
#: windows are below the resolution of the truncated-harmonic variational
#: model and are treated as spurious.
SB_MIN_WIDTH = 0.02


def sb_window(params: NondimParams, amplitude_ratio: float,
              Omega_range=(0.35, 1.0), step=0.01, tol=1e-4, n_steps=2000,
              min_width=SB_MIN_WIDTH):
    """Effective bandwidth ``(SB1, SB2)`` at fixed amplitude.

    The bandwidth is the widest stable window of the inter-well branch that
    is at least ``min_width`` wide; narrow spurious slivers from the
    truncated-harmonic variational model are thereby excluded.  Returns
    ``None`` when no such window exists.
    """
    ivals = sb_intervals(params, amplitude_ratio, Omega_range, step, tol,
                         n_steps)
    ivals = [iv for iv in ivals if iv[1] - iv[0] >= min_width]
    if not ivals:
        return None
    return max(ivals, key=lambda iv: iv[1] - iv[0])


def sb_locus(params: NondimParams, amplitude_grid,
             Omega_range=(0.35, 1.0), step=0.01, tol=1e-4, n_steps=2000,
             min_width=SB_MIN_WIDTH):
    """SB1/SB2 loci over a grid of wave amplitudes.

    Per amplitude row the edges of the effective bandwidth are emitted as
    SB1 (lower) and SB2 (upper); rows with no stable window are skipped.
    """
    sb1 = BifurcationLocus("SB1")
    sb2 = BifurcationLocus("SB2")
    for A in np.asarray(amplitude_grid, dtype=float):
        win = sb_window(params, float(A), Omega_range, step, tol, n_steps,
                        min_width)
        if win is None:
            continue
        for locus, Om in ((sb1, win[0]), (sb2, win[1])):
            g = g_wave(float(A), Om, params)
            m, a_b = interwell_stability_metric(Om, g, params, n_steps)
            locus.add(Om, A, a_b if a_b is not None else np.nan,
                      (m - 1.0) if m is not None else np.nan)
    sb1.sort()
    sb2.sort()
    return {"SB1": sb1, "SB2": sb2}
