"""Ground-truth time-domain simulation of the full dimensionless system.

The radiation convolution is carried by the realized three-state kernel, so
the full state is ``(Y, Ydot, x1, x2, x3, v)``:

    Y'' = -delta1 * (C x) - delta2 * Y' + omega_n^2 Y - gamma Y^3
          + g cos(Omega t),
    x'  = A x + B Y',
    v'  = -theta v + Y'.

Integration is fixed-step RK4 (numba-compiled) with exact landing on
multiples of the forcing period for stroboscopic sampling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .hydro import g_wave
from .numerics import fft_magnitudes
from .params import NondimParams

__all__ = [
    "Trajectory",
    "simulate",
    "simulate_periods",
    "stroboscopic_map",
    "classify",
    "ResponseClassification",
    "numeric_power",
    "frequency_sweep",
    "basin_map",
]

DEFAULT_DT = 1e-3


@njit(cache=True, nogil=True)
def _rk4_run(state, t0, n_steps, dt, store_every,
             d1, d2, wn2, gam, th, g, Om, A, B, C):
    """Integrate n_steps of RK4, storing every ``store_every``-th sample."""
    n_out = n_steps // store_every + 1
    out = np.empty((n_out, 6))
    out[0] = state
    s = state.copy()
    k = np.empty(6)
    tmp = np.empty(6)
    ks = np.empty((4, 6))
    t = t0
    m = 1
    for i in range(n_steps):
        for stage in range(4):
            if stage == 0:
                tt = t
                for j in range(6):
                    tmp[j] = s[j]
            elif stage == 1 or stage == 2:
                tt = t + 0.5 * dt
                for j in range(6):
                    tmp[j] = s[j] + 0.5 * dt * ks[stage - 1, j]
            else:
                tt = t + dt
                for j in range(6):
                    tmp[j] = s[j] + dt * ks[2, j]
            Y = tmp[0]
            Yd = tmp[1]
            conv = C[0] * tmp[2] + C[1] * tmp[3] + C[2] * tmp[4]
            k[0] = Yd
            k[1] = (-d1 * conv - d2 * Yd + wn2 * Y - gam * Y * Y * Y
                    + g * np.cos(Om * tt))
            k[2] = A[0, 0] * tmp[2] + A[0, 1] * tmp[3] + A[0, 2] * tmp[4] + B[0] * Yd
            k[3] = A[1, 0] * tmp[2] + A[1, 1] * tmp[3] + A[1, 2] * tmp[4] + B[1] * Yd
            k[4] = A[2, 0] * tmp[2] + A[2, 1] * tmp[3] + A[2, 2] * tmp[4] + B[2] * Yd
            k[5] = -th * tmp[5] + Yd
            for j in range(6):
                ks[stage, j] = k[j]
        for j in range(6):
            s[j] += (dt / 6.0) * (ks[0, j] + 2.0 * ks[1, j]
                                  + 2.0 * ks[2, j] + ks[3, j])
        t = t0 + (i + 1) * dt
        if not np.isfinite(s[0]):
            return out[:m], t, s, False
        if (i + 1) % store_every == 0:
            out[m] = s
            m += 1
    return out[:m], t, s, True


@dataclass
class Trajectory:
    """Sampled trajectory with its sampling step and forcing data."""

    t: np.ndarray
    states: np.ndarray  # columns: Y, Ydot, x1, x2, x3, v
    Omega: float
    g: float
    samples_per_period: int

    @property
    def Y(self):
        return self.states[:, 0]

    @property
    def Ydot(self):
        return self.states[:, 1]

    @property
    def v(self):
        return self.states[:, 5]


def simulate_periods(params: NondimParams, Omega, g, initial=None,
                     n_periods=200, steps_per_period=None, store_every=None):
    """Simulate an integer number of forcing periods.

    The step is chosen as an exact divisor of the forcing period near the
    default dt so that strobe instants are hit exactly.
    """
    T = 2.0 * np.pi / Omega
    if steps_per_period is None:
        steps_per_period = max(200, int(np.ceil(T / DEFAULT_DT)))
    if store_every is None:
        store_every = max(1, steps_per_period // 200)
    # stored samples must land exactly on strobe instants
    steps_per_period = store_every * int(np.ceil(steps_per_period / store_every))
    dt = T / steps_per_period
    s0 = np.zeros(6) if initial is None else np.asarray(initial, dtype=float).copy()
    k = params.kernel
    out, t_end, s_end, ok = _rk4_run(
        s0, 0.0, n_periods * steps_per_period, dt, store_every,
        params.delta1, params.delta2, params.omega_n**2, params.gamma,
        params.theta, g, Omega, k.A, k.B, k.C,
    )
    if not ok:
        raise FloatingPointError(f"simulation diverged near t = {t_end:.3f}")
    t = np.arange(out.shape[0]) * (dt * store_every)
    traj = Trajectory(t, out, Omega, g, steps_per_period // store_every)
    traj.final_state = s_end
    return traj


def simulate(params: NondimParams, Omega, amplitude_ratio, initial=None,
             n_periods=200, **kw):
    """Simulate with the forcing derived from the wave amplitude ratio."""
    g = g_wave(amplitude_ratio, Omega, params)
    return simulate_periods(params, Omega, g, initial, n_periods, **kw)


def stroboscopic_map(traj: Trajectory, discard=100):
    """Per-period samples ``(Y, Ydot)`` after a transient discard.

    The integrator stores an integer number of samples per period, so strobe
    instants are exact sample points.
    """
    spp = traj.samples_per_period
    idx = np.arange(discard * spp, traj.states.shape[0], spp)
    if idx.size < 2:
        raise ValueError("trajectory too short for the requested discard")
    return traj.states[idx][:, :2]


@dataclass
class ResponseClassification:
    """Label plus diagnostics for one simulated steady state."""

    label: str
    period: int | None
    inter_well: bool
    mean_offset: float
    amplitude: float
    strobe_points: np.ndarray
    dominant_harmonics: np.ndarray


def _strobe_clusters(strobes, radius=1e-3, max_clusters=16):
    """Greedy clustering of strobe points ``(Y, Ydot)``.

    Returns the cluster count, or ``None`` when it exceeds ``max_clusters``
    (non-clustering cloud).  Cluster centers are running means so that a
    residual drift smaller than the radius does not split an orbit.
    """
    centers = []
    counts = []
    for pt in strobes:
        hit = None
        for i, c in enumerate(centers):
            if max(abs(pt[0] - c[0]), abs(pt[1] - c[1])) < radius:
                hit = i
                break
        if hit is None:
            centers.append(pt.copy())
            counts.append(1)
            if len(centers) > max_clusters:
                return None
        else:
            n = counts[hit] + 1
            centers[hit] += (pt - centers[hit]) / n
            counts[hit] = n
    return len(centers)


def _strobe_period(strobes, radius=1e-3, max_clusters=16):
    """Periodicity of the strobe sequence: the cluster count when the
    points cluster, ``None`` otherwise."""
    return _strobe_clusters(np.asarray(strobes, dtype=float), radius,
                            max_clusters)


def classify(traj: Trajectory, params: NondimParams, discard=100):
    """Classify the post-transient response.

    Labels: ``P1-intra``, ``P1-inter-symmetric``, ``P1-inter-asymmetric``,
    ``Pn`` (with the cluster count), ``chaotic``.
    """
    strobes = stroboscopic_map(traj, discard)
    period = _strobe_period(strobes)
    spp = traj.samples_per_period
    tail = traj.states[discard * spp:, 0]
    inter = bool(tail.max() > 0.0 and tail.min() < 0.0)
    mean = float(tail.mean())
    amp = float(0.5 * np.ptp(tail))
    n_win = 2 ** int(np.floor(np.log2(tail.size)))
    freqs, mags = fft_magnitudes(tail[-n_win:] - mean,
                                 traj.t[1] - traj.t[0])
    dom = freqs[np.argsort(mags)[::-1][:5]]
    if period is None:
        label = "chaotic"
    elif period == 1:
        if not inter:
            label = "P1-intra"
        elif abs(mean) <= 1e-2 * np.max(np.abs(tail)):
            label = "P1-inter-symmetric"
        else:
            label = "P1-inter-asymmetric"
    else:
        label = f"P{period}"
    return ResponseClassification(label, period, inter, mean, amp, strobes, dom)


def numeric_power(traj: Trajectory, params: NondimParams, window_periods=64):
    """Trapezoidal average of ``delta2 Ydot^2`` over trailing whole periods."""
    spp = traj.samples_per_period
    n = window_periods * spp
    if n + 1 > traj.states.shape[0]:
        raise ValueError("trajectory shorter than the averaging window")
    Yd = traj.states[-(n + 1):, 1]
    t = traj.t[-(n + 1):]
    return float(np.trapezoid(params.delta2 * Yd**2, t) / (t[-1] - t[0]))


def frequency_sweep(params: NondimParams, amplitude_ratio, Omega_grid,
                    ic_policy="fixed-zero", n_transient=300, n_strobes=64):
    """Stroboscopic bifurcation-diagram rows over a frequency grid.

    ``ic_policy`` is one of ``fixed-zero``, ``continuation-up``,
    ``continuation-down``; the continuation policies seed each run with the
    final state of the previous frequency.
    """
    grid = np.asarray(Omega_grid, dtype=float)
    if ic_policy == "continuation-down":
        order = np.argsort(grid)[::-1]
    elif ic_policy == "continuation-up":
        order = np.argsort(grid)
    elif ic_policy == "fixed-zero":
        order = np.arange(grid.size)
    else:
        raise ValueError(f"unknown ic policy: {ic_policy}")
    rows = []
    state = None
    for i in order:
        Om = float(grid[i])
        init = None if ic_policy == "fixed-zero" else state
        traj = simulate(params, Om, amplitude_ratio, initial=init,
                        n_periods=n_transient + n_strobes)
        state = traj.final_state
        strobes = stroboscopic_map(traj, discard=n_transient)
        cls = classify(traj, params, discard=n_transient)
        rows.append({"Omega": Om, "strobe_Y": strobes[:, 0],
                     "label": cls.label, "mean": cls.mean_offset,
                     "amplitude": cls.amplitude})
    rows.sort(key=lambda r: r["Omega"])
    return rows


def basin_map(params: NondimParams, Omega, amplitude_ratio,
              Y_grid, Ydot_grid, n_periods=250, discard=150):
    """Grid of response labels over initial conditions ``(Y0, Ydot0)``."""
    labels = np.empty((len(Y_grid), len(Ydot_grid)), dtype=object)
    for i, Y0 in enumerate(Y_grid):
        for j, V0 in enumerate(Ydot_grid):
            init = np.array([Y0, V0, 0.0, 0.0, 0.0, 0.0])
            traj = simulate(params, Omega, amplitude_ratio, initial=init,
                            n_periods=n_periods)
            labels[i, j] = classify(traj, params, discard=discard).label
    return labels
