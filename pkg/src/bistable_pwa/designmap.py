"""Design maps over the (wave amplitude, frequency) plane.

The plane is partitioned analytically: the symmetry-breaking windows give
the region with a stable symmetric inter-well orbit, the first
period-doubling boundary gives the cascade/chaos side of the intra-well
branch, and the fold loci bound branch existence.  Each cell receives one
of six region labels; an optional verification pass re-classifies a sample
of cells with the time-domain simulator and records disagreements.

Critical amplitudes:

* ``cr1`` — amplitude where the lower symmetry-breaking curve crosses the
  upper inter-well fold curve; above it the effective bandwidth is no
  longer limited by loss of stability on the low-frequency side, i.e. the
  bandwidth has reached its full extent;
* ``cr2`` — lowest amplitude with a credible stable inter-well window
  (birth of the effective bandwidth and of the ``B_L`` region);
* ``cr3`` — lowest amplitude reached by any bifurcation locus.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bifurcation import (
    SB_MIN_WIDTH,
    BifurcationLocus,
    _pd_branch_amplitude,
    _pd_residual,
    cf1_locus,
    cf_intrawell_locus,
    pd_locus,
    sb_intervals,
    sb_locus,
    sb_window,
)
from .hydro import g_wave
from .mms import interwell_steady_states, intrawell_steady_states
from .params import NondimParams
from .simulate import classify, simulate

__all__ = [
    "REGION_LABELS",
    "DesignMapConfig",
    "DesignMap",
    "build_design_map",
    "critical_amplitudes",
    "bandwidth_width",
    "power_map",
    "labels_compatible",
]

REGION_LABELS = ("B_r", "B_L", "CH", "B_L+CH", "CH+B_L+B_n", "nT+CH")


def _n_workers():
    try:
        return max(1, int(os.environ.get("BPWA_THREADS", "1")))
    except ValueError:
        return 1


@dataclass
class DesignMapConfig:
    """Grids and options for one design map."""

    params: NondimParams = field(default_factory=NondimParams)
    amp_range: tuple = (0.0, 0.2)
    amp_step: float = 0.005
    omega_range: tuple = (0.2, 2.0)
    omega_step: float = 0.01
    sb_omega_range: tuple = (0.3, 1.2)
    verify_fraction: float = 0.0
    verify_seed: int = 0

    def amps(self):
        lo, hi = self.amp_range
        n = int(round((hi - lo) / self.amp_step))
        return lo + self.amp_step * np.arange(n + 1)

    def omegas(self):
        lo, hi = self.omega_range
        n = int(round((hi - lo) / self.omega_step))
        return lo + self.omega_step * np.arange(n + 1)


@dataclass
class DesignMap:
    """Region labels on the (amplitude, frequency) grid plus overlaid loci."""

    amps: np.ndarray
    omegas: np.ndarray
    labels: np.ndarray  # object array, shape (len(amps), len(omegas))
    loci: dict  # kind -> BifurcationLocus
    cr1: float | None
    cr2: float | None
    cr3: float | None
    disagreements: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)


def _cell_label(A, Om, params, bl_stable):
    """Analytic region label of one cell."""
    if A <= 0.0:
        return "B_r"
    g = g_wave(A, Om, params)
    try:
        intra = intrawell_steady_states(Om, g, params)
    except ValueError:
        intra = []
    intra_stable = any(st.stable for st in intra)
    a_big = max((st.a0 for st in intra), default=None)
    pd_in = False
    if a_big is not None:
        r = _pd_residual(Om, a_big, params)
        pd_in = r is not None and r < 0.0
    if bl_stable:
        if pd_in:
            return "CH+B_L+B_n" if intra_stable else "B_L+CH"
        return "B_L"
    if pd_in:
        return "nT+CH" if intra_stable else "CH"
    if not intra_stable:
        bl_exists = bool(interwell_steady_states(Om, g, params))
        return "B_L+CH" if bl_exists else "CH"
    return "B_r"


def build_design_map(config: DesignMapConfig) -> DesignMap:
    """Assemble the analytic design map (and optional verification pass)."""
    p = config.params
    amps = config.amps()
    omegas = config.omegas()
    labels = np.empty((amps.size, omegas.size), dtype=object)

    def row_windows(A):
        if A <= 0.0:
            return []
        ivals = sb_intervals(p, float(A), Omega_range=config.sb_omega_range)
        return [iv for iv in ivals if iv[1] - iv[0] >= SB_MIN_WIDTH]

    workers = _n_workers()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            windows = list(ex.map(row_windows, amps))
    else:
        windows = [row_windows(A) for A in amps]

    for i, A in enumerate(amps):
        ivals = windows[i]
        for j, Om in enumerate(omegas):
            stable = any(lo <= Om <= hi for lo, hi in ivals)
            labels[i, j] = _cell_label(float(A), float(Om), p, stable)

    loci = {"Cf1": cf1_locus(p, omegas)}
    loci.update(cf_intrawell_locus(p, omegas))
    loci["PD"] = pd_locus(p, omegas)
    sb = sb_locus(p, amps[amps > 0.0], Omega_range=config.sb_omega_range)
    loci.update(sb)

    dmap = DesignMap(amps, omegas, labels, loci, None, None, None)
    dmap.cr1, dmap.cr2, dmap.cr3 = critical_amplitudes(dmap)
    if config.verify_fraction > 0.0:
        _verify(dmap, config)
    return dmap


# ---------------------------------------------------------------------------
# critical amplitudes
# ---------------------------------------------------------------------------

def _locus_min_amp(locus: BifurcationLocus):
    return min((pt[1] for pt in locus.points), default=None)


def critical_amplitudes(dmap: DesignMap):
    """(cr1, cr2, cr3) from the assembled loci.

    Absent values are ``None`` with an explanation recorded in
    ``dmap.diagnostics``.
    """
    sb1 = dmap.loci.get("SB1")
    cr2 = _locus_min_amp(sb1) if sb1 is not None else None
    if cr2 is None:
        dmap.diagnostics["cr2_missing"] = (
            "no stable inter-well window within the amplitude grid")

    # cr1: where the lower symmetry-breaking curve, followed upward in
    # amplitude, crosses the upper (branch-death) fold curve.
    cr1 = None
    cf1 = dmap.loci.get("Cf1")
    if sb1 is not None and cf1 is not None and sb1.points and cf1.points:
        upper = {}
        for Om, A, _a in cf1.points:
            upper[Om] = max(A, upper.get(Om, -np.inf))
        oms = np.array(sorted(upper))
        fold_amp = np.array([upper[o] for o in oms])
        prev = None
        for Om, A, _a in sorted(sb1.points, key=lambda pt: pt[1]):
            if not oms[0] <= Om <= oms[-1]:
                prev = None
                continue
            diff = A - float(np.interp(Om, oms, fold_amp))
            if prev is not None and prev[1] < 0.0 <= diff:
                A0, d0 = prev
                cr1 = float(A0 + (A - A0) * d0 / (d0 - diff))
                break
            prev = (A, diff)
    if cr1 is None:
        dmap.diagnostics["cr1_missing"] = (
            "symmetry-breaking and fold curves do not cross within the "
            "amplitude grid")

    mins = [m for m in (_locus_min_amp(l) for l in dmap.loci.values())
            if m is not None]
    cr3 = min(mins) if mins else None
    if cr3 is None:
        dmap.diagnostics["cr3_missing"] = "no locus points on the grid"
    return cr1, cr2, cr3


def bandwidth_width(params: NondimParams, amplitude_ratio: float, **kw):
    """Width of the effective bandwidth at one amplitude (0 when absent)."""
    win = sb_window(params, amplitude_ratio, **kw)
    return 0.0 if win is None else win[1] - win[0]


# ---------------------------------------------------------------------------
# verification and power maps
# ---------------------------------------------------------------------------

_NUMERIC_COMPAT = {
    "P1-intra": ("B_r", "CH+B_L+B_n", "nT+CH"),
    "P1-inter-symmetric": ("B_L", "B_L+CH", "CH+B_L+B_n"),
    "P1-inter-asymmetric": ("B_L+CH", "CH+B_L+B_n", "CH", "nT+CH"),
    "chaotic": ("CH", "B_L+CH", "CH+B_L+B_n", "nT+CH"),
}


def labels_compatible(numeric_label: str, region_label: str) -> bool:
    """Whether a simulated classification is consistent with a region label."""
    if numeric_label.startswith("P") and numeric_label[1:].isdigit():
        return region_label in ("nT+CH", "CH+B_L+B_n", "B_L+CH")
    return region_label in _NUMERIC_COMPAT.get(numeric_label, ())


def _verify(dmap: DesignMap, config: DesignMapConfig):
    """Re-classify a deterministic sample of cells with the simulator."""
    rng = np.random.default_rng(config.verify_seed)
    p = config.params
    cells = [(i, j) for i in range(dmap.amps.size)
             for j in range(dmap.omegas.size) if dmap.amps[i] > 0.0]
    n = max(1, int(len(cells) * config.verify_fraction))
    idx = rng.choice(len(cells), size=n, replace=False)

    def check(k):
        i, j = cells[k]
        A, Om = float(dmap.amps[i]), float(dmap.omegas[j])
        try:
            traj = simulate(p, Om, A, n_periods=228)
        except FloatingPointError:
            return (A, Om, "diverged", dmap.labels[i, j])
        lab = classify(traj, p, discard=100).label
        if labels_compatible(lab, dmap.labels[i, j]):
            return None
        return (A, Om, lab, dmap.labels[i, j])

    workers = _n_workers()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(check, sorted(idx)))
    else:
        results = [check(k) for k in sorted(idx)]
    dmap.disagreements = [r for r in results if r is not None]
    dmap.diagnostics["verified_cells"] = n
    dmap.diagnostics["agreement"] = 1.0 - len(dmap.disagreements) / n


def power_map(params: NondimParams, amps, omegas, n_periods=200,
              window_periods=64):
    """Numeric average-power grid from fixed-(0, 0) initial conditions.

    Cells whose simulation diverges are recorded as NaN.
    """
    from .simulate import numeric_power

    amps = np.asarray(amps, dtype=float)
    omegas = np.asarray(omegas, dtype=float)

    def cell(args):
        A, Om = args
        if A <= 0.0:
            return 0.0
        try:
            traj = simulate(params, Om, A, n_periods=n_periods)
            return numeric_power(traj, params, window_periods)
        except (FloatingPointError, ValueError):
            return np.nan

    jobs = [(float(A), float(Om)) for A in amps for Om in omegas]
    workers = _n_workers()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            vals = list(ex.map(cell, jobs))
    else:
        vals = [cell(j) for j in jobs]
    return np.array(vals).reshape(amps.size, omegas.size)
