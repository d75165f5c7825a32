"""Tests for the time-domain integrator and response classification."""

import numpy as np
import pytest

from bistable_pwa.hydro import g_wave
from bistable_pwa.params import NondimParams
from bistable_pwa.simulate import (
    Trajectory,
    basin_map,
    classify,
    frequency_sweep,
    numeric_power,
    simulate,
    simulate_periods,
    stroboscopic_map,
)


@pytest.fixture
def params():
    return NondimParams()


def rest_state(params, sign=-1.0):
    return np.array([sign * params.Y_s, 0.0, 0.0, 0.0, 0.0, 0.0])


# ---------------------------------------------------------------------------
# integrator basics
# ---------------------------------------------------------------------------

def test_equilibrium_is_stationary(params):
    traj = simulate_periods(params, 1.0, 0.0, initial=rest_state(params),
                            n_periods=20)
    assert np.max(np.abs(traj.Y + params.Y_s)) < 1e-10
    assert np.max(np.abs(traj.Ydot)) < 1e-10


def test_free_decay_settles_in_a_well(params):
    traj = simulate_periods(params, 1.0, 0.0,
                            initial=[0.05, 0.0, 0.0, 0.0, 0.0, 0.0],
                            n_periods=200)
    assert abs(abs(traj.Y[-1]) - params.Y_s) < 1e-6
    assert abs(traj.Ydot[-1]) < 1e-6


def test_energy_conserved_without_damping(params):
    cons = params.with_(delta1=0.0, delta2=0.0)
    traj = simulate_periods(cons, 1.0, 0.0,
                            initial=[0.05, 0.1, 0.0, 0.0, 0.0, 0.0],
                            n_periods=16)
    E = 0.5 * traj.Ydot**2 + cons.potential(traj.Y)
    assert np.max(np.abs(E - E[0])) < 1e-10


def test_samples_land_on_strobe_instants(params):
    traj = simulate(params, 0.73, 0.05, n_periods=12)
    T = 2.0 * np.pi / 0.73
    k = traj.samples_per_period
    assert traj.t[k] == pytest.approx(T, rel=1e-12)
    assert (traj.states.shape[0] - 1) % k == 0


def test_strobe_convergence_under_step_halving(params):
    Om, amp = 1.5, 0.1
    init = rest_state(params)
    vals = []
    for spp in (4200, 8400):
        traj = simulate(params, Om, amp, initial=init, n_periods=250,
                        steps_per_period=spp, store_every=spp // 200)
        vals.append(stroboscopic_map(traj, discard=240)[-1])
    assert np.max(np.abs(vals[0] - vals[1])) < 1e-5


def test_stroboscopic_map_requires_tail(params):
    traj = simulate(params, 1.0, 0.05, n_periods=20)
    with pytest.raises(ValueError):
        stroboscopic_map(traj, discard=20)


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

def test_classify_intrawell(params):
    traj = simulate(params, 1.5, 0.1, initial=rest_state(params),
                    n_periods=300)
    cls = classify(traj, params, discard=200)
    assert cls.label == "P1-intra"
    assert not cls.inter_well
    # clean periodic orbit: strobe points collapse to one tight cluster
    assert np.max(np.ptp(cls.strobe_points, axis=0)) < 1e-4


def test_classify_symmetric_interwell(params):
    traj = simulate(params, 0.62, 0.1, n_periods=364)
    cls = classify(traj, params, discard=300)
    assert cls.label == "P1-inter-symmetric"
    assert abs(cls.mean_offset) < 1e-2 * cls.amplitude


def test_classify_asymmetric_interwell(params):
    traj = simulate(params, 0.42, 0.1, n_periods=364)
    cls = classify(traj, params, discard=300)
    assert cls.label == "P1-inter-asymmetric"
    assert abs(cls.mean_offset) > 1e-2


def test_classify_chaotic(params):
    traj = simulate(params, 0.8, 0.1, n_periods=364)
    cls = classify(traj, params, discard=300)
    assert cls.label == "chaotic"
    assert cls.period is None


def test_p1_orbit_has_no_subharmonics(params):
    Om = 1.5
    traj = simulate(params, Om, 0.1, initial=rest_state(params),
                    n_periods=300)
    cls = classify(traj, params, discard=200)
    # dominant spectral content sits on harmonics of the forcing frequency
    for f in cls.dominant_harmonics:
        assert min(abs(f - m * Om) for m in range(6)) < 0.05


def test_classify_matches_slowflow_amplitude(params):
    from bistable_pwa.mms import interwell_steady_states

    Om, amp = 0.62, 0.1
    g = g_wave(amp, Om, params)
    st = [s for s in interwell_steady_states(Om, g, params) if s.stable][0]
    traj = simulate(params, Om, amp, n_periods=364)
    cls = classify(traj, params, discard=300)
    assert cls.amplitude == pytest.approx(st.a0, rel=0.10)


# ---------------------------------------------------------------------------
# power
# ---------------------------------------------------------------------------

def test_numeric_power_synthetic_cosine(params):
    Om, a = 0.9, 0.2
    spp = 500
    n_per = 80
    t = np.arange(n_per * spp + 1) * (2.0 * np.pi / Om / spp)
    states = np.zeros((t.size, 6))
    states[:, 0] = a * np.cos(Om * t)
    states[:, 1] = -a * Om * np.sin(Om * t)
    traj = Trajectory(t, states, Om, 0.0, spp)
    expect = 0.5 * params.delta2 * Om**2 * a**2
    assert numeric_power(traj, params) == pytest.approx(expect, rel=1e-6)


def test_numeric_power_at_rest(params):
    traj = simulate_periods(params, 1.0, 0.0, initial=rest_state(params),
                            n_periods=80)
    assert numeric_power(traj, params) < 1e-20


def test_numeric_power_window_guard(params):
    traj = simulate_periods(params, 1.0, 0.0, n_periods=10)
    with pytest.raises(ValueError):
        numeric_power(traj, params, window_periods=64)


# ---------------------------------------------------------------------------
# sweeps and basins
# ---------------------------------------------------------------------------

def test_frequency_sweep_rows(params):
    grid = [0.60, 0.62, 0.64]
    rows = frequency_sweep(params, 0.1, grid, ic_policy="fixed-zero",
                           n_transient=200, n_strobes=32)
    assert [r["Omega"] for r in rows] == grid
    assert all(r["strobe_Y"].size == 33 for r in rows)  # inclusive endpoint
    center = [r for r in rows if r["Omega"] == 0.62][0]
    assert center["label"] == "P1-inter-symmetric"


def test_frequency_sweep_rejects_bad_policy(params):
    with pytest.raises(ValueError):
        frequency_sweep(params, 0.1, [0.6], ic_policy="random")


def test_sweep_hysteresis_between_policies(params):
    # region with coexisting attractors: fixed-zero initial conditions land
    # on the chaotic/inter-well set while sweeping down from above keeps the
    # small intra-well orbit
    grid = [1.00, 1.05, 1.10, 1.15, 1.20, 1.25, 1.30]
    down = frequency_sweep(params, 0.1, grid, ic_policy="continuation-down",
                           n_transient=250, n_strobes=32)
    fixed = frequency_sweep(params, 0.1, [1.0], ic_policy="fixed-zero",
                            n_transient=250, n_strobes=32)
    down_1 = [r for r in down if r["Omega"] == 1.0][0]
    assert fixed[0]["label"] != down_1["label"]
    assert fixed[0]["amplitude"] > down_1["amplitude"]


def test_basin_map_labels(params):
    labels = basin_map(params, 1.5, 0.1,
                       Y_grid=[-params.Y_s, params.Y_s],
                       Ydot_grid=[0.0], n_periods=220, discard=150)
    assert labels.shape == (2, 1)
    assert all(lbl == "P1-intra" for lbl in labels.ravel())
