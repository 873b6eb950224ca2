import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rarelab.flux_laws import ConvexFlux, ViscosityLaw
from rarelab.pde_solver import (
    ConfigError, GridSolution, InitialData, NumericalBlowupError, RunMonitor, SolverConfig, build_initial,
    heat_oracle_config, read_snapshot_csv, solve, stable_dt, step, write_snapshot_csv,
)
from rarelab.wave_profiles import contact_wave, profile_value, smoothed_rarefaction

BURGERS = ConvexFlux.burgers()
ZERO = ConvexFlux.zero()


def flat_config(flux, law, n=400, half=20.0, t_end=1.0, initial=None, **kw):
    initial = initial if initial is not None else InitialData.constant_plus_bump(0.0)
    return SolverConfig(flux, law, initial, -half, half, n, t_end, **kw)


# --- stable_dt ------------------------------------------------------------------

def test_stable_dt_heat():
    cfg = flat_config(ZERO, ViscosityLaw.linear(1.0), n=400)  # dx = 0.1
    assert stable_dt(build_initial(cfg), cfg) == pytest.approx(0.004, rel=1e-12)


def test_stable_dt_burgers_flat_zero_uses_diffusion_bound():
    cfg = flat_config(BURGERS, ViscosityLaw.linear(2.0), n=400)
    assert stable_dt(build_initial(cfg), cfg) == pytest.approx(0.4 * 0.01 / 2.0, rel=1e-12)


def test_stable_dt_shear_thinning_bound_is_mu():
    cfg = SolverConfig(BURGERS, ViscosityLaw.regularized(0.5, 1.5), InitialData.constant_plus_bump(0.0, 0.3, 0, 1),
                       -20, 20, 400, 1.0)
    state = build_initial(cfg)
    adv = 0.2 * 0.1 / np.max(np.abs(state.values))
    assert stable_dt(state, cfg) == pytest.approx(min(adv, 0.4 * 0.01 / 1.5), rel=1e-12)


def test_stable_dt_lands_on_snapshot():
    cfg = flat_config(ZERO, ViscosityLaw.linear(1.0), n=400, snapshot_times=(0.001,))
    assert stable_dt(build_initial(cfg), cfg) == pytest.approx(0.001)


# --- build_initial ------------------------------------------------------------

def test_build_constant_state():
    cfg = flat_config(BURGERS, ViscosityLaw.regularized(0.5))
    assert np.all(build_initial(cfg).values == 0.0)


def test_build_profile_without_bump_samples_profile():
    prof = smoothed_rarefaction(BURGERS, -1.0, 1.0, 1.0)
    cfg = SolverConfig(BURGERS, ViscosityLaw.regularized(0.5), InitialData.profile_plus_bump(prof, 0.0),
                       -30, 30, 301, 5.0)
    state = build_initial(cfg)
    assert np.allclose(state.values[1:-1], profile_value(prof, 0.0, state.x[1:-1]), atol=0, rtol=0)
    assert (state.values[0], state.values[-1]) == (-1.0, 1.0)


def test_build_mollified_riemann_centre():
    cfg = SolverConfig(BURGERS, ViscosityLaw.regularized(0.5),
                       InitialData.mollified_riemann(BURGERS, -1.0, 1.0, 1.0), -30, 30, 301, 5.0)
    state = build_initial(cfg)
    assert state.values[150] == pytest.approx(0.0, abs=1e-15)
    assert state.x[150] == pytest.approx(0.0, abs=1e-12)


def test_grid_spacing_exact():
    s = GridSolution(-3.0, 7.0, 40, np.zeros(40), 0.0, 0.0, 0.0)
    assert s.dx == 10.0 / 40


def test_domain_too_small_is_config_error():
    prof = smoothed_rarefaction(BURGERS, -1.0, 1.0)
    cfg = SolverConfig(BURGERS, ViscosityLaw.regularized(0.5), InitialData.profile_plus_bump(prof), -50, 50, 100, 100.0)
    with pytest.raises(ConfigError):
        build_initial(cfg)


def test_small_margin_is_config_error():
    with pytest.raises(ConfigError):
        build_initial(flat_config(BURGERS, ViscosityLaw.linear(), margin=10.0))


@pytest.mark.parametrize("kw", [dict(cfl_advection=0.0), dict(cfl_diffusion=0.6), dict(limiter="weno"),
                                dict(boundary="periodic"), dict(t_end=-1.0)])
def test_config_validation(kw):
    with pytest.raises(ConfigError):
        flat_config(BURGERS, ViscosityLaw.linear(), **kw)


# --- step -----------------------------------------------------------------------

def test_constant_state_unchanged():
    cfg = SolverConfig(BURGERS, ViscosityLaw.regularized(0.5), InitialData.constant_plus_bump(0.7), -25, 25, 64, 1.0)
    state = build_initial(cfg)
    nxt = step(state, stable_dt(state, cfg), cfg)
    assert np.array_equal(nxt.values, state.values)


def test_heat_stencil_hand_computed():
    # dx = 1, dt = 0.2, pinned zero ends:
    # u1 = [0, .2, .6, .2, 0], u1 + dt L u1 = [0, .24, .44, .24, 0], average -> [0, .12, .72, .12, 0]
    cfg = SolverConfig(ZERO, ViscosityLaw.linear(1.0), InitialData.constant_plus_bump(0.0), -2.5, 2.5, 5, 1.0)
    state = GridSolution(-2.5, 2.5, 5, np.array([0.0, 0.0, 1.0, 0.0, 0.0]), 0.0, 0.0, 0.0)
    out = step(state, 0.2, cfg)
    assert np.allclose(out.values, [0.0, 0.12, 0.72, 0.12, 0.0], atol=1e-15)
    assert out.t == 0.2


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([0.4, 0.5, 1.0, 1.5]))
def test_monotone_data_stays_monotone(seed, p):
    rng = np.random.default_rng(seed)
    u = np.sort(rng.uniform(-1.0, 1.0, 64))
    u[0], u[-1] = -1.0, 1.0
    law = ViscosityLaw.regularized(p)
    cfg = SolverConfig(BURGERS, law, InitialData.constant_plus_bump(0.0), -3.2, 3.2, 64, 1.0)
    state = GridSolution(-3.2, 3.2, 64, u, 0.0, -1.0, 1.0)
    for _ in range(20):
        state = step(state, stable_dt(state, cfg), cfg)
        assert np.all(np.diff(state.values) >= -1e-14)


def test_blowup_names_time():
    cfg = flat_config(ZERO, ViscosityLaw.linear(1.0), n=400, dt_override=0.05, t_end=50.0,
                      initial=InitialData.constant_plus_bump(0.0, 1.0, 0.0, 1.0))
    with pytest.raises(NumericalBlowupError) as info:
        solve(cfg)
    assert 0 < info.value.t <= 50.0
    assert "t=" in str(info.value)


# --- solve ----------------------------------------------------------------------

def test_t_end_zero_returns_initial():
    cfg = flat_config(BURGERS, ViscosityLaw.regularized(0.5), t_end=0.0,
                      initial=InitialData.constant_plus_bump(0.0, 1.0, 0.0, 1.0))
    snaps = solve(cfg)
    assert len(snaps) == 1 and snaps[0][0] == 0.0
    assert np.array_equal(snaps[0][1].values, build_initial(cfg).values)


def test_snapshots_at_requested_times():
    times = (0.1, 0.37, 1.0, 2.5)
    cfg = flat_config(BURGERS, ViscosityLaw.regularized(0.5), n=200, t_end=3.0, snapshot_times=times,
                      initial=InitialData.constant_plus_bump(0.0, 1.0, 0.0, 1.0))
    snaps = solve(cfg)
    assert [t for t, _ in snaps] == [0.1, 0.37, 1.0, 2.5, 3.0]
    assert all(s.t == t for t, s in snaps)


def test_heat_oracle_single_grid():
    cfg = heat_oracle_config(0.1)
    t, state = solve(cfg)[-1]
    exact = profile_value(contact_wave(0.0, 1.0, 1.0), 2.0, state.x)
    assert t == 2.0
    assert np.max(np.abs(state.values - exact)) <= 5 * 0.1**2 * 1.0


@pytest.mark.parametrize("flux,p,boundary", [
    (BURGERS, 0.5, "pinned"), (BURGERS, 1.5, "profile"), (ConvexFlux.exponential(), 0.5, "pinned"),
    (BURGERS, 0.5, "outflow"),
])
def test_conservation_and_maximum_principle(flux, p, boundary):
    um, up = (-1.0, 1.0) if flux.kind.value == "burgers" else (0.0, 1.0)
    prof = smoothed_rarefaction(flux, um, up, 1.0)
    lo = min(um, flux.df(np.asarray(um)) * 20.0) - 25.0
    cfg = SolverConfig(flux, ViscosityLaw.regularized(p), InitialData.profile_plus_bump(prof, 0.4, 1.0, 1.5),
                       float(lo), 3.0 * 20.0 + 25.0, 1200, 20.0, boundary=boundary)
    mon = RunMonitor()
    solve(cfg, mon)
    assert mon.relative_mass_defect() <= 1e-10
    assert mon.max_overshoot <= 1e-10 and mon.max_undershoot <= 1e-10


def test_profile_boundary_tracks_reference():
    prof = smoothed_rarefaction(BURGERS, -1.0, 1.0, 1.0)
    cfg = SolverConfig(BURGERS, ViscosityLaw.regularized(0.5), InitialData.profile_plus_bump(prof), -40, 40, 400, 10.0,
                       boundary="profile")
    state = solve(cfg)[-1][1]
    ends = profile_value(prof, 10.0, np.array([state.x[0], state.x[-1]]))
    assert np.allclose([state.values[0], state.values[-1]], ends, atol=1e-15)


def test_pinned_far_fields_hold_for_fast_tails():
    prof = smoothed_rarefaction(BURGERS, -1.0, 1.0, 10.0)
    cfg = SolverConfig(BURGERS, ViscosityLaw.regularized(0.5), InitialData.profile_plus_bump(prof, 0.5), -60, 60, 600,
                       20.0, snapshot_times=(5.0, 10.0))
    for _, state in solve(cfg):
        assert abs(state.values[0] + 1.0) <= 1e-8 and abs(state.values[-1] - 1.0) <= 1e-8
        assert abs(state.values[1] + 1.0) <= 1e-8 and abs(state.values[-2] - 1.0) <= 1e-8


def test_self_convergence_second_order():
    # smooth data, limited reconstruction, reference-tracking ends
    prof = smoothed_rarefaction(BURGERS, -1.0, 1.0, 1.0)
    sols = []
    for n in (400, 800, 1600):
        cfg = SolverConfig(BURGERS, ViscosityLaw.regularized(0.5), InitialData.profile_plus_bump(prof, 0.0),
                           -25, 25, n, 4.0, limiter="minmod", boundary="profile")
        sols.append(solve(cfg)[-1][1].values)
    coarse = lambda v: 0.5 * (v[0::2] + v[1::2])
    e1 = np.max(np.abs(sols[0] - coarse(sols[1])))
    e2 = np.max(np.abs(sols[1] - coarse(sols[2])))
    assert 3.2 <= e1 / e2 <= 4.8


def test_deterministic_csv(tmp_path):
    cfg = flat_config(BURGERS, ViscosityLaw.regularized(0.5), n=100, t_end=1.0, snapshot_times=(0.5,),
                      initial=InitialData.constant_plus_bump(0.0, 1.0, 0.0, 1.0))
    a, b = tmp_path / "a", tmp_path / "b"
    a.mkdir(), b.mkdir()
    for _, s in solve(cfg):
        write_snapshot_csv(s, a)
    for _, s in solve(cfg):
        write_snapshot_csv(s, b)
    names = sorted(p.name for p in a.iterdir())
    assert names == ["snap_0.500000.csv", "snap_1.000000.csv"]
    for name in names:
        assert (a / name).read_bytes() == (b / name).read_bytes()
    back = read_snapshot_csv(a / "snap_1.000000.csv")
    assert back.t == 1.0 and back.n_cells == 100
    assert np.array_equal(back.values, solve(cfg)[-1][1].values)
    assert (a / "snap_0.500000.csv").read_text().splitlines()[0] == "t,x,u"
