"""
有限体积求解器测试
"""

import numpy as np
import pytest

from solver import (
    InitialSpec,
    TorusGrid,
    build_test_bank,
    coarse_average,
    cutoff_weights,
    init_field,
    reference_solution,
    run,
    step,
    weak_residual,
)
from systems import get_system
from utils.errors import BlowupError, ConfigError, DomainError, GridError, ShockError
from utils.helpers import measured_rate

CONSERVATION_TOL = 1e-12


@pytest.fixture
def euler():
    return get_system("euler", gamma=2.0)


def smooth_spec(amplitude=0.05, phase=0.0):
    return InitialSpec("smooth-periodic", {"mean": [1.0, 0.0], "amplitude": [amplitude, 0.0], "phase": phase})


RIEMANN = InitialSpec("riemann", {"left": [2.0, 0.0], "right": [1.0, 0.0]})


# ─── grid ───────────────────────────────────────────────────────────

def test_grid_validation_collects_problems():
    with pytest.raises(GridError) as info:
        TorusGrid(d=3, N=8, T=0.1, cfl=1.5)
    assert "CFL" in str(info.value) and "d must be" in str(info.value)


def test_snapshot_times_land_on_T():
    grid = TorusGrid(d=1, N=8, T=0.1, snapshot_dt=0.03)
    times = grid.snapshot_times()
    assert times[0] == 0.0 and times[-1] == 0.1
    assert np.all(np.diff(times) > 0)


def test_coarse_average_of_blocks():
    values = np.arange(8.0)[:, None]
    np.testing.assert_allclose(coarse_average(values, 1, 4)[:, 0], [1.5, 5.5])


# ─── initial data ───────────────────────────────────────────────────

def test_constant_initial_data(euler):
    grid = TorusGrid(d=1, N=8, T=0.1)
    field = init_field(euler, grid, InitialSpec("constant", {"state": [1.0, 0.0]}))
    np.testing.assert_array_equal(field.v, np.tile([1.0, 0.0], (8, 1)))


def test_oscillatory_initial_data_alternates(euler):
    grid = TorusGrid(d=1, N=8, T=0.1)
    spec = InitialSpec("oscillatory", {"state_a": [1.0, 0.0], "state_b": [2.0, 0.0], "frequency": 1})
    field = init_field(euler, grid, spec)
    np.testing.assert_array_equal(field.v[:, 0], [1.0, 2.0] * 4)


def test_smooth_initial_data_matches_midpoint_rule(euler):
    grid = TorusGrid(d=1, N=64, T=0.1)
    field = init_field(euler, grid, smooth_spec(amplitude=0.2))
    x = grid.centers()[0]
    midpoint = 1.0 + 0.2 * np.sin(2 * np.pi * x)
    assert np.max(np.abs(field.v[:, 0] - midpoint)) <= 10.0 * grid.h ** 2


def test_initial_state_outside_domain(euler):
    grid = TorusGrid(d=1, N=8, T=0.1)
    with pytest.raises(DomainError):
        init_field(euler, grid, InitialSpec("constant", {"state": [-1.0, 0.0]}))


def test_unknown_initial_kind():
    with pytest.raises(ConfigError):
        InitialSpec("vortex")


def test_incompressible_systems_have_no_solver():
    grid = TorusGrid(d=2, N=8, T=0.1)
    with pytest.raises(ConfigError):
        init_field(get_system("inc-euler"), grid, InitialSpec("constant", {"state": [0.0, 0.0]}))


def test_recovered_state_inverts_conserved(euler):
    grid = TorusGrid(d=1, N=32, T=0.1)
    field = init_field(euler, grid, smooth_spec(amplitude=0.2))
    np.testing.assert_allclose(euler.A(field.u), field.v, atol=1e-12)


# ─── step ───────────────────────────────────────────────────────────

@pytest.mark.parametrize("scheme", ["lax-friedrichs", "rusanov"])
def test_constant_field_is_unchanged(euler, scheme):
    grid = TorusGrid(d=1, N=16, T=0.1)
    field = init_field(euler, grid, InitialSpec("constant", {"state": [1.0, 0.5]}))
    after = step(euler, field, grid, scheme=scheme)
    np.testing.assert_array_equal(after.v, field.v)
    assert after.t > 0.0


@pytest.mark.parametrize("scheme", ["lax-friedrichs", "rusanov"])
def test_riemann_data_conserved(euler, scheme):
    grid = TorusGrid(d=1, N=64, T=1.0)
    field = init_field(euler, grid, RIEMANN)
    start = field.v.sum(axis=0) * grid.h
    for _ in range(300):
        field = step(euler, field, grid, scheme=scheme)
    np.testing.assert_allclose(field.v.sum(axis=0) * grid.h, start, rtol=0.0, atol=CONSERVATION_TOL)


def test_two_dimensional_swmhd_conserved():
    system = get_system("swmhd", d=2)
    grid = TorusGrid(d=2, N=16, T=1.0)
    spec = InitialSpec("smooth-periodic", {
        "mean": [1.0, 0.1, 0.0, 0.2, 0.0],
        "amplitude": [0.1, 0.0, 0.05, 0.0, 0.0],
        "wavenumber": [1, 1],
    })
    field = init_field(system, grid, spec)
    start = field.v.sum(axis=(0, 1))
    for _ in range(50):
        field = step(system, field, grid)
    np.testing.assert_allclose(field.v.sum(axis=(0, 1)), start, rtol=0.0, atol=1e-10)


def test_blowup_ceiling(euler):
    grid = TorusGrid(d=1, N=8, T=0.1)
    field = init_field(euler, grid, InitialSpec("constant", {"state": [1.0, 0.0]}))
    with pytest.raises(BlowupError):
        step(euler, field, grid, ceiling=0.5)


def test_mirror_symmetric_data_stay_symmetric(euler):
    grid = TorusGrid(d=1, N=64, T=1.0)
    field = init_field(euler, grid, smooth_spec(amplitude=0.2, phase=0.5 * np.pi))
    for _ in range(40):
        field = step(euler, field, grid)
    np.testing.assert_allclose(field.v[:, 0], field.v[::-1, 0], atol=1e-12)
    np.testing.assert_allclose(field.v[:, 1], -field.v[::-1, 1], atol=1e-12)


# ─── run ────────────────────────────────────────────────────────────

def test_constant_trajectory(euler):
    grid = TorusGrid(d=1, N=16, T=0.05, snapshot_dt=0.01)
    traj = run(euler, grid, InitialSpec("constant", {"state": [1.0, 0.0]}))
    assert traj.times[0] == 0.0 and traj.times[-1] == 0.05
    assert np.all(np.diff(traj.times) > 0)
    for snap in traj.snapshots:
        np.testing.assert_array_equal(snap.v, traj.snapshots[0].v)
    assert traj.production["residual_max"].abs().max() == 0.0


@pytest.mark.parametrize("scheme", ["lax-friedrichs", "rusanov"])
def test_total_entropy_nonincreasing_on_oscillations(euler, scheme):
    grid = TorusGrid(d=1, N=32, T=0.05, store_every_step=True)
    spec = InitialSpec("oscillatory", {"state_a": [1.0, 0.0], "state_b": [2.0, 0.0]})
    traj = run(euler, grid, spec, scheme=scheme)
    totals = traj.total(euler)
    assert np.all(np.diff(totals) <= 1e-12)
    assert (traj.production["production"] <= 1e-10).all()


def test_self_convergence_before_shock(euler):
    reference = run(euler, TorusGrid(d=1, N=1024, T=0.05), smooth_spec())
    ladder = [32, 64, 128]
    errors = []
    for N in ladder:
        coarse = run(euler, TorusGrid(d=1, N=N, T=0.05), smooth_spec())
        projected = coarse_average(reference.final.v, 1, 1024 // N)
        errors.append(np.mean(np.abs(coarse.final.v - projected)))
    assert measured_rate([1.0 / N for N in ladder], errors) >= 0.8


# ─── reference solution ─────────────────────────────────────────────

def test_reference_of_constant_data_has_zero_gradient(euler):
    ref = reference_solution(euler, TorusGrid(d=1, N=64, T=0.02), InitialSpec("constant", {"state": [1.0, 0.3]}))
    assert ref.gradient_bound == 0.0


def test_reference_of_smooth_data(euler):
    ref = reference_solution(euler, TorusGrid(d=1, N=256, T=0.05), smooth_spec())
    assert np.isfinite(ref.gradient_bound) and ref.gradient_bound > 0.0
    assert ref.trajectory.times[-1] == 0.05


def test_reference_rejects_riemann_data(euler):
    with pytest.raises(ShockError):
        reference_solution(euler, TorusGrid(d=1, N=64, T=0.05), RIEMANN)


def test_gradient_monitor_trips(euler):
    with pytest.raises(ShockError):
        reference_solution(euler, TorusGrid(d=1, N=512, T=1.0), smooth_spec(amplitude=0.8))


# ─── weak residual ──────────────────────────────────────────────────

def test_cutoff_weights_integrate_exactly():
    times = np.linspace(0.0, 0.5, 7)
    w, w_prime = cutoff_weights(times, 0.5)
    assert w.sum() == pytest.approx(0.25, abs=1e-14)
    assert w_prime.sum() == pytest.approx(-1.0, abs=1e-14)
    # g(t) = t 为分段线性, 积分 ∫ χ t dt = T²/4 − T²/π²
    assert np.dot(w, times) == pytest.approx(0.25 * 0.25 - 0.25 / np.pi ** 2, abs=1e-14)


def test_weak_residual_of_constant_solution(euler):
    grid = TorusGrid(d=1, N=32, T=0.05, store_every_step=True)
    traj = run(euler, grid, InitialSpec("constant", {"state": [1.0, 0.5]}))
    table = weak_residual(traj, euler)
    assert table["residual"].abs().max() <= 1e-10


def test_empty_test_bank(euler):
    traj = run(euler, TorusGrid(d=1, N=8, T=0.01), InitialSpec("constant", {"state": [1.0, 0.0]}))
    with pytest.raises(ConfigError):
        weak_residual(traj, euler, test_bank=[])


def test_weak_residual_decays_under_refinement(euler):
    ladder = [32, 64, 128]
    worst = []
    for N in ladder:
        traj = run(euler, TorusGrid(d=1, N=N, T=0.05, store_every_step=True), smooth_spec(amplitude=0.2))
        table = weak_residual(traj, euler)
        worst.append(table.loc[table["kind"] == "flux", "residual"].abs().max())
    assert measured_rate([1.0 / N for N in ladder], worst) >= 0.4


def test_entropy_tests_nonnegative(euler):
    grid = TorusGrid(d=1, N=32, T=0.05, store_every_step=True)
    spec = InitialSpec("oscillatory", {"state_a": [1.0, 0.0], "state_b": [2.0, 0.0]})
    traj = run(euler, grid, spec)
    table = weak_residual(traj, euler, build_test_bank(euler, entropy_amplitudes=(0.0,)))
    entropy = table.loc[table["kind"] == "entropy", "residual"]
    assert len(entropy) == 1
    assert entropy.min() >= -1e-8
