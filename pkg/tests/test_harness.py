"""
相对熵序列、Gronwall 拟合与唯一性探针测试
"""

import time

import numpy as np
import pytest

from config import config
from harness import GronwallSeries, fit_gronwall, mismatched_spec, relent_trajectory, uniqueness_probe
from solver import InitialSpec, TorusGrid, reference_solution, run
from systems import get_system
from utils.errors import ConfigError, FitError, GridError

SMOOTH = InitialSpec("smooth-periodic", {"mean": [1.0, 0.0], "amplitude": [0.05, 0.0]})
CONSTANT = InitialSpec("constant", {"state": [1.0, 0.0]})


@pytest.fixture
def euler():
    return get_system("euler", gamma=2.0)


@pytest.fixture(scope="module")
def smooth_reference():
    return reference_solution(get_system("euler", gamma=2.0), TorusGrid(d=1, N=2048, T=0.05), SMOOTH)


def make_series(times, values, gradient_bound=0.0):
    times = np.asarray(times, dtype=float)
    zeros = np.zeros_like(times)
    return GronwallSeries(
        N=8,
        times=times,
        relative_entropy=np.asarray(values, dtype=float),
        concentration=zeros,
        variance=zeros,
        mean_deviation=zeros,
        concentration_margin=zeros,
        gradient_bound=gradient_bound,
        wave_speed=1.0,
    )


# ─── relative-entropy series ────────────────────────────────────────

def test_same_run_gives_zero_series(euler):
    traj = run(euler, TorusGrid(d=1, N=64, T=0.05, snapshot_dt=0.01), SMOOTH)
    series = relent_trajectory(traj, traj, euler, coarsening=1)
    np.testing.assert_allclose(series.values, 0.0, atol=1e-14)
    np.testing.assert_allclose(series.variance, 0.0, atol=1e-14)


def test_smooth_series_against_reference(euler, smooth_reference):
    coarse = run(euler, TorusGrid(d=1, N=128, T=0.05), SMOOTH)
    series = relent_trajectory(coarse, smooth_reference, euler)
    assert series.values[0] > 0.0
    assert np.all(np.isfinite(series.values))
    assert series.nonnegative
    assert np.all(series.concentration_margin >= -1e-8)
    assert list(series.to_frame().columns)[:2] == ["t", "H"]


def test_halving_h_reduces_terminal_entropy(euler, smooth_reference):
    terminal = []
    for N in (64, 128):
        coarse = run(euler, TorusGrid(d=1, N=N, T=0.05), SMOOTH)
        terminal.append(relent_trajectory(coarse, smooth_reference, euler).terminal)
    assert terminal[0] >= 1.3 * terminal[1]


def test_misaligned_snapshot_times(euler):
    reference = run(euler, TorusGrid(d=1, N=64, T=0.05, snapshot_dt=0.01), SMOOTH)
    coarse = run(euler, TorusGrid(d=1, N=32, T=0.05, snapshot_dt=0.015), SMOOTH)
    with pytest.raises(GridError):
        relent_trajectory(coarse, reference, euler)


# ─── Gronwall fit ───────────────────────────────────────────────────

def test_zero_series_fits_with_zero_rate():
    fit = fit_gronwall(make_series([0.0, 0.1, 0.2], [0.0, 0.0, 0.0]))
    assert fit.c == 0.0 and fit.verdict


def test_growing_series_needs_positive_rate():
    times = np.linspace(0.0, 0.5, 6)
    fit = fit_gronwall(make_series(times, np.exp(2.0 * times)), c_cap=10.0)
    assert 1.9 <= fit.c <= 2.1
    assert fit.C == pytest.approx(1.01)


def test_intermediate_snapshots_constrain_the_rate():
    times = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5]
    values = np.array([1.0, 1.5, 1.6, 1.7, 1.8, 1.9]) * 1e-3
    fit = fit_gronwall(make_series(times, values), c_cap=10.0)
    assert 3.95 <= fit.c <= 3.97
    endpoints = fit_gronwall(make_series([0.0, 0.5], values[[0, -1]]), c_cap=10.0)
    assert endpoints.c < 1.3


def test_blowup_series_rejected():
    times = np.linspace(0.0, 0.1, 11)
    values = np.concatenate([[1.0], 1.0 / times[1:]])
    with pytest.raises(FitError):
        fit_gronwall(make_series(times, values))


def test_smooth_benchmark_fits_below_cap(euler, smooth_reference):
    coarse = run(euler, TorusGrid(d=1, N=128, T=0.05), SMOOTH)
    series = relent_trajectory(coarse, smooth_reference, euler)
    fit = fit_gronwall(series)
    assert fit.verdict and fit.c <= fit.c_cap
    assert series.fit is fit


# ─── uniqueness probe ───────────────────────────────────────────────

def test_smooth_probe_converges(euler):
    report = uniqueness_probe(euler, SMOOTH, [32, 64, 128], T=0.05, N_ref=1024)
    terminal = [row["terminal_H"] for row in report["ladder"]]
    assert all(a > b for a, b in zip(terminal, terminal[1:]))
    assert report["decay"]["terminal_H"]["rate"] >= 0.4
    assert report["decay"]["variance"]["passed"]
    assert report["control"]["separation"] >= 10.0
    assert report["verdict"]
    assert sorted(report["series"]) == [32, 64, 128]


def test_benchmark_ladder_at_full_resolution(euler):
    started = time.perf_counter()
    report = uniqueness_probe(euler, SMOOTH, [64, 128, 256, 512], T=0.05, N_ref=4096)
    elapsed = time.perf_counter() - started
    terminal = [row["terminal_H"] for row in report["ladder"]]
    assert all(a > b for a, b in zip(terminal, terminal[1:]))
    assert report["decay"]["terminal_H"]["rate"] >= 1.5
    assert report["decay"]["variance"]["passed"]
    assert report["decay"]["concentration"]["passed"]
    assert all(fit["verdict"] and fit["c"] <= fit["c_cap"] for fit in report["fits"].values())
    assert report["control"]["separation"] >= 10.0
    assert report["verdict"]
    assert elapsed <= 60.0


def test_default_cadence_gives_gronwall_enough_points(euler):
    report = uniqueness_probe(euler, SMOOTH, [32, 64], T=0.05, N_ref=256, control=False)
    assert report["snapshot_dt"] == pytest.approx(0.05 / config.PROBE_SNAPSHOTS)
    for series in report["series"].values():
        assert len(series.times) == config.PROBE_SNAPSHOTS + 1
        assert series.times[-1] == pytest.approx(0.05)
        assert series.fit.verdict


def test_constant_probe_is_exact(euler):
    report = uniqueness_probe(euler, CONSTANT, [16, 32], T=0.02, N_ref=64)
    for row in report["ladder"]:
        assert row["terminal_H"] == 0.0
        assert row["variance"] == 0.0
        assert row["concentration"] == 0.0
    assert report["verdict"]


def test_probe_needs_increasing_ladder(euler):
    with pytest.raises(ConfigError):
        uniqueness_probe(euler, SMOOTH, [64, 32], T=0.05, N_ref=256)


def test_mismatched_control_data():
    control = mismatched_spec(SMOOTH, 0.2)
    assert control.params["amplitude"] == pytest.approx([0.06, 0.0])
    assert SMOOTH.params["amplitude"] == [0.05, 0.0]
    with pytest.raises(ConfigError):
        mismatched_spec(InitialSpec("riemann", {"left": [2.0, 0.0], "right": [1.0, 0.0]}), 0.2)
