"""
Young 测度、集中测度、Radon-Nikodym 与回归函数测试
"""

import numpy as np
import pytest

from hypotheses import sample_directions
from measures import (
    RecessionProbe,
    check_domination,
    concentration_mass,
    concentration_relations,
    empirical_young_measure,
    family_concentration,
    family_relations,
    hat_kernel,
    radon_nikodym,
    recession,
    time_slices,
)
from solver import InitialSpec, TorusGrid, run_family
from systems import get_system
from utils.errors import ConfigError, GridError, MaskedAll, OverflowGuard


@pytest.fixture
def euler():
    return get_system("euler", gamma=2.0)


@pytest.fixture
def rng():
    return np.random.default_rng(7)


def spike_family(heights, grid_N=4096, times=(0.0,)):
    """f_n = height(n)·1_[0,1/n], 所有快照相同"""
    family = {}
    for n, height in heights.items():
        values = np.zeros((len(times), grid_N, 1))
        values[:, : grid_N // n, 0] = height
        family[n] = (np.asarray(times, dtype=float), values)
    return family


# ─── Young measures ─────────────────────────────────────────────────

def test_constant_field_gives_single_atom():
    field = np.tile([1.0, 0.0], (16, 1))
    ym = empirical_young_measure(field, 4)
    assert np.all(ym.atom_counts == 1)
    np.testing.assert_array_equal(ym.weights[:, 0], 1.0)
    np.testing.assert_array_equal(ym.atoms[:, 0], [[1.0, 0.0]] * 4)


def test_oscillation_gives_two_half_atoms():
    field = np.tile([[1.0, 0.0], [2.0, 0.0]], (8, 1))
    ym = empirical_young_measure(field, 2)
    assert ym.provenance["ratio"] == 8
    assert np.all(ym.atom_counts == 2)
    np.testing.assert_allclose(ym.weights, 0.5)
    assert {tuple(a) for a in ym.atoms[0]} == {(1.0, 0.0), (2.0, 0.0)}
    np.testing.assert_allclose(ym.barycenter(), [[1.5, 0.0]] * 2)
    np.testing.assert_allclose(ym.variance(), 0.25)


def test_near_duplicates_are_merged():
    field = np.array([[1.0, 0.0], [1.0 + 1e-13, 0.0], [2.0, 0.0], [2.0, 0.0]])
    ym = empirical_young_measure(field, 1)
    assert ym.atom_counts[0] == 2


@pytest.mark.parametrize("quantity", ["A", "eta"])
def test_rebinning_identity(euler, rng, quantity):
    field = np.column_stack([rng.uniform(0.5, 2.0, 32), rng.uniform(-1.0, 1.0, 32)])
    fn = getattr(euler, quantity)
    ym = empirical_young_measure(field, 8)
    np.testing.assert_allclose(ym.integral(fn), fn(field).sum(axis=0) / 32, rtol=0.0, atol=1e-12)


def test_two_dimensional_binning(rng):
    field = rng.uniform(0.5, 2.0, size=(8, 8, 2))
    ym = empirical_young_measure(field, 2)
    assert ym.weights.shape[0] == 4
    np.testing.assert_allclose(ym.integral(lambda u: u), field.mean(axis=(0, 1)), atol=1e-12)


def test_non_nested_grids():
    with pytest.raises(GridError):
        empirical_young_measure(np.ones((12, 2)), 5)


# ─── concentration masses ───────────────────────────────────────────

def test_delta_family_concentrates_unit_mass():
    family = spike_family({n: float(n) for n in (256, 512, 1024)})
    conc = concentration_mass(family, [10.0, 100.0], coarse_N=4, d=1)
    assert conc.total_extrapolated()[0] == pytest.approx(1.0, abs=0.05)
    assert conc.extrapolated[0, 0] == pytest.approx(1.0, abs=0.05)
    np.testing.assert_array_equal(conc.extrapolated[1:], 0.0)
    assert sorted(conc.ladder_totals) == [256, 512, 1024]


def test_sqrt_family_does_not_concentrate():
    family = spike_family({n: np.sqrt(n) for n in (256, 512, 1024)})
    conc = concentration_mass(family, [10.0, 100.0, 1e3, 1e4], coarse_N=4, d=1)
    assert conc.total_extrapolated()[0] <= 0.05


def test_bounded_family_has_no_mass(rng):
    family = {N: (np.array([0.0]), rng.uniform(-5.0, 5.0, size=(1, N, 2))) for N in (64, 128)}
    conc = concentration_mass(family, [10.0, 100.0], coarse_N=8, d=1)
    np.testing.assert_array_equal(conc.masses, 0.0)
    np.testing.assert_array_equal(conc.extrapolated, 0.0)


def test_partial_masses_nonincreasing_in_k(rng):
    family = {N: (np.array([0.0, 0.1]), rng.pareto(1.2, size=(2, N, 1))) for N in (128, 256)}
    conc = concentration_mass(family, [1.0, 3.0, 10.0, 30.0], coarse_N=8, d=1)
    assert conc.nonnegative
    assert np.all(np.diff(conc.masses, axis=0) <= 0.0)
    assert np.all(conc.extrapolated >= 0.0)


def test_singleton_family_rejected():
    with pytest.raises(ConfigError):
        concentration_mass(spike_family({256: 256.0}), [10.0], coarse_N=4, d=1)


def test_decreasing_k_ladder_rejected():
    with pytest.raises(ConfigError):
        concentration_mass(spike_family({256: 256.0, 512: 512.0}), [100.0, 10.0], coarse_N=4, d=1)


# ─── time slicing ───────────────────────────────────────────────────

def test_slab_masses_add_up(rng):
    times = np.linspace(0.0, 0.5, 11)
    family = {N: (times, rng.pareto(1.5, size=(11, N, 1))) for N in (64, 128)}
    conc = concentration_mass(family, [2.0, 5.0], coarse_N=4, d=1, slab_edges=[0.0, 0.1, 0.3, 0.5])
    slabs = time_slices(conc)
    assert len(slabs) == 3
    np.testing.assert_allclose(sum(s.masses for s in slabs), conc.masses, rtol=0.0, atol=1e-12)


@pytest.mark.parametrize("edges, durations", [
    ([0.0, 0.1, 0.3, 0.5], [0.1, 0.2, 0.2]),
    ([0.0, 0.125, 0.5], [0.125, 0.375]),
])
def test_slab_mass_is_proportional_to_duration(edges, durations):
    times = np.linspace(0.0, 0.5, 11)
    family = {N: (times, np.full((11, N, 1), 50.0)) for N in (16, 32)}
    conc = concentration_mass(family, [10.0, 20.0], coarse_N=4, d=1, slab_edges=edges)
    for slab, duration in zip(time_slices(conc), durations):
        np.testing.assert_allclose(slab.masses, 50.0 * 0.25 * duration, rtol=1e-12)


def test_early_spike_stays_in_first_slab():
    times = np.linspace(0.0, 0.5, 11)
    family = spike_family({n: float(n) for n in (256, 512)}, times=times)
    for _, values in family.values():
        values[times >= 0.1] = 0.0
    conc = concentration_mass(family, [10.0, 100.0], coarse_N=4, d=1, slab_edges=[0.0, 0.1, 0.5])
    first, rest = time_slices(conc)
    assert first.total_extrapolated()[0] > 0.0
    assert np.max(np.abs(rest.masses)) <= 1e-12


def test_zero_concentration_slabs_are_zero():
    times = np.linspace(0.0, 0.2, 5)
    family = {N: (times, np.ones((5, N, 1))) for N in (16, 32)}
    conc = concentration_mass(family, [10.0, 100.0], coarse_N=4, d=1, slab_edges=[0.0, 0.1, 0.2])
    for slab in time_slices(conc):
        np.testing.assert_array_equal(slab.masses, 0.0)


# ─── Radon-Nikodym ──────────────────────────────────────────────────

def test_hat_kernel_branches():
    np.testing.assert_allclose(hat_kernel([0.0, 0.5, 1.0, 1.5, 2.0, 3.0], 1.0), [1.0, 1.0, 1.0, 0.5, 0.0, 0.0])


def test_constant_ratio_is_exact(rng):
    m_f = rng.uniform(0.5, 1.5, 64)
    h = 1.0 / 64
    result = radon_nikodym(3.0 * m_f, m_f, 64, 1, [2 * h, 4 * h])
    for density in result.densities.values():
        np.testing.assert_allclose(density, 3.0, atol=1e-12)


def test_linear_density_recovered():
    N = 128
    h = 1.0 / N
    x = (np.arange(N) + 0.5) * h
    result = radon_nikodym(x * h, np.full(N, h), N, 1, [2 * h])
    error = np.mean(np.abs(result.estimate - x)) / np.mean(x)
    assert error <= 0.05


def test_alternating_signs_bounded():
    N = 64
    h = 1.0 / N
    m_g = h * (-1.0) ** np.arange(N)
    result = radon_nikodym(m_g, np.full(N, h), N, 1, [2 * h, 4 * h])
    assert np.max(np.abs(result.estimate)) <= 1.05


def test_vector_masses_in_two_dimensions(rng):
    m_f = rng.uniform(0.5, 1.0, 16)
    m_g = np.column_stack([m_f, -2.0 * m_f])
    result = radon_nikodym(m_g, m_f, 4, 2, [0.25])
    np.testing.assert_allclose(result.estimate, np.tile([1.0, -2.0], (16, 1)), atol=1e-12)


def test_masked_cells_are_nan():
    m_f = np.ones(8) / 8
    m_f[3] = 0.0
    result = radon_nikodym(m_f, m_f, 8, 1, [0.25])
    assert result.mask[3] and np.isnan(result.estimate[3]).all()
    assert np.isfinite(result.estimate[~result.mask]).all()


def test_vanishing_denominator():
    with pytest.raises(MaskedAll):
        radon_nikodym(np.ones(8), np.zeros(8), 8, 1, [0.25])


# ─── domination and relations ───────────────────────────────────────

def test_zero_mass_is_dominated():
    report = check_domination(np.zeros((4, 2)), np.zeros(4), 0.0)
    assert report["passed"] and report["worst_ratio"] == 0.0


def test_injected_violation_has_ratio_two():
    m_f = np.array([1.0, 0.5, 0.25])
    report = check_domination(2.0 * 3.0 * m_f, m_f, 3.0)
    assert not report["passed"]
    assert report["worst_ratio"] == pytest.approx(2.0)


def test_relations_on_injected_masses(euler):
    C = 4.0
    cells = 4
    report = concentration_relations(
        euler,
        np.ones(cells),
        np.zeros((cells, 2)),
        [0.5 * C * np.ones((cells, 2))],
        np.tile([1.0, 0.0], (cells, 1)),
        C,
    )
    assert report["positive_holds"] and report["positive_margin"] == pytest.approx(1.0)
    assert report["bound_holds"] and report["bound_margin"] == pytest.approx(0.5 * C)


def test_relations_with_zero_masses(euler):
    report = concentration_relations(euler, np.zeros(2), np.zeros((2, 2)), [np.zeros((2, 2))], np.tile([1.0, 0.0], (2, 1)), 1.0)
    assert report["positive_holds"] and report["bound_holds"]


def test_bounded_euler_family_concentrates_nothing(euler):
    spec = InitialSpec("oscillatory", {"state_a": [1.0, 0.0], "state_b": [2.0, 0.0]})
    family = run_family(euler, TorusGrid(d=1, N=16, T=0.02), spec, [16, 32])
    m_eta = family_concentration(euler, family, "eta", [10.0, 100.0], coarse_N=4)
    m_A = family_concentration(euler, family, "A", [10.0, 100.0], coarse_N=4)
    np.testing.assert_array_equal(m_eta.extrapolated, 0.0)
    assert check_domination(m_A.extrapolated, m_eta.extrapolated, 1.0)["passed"]
    report = family_relations(euler, family, np.tile([1.5, 0.0], (4, 1)), 1.0, [10.0, 100.0], coarse_N=4)
    assert report["positive_holds"] and report["bound_holds"]


# ─── recession functions ────────────────────────────────────────────

def test_euler_A_recession_vanishes(euler, rng):
    for beta in sample_directions(euler, 10, rng):
        result = recession(euler, "A", RecessionProbe(beta))
        assert result["s"][-1] == pytest.approx(1e4)
        assert np.max(np.abs(result["value"])) <= 0.05


def test_relative_entropy_identity(euler, rng):
    directions = sample_directions(euler, 100, rng)
    states = np.column_stack([rng.uniform(0.5, 2.0, 100), rng.uniform(-1.0, 1.0, 100)])
    for beta, U in zip(directions, states):
        result = recession(euler, "eta_rel", RecessionProbe(beta), U=U)
        assert result["agrees"]
        assert result["value"] >= -0.05


def test_relative_flux_identity(euler, rng):
    for beta in sample_directions(euler, 10, rng):
        result = recession(euler, "F_rel", RecessionProbe(beta), U=[1.2, 0.3])
        assert result["agrees"]


def test_relative_quantity_needs_reference(euler):
    with pytest.raises(ConfigError):
        recession(euler, "eta_rel", RecessionProbe([1.0, 0.0]))


def test_probe_overflow(euler):
    probe = RecessionProbe([1.0, 1.0], s_grid=np.geomspace(1e150, 1e200, 5))
    with pytest.raises(OverflowGuard):
        recession(euler, "A", probe)


def test_probe_rejects_decreasing_grid():
    with pytest.raises(ConfigError):
        RecessionProbe([1.0, 0.0], s_grid=[10.0, 1.0])
