"""
结构假设检验测试
"""

from dataclasses import replace

import numpy as np
import pytest

from hypotheses import (
    SampleDesign,
    check_derivatives,
    check_H1,
    check_H2,
    check_H2prime,
    check_H3,
    check_H4,
    check_H5,
    constraint_residual,
    ray_ratios,
    sample_box,
    vertices,
)
from systems import get_system, list_systems
from systems.base import ConstraintSpec
from systems.projection import cell_centers
from systems.registry import default_box
from utils.errors import ConfigError, DomainError, OverflowGuard


@pytest.fixture
def euler():
    return get_system("euler", gamma=2.0)


def _design(system, n_samples=200, **kwargs):
    return SampleDesign(compact_box=default_box(system), n_samples=n_samples, **kwargs)


# ─── design ─────────────────────────────────────────────────────────

def test_doubled_design_extends_samples(euler):
    design = _design(euler, n_samples=50)
    first = sample_box(design)
    second = sample_box(design.doubled())
    assert second.shape == (100, 2)
    np.testing.assert_array_equal(second[:50], first)


def test_vertices_cover_box(euler):
    corners = vertices(_design(euler))
    assert corners.shape == (4, 2)
    assert {tuple(c) for c in corners} == {(0.5, -2.0), (0.5, 2.0), (2.0, -2.0), (2.0, 2.0)}


def test_design_rejects_decreasing_grid(euler):
    with pytest.raises(ConfigError):
        SampleDesign(compact_box=default_box(euler), s_grid=[10.0, 1.0])


# ─── H1 / H2 / H3 ───────────────────────────────────────────────────

def test_H1_euler_min_determinant(euler):
    report = check_H1(euler, _design(euler, n_samples=1000))
    assert report.verdict
    # det ∇A = √u₁
    assert report.constants["min_abs_det"] == pytest.approx(np.sqrt(0.5), rel=1e-2)
    assert report.constants["min_abs_det"] >= np.sqrt(0.5) - 1e-12


def test_box_touching_vacuum_rejected(euler):
    design = SampleDesign(compact_box=((1e-12, 1.0), (-1.0, 1.0)))
    with pytest.raises(DomainError):
        check_H1(euler, design)


@pytest.mark.parametrize("name", list_systems())
def test_structural_hypotheses_hold_for_registered_systems(name):
    system = get_system(name)
    design = _design(system, n_samples=100)
    for check in (check_H1, check_H2, check_H3, check_derivatives):
        report = check(system, design)
        assert report.verdict, report.to_dict()


def test_constrained_system_notes_flux_symmetry():
    system = get_system("inc-euler")
    report = check_H2(system, _design(system, n_samples=50))
    assert report.notes


def test_perturbed_entropy_flux_fails_H2(euler):
    q0, grad_q0 = euler.q[0], euler.grad_q[0]
    broken = replace(
        euler,
        q=(lambda u: q0(u) + 0.1 * u[..., 0],),
        grad_q=(lambda u: grad_q0(u) + 0.1 * np.eye(euler.state_dim)[0],),
    )
    report = check_H2(broken, _design(broken, n_samples=100))
    assert not report.verdict
    assert report.residuals["entropy_flux"] == pytest.approx(0.1, rel=1e-8)


def test_negated_entropy_fails_H3(euler):
    flipped = replace(
        euler,
        eta=lambda u: -euler.eta(u),
        grad_eta=lambda u: -euler.grad_eta(u),
        hess_eta=lambda u: -euler.hess_eta(u),
        G=lambda u: -euler.G(u),
        grad_G=lambda u: -euler.grad_G(u),
    )
    report = check_H3(flipped, _design(flipped, n_samples=100))
    assert not report.verdict
    assert report.min_eigenvalue < 0.0


def test_report_serializes_verdict(euler):
    payload = check_H1(euler, _design(euler, n_samples=20)).to_dict()
    assert payload["id"] == "H1"
    assert payload["verdict"] == "pass"


# ─── H2' ────────────────────────────────────────────────────────────

def test_constant_field_has_zero_constraint_residual():
    system = get_system("inc-euler")
    assert constraint_residual(system, np.full((16, 16, 2), 0.3)) == pytest.approx(0.0, abs=1e-14)


@pytest.mark.parametrize("name", ["inc-euler", "inc-mhd"])
def test_projected_fields_satisfy_constraint(name):
    report = check_H2prime(get_system(name), n_fields=2, N_ladder=(16, 32, 64))
    assert report.verdict
    assert max(report.residuals.values()) < 1e-10


def test_nonhomogeneous_residual_decreases_under_refinement():
    report = check_H2prime(get_system("nonhom-inc-euler"), n_fields=2, N_ladder=(32, 64, 128))
    assert report.residuals["N=128"] < report.residuals["N=32"]


def test_unprojected_field_is_negative_control():
    system = get_system("inc-mhd")

    def field(N):
        x, _ = cell_centers(N, 2)
        out = np.zeros((N, N, 4))
        out[..., 1] = np.cos(2 * np.pi * x)
        out[..., 2] = np.sin(4 * np.pi * x)
        out[..., 3] = np.cos(2 * np.pi * x)
        return out

    assert constraint_residual(system, field(128)) == pytest.approx(-np.pi, rel=1e-2)
    report = check_H2prime(system, field_factory=field, project=False, N_ladder=(32, 64))
    assert not report.verdict


def test_H2prime_requires_constraint(euler):
    with pytest.raises(ConfigError):
        check_H2prime(euler)


def test_constraint_spec_type_exported():
    assert isinstance(get_system("inc-mhd").constraint, ConstraintSpec)


# ─── H4 ─────────────────────────────────────────────────────────────

def test_euler_ray_ratio_hand_direction(euler):
    direction = np.array([[1.0, 1.0]]) / np.sqrt(2.0)
    rays = ray_ratios(euler, direction, [1e2, 1e3, 1e4])
    assert rays["A_ratio"][0, -1] <= 0.05
    assert rays["F_ratio"][0, -1] <= 3.0
    assert rays["truncated"] == 0


def test_overflowing_rays_raise(euler):
    direction = np.array([[1.0, 1.0]]) / np.sqrt(2.0)
    with pytest.raises(OverflowGuard):
        ray_ratios(euler, direction, np.geomspace(1e150, 1e200, 5))


def test_H4_euler(euler):
    report = check_H4(euler, _design(euler, ray_directions=16))
    assert report.verdict
    assert report.constants["ratio_limit_holds"]
    assert report.residuals["growth_chain_violation"] <= 1e-8
    assert np.isfinite(report.constants["C_F"])


@pytest.mark.parametrize("name", ["swmhd", "inc-euler", "nonhom-inc-mhd"])
def test_H4_constants_finite(name):
    system = get_system(name)
    report = check_H4(system, _design(system, ray_directions=8))
    assert report.verdict
    assert np.isfinite(report.constants["C_A"])


# ─── H5 ─────────────────────────────────────────────────────────────

def test_H5_euler_constant(euler):
    design_u = _design(euler, n_samples=40, ray_directions=4, s_grid=np.geomspace(1e1, 1e3, 5))
    design_U = _design(euler, n_samples=20)
    report = check_H5(euler, design_u, design_U)
    C = report.constants["C"]
    assert np.isfinite(C) and C > 0.0
    # 加倍设计的样本是原样本的超集
    assert report.constants["C_doubled"] >= report.constants["C_sampled"] - 1e-12
    assert report.residuals["drift"] >= 0.0


def test_H5_requires_interior_reference_box(euler):
    design = SampleDesign(compact_box=((0.0, 1.0), (-1.0, 1.0)), n_samples=10)
    with pytest.raises(DomainError):
        check_H5(euler, design, design)
