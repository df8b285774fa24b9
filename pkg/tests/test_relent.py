"""
相对熵与相对通量测试
"""

from dataclasses import replace

import numpy as np
import pytest

from relent import (
    AtomicMeasure,
    averaged_H,
    averaged_H_field,
    averaged_Z,
    averaged_Z_field,
    conserved_relative_entropy,
    local_quadratic_probe,
    relative_entropy,
    relative_flux,
    transfer_matrices,
)
from systems import get_system
from utils.errors import DomainError, MeasureError, SingularError

RNG = np.random.default_rng(0)
ATOL = 1e-12


@pytest.fixture
def euler():
    return get_system("euler", gamma=2.0)


def _random_states(count, rng=RNG):
    return np.column_stack([rng.uniform(0.5, 2.0, count), rng.uniform(-2.0, 2.0, count)])


# ─── pointwise ──────────────────────────────────────────────────────

def test_relative_entropy_vanishes_on_diagonal(euler):
    assert relative_entropy(euler, [1.0, 1.0], [1.0, 1.0]) == pytest.approx(0.0, abs=ATOL)
    np.testing.assert_allclose(relative_flux(euler, 0, [1.0, 1.0], [1.0, 1.0]), 0.0, atol=ATOL)


def test_relative_entropy_hand_value(euler):
    assert relative_entropy(euler, [1.0, 0.0], [0.5, 0.0]) == pytest.approx(0.25, abs=ATOL)


def test_relative_entropy_at_vacuum(euler):
    assert relative_entropy(euler, [0.0, 0.0], [1.0, 0.0]) == pytest.approx(1.0, abs=ATOL)


def test_relative_flux_hand_value(euler):
    np.testing.assert_allclose(relative_flux(euler, 0, [1.0, 0.0], [0.5, 0.0]), [0.0, 0.25], atol=ATOL)


def test_transfer_matrix_hand_value(euler):
    np.testing.assert_allclose(transfer_matrices(euler, [0.5, 0.0])[0], [[0.0, 1.0], [1.0, 0.0]], atol=ATOL)


def test_batched_and_single_U_agree(euler):
    u = _random_states(30)
    U = _random_states(30)
    batched = relative_flux(euler, 0, u, U)
    single = np.stack([relative_flux(euler, 0, u[i], U[i]) for i in range(30)])
    np.testing.assert_allclose(batched, single, rtol=1e-12, atol=1e-12)


def test_U_must_be_interior(euler):
    with pytest.raises(DomainError):
        relative_entropy(euler, [1.0, 0.0], [0.0, 0.0])


def test_singular_grad_A_rejected(euler):
    degenerate = replace(euler, grad_A=lambda U: np.array([[1.0, 0.0], [0.0, 1e-14]]))
    with pytest.raises(SingularError):
        relative_flux(degenerate, 0, [1.0, 0.0], [0.5, 0.0])


def test_potential_offset_cancels(euler):
    u = _random_states(50)
    U = _random_states(50)
    offset = euler.params["potential_offset"]
    unshifted = replace(euler, eta=lambda s: euler.eta(s) - offset)
    np.testing.assert_allclose(
        relative_entropy(unshifted, u, U), relative_entropy(euler, u, U), atol=1e-14,
    )


@pytest.mark.parametrize("name", ["euler", "swmhd", "nonhom-inc-euler", "nonhom-inc-mhd"])
def test_relative_entropy_nonnegative(name):
    system = get_system(name)
    n = system.state_dim
    lo = np.array([0.5] + [-1.0] * (n - 1))
    hi = np.array([2.0] + [1.0] * (n - 1))
    u = RNG.uniform(lo, hi, size=(500, n))
    U = RNG.uniform(lo, hi, size=(500, n))
    assert np.min(relative_entropy(system, u, U)) >= -1e-12


def test_conserved_form_matches(euler):
    u = [1.3, -0.4]
    U = [0.8, 0.6]
    assert conserved_relative_entropy(euler, u, U) == pytest.approx(relative_entropy(euler, u, U), abs=1e-5)


def test_local_quadratic_probe(euler):
    probe = local_quadratic_probe(euler, [1.0, 0.5], [0.3, -0.7])
    assert probe["order"] >= 1.9
    assert probe["errors"][-1] < probe["errors"][0]
    assert probe["ratios"][-1] == pytest.approx(probe["limit"], rel=0.05)


# ─── measure averaged ───────────────────────────────────────────────

def test_dirac_at_U_is_zero(euler):
    nu = AtomicMeasure.dirac([0.7, 0.3])
    assert averaged_H(euler, nu, [0.7, 0.3]) == pytest.approx(0.0, abs=ATOL)
    Z, ratio = averaged_Z(euler, 0, nu, [0.7, 0.3])
    np.testing.assert_allclose(Z, 0.0, atol=ATOL)
    assert ratio == 0.0


def test_two_atom_hand_values(euler):
    nu = AtomicMeasure([[1.0, 0.0], [0.5, 0.0]], [0.5, 0.5])
    assert averaged_H(euler, nu, [0.5, 0.0]) == pytest.approx(0.125, abs=ATOL)
    Z, ratio = averaged_Z(euler, 0, nu, [0.5, 0.0])
    np.testing.assert_allclose(Z, [0.0, 0.125], atol=ATOL)
    assert ratio == pytest.approx(1.0)


def test_unnormalized_weights_rejected():
    with pytest.raises(MeasureError):
        AtomicMeasure([[1.0, 0.0], [0.5, 0.0]], [0.5, 0.5 + 1e-9])


def test_averaging_is_linear(euler):
    for _ in range(20):
        k = RNG.integers(1, 6)
        atoms = _random_states(k)
        weights = RNG.uniform(size=k)
        weights /= weights.sum()
        nu = AtomicMeasure(atoms, weights)
        U = _random_states(1)[0]
        expected = float(np.sum(weights * relative_entropy(euler, atoms, np.broadcast_to(U, atoms.shape))))
        assert averaged_H(euler, nu, U) == pytest.approx(expected, abs=1e-13)


def test_field_versions_match_cellwise(euler):
    cells, k = 12, 3
    atoms = _random_states(cells * k).reshape(cells, k, 2)
    weights = RNG.uniform(size=(cells, k))
    weights /= weights.sum(axis=1, keepdims=True)
    U = _random_states(cells)
    H = averaged_H_field(euler, atoms, weights, U)
    Z = averaged_Z_field(euler, atoms, weights, U)
    for c in range(cells):
        nu = AtomicMeasure(atoms[c], weights[c])
        assert H[c] == pytest.approx(averaged_H(euler, nu, U[c]), abs=1e-12)
        np.testing.assert_allclose(Z[c, 0], averaged_Z(euler, 0, nu, U[c])[0], atol=1e-12)
