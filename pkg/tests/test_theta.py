"""Theta bases: functional equations, known zeros, and rank verdicts."""

import math

import numpy as np
import pytest

from abelkit.theta import (ThetaError, automorphy_factor, evaluate_section,
                           rho2_matrix, rho2_rank, theta_basis, theta_values)
from abelkit.torus import PeriodMatrix, PolarizationType, make_torus


def _elliptic(d, tau=1j):
    return make_torus(PolarizationType((d,)), PeriodMatrix(tau * np.eye(1)))


def test_basis_sizes():
    assert theta_basis(_elliptic(3), 1).size == 3
    assert theta_basis(_elliptic(3), 2).size == 6
    torus = make_torus(PolarizationType((1, 3)), PeriodMatrix(1j * np.eye(2)))
    assert theta_basis(torus, 2).size == 12


def test_refusals():
    torus3 = make_torus(PolarizationType((1, 1, 1)), PeriodMatrix(1j * np.eye(3)))
    with pytest.raises(ThetaError):
        theta_basis(torus3, 1)
    flat = make_torus(PolarizationType((1,)), PeriodMatrix(1e-7 * 1j * np.eye(1)))
    with pytest.raises(ThetaError):
        theta_basis(flat, 1)
    with pytest.raises(ThetaError):
        theta_basis(_elliptic(2), 3)


def test_classical_zero_of_degree_one_theta():
    basis = theta_basis(_elliptic(1), 1)
    val = evaluate_section(basis, 0, np.array([0.5 + 0.5j]))
    assert abs(val) < 1e-8


def test_quasi_periodicity_all_generators():
    rng = np.random.default_rng(31)
    torus = _elliptic(3, tau=0.2 + 1.1j)
    for level in (1, 2):
        basis = theta_basis(torus, level)
        zs = rng.uniform(-1, 1, size=(8, 1)) + 1j * rng.uniform(-1, 1, size=(8, 1))
        base_vals = theta_values(basis, zs)
        for m1, m2 in [(1, 0), (0, 1), (-2, 1), (1, 3)]:
            shift = (3 * m1 + torus.period.tau[0, 0] * m2) * np.ones(1)
            shifted = theta_values(basis, zs + shift)
            for s, z in enumerate(zs):
                factor = automorphy_factor(basis, [m1], [m2], z)
                lhs = shifted[:, s]
                rhs = factor * base_vals[:, s]
                den = np.maximum(np.abs(lhs), np.abs(rhs)) + 1e-30
                assert np.max(np.abs(lhs - rhs) / den) < 1e-8


def test_parity_permutes_characteristics():
    torus = _elliptic(3)
    basis = theta_basis(torus, 2)
    rng = np.random.default_rng(8)
    z = rng.uniform(-1, 1, size=(1, 1)) + 1j * rng.uniform(-1, 1, size=(1, 1))
    plus = theta_values(basis, z)[:, 0]
    minus = theta_values(basis, -z)[:, 0]
    for idx, b in enumerate(basis.characteristics):
        jdx = basis.characteristics.index(tuple((-x) % 6 for x in b))
        assert minus[idx] == pytest.approx(plus[jdx], rel=1e-10)


def test_truncation_doubling_is_stable():
    torus = _elliptic(3)
    auto_k = theta_basis(torus, 1).truncation
    a = rho2_rank(torus, seed=0)
    b = rho2_rank(torus, seed=0, truncation=2 * auto_k)
    assert a.numerical_rank == b.numerical_rank
    sa = np.array(a.singular_values)
    sb = np.array(b.singular_values)
    assert np.max(np.abs(sa - sb) / sa[0]) < 1e-9


def test_rho2_matrix_shape_and_determinism():
    torus = _elliptic(2)
    m = rho2_matrix(torus, seed=4)
    assert m.shape == (4 * 4, 3)          # 4*dim_target samples, sym2 columns
    assert np.array_equal(m, rho2_matrix(torus, seed=4))
    with pytest.raises(ThetaError):
        rho2_matrix(torus, samples=3)


def test_rho2_verdicts():
    rep = rho2_rank(_elliptic(2), seed=0)
    assert not rep.surjective
    assert rep.numerical_rank == 3 and rep.dim_target == 4
    assert rep.label == "not surjective at working precision"

    rep = rho2_rank(_elliptic(3), seed=0)
    assert rep.surjective and rep.numerical_rank == 6
    assert rep.label == "surjective"

    rep = rho2_rank(_elliptic(4), seed=0)
    assert rep.surjective and rep.numerical_rank == 8
    assert rep.dim_sym2 == 10


def test_rho2_dimension_bookkeeping():
    torus = make_torus(PolarizationType((1, 3)), PeriodMatrix(1j * np.eye(2)))
    rep = rho2_rank(torus, seed=1)
    assert rep.dim_sym2 == 3 * 4 // 2
    assert rep.dim_target == 4 * 3
    assert not rep.surjective
    assert rep.numerical_rank <= min(rep.dim_sym2, rep.dim_target)


def test_rho2_second_tau_cross_check():
    # surjectivity for d=3 is not special to tau=i
    rep = rho2_rank(_elliptic(3, tau=0.3 + 1.4j), seed=2)
    assert rep.surjective and rep.numerical_rank == 6


def test_evaluate_section_bounds_and_range():
    basis = theta_basis(_elliptic(2), 1)
    with pytest.raises(ThetaError):
        evaluate_section(basis, 5, np.zeros(1))
    v = evaluate_section(basis, 0, np.zeros(1))
    assert np.isfinite(v.real) and np.isfinite(v.imag)
