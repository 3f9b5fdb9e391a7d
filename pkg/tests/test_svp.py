"""Lattice reduction and shortest-vector tests, float and exact modes."""

import math
from fractions import Fraction

import numpy as np
import pytest

from abelkit.svp import (GramLattice, SVPError, brute_force_box, brute_force_sv,
                         buser_sarnak, lll_reduce, relative_buser_sarnak,
                         shortest_vector)
from abelkit.torus import PeriodMatrix, PolarizationType, make_subtorus, make_torus


def _random_int_gram(rng, dim, spread=5):
    # keep the brute-force oracle tractable: redraw overly skew instances
    while True:
        a = rng.integers(-spread, spread + 1, size=(dim, dim))
        if abs(np.linalg.det(a.astype(float))) < 0.5:
            continue
        lat = GramLattice((a @ a.T).astype(float))
        if math.prod(2 * b + 1 for b in brute_force_box(lat)) <= 300_000:
            return lat


def test_lll_reduces_a_classic_bad_basis():
    g = np.array([[1.0, 1000.0], [1000.0, 1000001.0]])
    red, u = lll_reduce(GramLattice(g))
    assert red.gram[0, 0] == pytest.approx(1.0)
    assert red.gram[1, 1] == pytest.approx(1.0)
    # transform is unimodular and transports the gram
    assert abs(round(np.linalg.det(u.astype(float)))) == 1
    assert np.allclose(u.T @ g @ u, red.gram)


def test_gram_lattice_rejects_bad_input():
    with pytest.raises(SVPError):
        GramLattice(np.array([[1.0, 2.0], [2.0, 1.0]]))      # indefinite
    with pytest.raises(SVPError):
        GramLattice(np.array([[1.0, 0.5], [0.4, 1.0]]))      # asymmetric
    with pytest.raises(SVPError):
        shortest_vector(GramLattice(np.eye(30)))             # above dim cap


def test_identity_and_scaled_lattices():
    res = shortest_vector(GramLattice(np.eye(4)))
    assert res.length_sq == pytest.approx(1.0)
    res = shortest_vector(GramLattice(3.0 * np.eye(2)), exact=True)
    assert res.length_sq_exact == Fraction(3)


def test_enumeration_matches_brute_force_small_dims():
    rng = np.random.default_rng(2024)
    for dim in (2, 3, 4, 5):
        for _ in range(6):
            lat = _random_int_gram(rng, dim)
            fast = shortest_vector(lat, exact=True)
            slow = brute_force_sv(lat)
            assert fast.length_sq_exact == slow.length_sq_exact, lat.gram
            # both witnesses must certify the same length
            w = np.array(fast.witness, dtype=float)
            assert w @ lat.gram @ w == pytest.approx(float(slow.length_sq_exact))


def test_exact_mode_agrees_with_float_mode():
    rng = np.random.default_rng(99)
    for _ in range(10):
        lat = _random_int_gram(rng, 4)
        a = shortest_vector(lat)
        b = shortest_vector(lat, exact=True)
        assert a.length_sq == pytest.approx(float(b.length_sq_exact), rel=1e-12)


def test_witness_is_nonzero_integer_vector():
    rng = np.random.default_rng(5)
    lat = _random_int_gram(rng, 3)
    res = shortest_vector(lat)
    assert any(res.witness)
    assert all(isinstance(x, int) for x in res.witness)


def test_hexagonal_minimum():
    tau = np.exp(1j * math.pi / 3) * np.eye(1)
    torus = make_torus(PolarizationType((1,)), PeriodMatrix(tau))
    res = buser_sarnak(torus)
    assert res.length_sq == pytest.approx(2.0 / math.sqrt(3.0), rel=1e-12)


def test_square_torus_minimum_is_one():
    torus = make_torus(PolarizationType((1,)), PeriodMatrix(1j * np.eye(1)))
    assert buser_sarnak(torus).length_sq == pytest.approx(1.0)
    # balanced type-(d) family: tau = d*i makes both generators length d
    for d in (2, 3, 5):
        t = make_torus(PolarizationType((d,)), PeriodMatrix(d * 1j * np.eye(1)))
        assert buser_sarnak(t).length_sq == pytest.approx(float(d), rel=1e-9)


def test_relative_invariant_on_axis_subtorus():
    torus = make_torus(PolarizationType((1, 1)), PeriodMatrix(1j * np.eye(2)))
    sub = make_subtorus(torus, np.array([[1, 0, 0, 0], [0, 0, 1, 0]]).T)
    res = relative_buser_sarnak(sub)
    assert res.length_sq == pytest.approx(1.0, rel=1e-12)
    # witness is a parent-lattice vector with the projected length it claims
    w = np.asarray(res.witness, dtype=float)
    z = torus.lattice_basis @ w
    pz = sub.project_perp(z)
    assert float(np.real(np.conj(pz) @ torus.metric @ pz)) == pytest.approx(1.0, rel=1e-9)


def test_relative_invariant_zero_subtorus_reduces_to_absolute():
    torus = make_torus(PolarizationType((2,)), PeriodMatrix(np.array([[0.2 + 0.9j]])))
    sub = make_subtorus(torus, np.zeros((2, 0), dtype=int))
    assert relative_buser_sarnak(sub).length_sq == pytest.approx(
        buser_sarnak(torus).length_sq, rel=1e-12)


def test_brute_force_box_override_and_cap():
    lat = GramLattice(np.eye(2))
    res = brute_force_sv(lat, box=3)
    assert res.length_sq_exact == Fraction(1)
    with pytest.raises(SVPError):
        brute_force_sv(GramLattice(np.eye(9)))
