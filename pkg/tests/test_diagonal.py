"""Product-with-diagonal construction and the halving identity."""

import math

import numpy as np
import pytest

from abelkit.diagonal import (diagonal_halving_check, product_with_diagonal,
                              projection_length_sq)
from abelkit.svp import buser_sarnak
from abelkit.torus import PeriodMatrix, PolarizationType, make_torus


def _random_torus(rng, n):
    m = rng.normal(size=(n, n))
    im = m @ m.T + 0.5 * np.eye(n)
    re = rng.uniform(-1, 1, size=(n, n))
    tau = (re + re.T) / 2 + 1j * im
    d, last = [], 1
    for _ in range(n):
        last *= int(rng.integers(1, 4))
        d.append(last)
    return make_torus(PolarizationType(tuple(d)), PeriodMatrix(tau))


def test_product_type_interleaves():
    torus = make_torus(PolarizationType((1, 2)), PeriodMatrix(1j * np.eye(2)))
    prod = product_with_diagonal(torus)
    assert prod.product.ptype.d == (1, 1, 2, 2)
    assert prod.product.h0 == torus.h0 ** 2
    assert prod.diagonal.k == torus.n


def test_factor_embeddings_are_isometric():
    rng = np.random.default_rng(11)
    torus = _random_torus(rng, 2)
    prod = product_with_diagonal(torus)
    g_base = torus.gram
    g_prod = prod.product.gram
    for j in range(4):
        e = np.zeros(4)
        e[j] = 1.0
        lam1 = prod.embed_pair(e, np.zeros(4))
        lam2 = prod.embed_pair(np.zeros(4), e)
        assert lam1 @ g_prod @ lam1 == pytest.approx(g_base[j, j], rel=1e-12)
        assert lam2 @ g_prod @ lam2 == pytest.approx(g_base[j, j], rel=1e-12)
        # the two factors are metrically orthogonal
        assert lam1 @ g_prod @ lam2 == pytest.approx(0.0, abs=1e-10)


def test_projection_formula_matches_difference():
    # anti-diagonal projection: |q(l1, l2)|^2 = |l1 - l2|^2_base / 2
    rng = np.random.default_rng(3)
    for n in (1, 2):
        torus = _random_torus(rng, n)
        prod = product_with_diagonal(torus)
        for _ in range(5):
            l1 = rng.integers(-2, 3, size=2 * n).astype(float)
            l2 = rng.integers(-2, 3, size=2 * n).astype(float)
            got = projection_length_sq(prod, l1, l2)
            diff = l1 - l2
            want = float(diff @ torus.gram @ diff) / 2.0
            assert got == pytest.approx(want, rel=1e-10, abs=1e-12)


def test_halving_square_torus():
    torus = make_torus(PolarizationType((1,)), PeriodMatrix(1j * np.eye(1)))
    chk = diagonal_halving_check(torus)
    assert chk.lhs == pytest.approx(0.5, rel=1e-12)
    assert chk.rhs == pytest.approx(0.5, rel=1e-12)
    assert chk.rel_err < 1e-12


def test_halving_hexagonal():
    tau = np.exp(1j * math.pi / 3) * np.eye(1)
    torus = make_torus(PolarizationType((1,)), PeriodMatrix(tau))
    chk = diagonal_halving_check(torus)
    assert chk.lhs == pytest.approx(1.0 / math.sqrt(3.0), rel=1e-10)
    assert chk.rel_err < 1e-9


def test_halving_random_tori():
    rng = np.random.default_rng(777)
    for n in (1, 2, 3):
        for _ in range(3):
            torus = _random_torus(rng, n)
            chk = diagonal_halving_check(torus)
            assert chk.rel_err < 1e-9, (n, chk)
            assert chk.rhs == pytest.approx(
                buser_sarnak(torus).length_sq / 2.0, rel=1e-12)
