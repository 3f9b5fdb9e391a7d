"""Criterion pipeline: formulas, exact comparisons, and the bound table."""

import math
from fractions import Fraction

import numpy as np
import pytest

from abelkit.criteria import (bauer_m, big_check, bounds_table, evaluate,
                              iyer_bound, nef_check, normality_bound,
                              seshadri_lower_bound)
from abelkit.torus import PeriodMatrix, PolarizationType, make_torus


def test_bauer_m_values():
    assert bauer_m(1, 1) == pytest.approx(2 / math.pi, rel=1e-14)
    assert bauer_m(1, 4) == pytest.approx(8 / math.pi, rel=1e-14)
    assert bauer_m(2, 2) == pytest.approx(2 / math.pi, rel=1e-14)
    with pytest.raises(ValueError):
        bauer_m(0, 1)
    with pytest.raises(ValueError):
        bauer_m(1, 0)


def test_seshadri_lower_bound_values():
    assert seshadri_lower_bound(8 / math.pi) == pytest.approx(1.0, rel=1e-14)
    assert seshadri_lower_bound(1.0) == pytest.approx(math.pi / 8, rel=1e-14)
    assert seshadri_lower_bound(2 / math.sqrt(3)) == pytest.approx(
        math.pi / (4 * math.sqrt(3)), rel=1e-14)


def test_nef_check_including_boundary():
    assert nef_check(1, 8 / math.pi)            # exact tie counts as nef
    assert not nef_check(1, 1.0)
    assert nef_check(2, bauer_m(2, 128))        # threshold value lands on n


def test_big_check_regressions():
    assert big_check(1, 4).intersection_number == 16
    assert big_check(1, 4).ok
    assert big_check(1, 2).intersection_number == 0
    assert not big_check(1, 2).ok               # boundary is not big
    assert big_check(2, 128).intersection_number == 86016


def test_big_check_sign_equivalence_grid():
    for n in range(1, 6):
        pivot = (2 * n) ** n
        for delta in (-pivot + 1, -1, 0, 1, 7, pivot):
            Ln = pivot + delta
            if Ln < 1:
                continue
            res = big_check(n, Ln)
            assert res.ok == (Ln > pivot)
            assert (res.intersection_number > 0) == res.ok


def test_bound_values():
    assert normality_bound(1).value == 4
    assert normality_bound(2).value == 64
    assert normality_bound(3).value == 1152
    assert normality_bound(3).min_h0 == 1152
    # a genuinely fractional case still ceils correctly
    nb = normality_bound(5)
    assert nb.value == Fraction(8 ** 5 * 5 ** 5, 2 * 120)
    assert nb.min_h0 == math.ceil(nb.value)
    assert iyer_bound(1) == 2
    assert iyer_bound(2) == 8
    assert iyer_bound(5) == 3840


def test_threshold_identity():
    # at Ln = 8^n n^n / 2 the Seshadri lower bound equals n exactly
    for n in range(1, 17):
        Ln_star = 8.0 ** n * float(n) ** n / 2.0
        s = seshadri_lower_bound(bauer_m(n, Ln_star))
        assert abs(s - n) <= 1e-12 * n
        assert Fraction(8 ** n * n ** n, 2) > Fraction((2 * n) ** n)


def test_evaluate_bauer_chain():
    rep = evaluate(PolarizationType((4,)))
    assert rep.verdict == "criterion_met"
    assert rep.h0 == 4 and rep.Ln == 4
    assert rep.m_value == pytest.approx(8 / math.pi, rel=1e-14)
    assert rep.nef_ok and rep.big_ok

    rep = evaluate(PolarizationType((3,)))
    assert rep.verdict == "criterion_not_met"
    assert rep.seshadri_lb == pytest.approx(0.75, rel=1e-14)

    rep = evaluate(PolarizationType((1, 64)))
    assert rep.verdict == "criterion_met"
    assert rep.h0 == 64
    assert rep.normality_bound_ok


def test_evaluate_computed_on_hexagonal_family():
    # type (d) hexagonal torus: m = 2d/sqrt(3); the criterion needs d >= 3
    for d, expect in [(1, False), (2, False), (3, True), (4, True)]:
        tau = d * np.exp(1j * math.pi / 3) * np.eye(1)
        torus = make_torus(PolarizationType((d,)), PeriodMatrix(tau))
        rep = evaluate(PolarizationType((d,)), m_source="computed", torus=torus)
        assert rep.m_value == pytest.approx(2 * d / math.sqrt(3), rel=1e-9)
        assert (rep.verdict == "criterion_met") is expect, (d, rep)


def test_evaluate_input_errors():
    with pytest.raises(ValueError):
        evaluate(PolarizationType((2,)), m_source="computed")
    with pytest.raises(ValueError):
        evaluate(PolarizationType((2,)), m_source="nonsense")
    torus = make_torus(PolarizationType((3,)), PeriodMatrix(1j * np.eye(1)))
    with pytest.raises(ValueError):
        evaluate(PolarizationType((2,)), m_source="computed", torus=torus)


def test_bounds_table_crossover_and_monotonicity():
    table = bounds_table(64)
    assert len(table.rows) == 64
    assert table.crossover == 24
    for row in table.rows:
        assert row.normality_smaller == (row.normality_bound < row.iyer_bound)
        assert row.normality_smaller == (row.n >= 24)
    # exact ratio is strictly decreasing from n = 10 on
    ratios = [row.normality_bound / Fraction(row.iyer_bound) for row in table.rows]
    assert all(b < a for a, b in zip(ratios[9:], ratios[10:]))
    # small-n sanity rows
    assert table.rows[0].normality_bound == 4 and table.rows[0].iyer_bound == 2
    assert table.rows[1].normality_bound == 64 and table.rows[1].iyer_bound == 8
    assert bounds_table(10).crossover is None
