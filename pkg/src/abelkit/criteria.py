"""Projective-normality criteria and bound tables for polarized tori.

The sufficient criterion evaluated here: blow up the product of the torus
with itself along the diagonal; the polarization pulled back minus n times
the exceptional divisor must be nef (checked through a Seshadri-type lower
bound (pi/8) * m, where m is the minimal projected length invariant) and
big (checked through an exact intersection-number sign).  When both hold
the verdict is ``criterion_met``; a failed criterion proves nothing in the
other direction, so the verdict never claims non-normality.

Two sources for m: ``bauer`` uses the existence bound
m = (1/pi) * (2*Ln)^(1/n) — some torus of the given type attains it — and
``computed`` uses the lattice minimum of a concrete torus.

All bound comparisons are exact (big integers / rationals); floats appear
only where pi does.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

from .svp import buser_sarnak
from .torus import PolarizationType, PolarizedTorus

NEF_TIE_REL_TOL = 1e-9   # float slack so exact ties (n == pi/8*m) count as nef


def bauer_m(n: int, Ln: float) -> float:
    """Existence value of the minimal projected length: (1/pi)*(2*Ln)^(1/n)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not Ln > 0:
        raise ValueError(f"Ln must be positive, got {Ln}")
    return (2.0 * float(Ln)) ** (1.0 / n) / math.pi


def seshadri_lower_bound(m_value: float) -> float:
    """Seshadri constant of the off-diagonal polarization is >= (pi/8)*m."""
    if not m_value > 0:
        raise ValueError(f"m_value must be positive, got {m_value}")
    return math.pi / 8.0 * m_value


def nef_check(n: int, m_value: float) -> bool:
    """True iff n <= (pi/8)*m.  Ties count as nef (the admissible interval
    of twist coefficients is closed at the top)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    s = seshadri_lower_bound(m_value)
    return n <= s + NEF_TIE_REL_TOL * max(1.0, n, s)


@dataclass(frozen=True)
class BigCheck:
    ok: bool
    intersection_number: int


def big_check(n: int, Ln: int) -> BigCheck:
    """Exact sign test for bigness of the twisted polarization.

    The relevant top self-intersection number on the blow-up equals
    C(2n, n) * Ln * (Ln - (2n)^n); it is positive iff Ln > (2n)^n, and
    the boundary case counts as not big (strict inequality).
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    Ln = int(Ln)
    if Ln < 1:
        raise ValueError(f"Ln must be >= 1, got {Ln}")
    number = math.comb(2 * n, n) * Ln * (Ln - (2 * n) ** n)
    return BigCheck(ok=Ln > (2 * n) ** n, intersection_number=number)


@dataclass(frozen=True)
class NormalityBound:
    """Exact rational bound 8^n * n^n / (2 * n!) and the least integer
    section count h0 meeting it."""
    value: Fraction
    min_h0: int


def normality_bound(n: int) -> NormalityBound:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    value = Fraction(8 ** n * n ** n, 2 * math.factorial(n))
    return NormalityBound(value=value, min_h0=math.ceil(value))


def iyer_bound(n: int) -> int:
    """Classical sufficient bound 2^n * n! (criterion: h0 strictly above)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return 2 ** n * math.factorial(n)


@dataclass(frozen=True)
class CriteriaReport:
    n: int
    type: PolarizationType
    h0: int
    Ln: int
    m_value: float
    seshadri_lb: float
    nef_ok: bool
    big_ok: bool
    intersection_number: int
    normality_bound_ok: bool
    iyer_bound_ok: bool
    verdict: str

    def __post_init__(self):
        if self.verdict not in ("criterion_met", "criterion_not_met"):
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if (self.verdict == "criterion_met") != (self.nef_ok and self.big_ok):
            raise AssertionError("verdict must equal nef_ok AND big_ok")


def evaluate(ptype: PolarizationType, m_source: str = "bauer",
             torus: PolarizedTorus | None = None) -> CriteriaReport:
    """Run the whole criterion pipeline for one polarization type.

    m_source="bauer" scores the best torus of the type (existence value);
    m_source="computed" scores the concrete ``torus``, whose type must match.
    """
    n = ptype.n
    h0 = ptype.h0
    Ln = math.factorial(n) * h0
    if m_source == "bauer":
        m_value = bauer_m(n, float(Ln))
    elif m_source == "computed":
        if torus is None:
            raise ValueError("m_source='computed' requires a torus")
        if tuple(torus.ptype.d) != tuple(ptype.d):
            raise ValueError(
                f"torus has type {tuple(torus.ptype.d)}, expected {tuple(ptype.d)}")
        m_value = buser_sarnak(torus).length_sq
    else:
        raise ValueError(f"m_source must be 'bauer' or 'computed', got {m_source!r}")

    nef_ok = nef_check(n, m_value)
    big = big_check(n, Ln)
    verdict = "criterion_met" if (nef_ok and big.ok) else "criterion_not_met"
    return CriteriaReport(
        n=n, type=ptype, h0=h0, Ln=Ln, m_value=m_value,
        seshadri_lb=seshadri_lower_bound(m_value),
        nef_ok=nef_ok, big_ok=big.ok,
        intersection_number=big.intersection_number,
        normality_bound_ok=Fraction(h0) >= normality_bound(n).value,
        iyer_bound_ok=h0 > iyer_bound(n),
        verdict=verdict)


@dataclass(frozen=True)
class TableRow:
    n: int
    normality_bound: Fraction
    iyer_bound: int
    ratio: float            # normality_bound / iyer_bound, for display
    normality_smaller: bool  # exact comparison


@dataclass(frozen=True)
class BoundsTable:
    rows: tuple[TableRow, ...]
    crossover: int | None    # least n where the new bound beats 2^n * n!


def bounds_table(n_max: int) -> BoundsTable:
    """Exact side-by-side of the two sufficient bounds for n = 1..n_max.

    The comparison 8^n*n^n/(2*n!) < 2^n*n! reduces to 4^n*n^n < 2*(n!)^2,
    decided in big-integer arithmetic; the crossover (first n where the
    newer bound is smaller) is reported, or None if it is beyond n_max.
    """
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    rows = []
    crossover = None
    for n in range(1, n_max + 1):
        nb = normality_bound(n).value
        ib = iyer_bound(n)
        smaller = 4 ** n * n ** n < 2 * math.factorial(n) ** 2
        assert smaller == (nb < ib)
        if smaller and crossover is None:
            crossover = n
        rows.append(TableRow(n=n, normality_bound=nb, iyer_bound=ib,
                             ratio=float(nb / ib), normality_smaller=smaller))
    return BoundsTable(rows=tuple(rows), crossover=crossover)
