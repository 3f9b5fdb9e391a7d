"""Areas of holomorphic curves inside tubes around a subtorus.

A tube of radius r around a subtorus S consists of the points whose
F-perp distance to S is below r; the radius is capped at half the square
root of the relative minimal projected length, where the tube embeds
isometrically.  A polynomial curve is given in split coordinates: an
F-component f(t) and an F-perp component p(t) (coefficient vectors in the
ambient space, validated to lie in the respective subspaces).  Its area
inside the tube is

    integral over {|t| < domain_radius, |p(t)|_H < r} of |gamma'(t)|_H^2

which is bounded below by pi r^2 times the number of exceptional
intersections: the sum of vanishing orders of p at its zeros in the
domain.  ``federer_check`` is the Euclidean analogue for a curve through
the origin of a ball, with the vanishing order at 0 as multiplicity.

Integration scheme: both |p(x+iy)|^2 and |gamma'(x+iy)|^2 are real
bivariate polynomials, so for fixed x the membership set in y is cut out
by real roots of a univariate polynomial and the inner integral is an
exact polynomial antiderivative between cuts; the outer x-integral is
adaptive (QUADPACK).  Deterministic; the reported error estimate is the
outer quadrature's.
"""

import cmath
import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy import integrate

from .svp import relative_buser_sarnak
from .torus import Subtorus, complex_from_json

RADIUS_GUARD = 1e-12
DEFAULT_TOL = 1e-7
COEFF_TOL = 1e-8       # relative threshold for vanishing-order decisions
MATCH_TOL = 1e-6       # clustering radius for intersection parameter points


class TubeError(ValueError):
    pass


class CurveError(ValueError):
    pass


def _coeff_array(coeffs, width: int | None = None) -> np.ndarray:
    """Coefficient vectors as a (deg+1) x m complex array (lowest first)."""
    if coeffs is None or len(coeffs) == 0:
        if width is None:
            raise CurveError("empty coefficient list needs an ambient dimension")
        return np.zeros((1, width), dtype=complex)
    arr = np.array([np.asarray(c, dtype=complex).ravel() for c in coeffs], dtype=complex)
    if width is not None and arr.shape[1] != width:
        raise CurveError(f"coefficient vectors must have length {width}, got {arr.shape[1]}")
    return arr


def _poly_derivative(c: np.ndarray) -> np.ndarray:
    if c.shape[0] <= 1:
        return np.zeros((1, c.shape[1]), dtype=complex)
    return c[1:] * np.arange(1, c.shape[0])[:, None]


def _poly_eval(c: np.ndarray, t: complex) -> np.ndarray:
    out = np.zeros(c.shape[1], dtype=complex)
    for row in c[::-1]:
        out = out * t + row
    return out


def _taylor_shift(c: np.ndarray, t0: complex) -> np.ndarray:
    """Coefficients of p(t0 + s) as a polynomial in s."""
    deg = c.shape[0] - 1
    out = np.zeros_like(c)
    for k in range(deg + 1):
        for l in range(k + 1):
            out[l] += c[k] * math.comb(k, l) * t0 ** (k - l)
    return out


def _vanishing_order(c: np.ndarray, t0: complex) -> int:
    """Vanishing order of the vector polynomial at t0 (0 if nonvanishing)."""
    shifted = _taylor_shift(c, t0)
    norms = np.linalg.norm(shifted, axis=1)
    scale = norms.max()
    if scale == 0.0:
        raise CurveError("polynomial is identically zero")
    for l, v in enumerate(norms):
        if v > COEFF_TOL * scale:
            return l
    raise CurveError("could not determine vanishing order")


@dataclass(frozen=True)
class CurveSpec:
    """Polynomial curve in split coordinates with declared S-intersections.

    ``mult_at_S`` lists (parameter point, multiplicity) for every zero of
    the F-perp component inside the domain; each multiplicity is checked
    against the vanishing order computed from the coefficients, and the
    curve must be immersed at each such point (a point where both
    components degenerate is rejected: the identification of multiplicity
    with vanishing order needs an immersed parametrization).
    """

    f_coeffs: np.ndarray          # (deg_f+1) x n complex
    p_coeffs: np.ndarray          # (deg_p+1) x n complex
    domain_radius: float
    mult_at_S: tuple[tuple[complex, int], ...]

    def __post_init__(self):
        p = _coeff_array(self.p_coeffs, None)
        f = _coeff_array(self.f_coeffs, p.shape[1])
        object.__setattr__(self, "f_coeffs", f)
        object.__setattr__(self, "p_coeffs", p)
        if not (self.domain_radius > 0 and math.isfinite(self.domain_radius)):
            raise CurveError(f"domain_radius must be positive, got {self.domain_radius}")
        mults = tuple((complex(t), int(m)) for t, m in self.mult_at_S)
        object.__setattr__(self, "mult_at_S", mults)

        scale = max(np.linalg.norm(f), np.linalg.norm(p))
        if scale == 0.0 or (f.shape[0] <= 1 and p.shape[0] <= 1):
            raise CurveError("curve must be a nonconstant polynomial map")
        if np.linalg.norm(p) <= 0.0:
            raise CurveError("the F-perp component must not vanish identically")

        dgamma = _padded_sum(_poly_derivative(f), _poly_derivative(p))
        for t0, m in mults:
            if m < 1:
                raise CurveError(f"multiplicity at t={t0} must be >= 1, got {m}")
            if abs(t0) >= self.domain_radius:
                raise CurveError(f"declared point t={t0} is outside the parameter domain")
            order = _vanishing_order(p, t0)
            if order != m:
                raise CurveError(
                    f"declared multiplicity {m} at t={t0} does not match "
                    f"the vanishing order {order} of the F-perp component")
            dval = np.linalg.norm(_poly_eval(dgamma, t0))
            dscale = max(np.linalg.norm(dgamma), 1e-300)
            if dval <= COEFF_TOL * dscale:
                raise CurveError(
                    f"curve is not immersed at t={t0} (both components degenerate); "
                    "such parametrizations are rejected")

    @property
    def ambient_dim(self) -> int:
        return self.f_coeffs.shape[1]


def _padded_sum(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    rows = max(a.shape[0], b.shape[0])
    out = np.zeros((rows, a.shape[1]), dtype=complex)
    out[: a.shape[0]] += a
    out[: b.shape[0]] += b
    return out


@dataclass(frozen=True)
class TubeSpec:
    """A subtorus with an admissible tube radius 0 < r <= sqrt(m_rel)/2."""

    sub: Subtorus
    r: float
    m_rel: float = None  # type: ignore[assignment]

    def __post_init__(self):
        if not (self.r > 0 and math.isfinite(self.r)):
            raise TubeError(f"tube radius must be positive, got {self.r}")
        m = relative_buser_sarnak(self.sub).length_sq
        cap = math.sqrt(m) / 2.0
        if self.r > cap + RADIUS_GUARD:
            raise TubeError(
                f"tube radius {self.r} exceeds sqrt(m)/2 = {cap} "
                "(the tube would self-overlap)")
        object.__setattr__(self, "m_rel", m)


@dataclass(frozen=True)
class VolumeReport:
    volume: float
    bound: float
    slack: float
    quadrature_error_estimate: float

    def __post_init__(self):
        if self.slack < -(self.quadrature_error_estimate + 1e-9 * max(1.0, abs(self.bound))):
            raise AssertionError(
                f"volume {self.volume} violates the lower bound {self.bound} "
                "beyond quadrature error; this indicates an internal bug")


# --- bivariate polynomial helpers -------------------------------------------

def _t_powers(deg: int) -> list[np.ndarray]:
    """2-D coefficient arrays of t^j for t = x + iy, j = 0..deg."""
    t1 = np.zeros((2, 2), dtype=complex)
    t1[1, 0] = 1.0
    t1[0, 1] = 1.0j
    out = [np.ones((1, 1), dtype=complex)]
    for _ in range(deg):
        out.append(_pmul2(out[-1], t1))
    return out


def _pmul2(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.zeros((a.shape[0] + b.shape[0] - 1, a.shape[1] + b.shape[1] - 1), dtype=complex)
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            v = a[i, j]
            if v != 0:
                out[i:i + b.shape[0], j:j + b.shape[1]] += v * b
    return out


def _norm_sq_poly2d(coeffs: np.ndarray, metric: np.ndarray) -> np.ndarray:
    """Real bivariate coefficients of |p(x+iy)|_H^2 for vector polynomial p."""
    deg = coeffs.shape[0] - 1
    a = np.conj(coeffs) @ metric @ coeffs.T     # a[j, j'] = <c_j, c_j'>_H, Hermitian
    tp = _t_powers(deg)
    size = 2 * deg + 1
    out = np.zeros((size, size), dtype=complex)
    for j in range(deg + 1):
        for jp in range(deg + 1):
            if a[j, jp] != 0:
                prod = _pmul2(np.conj(tp[j]), tp[jp])
                out[: prod.shape[0], : prod.shape[1]] += a[j, jp] * prod
    return np.real(out)


def _real_roots(coeffs_y: np.ndarray) -> np.ndarray:
    """Real roots of a univariate real polynomial (lowest-first coeffs)."""
    c = coeffs_y.copy()
    scale = np.abs(c).max()
    if scale == 0.0:
        return np.array([])
    keep = np.nonzero(np.abs(c) > 1e-14 * scale)[0]
    if keep.size == 0 or keep[-1] == 0:
        return np.array([])
    c = c[: keep[-1] + 1]
    roots = npoly.polyroots(c)
    real = roots[np.abs(roots.imag) < 1e-7 * (1.0 + np.abs(roots.real))].real
    return np.sort(real)


def _integrate_region(g2d: np.ndarray, f2d: np.ndarray, level: float, big_r: float,
                      tol: float, anchors: Sequence[float] = ()):
    """Integral of the polynomial f2d over {g2d < level, x^2+y^2 < big_r^2}.

    Returns (value, error_estimate, converged).
    """
    def h(x: float) -> float:
        if abs(x) >= big_r:
            return 0.0
        y_cap = math.sqrt(big_r * big_r - x * x)
        qy = npoly.polyval(x, g2d)
        qy = np.atleast_1d(qy).astype(float)
        qy[0] -= level
        cuts = [-y_cap, y_cap]
        for root in _real_roots(qy):
            if -y_cap < root < y_cap:
                cuts.append(float(root))
        cuts.sort()
        fy = np.atleast_1d(npoly.polyval(x, f2d)).astype(float)
        f_anti = npoly.polyint(fy)
        total = 0.0
        for a, b in zip(cuts[:-1], cuts[1:]):
            if b - a <= 0.0:
                continue
            mid = 0.5 * (a + b)
            if float(npoly.polyval(mid, qy)) < 0.0:
                total += float(npoly.polyval(b, f_anti) - npoly.polyval(a, f_anti))
        return total

    pts = sorted({float(a) for a in anchors if -big_r < a < big_r})
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        out = integrate.quad(h, -big_r, big_r, epsabs=tol * 0.25, epsrel=1e-11,
                             limit=500, points=pts or None, full_output=1)
    value, err = float(out[0]), float(out[1])
    converged = len(out) < 4 and err <= tol
    if not converged:
        warnings.warn(f"quadrature did not reach tolerance {tol} (estimate {err:.3e}); "
                      "reporting the best value", RuntimeWarning, stacklevel=3)
    return value, err, converged


# --- public operations -------------------------------------------------------

def _split_components(tube: TubeSpec, curve: CurveSpec):
    sub = tube.sub
    n = sub.parent.n
    if curve.ambient_dim != n:
        raise CurveError(f"curve lives in C^{curve.ambient_dim}, torus needs C^{n}")
    f, p = curve.f_coeffs, curve.p_coeffs
    scale = max(float(np.linalg.norm(f)), float(np.linalg.norm(p)))
    f_defect = float(np.linalg.norm((sub.proj_perp @ f.T)))
    p_defect = float(np.linalg.norm(sub.proj_perp @ p.T - p.T))
    if f_defect > 1e-8 * max(scale, 1e-300):
        raise CurveError(f"f-coefficients do not lie in F (defect {f_defect:.3e})")
    if p_defect > 1e-8 * max(scale, 1e-300):
        raise CurveError(f"p-coefficients do not lie in F-perp (defect {p_defect:.3e})")
    return f, p


def curve_area_in_tube(tube: TubeSpec, curve: CurveSpec, tol: float = DEFAULT_TOL) -> float:
    """Area of the curve inside the tube (with multiplicity of the
    parametrization), by the strip integrator described in the module docs."""
    value, _, _ = _area_with_error(tube, curve, tol)
    return value


def _area_with_error(tube: TubeSpec, curve: CurveSpec, tol: float):
    f, p = _split_components(tube, curve)
    h = tube.sub.parent.metric
    dgamma = _padded_sum(_poly_derivative(f), _poly_derivative(p))
    g2d = _norm_sq_poly2d(p, h)
    f2d = _norm_sq_poly2d(dgamma, h)
    anchors = [t.real for t, _ in curve.mult_at_S] + [0.0]
    return _integrate_region(g2d, f2d, tube.r ** 2, curve.domain_radius, tol, anchors)


def exceptional_intersection(curve: CurveSpec) -> int:
    """Sum of vanishing orders of the F-perp component over its zeros in the
    open parameter domain; must agree with the declared ``mult_at_S``."""
    p = curve.p_coeffs
    norms = np.linalg.norm(p, axis=1)
    comp = int(np.argmax(np.abs(p).max(axis=0) if p.size else 0))
    col = p[:, comp]
    scale = np.abs(col).max()
    found: list[tuple[complex, int]] = []
    if scale > 0 and np.nonzero(np.abs(col) > 1e-12 * scale)[0][-1] >= 1:
        keep = np.nonzero(np.abs(col) > 1e-12 * scale)[0][-1]
        roots = npoly.polyroots(col[: keep + 1])
        p_norm_scale = float(norms.sum())
        cands = []
        for t0 in roots:
            if abs(t0) >= curve.domain_radius:
                continue
            local = p_norm_scale * max(1.0, abs(t0)) ** (p.shape[0] - 1)
            if np.linalg.norm(_poly_eval(p, t0)) <= 1e-7 * local:
                cands.append(complex(t0))
        cands.sort(key=lambda z: (round(z.real, 9), round(z.imag, 9)))
        clusters: list[list[complex]] = []
        for t0 in cands:
            for cl in clusters:
                if abs(t0 - cl[0]) < MATCH_TOL * max(1.0, curve.domain_radius):
                    cl.append(t0)
                    break
            else:
                clusters.append([t0])
        for cl in clusters:
            center = sum(cl) / len(cl)
            found.append((center, _vanishing_order(p, center)))

    declared = list(curve.mult_at_S)
    tol = MATCH_TOL * max(1.0, curve.domain_radius)
    used = [False] * len(declared)
    for center, order in found:
        match = next((i for i, (t0, _) in enumerate(declared)
                      if not used[i] and abs(t0 - center) < 10 * tol), None)
        if match is None:
            raise CurveError(
                f"undeclared intersection with S at t={center} (order {order})")
        used[match] = True
        if declared[match][1] != order:
            raise CurveError(
                f"declared multiplicity {declared[match][1]} at t={declared[match][0]} "
                f"does not match computed order {order}")
    for i, flag in enumerate(used):
        if not flag:
            raise CurveError(f"declared point t={declared[i][0]} is not a zero "
                             "of the F-perp component inside the domain")
    return sum(m for _, m in declared)


def volume_bound_check(tube: TubeSpec, curves, tol: float = DEFAULT_TOL) -> VolumeReport:
    """Compare curve area in the tube against pi r^2 times the exceptional
    intersection count.  Accepts one CurveSpec or a sequence (sums over
    components)."""
    if isinstance(curves, CurveSpec):
        curves = [curves]
    volume = 0.0
    err_total = 0.0
    inter = 0
    for c in curves:
        v, e, _ = _area_with_error(tube, c, tol)
        volume += v
        err_total += e
        inter += exceptional_intersection(c)
    bound = math.pi * tube.r ** 2 * inter
    return VolumeReport(volume=volume, bound=bound, slack=volume - bound,
                        quadrature_error_estimate=err_total)


@dataclass(frozen=True)
class FedererReport:
    area: float
    bound: float
    mult: int
    r: float
    quadrature_error_estimate: float


def federer_check(coeffs, r: float, mult: int | None = None,
                  domain_radius: float | None = None,
                  tol: float = DEFAULT_TOL) -> FedererReport:
    """Euclidean density bound: a curve through the origin of multiplicity mu
    has area at least mu * pi r^2 inside the ball of radius r.

    ``coeffs`` are coefficient vectors of a polynomial map into C^m with
    gamma(0) = 0; mu is the vanishing order at 0 (validated against ``mult``
    if supplied).
    """
    c = _coeff_array(coeffs, None)
    if not (r > 0 and math.isfinite(r)):
        raise CurveError(f"radius must be positive, got {r}")
    scale = float(np.linalg.norm(c))
    if scale == 0.0 or c.shape[0] <= 1:
        raise CurveError("curve must be a nonconstant polynomial map")
    if np.linalg.norm(c[0]) > COEFF_TOL * scale:
        raise CurveError("curve must pass through the origin at t = 0")
    c = c.copy()
    c[0] = 0.0
    mu = _vanishing_order(c, 0.0)
    if mult is not None and mult != mu:
        raise CurveError(f"declared multiplicity {mult} does not match vanishing order {mu}")

    if domain_radius is None:
        norms = np.linalg.norm(c, axis=1)
        deg = int(np.nonzero(norms > COEFF_TOL * norms.max())[0][-1])
        lead = norms[deg]
        big_r = 1.0
        while lead * big_r ** deg <= r + sum(norms[j] * big_r ** j for j in range(deg)):
            big_r *= 2.0
            if big_r > 1e12:
                raise CurveError("could not bound the region |gamma| < r")
        domain_radius = big_r

    eye = np.eye(c.shape[1])
    g2d = _norm_sq_poly2d(c, eye)
    f2d = _norm_sq_poly2d(_poly_derivative(c), eye)
    area, err, _ = _integrate_region(g2d, f2d, r * r, domain_radius, tol, [0.0])
    bound = mu * math.pi * r * r
    if area < bound - (err + 1e-9 * max(1.0, bound)):
        raise AssertionError("area violates the density bound beyond quadrature error")
    return FedererReport(area=area, bound=bound, mult=mu, r=r,
                         quadrature_error_estimate=err)


# --- JSON wire format ---------------------------------------------------------
#
# curve: {"f": [[{"re":..,"im":..}, ...], ...], "p": [[...], ...],
#         "domain_radius": x, "mults": [[t_re, t_im, m], ...]}

def curve_from_dict(data: dict) -> CurveSpec:
    for key in ("f", "p", "domain_radius"):
        if key not in data:
            raise ValueError(f"curve JSON requires a {key!r} field")
    f = [[complex_from_json(z) for z in vec] for vec in data["f"]]
    p = [[complex_from_json(z) for z in vec] for vec in data["p"]]
    mults = tuple((complex(float(tr), float(ti)), int(m))
                  for tr, ti, m in data.get("mults", []))
    return CurveSpec(f_coeffs=np.array(f, dtype=complex) if f else None,
                     p_coeffs=np.array(p, dtype=complex),
                     domain_radius=float(data["domain_radius"]),
                     mult_at_S=mults)
