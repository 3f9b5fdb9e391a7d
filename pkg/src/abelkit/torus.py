"""Polarized complex tori in canonical coordinates, and their subtori.

Conventions (fixed once, used everywhere):

* A torus of type ``(d_1, ..., d_n)`` with period matrix ``tau`` is
  ``C^n / Lambda`` with ``Lambda = Delta Z^n + tau Z^n``,
  ``Delta = diag(d_1, ..., d_n)``, ``tau`` symmetric with ``Im tau`` positive
  definite.  This is one convenient normal form; no canonicity claim is made.
* The polarization metric is the Hermitian form ``H = (Im tau)^{-1}``
  (a real symmetric matrix), ``H(u, v) = u^T H conj(v)``, linear in the
  first slot.  Lengths are ``|v|^2 = Re H(v, v)``.
* The Gram matrix is ``Re H`` on the 2n lattice basis columns
  ``[Delta | tau]``; the alternating pairing ``Im H`` on the same basis is
  an integer matrix whose elementary divisors recover the type, each entry
  repeated twice.

All public types are immutable after construction; every function here is
pure and safe for concurrent use.
"""

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _intlin

TAU_SYMMETRY_TOL = 1e-12
RESIDUAL_TOL = 1e-9  # pairing integrality and validation gates


class TorusError(ValueError):
    """Invariant violation in torus or subtorus construction.

    ``invariant`` names the failed check (stable identifiers, used by the
    CLI for its validation exit path).
    """

    def __init__(self, invariant: str, message: str):
        super().__init__(f"{invariant}: {message}")
        self.invariant = invariant


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class PolarizationType:
    """Polarization type: positive integers with d_1 | d_2 | ... | d_n."""

    d: tuple[int, ...]

    def __post_init__(self):
        if len(self.d) == 0:
            raise TorusError("type_nonempty", "type must have n >= 1 entries")
        for x in self.d:
            if not isinstance(x, (int, np.integer)) or isinstance(x, bool) or x < 1:
                raise TorusError("type_positive", f"type entries must be positive integers, got {x!r}")
        object.__setattr__(self, "d", tuple(int(x) for x in self.d))
        for a, b in zip(self.d, self.d[1:]):
            if b % a != 0:
                raise TorusError("type_divisibility", f"divisibility chain broken: {a} does not divide {b}")

    @property
    def n(self) -> int:
        return len(self.d)

    @property
    def h0(self) -> int:
        return math.prod(self.d)


@dataclass(frozen=True)
class PeriodMatrix:
    """Symmetric n x n complex matrix with positive definite imaginary part."""

    tau: np.ndarray

    def __post_init__(self):
        tau = np.array(self.tau, dtype=complex)
        if tau.ndim != 2 or tau.shape[0] != tau.shape[1] or tau.shape[0] == 0:
            raise TorusError("tau_square", f"tau must be square and nonempty, got shape {tau.shape}")
        scale = max(1.0, float(np.abs(tau).max()))
        asym = float(np.abs(tau - tau.T).max())
        if asym > TAU_SYMMETRY_TOL * scale:
            raise TorusError("tau_symmetric", f"tau asymmetry {asym:.3e} exceeds tolerance")
        tau = (tau + tau.T) / 2.0
        eigs = np.linalg.eigvalsh(tau.imag)
        if eigs[0] <= 0.0:
            raise TorusError("tau_imag_posdef", f"Im tau has minimal eigenvalue {eigs[0]:.3e} <= 0")
        object.__setattr__(self, "tau", _freeze(tau))

    @property
    def n(self) -> int:
        return self.tau.shape[0]


def _lattice_basis(d: tuple[int, ...], tau: np.ndarray) -> np.ndarray:
    return np.hstack([np.diag(np.asarray(d, dtype=float)).astype(complex), tau])


def _metric(tau: np.ndarray) -> np.ndarray:
    return np.linalg.inv(tau.imag)


def _gram(basis: np.ndarray, h: np.ndarray) -> np.ndarray:
    # Re H(b_i, b_j) with H real symmetric: Re(B)^T H Re(B) + Im(B)^T H Im(B)
    g = basis.real.T @ h @ basis.real + basis.imag.T @ h @ basis.imag
    return (g + g.T) / 2.0


def _pairing(basis: np.ndarray, h: np.ndarray) -> np.ndarray:
    # Im H(b_i, b_j) = Im(b_i)^T H Re(b_j) - Re(b_i)^T H Im(b_j)
    e = basis.imag.T @ h @ basis.real - basis.real.T @ h @ basis.imag
    return (e - e.T) / 2.0


@dataclass(frozen=True)
class PolarizedTorus:
    """A polarized torus in the canonical coordinates described above."""

    ptype: PolarizationType
    period: PeriodMatrix
    lattice_basis: np.ndarray  # n x 2n complex, columns [Delta | tau]
    gram: np.ndarray           # 2n x 2n real SPD
    h0: int
    Ln: int

    @property
    def n(self) -> int:
        return self.ptype.n

    @property
    def metric(self) -> np.ndarray:
        """The Hermitian metric H = (Im tau)^{-1} as a real symmetric matrix."""
        return _metric(self.period.tau)

    def norm_sq(self, v: np.ndarray) -> float:
        """Squared length of a complex vector under the polarization metric."""
        v = np.asarray(v, dtype=complex)
        return float(np.real(np.conj(v) @ self.metric @ v))


def make_torus(ptype: Sequence[int] | PolarizationType, tau) -> PolarizedTorus:
    """Build a polarized torus, checking every structural invariant.

    Raises TorusError naming the violated invariant.
    """
    pt = ptype if isinstance(ptype, PolarizationType) else PolarizationType(tuple(ptype))
    pm = tau if isinstance(tau, PeriodMatrix) else PeriodMatrix(tau)
    if pm.n != pt.n:
        raise TorusError("dimension_match", f"type has n={pt.n} but tau is {pm.n} x {pm.n}")

    basis = _lattice_basis(pt.d, pm.tau)
    h = _metric(pm.tau)
    gram = _gram(basis, h)
    try:
        np.linalg.cholesky(gram)
    except np.linalg.LinAlgError:
        raise TorusError("gram_posdef", "gram matrix is not positive definite") from None

    pairing = _pairing(basis, h)
    rounded = np.rint(pairing)
    resid = float(np.abs(pairing - rounded).max())
    if resid > RESIDUAL_TOL:
        raise TorusError("pairing_integral", f"pairing integrality residual {resid:.3e}")
    e_int = rounded.astype(np.int64)

    divisors = _intlin.invariant_factors(e_int)
    expected = [x for di in pt.d for x in (di, di)]
    if divisors != expected:
        raise TorusError("pairing_divisors", f"elementary divisors {divisors} do not match type {pt.d} doubled")
    # pf(E)^2 = det(E) = (prod d_i)^2, checked exactly
    if _intlin.det_int(e_int) != pt.h0 ** 2:
        raise TorusError("pairing_pfaffian", "det of the pairing does not equal (prod d_i)^2")

    return PolarizedTorus(
        ptype=pt,
        period=pm,
        lattice_basis=_freeze(basis),
        gram=_freeze(gram),
        h0=pt.h0,
        Ln=math.factorial(pt.n) * pt.h0,
    )


@dataclass(frozen=True)
class ValidationCheck:
    name: str
    ok: bool
    residual: float | None = None
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[ValidationCheck, ...]
    recovered_type: tuple[int, ...] | None

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failed(self) -> list[ValidationCheck]:
        return [c for c in self.checks if not c.ok]


def validate(obj, tau=None) -> ValidationReport:
    """Validate a torus or raw (type, tau) data.  Always returns a report.

    Accepts a PolarizedTorus, or a type sequence plus a tau matrix (possibly
    malformed: asymmetric tau, broken divisibility chain, ...).
    """
    if isinstance(obj, PolarizedTorus):
        d_raw, tau_raw = list(obj.ptype.d), np.array(obj.period.tau)
    else:
        d_raw, tau_raw = list(obj), np.array(tau, dtype=complex)

    checks: list[ValidationCheck] = []
    recovered = None

    type_ok = bool(d_raw) and all(
        isinstance(x, (int, np.integer)) and not isinstance(x, bool) and x >= 1 for x in d_raw
    )
    chain_ok = type_ok and all(b % a == 0 for a, b in zip(d_raw, d_raw[1:]))
    checks.append(ValidationCheck("type_positive", type_ok))
    checks.append(ValidationCheck(
        "type_divisibility", chain_ok,
        detail="" if chain_ok else f"chain broken in {tuple(d_raw)}"))

    square = tau_raw.ndim == 2 and tau_raw.shape[0] == tau_raw.shape[1] and tau_raw.size > 0
    checks.append(ValidationCheck("tau_square", square, detail=f"shape {tau_raw.shape}"))
    dims_ok = square and type_ok and len(d_raw) == tau_raw.shape[0]
    checks.append(ValidationCheck("dimension_match", dims_ok))
    if not (square and dims_ok and chain_ok):
        return ValidationReport(tuple(checks), None)

    scale = max(1.0, float(np.abs(tau_raw).max()))
    asym = float(np.abs(tau_raw - tau_raw.T).max())
    checks.append(ValidationCheck("tau_symmetric", asym <= RESIDUAL_TOL * scale, residual=asym))
    tau_s = (tau_raw + tau_raw.T) / 2.0
    min_eig = float(np.linalg.eigvalsh(tau_s.imag)[0])
    checks.append(ValidationCheck("tau_imag_posdef", min_eig > 0.0, residual=min_eig))
    if not (asym <= RESIDUAL_TOL * scale and min_eig > 0.0):
        return ValidationReport(tuple(checks), None)

    d = tuple(int(x) for x in d_raw)
    basis = _lattice_basis(d, tau_s)
    h = _metric(tau_s)
    gram = _gram(basis, h)
    gram_min = float(np.linalg.eigvalsh(gram)[0])
    checks.append(ValidationCheck("gram_posdef", gram_min > 0.0, residual=gram_min))

    pairing = _pairing(basis, h)
    resid = float(np.abs(pairing - np.rint(pairing)).max())
    integral = resid <= RESIDUAL_TOL
    checks.append(ValidationCheck("pairing_integral", integral, residual=resid))
    if integral:
        e_int = np.rint(pairing).astype(np.int64)
        divisors = _intlin.invariant_factors(e_int)
        expected = [x for di in d for x in (di, di)]
        match = divisors == expected
        if match:
            recovered = d
        checks.append(ValidationCheck(
            "pairing_divisors", match,
            detail=f"recovered {divisors}, expected each of {d} twice"))
        checks.append(ValidationCheck(
            "pairing_pfaffian", _intlin.det_int(e_int) == math.prod(d) ** 2))
    return ValidationReport(tuple(checks), recovered)


@dataclass(frozen=True)
class Subtorus:
    """A complex subtorus of complex dimension k, given by a saturated
    rank-2k sublattice of the parent lattice (columns in lattice-basis
    coordinates)."""

    parent: PolarizedTorus
    k: int
    sublattice: np.ndarray        # 2n x 2k integer columns
    F_basis: np.ndarray           # n x k complex basis of the tangent space F
    proj_perp: np.ndarray         # n x n complex matrix: H-orthogonal projection onto F-perp
    complement: np.ndarray        # 2n x 2(n-k) integer columns completing the sublattice

    def project_perp(self, v: np.ndarray) -> np.ndarray:
        """Apply the H-orthogonal projection away from F to an ambient vector."""
        return self.proj_perp @ np.asarray(v, dtype=complex)


def make_subtorus(torus: PolarizedTorus, sublattice) -> Subtorus:
    """Build a subtorus from integer sublattice generators (columns).

    Checks: integrality, linear independence, even rank 2k with 0 <= k < n,
    complex-linearity of the real span (J-defect reported on failure), and
    saturation (a witness lattice vector is reported on failure).
    """
    n = torus.n
    cols = np.asarray(sublattice)
    if cols.size == 0:
        cols = np.zeros((2 * n, 0))
    if cols.ndim != 2 or cols.shape[0] != 2 * n:
        raise TorusError("sublattice_shape", f"expected 2n={2*n} rows, got shape {cols.shape}")
    try:
        a = _intlin.as_int_matrix(cols)
    except ValueError:
        raise TorusError("sublattice_integral", "sublattice entries must be integers") from None

    rank2k = a.shape[1]
    if rank2k % 2 != 0:
        raise TorusError("sublattice_even_rank", f"{rank2k} columns cannot span a complex subspace")
    k = rank2k // 2
    if k >= n:
        raise TorusError("sublattice_proper", f"k={k} must be < n={n}")

    if k == 0:
        eye = np.eye(n, dtype=complex)
        return Subtorus(
            parent=torus, k=0,
            sublattice=_freeze(a.reshape(2 * n, 0)),
            F_basis=_freeze(np.zeros((n, 0), dtype=complex)),
            proj_perp=_freeze(eye),
            complement=_freeze(np.eye(2 * n, dtype=np.int64)),
        )

    if np.linalg.matrix_rank(a.astype(float)) != rank2k:
        raise TorusError("sublattice_independent", "sublattice columns are linearly dependent")

    # complex vectors spanning the candidate subspace, as real 2n-vectors
    v = torus.lattice_basis @ a.astype(float)        # n x 2k complex
    vr = np.vstack([v.real, v.imag])                 # 2n x 2k real
    q, _ = np.linalg.qr(vr)
    jv = np.vstack([-v.imag, v.real])                # multiplication by i
    defect = float(np.linalg.norm(jv - q @ (q.T @ jv)) / max(1.0, np.linalg.norm(jv)))
    if defect > 1e-9:
        raise TorusError("span_complex_linear", f"real span is not complex-linear (J-defect {defect:.3e})")

    witness = _intlin.saturation_witness(a)
    if witness is not None:
        raise TorusError("sublattice_saturated",
                         f"sublattice is not saturated; witness lattice vector {witness.tolist()}")

    # complex basis of F via SVD of the n x 2k complex span matrix
    u_svd, s_svd, _ = np.linalg.svd(v, full_matrices=False)
    crank = int(np.sum(s_svd > 1e-10 * s_svd[0]))
    if crank != k:
        raise TorusError("span_complex_rank", f"complex rank {crank} != k={k}")
    f_basis = u_svd[:, :k]

    h = torus.metric
    w = f_basis
    proj_f = w @ np.linalg.solve(np.conj(w.T) @ h @ w, np.conj(w.T) @ h)
    q_perp = np.eye(n, dtype=complex) - proj_f

    return Subtorus(
        parent=torus, k=k,
        sublattice=_freeze(a),
        F_basis=_freeze(f_basis),
        proj_perp=_freeze(q_perp),
        complement=_freeze(_intlin.complete_to_basis(a)),
    )


# --- JSON wire format -------------------------------------------------------
#
# torus:    {"type": [d1, ...], "tau": [[{"re": x, "im": y}, ...], ...]}
# subtorus: {"sublattice": [[int, ...], ...]}   (list of columns, each 2n long)

def complex_from_json(obj) -> complex:
    if not isinstance(obj, dict) or set(obj) != {"re", "im"}:
        raise ValueError(f"expected {{'re': x, 'im': y}}, got {obj!r}")
    return complex(float(obj["re"]), float(obj["im"]))


def complex_to_json(z: complex) -> dict:
    return {"re": float(z.real), "im": float(z.imag)}


def tau_from_json(rows) -> np.ndarray:
    return np.array([[complex_from_json(x) for x in row] for row in rows], dtype=complex)


def torus_from_dict(data: dict) -> PolarizedTorus:
    if "type" not in data or "tau" not in data:
        raise ValueError("torus JSON requires 'type' and 'tau' fields")
    return make_torus([int(x) for x in data["type"]], tau_from_json(data["tau"]))


def subtorus_from_dict(torus: PolarizedTorus, data: dict) -> Subtorus:
    if "sublattice" not in data:
        raise ValueError("subtorus JSON requires a 'sublattice' field")
    cols = data["sublattice"]
    arr = np.array(cols, dtype=np.int64).T if cols else np.zeros((2 * torus.n, 0), dtype=np.int64)
    return make_subtorus(torus, arr)
