"""Theta-function bases and a direct numerical surjectivity test for the
multiplication map Sym^2 H0(L) -> H0(L^2) on tori of dimension <= 2.

Convention (fixed once, enforced by the quasi-periodicity tests): for a
torus of type (d_1..d_n) with period tau and level l in {1, 2}, the basis
is indexed by integer characteristics b in prod(range(l*d_i)), with
c_i = b_i / (l*d_i), and

    theta_b(z) = sum over k in Z^n of
                 exp(pi*i*l*(k+c)^T tau (k+c) + 2*pi*i*l*(k+c)^T z).

These satisfy, for integer vectors m1, m2,

    theta_b(z + D*m1 + tau*m2)
        = exp(-pi*i*l*m2^T tau m2 - 2*pi*i*l*m2^T z) * theta_b(z)

(D = diag(d_i); the factor is independent of b and of m1), and the parity
rule theta_b(-z) = theta_b'(z) with b' = -b mod l*d.  A product of two
level-1 basis elements satisfies the level-2 functional equations, which
is what makes the rank test below well-posed.

Evaluation reduces z into the fundamental cell using the automorphy
factor before summing, so the truncated series never sees large
exponents; the truncation order is chosen from the spectral floor of
Im tau and the requested tolerance.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .torus import PolarizedTorus

DEFAULT_TOL = 1e-12
MIN_IM_EIGENVALUE = 1e-6
RANK_REL_THRESHOLD = 1e-8   # singular values below this times sigma_max are noise
RESIDUAL_TOL = 1e-6         # products must be level-2 sections to this accuracy
CONDITION_CAP = 1e8
MAX_RESAMPLES = 5


class ThetaError(ValueError):
    pass


@dataclass(frozen=True)
class ThetaBasis:
    torus: PolarizedTorus
    level: int
    characteristics: tuple      # tuple of integer tuples b, lex order
    truncation: int             # summation box |k_i| <= truncation
    tol: float

    def __post_init__(self):
        n = self.torus.n
        if n > 2:
            raise ThetaError(f"theta evaluation is implemented for n <= 2, got n={n}")
        if self.level not in (1, 2):
            raise ThetaError(f"level must be 1 or 2, got {self.level}")
        expected = self.level ** n * self.torus.h0
        if len(self.characteristics) != expected:
            raise ThetaError(
                f"basis must have {expected} characteristics, got {len(self.characteristics)}")
        if self.truncation < 1:
            raise ThetaError(f"truncation must be >= 1, got {self.truncation}")

    @property
    def size(self) -> int:
        return len(self.characteristics)

    def char_fractions(self) -> np.ndarray:
        """Characteristics as rational offsets c, one row per basis element."""
        d = np.asarray(self.torus.ptype.d, dtype=float)
        b = np.asarray(self.characteristics, dtype=float)
        return b / (self.level * d)


def theta_basis(torus: PolarizedTorus, level: int, tol: float = DEFAULT_TOL,
                truncation: int | None = None) -> ThetaBasis:
    """Basis of H0 of the level-th power of the polarization.

    Refuses n > 2 and nearly singular Im tau (the series truncation order
    would explode).  ``truncation`` overrides the automatic choice —
    useful for stability checks that double the box.
    """
    n = torus.n
    if n > 2:
        raise ThetaError(f"theta evaluation is implemented for n <= 2, got n={n}")
    if level not in (1, 2):
        raise ThetaError(f"level must be 1 or 2, got {level}")
    eig = np.linalg.eigvalsh(np.imag(torus.period.tau))
    lam_min, lam_max = float(eig[0]), float(eig[-1])
    if lam_min < MIN_IM_EIGENVALUE:
        raise ThetaError(
            f"Im tau has eigenvalue {lam_min:.3e} < {MIN_IM_EIGENVALUE}; "
            "truncated series would need an enormous box")
    chars = tuple(itertools.product(*[range(level * d) for d in torus.ptype.d]))
    if truncation is None:
        # worst characteristic offset < 1, reduced point offset <= 1/2, slack 1
        c_max = max((max(b[i] / (level * torus.ptype.d[i]) for i in range(n))
                     for b in chars), default=0.0)
        s0 = c_max + 1.5
        margin = math.log(1e3) + math.pi * level * n * lam_max / 4.0
        truncation = max(3, math.ceil(
            s0 + math.sqrt((math.log(1.0 / tol) + margin) / (math.pi * level * lam_min))))
    return ThetaBasis(torus=torus, level=level, characteristics=chars,
                      truncation=int(truncation), tol=tol)


def _reduce_points(basis: ThetaBasis, zs: np.ndarray):
    """Translate each point into the fundamental cell.

    Returns (z0, log_factor) with theta(z) = exp(log_factor) * theta(z0).
    """
    torus = basis.torus
    tau = torus.period.tau
    im_tau = np.imag(tau)
    d = np.asarray(torus.ptype.d, dtype=float)
    l = basis.level
    u2 = np.linalg.solve(im_tau, np.imag(zs).T).T
    m2 = np.round(u2)
    u1 = (np.real(zs) - u2 @ np.real(tau).T) / d
    m1 = np.round(u1)
    z0 = zs - m1 * d - m2 @ tau.T
    quad = np.einsum("si,ij,sj->s", m2, tau, m2)
    log_factor = -1j * math.pi * l * quad - 2j * math.pi * l * np.einsum(
        "si,si->s", m2, z0 + m1 * d)
    return z0, log_factor


def theta_values(basis: ThetaBasis, zs) -> np.ndarray:
    """All basis elements at all points: array of shape (size, len(zs))."""
    torus = basis.torus
    n = torus.n
    zs = np.atleast_2d(np.asarray(zs, dtype=complex))
    if zs.shape[1] != n:
        raise ThetaError(f"points must be {n}-vectors, got shape {zs.shape}")
    z0, log_factor = _reduce_points(basis, zs)
    tau = torus.period.tau
    l = basis.level
    K = basis.truncation
    axes = [np.arange(-K, K + 1)] * n
    kgrid = np.array(list(itertools.product(*axes)), dtype=float)   # (M, n)
    out = np.empty((basis.size, zs.shape[0]), dtype=complex)
    cs = basis.char_fractions()
    for row, c in enumerate(cs):
        w = kgrid + c                                              # (M, n)
        quad = 1j * math.pi * l * np.einsum("mi,ij,mj->m", w, tau, w)
        lin = 2j * math.pi * l * (w @ z0.T)                        # (M, S)
        out[row] = np.exp(quad[:, None] + lin + log_factor[None, :]).sum(axis=0)
    return out


def evaluate_section(basis: ThetaBasis, index: int, z) -> complex:
    """One truncated theta value; deterministic for a fixed truncation."""
    if not 0 <= index < basis.size:
        raise ThetaError(f"index {index} out of range for basis of size {basis.size}")
    z = np.asarray(z, dtype=complex).reshape(1, -1)
    # evaluating the full basis at one point is cheap enough; keep one code path
    return complex(theta_values(basis, z)[index, 0])


def automorphy_factor(basis: ThetaBasis, m1, m2, z) -> complex:
    """Factor F with theta(z + D*m1 + tau*m2) = F * theta(z); independent of m1."""
    tau = basis.torus.period.tau
    l = basis.level
    m2 = np.asarray(m2, dtype=float)
    z = np.asarray(z, dtype=complex)
    quad = complex(m2 @ tau @ m2)
    return complex(np.exp(-1j * math.pi * l * quad - 2j * math.pi * l * (m2 @ z)))


@dataclass(frozen=True)
class Rho2Report:
    dim_sym2: int
    dim_target: int
    singular_values: tuple
    numerical_rank: int
    surjective: bool
    sample_count: int

    def __post_init__(self):
        if self.numerical_rank > min(self.dim_sym2, self.dim_target):
            raise AssertionError("rank exceeds both dimensions; internal bug")
        if self.surjective != (self.numerical_rank == self.dim_target):
            raise AssertionError("surjective flag inconsistent with rank")

    @property
    def label(self) -> str:
        return ("surjective" if self.surjective
                else "not surjective at working precision")


def _sample_points(torus: PolarizedTorus, count: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    u = rng.uniform(0.0, 1.0, size=(count, 2 * torus.n))
    return (torus.lattice_basis @ u.T).T


def _product_columns(v1: np.ndarray) -> np.ndarray:
    """Columns theta_i * theta_j, i <= j lex, from level-1 values (m1, S)."""
    m1 = v1.shape[0]
    cols = [v1[i] * v1[j] for i in range(m1) for j in range(i, m1)]
    return np.array(cols).T                                        # (S, m1*(m1+1)/2)


def _assemble(torus: PolarizedTorus, samples: int, seed: int,
              tol: float, truncation: int | None):
    b1 = theta_basis(torus, 1, tol=tol, truncation=truncation)
    b2 = theta_basis(torus, 2, tol=tol, truncation=truncation)
    zs = _sample_points(torus, samples, seed)
    v1 = theta_values(b1, zs)                                      # (m1, S)
    v2 = theta_values(b2, zs)                                      # (m2, S)
    scale = np.abs(v2).max(axis=0)                                 # per-sample row scale
    scale = np.where(scale > 0, scale, 1.0)
    m2_mat = (v2 / scale).T                                        # (S, m2)
    prod = _product_columns(v1) / scale[:, None]                   # (S, sym2)
    return m2_mat, prod


def rho2_matrix(torus: PolarizedTorus, samples: int | None = None, seed: int = 0,
                tol: float = DEFAULT_TOL, truncation: int | None = None) -> np.ndarray:
    """Sampled products of level-1 sections, one row per sample point, one
    column per unordered pair i <= j, rows scaled by the largest level-2
    value at the point.  Column space = image of the multiplication map
    restricted to the samples."""
    dim_target = 2 ** torus.n * torus.h0
    if samples is None:
        samples = 4 * dim_target
    if samples < 2 * dim_target:
        raise ThetaError(f"need at least {2 * dim_target} samples, got {samples}")
    _, prod = _assemble(torus, samples, seed, tol, truncation)
    return prod


def rho2_rank(torus: PolarizedTorus, samples: int | None = None, seed: int = 0,
              tol: float = DEFAULT_TOL, truncation: int | None = None) -> Rho2Report:
    """Numerical rank of the multiplication map Sym^2 H0(L) -> H0(L^2).

    Each product column is expressed in the level-2 basis by least squares
    over the samples; the fit residual must be tiny (products ARE level-2
    sections — a large residual means a convention bug, not a math fact).
    Rank = number of singular values of the coefficient matrix above
    1e-8 * sigma_max.  An ill-conditioned sample set triggers a reseeded
    retry.  A negative verdict is a statement at working precision only.
    """
    h0 = torus.h0
    dim_sym2 = h0 * (h0 + 1) // 2
    dim_target = 2 ** torus.n * h0
    if samples is None:
        samples = 4 * dim_target
    if samples < 2 * dim_target:
        raise ThetaError(f"need at least {2 * dim_target} samples, got {samples}")

    last_cond = None
    for attempt in range(MAX_RESAMPLES + 1):
        m2_mat, prod = _assemble(torus, samples, seed + 1000 * attempt, tol, truncation)
        sv_m2 = np.linalg.svd(m2_mat, compute_uv=False)
        last_cond = float(sv_m2[0] / sv_m2[-1]) if sv_m2[-1] > 0 else math.inf
        if last_cond <= CONDITION_CAP:
            break
    else:
        raise ThetaError(
            f"level-2 evaluation matrix stayed ill-conditioned after "
            f"{MAX_RESAMPLES} reseeds (condition {last_cond:.3e})")

    coeffs, *_ = np.linalg.lstsq(m2_mat, prod, rcond=None)
    residual = float(np.linalg.norm(m2_mat @ coeffs - prod))
    if residual > RESIDUAL_TOL * max(1.0, float(np.linalg.norm(prod))):
        raise ThetaError(
            f"least-squares residual {residual:.3e} too large; products of "
            "level-1 sections must be level-2 sections")

    sigma = np.linalg.svd(coeffs, compute_uv=False)
    sigma_max = float(sigma[0]) if sigma.size else 0.0
    rank = int(np.sum(sigma > RANK_REL_THRESHOLD * sigma_max)) if sigma_max > 0 else 0
    return Rho2Report(
        dim_sym2=dim_sym2, dim_target=dim_target,
        singular_values=tuple(float(s) for s in sigma),
        numerical_rank=rank,
        surjective=rank == dim_target,
        sample_count=samples)
