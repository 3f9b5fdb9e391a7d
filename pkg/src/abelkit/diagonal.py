"""Self-products with their diagonal subtorus, and the halving identity.

For a polarized torus T = (A, L) the product A x A carries the product
polarization; the diagonal embeds as a subtorus.  The minimal projected
length relative to the diagonal equals half the minimal period length of
the base: the orthogonal projection away from the diagonal sends
(u, v) |-> ((u - v)/2, (v - u)/2), so a pair of lattice vectors
(lam1, lam2) projects to squared length |lam1 - lam2|^2 / 2.

The product torus is kept in the same canonical coordinates as any other
torus (interleaved type so the divisibility chain survives), with the
bookkeeping permutation back to the two factors stored on the result.
The diagonal's projection is computed by the generic subtorus machinery;
the closed form above is used as a cross-check, not assumed.
"""

import math
from dataclasses import dataclass

import numpy as np

from .svp import SVPResult, buser_sarnak, relative_buser_sarnak
from .torus import PolarizedTorus, Subtorus, make_subtorus, make_torus


@dataclass(frozen=True)
class ProductTorus:
    base: PolarizedTorus
    product: PolarizedTorus
    diagonal: Subtorus
    basis_map: tuple[int, ...]   # canonical lattice-basis index -> natural (factor-ordered) index
    factor1: tuple[int, ...]     # base lattice-basis index -> natural index, first factor
    factor2: tuple[int, ...]     # same for the second factor

    def embed_pair(self, lam1, lam2) -> np.ndarray:
        """Lattice coordinates of (lam1, lam2) in the product's canonical basis."""
        n2 = 2 * self.base.n
        lam1 = np.asarray(lam1, dtype=np.int64)
        lam2 = np.asarray(lam2, dtype=np.int64)
        if lam1.shape != (n2,) or lam2.shape != (n2,):
            raise ValueError(f"expected base lattice vectors of length {n2}")
        nat = np.zeros(2 * n2, dtype=np.int64)
        for j in range(n2):
            nat[self.factor1[j]] += lam1[j]
            nat[self.factor2[j]] += lam2[j]
        return nat[np.array(self.basis_map)]


def product_with_diagonal(torus: PolarizedTorus) -> ProductTorus:
    """Build A x A with the product polarization and its diagonal subtorus."""
    n = torus.n
    d = torus.ptype.d
    tau = torus.period.tau

    # interleave the two factors so the doubled type keeps its divisibility chain
    new_to_old = [j // 2 if j % 2 == 0 else n + j // 2 for j in range(2 * n)]
    tau_block = np.zeros((2 * n, 2 * n), dtype=complex)
    tau_block[:n, :n] = tau
    tau_block[n:, n:] = tau
    tau_prod = tau_block[np.ix_(new_to_old, new_to_old)]
    type_prod = tuple(d[o % n] for o in new_to_old)
    product = make_torus(type_prod, tau_prod)

    # natural basis ordering: [Delta(+)Delta columns | tau(+)tau columns],
    # old-coordinate indexed; canonical basis column j equals (up to the
    # coordinate permutation) natural column basis_map[j]
    basis_map = tuple(new_to_old[j] if j < 2 * n else 2 * n + new_to_old[j - 2 * n]
                      for j in range(4 * n))
    factor1 = tuple(j if j < n else 2 * n + (j - n) for j in range(2 * n))
    factor2 = tuple(n + j if j < n else 3 * n + (j - n) for j in range(2 * n))

    # gram invariant: in factor-grouped ordering the product gram is the
    # 2-block direct sum of the base gram
    g_nat = np.zeros((4 * n, 4 * n))
    fac = np.empty(4 * n, dtype=int)
    idx = np.empty(4 * n, dtype=int)
    for j in range(2 * n):
        fac[factor1[j]], idx[factor1[j]] = 0, j
        fac[factor2[j]], idx[factor2[j]] = 1, j
    for a in range(4 * n):
        for b in range(4 * n):
            if fac[a] == fac[b]:
                g_nat[a, b] = torus.gram[idx[a], idx[b]]
    bm = np.array(basis_map)
    defect = float(np.abs(product.gram - g_nat[np.ix_(bm, bm)]).max())
    if defect > 1e-9 * max(1.0, float(np.abs(torus.gram).max())):
        raise AssertionError(f"product gram is not the block sum of the base gram (defect {defect:.3e})")

    bm_arr = np.array(basis_map)
    cols = np.zeros((4 * n, 2 * n), dtype=np.int64)
    for j in range(2 * n):
        nat = np.zeros(4 * n, dtype=np.int64)
        nat[factor1[j]] = 1
        nat[factor2[j]] = 1
        cols[:, j] = nat[bm_arr]
    diagonal = make_subtorus(product, cols)
    return ProductTorus(base=torus, product=product, diagonal=diagonal,
                        basis_map=basis_map, factor1=factor1, factor2=factor2)


def projection_length_sq(prod: ProductTorus, lam1, lam2) -> float:
    """Squared length of the projection of (lam1, lam2) away from the diagonal.

    Checked against the closed form |lam1 - lam2|^2 / 2 on the base.
    """
    x = prod.embed_pair(lam1, lam2)
    torus = prod.product
    v = torus.lattice_basis @ x.astype(float)
    w = prod.diagonal.project_perp(v)
    val = float(np.real(np.conj(w) @ torus.metric @ w))
    diff = np.asarray(lam1, dtype=float) - np.asarray(lam2, dtype=float)
    expected = float(diff @ prod.base.gram @ diff) / 2.0
    if not math.isclose(val, expected, rel_tol=1e-12, abs_tol=1e-12):
        raise AssertionError(f"projection length {val!r} != |lam1-lam2|^2/2 = {expected!r}")
    return val


@dataclass(frozen=True)
class HalvingCheck:
    lhs: float        # relative invariant of the diagonal in A x A
    rhs: float        # half the minimal period length of the base
    rel_err: float
    lhs_result: SVPResult
    rhs_result: SVPResult


def diagonal_halving_check(torus: PolarizedTorus, exact: bool = False) -> HalvingCheck:
    """Verify m(A x A, diagonal) = m(A)/2 by two independent computations:
    the generic projected-lattice SVP on the left, plain SVP on the right.
    """
    prod = product_with_diagonal(torus)
    lhs = relative_buser_sarnak(prod.diagonal, exact=exact)
    rhs = buser_sarnak(torus, exact=exact)
    lhs_val = lhs.length_sq
    rhs_val = rhs.length_sq / 2.0
    rel = abs(lhs_val - rhs_val) / max(abs(rhs_val), 1e-300)
    return HalvingCheck(lhs=lhs_val, rhs=rhs_val, rel_err=rel,
                        lhs_result=lhs, rhs_result=rhs)
