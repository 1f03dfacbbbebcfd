"""Combinatorial subset statistics: product sets, doubling, energy, symmetry sets.

Energy and symmetry-set thresholds are computed by exact integer counting
(never floating convolution) so that threshold sets are exact; pass eta as a
Fraction to make tie comparisons exact as well.  Ties at the threshold are
included, matching the defining inequality >=.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .groups import Group, GroupError, GSubset, is_subgroup

__all__ = [
    "product_set",
    "power_set",
    "inverse_set",
    "doubling",
    "tripling",
    "overlap_counts",
    "energy",
    "energy_deficit",
    "symmetry_set",
    "sym_regular_threshold",
    "small_squaring_subgroup",
]


def product_set(a: GSubset, b: GSubset) -> GSubset:
    a._check(b)
    ia, ib = a.indices, b.indices
    mask = np.zeros(a.group.order, dtype=bool)
    if ia.size and ib.size:
        mask[a.group.mul[np.ix_(ia, ib)].ravel()] = True
    return GSubset(a.group, mask)


def power_set(a: GSubset, k: int) -> GSubset:
    """Product-set power A^k, k >= 1."""
    if k < 1:
        raise GroupError("power_set needs k >= 1")
    result = a
    base = a
    k -= 1
    while k:
        if k & 1:
            result = product_set(result, base)
        k >>= 1
        if k:
            base = product_set(base, base)
    return result


def inverse_set(a: GSubset) -> GSubset:
    return a.inverse()


def doubling(a: GSubset) -> float:
    if a.size == 0:
        raise GroupError("doubling of the empty set is undefined")
    return product_set(a, a).size / a.size


def tripling(a: GSubset) -> float:
    if a.size == 0:
        raise GroupError("tripling of the empty set is undefined")
    return power_set(a, 3).size / a.size


def overlap_counts(a: GSubset) -> np.ndarray:
    """counts[x] = |A intersect xA| = n * (1_A * 1_{A^-1})(x), exact integers."""
    ia = a.indices
    counts = np.zeros(a.group.order, dtype=np.int64)
    if ia.size:
        pairs = a.group.mul[np.ix_(ia, a.group.inv[ia])]
        counts += np.bincount(pairs.ravel(), minlength=a.group.order)
    return counts


def energy(a: GSubset) -> float:
    """Multiplicative energy |1_A * 1_{A^-1}|_{L^2(mu_G)}^2 from exact counts."""
    if a.size == 0:
        raise GroupError("energy of the empty set is undefined")
    counts = overlap_counts(a)
    n = a.group.order
    return float(Fraction(int(np.sum(counts.astype(object) ** 2)), n**3))


def energy_deficit(a: GSubset) -> Fraction:
    """Exact c with energy(A) = (1-c) mu(A)^3; c=0 iff A is (a coset of) a subgroup."""
    counts = overlap_counts(a)
    total = int(np.sum(counts.astype(object) ** 2))
    return 1 - Fraction(total, a.size**3)


def _threshold_mask(counts: np.ndarray, eta, size: int) -> np.ndarray:
    if isinstance(eta, Fraction):
        return counts * eta.denominator >= eta.numerator * size
    return counts >= float(eta) * size


def symmetry_set(a: GSubset, eta) -> GSubset:
    """Sym_eta(A): elements x with |A intersect xA| >= eta |A|."""
    if a.size == 0:
        raise GroupError("symmetry set of the empty set is undefined")
    if not 0 < eta <= 1:
        raise GroupError("symmetry-set threshold must lie in (0, 1]")
    return GSubset(a.group, _threshold_mask(overlap_counts(a), eta, a.size))


GRID_SIZE = 64


def sym_regular_threshold(a: GSubset, c, eta_max) -> tuple[float, float]:
    """Pick c' in (c/4, c/2] where |Sym| is flattest under threshold perturbation.

    Scans a fixed dyadic grid of 64 candidates c/2^(1+k/64); at each the
    measured ratio is max over eta = +-eta_max of |mu(Sym_{c'(1+eta)})/mu(Sym_{c'}) - 1|
    (the worst perturbation is at the endpoints by nesting).  Returns the
    minimizing (c', ratio), ties to the lowest grid index.
    """
    c = float(c)
    eta_max = float(eta_max)
    if not 0 < c <= 1:
        raise GroupError("energy constant must lie in (0, 1]")
    deficit = energy_deficit(a)
    if float(1 - deficit) < c - 1e-12:
        raise GroupError(
            f"hypothesis fails: energy(A) = {float(1 - deficit):.6g} mu(A)^3 < {c:.6g} mu(A)^3"
        )
    counts = overlap_counts(a)
    size = a.size

    def sym_size(thr: float) -> int:
        if thr > 1:
            return 0
        return int(np.count_nonzero(counts >= thr * size))

    best = None
    for k in range(GRID_SIZE):
        cp = (c / 2.0) * 2.0 ** (-k / GRID_SIZE)
        base = sym_size(cp)
        if base == 0:
            continue
        ratio = max(
            abs(sym_size(cp * (1 + eta_max)) / base - 1),
            abs(sym_size(cp * (1 - eta_max)) / base - 1),
        )
        if best is None or ratio < best[1] - 1e-15:
            best = (cp, ratio)
    if best is None:
        raise GroupError("no candidate threshold had a nonempty symmetry set")
    return best


def small_squaring_subgroup(k: GSubset) -> GSubset:
    """K^2 for symmetric K containing the identity with mu(K^2) < (3/2) mu(K).

    Under that smallness K^2 is a genuine subgroup; the closure is verified
    directly and a failure signals the hypothesis was violated.
    """
    if not k.is_symmetric() or not k.contains_identity():
        raise GroupError("need a symmetric set containing the identity")
    k2 = product_set(k, k)
    if 2 * k2.size >= 3 * k.size:
        raise GroupError(
            f"smallness fails: |K^2| = {k2.size} is not < (3/2)|K| = {1.5 * k.size}"
        )
    if not is_subgroup(k2):
        raise GroupError("K^2 failed the direct subgroup check despite small squaring")
    return k2
