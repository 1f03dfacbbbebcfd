"""Exact coset decompositions of integer-valued functions with small algebra norm.

The engine iterates: find a subgroup whose coset averaging keeps the function
almost integer-valued with sup-norm above 1/2, peel off the rounded cosets,
and continue on the residual.  Every step audits the hypotheses of the
rounding step and the algebra-norm drop; when the rounded residual reaches
zero the collected terms reconstruct the input exactly in integer arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .gfunc import GFunc
from .groups import GroupError, GSubset, is_subgroup, left_coset_ids, subgroups
from .setstats import energy, power_set, product_set
from .spectral import ConvOp, a_norm, conv_matrix, convolve, coset_projection, fourier_basis

__all__ = [
    "DecomposeError",
    "RoundingReport",
    "round_to_integer",
    "CosetDecomposition",
    "coset_rounding",
    "find_level_subgroup",
    "idempotent_decompose",
    "small_norm_coset_test",
    "SMALL_NORM_THRESHOLD",
    "dual_mass",
    "continuity_witness",
    "dense_small_doubling_subset",
]

SMALL_NORM_THRESHOLD = 1 + 1.0 / 750


class DecomposeError(ValueError):
    def __init__(self, message: str, *, witness=None, partial=None):
        super().__init__(message)
        self.witness = witness
        self.partial = partial


@dataclass
class RoundingReport:
    epsilon: float
    rounded: GFunc
    max_deviation: float


def round_to_integer(f: GFunc, eps: float) -> RoundingReport:
    """Per-point nearest integer, defined only when every value is eps-close."""
    if not eps < 0.5:
        raise DecomposeError("rounding needs eps < 1/2 for uniqueness")
    re = f.values.real
    dev = np.maximum(np.abs(re - np.round(re)), np.abs(f.values.imag))
    worst = int(np.argmax(dev))
    if dev[worst] >= eps:
        raise DecomposeError(
            f"not {eps}-almost integer-valued: value {complex(f.values[worst]):.6g} "
            f"at element {worst} deviates by {float(dev[worst]):.6g}",
            witness=worst,
        )
    return RoundingReport(epsilon=eps, rounded=f.nearest_integer(), max_deviation=float(dev[worst]))


@dataclass
class CosetDecomposition:
    """f = sum of z_j 1_{x_j H_j} with integer z_j, exact."""

    terms: list  # (z, subgroup, representative)
    source: GFunc
    steps: list = field(default_factory=list)

    def reconstruct(self) -> np.ndarray:
        g = self.source.group
        out = np.zeros(g.order, dtype=np.int64)
        for z, sub, rep in self.terms:
            out[g.mul[rep, sub.indices]] += int(z)
        return out

    def verify(self) -> bool:
        src = np.round(self.source.values.real).astype(np.int64)
        if np.max(np.abs(self.source.values - src)) > 1e-9:
            return False
        if not all(is_subgroup(sub) for _, sub, _ in self.terms):
            return False
        return bool(np.array_equal(self.reconstruct(), src))


def _coset_terms(proj_int: np.ndarray, sub: GSubset) -> list:
    """Nonzero left-coset terms of an integer function constant on cosets of H."""
    g = sub.group
    ids = left_coset_ids(g, sub)
    terms = []
    seen = set()
    for x in range(g.order):
        cid = int(ids[x])
        if cid in seen:
            continue
        seen.add(cid)
        z = int(proj_int[x])
        if z != 0:
            terms.append((z, sub, x))
    return terms


def coset_rounding(f: GFunc, sub: GSubset, eps: float, m_bound: float, eta: float):
    """Peel the rounded coset part of f * mu_H; returns (terms, residual).

    Audited hypotheses: eps < 1/6; f and f_Z * mu_H are eps-almost
    integer-valued; mu(H) >= eta |f_Z|_{L^1}.  The residual f - f * mu_H is
    checked to be 3eps-almost integer-valued, the term count against 8/eta,
    and the coefficients against |z| <= m_bound + 2.
    """
    if not is_subgroup(sub):
        raise DecomposeError("coset rounding needs a subgroup")
    if not eps < 1 / 6:
        raise DecomposeError(f"hypothesis eps < 1/6 fails: eps = {eps}")
    fz = round_to_integer(f, eps).rounded  # also audits f itself
    proj_z = coset_projection(fz, sub)
    dev = proj_z.max_integer_deviation()
    if dev >= eps:
        raise DecomposeError(
            f"hypothesis fails: f_Z * mu_H deviates from integers by {dev:.6g} >= eps = {eps}"
        )
    l1_fz = fz.l1()
    if sub.size / sub.group.order < eta * l1_fz - 1e-12:
        raise DecomposeError(
            f"hypothesis fails: mu(H) = {sub.size}/{sub.group.order} "
            f"below eta |f_Z|_1 = {eta * l1_fz:.6g}"
        )
    proj = coset_projection(f, sub)
    proj_int = np.round(proj.values.real).astype(np.int64)
    terms = _coset_terms(proj_int, sub)
    if eta > 0 and len(terms) > 8 / eta + 1e-9:
        raise DecomposeError(f"term count {len(terms)} exceeds 8/eta = {8 / eta:.6g}")
    for z, _, rep in terms:
        if abs(z) > m_bound + 2 + 1e-9:
            raise DecomposeError(
                f"coefficient {z} at representative {rep} exceeds M + 2 = {m_bound + 2:.6g}"
            )
    residual = f - proj
    rdev = residual.max_integer_deviation()
    if rdev >= 3 * eps:
        raise DecomposeError(
            f"residual deviates from integers by {rdev:.6g} >= 3 eps = {3 * eps:.6g}"
        )
    return terms, residual


def find_level_subgroup(f: GFunc, eps: float, limit: int | None = None) -> GSubset:
    """Subgroup maximizing |f * mu_H|_inf among those keeping f * mu_H
    eps-almost integer-valued with sup-norm above 1/2.

    Ties prefer the larger subgroup, then the lowest position in the
    canonical enumeration.
    """
    if f.nearest_integer().linf() == 0 and f.max_integer_deviation() < 0.25:
        raise DecomposeError("function rounds to zero; nothing to find")
    subs = subgroups(f.group, limit)
    best = None  # (value, size, index, subgroup)
    for idx, sub in enumerate(subs):
        proj = coset_projection(f, sub)
        if not proj.is_almost_integer_valued(eps):
            continue
        val = proj.linf()
        if val <= 0.5:
            continue
        if best is None or val > best[0] + 1e-12 or (
            abs(val - best[0]) <= 1e-12 and sub.size > best[1]
        ):
            best = (val, sub.size, idx, sub)
    if best is None:
        raise DecomposeError(
            "no admissible subgroup: every coset averaging either leaves the "
            "almost-integer class or drops below sup-norm 1/2"
        )
    return best[3]


def idempotent_decompose(
    f: GFunc, max_steps: int | None = None, limit: int | None = None
) -> CosetDecomposition:
    """Exact decomposition f = sum z_j 1_{x_j H_j} by spectral-mass peeling.

    Requires integer-valued f.  Each step audits the rounding hypotheses and
    the algebra-norm drop a_norm(f_{i+1}) <= a_norm(f_i) - 1/2 + 1e-6; on
    success the reconstruction is verified exactly in integer arithmetic.
    """
    if f.max_integer_deviation() > 1e-9:
        raise DecomposeError("decomposition needs an integer-valued function")
    f0 = GFunc(f.group, np.round(f.values.real).astype(np.float64))
    m_total = a_norm(f0)
    eps0 = min(1e-3, math.exp(-m_total))
    if max_steps is None:
        max_steps = int(math.ceil(2 * m_total)) + 2
    terms: list = []
    steps: list = []
    current = f0
    current_norm = a_norm(current)
    for i in range(max_steps):
        rounded = current.nearest_integer()
        if rounded.linf() == 0:
            break
        eps_i = (3**i) * eps0
        if eps_i >= 1 / 6:
            raise DecomposeError(
                f"rounding budget exhausted at step {i}: eps_i = {eps_i:.6g} >= 1/6",
                partial=CosetDecomposition(terms, f0, steps),
            )
        try:
            sub = find_level_subgroup(current, eps_i, limit)
        except DecomposeError as exc:
            raise DecomposeError(
                f"step {i}: {exc}", partial=CosetDecomposition(terms, f0, steps)
            ) from exc
        eta_i = (sub.size / f.group.order) / max(rounded.l1(), 1e-300)
        m_i = a_norm(rounded)
        step_terms, residual = coset_rounding(current, sub, eps_i, m_i, min(eta_i, 1.0))
        next_norm = a_norm(residual)
        if next_norm > current_norm - 0.5 + 1e-6:
            raise DecomposeError(
                f"step {i}: algebra-norm drop {current_norm - next_norm:.6g} below 1/2",
                partial=CosetDecomposition(terms, f0, steps),
            )
        steps.append(
            {
                "step": i,
                "subgroup_size": sub.size,
                "terms": len(step_terms),
                "norm_before": current_norm,
                "norm_after": next_norm,
                "epsilon": eps_i,
            }
        )
        terms.extend(step_terms)
        current = residual
        current_norm = next_norm
    else:
        rounded = current.nearest_integer()
        if rounded.linf() != 0:
            raise DecomposeError(
                f"did not terminate within {max_steps} steps",
                partial=CosetDecomposition(terms, f0, steps),
            )
    decomposition = CosetDecomposition(terms, f0, steps)
    if not decomposition.verify():
        raise DecomposeError("internal error: reconstruction mismatch", partial=decomposition)
    return decomposition


def small_norm_coset_test(a: GSubset):
    """(H, x) with A = Hx when a_norm(1_A) < 1 + 1/750, else None.

    The threshold is the jump below which only cosets live; a norm below it
    with no coset found is a fatal numerical-tolerance bug.
    """
    if a.size == 0:
        raise GroupError("empty set has no indicator norm")
    if a_norm(GFunc.indicator(a)) >= SMALL_NORM_THRESHOLD:
        return None
    g = a.group
    a0 = int(a.indices[0])
    sub = GSubset.from_indices(g, g.mul[a.indices, g.inv[a0]])
    if is_subgroup(sub) and np.array_equal(np.sort(g.mul[sub.indices, a0]), a.indices):
        return sub, a0
    raise RuntimeError(
        "norm below the coset threshold but no coset found; numerical tolerances broken"
    )


def dual_mass(f: GFunc, b: GSubset) -> float:
    """sum_i s_i(f) |mu_B * v_i|^2 over the canonical Fourier basis of f."""
    if b.size == 0:
        raise GroupError("dual mass needs a nonempty set")
    basis = fourier_basis(f)
    images = conv_matrix(GFunc.measure(b)) @ basis.vectors
    masses = np.mean(np.abs(images) ** 2, axis=0)
    return float(np.sum(basis.sing_values * masses))


def _sup_local_flatness(g_vals: np.ndarray, group, bprime: GSubset) -> float:
    idx = group.mul[:, bprime.indices]
    return float(np.max(np.abs(g_vals[idx] - g_vals[:, None])))


def _sup_local_l2(diff_vals: np.ndarray, group, bprime: GSubset) -> float:
    idx = group.mul[:, bprime.indices]
    return float(np.sqrt(np.max(np.mean(np.abs(diff_vals[idx]) ** 2, axis=1))))


def continuity_witness(f: GFunc, a: GSubset, nu: float, limit: int | None = None):
    """First (B, B') among subgroup and product-set candidates inside A^4 with

        sup_x |f*mu_B*mu_B - f*mu_B*mu_B(x)|_{L^inf(mu_{xB'})} <= nu   and
        sup_x |f - f*mu_B*mu_B|_{L^2(mu_{xB'})} <= nu;

    None when no candidate in the family qualifies.
    """
    if not a.is_symmetric():
        raise GroupError("continuity witness needs a symmetric set")
    g = f.group
    a4 = power_set(a, 4)
    candidates = []
    try:
        subs = subgroups(g, limit)
    except GroupError:
        subs = []
    inside = [s for s in subs if s.issubset(a4)]
    inside.sort(key=lambda s: (-s.size, s.key()))
    for big in inside:
        for small in inside:
            if small.issubset(big):
                candidates.append((big, small))
    a2 = product_set(a, a)
    candidates.append((a2, a))
    candidates.append((a4, a))
    for b, bp in candidates:
        mu_b = GFunc.measure(b)
        smooth = convolve(convolve(f, mu_b.adjoint()), mu_b)
        if _sup_local_flatness(smooth.values, g, bp) > nu + 1e-12:
            continue
        if _sup_local_l2((f - smooth).values, g, bp) > nu + 1e-12:
            continue
        return b, bp
    return None


def dense_small_doubling_subset(a: GSubset, energy_c: float) -> GSubset:
    """A' inside A with |A'| >= |A|/4 of (near-)minimal doubling.

    Exhaustive over subsets when |A| <= 12; otherwise greedy single-element
    removals plus coset intersections.  The energy hypothesis
    energy(A) >= energy_c mu(A)^3 is audited.
    """
    if a.size == 0:
        raise GroupError("need a nonempty set")
    mu3 = (a.size / a.group.order) ** 3
    if energy(a) < energy_c * mu3 - 1e-12:
        raise GroupError(
            f"hypothesis fails: energy(A) = {energy(a):.6g} below {energy_c:.6g} mu(A)^3"
        )
    g = a.group
    min_size = -(-a.size // 4)  # ceil(|A|/4)

    def ratio(s: GSubset) -> float:
        return product_set(s, s).size / s.size

    best, best_ratio = a, ratio(a)

    def consider(s: GSubset) -> None:
        nonlocal best, best_ratio
        if s.size >= min_size:
            r = ratio(s)
            if r < best_ratio - 1e-12 or (abs(r - best_ratio) <= 1e-12 and s.size > best.size):
                best, best_ratio = s, r

    if a.size <= 12:
        idx = [int(x) for x in a.indices]
        for bits in range(1, 1 << len(idx)):
            if bits.bit_count() < min_size:
                continue
            consider(GSubset.from_indices(g, [idx[i] for i in range(len(idx)) if bits >> i & 1]))
        return best
    try:
        for sub in subgroups(g):
            for x in range(g.order):
                consider(a & GSubset.from_indices(g, g.mul[sub.indices, x]))
    except GroupError:
        pass
    current = a
    while current.size > min_size:
        step = None
        for x in current.indices:
            cand = current - g.singleton(int(x))
            if cand.size < min_size:
                continue
            r = ratio(cand)
            if step is None or r < step[0]:
                step = (r, cand)
        if step is None or step[0] > ratio(current) + 1e-12:
            break
        current = step[1]
        consider(current)
    return best
