"""Constructive small-doubling pipeline: symmetry-set witnesses to validated pairs.

Every "there exists" step of the underlying arguments becomes a bounded,
deterministically tie-broken search (lowest element index wins), and every
stage re-verifies the displayed constant-free inequalities of the argument
on the instance: exact bitset containments, exact rational size bounds, and
the closure/thickness numbers of the produced pairs.  Bounds that live
behind unspecified absolute constants are measured and reported, never
asserted.  A failed audit raises StageError naming the stage and the
violated inequality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .gfunc import GFunc
from .groups import GroupError, GSubset, conjugate
from .pairs import MultiplicativePair, validate_pair
from .setstats import (
    energy_deficit,
    overlap_counts,
    power_set,
    product_set,
    small_squaring_subgroup,
    symmetry_set,
    sym_regular_threshold,
)
from .spectral import convolve

__all__ = [
    "StageError",
    "sym_witness_search",
    "fournier_subgroup",
    "DoublingToTripling",
    "doubling_to_tripling",
    "WeakFreiman",
    "weak_freiman",
    "FreimanCorrelation",
    "freiman_correlation",
    "PairSystem",
    "pair_system",
]


class StageError(RuntimeError):
    """Pipeline audit failure; carries the stage and the violated inequality."""

    def __init__(self, stage: str, inequality: str):
        super().__init__(f"[{stage}] {inequality}")
        self.stage = stage
        self.inequality = inequality


def _require(ok: bool, stage: str, inequality: str) -> None:
    if not ok:
        raise StageError(stage, inequality)


def _sym_size(a: GSubset, witness: GSubset, eps) -> int:
    return symmetry_set(product_set(witness, a), _one_minus(eps)).size


def _one_minus(eps):
    if isinstance(eps, Fraction):
        return 1 - eps
    return 1.0 - float(eps)


def sym_witness_search(a: GSubset, eps, budget: int = 64, seed: int = 0):
    """Best A' found maximizing mu(Sym_{1-eps}(A'A)) over a bounded family.

    Candidates: A itself, every singleton {a}, greedy growth from the best
    singleton, and `budget` seeded random subsets of A.  Ties keep the
    earliest candidate, so the witness is reproducible.
    """
    if a.size == 0:
        raise GroupError("witness search needs a nonempty set")
    g = a.group
    best_set, best_size = a, _sym_size(a, a, eps)

    def consider(cand: GSubset) -> bool:
        nonlocal best_set, best_size
        size = _sym_size(a, cand, eps)
        if size > best_size:
            best_set, best_size = cand, size
            return True
        return False

    best_singleton = None
    for x in a.indices:
        cand = g.singleton(int(x))
        size = _sym_size(a, cand, eps)
        if best_singleton is None or size > best_singleton[1]:
            best_singleton = (cand, size)
        if size > best_size:
            best_set, best_size = cand, size
    # greedy growth from the best singleton
    current, current_size = best_singleton
    while current.size < a.size:
        improved = None
        for x in a.indices:
            if x in current:
                continue
            cand = current | g.singleton(int(x))
            size = _sym_size(a, cand, eps)
            if size > current_size:
                improved = (cand, size)
                break
        if improved is None:
            break
        current, current_size = improved
        if current_size > best_size:
            best_set, best_size = current, current_size
    rng = np.random.default_rng(seed)
    idx = a.indices
    for _ in range(budget):
        k = int(rng.integers(1, idx.size + 1))
        pick = rng.choice(idx, size=k, replace=False)
        consider(GSubset.from_indices(g, pick))
    return best_set, best_size / g.order


def fournier_subgroup(a: GSubset, eta):
    """Subgroup H = Sym_{1-eta}(A)^2 and x maximizing mu(A intersect Hx).

    Requires near-maximal energy: with c the exact energy deficit
    (energy(A) = (1-c) mu(A)^3), the audited hypothesis is 12c <= eta < 1/12.
    """
    if a.size == 0:
        raise GroupError("fournier needs a nonempty set")
    c = energy_deficit(a)
    _require(eta < Fraction(1, 12), "fournier-precondition", f"eta = {eta} is not < 1/12")
    _require(eta > 0, "fournier-precondition", "eta must be positive")
    _require(
        12 * c <= eta,
        "fournier-precondition",
        f"12c = {float(12 * c):.6g} > eta = {float(eta):.6g} (energy deficit too large)",
    )
    g = a.group
    k = symmetry_set(a, _one_minus(eta))
    k2_bound = symmetry_set(a, _one_minus(2 * eta if isinstance(eta, Fraction) else 2 * float(eta)))
    ksq = product_set(k, k)
    _require(ksq.issubset(k2_bound), "fournier-submult", "K^2 is not contained in Sym_{1-2eta}(A)")
    _require(
        2 * ksq.size < 3 * k.size,
        "fournier-kneser",
        f"|K^2| = {ksq.size} is not < (3/2)|K| = {1.5 * k.size}",
    )
    try:
        sub = small_squaring_subgroup(k)
    except GroupError as exc:
        raise StageError("fournier-subgroup-check", str(exc)) from exc
    # best right coset Hx
    hi = sub.indices
    best_x, best_overlap = 0, -1
    for x in range(g.order):
        overlap = int(np.count_nonzero(a.mask[g.mul[hi, x]]))
        if overlap > best_overlap:
            best_x, best_overlap = x, overlap
    _require(
        sub.size * a.group.order >= (1 - float(c) / float(eta)) * a.size * a.group.order - 1e-9,
        "fournier-size",
        "mu(H) >= (1 - c/eta) mu(A) failed",
    )
    _require(
        best_overlap >= (1 - 2 * float(eta)) * sub.size - 1e-9,
        "fournier-overlap",
        f"mu(A intersect Hx) = {best_overlap}/{g.order} is below (1-2eta) mu(H)",
    )
    return sub, best_x


@dataclass
class DoublingToTripling:
    subset: GSubset          # A' = x^-1 (A0 intersect A x^-1) x
    x: int
    witness: GSubset         # A'' from the symmetry-set witness search
    core: GSubset            # A0 = Sym_{1-1/6}(A''A)
    size_ratio: float        # |A'| / |A|
    tripling: float
    audits: dict = field(default_factory=dict)


def doubling_to_tripling(a: GSubset, budget: int = 64, seed: int = 0) -> DoublingToTripling:
    """Large-overlap conjugate piece of A with small tripling.

    A0 = Sym_{1-1/6}(A''A) for the searched witness A''; A1 = A0 intersect
    A x^-1 at the best translate; A' = x^-1 A1 x.  Audited exactly: the
    projection average of mu_A0 * 1_{A''A} over mu_{A''A} is >= 5/6, A1 is
    nonempty, A1^3 sits inside Sym_{1/2}(A''A), and mu(A1^3) <= 2 mu(A''A).
    The overlap ratio mu(A1)/mu(A0) is measured and reported (its classical
    2/3 bound holds only against A''A, not against A itself).
    """
    if a.size == 0:
        raise GroupError("doubling_to_tripling needs a nonempty set")
    g = a.group
    witness, _ = sym_witness_search(a, Fraction(1, 6), budget=budget, seed=seed)
    s = product_set(witness, a)
    core = symmetry_set(s, Fraction(5, 6))
    # approximate projection: the average of mu_A0 * 1_S over mu_S is >= 5/6,
    # so the best translate overlaps A0 in at least 2/3 of it.
    mu_core = GFunc.measure(core)
    proj = convolve(mu_core, GFunc.indicator(s))
    avg = float(np.real(np.mean(proj.values[s.mask])))
    _require(avg >= 1 - 1 / 6 - 1e-10, "d2t-approxproj", "integral of mu_A0 * 1_S over mu_S < 5/6")
    best_x, best_overlap = 0, -1
    ai = a.indices
    for x in range(g.order):
        overlap = int(np.count_nonzero(core.mask[g.mul[ai, g.inv[x]]]))
        if overlap > best_overlap:
            best_x, best_overlap = x, overlap
    a1 = core & GSubset.from_indices(g, g.mul[ai, g.inv[best_x]])
    _require(a1.size > 0, "d2t-degenerate", "A0 intersect A x^-1 is empty for every x")
    a1_cubed = power_set(a1, 3)
    half_sym = symmetry_set(s, Fraction(1, 2))
    _require(a1_cubed.issubset(half_sym), "d2t-submult", "A1^3 escapes Sym_{1/2}(A''A)")
    _require(
        a1_cubed.size <= 2 * s.size,
        "d2t-symsize",
        f"mu(A1^3) = {a1_cubed.size}/{g.order} exceeds 2 mu(A''A)",
    )
    a_prime = conjugate(g, a1, int(g.inv[best_x]))
    return DoublingToTripling(
        subset=a_prime,
        x=best_x,
        witness=witness,
        core=core,
        size_ratio=a_prime.size / a.size,
        tripling=power_set(a_prime, 3).size / a_prime.size,
        audits={
            "projection_average": avg,
            "overlap_ratio": best_overlap / core.size,
            "translate_inside_A": bool(
                GSubset.from_indices(g, g.mul[best_x, a_prime.indices]).issubset(a)
            ),
        },
    )


@dataclass
class WeakFreiman:
    pair: MultiplicativePair
    witness: GSubset
    regular_threshold: float
    achieved_ratio: float
    doubling: Fraction
    report: dict = field(default_factory=dict)


def weak_freiman(a: GSubset, r: int, eps: float, budget: int = 64, seed: int = 0) -> WeakFreiman:
    """eps-closed r-multiplicative pair with ground set inside A^4.

    Symmetry-set levels of A'A at a flat threshold c' in (1/4K^4, 1/2K^4]
    provide B-/B/B+; the perturbation set is the near-1 threshold level.
    All containments, the energy lower bound, the closure inequality and
    B inside A^4 are audited exactly on the instance.
    """
    stage = "weak-freiman"
    if a.size == 0:
        raise GroupError("weak_freiman needs a nonempty set")
    _require(a.is_symmetric(), stage, "A is not symmetric")
    _require(a.contains_identity(), stage, "A does not contain the identity")
    if r < 1:
        raise GroupError("width r must be >= 1")
    g = a.group
    doubling_k = Fraction(product_set(a, a).size, a.size)
    kf = float(doubling_k)
    eta = float(eps) / (1 + math.log(4 * kf**4))
    eta_prime = eta / (16 * r * kf**4)
    witness, _ = sym_witness_search(a, eta_prime, budget=budget, seed=seed)
    s = product_set(witness, a)
    perturb = symmetry_set(s, 1 - eta_prime)
    # energy lower bound mu(S)^3 / K^4, exactly
    counts = overlap_counts(s)
    energy_num = int(np.sum(counts.astype(object) ** 2))  # = n^3 * energy
    _require(
        Fraction(energy_num) >= Fraction(s.size**3) / doubling_k**4,
        "weak-freiman-energy",
        "energy(A'A) >= mu(A'A)^3 / K^4 failed",
    )
    perturb_r = power_set(perturb, r)
    _require(
        perturb_r.issubset(symmetry_set(s, 1 - eta / (16 * kf**4))),
        "weak-freiman-submult",
        "B'^r escapes Sym_{1 - eta/16K^4}(A'A)",
    )
    c_prime, ratio = sym_regular_threshold(s, 1 / kf**4, eta)
    upper = symmetry_set(s, c_prime)
    ground = symmetry_set(s, c_prime * (1 + eta / 2))
    lower = symmetry_set(s, c_prime * (1 + eta))
    _require(
        perturb_r.issubset(symmetry_set(s, 1 - c_prime * eta / 4)),
        "weak-freiman-width",
        "B'^r escapes Sym_{1 - c' eta / 4}(A'A)",
    )
    pair = MultiplicativePair(ground, perturb, upper, lower, r)
    report = validate_pair(pair)
    _require(report["valid"], "weak-freiman-pair", "; ".join(report["failures"]) or "invalid pair")
    _require(
        float(pair.epsilon()) <= float(eps) + 1e-12,
        "weak-freiman-closure",
        f"closure {float(pair.epsilon()):.6g} exceeds eps = {float(eps):.6g}",
    )
    _require(
        ground.issubset(power_set(a, 4)),
        "weak-freiman-containment",
        "ground set B escapes A^4",
    )
    return WeakFreiman(
        pair=pair,
        witness=witness,
        regular_threshold=c_prime,
        achieved_ratio=ratio,
        doubling=doubling_k,
        report=report,
    )


@dataclass
class FreimanCorrelation:
    pair: MultiplicativePair
    sup: float
    tripling_stage: DoublingToTripling
    weak_stage: WeakFreiman
    report: dict = field(default_factory=dict)


def freiman_correlation(
    a: GSubset, r: int, eps: float, budget: int = 64, seed: int = 0
) -> FreimanCorrelation:
    """Pair correlating with A: returns (pair, sup |1_A * mu_B|_inf)."""
    if a.size == 0:
        raise GroupError("freiman_correlation needs a nonempty set")
    g = a.group
    d2t = doubling_to_tripling(a, budget=budget, seed=seed)
    a_prime = d2t.subset
    witness2, _ = sym_witness_search(a_prime, Fraction(1, 16), budget=budget, seed=seed)
    s2 = product_set(witness2, a_prime)
    a3 = symmetry_set(s2, Fraction(15, 16))
    a3_sq = product_set(a3, a3)
    _require(
        a3_sq.issubset(symmetry_set(s2, Fraction(7, 8))),
        "correlation-submult",
        "A'''^2 escapes Sym_{1-1/8}(A''A')",
    )
    _require(
        7 * symmetry_set(s2, Fraction(7, 8)).size <= 8 * s2.size,
        "correlation-symsize",
        "mu(Sym_{7/8}(A''A')) exceeds (8/7) mu(A''A')",
    )
    wf = weak_freiman(a3, r, eps, budget=budget, seed=seed)
    b = wf.pair.ground
    _require(
        power_set(a3, 4).issubset(symmetry_set(s2, Fraction(1, 2))),
        "correlation-containment",
        "A'''^4 escapes Sym_{1/2}(A''A')",
    )
    mu_b = GFunc.measure(b)
    proj = convolve(mu_b, GFunc.indicator(s2))
    avg = float(np.real(np.mean(proj.values[s2.mask])))
    _require(avg >= 0.5 - 1e-10, "correlation-approxproj", "mu_B * 1_{A''A'} averages below 1/2")
    sup_inner = float(np.max(np.real(proj.values)))
    _require(sup_inner >= 0.5 - 1e-10, "correlation-inner", "|mu_B * 1_{A''A'}|_inf < 1/2")
    # exact final correlation: 1_A * mu_B (x) = |A intersect x B^-1| / |B|
    bi = b.inverse().indices
    best = 0
    for x in range(g.order):
        best = max(best, int(np.count_nonzero(a.mask[g.mul[x, bi]])))
    sup = best / b.size
    _require(sup > 0, "correlation-final", "sup |1_A * mu_B| is zero")
    return FreimanCorrelation(
        pair=wf.pair,
        sup=sup,
        tripling_stage=d2t,
        weak_stage=wf,
        report={
            "doubling": float(Fraction(product_set(a, a).size, a.size)),
            "projection_average": avg,
            "sup_inner": sup_inner,
            "sup": sup,
        },
    )


@dataclass
class PairSystem:
    levels: list            # nested ground sets B_0 contains ... contains B_J
    pair_reports: dict      # (i, j) -> validate_pair report for (B_i, B_j)
    pairs: dict             # (i, j) -> MultiplicativePair
    thickness: list         # c_i = mu(D_i^4)/mu(D_0^12), exact
    audits: dict = field(default_factory=dict)


MAX_SYSTEM_DEPTH = 4


def pair_system(a: GSubset, r_fn, eps_fn, depth: int, budget: int = 64, seed: int = 0) -> PairSystem:
    """Nested sets (B_i) with (B_i, B_j) a validated pair for every i < j.

    r_fn and eps_fn map a thickness value to the demanded width/closure of
    the next scale.  The inductive construction pigeonholes explicitly over
    the sandwich exponents l_i, and each produced pair is validated exactly.
    """
    stage = "pair-system"
    if depth < 1 or depth > MAX_SYSTEM_DEPTH:
        raise GroupError(f"depth must be between 1 and {MAX_SYSTEM_DEPTH}")
    _require(a.is_symmetric() and a.contains_identity(), stage,
             "A must be a symmetric identity neighborhood")
    g = a.group

    # auxiliary scales D_i
    witness, _ = sym_witness_search(a, Fraction(1, 13), budget=budget, seed=seed)
    d = [symmetry_set(product_set(witness, a), Fraction(12, 13))]
    _require(d[0].issubset(power_set(a, 4)), stage, "D_0 escapes A^4")
    d0_12 = power_set(d[0], 12)
    c_list, k_list = [], [None]
    widths = []
    for i in range(depth):
        c_i = Fraction(power_set(d[i], 4).size, d0_12.size)
        k_big = Fraction(power_set(d[i], 12).size, d[i].size)
        c_list.append(c_i)
        r_i = int(r_fn(float(c_i)))
        eps_i = float(eps_fn(float(c_i)))
        _require(r_i >= 1, stage, "r_fn must return widths >= 1")
        _require(0 < eps_i, stage, "eps_fn must return positive closures")
        k_next = math.ceil((1 + math.log(float(k_big))) / eps_i) * (2 * r_i + 1)
        k_list.append(k_next)
        widths.append(r_i)
        w, _ = sym_witness_search(d[i], Fraction(1, 12 * (k_next + 1)), budget=budget, seed=seed)
        d_next = symmetry_set(product_set(w, d[i]), 1 - Fraction(1, 12 * (k_next + 1)))
        _require(
            power_set(d_next, 12 * (k_next + 1)).issubset(power_set(d[i], 4)),
            stage,
            f"D_{i+1}^(12(k+1)) escapes D_{i}^4",
        )
        d.append(d_next)
    c_list.append(Fraction(power_set(d[depth], 4).size, d0_12.size))

    levels: list = [None] * (depth + 1)
    levels[depth] = power_set(d[depth], 4)
    pairs: dict = {}
    reports: dict = {}
    for j in range(depth, 0, -1):
        core = power_set(d[j - 1], 4)
        uppers, lowers = {}, {}
        for i in range(j, depth + 1):
            r_i = widths[i - 1]
            k_i = k_list[i]
            lo, hi = r_i, k_i - r_i - 1
            # powers of B_i up to hi + r_i + 1
            powers = [g.singleton(g.identity)]
            while len(powers) <= hi + r_i + 1:
                powers.append(product_set(powers[-1], levels[i]))
            best = None
            for l in range(lo, hi + 1):
                minus = product_set(product_set(powers[l - r_i], core), powers[l - r_i])
                plus = product_set(product_set(powers[l + r_i + 1], core), powers[l + r_i + 1])
                ratio = Fraction(plus.size, minus.size)
                if best is None or ratio < best[1]:
                    best = (l, ratio, minus, plus)
            l_i, ratio, minus, plus = best
            eps_dem = float(eps_fn(float(c_list[i - 1])))
            _require(
                float(ratio) <= 1 + eps_dem + 1e-12,
                stage,
                f"pigeonhole failed at scales ({j-1}, {i}): best sandwich ratio "
                f"{float(ratio):.6g} exceeds 1 + eps = {1 + eps_dem:.6g}",
            )
            uppers[i], lowers[i] = plus, minus
            core = product_set(product_set(powers[l_i], core), powers[l_i])
        levels[j - 1] = core
        _require(core.is_symmetric() and core.contains_identity(), stage,
                 f"B_{j-1} is not a symmetric identity neighborhood")
        for i in range(j, depth + 1):
            pair = MultiplicativePair(levels[j - 1], levels[i], uppers[i], lowers[i], widths[i - 1])
            report = validate_pair(pair)
            _require(report["valid"], stage,
                     f"pair (B_{j-1}, B_{i}) invalid: " + "; ".join(report["failures"]))
            _require(
                Fraction(levels[i].size, levels[j - 1].size) >= c_list[i],
                stage,
                f"pair (B_{j-1}, B_{i}) thinner than c_{i}",
            )
            pairs[(j - 1, i)] = pair
            reports[(j - 1, i)] = report
    for i in range(depth):
        _require(levels[i + 1].issubset(levels[i]), stage, f"B_{i+1} not nested in B_{i}")
    _require(levels[0].issubset(power_set(a, 4)), stage, "B_0 escapes A^4")
    return PairSystem(
        levels=levels,
        pair_reports=reports,
        pairs=pairs,
        thickness=c_list,
        audits={"depth": depth, "widths": widths, "k": k_list[1:]},
    )
