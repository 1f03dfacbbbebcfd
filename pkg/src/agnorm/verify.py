"""Named executable property suites over the package's lemma inventory.

Each suite takes (group, rng, trials) and returns a report dict with at
least {"suite", "group", "passed", "failures", "measured"}.  Suites assert
exact or constant-free statements at their stated tolerances and record
measured quantities where the underlying bounds hide unspecified constants.
The CLI `verify` subcommand runs these by name; the test suite reuses them.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from . import decompose as dc
from . import pairs as pr
from . import setstats as st
from . import spectral as sp
from .bohr import bohr_set, haar_unitary, regular_rep, unitary_cover_subset
from .gfunc import GFunc
from .groups import (
    GroupError,
    GSubset,
    build_group,
    conjugate,
    coset,
    generated_subgroup,
    is_subgroup,
    subgroups,
)

__all__ = ["SUITES", "run_suite", "suite_names"]


# -- shared randomized instance helpers -------------------------------------------


def random_gfunc(group, rng, complex_values=True):
    vals = rng.normal(size=group.order)
    if complex_values:
        vals = vals + 1j * rng.normal(size=group.order)
    return GFunc(group, vals)


def random_subset(group, rng, nonempty=True):
    mask = rng.random(group.order) < rng.uniform(0.2, 0.8)
    if nonempty and not mask.any():
        mask[int(rng.integers(group.order))] = True
    return GSubset(group, mask)


def random_symmetric_nbhd(group, rng):
    s = random_subset(group, rng)
    mask = s.mask | s.mask[group.inv]
    mask[group.identity] = True
    return GSubset(group, mask)


def random_pair(group, rng):
    """Random valid pair from the constructor families."""
    subs = subgroups(group)
    kind = int(rng.integers(4))
    if kind == 0:
        return pr.subgroup_pair(subs[int(rng.integers(len(subs)))])
    if kind == 1:
        a = random_symmetric_nbhd(group, rng)
        return pr.pair_from_product_set(a, r=int(rng.integers(1, 3)))
    if kind == 2:
        a = random_symmetric_nbhd(group, rng)
        return pr.pair_from_growth(a, r=int(rng.integers(1, 3)), eps=float(rng.uniform(0, 0.5)))
    base = pr.pair_from_product_set(random_symmetric_nbhd(group, rng), r=2)
    return pr.conjugate_pair(base, int(rng.integers(group.order)))


def random_perturb_density(p, rng):
    allowed = p.perturb_power().indices
    k = int(rng.integers(1, allowed.size + 1))
    pick = rng.choice(allowed, size=k, replace=False)
    weights = rng.random(k) + 0.05
    vals = np.zeros(p.group.order)
    vals[pick] = weights / weights.sum() * p.group.order
    return GFunc(p.group, vals)


def random_local_func(p, rng):
    vals = np.zeros(p.group.order, dtype=np.complex128)
    idx = p.perturb.indices
    vals[idx] = rng.normal(size=idx.size) + 1j * rng.normal(size=idx.size)
    return GFunc(p.group, vals)


def _report(suite, group, failures, measured=None, trials=0):
    return {
        "suite": suite,
        "group": group.spec,
        "passed": not failures,
        "trials": trials,
        "failures": failures[:20],
        "measured": measured or {},
    }


# -- group axioms -------------------------------------------------------------------


def suite_group_axioms(group, rng, trials=0):
    failures = []
    try:
        subs = subgroups(group)
        keys = {s.key() for s in subs}
        for s in subs:
            for y in range(group.order):
                if conjugate(group, s, y).key() not in keys:
                    failures.append(f"conjugate of a subgroup missing (|H|={s.size}, y={y})")
                    break
        for s in subs:
            if generated_subgroup(group, s) != s:
                failures.append("generated_subgroup not idempotent on a subgroup")
    except GroupError as exc:
        failures.append(str(exc))
    return _report("group-axioms", group, failures)


# -- global spectral suites ----------------------------------------------------------


def suite_parseval(group, rng, trials=200):
    failures = []
    worst = 0.0
    for _ in range(trials):
        f, g = random_gfunc(group, rng), random_gfunc(group, rng)
        lhs = complex(np.vdot(sp.conv_matrix(g), sp.conv_matrix(f)))
        err = abs(lhs - f.inner(g))
        worst = max(worst, err)
        if err > 1e-10:
            failures.append(f"Parseval error {err:.3e}")
    return _report("parseval", group, failures, {"worst": worst}, trials)


def suite_hausdorff_young(group, rng, trials=200):
    failures = []
    worst = -np.inf
    for _ in range(trials):
        f = random_gfunc(group, rng)
        excess = sp.pm_norm(f) - f.l1()
        worst = max(worst, excess)
        if excess > 1e-10:
            failures.append(f"s_1 exceeds |f|_1 by {excess:.3e}")
    return _report("hausdorff-young", group, failures, {"worst_excess": worst}, trials)


def suite_invariance(group, rng, trials=100):
    failures = []
    for _ in range(trials):
        f = random_gfunc(group, rng)
        base = sp.a_norm(f)
        if abs(sp.a_norm(f.adjoint()) - base) > 1e-9:
            failures.append("adjoint invariance broken")
        y = int(rng.integers(group.order))
        if abs(sp.a_norm(f.translate(y)) - base) > 1e-9:
            failures.append(f"translation invariance broken at y={y}")
    return _report("invariance", group, failures, trials=trials)


def suite_domination(group, rng, trials=200):
    failures = []
    for _ in range(trials):
        f = random_gfunc(group, rng)
        if f.linf() > sp.a_norm(f) + 1e-9:
            failures.append("L^inf exceeds the algebra norm")
    return _report("domination", group, failures, trials=trials)


def suite_algebra(group, rng, trials=150):
    failures = []
    for _ in range(trials):
        f, g = random_gfunc(group, rng), random_gfunc(group, rng)
        if sp.a_norm(f * g) > sp.a_norm(f) * sp.a_norm(g) + 1e-8:
            failures.append("pointwise product breaks the algebra inequality")
    return _report("algebra", group, failures, trials=trials)


def suite_product_bound(group, rng, trials=150):
    failures = []
    for _ in range(trials):
        f, g = random_gfunc(group, rng), random_gfunc(group, rng)
        if sp.a_norm(sp.convolve(f, g)) > sp.a_norm(f) * sp.pm_norm(g) + 1e-8:
            failures.append("convolution bound |f*g|_A <= |f|_A |g|_PM broken")
    return _report("product-bound", group, failures, trials=trials)


def suite_pm_contraction(group, rng, trials=150):
    failures = []
    dirac = GFunc.dirac(group, group.identity)
    for _ in range(trials):
        a = random_subset(group, rng)
        mu = GFunc.measure(a)
        val = sp.pm_norm(dirac - sp.convolve(mu.adjoint(), mu))
        if val > 1 + 1e-9:
            failures.append(f"PM norm {val:.12f} exceeds 1")
    return _report("pm-contraction", group, failures, trials=trials)


def suite_conv_square(group, rng, trials=150):
    failures = []
    for _ in range(trials):
        a = random_subset(group, rng)
        val = sp.a_norm(sp.convolve(GFunc.indicator(a).adjoint(), GFunc.measure(a)))
        if abs(val - 1) > 1e-9:
            failures.append(f"|1_A~ * mu_A|_A = {val:.12f} != 1")
    return _report("conv-square", group, failures, trials=trials)


def suite_coset_norm(group, rng, trials=0):
    failures = []
    count = 0
    for sub in subgroups(group):
        reps = {int(st_id) for st_id in np.unique(group.mul[:, sub.indices].min(axis=1))}
        for x in reps:
            val = sp.a_norm(GFunc.indicator(coset(group, sub, x)))
            count += 1
            if abs(val - 1) > 1e-9:
                failures.append(f"coset norm {val:.12f} != 1 (|H|={sub.size}, x={x})")
    return _report("coset-norm", group, failures, trials=count)


def _is_normal(group, sub) -> bool:
    hi = set(sub.indices.tolist())
    return all(
        set(group.mul[group.mul[y, sub.indices], group.inv[y]].tolist()) == hi
        for y in range(group.order)
    )


def suite_decompmass(group, rng, trials=60):
    """Mass decomposition |f|_A = |f - f*mu_H|_A + |f*mu_H|_A.

    Exact (asserted, 1e-8) for normal subgroups; for non-normal subgroups the
    identity genuinely fails, so the signed gap is measured and reported.
    """
    failures = []
    gaps = {}
    for sub in subgroups(group):
        normal = _is_normal(group, sub)
        worst = 0.0
        for _ in range(trials):
            f = random_gfunc(group, rng)
            proj = sp.coset_projection(f, sub)
            gap = sp.a_norm(f) - sp.a_norm(f - proj) - sp.a_norm(proj)
            worst = max(worst, abs(gap))
            if abs(gap) > 1e-8 and normal:
                failures.append(f"normal subgroup |H|={sub.size}: gap {gap:.3e}")
                break
            if gap > 1e-8:
                failures.append(
                    f"|H|={sub.size}: additivity exceeded in the triangle direction by {gap:.3e}"
                )
                break
        gaps[f"|H|={sub.size}{'n' if normal else ''}"] = worst
    return _report("decompmass", group, failures, {"worst_abs_gap": gaps}, trials)


def suite_fourier_basis(group, rng, trials=40):
    failures = []
    for _ in range(trials):
        f = random_gfunc(group, rng)
        basis = sp.fourier_basis(f)
        if basis.gram_error() > 1e-10:
            failures.append(f"Gram error {basis.gram_error():.3e}")
        if basis.eigen_residual(f) > 1e-8:
            failures.append(f"eigen residual {basis.eigen_residual(f):.3e}")
        y = int(rng.integers(group.order))
        translated = sp.FourierBasis(
            group, basis.vectors[group.mul[:, y], :], basis.sing_values
        )
        if translated.eigen_residual(f) > 1e-8:
            failures.append("right-translated basis is not a Fourier basis")
    return _report("fourier-basis", group, failures, trials=trials)


def suite_inversion(group, rng, trials=50):
    failures = []
    for _ in range(trials):
        f = random_gfunc(group, rng)
        back = sp.recover_from_operator(group, sp.conv_matrix(f))
        if np.max(np.abs(back.values - f.values)) > 1e-10:
            failures.append("roundtrip failed")
    if not group.is_abelian():
        rejected = False
        for y in range(group.order):
            m = sp.right_translation_matrix(group, y).astype(complex)
            try:
                sp.recover_from_operator(group, m)
            except GroupError:
                rejected = True
                break
        if not rejected:
            failures.append("no right-translation was rejected on a non-abelian group")
    return _report("inversion", group, failures, trials=trials)


# -- symmetry sets -------------------------------------------------------------------


def _subset_iter(group, rng, cap=8, budget=120):
    n = group.order
    if n <= cap:
        for bits in range(1, 1 << n):
            yield GSubset(group, np.array([(bits >> i) & 1 for i in range(n)], dtype=bool))
    else:
        for _ in range(budget):
            yield random_subset(group, rng)


def suite_sym_laws(group, rng, trials=0):
    failures = []
    grid = [Fraction(j, 12) for j in range(1, 13)]
    count = 0
    for a in _subset_iter(group, rng):
        counts = st.overlap_counts(a)
        prev = None
        for eta in grid:
            s = GSubset(group, counts * eta.denominator >= eta.numerator * a.size)
            if not s.is_symmetric() or not s.contains_identity():
                failures.append("symmetry set is not a symmetric identity neighborhood")
            if not s.issubset(st.product_set(a, a.inverse())):
                failures.append("symmetry set escapes AA^-1")
            if prev is not None and not s.issubset(prev):
                failures.append(f"nesting fails between eta={eta} and the previous level")
            prev = s
        for eps in grid[:-1]:
            for delta in grid:
                if delta <= eps:
                    continue
                lhs = st.product_set(
                    st.symmetry_set(a, delta), st.symmetry_set(a, 1 - eps)
                )
                if not lhs.issubset(st.symmetry_set(a, delta - eps)):
                    failures.append(
                        f"sub-multiplicativity fails at delta={delta}, eps={eps}"
                    )
        count += 1
        if failures:
            break
    return _report("sym-laws", group, failures, trials=count)


def suite_sym_size(group, rng, trials=0):
    failures = []
    count = 0
    for a in _subset_iter(group, rng):
        c = 1 - st.energy_deficit(a)  # exact energy / mu(A)^3
        aa = st.product_set(a, a.inverse())
        for j in range(1, 13):
            delta = Fraction(j, 12)
            s = st.symmetry_set(a, delta)
            upper = min(Fraction(aa.size), Fraction(a.size) / delta)
            if Fraction(s.size) > upper:
                failures.append(f"upper size bound fails at delta={delta}")
            if Fraction(s.size) < (c - delta) * a.size:
                failures.append(f"lower size bound fails at delta={delta}")
        count += 1
        if failures:
            break
    return _report("sym-size", group, failures, trials=count)


def suite_approx_projection(group, rng, trials=120):
    failures = []
    for _ in range(trials):
        a = random_subset(group, rng)
        eps = Fraction(int(rng.integers(1, 12)), 12)
        s = st.symmetry_set(a, 1 - eps)
        mu = GFunc.measure(s)
        integrand = 1 - sp.convolve(mu, GFunc.indicator(a)).values
        val = float(np.mean(np.abs(integrand[a.mask])))
        if val > float(eps) + 1e-10:
            failures.append(f"projection defect {val:.6g} exceeds eps={float(eps):.6g}")
    return _report("approx-projection", group, failures, trials=trials)


def suite_kneser(group, rng, trials=0):
    failures = []
    count = 0
    for a in _subset_iter(group, rng):
        k = GSubset(group, a.mask | a.mask[group.inv])
        mask = k.mask.copy()
        mask[group.identity] = True
        k = GSubset(group, mask)
        k2 = st.product_set(k, k)
        if 2 * k2.size < 3 * k.size:
            count += 1
            if not is_subgroup(k2):
                failures.append("small squaring did not force a subgroup")
                break
    return _report("kneser", group, failures, trials=count)


# -- multiplicative pairs --------------------------------------------------------------


def suite_approx_haar(group, rng, trials=100):
    failures = []
    worst = 0.0
    for _ in range(trials):
        p = random_pair(group, rng)
        rep = pr.validate_pair(p)
        if not rep["valid"]:
            failures.append("constructor produced an invalid pair: " + "; ".join(rep["failures"]))
            continue
        mu = random_perturb_density(p, rng)
        defect = pr.approx_haar_defect(p, mu)
        slack = defect - float(p.epsilon())
        worst = max(worst, slack)
        if slack > 1e-10:
            failures.append(f"Haar defect {defect:.6g} exceeds closure {float(p.epsilon()):.6g}")
    return _report("approx-haar", group, failures, {"worst_slack": worst}, trials)


def suite_conv_continuity(group, rng, trials=80):
    failures = []
    for _ in range(trials):
        p = random_pair(group, rng)
        f = random_gfunc(group, rng)
        smoothed = sp.convolve(f, GFunc.measure(p.ground))
        eps = float(p.epsilon())
        bound = eps * f.linf() + 1e-10
        idx = p.perturb_power().indices
        diffs = np.abs(smoothed.values[group.mul[:, idx]] - smoothed.values[:, None])
        if float(diffs.max()) > bound:
            failures.append(f"convolution continuity defect {float(diffs.max()):.6g} > {bound:.6g}")
    return _report("conv-continuity", group, failures, trials=trials)


def suite_approx_unitarity(group, rng, trials=80):
    failures = []
    for _ in range(trials):
        p = random_pair(group, rng)
        v = random_gfunc(group, rng).restrict(p.ground)
        y = int(rng.choice(p.perturb_power().indices))
        moved = v.translate(y).restrict(p.ground)
        lhs = v.lp_over(p.ground, 2) ** 2 - moved.lp_over(p.ground, 2) ** 2
        bound = float(p.epsilon()) * v.linf_over(p.ground) ** 2 + 1e-10
        if lhs < -1e-10 or lhs > bound:
            failures.append(f"approximate unitarity defect {lhs:.6g} outside [0, {bound:.6g}]")
    return _report("approx-unitarity", group, failures, trials=trials)


def suite_restriction_energy(group, rng, trials=60):
    failures = []
    for _ in range(trials):
        p = random_pair(group, rng)
        f = random_local_func(p, rng)
        support = st.product_set(p.ground, p.perturb_power())
        g = random_gfunc(group, rng).restrict(support)
        fd = f * (group.order / p.perturb.size) * GFunc.indicator(p.perturb)
        full = sp.convolve(fd, g)
        cut = sp.convolve(fd, g.restrict(p.ground))
        lhs = abs(cut.lp_over(p.ground, 2) ** 2 - full.lp_over(p.ground, 2) ** 2)
        bound = (
            2 * math.sqrt(float(p.epsilon())) * f.lp_over(p.perturb, 1) ** 2
            * g.linf_over(support) ** 2 + 1e-9
        )
        if lhs > bound:
            failures.append(f"restriction energy defect {lhs:.6g} > {bound:.6g}")
    return _report("restriction-energy", group, failures, trials=trials)


def suite_approx_commuting(group, rng, trials=40):
    failures = []
    worst_exact = 0.0
    measured = []
    subs = subgroups(group)
    for _ in range(trials):
        sub = subs[int(rng.integers(len(subs)))]
        p = pr.subgroup_pair(sub)
        f = random_local_func(p, rng)
        v = random_gfunc(group, rng).restrict(p.ground)
        y = int(rng.choice(sub.indices))
        fd = f * (group.order / p.perturb.size) * GFunc.indicator(p.perturb)
        lv = sp.convolve(fd, v).restrict(p.ground)
        a = lv.translate(y).restrict(p.ground)
        b = sp.convolve(fd, v.translate(y).restrict(p.ground)).restrict(p.ground)
        defect = (a - b).lp_over(p.ground, 2) ** 2
        worst_exact = max(worst_exact, defect)
        if defect > 1e-10:
            failures.append(f"subgroup pair commutator defect {defect:.3e} != 0")
    for _ in range(trials):
        p = random_pair(group, rng)
        f = random_local_func(p, rng)
        v = random_gfunc(group, rng).restrict(p.ground)
        y = int(rng.choice(p.perturb_power().indices))
        fd = f * (group.order / p.perturb.size) * GFunc.indicator(p.perturb)
        lv = sp.convolve(fd, v).restrict(p.ground)
        a = lv.translate(y).restrict(p.ground)
        b = sp.convolve(fd, v.translate(y).restrict(p.ground)).restrict(p.ground)
        defect = (a - b).lp_over(p.ground, 2) ** 2
        if not np.isfinite(defect):
            failures.append("commutator defect is not finite")
        measured.append(defect)
    return _report(
        "approx-commuting", group, failures,
        {"subgroup_worst": worst_exact, "max_measured": max(measured, default=0.0)}, trials,
    )


def suite_local_bessel(group, rng, trials=80):
    failures = []
    for _ in range(trials):
        p = random_pair(group, rng)
        f = random_local_func(p, rng)
        op = pr.LocalOp(p, f)
        bound = float(1 / p.thickness()) * op.f_l2() ** 2 + 1e-9
        if op.hilbert_schmidt_sq() > bound:
            failures.append(f"HS^2 {op.hilbert_schmidt_sq():.6g} exceeds {bound:.6g}")
    return _report("local-bessel", group, failures, trials=trials)


def suite_local_hy(group, rng, trials=80):
    failures = []
    for _ in range(trials):
        p = random_pair(group, rng)
        f = random_local_func(p, rng)
        op = pr.LocalOp(p, f)
        s = op.singular_values
        if s.size and s[0] > op.f_l1() + 1e-10:
            failures.append(f"local s_1 {float(s[0]):.6g} exceeds |f|_1 {op.f_l1():.6g}")
    return _report("local-hy", group, failures, trials=trials)


def suite_parseval_dimension(group, rng, trials=60):
    failures = []
    for _ in range(trials):
        p = random_pair(group, rng)
        f = random_local_func(p, rng)
        op = pr.LocalOp(p, f)
        if op.f_l1() == 0:
            continue
        delta = float(rng.uniform(0.1, 1.0))
        sl = pr.spectrum(p, f, delta)
        bound = float(1 / p.thickness()) / delta**2 * (op.f_l2() / op.f_l1()) ** 2
        if sl.dim > bound + 1e-8:
            failures.append(f"spectrum dim {sl.dim} exceeds Parseval bound {bound:.6g}")
    return _report("parseval-dimension", group, failures, trials=trials)


def suite_eigvec_linf(group, rng, trials=60):
    failures = []
    for _ in range(trials):
        p = random_pair(group, rng)
        f = random_local_func(p, rng)
        op = pr.LocalOp(p, f)
        basis = pr.local_fourier_basis(p, f)
        cinv_sqrt = float(1 / p.thickness()) ** 0.5
        for i, s in enumerate(basis.sing_values):
            if s <= sp.NOISE_FLOOR * max(1.0, float(basis.sing_values[0])):
                continue
            v = basis.function(i)
            bound = s**-2 * cinv_sqrt * op.f_l1() * op.f_l2() + 1e-8
            if v.linf_over(p.ground) > bound:
                failures.append(f"eigenvector L^inf {v.linf_over(p.ground):.6g} > {bound:.6g}")
                break
    return _report("eigvec-linf", group, failures, trials=trials)


def suite_spectrum_linf(group, rng, trials=60):
    failures = []
    for _ in range(trials):
        p = random_pair(group, rng)
        f = random_local_func(p, rng)
        op = pr.LocalOp(p, f)
        if op.f_l1() == 0:
            continue
        delta = float(rng.uniform(0.2, 1.0))
        sl = pr.spectrum(p, f, delta)
        if sl.dim == 0:
            continue
        coeffs = rng.normal(size=sl.dim) + 1j * rng.normal(size=sl.dim)
        coeffs /= np.linalg.norm(coeffs)
        vals = np.zeros(group.order, dtype=np.complex128)
        vals[sl.elements] = (sl.coords @ coeffs) * np.sqrt(sl.elements.size)
        v = GFunc(group, vals)
        bound = delta**-3 * float(1 / p.thickness()) * (op.f_l2() / op.f_l1()) ** 2 + 1e-8
        if v.linf_over(p.ground) > bound:
            failures.append(f"slice vector L^inf {v.linf_over(p.ground):.6g} > {bound:.6g}")
    return _report("spectrum-linf", group, failures, trials=trials)


def suite_translation_identity(group, rng, trials=40):
    failures = []
    defects = []
    for _ in range(trials):
        p = random_pair(group, rng)
        f = random_local_func(p, rng)
        op = pr.LocalOp(p, f)
        if op.f_l1() == 0:
            continue
        delta, eta = pr.regular_delta(p, f, float(rng.uniform(0.3, 1.0)))
        t_id, sl = pr.translation_operator(p, f, delta, group.identity)
        if sl.dim and np.max(np.abs(t_id - np.eye(sl.dim))) > 1e-12:
            failures.append("T at the identity is not the identity matrix")
        if sl.dim:
            y = int(rng.choice(p.perturb_power().indices))
            z = int(rng.choice(p.perturb_power().indices))
            t_y, _ = pr.translation_operator(p, f, delta, y)
            t_z, _ = pr.translation_operator(p, f, delta, z)
            t_yz, _ = pr.translation_operator(p, f, delta, int(group.mul[y, z]))
            defects.append(float(np.linalg.norm(t_yz - t_y @ t_z, 2)))
    return _report(
        "translation-identity", group, failures,
        {"homomorphism_defect_max": max(defects, default=0.0)}, trials,
    )


def suite_nearest_unitary(group, rng, trials=200):
    failures = []
    d = max(2, min(6, group.order))
    for _ in range(trials):
        u1, u2 = haar_unitary(rng, d), haar_unitary(rng, d)
        s = rng.uniform(0.8, 1.2, size=d)
        m = (u1 * s) @ u2
        u, bound = pr.nearest_unitary(m)
        if np.max(np.abs(u.conj().T @ u - np.eye(d))) > 1e-10:
            failures.append("returned matrix is not unitary")
        if np.linalg.norm(m - u, 2) > max(np.abs(s - 1)) + 1e-9:
            failures.append("distance exceeds max |s_i - 1|")
        if abs(bound - max(np.abs(s - 1))) > 1e-9:
            failures.append("reported bound differs from max |s_i - 1|")
    return _report("nearest-unitary", group, failures, trials=trials)


def suite_local_global_consistency(group, rng, trials=20):
    failures = []
    full = group.full_subset()
    p = pr.MultiplicativePair(full, full, full, full, None)
    for _ in range(trials):
        f = random_gfunc(group, rng)
        global_s = sp.singular_values(f)
        local_s = pr.LocalOp(p, f).singular_values
        if np.max(np.abs(global_s - local_s)) > 1e-10:
            failures.append("(G,G,G,G) local spectrum differs from the global one")
    return _report("local-global-consistency", group, failures, trials=trials)


# -- Bohr sets ---------------------------------------------------------------------


def suite_bohr(group, rng, trials=30):
    failures = []
    if group.order > 96:
        return _report("bohr", group, ["group too large for the regular representation"], trials=0)
    rep = regular_rep(group)
    norms = sorted(
        float(np.linalg.norm(rep.matrices[y] - np.eye(group.order), 2))
        for y in range(group.order)
        if y != group.identity
    )
    if norms:
        tiny = bohr_set(rep, norms[0] * 0.5)
        if tiny.size != 1 or not tiny.contains_identity():
            failures.append("regular-representation Bohr set below the gap is not {identity}")
    deltas = sorted(rng.uniform(0, 2, size=4))
    prev = None
    for dlt in deltas:
        b = bohr_set(rep, float(dlt))
        if not b.is_symmetric() or not b.contains_identity():
            failures.append("Bohr set is not a symmetric identity neighborhood")
        if prev is not None and not prev.issubset(b):
            failures.append("Bohr sets are not monotone in the radius")
        prev = b
    if bohr_set(rep, 2.0).size != group.order:
        failures.append("radius-2 Bohr set is not the whole group")
    for _ in range(trials):
        b = random_subset(group, rng)
        d = max(2, min(4, group.order))
        phi = np.stack([np.eye(d, dtype=complex) for _ in range(group.order)])
        for x in b.indices:
            phi[int(x)] = haar_unitary(rng, d)
        delta = float(rng.uniform(0.2, 2.0))
        found = unitary_cover_subset(b, phi, delta, samples=8, seed=int(rng.integers(2**32)))
        if found.size == 0 or not found.issubset(b):
            failures.append("cover subset empty or escaping B")
        idx = [int(x) for x in found.indices]
        for i, x in enumerate(idx):
            for y in idx[i + 1:]:
                if np.linalg.norm(phi[x].conj().T @ phi[y] - np.eye(d), 2) > delta + 1e-9:
                    failures.append("pairwise closeness violated")
    return _report("bohr", group, failures, trials=trials)


# -- large-spectrum instances ---------------------------------------------------------


def suite_chopup(group, rng, trials=6):
    failures = []
    subs = subgroups(group)
    chains = [
        (b0, b1, b2)
        for b0 in subs
        for b1 in subs
        if b1.issubset(b0)
        for b2 in subs
        if b2.issubset(b1) and b2.size >= 1
    ]
    if not chains:
        return _report("chopup", group, ["no subgroup chain available"], trials=0)
    done = 0
    for _ in range(trials):
        b0, b1, b2 = chains[int(rng.integers(len(chains)))]
        f = random_local_func(pr.subgroup_pair(b2), rng)
        if f.linf_over(b2) == 0:
            continue
        h_op = sp.ConvOp(GFunc.measure(b1))
        sq = h_op.matrix.conj().T @ h_op.matrix
        eigvals, eigvecs = np.linalg.eigh(sq)
        top = int(np.argmax(eigvals))
        lam = float(eigvals[top])  # = lambda |h|_inf^2 with h = 1_{B1}, |h|_inf = 1
        if lam <= 1e-12:
            continue
        gfun = GFunc(group, eigvecs[:, top] * np.sqrt(group.order))
        fd = f * (group.order / b2.size) * GFunc.indicator(b2)
        num = sp.convolve(fd, gfun).l2() ** 2
        den = f.linf_over(b2) ** 2 * gfun.l2() ** 2
        if num <= 1e-12 * den:
            continue
        eta = 0.5 * num / den
        c1 = b1.size / b0.size
        ok = False
        for xp in range(group.order):
            moved = gfun.translate(xp)
            cut = moved.restrict(b0)
            l2 = cut.lp_over(b0, 2)
            if l2 == 0:
                continue
            c1_val = sp.convolve(fd, cut).lp_over(b0, 2) ** 2
            if c1_val <= eta * f.linf_over(b2) ** 2 * l2**2 / 4:
                continue
            if moved.linf_over(b0) > 4 * eta**-0.5 / lam / c1 * l2 + 1e-9:
                continue
            ok = True
            break
        done += 1
        if not ok:
            failures.append("no translate satisfied both relative-energy conclusions")
    return _report("chopup", group, failures, trials=done)


def suite_spectral_collection(group, rng, trials=20):
    failures = []
    subs = subgroups(group)
    nested = [(b, bp) for b in subs for bp in subs if bp.issubset(b) and bp.size < b.size]
    if not nested:
        return _report("spectral-collection", group, ["no nested subgroups"], trials=0)
    done = 0
    for _ in range(trials):
        b, bp = nested[int(rng.integers(len(nested)))]
        f = random_gfunc(group, rng)
        m = sp.a_norm(f)
        mu_b, mu_bp = GFunc.measure(b), GFunc.measure(bp)
        smoothed_b = sp.convolve(f, sp.convolve(mu_b.adjoint(), mu_b))
        smoothed_bp = sp.convolve(f, sp.convolve(mu_bp.adjoint(), mu_bp))
        nu = (smoothed_b - smoothed_bp).linf()
        if nu <= 1e-9:
            continue
        gain = dc.dual_mass(f, bp) - dc.dual_mass(f, b)
        if gain < nu**2 / m - 1e-6:  # eps = 0 for subgroup pairs
            failures.append(f"spectral-mass gain {gain:.6g} below nu^2/M = {nu**2 / m:.6g}")
        done += 1
    return _report("spectral-collection", group, failures, trials=done)


# -- decomposition ------------------------------------------------------------------


def suite_small_norm_dichotomy(group, rng, trials=0):
    failures = []
    if group.order > 8:
        return _report("small-norm-dichotomy", group, ["group too large for exhaustion"], trials=0)
    min_noncoset = np.inf
    count = 0
    for a in _subset_iter(group, rng):
        count += 1
        res = dc.small_norm_coset_test(a)
        a0 = int(a.indices[0])
        h = GSubset.from_indices(group, group.mul[a.indices, group.inv[a0]])
        really_coset = is_subgroup(h)
        if res is None:
            if really_coset:
                failures.append(f"coset with norm >= threshold: {a.indices.tolist()}")
            min_noncoset = min(min_noncoset, sp.a_norm(GFunc.indicator(a)))
        else:
            sub, x = res
            if not really_coset:
                failures.append(f"non-coset below threshold: {a.indices.tolist()}")
            rebuilt = GSubset.from_indices(group, group.mul[sub.indices, x])
            if rebuilt != a:
                failures.append("returned (H, x) does not rebuild A")
    return _report(
        "small-norm-dichotomy", group, failures,
        {"min_noncoset_norm": float(min_noncoset)}, count,
    )


def suite_decompose(group, rng, trials=60):
    failures = []
    subs = subgroups(group)
    min_drop = np.inf
    for _ in range(trials):
        f = GFunc.zero(group)
        for _ in range(3):
            sub = subs[int(rng.integers(len(subs)))]
            x = int(rng.integers(group.order))
            z = int(rng.integers(-2, 3))
            f = f + z * GFunc.indicator(coset(group, sub, x))
        try:
            deco = dc.idempotent_decompose(f)
        except dc.DecomposeError as exc:
            failures.append(f"decomposition failed: {exc}")
            continue
        if not deco.verify():
            failures.append("reconstruction mismatch")
        for step in deco.steps:
            min_drop = min(min_drop, step["norm_before"] - step["norm_after"])
    if min_drop < 0.5 - 1e-6:
        failures.append(f"per-step drop {min_drop:.6g} below 1/2")
    return _report("decompose", group, failures, {"min_drop": float(min_drop)}, trials)


def suite_dual_mass(group, rng, trials=60):
    failures = []
    for _ in range(trials):
        f = random_gfunc(group, rng)
        total = sp.a_norm(f)
        at_identity = dc.dual_mass(f, group.singleton(group.identity))
        if abs(at_identity - total) > 1e-8:
            failures.append("dual mass at the identity does not equal the algebra norm")
        b = random_subset(group, rng)
        if dc.dual_mass(f, b) > total + 1e-8:
            failures.append("dual mass exceeds the algebra norm")
    return _report("dual-mass", group, failures, trials=trials)


SUITES = {
    "group-axioms": suite_group_axioms,
    "parseval": suite_parseval,
    "hausdorff-young": suite_hausdorff_young,
    "invariance": suite_invariance,
    "domination": suite_domination,
    "algebra": suite_algebra,
    "product-bound": suite_product_bound,
    "pm-contraction": suite_pm_contraction,
    "conv-square": suite_conv_square,
    "coset-norm": suite_coset_norm,
    "decompmass": suite_decompmass,
    "fourier-basis": suite_fourier_basis,
    "inversion": suite_inversion,
    "sym-laws": suite_sym_laws,
    "sym-size": suite_sym_size,
    "approx-projection": suite_approx_projection,
    "kneser": suite_kneser,
    "approx-haar": suite_approx_haar,
    "conv-continuity": suite_conv_continuity,
    "approx-unitarity": suite_approx_unitarity,
    "restriction-energy": suite_restriction_energy,
    "approx-commuting": suite_approx_commuting,
    "local-bessel": suite_local_bessel,
    "local-hy": suite_local_hy,
    "parseval-dimension": suite_parseval_dimension,
    "eigvec-linf": suite_eigvec_linf,
    "spectrum-linf": suite_spectrum_linf,
    "translation-identity": suite_translation_identity,
    "nearest-unitary": suite_nearest_unitary,
    "local-global-consistency": suite_local_global_consistency,
    "bohr": suite_bohr,
    "chopup": suite_chopup,
    "spectral-collection": suite_spectral_collection,
    "small-norm-dichotomy": suite_small_norm_dichotomy,
    "decompose": suite_decompose,
    "dual-mass": suite_dual_mass,
}


def suite_names() -> list[str]:
    return sorted(SUITES)


def run_suite(name: str, group_spec: str, seed: int = 0, trials: int | None = None) -> dict:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; known: {', '.join(suite_names())}")
    group = build_group(group_spec) if isinstance(group_spec, str) else group_spec
    rng = np.random.default_rng(seed)
    fn = SUITES[name]
    if trials is None:
        return fn(group, rng)
    return fn(group, rng, trials)
