from fractions import Fraction

import numpy as np
import pytest

from agnorm.gfunc import GFunc
from agnorm.groups import GSubset, build_group, subgroups
from agnorm import pairs as pr
from agnorm import spectral as sp
from agnorm.setstats import power_set, product_set
from agnorm.verify import run_suite
from agnorm.bohr import haar_unitary


def interval(group, radius):
    n = group.order
    return GSubset.from_indices(group, [i % n for i in range(-radius, radius + 1)])


def test_subgroup_pair(d8):
    h = next(s for s in subgroups(d8) if s.size == 4)
    p = pr.subgroup_pair(h)
    rep = pr.validate_pair(p)
    assert rep["valid"]
    assert rep["epsilon"] == 0
    assert rep["thickness"] == 1
    assert rep["valid_r"] == pr.EXACT_WIDTH_CAP


def test_product_set_pair():
    g = build_group("cyclic:64")
    a = interval(g, 1)
    p = pr.pair_from_product_set(a, r=2)
    assert p.ground == interval(g, 4)
    assert p.upper == interval(g, 8)
    assert p.lower.indices.tolist() == [0]
    assert pr.validate_pair(p)["valid"]


def test_growth_pair_scan_matches_direct_oracle():
    g = build_group("cyclic:100")
    a = interval(g, 1)
    # direct scan oracle for the smallest n with |A^{n+2}| <= 1.25 |A^{n-2}|
    def size(k):
        return min(2 * k + 1, 100) if k >= 1 else 1
    want_n = next(n for n in range(2, 100) if size(n + 2) <= 1.25 * size(n - 2))
    p = pr.pair_from_growth(a, r=1, eps=0.25)
    assert p.ground == interval(g, want_n)
    assert pr.validate_pair(p)["valid"]


def test_growth_pair_stabilizes_at_zero_eps(d8):
    a = GSubset.from_indices(d8, [0, 1, 4])  # generates the whole group
    a = GSubset(d8, a.mask | a.mask[d8.inv])
    p = pr.pair_from_growth(a, r=1, eps=0.0)
    assert p.ground.size == 8  # stabilized power = <A> = G
    assert p.epsilon() == 0


def test_growth_pair_subgroup_immediate(d8):
    h = next(s for s in subgroups(d8) if s.size == 4)
    p = pr.pair_from_growth(h, r=2, eps=0.0)
    assert p.ground == h and p.upper == h and p.lower == h


def test_conjugate_pair_preserves_parameters(d8):
    a = GSubset(d8, np.array([True, True, False, False, False, True, False, False]))
    a = GSubset(d8, a.mask | a.mask[d8.inv])
    base = pr.pair_from_product_set(a, r=1)
    for y in range(8):
        conj = pr.conjugate_pair(base, y)
        assert conj.epsilon() == base.epsilon()
        assert conj.thickness() == base.thickness()
        assert conj.width_r == base.width_r
        assert pr.validate_pair(conj)["valid"]


def test_coset_union_pair(d8):
    rotations = next(s for s in subgroups(d8) if s.size == 4 and 1 in s)
    h = next(s for s in subgroups(d8) if s.size == 2 and 2 in s)  # {e, r^2}, central
    nbhd = GSubset.from_indices(d8, [0, 1, d8.inverse(1)])
    p = pr.coset_union_pair(h, nbhd)
    assert pr.validate_pair(p)["valid"]
    assert p.epsilon() == 0
    assert p.ground == product_set(nbhd, h)


def test_subpair(d8):
    h = next(s for s in subgroups(d8) if s.size == 4)
    k = next(s for s in subgroups(d8) if s.size == 2 and s.issubset(h))
    p = pr.subgroup_pair(h)
    q = pr.subpair(p, k, 2)
    assert q.perturb == product_set(k, k)
    assert pr.validate_pair(q)["valid"]


def test_validate_pair_reports_failures(d8):
    bad = pr.MultiplicativePair(
        d8.subset([0, 1]), d8.subset([0, 1]), d8.subset([0, 1]), d8.subset([0]), 1
    )
    rep = pr.validate_pair(bad)
    assert not rep["valid"]
    assert rep["failures"]


def test_approx_haar_defect(d8, rng):
    h = next(s for s in subgroups(d8) if s.size == 4)
    p = pr.subgroup_pair(h)
    assert pr.approx_haar_defect(p, GFunc.dirac(d8, d8.identity)) < 1e-15
    assert pr.approx_haar_defect(p, GFunc.measure(h)) < 1e-15
    g = build_group("cyclic:100")
    a = GSubset.from_indices(g, [0, 1, 99])
    gp = pr.pair_from_growth(a, r=1, eps=0.25)
    defect = pr.approx_haar_defect(gp, GFunc.measure(gp.perturb))
    assert defect <= float(gp.epsilon()) + 1e-10
    with pytest.raises(pr.PairError):
        pr.approx_haar_defect(gp, GFunc.dirac(g, 50))  # support escapes B'^r


def test_local_operator_consistency_with_global(s3, rng):
    full = s3.full_subset()
    p = pr.MultiplicativePair(full, full, full, full, None)
    f = GFunc(s3, rng.normal(size=6) + 1j * rng.normal(size=6))
    op = pr.LocalOp(p, f)
    assert np.max(np.abs(op.matrix - sp.conv_matrix(f))) < 1e-15
    assert np.max(np.abs(op.singular_values - sp.singular_values(f))) < 1e-10


def test_local_adjoint_identity(d8, rng):
    h = next(s for s in subgroups(d8) if s.size == 4)
    k = next(s for s in subgroups(d8) if s.size == 2 and s.issubset(h))
    p = pr.MultiplicativePair(h, k, h, h, 1)
    assert pr.validate_pair(p)["valid"]
    vals = np.zeros(8, dtype=complex)
    vals[k.indices] = rng.normal(size=2) + 1j * rng.normal(size=2)
    f = GFunc(d8, vals)
    a = pr.LocalOp(p, f).matrix.conj().T
    b = pr.LocalOp(p, f.adjoint()).matrix
    assert np.max(np.abs(a - b)) < 1e-14


def test_local_support_precondition(d8, rng):
    h = next(s for s in subgroups(d8) if s.size == 4)
    p = pr.subgroup_pair(h)
    f = GFunc(d8, rng.normal(size=8))
    with pytest.raises(pr.PairError):
        pr.LocalOp(p, f)


def test_indicator_spectrum_slices(d8):
    h = next(s for s in subgroups(d8) if s.size == 4)
    k = next(s for s in subgroups(d8) if s.size == 2 and s.issubset(h))
    p = pr.MultiplicativePair(h, k, h, h, 1)
    f = GFunc.indicator(k)
    op = pr.LocalOp(p, f)
    assert op.singular_values[0] <= 1 + 1e-12  # local Hausdorff-Young, |f|_1 = 1
    assert pr.spectrum(p, f, 0.5).dim >= 1  # B' dense in B at thickness 1/2
    assert pr.spectrum(p, f, 1 + 1e-6).dim == 0


def test_regular_delta_plateau(d8, rng):
    h = next(s for s in subgroups(d8) if s.size == 4)
    p = pr.subgroup_pair(h)
    # f = indicator of H: single distinct singular value, delta' = delta works
    f = GFunc.indicator(h)
    dlt, eta = pr.regular_delta(p, f, 0.9)
    assert 0.45 < dlt <= 0.9
    d1 = pr.spectrum(p, f, dlt).dim
    d2 = pr.spectrum(p, f, dlt - eta).dim
    assert d1 == d2


def test_regular_delta_constructed_gaps():
    # local operator with prescribed singular values {1, 0.6, 0.3} * |f|_1:
    # the plateau at delta = 0.9 must land strictly between 0.6 and 0.9
    g = build_group("cyclic:8")
    full = g.full_subset()
    p = pr.MultiplicativePair(full, full, full, full, None)
    spec = np.array([1.0, 0.6, 0.6, 0.3, 0.3, 0.1, 0.1, 0.05])
    fhat = spec  # real nonnegative DFT -> f via inverse transform
    vals = np.fft.ifft(fhat * 8)
    f = GFunc(g, vals)
    op = pr.LocalOp(p, f)
    l1 = op.f_l1()
    got = np.sort(op.singular_values)[::-1] / l1
    # derived oracle: dimension scan over the pigeonhole grid
    dlt, eta = pr.regular_delta(p, f, 0.9)
    dims = lambda t: int(np.count_nonzero(op.singular_values >= t * l1))
    assert dims(dlt) == dims(dlt - eta)
    assert 0.45 < dlt <= 0.9


def test_translation_operator_identity(d8, rng):
    h = next(s for s in subgroups(d8) if s.size == 4)
    p = pr.subgroup_pair(h)
    vals = np.zeros(8, dtype=complex)
    vals[h.indices] = rng.normal(size=4)
    f = GFunc(d8, vals)
    t, sl = pr.translation_operator(p, f, 0.5, d8.identity)
    assert sl.dim > 0
    assert np.max(np.abs(t - np.eye(sl.dim))) < 1e-12


def test_nearest_unitary_cases(rng):
    u = haar_unitary(rng, 4)
    got, bound = pr.nearest_unitary(u)
    assert bound < 1e-12
    assert np.max(np.abs(got - u)) < 1e-10
    m = 1.25 * np.eye(3)
    got, bound = pr.nearest_unitary(m)
    assert np.allclose(got, np.eye(3))
    assert abs(bound - 0.25) < 1e-12
    for _ in range(25):
        s = rng.uniform(0.9, 1.1, size=5)
        m = (haar_unitary(rng, 5) * s) @ haar_unitary(rng, 5)
        u, bound = pr.nearest_unitary(m)
        assert bound <= 0.1 + 1e-9
        assert np.max(np.abs(u.conj().T @ u - np.eye(5))) < 1e-10
        assert np.linalg.norm(m - u, 2) <= bound + 1e-10
    # zero singular values: completion keeps U unitary, bound includes 1
    u, bound = pr.nearest_unitary(np.zeros((3, 3)))
    assert abs(bound - 1.0) < 1e-12
    assert np.max(np.abs(u.conj().T @ u - np.eye(3))) < 1e-10


def test_normalize_pair_normal_subgroup(d8):
    center = next(s for s in subgroups(d8) if s.size == 2 and 2 in s)
    got = pr.normalize_pair(center, center, center)
    assert center.issubset(got)


def test_normalize_pair_abelian():
    g = build_group("cyclic:16")
    b2 = GSubset.from_indices(g, [0, 1, 15])
    b1 = power_set(b2, 2)
    b0 = power_set(b1, 2)
    got = pr.normalize_pair(b0, b1, b2)
    assert got == power_set(b2, 2)  # conjugation is trivial


def test_normalize_pair_dihedral(d8):
    b2 = next(s for s in subgroups(d8) if s.size == 2 and 2 in s)
    b1 = next(s for s in subgroups(d8) if s.size == 4 and b2.issubset(s))
    b0 = d8.full_subset()
    got = pr.normalize_pair(b0, b1, b2)
    b2_6 = power_set(b2, 6)
    from agnorm.groups import conjugate
    for x in b1.indices:
        assert conjugate(d8, got, int(x)).issubset(b2_6)


def test_normalize_pair_hypothesis_audit(d8):
    big = d8.full_subset()
    small = next(s for s in subgroups(d8) if s.size == 2 and 2 in s)
    with pytest.raises(pr.PairError):
        pr.normalize_pair(small, big, big)  # B1^2 escapes B0


@pytest.mark.parametrize(
    "suite",
    ["approx-haar", "conv-continuity", "approx-unitarity", "restriction-energy",
     "approx-commuting", "local-bessel", "local-hy", "parseval-dimension",
     "eigvec-linf", "spectrum-linf", "translation-identity", "nearest-unitary",
     "local-global-consistency"],
)
def test_pair_suites(suite, d8):
    rep = run_suite(suite, d8, seed=11, trials=25)
    assert rep["passed"], rep["failures"]
