import numpy as np
import pytest

from agnorm.gfunc import GFunc
from agnorm.groups import GSubset, build_group, coset, subgroups
from agnorm import decompose as dc
from agnorm import spectral as sp
from agnorm.verify import run_suite

from oracles import brute_coset_terms, brute_three_term_decomposition


def test_round_to_integer_cases(s3):
    f = GFunc(s3, [1, -2, 0, 3, 0, 1])
    rep = dc.round_to_integer(f, 0.25)
    assert rep.max_deviation == 0.0
    assert np.array_equal(rep.rounded.values.real, f.values.real)
    g = GFunc.constant(s3, 0.4)
    assert np.allclose(dc.round_to_integer(g, 0.45).rounded.values, 0.0)
    with pytest.raises(dc.DecomposeError) as exc:
        dc.round_to_integer(g, 0.3)
    assert exc.value.witness is not None
    with pytest.raises(dc.DecomposeError):
        dc.round_to_integer(g, 0.6)  # eps must stay below 1/2


def test_coset_rounding_identity_case(d8):
    h = next(s for s in subgroups(d8) if s.size == 4)
    f = GFunc.indicator(h)
    terms, residual = dc.coset_rounding(f, h, 1e-3, m_bound=1.0, eta=0.5)
    assert [(z, rep) for z, _, rep in terms] == [(1, 0)]
    assert terms[0][1] == h
    assert residual.linf() < 1e-12


def test_coset_rounding_matches_brute_scan(d8):
    h = next(s for s in subgroups(d8) if s.size == 4)
    k = next(s for s in subgroups(d8) if s.size == 2 and s.issubset(h))
    f = 2 * GFunc.indicator(h) - GFunc.indicator(k)
    terms, residual = dc.coset_rounding(f, k, 1e-3, m_bound=3.0, eta=0.25)
    proj = sp.coset_projection(f, k)
    want = brute_coset_terms(d8, k.indices.tolist(), proj.values)
    got = {(z, frozenset(d8.mul[rep, sub.indices].tolist())) for z, sub, rep in terms}
    assert got == {(z, cos) for z, cos in want}
    assert residual.linf() < 1e-12  # f is already constant on K-cosets


def test_coset_rounding_with_noise(d8, rng):
    h = next(s for s in subgroups(d8) if s.size == 4)
    noise = rng.uniform(-0.1, 0.1, size=8)
    f = GFunc(d8, h.mask + noise)
    terms, residual = dc.coset_rounding(f, h, 0.11, m_bound=1.2, eta=0.5)
    assert [(z, rep) for z, _, rep in terms] == [(1, 0)]
    assert residual.max_integer_deviation() <= 0.33


def test_coset_rounding_audits(d8):
    h = next(s for s in subgroups(d8) if s.size == 4)
    f = GFunc.indicator(h)
    with pytest.raises(dc.DecomposeError):
        dc.coset_rounding(f, h, 0.2, m_bound=1.0, eta=0.5)  # eps >= 1/6
    k = next(s for s in subgroups(d8) if s.size == 2 and s.issubset(h))
    skew = GFunc.indicator(k)  # projection onto H has value 1/2: not aiv
    with pytest.raises(dc.DecomposeError):
        dc.coset_rounding(skew, h, 1e-3, m_bound=1.0, eta=0.5)


def test_find_level_subgroup_examples(d8):
    h = next(s for s in subgroups(d8) if s.size == 4)
    assert dc.find_level_subgroup(GFunc.indicator(h), 1e-3) == h
    x = next(i for i in range(8) if i not in h)
    assert dc.find_level_subgroup(GFunc.indicator(coset(d8, h, x)), 1e-3) == h
    # non-integer functions with no admissible averaging error out
    bad = GFunc(d8, [0.3, 0.7, 0.3, 0.7, 0.3, 0.7, 0.3, 0.7])
    with pytest.raises(dc.DecomposeError):
        dc.find_level_subgroup(bad, 0.2)
    # an unstructured indicator still admits the trivial subgroup (value 1)
    a = GSubset.from_indices(d8, [0, 1, 3])
    got = dc.find_level_subgroup(GFunc.indicator(a), 1e-3)
    assert got.size == 1


def test_decompose_single_subgroup(s3):
    h = next(s for s in subgroups(s3) if s.size == 3)
    deco = dc.idempotent_decompose(GFunc.indicator(h))
    assert len(deco.terms) == 1
    z, sub, rep = deco.terms[0]
    assert (z, sub) == (1, h) and rep in h
    assert deco.verify()


def test_decompose_union_matches_three_term_oracle(s3):
    hs = [s for s in subgroups(s3) if s.size == 2]
    h, k = hs[0], hs[1]
    union = GSubset(s3, h.mask | k.mask)
    f = GFunc.indicator(union)
    # the brute-force oracle certifies a <=3-term representation exists
    oracle = brute_three_term_decomposition(s3, subgroups(s3), f.values.real.astype(int))
    assert oracle is not None and len(oracle) <= 3
    deco = dc.idempotent_decompose(f)
    assert deco.verify()
    drops = [s["norm_before"] - s["norm_after"] for s in deco.steps]
    assert min(drops) >= 0.5 - 1e-6


def test_decompose_difference_exact(d8):
    h = next(s for s in subgroups(d8) if s.size == 4)
    k = next(s for s in subgroups(d8) if s.size == 2 and s.issubset(h))
    x = 3
    f = GFunc.indicator(coset(d8, h, x)) - GFunc.indicator(coset(d8, k, x))
    deco = dc.idempotent_decompose(f)
    assert deco.verify()
    assert all(s["norm_before"] - s["norm_after"] >= 0.5 - 1e-6 for s in deco.steps)


def test_decompose_zero_and_preconditions(s3):
    assert dc.idempotent_decompose(GFunc.zero(s3)).terms == []
    with pytest.raises(dc.DecomposeError):
        dc.idempotent_decompose(GFunc.constant(s3, 0.5))


def test_decompose_partial_on_failure(s3):
    # exhausting max_steps reports the partial decomposition
    h = next(s for s in subgroups(s3) if s.size == 3)
    f = GFunc.indicator(h) + GFunc.indicator(s3.singleton(1))
    with pytest.raises(dc.DecomposeError) as exc:
        dc.idempotent_decompose(f, max_steps=1)
    assert exc.value.partial is not None


def test_small_norm_coset_cases(d8, s3):
    h = next(s for s in subgroups(d8) if s.size == 4)
    a = GSubset.from_indices(d8, d8.mul[h.indices, 3])  # right coset H*3
    sub, x = dc.small_norm_coset_test(a)
    assert sub == h
    assert np.array_equal(np.sort(d8.mul[sub.indices, x]), a.indices)
    # coset minus a point jumps above the threshold
    removed = a - d8.singleton(int(a.indices[0]))
    assert dc.small_norm_coset_test(removed) is None
    # whole group
    sub, x = dc.small_norm_coset_test(s3.full_subset())
    assert sub.size == 6 and x == s3.identity


def test_dual_mass_cases(s3, rng):
    f = GFunc(s3, rng.normal(size=6) + 1j * rng.normal(size=6))
    assert abs(dc.dual_mass(f, s3.singleton(s3.identity)) - sp.a_norm(f)) < 1e-8
    # B = G with zero-mean f: only constant-vector components contribute
    f0 = f - GFunc.constant(s3, f.integral())
    basis = sp.fourier_basis(f0)
    want = float(
        sum(
            s * abs(np.mean(basis.vectors[:, i])) ** 2
            for i, s in enumerate(basis.sing_values)
        )
    )
    assert abs(dc.dual_mass(f0, s3.full_subset()) - want) < 1e-10
    b = GSubset.from_indices(s3, [0, 2, 4])
    assert dc.dual_mass(f, b) <= sp.a_norm(f) + 1e-8


def test_continuity_witness_cases(d8, rng):
    h = next(s for s in subgroups(d8) if s.size == 4)
    f = GFunc.indicator(h)
    got = dc.continuity_witness(f, h, nu=0.0)
    assert got is not None
    b, bp = got
    assert b == h and bp.issubset(h)
    # integer combination: a subgroup witness still exists at small nu
    k = next(s for s in subgroups(d8) if s.size == 2 and s.issubset(h))
    f2 = GFunc.indicator(h) + 2 * GFunc.indicator(k)
    got2 = dc.continuity_witness(f2, k, nu=1e-9)
    assert got2 is not None
    # unstructured target at tiny nu has no witness in the family
    f3 = GFunc(d8, rng.normal(size=8))
    assert dc.continuity_witness(f3, h, nu=1e-6) is None


def test_dense_small_doubling_subset_cases(d8):
    h = next(s for s in subgroups(d8) if s.size == 4)
    assert dc.dense_small_doubling_subset(h, 0.9) == h
    far = next(i for i in range(8) if i not in h)
    spiked = GSubset(d8, h.mask.copy())
    spiked = spiked | d8.singleton(far)
    got = dc.dense_small_doubling_subset(spiked, 0.1)
    assert got == h  # drops the far point
    g = build_group("cyclic:16")
    k = next(s for s in subgroups(g) if s.size == 4)
    union = GSubset(g, k.mask | np.roll(k.mask, 1))
    got = dc.dense_small_doubling_subset(union, 0.05)
    from agnorm.setstats import doubling

    assert doubling(got) <= 2.0
    with pytest.raises(Exception):
        dc.dense_small_doubling_subset(GSubset.from_indices(d8, [0, 1, 3]), 0.99)


@pytest.mark.parametrize("suite", ["small-norm-dichotomy", "decompose", "dual-mass",
                                   "spectral-collection", "chopup"])
def test_decompose_suites(suite, d8):
    rep = run_suite(suite, d8, seed=9, trials=20)
    assert rep["passed"], rep["failures"]
