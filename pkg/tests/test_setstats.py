from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as hst

from agnorm.groups import GroupError, GSubset, build_group, right_coset, subgroups
from agnorm import setstats as st
from agnorm.verify import run_suite

from oracles import brute_energy, brute_product_set, grid_scan_threshold


def test_product_and_power_examples(s3):
    h = next(s for s in subgroups(s3) if s.size == 3)
    assert st.product_set(h, h) == h
    c5 = build_group("cyclic:5")
    a = c5.subset([0, 1])
    assert st.power_set(a, 2).indices.tolist() == [0, 1, 2]
    assert st.doubling(a) == 1.5
    assert 0 in st.product_set(a, st.inverse_set(a))


def test_product_set_matches_brute(d8, rng):
    for _ in range(25):
        a = GSubset.from_indices(d8, rng.choice(8, size=int(rng.integers(1, 5)), replace=False))
        b = GSubset.from_indices(d8, rng.choice(8, size=int(rng.integers(1, 5)), replace=False))
        got = st.product_set(a, b).indices.tolist()
        assert got == brute_product_set(d8, a.indices.tolist(), b.indices.tolist())


def test_energy_examples(d8, q8):
    for g in (d8, q8):
        for sub in subgroups(g):
            want = (sub.size / g.order) ** 3
            assert abs(st.energy(sub) - want) < 1e-15
            assert abs(st.energy(sub) - brute_energy(g, sub.indices.tolist())) < 1e-12
    ident = d8.singleton(d8.identity)
    assert abs(st.energy(ident) - brute_energy(d8, [d8.identity])) < 1e-15


def test_energy_matches_brute_random(s3, rng):
    for _ in range(15):
        a = GSubset.from_indices(s3, rng.choice(6, size=int(rng.integers(1, 6)), replace=False))
        assert abs(st.energy(a) - brute_energy(s3, a.indices.tolist())) < 1e-12


def test_symmetry_set_of_subgroup(d8):
    for sub in subgroups(d8):
        for j in range(1, 13):
            assert st.symmetry_set(sub, Fraction(j, 12)) == sub


def test_symmetry_set_ties_included():
    c4 = build_group("cyclic:4")
    a = c4.subset([0, 1])
    # overlaps: x=0 -> 2, x=1,3 -> 1, x=2 -> 0; at eta=1/2 the tie x=+-1 is in
    s = st.symmetry_set(a, Fraction(1, 2))
    assert s.indices.tolist() == [0, 1, 3]


def test_symmetry_set_laws_suites(s3):
    for name in ("sym-laws", "sym-size", "approx-projection", "kneser"):
        rep = run_suite(name, s3, seed=3)
        assert rep["passed"], rep["failures"]


def test_symmetry_parameter_validation(s3):
    a = s3.subset([0, 1])
    with pytest.raises(GroupError):
        st.symmetry_set(a, 0)
    with pytest.raises(GroupError):
        st.symmetry_set(a, 1.5)
    with pytest.raises(GroupError):
        st.symmetry_set(s3.empty_subset(), Fraction(1, 2))


@given(hst.integers(3, 10), hst.integers(1, 11), hst.integers(1, 11))
@settings(max_examples=60, deadline=None)
def test_sym_nesting_property(n, j1, j2):
    g = build_group(f"cyclic:{n}")
    a = g.subset(sorted({0, 1, n // 2, n - 1}))
    lo, hi = min(j1, j2), max(j1, j2)
    assert st.symmetry_set(a, Fraction(hi, 12)).issubset(st.symmetry_set(a, Fraction(lo, 12)))


def test_regular_threshold_subgroup(d8):
    sub = next(s for s in subgroups(d8) if s.size == 4)
    cp, ratio = st.sym_regular_threshold(sub, 1.0, 0.25)
    assert 0.25 < cp <= 0.5
    assert ratio == 0.0


def test_regular_threshold_two_cosets():
    g = build_group("cyclic:16")
    h = next(s for s in subgroups(g) if s.size == 4)
    a = GSubset(g, h.mask | np.roll(h.mask, 1))
    c = float(1 - st.energy_deficit(a))
    cp, ratio = st.sym_regular_threshold(a, c, 0.25)
    assert ratio == 0.0  # size plateau: overlap counts take few distinct values


def test_regular_threshold_matches_grid_oracle(rng):
    g = build_group("cyclic:32")
    for _ in range(10):
        a = GSubset(g, rng.random(32) < 0.6)
        if a.size == 0 or not a.contains_identity():
            continue
        c = float(1 - st.energy_deficit(a))
        cp, ratio = st.sym_regular_threshold(a, c, 0.2)
        oracle = grid_scan_threshold(st.overlap_counts(a), a.size, c, 0.2)
        assert ratio <= oracle + 1e-12


def test_regular_threshold_hypothesis_audit(s3):
    a = s3.subset([0, 1, 3])
    with pytest.raises(GroupError):
        st.sym_regular_threshold(a, 1.0, 0.1)  # random-ish set has deficit > 0


def test_small_squaring_subgroup(d8):
    for sub in subgroups(d8):
        assert st.small_squaring_subgroup(sub) == sub
    bad = d8.subset([0, 1, 4])
    with pytest.raises(GroupError):
        st.small_squaring_subgroup(bad)
