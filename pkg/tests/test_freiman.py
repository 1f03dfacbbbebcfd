from fractions import Fraction

import numpy as np
import pytest

from agnorm.groups import GSubset, build_group, right_coset, subgroups
from agnorm import freiman as fr
from agnorm.setstats import doubling, power_set, product_set, symmetry_set

from oracles import brute_energy


def interval(group, radius):
    n = group.order
    return GSubset.from_indices(group, [i % n for i in range(-radius, radius + 1)])


def two_coset_union(group, sub, shift):
    return GSubset(group, sub.mask | np.roll(sub.mask, shift))


def test_witness_subgroup(d8):
    h = next(s for s in subgroups(d8) if s.size == 4)
    w, size = fr.sym_witness_search(h, Fraction(1, 6), budget=8, seed=0)
    assert symmetry_set(product_set(w, h), Fraction(5, 6)) == h
    assert size == h.size / d8.order


def test_witness_coset_singleton_scan(d8):
    h = next(s for s in subgroups(d8) if s.size == 4)
    a = right_coset(d8, h, 1)
    # oracle: exhaustive over singletons
    best = 0
    for x in a.indices:
        s = symmetry_set(product_set(GSubset.from_indices(d8, [int(x)]), a), Fraction(5, 6))
        best = max(best, s.size)
    assert best == h.size
    _, size = fr.sym_witness_search(a, Fraction(1, 6), budget=8, seed=0)
    assert size >= best / d8.order


def test_witness_interval_beats_singletons():
    g = build_group("cyclic:64")
    a = interval(g, 4)
    singleton_best = 0
    for x in a.indices:
        s = symmetry_set(product_set(g.singleton(int(x)), a), Fraction(1, 2))
        singleton_best = max(singleton_best, s.size)
    _, size = fr.sym_witness_search(a, Fraction(1, 2), budget=16, seed=0)
    assert size * g.order >= singleton_best


def test_fournier_subgroup_instances(d8):
    for sub in subgroups(d8):
        if sub.size < 2:
            continue
        h, x = fr.fournier_subgroup(sub, Fraction(1, 20))
        assert h == sub
        overlap = np.count_nonzero(sub.mask[d8.mul[h.indices, x]])
        assert overlap == h.size
    # coset instance
    big = next(s for s in subgroups(d8) if s.size == 4)
    a = right_coset(d8, big, 1)
    h, x = fr.fournier_subgroup(a, Fraction(1, 20))
    assert h == big
    assert np.count_nonzero(a.mask[d8.mul[h.indices, x]]) == h.size


def test_fournier_deleted_point_fails_precondition():
    # A = H minus a point has exact energy deficit c = 42/343, so the stated
    # hypothesis 12c <= eta < 1/12 is unsatisfiable (see decisions ledger);
    # the audited error path is the actual behavior.
    g = build_group("dihedral:16")
    h = next(s for s in subgroups(g) if s.size == 8)
    removed = int(h.indices[1])
    a = h - g.singleton(removed)
    from agnorm.setstats import energy_deficit

    assert energy_deficit(a) == Fraction(42, 343)
    with pytest.raises(fr.StageError) as exc:
        fr.fournier_subgroup(a, Fraction(1, 15))
    assert exc.value.stage == "fournier-precondition"


def test_doubling_to_tripling_instances(d8):
    h = next(s for s in subgroups(d8) if s.size == 4)
    res = fr.doubling_to_tripling(h, budget=8, seed=0)
    assert res.subset == h
    assert res.tripling == 1.0
    # coset
    a = right_coset(d8, h, 1)
    res = fr.doubling_to_tripling(a, budget=8, seed=0)
    assert res.tripling == 1.0
    assert res.audits["translate_inside_A"]


def test_doubling_to_tripling_two_cosets():
    g = build_group("cyclic:64")
    h = next(s for s in subgroups(g) if s.size == 16)
    a = two_coset_union(g, h, 1)
    res = fr.doubling_to_tripling(a, budget=8, seed=0)
    assert res.tripling <= 2 * doubling(a) ** 2
    assert res.audits["translate_inside_A"]


def test_weak_freiman_subgroup(d8):
    h = next(s for s in subgroups(d8) if s.size == 4)
    res = fr.weak_freiman(h, r=1, eps=0.5, budget=8, seed=0)
    assert res.pair.ground == h
    assert res.pair.epsilon() == 0
    assert res.pair.thickness() == 1


def test_weak_freiman_interval():
    g = build_group("cyclic:128")
    a = interval(g, 6)
    res = fr.weak_freiman(a, r=1, eps=0.5, budget=16, seed=0)
    assert res.report["valid"]
    assert float(res.pair.epsilon()) <= 0.5
    assert res.pair.ground.issubset(power_set(a, 4))


def test_weak_freiman_requires_symmetry(d8):
    a = GSubset.from_indices(d8, [0, 1])  # r s^0 ... not symmetric
    if a.is_symmetric():
        a = GSubset.from_indices(d8, [0, 1, 2])
    with pytest.raises(fr.StageError):
        fr.weak_freiman(a, r=1, eps=0.5)


def test_freiman_correlation_subgroup(d8):
    h = next(s for s in subgroups(d8) if s.size == 4)
    res = fr.freiman_correlation(h, r=1, eps=0.5, budget=8, seed=0)
    assert res.sup == 1.0


def test_freiman_correlation_coset_union_oracle():
    g = build_group("dihedral:16")
    h = next(s for s in subgroups(g) if s.size == 8 and 1 in s)  # rotations
    a = GSubset(g, h.mask.copy())
    a = GSubset(g, a.mask | np.array([x in {8, 9} for x in range(16)]))
    res = fr.freiman_correlation(a, r=1, eps=0.5, budget=8, seed=0)
    b = res.pair.ground
    # oracle: direct maximization of mu(A intersect xB^-1)/mu(B)
    bi = b.inverse().indices
    want = max(
        int(np.count_nonzero(a.mask[g.mul[x, bi]])) for x in range(16)
    ) / b.size
    assert abs(res.sup - want) < 1e-12
    assert res.sup > 0


def test_freiman_correlation_interval_monotone():
    g = build_group("cyclic:256")
    small, large = interval(g, 6), interval(g, 8)
    res = fr.freiman_correlation(small, r=1, eps=0.5, budget=8, seed=0)
    b = res.pair.ground
    bi = b.inverse().indices
    def sup_against(a):
        return max(int(np.count_nonzero(a.mask[g.mul[x, bi]])) for x in range(256)) / b.size
    assert sup_against(large) >= sup_against(small) - 1e-12


def test_pair_system_subgroup(d8):
    h = next(s for s in subgroups(d8) if s.size == 4)
    res = fr.pair_system(h, lambda c: 1, lambda c: 0.5, depth=2, budget=8, seed=0)
    assert all(level == h for level in res.levels)
    assert all(rep["valid"] for rep in res.pair_reports.values())


def test_pair_system_interval_depths():
    g = build_group("cyclic:256")
    a = interval(g, 8)
    one = fr.pair_system(a, lambda c: 1, lambda c: 0.5, depth=1, budget=8, seed=0)
    assert one.levels[0].issubset(power_set(a, 4))
    two = fr.pair_system(a, lambda c: 1, lambda c: 0.5, depth=2, budget=8, seed=0)
    assert all(rep["valid"] for rep in two.pair_reports.values())
    for lo, hi in zip(two.levels[1:], two.levels):
        assert lo.issubset(hi)
    assert two.levels[0].issubset(power_set(a, 4))
    assert set(two.pair_reports) == {(0, 1), (0, 2), (1, 2)}


def test_pair_system_depth_cap(d8):
    h = next(s for s in subgroups(d8) if s.size == 4)
    with pytest.raises(Exception):
        fr.pair_system(h, lambda c: 1, lambda c: 0.5, depth=9)
