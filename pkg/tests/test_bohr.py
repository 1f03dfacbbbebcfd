import numpy as np
import pytest

from agnorm.bohr import (
    UnitaryRep,
    bohr_set,
    cyclic_character,
    direct_sum,
    haar_unitary,
    regular_rep,
    trivial_rep,
    unitary_cover_subset,
)
from agnorm.groups import GroupError, GSubset, build_group
from agnorm.verify import run_suite

from oracles import arc_bin_lower_bound


def test_rep_validation(s3):
    rep = regular_rep(s3)
    rep.validate()
    bad = rep.matrices.copy()
    bad[1] = np.eye(6) * 1.5
    with pytest.raises(GroupError):
        UnitaryRep(s3, bad)


def test_rep_json_roundtrip(c12):
    rep = cyclic_character(c12, 5)
    back = UnitaryRep.from_json_obj(rep.to_json_obj())
    assert np.max(np.abs(back.matrices - rep.matrices)) < 1e-15


def test_bohr_trivial_and_full(c12):
    assert bohr_set(trivial_rep(c12), 0.0).size == 12
    assert bohr_set(regular_rep(c12), 2.0).size == 12
    with pytest.raises(GroupError):
        bohr_set(trivial_rep(c12), 2.5)


def test_bohr_cyclic_character_example(c12):
    rep = cyclic_character(c12, 1)
    # radius at the first nonzero character value; a 1e-9 relative nudge keeps
    # the mathematical tie at x = +-1 robust against last-ulp float noise
    delta = float(np.abs(np.exp(2j * np.pi / 12) - 1)) * (1 + 1e-9)
    got = bohr_set(rep, delta)
    # oracle: member-by-member scalar arithmetic
    members = [x for x in range(12) if abs(np.exp(2j * np.pi * x / 12) - 1) <= delta]
    assert got.indices.tolist() == members == [0, 1, 11]


def test_bohr_monotone(c12, rng):
    rep = direct_sum(cyclic_character(c12, 1), cyclic_character(c12, 5))
    deltas = sorted(rng.uniform(0, 2, size=6))
    sets = [bohr_set(rep, float(d)) for d in deltas]
    for small, big in zip(sets, sets[1:]):
        assert small.issubset(big)
    for s in sets:
        assert s.is_symmetric() and s.contains_identity()


def test_bohr_regular_rep_gap(d8):
    rep = regular_rep(d8)
    gap = min(
        np.linalg.norm(rep.matrices[y] - np.eye(8), 2)
        for y in range(1, 8)
    )
    tiny = bohr_set(rep, gap * 0.9)
    assert tiny.indices.tolist() == [d8.identity]


def test_cover_constant_phi(d8):
    b = GSubset.from_indices(d8, [0, 2, 3, 5])
    phi = np.stack([np.eye(2, dtype=complex)] * 8)
    got = unitary_cover_subset(b, phi, 0.3, samples=4, seed=0)
    assert got == b


def test_cover_separated_singleton(c12):
    b = GSubset.from_indices(c12, [0, 3, 6, 9])
    phi = np.stack([np.eye(1, dtype=complex)] * 12)
    for i, x in enumerate(b.indices):
        phi[int(x)] = np.exp(2j * np.pi * i / 4) * np.eye(1)
    got = unitary_cover_subset(b, phi, 0.2, samples=8, seed=0)
    assert got.size == 1


def test_cover_matches_arc_oracle():
    g = build_group("cyclic:64")
    b = g.full_subset()
    angles = 2 * np.pi * np.arange(64) / 64
    phi = np.exp(1j * angles).reshape(64, 1, 1)
    delta = 0.5
    got = unitary_cover_subset(b, phi, delta, samples=16, seed=1)
    # exact pairwise verification
    idx = got.indices
    for i in idx:
        for j in idx:
            assert abs(np.exp(1j * angles[i]).conj() * np.exp(1j * angles[j]) - 1) <= delta + 1e-9
    assert got.size >= arc_bin_lower_bound(angles, delta)


def test_bohr_suite(c12):
    rep = run_suite("bohr", c12, seed=4, trials=6)
    assert rep["passed"], rep["failures"]
