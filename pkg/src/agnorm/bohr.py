"""Non-abelian Bohr sets from explicit unitary representations.

Bohr(gamma, delta) is the preimage of the operator-norm delta-ball around the
identity: {x : |gamma(x) - I|_op <= delta}.  The covering search replaces the
Haar integral over U(H) with seeded sampling of Haar-random center unitaries
plus greedy clustering; every returned set is re-verified against the exact
pairwise bound, and a singleton is always a valid fallback.
"""

from __future__ import annotations

import numpy as np

from .groups import Group, GroupError, GSubset

__all__ = [
    "UnitaryRep",
    "trivial_rep",
    "cyclic_character",
    "regular_rep",
    "direct_sum",
    "bohr_set",
    "haar_unitary",
    "unitary_cover_subset",
]


def _opnorm(m: np.ndarray) -> float:
    return float(np.linalg.norm(m, 2))


class UnitaryRep:
    """Homomorphism gamma: G -> U(d) stored as one d x d matrix per element."""

    __slots__ = ("group", "dim", "matrices")

    def __init__(self, group: Group, matrices, *, validate: bool = True):
        matrices = np.asarray(matrices, dtype=np.complex128)
        if matrices.shape[0] != group.order or matrices.ndim != 3 or (
            matrices.shape[1] != matrices.shape[2]
        ):
            raise GroupError("representation needs one square matrix per element")
        self.group = group
        self.dim = matrices.shape[1]
        self.matrices = matrices
        self.matrices.setflags(write=False)
        if validate:
            self.validate()

    def validate(self, unitary_tol: float = 1e-10, hom_tol: float = 1e-9) -> None:
        d = self.dim
        eye = np.eye(d)
        if np.max(np.abs(self.matrices[self.group.identity] - eye)) > unitary_tol:
            raise GroupError("gamma(identity) is not the identity matrix")
        gram = self.matrices @ self.matrices.conj().transpose(0, 2, 1)
        if np.max(np.abs(gram - eye)) > unitary_tol:
            raise GroupError("some gamma(x) is not unitary")
        mul = self.group.mul
        for x in range(self.group.order):
            prod = self.matrices[x] @ self.matrices
            if np.max(np.abs(prod - self.matrices[mul[x]])) > hom_tol:
                y = int(np.argmax(np.abs(prod - self.matrices[mul[x]]).reshape(self.group.order, -1).max(axis=1)))
                raise GroupError(f"homomorphism fails at ({x}, {y})")

    def __call__(self, x: int) -> np.ndarray:
        return self.matrices[x]

    def to_json_obj(self) -> dict:
        return {
            "group": self.group.spec,
            "dim": self.dim,
            "matrices": [
                [[[float(v.real), float(v.imag)] for v in row] for row in m]
                for m in self.matrices
            ],
        }

    @classmethod
    def from_json_obj(cls, obj: dict, group: Group | None = None) -> "UnitaryRep":
        from .groups import build_group

        if group is None:
            group = build_group(obj["group"])
        mats = np.array(
            [[[complex(v[0], v[1]) for v in row] for row in m] for m in obj["matrices"]]
        )
        return cls(group, mats)


def trivial_rep(group: Group, dim: int = 1) -> UnitaryRep:
    mats = np.broadcast_to(np.eye(dim), (group.order, dim, dim)).copy()
    return UnitaryRep(group, mats, validate=False)


def cyclic_character(group: Group, k: int) -> UnitaryRep:
    """x -> exp(2 pi i k x / n) on cyclic:n (element index = residue)."""
    n = group.order
    vals = np.exp(2j * np.pi * k * np.arange(n) / n)
    return UnitaryRep(group, vals.reshape(n, 1, 1))


def regular_rep(group: Group) -> UnitaryRep:
    """Right regular representation: rho_y v (x) = v(xy) as permutation matrices."""
    n = group.order
    mats = np.zeros((n, n, n))
    rows = np.arange(n)
    for y in range(n):
        mats[y, rows, group.mul[rows, y]] = 1.0
    return UnitaryRep(group, mats, validate=False)


def direct_sum(a: UnitaryRep, b: UnitaryRep) -> UnitaryRep:
    if a.group != b.group:
        raise GroupError("representations of different groups")
    n, da, db = a.group.order, a.dim, b.dim
    mats = np.zeros((n, da + db, da + db), dtype=np.complex128)
    mats[:, :da, :da] = a.matrices
    mats[:, da:, da:] = b.matrices
    return UnitaryRep(a.group, mats, validate=False)


def bohr_set(rep: UnitaryRep, delta: float) -> GSubset:
    """{x : |gamma(x) - I|_op <= delta}; symmetric, contains the identity.

    For unitary gamma(x) the true norm never exceeds 2, so values above 2 are
    SVD noise and are clamped; 1-dimensional representations use the exact
    scalar distance.
    """
    if not 0 <= delta <= 2:
        raise GroupError("Bohr radius must lie in [0, 2]")
    if rep.dim == 1:
        dist = np.abs(rep.matrices[:, 0, 0] - 1.0)
    else:
        eye = np.eye(rep.dim)
        dist = np.array([min(2.0, _opnorm(m - eye)) for m in rep.matrices])
    return GSubset(rep.group, dist <= delta)


def haar_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Gaussian with phase fix."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    phases = np.diagonal(r).copy()
    phases /= np.abs(phases)
    return q * phases


def _ball_members(b_idx, phi, center, delta_half, tol):
    out = []
    ch = center.conj().T
    for x in b_idx:
        if _opnorm(ch @ phi[x] - np.eye(phi.shape[1])) <= delta_half + tol:
            out.append(int(x))
    return out


def _pairwise_ok(members, phi, delta, tol=1e-9):
    for i, x in enumerate(members):
        xh = phi[x].conj().T
        for y in members[i + 1:]:
            if _opnorm(xh @ phi[y] - np.eye(phi.shape[1])) > delta + tol:
                return False
    return True


def unitary_cover_subset(
    b: GSubset,
    phi: np.ndarray,
    delta: float,
    samples: int = 32,
    seed: int = 0,
) -> GSubset:
    """Largest found B' inside B with |phi(x)^-1 phi(x') - I| <= delta pairwise.

    phi is an (n, d, d) array of unitaries (only entries over B are used).
    Search: greedy clusters centered at each phi(x), x in B, plus `samples`
    seeded Haar-random centers; the winner is verified exhaustively and a
    singleton is returned if everything else fails.
    """
    if not 0 < delta <= 2:
        raise GroupError("cover radius must lie in (0, 2]")
    phi = np.asarray(phi, dtype=np.complex128)
    if b.size == 0:
        raise GroupError("cannot cover an empty set")
    d = phi.shape[1]
    b_idx = [int(x) for x in b.indices]
    gram = phi[b_idx] @ phi[b_idx].conj().transpose(0, 2, 1)
    if np.max(np.abs(gram - np.eye(d))) > 1e-9:
        raise GroupError("phi values must be unitary on B")

    candidates: list[list[int]] = []
    for x in b_idx:
        candidates.append(_ball_members(b_idx, phi, phi[x], delta / 2, 0.0))
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        center = haar_unitary(rng, d)
        candidates.append(_ball_members(b_idx, phi, center, delta / 2, 0.0))
    candidates.sort(key=lambda m: (-len(m), m))
    for members in candidates:
        if members and _pairwise_ok(members, phi, delta):
            return GSubset.from_indices(b.group, members)
    return GSubset.from_indices(b.group, [b_idx[0]])
