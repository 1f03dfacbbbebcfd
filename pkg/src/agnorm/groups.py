"""Exact finite-group arithmetic backed by dense Cayley tables.

Elements are dense indices ``0..n-1``.  All subsets are boolean masks over
those indices, so set algebra and exhaustive enumeration stay cheap.  The
uniform Haar probability measure puts weight ``1/n`` on each element; every
norm and convolution elsewhere in the package is normalized against it.
"""

from __future__ import annotations

import os
import re
from functools import reduce
from pathlib import Path

import numpy as np

__all__ = [
    "GroupError",
    "Group",
    "GSubset",
    "build_group",
    "cyclic_group",
    "dihedral_group",
    "symmetric_group",
    "quaternion_group",
    "product_group",
    "load_table_file",
    "save_table_file",
    "subgroups",
    "generated_subgroup",
    "coset",
    "right_coset",
    "conjugate",
    "catalog_specs",
    "catalog",
    "export_catalog",
]

DEFAULT_ORDER_CAP = 4096
DEFAULT_ENUM_LIMIT = 64


def order_cap() -> int:
    """Hard cap on group order; dense spectral work needs full matrices."""
    return int(os.environ.get("AGNORM_CAP_N", DEFAULT_ORDER_CAP))


class GroupError(ValueError):
    pass


class Group:
    """Finite group as a Cayley table with precomputed inverses.

    The table ``mul`` has ``mul[a, b] = a*b``; ``inv[a]`` is the inverse and
    ``identity`` the index of the neutral element.  Instances are immutable
    after construction and safe to share across threads.
    """

    __slots__ = ("order", "mul", "inv", "identity", "labels", "spec", "_cache")

    def __init__(self, mul, labels=None, spec="table", *, validate=True, trusted=False):
        mul = np.ascontiguousarray(np.asarray(mul, dtype=np.int32))
        if mul.ndim != 2 or mul.shape[0] != mul.shape[1]:
            raise GroupError("Cayley table must be square")
        n = mul.shape[0]
        if n == 0:
            raise GroupError("group order must be positive")
        if n > order_cap():
            raise GroupError(f"group order {n} exceeds cap {order_cap()}")
        self.order = n
        self.mul = mul
        self.spec = spec
        self.labels = list(labels) if labels is not None else None
        if self.labels is not None and len(self.labels) != n:
            raise GroupError("label count does not match group order")
        self.identity = self._find_identity()
        self.inv = self._find_inverses()
        self._cache = {}
        if validate:
            self._validate(check_assoc=not trusted)
        self.mul.setflags(write=False)
        self.inv.setflags(write=False)

    # -- construction-time checks ------------------------------------------

    def _find_identity(self) -> int:
        n = self.order
        cols = np.arange(n, dtype=np.int32)
        for e in range(n):
            if np.array_equal(self.mul[e], cols) and np.array_equal(self.mul[:, e], cols):
                return e
        raise GroupError("table has no identity element")

    def _find_inverses(self) -> np.ndarray:
        n = self.order
        inv = np.full(n, -1, dtype=np.int32)
        rows, cols = np.nonzero(self.mul == self.identity)
        inv[rows] = cols
        if np.any(inv < 0):
            bad = int(np.nonzero(inv < 0)[0][0])
            raise GroupError(f"element {bad} has no inverse")
        return inv

    def _validate(self, check_assoc: bool) -> None:
        n = self.order
        mul = self.mul
        if mul.min() < 0 or mul.max() >= n:
            raise GroupError("table entries out of range")
        ref = np.arange(n, dtype=np.int32)
        for a in range(n):
            if not np.array_equal(np.sort(mul[a]), ref):
                raise GroupError(f"row {a} is not a permutation (Latin square fails)")
            if not np.array_equal(np.sort(mul[:, a]), ref):
                raise GroupError(f"column {a} is not a permutation (Latin square fails)")
        if np.any(mul[self.inv, ref] != self.identity):
            raise GroupError("inverse table inconsistent")
        if check_assoc:
            if n <= 256:
                for a in range(n):
                    left = mul[mul[a], :]
                    right = mul[a][mul]
                    if not np.array_equal(left, right):
                        b, c = map(int, np.argwhere(left != right)[0])
                        raise GroupError(
                            f"associativity fails at triple ({a}, {b}, {c}): "
                            f"({a}*{b})*{c} = {int(left[b, c])} but {a}*({b}*{c}) = {int(right[b, c])}"
                        )
            else:
                rng = np.random.default_rng(0)
                a, b, c = rng.integers(0, n, size=(3, 100_000), dtype=np.int64)
                left = mul[mul[a, b], c]
                right = mul[a, mul[b, c]]
                if np.any(left != right):
                    i = int(np.nonzero(left != right)[0][0])
                    raise GroupError(
                        f"associativity fails at triple ({int(a[i])}, {int(b[i])}, {int(c[i])})"
                    )

    # -- element arithmetic --------------------------------------------------

    def op(self, a: int, b: int) -> int:
        return int(self.mul[a, b])

    def inverse(self, a: int) -> int:
        return int(self.inv[a])

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.mul, self.mul.T))

    def label(self, a: int) -> str:
        return self.labels[a] if self.labels is not None else str(a)

    def __repr__(self) -> str:
        return f"Group({self.spec!r}, order={self.order})"

    def __eq__(self, other) -> bool:
        return self is other or (
            isinstance(other, Group)
            and self.order == other.order
            and np.array_equal(self.mul, other.mul)
        )

    def __hash__(self) -> int:
        return hash((self.order, self.mul.tobytes()))

    # -- subsets --------------------------------------------------------------

    def subset(self, elements) -> "GSubset":
        return GSubset.from_indices(self, elements)

    def empty_subset(self) -> "GSubset":
        return GSubset(self, np.zeros(self.order, dtype=bool))

    def full_subset(self) -> "GSubset":
        return GSubset(self, np.ones(self.order, dtype=bool))

    def singleton(self, a: int) -> "GSubset":
        return self.subset([a])


class GSubset:
    """Subset of a group as a boolean membership mask."""

    __slots__ = ("group", "mask")

    def __init__(self, group: Group, mask):
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (group.order,):
            raise GroupError("membership mask has wrong length")
        self.group = group
        self.mask = mask
        self.mask.setflags(write=False)

    @classmethod
    def from_indices(cls, group: Group, elements) -> "GSubset":
        mask = np.zeros(group.order, dtype=bool)
        idx = np.asarray(list(elements), dtype=np.int64)
        if idx.size:
            if idx.min() < 0 or idx.max() >= group.order:
                raise GroupError("element index out of range")
            mask[idx] = True
        return cls(group, mask)

    @property
    def size(self) -> int:
        return int(self.mask.sum())

    @property
    def indices(self) -> np.ndarray:
        return np.nonzero(self.mask)[0].astype(np.int32)

    def key(self) -> bytes:
        """Canonical hashable form (packed bitset)."""
        return np.packbits(self.mask).tobytes()

    def __len__(self) -> int:
        return self.size

    def __contains__(self, a: int) -> bool:
        return bool(self.mask[a])

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GSubset)
            and self.group == other.group
            and np.array_equal(self.mask, other.mask)
        )

    def __hash__(self) -> int:
        return hash((self.group.order, self.key()))

    def __or__(self, other: "GSubset") -> "GSubset":
        self._check(other)
        return GSubset(self.group, self.mask | other.mask)

    def __and__(self, other: "GSubset") -> "GSubset":
        self._check(other)
        return GSubset(self.group, self.mask & other.mask)

    def __sub__(self, other: "GSubset") -> "GSubset":
        self._check(other)
        return GSubset(self.group, self.mask & ~other.mask)

    def issubset(self, other: "GSubset") -> bool:
        self._check(other)
        return not np.any(self.mask & ~other.mask)

    def _check(self, other: "GSubset") -> None:
        if self.group != other.group:
            raise GroupError("subsets belong to different groups")

    def inverse(self) -> "GSubset":
        mask = np.zeros(self.group.order, dtype=bool)
        mask[self.group.inv[self.mask]] = True
        return GSubset(self.group, mask)

    # Derived flags; kept consistent with membership by construction.
    def is_symmetric(self) -> bool:
        return bool(np.array_equal(self.mask, self.mask[self.group.inv]))

    def contains_identity(self) -> bool:
        return bool(self.mask[self.group.identity])

    def measure(self) -> float:
        """Haar measure mu_G of the subset."""
        return self.size / self.group.order

    def __repr__(self) -> str:
        idx = self.indices
        shown = ",".join(map(str, idx[:12])) + (",..." if len(idx) > 12 else "")
        return f"GSubset(order={self.group.order}, size={self.size}, {{{shown}}})"


# -- catalog families ----------------------------------------------------------


def cyclic_group(n: int) -> Group:
    if n < 1:
        raise GroupError("cyclic group needs n >= 1")
    idx = np.arange(n, dtype=np.int32)
    mul = (idx[:, None] + idx[None, :]) % n
    return Group(mul, spec=f"cyclic:{n}", trusted=True)


def dihedral_group(n: int) -> Group:
    """Dihedral group of order n (n even >= 2): m rotations and m reflections.

    Element e*m + i encodes s^e r^i with r of order m = n/2.
    """
    if n < 2 or n % 2:
        raise GroupError("dihedral group needs even order n >= 2")
    m = n // 2
    eps = np.arange(n, dtype=np.int32) // m
    rot = np.arange(n, dtype=np.int32) % m
    # s^e1 r^i1 * s^e2 r^i2 = s^(e1+e2) r^(i1*(-1)^e2 + i2)
    e1, e2 = eps[:, None], eps[None, :]
    i1, i2 = rot[:, None], rot[None, :]
    sign = np.where(e2 == 1, -1, 1)
    mul = ((e1 + e2) % 2) * m + (i1 * sign + i2) % m
    return Group(mul.astype(np.int32), spec=f"dihedral:{n}", trusted=True)


def _permutations(k: int) -> list[tuple[int, ...]]:
    import itertools

    return list(itertools.permutations(range(k)))


def symmetric_group(k: int) -> Group:
    if k < 1:
        raise GroupError("symmetric group needs k >= 1")
    perms = _permutations(k)
    index = {p: i for i, p in enumerate(perms)}
    n = len(perms)
    mul = np.zeros((n, n), dtype=np.int32)
    for i, p in enumerate(perms):
        for j, q in enumerate(perms):
            mul[i, j] = index[tuple(p[q[x]] for x in range(k))]
    labels = ["".join(map(str, p)) for p in perms]
    return Group(mul, labels=labels, spec=f"symmetric:{k}", trusted=True)


def quaternion_group() -> Group:
    """Quaternion group of order 8: index 2a+s encodes (-1)^s * q_a, q in (1,i,j,k)."""
    table = {
        (0, 0): (0, 0), (0, 1): (1, 0), (0, 2): (2, 0), (0, 3): (3, 0),
        (1, 0): (1, 0), (1, 1): (0, 1), (1, 2): (3, 0), (1, 3): (2, 1),
        (2, 0): (2, 0), (2, 1): (3, 1), (2, 2): (0, 1), (2, 3): (1, 0),
        (3, 0): (3, 0), (3, 1): (2, 0), (3, 2): (1, 1), (3, 3): (0, 1),
    }
    n = 8
    mul = np.zeros((n, n), dtype=np.int32)
    for a in range(4):
        for sa in range(2):
            for b in range(4):
                for sb in range(2):
                    c, sc = table[(a, b)]
                    mul[2 * a + sa, 2 * b + sb] = 2 * c + (sa + sb + sc) % 2
    labels = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]
    return Group(mul, labels=labels, spec="quaternion:8")


def product_group(g1: Group, g2: Group) -> Group:
    n1, n2 = g1.order, g2.order
    a1 = np.arange(n1 * n2, dtype=np.int64) // n2
    a2 = np.arange(n1 * n2, dtype=np.int64) % n2
    mul = (g1.mul[np.ix_(a1, a1)].astype(np.int64) * n2) + g2.mul[np.ix_(a2, a2)]
    return Group(mul.astype(np.int32), spec=f"{g1.spec}x{g2.spec}", trusted=True)


# -- Cayley table files ----------------------------------------------------------
#
# Format: first line n, then n lines of n space-separated indices, then an
# optional single line of n whitespace-separated labels.


def save_table_file(group: Group, path) -> None:
    path = Path(path)
    lines = [str(group.order)]
    for row in group.mul:
        lines.append(" ".join(map(str, row.tolist())))
    if group.labels is not None:
        lines.append(" ".join(group.labels))
    path.write_text("\n".join(lines) + "\n")


def load_table_file(path) -> Group:
    path = Path(path)
    raw = [ln for ln in path.read_text().splitlines() if ln.strip()]
    if not raw:
        raise GroupError(f"empty table file: {path}")
    try:
        n = int(raw[0])
    except ValueError:
        raise GroupError(f"bad order line in {path}") from None
    if len(raw) < n + 1:
        raise GroupError(f"table file {path} truncated: expected {n} rows")
    mul = np.array([[int(v) for v in raw[1 + i].split()] for i in range(n)], dtype=np.int32)
    labels = None
    if len(raw) > n + 1:
        labels = raw[n + 1].split()
        if len(labels) != n:
            raise GroupError(f"label line in {path} has {len(labels)} entries, expected {n}")
    return Group(mul, labels=labels, spec=f"@{path}")


_SPEC_RE = re.compile(r"^([a-z]+):(\d+)$")


def build_group(spec: str) -> Group:
    """Build a group from a spec string.

    Accepts catalog families (``cyclic:n``, ``dihedral:n``, ``symmetric:n``,
    ``quaternion:8``, ``trivial``), products joined with ``x``
    (``cyclic:2xcyclic:4``), and ``@path`` for explicit Cayley table files.
    """
    spec = spec.strip()
    if spec.startswith("@"):
        return load_table_file(spec[1:])
    parts = spec.split("x")
    if len(parts) > 1:
        return reduce(product_group, (build_group(p) for p in parts))
    if spec == "trivial":
        return cyclic_group(1)
    m = _SPEC_RE.match(spec)
    if not m:
        raise GroupError(f"malformed group spec: {spec!r}")
    family, n = m.group(1), int(m.group(2))
    if family == "cyclic":
        return cyclic_group(n)
    if family == "dihedral":
        return dihedral_group(n)
    if family == "symmetric":
        g = symmetric_group(n)
        return g
    if family == "quaternion":
        if n != 8:
            raise GroupError("only quaternion:8 is in the catalog")
        return quaternion_group()
    raise GroupError(f"unknown group family: {family!r}")


def catalog_specs(max_order: int) -> list[str]:
    """Canonical catalog enumeration up to a given order, without duplicates."""
    specs = []
    for n in range(1, max_order + 1):
        specs.append(f"cyclic:{n}")
    for n in range(4, max_order + 1, 2):
        specs.append(f"dihedral:{n}")
    k, fact = 3, 6
    while fact <= max_order:
        specs.append(f"symmetric:{k}")
        k += 1
        fact *= k
    if max_order >= 8:
        specs.append("quaternion:8")
    return specs


def catalog(max_order: int) -> list[Group]:
    return [build_group(s) for s in catalog_specs(max_order)]


def export_catalog(directory, max_order: int = 24) -> list[Path]:
    """Build step: write the catalog as explicit Cayley-table files."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for spec in catalog_specs(max_order):
        g = build_group(spec)
        path = directory / (spec.replace(":", "_") + ".tbl")
        save_table_file(g, path)
        written.append(path)
    return written


# -- subgroup machinery ----------------------------------------------------------


def generated_subgroup(group: Group, seed: GSubset | None) -> GSubset:
    """Smallest subgroup containing the seed set (closure under product/inverse)."""
    mask = np.zeros(group.order, dtype=bool)
    mask[group.identity] = True
    if seed is not None:
        if seed.group != group:
            raise GroupError("seed subset belongs to a different group")
        mask |= seed.mask
        mask[group.inv[mask]] = True
    size = int(mask.sum())
    while True:
        idx = np.nonzero(mask)[0]
        prods = group.mul[np.ix_(idx, idx)]
        mask[prods.ravel()] = True
        new_size = int(mask.sum())
        if new_size == size:
            return GSubset(group, mask)
        size = new_size


def is_subgroup(subset: GSubset) -> bool:
    if not subset.contains_identity():
        return False
    idx = subset.indices
    if not np.all(subset.mask[subset.group.inv[idx]]):
        return False
    prods = subset.group.mul[np.ix_(idx, idx)]
    return bool(np.all(subset.mask[prods.ravel()]))


def subgroups(group: Group, limit: int | None = None) -> list[GSubset]:
    """All subgroups, sorted by (size, membership).

    Enumerates cyclic subgroups and closes the family under pairwise joins;
    every subgroup is an iterated join of cyclic ones, so the scan is complete
    without a 2^n subset sweep.
    """
    limit = DEFAULT_ENUM_LIMIT if limit is None else limit
    if group.order > limit:
        raise GroupError(
            f"subgroup enumeration limit exceeded: order {group.order} > {limit}"
        )
    cached = group._cache.get(("subgroups", limit))
    if cached is not None:
        return list(cached)

    seen: dict[bytes, GSubset] = {}

    def add(sub: GSubset) -> bool:
        k = sub.key()
        if k in seen:
            return False
        seen[k] = sub
        return True

    add(GSubset.from_indices(group, [group.identity]))
    cyclics = []
    cyclic_keys = set()
    for g in range(group.order):
        sub = generated_subgroup(group, group.singleton(g))
        add(sub)
        if sub.key() not in cyclic_keys:
            cyclic_keys.add(sub.key())
            cyclics.append(sub)
    worklist = list(seen.values())
    while worklist:
        current = worklist.pop()
        for cyc in cyclics:
            if cyc.issubset(current):
                continue
            joined = generated_subgroup(group, current | cyc)
            if add(joined):
                worklist.append(joined)
    out = sorted(seen.values(), key=lambda s: (s.size, s.key()))
    group._cache[("subgroups", limit)] = tuple(out)
    return out


def coset(group: Group, sub: GSubset, x: int) -> GSubset:
    """Left coset xH of a subgroup H."""
    if not is_subgroup(sub):
        raise GroupError("coset requires a subgroup")
    return GSubset.from_indices(group, group.mul[x, sub.indices])


def right_coset(group: Group, sub: GSubset, x: int) -> GSubset:
    if not is_subgroup(sub):
        raise GroupError("coset requires a subgroup")
    return GSubset.from_indices(group, group.mul[sub.indices, x])


def conjugate(group: Group, subset: GSubset, y: int) -> GSubset:
    """Conjugate y A y^-1; a bijection, so |yAy^-1| = |A|."""
    idx = subset.indices
    out = group.mul[group.mul[y, idx], group.inv[y]]
    return GSubset.from_indices(group, out)


def left_coset_ids(group: Group, sub: GSubset) -> np.ndarray:
    """Map each x to a dense id of its left coset xH (cached per subgroup)."""
    key = ("coset_ids", sub.key())
    cached = group._cache.get(key)
    if cached is not None:
        return cached
    idx = sub.indices
    if idx.size == 0 or not is_subgroup(sub):
        raise GroupError("coset ids require a subgroup")
    reps = group.mul[:, idx].min(axis=1)
    _, ids = np.unique(reps, return_inverse=True)
    ids = ids.astype(np.int32)
    ids.setflags(write=False)
    group._cache[key] = ids
    return ids
