"""Multiplicative pairs and the Fourier analysis relative to them.

A pair holds a ground set B, a perturbation set B', and sandwich witnesses
B- and B+ with  B'^r B- B'^r inside B  and  B'^r B B'^r inside B+  (exact
bitset checks).  Closure is eps = mu(B+ \\ B-)/mu(B), thickness c =
mu(B')/mu(B), both exact rationals.  Width r=None marks exact pairs
(subgroup-like) validated for every r up to EXACT_WIDTH_CAP.

The local convolution operator for f supported on B' acts on L^2(mu_B) as
v -> ((f dmu_{B'}) * v)|_B, stored over the elements of B as the matrix

    M[x, u] = f(x u^-1) [x u^-1 in B'] / |B'|     (x, u in B).

As in the global layer, |B|-normalized inner products make the coordinate
map an isometry, so a standard SVD of M yields the local singular values.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .gfunc import GFunc
from .groups import Group, GroupError, GSubset, is_subgroup
from .setstats import power_set, product_set
from .spectral import NOISE_FLOOR, _canonicalize_svd, convolve

__all__ = [
    "PairError",
    "EXACT_WIDTH_CAP",
    "MultiplicativePair",
    "validate_pair",
    "subgroup_pair",
    "coset_union_pair",
    "subpair",
    "conjugate_pair",
    "pair_from_product_set",
    "pair_from_growth",
    "approx_haar_defect",
    "LocalOp",
    "local_operator",
    "LocalBasis",
    "local_fourier_basis",
    "SpectrumSlice",
    "spectrum",
    "regular_delta",
    "translation_operator",
    "nearest_unitary",
    "normalize_pair",
]

EXACT_WIDTH_CAP = 8


class PairError(ValueError):
    pass


class MultiplicativePair:
    """(B, B') with sandwich sets B+, B- and width r (None = exact, capped)."""

    __slots__ = ("ground", "perturb", "upper", "lower", "width_r", "_cache")

    def __init__(self, ground, perturb, upper, lower, width_r):
        for s in (ground, perturb, upper, lower):
            if not isinstance(s, GSubset):
                raise PairError("pair components must be GSubsets")
            ground._check(s)
        if width_r is not None and (not isinstance(width_r, int) or width_r < 1):
            raise PairError("width r must be a positive integer or None for exact pairs")
        self.ground = ground
        self.perturb = perturb
        self.upper = upper
        self.lower = lower
        self.width_r = width_r
        self._cache = {}

    @property
    def group(self) -> Group:
        return self.ground.group

    def effective_r(self) -> int:
        return EXACT_WIDTH_CAP if self.width_r is None else self.width_r

    def perturb_power(self) -> GSubset:
        """B'^r (r capped for exact pairs)."""
        got = self._cache.get("ppow")
        if got is None:
            got = power_set(self.perturb, self.effective_r())
            self._cache["ppow"] = got
        return got

    def epsilon(self) -> Fraction:
        """Closure mu(B+ \\ B-)/mu(B), exact."""
        if self.ground.size == 0:
            raise PairError("pair with empty ground set")
        return Fraction((self.upper - self.lower).size, self.ground.size)

    def thickness(self) -> Fraction:
        """mu(B')/mu(B), exact."""
        if self.ground.size == 0:
            raise PairError("pair with empty ground set")
        return Fraction(self.perturb.size, self.ground.size)

    def __repr__(self) -> str:
        r = "inf" if self.width_r is None else self.width_r
        return (
            f"MultiplicativePair(|B|={self.ground.size}, |B'|={self.perturb.size}, "
            f"|B+|={self.upper.size}, |B-|={self.lower.size}, r={r})"
        )


def _sandwich_holds(p: MultiplicativePair, r: int) -> tuple[bool, bool]:
    br = power_set(p.perturb, r)
    inner = product_set(product_set(br, p.lower), br)
    outer = product_set(product_set(br, p.ground), br)
    return inner.issubset(p.ground), outer.issubset(p.upper)


def validate_pair(p: MultiplicativePair) -> dict:
    """Exact audit of the pair axioms; failures are report entries, not errors."""
    failures = []
    for name, s in (("ground", p.ground), ("perturb", p.perturb),
                    ("upper", p.upper), ("lower", p.lower)):
        if s.size == 0:
            failures.append(f"{name} set is empty")
            continue
        if not s.is_symmetric():
            failures.append(f"{name} set is not symmetric")
        if not s.contains_identity():
            failures.append(f"{name} set does not contain the identity")
    valid_r = 0
    if not failures:
        r_target = p.effective_r()
        for r in range(1, r_target + 1):
            low_ok, up_ok = _sandwich_holds(p, r)
            if low_ok and up_ok:
                valid_r = r
            else:
                if not low_ok:
                    failures.append(f"B'^{r} B- B'^{r} is not contained in B")
                if not up_ok:
                    failures.append(f"B'^{r} B B'^{r} is not contained in B+")
                break
    report = {
        "valid": not failures,
        "valid_r": valid_r,
        "requested_r": "inf" if p.width_r is None else p.width_r,
        "epsilon": p.epsilon() if p.ground.size else None,
        "thickness": p.thickness() if p.ground.size else None,
        "failures": failures,
    }
    return report


# -- constructors (the standard example families) -------------------------------


def subgroup_pair(sub: GSubset) -> MultiplicativePair:
    """(H, H, H, H): 0-closed, 1-thick, exact."""
    if not is_subgroup(sub):
        raise PairError("subgroup pair needs a subgroup")
    return MultiplicativePair(sub, sub, sub, sub, None)


def coset_union_pair(sub: GSubset, norm_nbhd: GSubset) -> MultiplicativePair:
    """(AH, H) for A a symmetric identity neighborhood normalizing H: 0-closed, exact."""
    if not is_subgroup(sub):
        raise PairError("coset union pair needs a subgroup")
    if not norm_nbhd.is_symmetric() or not norm_nbhd.contains_identity():
        raise PairError("normalizing set must be a symmetric identity neighborhood")
    g = sub.group
    hi = sub.indices
    for a in norm_nbhd.indices:
        left = np.sort(g.mul[a, hi])
        right = np.sort(g.mul[hi, a])
        if not np.array_equal(left, right):
            raise PairError(f"element {int(a)} does not normalize the subgroup")
    ah = product_set(norm_nbhd, sub)
    return MultiplicativePair(ah, sub, ah, ah, None)


def subpair(p: MultiplicativePair, small: GSubset, k: int) -> MultiplicativePair:
    """(B, B''^k) for B'' inside B': width floor(r/k), same sandwich sets."""
    if not small.issubset(p.perturb):
        raise PairError("subpair perturbation must sit inside the original one")
    if not small.is_symmetric() or not small.contains_identity():
        raise PairError("subpair perturbation must be a symmetric identity neighborhood")
    if k < 1:
        raise PairError("subpair power must be >= 1")
    if p.width_r is None:
        new_r = None
    else:
        new_r = p.width_r // k
        if new_r < 1:
            raise PairError(f"width collapses: floor({p.width_r}/{k}) < 1")
    return MultiplicativePair(p.ground, power_set(small, k), p.upper, p.lower, new_r)


def conjugate_pair(p: MultiplicativePair, y: int) -> MultiplicativePair:
    from .groups import conjugate

    g = p.group
    return MultiplicativePair(
        conjugate(g, p.ground, y),
        conjugate(g, p.perturb, y),
        conjugate(g, p.upper, y),
        conjugate(g, p.lower, y),
        p.width_r,
    )


def pair_from_product_set(a: GSubset, r: int) -> MultiplicativePair:
    """(A^{2r}, A, A^{4r}, {identity}) for a symmetric identity neighborhood A."""
    if not a.is_symmetric() or not a.contains_identity():
        raise PairError("need a symmetric neighborhood of the identity")
    if r < 1:
        raise PairError("width r must be >= 1")
    ident = a.group.singleton(a.group.identity)
    return MultiplicativePair(power_set(a, 2 * r), a, power_set(a, 4 * r), ident, r)


def pair_from_growth(a: GSubset, r: int, eps: float) -> MultiplicativePair:
    """(A^n, A, A^{n+2r}, A^{n-2r}) at the first n with the pigeonhole inequality.

    Scans n = 2r, 2r+1, ... until mu(A^{n+2r}) <= (1+eps) mu(A^{n-2r});
    termination is guaranteed because powers stabilize at <A>.
    """
    if not a.is_symmetric() or not a.contains_identity():
        raise PairError("need a symmetric neighborhood of the identity")
    if r < 1:
        raise PairError("width r must be >= 1")
    if eps < 0:
        raise PairError("eps must be nonnegative")
    powers = [a.group.singleton(a.group.identity), a]
    def power(k: int) -> GSubset:
        while len(powers) <= k:
            powers.append(product_set(powers[-1], a))
        return powers[k]

    n = 2 * r
    while True:
        low = power(n - 2 * r)
        high = power(n + 2 * r)
        if high.size <= (1 + eps) * low.size:
            return MultiplicativePair(power(n), a, high, low, r)
        n += 1


def approx_haar_defect(p: MultiplicativePair, mu: GFunc) -> float:
    """Total-variation defect |mu_B * mu - mu_B|; at most the pair's closure eps.

    mu must be a probability density supported inside B'^r.
    """
    if mu.group != p.group:
        raise PairError("density lives on a different group")
    vals = mu.values
    if np.min(vals.real) < -1e-12 or np.max(np.abs(vals.imag)) > 1e-12:
        raise PairError("mu must be a nonnegative real density")
    if abs(mu.integral() - 1) > 1e-9:
        raise PairError("mu must integrate to 1 against mu_G")
    allowed = p.perturb_power()
    if np.any((np.abs(vals) > 0) & ~allowed.mask):
        raise PairError("support of mu escapes B'^r")
    mu_b = GFunc.measure(p.ground)
    return (convolve(mu_b, mu) - mu_b).l1()


# -- local operator and spectrum --------------------------------------------------


def _check_support(p: MultiplicativePair, f: GFunc) -> None:
    if f.group != p.group:
        raise PairError("function lives on a different group")
    if np.any((np.abs(f.values) > 0) & ~p.perturb.mask):
        raise PairError("function must be supported on the perturbation set B'")


class LocalOp:
    """The operator v -> ((f dmu_{B'}) * v)|_B over the elements of B."""

    __slots__ = ("pair", "func", "elements", "matrix", "_svd", "_svals", "_lock")

    def __init__(self, p: MultiplicativePair, f: GFunc):
        _check_support(p, f)
        self.pair = p
        self.func = f
        g = p.group
        el = p.ground.indices
        self.elements = el
        idx = g.mul[np.ix_(el, g.inv[el])]
        self.matrix = f.values[idx] * p.perturb.mask[idx] / p.perturb.size
        self.matrix.setflags(write=False)
        self._svd = None
        self._svals = None
        self._lock = threading.Lock()

    @property
    def svd(self):
        if self._svd is None:
            with self._lock:
                if self._svd is None:
                    u, s, vh = np.linalg.svd(self.matrix)
                    self._svd = _canonicalize_svd(u, s, vh)
                    self._svals = self._svd[1]
        return self._svd

    @property
    def singular_values(self) -> np.ndarray:
        if self._svals is None:
            with self._lock:
                if self._svals is None:
                    self._svals = np.linalg.svd(self.matrix, compute_uv=False)
        s = self._svals
        if s.size and s[0] > 0:
            s = np.where(s < NOISE_FLOOR * s[0], 0.0, s)
        return s

    def hilbert_schmidt_sq(self) -> float:
        return float(np.sum(np.abs(self.matrix) ** 2))

    def f_l1(self) -> float:
        return self.func.lp_over(self.pair.perturb, 1)

    def f_l2(self) -> float:
        return self.func.lp_over(self.pair.perturb, 2)

    def f_linf(self) -> float:
        return self.func.linf_over(self.pair.perturb)

    def width(self) -> float:
        """w(f) = |f|_{L^1(mu_{B'})} / |f|_{L^inf(mu_{B'})}."""
        top = self.f_linf()
        if top == 0:
            raise PairError("width of the zero function is undefined")
        return self.f_l1() / top


def local_operator(p: MultiplicativePair, f: GFunc) -> LocalOp:
    return LocalOp(p, f)


class LocalBasis:
    """Orthonormal basis of L^2(mu_B) diagonalizing the local L^*L.

    coords[:, i] is a unit coordinate vector over the elements of B;
    function values on B are sqrt(|B|) * coords.
    """

    __slots__ = ("pair", "elements", "coords", "sing_values")

    def __init__(self, pair, elements, coords, sing_values):
        self.pair = pair
        self.elements = elements
        self.coords = coords
        self.sing_values = sing_values

    def function(self, i: int) -> GFunc:
        vals = np.zeros(self.pair.group.order, dtype=np.complex128)
        vals[self.elements] = self.coords[:, i] * np.sqrt(len(self.elements))
        return GFunc(self.pair.group, vals)

    def gram_error(self) -> float:
        m = self.coords.conj().T @ self.coords
        return float(np.max(np.abs(m - np.eye(m.shape[0]))))


def local_fourier_basis(p: MultiplicativePair, f: GFunc) -> LocalBasis:
    op = LocalOp(p, f)
    _, s, vh = op.svd
    return LocalBasis(p, op.elements, vh.conj().T, s)


@dataclass
class SpectrumSlice:
    """Span of local Fourier vectors with s_i >= delta |f|_{L^1(mu_{B'})}."""

    pair: MultiplicativePair
    delta: float
    elements: np.ndarray
    coords: np.ndarray       # |B| x dim, unit coordinate columns
    sing_values: np.ndarray  # matching s_i, descending
    width_of_f: float
    f_l1: float

    @property
    def dim(self) -> int:
        return self.coords.shape[1]

    def function(self, i: int) -> GFunc:
        vals = np.zeros(self.pair.group.order, dtype=np.complex128)
        vals[self.elements] = self.coords[:, i] * np.sqrt(len(self.elements))
        return GFunc(self.pair.group, vals)


def _slice_dim(op: LocalOp, delta: float) -> int:
    s = op.singular_values
    return int(np.count_nonzero(s >= delta * op.f_l1()))


def spectrum(p: MultiplicativePair, f: GFunc, delta: float) -> SpectrumSlice:
    op = LocalOp(p, f)
    d = _slice_dim(op, delta)
    _, s, vh = op.svd
    v = vh.conj().T
    return SpectrumSlice(
        pair=p,
        delta=float(delta),
        elements=op.elements,
        coords=v[:, :d],
        sing_values=op.singular_values[:d],
        width_of_f=op.width(),
        f_l1=op.f_l1(),
    )


def regular_delta(p: MultiplicativePair, f: GFunc, delta: float) -> tuple[float, float]:
    """A threshold delta' in (delta/2, delta] on a spectrum-dimension plateau.

    Walks the grid delta - j*delta/(2k+2), j = 0..k+1, with k the dimension
    bound floor(4 delta^-2 c^-1 |f|_1^-2 |f|_2^2); some two consecutive
    spectra have equal dimension, giving delta' and the gap eta.
    """
    op = LocalOp(p, f)
    l1 = op.f_l1()
    if l1 == 0:
        raise PairError("regular threshold of the zero function is undefined")
    c = float(p.thickness())
    k = int(np.floor(4 * delta**-2 * c**-1 * (op.f_l2() / l1) ** 2))
    step = delta / (2 * k + 2)
    dims = [_slice_dim(op, delta - j * step) for j in range(k + 2)]
    for j in range(k + 1):
        if dims[j] == dims[j + 1]:
            return float(delta - j * step), float(step)
    raise PairError("dimension pigeonhole failed")  # unreachable: k+2 dims in [0, k]


def translation_operator(
    p: MultiplicativePair, f: GFunc, delta: float, y: int
) -> tuple[np.ndarray, SpectrumSlice]:
    """Matrix of v -> project((rho_y v)|_B) on the delta-spectrum slice basis.

    delta should be regular (see regular_delta) for the near-homomorphism and
    near-unitarity properties to kick in; the matrix itself is defined for
    any delta.  At y = identity it is exactly the identity matrix.
    """
    sl = spectrum(p, f, delta)
    g = p.group
    el = sl.elements
    pos = -np.ones(g.order, dtype=np.int64)
    pos[el] = np.arange(el.size)
    ty = g.mul[el, y]
    keep = p.ground.mask[ty]
    moved = np.zeros_like(sl.coords)
    moved[keep] = sl.coords[pos[ty[keep]]]
    t = sl.coords.conj().T @ moved
    return t, sl


def nearest_unitary(m: np.ndarray) -> tuple[np.ndarray, float]:
    """Closest-unitary witness U with |M - U|_op <= max_i |s_i(M) - 1|.

    Built from the SVD as U = W V^H (each right singular vector is mapped to
    its image direction); zero singular directions are completed by the SVD's
    own orthonormal completion and contribute |0 - 1| = 1 to the bound.
    """
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise PairError("nearest_unitary needs a square matrix")
    if m.shape[0] == 0:
        return m.copy(), 0.0
    w, s, vh = np.linalg.svd(m)
    u = w @ vh
    return u, float(np.max(np.abs(s - 1)))


def normalize_pair(b0: GSubset, b1: GSubset, b2: GSubset) -> GSubset:
    """Symmetric identity neighborhood B3 with x B3 x^-1 inside B2^6 for x in B1.

    Requires the sandwich relationships B1^2 inside B0 and B2^2 inside B1
    (audited exactly).  B3 is the intersection of x B2^2 x^-1 over a greedy
    set X with B1 inside B2^2 X; the conjugation containment is then
    verified exhaustively over B1.
    """
    g = b0.group
    for name, s in (("B0", b0), ("B1", b1), ("B2", b2)):
        if s.size == 0 or not s.is_symmetric() or not s.contains_identity():
            raise PairError(f"{name} must be a nonempty symmetric identity neighborhood")
    b1sq = product_set(b1, b1)
    b2sq = product_set(b2, b2)
    if not b1sq.issubset(b0):
        raise PairError("hypothesis fails: B1^2 is not contained in B0")
    if not b2sq.issubset(b1):
        raise PairError("hypothesis fails: B2^2 is not contained in B1")
    b2sq_idx = b2sq.indices
    covered = np.zeros(g.order, dtype=bool)
    centers = []
    for b in b1.indices:
        if not covered[b]:
            centers.append(int(b))
            covered[g.mul[b2sq_idx, b]] = True
    inter = np.ones(g.order, dtype=bool)
    from .groups import conjugate

    for x in centers:
        inter &= conjugate(g, b2sq, x).mask
    b3 = GSubset(g, inter)
    b2_6 = power_set(b2, 6)
    for x in b1.indices:
        if not conjugate(g, b3, int(x)).issubset(b2_6):
            raise PairError(f"conjugation containment failed at x = {int(x)}")
    return b3
