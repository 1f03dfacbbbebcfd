"""Global Fourier layer: convolution operators, singular values, algebra norms.

Matrix convention (normative for every spectral claim in the package): the
operator L_f(v) = f * v is stored as the n x n matrix

    M[x, z] = f(x z^-1) / n.

With the Haar-normalized inner product <v, w> = (1/n) sum v conj(w), the
coordinate map v -> v/sqrt(n) is an isometry onto C^n with the standard inner
product, and under it L_f acts exactly as M; a standard SVD of M therefore
yields exactly the singular values s_i(f).  The algebra norm is their sum
(nuclear norm), the PM norm the largest.
"""

from __future__ import annotations

import threading

import numpy as np

from .gfunc import GFunc
from .groups import Group, GroupError, GSubset, is_subgroup, left_coset_ids

__all__ = [
    "ConvOp",
    "FourierBasis",
    "convolve",
    "adjoint",
    "a_norm",
    "pm_norm",
    "singular_values",
    "fourier_basis",
    "recover_from_operator",
    "coset_projection",
    "NOISE_FLOOR",
]

# Singular values below NOISE_FLOOR * s_1 count as zero in nuclear-norm sums
# and spectrum membership (SVD noise floor).
NOISE_FLOOR = 1e-12


def conv_matrix(f: GFunc) -> np.ndarray:
    g = f.group
    return f.values[g.mul[:, g.inv]] / g.order


def convolve(f: GFunc, g: GFunc) -> GFunc:
    """(f * g)(x) = (1/n) sum_y f(y) g(y^-1 x); supp(1_A * 1_B) = AB."""
    f._check(g)
    return GFunc(f.group, conv_matrix(f) @ g.values)


def adjoint(f: GFunc) -> GFunc:
    return f.adjoint()


def _clean_singular_values(s: np.ndarray) -> np.ndarray:
    if s.size and s[0] > 0:
        s = np.where(s < NOISE_FLOOR * s[0], 0.0, s)
    return s


def _canonical_phase(w: np.ndarray) -> complex:
    mags = np.abs(w)
    top = mags.max()
    if top <= 0:
        return 1.0 + 0j
    pivot = int(np.argmax(mags >= top * (1 - 1e-12)))
    z = w[pivot]
    return z / abs(z)


def _canonicalize_svd(u, s, vh):
    """Deterministic SVD representative: phase-fixed right vectors, stable order.

    Order is descending singular value with ties broken lexicographically on
    the rounded right-singular-vector entries; u columns carry the same phase
    and permutation so u @ diag(s) @ vh is unchanged.
    """
    v = vh.conj().T.copy()
    u = u.copy()
    for i in range(v.shape[1]):
        phase = _canonical_phase(v[:, i])
        v[:, i] *= np.conj(phase)
        u[:, i] *= np.conj(phase)
    keys = []
    for i in range(v.shape[1]):
        col = v[:, i]
        rounded = np.round(np.concatenate([col.real, col.imag]), 10) + 0.0
        keys.append((-round(float(s[i]), 10), rounded.tobytes(), i))
    order = [k[2] for k in sorted(keys, key=lambda t: (t[0], t[1]))]
    return u[:, order], s[order], v[:, order].conj().T


class ConvOp:
    """The operator L_f as a dense matrix with a cached, canonical SVD.

    Plain singular values are computed lazily without the bases; the full
    canonical decomposition is built only when vectors are requested.  Both
    caches are written once under a lock and are safe for concurrent reads.
    """

    __slots__ = ("func", "matrix", "_svd", "_svals", "_lock")

    def __init__(self, f: GFunc):
        self.func = f
        self.matrix = conv_matrix(f)
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
        return _clean_singular_values(self._svals)

    def nuclear_norm(self) -> float:
        return float(self.singular_values.sum())

    def operator_norm(self) -> float:
        s = self.svd[1]
        return float(s[0]) if s.size else 0.0

    def adjoint_matrix(self) -> np.ndarray:
        return self.matrix.conj().T

    def reconstruction_error(self) -> float:
        u, s, vh = self.svd
        return float(np.linalg.norm(self.matrix - (u * s) @ vh, 2))


def singular_values(f: GFunc) -> np.ndarray:
    return ConvOp(f).singular_values


def a_norm(f: GFunc) -> float:
    """Algebra norm: sum of singular values of L_f (nuclear norm)."""
    return ConvOp(f).nuclear_norm()


def pm_norm(f: GFunc) -> float:
    """PM norm: operator norm of L_f (largest singular value)."""
    return ConvOp(f).operator_norm()


class FourierBasis:
    """Orthonormal basis of L^2(mu_G) diagonalizing L_f^* L_f.

    vectors[:, i] holds the function values of v_i (unit in the normalized
    inner product, i.e. sqrt(n) times a unit coordinate vector); sing_values
    are the matching s_i(f) in descending order.
    """

    __slots__ = ("group", "vectors", "sing_values")

    def __init__(self, group: Group, vectors: np.ndarray, sing_values: np.ndarray):
        self.group = group
        self.vectors = vectors
        self.sing_values = sing_values

    def gram_error(self) -> float:
        n = self.group.order
        gram = self.vectors.conj().T @ self.vectors / n
        return float(np.max(np.abs(gram - np.eye(n))))

    def eigen_residual(self, f: GFunc) -> float:
        """Max relative residual of L_f^* L_f v_i = s_i^2 v_i."""
        m = conv_matrix(f)
        mm = m.conj().T @ m
        res = mm @ self.vectors - self.vectors * (self.sing_values**2)
        scale = max(1.0, float(self.sing_values[0]) ** 2 if self.sing_values.size else 1.0)
        return float(np.max(np.abs(res))) / scale


def fourier_basis(f: GFunc) -> FourierBasis:
    """Canonical Fourier basis for f (right-singular vectors of L_f)."""
    op = ConvOp(f)
    _, s, vh = op.svd
    n = f.group.order
    vectors = vh.conj().T * np.sqrt(n)
    return FourierBasis(f.group, vectors, _clean_singular_values(s))


def right_translation_matrix(group: Group, y: int) -> np.ndarray:
    """Matrix of rho_y: v -> (x -> v(xy)) in plain coordinates."""
    r = np.zeros((group.order, group.order))
    r[np.arange(group.order), group.mul[:, y]] = 1.0
    return r


def recover_from_operator(group: Group, m: np.ndarray, tol: float = 1e-8) -> GFunc:
    """Invert M = L_f back to f, for M commuting with all right translations.

    f is read off as M applied to the Dirac density at the identity; inputs
    failing the commutation precondition (within tol, relative to max(1,|M|))
    are rejected as "not a convolution operator".
    """
    m = np.asarray(m, dtype=np.complex128)
    if m.shape != (group.order, group.order):
        raise GroupError("operator matrix has wrong shape")
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    mul, inv = group.mul, group.inv
    for y in range(group.order):
        left = m[mul[:, y], :]
        right = m[:, mul[:, inv[y]]]
        if np.max(np.abs(left - right)) > tol * scale:
            raise GroupError(
                f"not a convolution operator: fails to commute with right translation by {y}"
            )
    return GFunc(group, group.order * m[:, group.identity])


def coset_projection(f: GFunc, sub: GSubset) -> GFunc:
    """f * mu_H for a subgroup H: averages f over each left coset xH."""
    if not is_subgroup(sub):
        raise GroupError("coset projection requires a subgroup")
    ids = left_coset_ids(f.group, sub)
    k = int(ids.max()) + 1
    sums = np.zeros(k, dtype=np.complex128)
    np.add.at(sums, ids, f.values)
    return GFunc(f.group, (sums / sub.size)[ids])
