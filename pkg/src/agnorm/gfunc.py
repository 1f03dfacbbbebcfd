"""Complex-valued functions on finite groups with Haar-normalized norms.

Measures are stored as densities with respect to the uniform probability
measure mu_G: the normalized indicator mu_A is the density (n/|A|) 1_A and
the Dirac measure at y is the density n 1_{y}.  One data type then covers
functions, measures and mixtures without separate normalization rules.
"""

from __future__ import annotations

import numpy as np

from .groups import Group, GroupError, GSubset, build_group

__all__ = ["GFunc"]


class GFunc:
    """Function G -> C as a dense value vector over element indices."""

    __slots__ = ("group", "values")

    def __init__(self, group: Group, values):
        values = np.asarray(values, dtype=np.complex128)
        if values.shape != (group.order,):
            raise GroupError("value vector has wrong length")
        self.group = group
        self.values = values
        self.values.setflags(write=False)

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, group: Group) -> "GFunc":
        return cls(group, np.zeros(group.order))

    @classmethod
    def constant(cls, group: Group, value) -> "GFunc":
        return cls(group, np.full(group.order, value, dtype=np.complex128))

    @classmethod
    def indicator(cls, subset: GSubset) -> "GFunc":
        return cls(subset.group, subset.mask.astype(np.complex128))

    @classmethod
    def measure(cls, subset: GSubset) -> "GFunc":
        """Normalized indicator mu_A as a density: (n/|A|) 1_A."""
        if subset.size == 0:
            raise GroupError("measure of the empty set is undefined")
        return cls(subset.group, subset.mask * (subset.group.order / subset.size))

    @classmethod
    def dirac(cls, group: Group, y: int) -> "GFunc":
        vals = np.zeros(group.order, dtype=np.complex128)
        vals[y] = group.order
        return cls(group, vals)

    # -- arithmetic -----------------------------------------------------------

    def _check(self, other: "GFunc") -> None:
        if self.group != other.group:
            raise GroupError("functions live on different groups")

    def __add__(self, other: "GFunc") -> "GFunc":
        self._check(other)
        return GFunc(self.group, self.values + other.values)

    def __sub__(self, other: "GFunc") -> "GFunc":
        self._check(other)
        return GFunc(self.group, self.values - other.values)

    def __mul__(self, other):
        if isinstance(other, GFunc):
            self._check(other)
            return GFunc(self.group, self.values * other.values)
        return GFunc(self.group, self.values * other)

    __rmul__ = __mul__

    def __neg__(self) -> "GFunc":
        return GFunc(self.group, -self.values)

    def conj(self) -> "GFunc":
        return GFunc(self.group, np.conj(self.values))

    def adjoint(self) -> "GFunc":
        """x -> conj(f(x^-1)); satisfies L_{f~} = L_f^*."""
        return GFunc(self.group, np.conj(self.values[self.group.inv]))

    def translate(self, y: int) -> "GFunc":
        """Right translate rho_y(f): x -> f(xy)."""
        return GFunc(self.group, self.values[self.group.mul[:, y]])

    def restrict(self, subset: GSubset) -> "GFunc":
        return GFunc(self.group, np.where(subset.mask, self.values, 0.0))

    # -- norms (all against normalized Haar) ---------------------------------

    def lp(self, p: float) -> float:
        return float(np.mean(np.abs(self.values) ** p) ** (1.0 / p))

    def l1(self) -> float:
        return float(np.mean(np.abs(self.values)))

    def l2(self) -> float:
        return float(np.sqrt(np.mean(np.abs(self.values) ** 2)))

    def linf(self) -> float:
        return float(np.max(np.abs(self.values))) if self.group.order else 0.0

    def lp_over(self, subset: GSubset, p: float) -> float:
        """L^p norm against the normalized measure mu_B of a nonempty subset."""
        if subset.size == 0:
            raise GroupError("norm over the empty set is undefined")
        vals = np.abs(self.values[subset.mask]) ** p
        return float(np.mean(vals) ** (1.0 / p))

    def linf_over(self, subset: GSubset) -> float:
        if subset.size == 0:
            raise GroupError("norm over the empty set is undefined")
        return float(np.max(np.abs(self.values[subset.mask])))

    def inner(self, other: "GFunc") -> complex:
        """<f, g>_{L^2(mu_G)} = (1/n) sum f conj(g)."""
        self._check(other)
        return complex(np.mean(self.values * np.conj(other.values)))

    def integral(self) -> complex:
        return complex(np.mean(self.values))

    # -- structure predicates --------------------------------------------------

    def support(self) -> GSubset:
        return GSubset(self.group, np.abs(self.values) > 0)

    def is_real(self, tol: float = 0.0) -> bool:
        return bool(np.max(np.abs(self.values.imag), initial=0.0) <= tol)

    def max_integer_deviation(self) -> float:
        """Largest distance of any value from the nearest integer (complex part counts)."""
        re = self.values.real
        dev = np.abs(re - np.round(re))
        return float(max(np.max(dev, initial=0.0), np.max(np.abs(self.values.imag), initial=0.0)))

    def is_integer_valued(self, tol: float = 0.0) -> bool:
        return self.max_integer_deviation() <= tol

    def is_almost_integer_valued(self, eps: float) -> bool:
        """Every value within eps of an integer."""
        return self.max_integer_deviation() < eps

    def nearest_integer(self) -> "GFunc":
        return GFunc(self.group, np.round(self.values.real))

    # -- JSON wire format --------------------------------------------------------

    def to_json_obj(self) -> dict:
        return {
            "group": self.group.spec,
            "values": [[float(v.real), float(v.imag)] for v in self.values],
        }

    @classmethod
    def from_json_obj(cls, obj: dict, group: Group | None = None) -> "GFunc":
        if group is None:
            if "group" not in obj:
                raise GroupError("function JSON needs a 'group' spec")
            group = build_group(obj["group"])
        if "subset" in obj:
            return cls.indicator(GSubset.from_indices(group, obj["subset"]))
        if "values" not in obj:
            raise GroupError("function JSON needs 'values' or 'subset'")
        vals = [complex(v[0], v[1]) if isinstance(v, (list, tuple)) else complex(v) for v in obj["values"]]
        return cls(group, vals)

    def __repr__(self) -> str:
        return f"GFunc(order={self.group.order})"
