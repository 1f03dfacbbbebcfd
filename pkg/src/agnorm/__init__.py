"""Algebra norms of functions on finite groups.

Computes the nuclear and operator norms of convolution operators, verifies
the surrounding lemma inventory as executable properties, constructs and
audits multiplicative pairs with their relative Fourier analysis, and
decomposes integer-valued functions of small algebra norm into signed sums
of coset indicators.
"""

from .gfunc import GFunc
from .groups import (
    Group,
    GroupError,
    GSubset,
    build_group,
    catalog,
    catalog_specs,
    conjugate,
    coset,
    generated_subgroup,
    is_subgroup,
    subgroups,
)
from .spectral import (
    ConvOp,
    FourierBasis,
    a_norm,
    adjoint,
    convolve,
    coset_projection,
    fourier_basis,
    pm_norm,
    recover_from_operator,
    singular_values,
)
from .setstats import (
    doubling,
    energy,
    inverse_set,
    power_set,
    product_set,
    sym_regular_threshold,
    symmetry_set,
    tripling,
)
from .pairs import (
    MultiplicativePair,
    PairError,
    approx_haar_defect,
    conjugate_pair,
    coset_union_pair,
    local_fourier_basis,
    local_operator,
    nearest_unitary,
    normalize_pair,
    pair_from_growth,
    pair_from_product_set,
    regular_delta,
    spectrum,
    subgroup_pair,
    subpair,
    translation_operator,
    validate_pair,
)
from .bohr import UnitaryRep, bohr_set, cyclic_character, regular_rep, unitary_cover_subset
from .freiman import (
    StageError,
    doubling_to_tripling,
    fournier_subgroup,
    freiman_correlation,
    pair_system,
    sym_witness_search,
    weak_freiman,
)
from .decompose import (
    CosetDecomposition,
    DecomposeError,
    RoundingReport,
    continuity_witness,
    coset_rounding,
    dense_small_doubling_subset,
    dual_mass,
    find_level_subgroup,
    idempotent_decompose,
    round_to_integer,
    small_norm_coset_test,
)

__version__ = "0.1.0"
