"""Matrix Gibbs states on the full two-sided shift.

Three constructions of the same family of measures — cone Perron-Frobenius
eigendata for nonnegative systems, even tensor-power lifts for integer
exponents, and discretized projective transfer operators for arbitrary t > 0 —
plus the mixing diagnostics that verify their ergodic behaviour at desk scale.
"""

from .cone_gibbs import (
    ConeGibbsModel,
    GibbsRatioReport,
    VariationalReport,
    build_cone_gibbs,
    consistency_check,
    cylinder_measure,
    gibbs_ratio_scan,
    sample_path,
    variational_check,
)
from .errors import (
    BudgetExceededError,
    CheckFailedError,
    ConfigError,
    DimensionBudgetError,
    InvalidExponentError,
    InvalidWordError,
    MatGibbsError,
    NonSimpleDominantError,
    NotConeNonnegativeError,
    NotInvertibleError,
    NotIrreducibleError,
)
from .mixing import (
    BradleyReport,
    CylinderFunction,
    CylinderMeasure,
    DecayTable,
    MixingReport,
    bradley_scan,
    correlation_decay,
    eps_independence,
    fit_geometric_rate,
    joint_mass_table,
    power_mean_chain_check,
    psi_coefficients,
)
from .spectral import (
    PrimitivityReport,
    SpectralData,
    collection_irreducibility_scan,
    collection_primitivity_scan,
    convergence_defect,
    leading_eigentriple,
    orthant_irreducible,
    orthant_primitive,
)
from .system import (
    DEFAULT_BUDGET,
    MatrixSystem,
    PartitionSumSeries,
    partition_sum,
    pressure_estimate,
    spectral_norm,
    stacked_products,
    word_product,
)
from .tensor_lift import (
    LiftedSystem,
    LiftPositivityReport,
    k_gibbs_measure,
    kusuoka_lift,
    lift_positivity_test,
    tensor_power_lift,
)
from .transfer import (
    ContractionReport,
    ProjectiveGrid,
    ProximalityReport,
    TransferDiscretization,
    assemble_transfer,
    build_grid,
    convergence_defect_t,
    cylinder_measure_t,
    holder_bound_check,
    projective_contraction_check,
    projective_distance,
    proximality_search,
)
from .words import Word, parse_word, word_str

__version__ = "0.1.0"
