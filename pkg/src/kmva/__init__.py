"""Kernel multivariate analysis for paired datasets and space-time fields.

The package provides one family of coupled-mode decompositions (MCA,
primal/dual CCA, kernel CCA), kernel PCA with a complex rotated variant
for propagating patterns in gridded data, kernel dependence statistics
with permutation nulls, and the synthetic benchmarks used to validate
them.  The ``kmva`` console script exposes the same functionality from
the command line.
"""

from .analytic import hilbert_analytic, phase_amplitude
from .data import (
    DataMatrix,
    Datacube,
    center_columns,
    load_cube,
    load_matrix,
    load_matrix_csv,
    save_cube,
    save_matrix,
)
from .decomposition import CCA, MCA, DualCCA, KernelCCA, KernelPCA, RockPCA, cross_cov
from .dependence import (
    STATISTICS,
    DependenceReport,
    SigmaSweep,
    cca_stat,
    coco,
    dependence_battery,
    hsic,
    kcca_stat,
    kgv,
    mca_stat,
    pearson_r,
    permutation_null,
    sigma_sweep,
)
from .exceptions import (
    ConfigError,
    DimensionMismatchError,
    KmvaError,
    MalformedHeaderError,
    NonFiniteDataError,
    NotCenteredError,
    SingularMatrixError,
)
from .kernels import (
    KernelMatrix,
    center_kernel,
    gamma_from_sigma,
    gram,
    median_pairwise_distance,
    rbf,
    reg_inverse,
    sigma_from_gamma,
)
from .rotation import RotationResult, promax, varimax, varimax_criterion
from .synth import (
    PATTERNS,
    REGIMES,
    TEMPORALS,
    ModeSpec,
    PlantedCube,
    PlantedCubeSpec,
    RegimeSpec,
    gen_cube,
    gen_regime,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "hilbert_analytic",
    "phase_amplitude",
    "DataMatrix",
    "Datacube",
    "center_columns",
    "load_cube",
    "save_cube",
    "load_matrix",
    "save_matrix",
    "load_matrix_csv",
    "cross_cov",
    "MCA",
    "CCA",
    "DualCCA",
    "KernelCCA",
    "KernelPCA",
    "RockPCA",
    "STATISTICS",
    "DependenceReport",
    "SigmaSweep",
    "pearson_r",
    "hsic",
    "coco",
    "kcca_stat",
    "kgv",
    "cca_stat",
    "mca_stat",
    "sigma_sweep",
    "dependence_battery",
    "permutation_null",
    "KmvaError",
    "ConfigError",
    "DimensionMismatchError",
    "MalformedHeaderError",
    "NonFiniteDataError",
    "NotCenteredError",
    "SingularMatrixError",
    "KernelMatrix",
    "gram",
    "rbf",
    "center_kernel",
    "reg_inverse",
    "median_pairwise_distance",
    "gamma_from_sigma",
    "sigma_from_gamma",
    "RotationResult",
    "varimax",
    "varimax_criterion",
    "promax",
    "REGIMES",
    "PATTERNS",
    "TEMPORALS",
    "RegimeSpec",
    "ModeSpec",
    "PlantedCubeSpec",
    "PlantedCube",
    "gen_regime",
    "gen_cube",
]
