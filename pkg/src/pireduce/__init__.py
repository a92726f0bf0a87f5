"""Dimensionless-group feature engineering and physics-guided regression benchmarks.

The pipeline derives dimensionless variable groups from unit-annotated
tabular data (exact rational dimensional analysis), then benchmarks
power-law and neural predictors built on those groups against purely
data-driven reductions (PCA, bottleneck autoencoder) under a seeded,
reproducible protocol.
"""

from .dataio import (
    Dataset,
    DatasetSchema,
    Standardizer,
    VariableSpec,
    apply_standardizer,
    builtin_schema,
    fit_array_standardizer,
    fit_standardizer,
    holdout_split,
    kfold_indices,
    load_csv,
    load_schema,
    make_dataset,
    save_csv,
    save_schema,
    synth_generate,
)
from .dimensions import (
    BASE_DIMENSIONS,
    DIMENSIONLESS,
    DimVector,
    UnitDef,
    UnitRegistry,
    builtin_registry,
    dim_mul,
    dim_pow,
    is_dimensionless,
    to_base_value,
)
from .errors import (
    ConstantColumnError,
    DegenerateDimensionsError,
    DivergenceError,
    IngestError,
    LogDomainError,
    PiReduceError,
    SchemaError,
    SingularSystemError,
    UndefinedScoreError,
    ZeroBaseValueError,
)
from .metrics import ScoreSet, mae, mse, pearson, r_squared, score_all, smape
from .models import (
    DEFAULT_LAMBDA_GRID,
    METHOD_NAMES,
    ComparisonRow,
    MlpConfig,
    MlpModel,
    MonomialModel,
    PcaReducer,
    TrainReport,
    fit_monomial,
    fit_pca_reducer,
    load_model,
    predict_monomial,
    reduce_pca4,
    run_experiment,
    save_model,
    train_autoencoder,
    train_mlp,
)
from .numerics import RationalMatrix, pca_fit, rank_exact, ridge_solve, solve_exact
from .pi_engine import (
    PiBasis,
    PiGroup,
    derive_pi_basis,
    dimensionalize_target,
    evaluate_groups,
    load_basis,
    nondimensionalize,
    save_basis,
    select_base_subset,
)

__version__ = "0.1.0"
