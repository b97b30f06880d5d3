"""Benchmark suite for variational quantum-circuit regressors.

Six four-qubit quantum models (one per entanglement strategy) trained by a
limited-memory quasi-Newton optimiser on a dense statevector simulator,
compared against k-nearest-neighbour, decision-tree, and linear-regression
baselines under a seeded cross-validation, stability, and runtime-scaling
protocol.
"""

from .benchmark import (
    BenchmarkError,
    BenchmarkReport,
    ConfigError,
    ExperimentConfig,
    FoldPlan,
    MetricPair,
    ResidualStats,
    StabilityMetrics,
    TimeModel,
    TimingMeasurement,
    compute_metrics,
    experiment_config_from_dict,
    fit_predict_baseline,
    fit_time_model,
    kfold_plan,
    load_experiment_config,
    loss_stats,
    measure_cv_training_time,
    rank_time_models,
    residual_histogram,
    residual_stats,
    run_benchmark,
    stability_scores,
    stability_scores_from_stats,
    write_report,
)
from .baselines import DecisionTreeRegressor, KnnRegressor, LinearModel, ols_fit
from .circuits import (
    Circuit,
    GateCensus,
    build_real_amplitudes,
    build_z_feature_map,
    compose,
    entangler_pairs,
    evaluate_circuit,
    format_circuit,
    gate_census,
)
from .data import (
    DataError,
    RowError,
    SamplePoint,
    ScalerParams,
    SchemaError,
    SplitBundle,
    gen_synthetic,
    load_dataset,
    minmax_apply,
    minmax_fit,
    minmax_invert_target,
    subset_and_split,
)
from .lbfgs import OptimizeOptions, OptimizeResult, minimize
from .qnn import (
    QNN_CONFIGS,
    QnnConfig,
    QnnModel,
    config_by_name,
    mse_loss,
    param_shift_gradient,
    predict,
    train,
)

__all__ = [name for name in dir() if not name.startswith("_")]
