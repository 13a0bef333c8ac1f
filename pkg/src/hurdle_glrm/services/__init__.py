from .baselines import mean_impute, nipals_fit, pca_glrm, quadratic_glrm, score_imputation
from .diagnostics import (
    column_association,
    column_sd,
    loss_explained,
    misclassification_rate,
    nu_scores,
    roc_auc,
    separation_score,
    weighted_sse,
)
from .hurdle import (
    encode_indicator,
    hurdle_deriv,
    hurdle_eval,
    hurdle_reconstruct,
    hurdle_weights_from_sums,
    nu_probability,
    solve_hurdle_weights,
)
from .ingestion import load_schema, load_table
from .loss_catalog import (
    loss_argmin,
    loss_deriv,
    loss_eval,
    loss_offset,
    loss_scale,
    loss_tp_normalizer,
)
from .simgen import calibrate_alpha, simulate_mar_dataset, simulate_zero_inflated
from .solver import (
    calibrate,
    data_loss,
    fit,
    gamma_holdout_errors,
    impute_table,
    mar_offset_refresh,
    normalizer_total,
    objective,
    offset_only,
    reconstruct_table,
    select_gamma,
    transform,
)
from .storage import (
    load_factorization,
    save_factorization,
    write_mar_bundle,
    write_zero_inflated_bundle,
)

__all__ = [
    "calibrate",
    "calibrate_alpha",
    "column_association",
    "column_sd",
    "data_loss",
    "encode_indicator",
    "fit",
    "gamma_holdout_errors",
    "hurdle_deriv",
    "hurdle_eval",
    "hurdle_reconstruct",
    "hurdle_weights_from_sums",
    "impute_table",
    "load_factorization",
    "load_schema",
    "load_table",
    "loss_argmin",
    "loss_deriv",
    "loss_eval",
    "loss_explained",
    "loss_offset",
    "loss_scale",
    "loss_tp_normalizer",
    "mar_offset_refresh",
    "mean_impute",
    "misclassification_rate",
    "nipals_fit",
    "normalizer_total",
    "nu_probability",
    "nu_scores",
    "objective",
    "offset_only",
    "pca_glrm",
    "quadratic_glrm",
    "reconstruct_table",
    "roc_auc",
    "save_factorization",
    "score_imputation",
    "select_gamma",
    "separation_score",
    "simulate_mar_dataset",
    "simulate_zero_inflated",
    "solve_hurdle_weights",
    "transform",
    "weighted_sse",
    "write_mar_bundle",
    "write_zero_inflated_bundle",
]
