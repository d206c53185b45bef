""" Submodule for ATE estimation algorithms

Algorithms currently include:
    - j2r_imputer: weighted sequential robust regression and J2R imputation
    - ate_analysis: working-model fit, ATE and linearized variance
    - bootstrap: stratified bootstrap variance of any estimator
    - mi_baseline: conventional multiple imputation with Rubin's rule

"""
from .j2r_imputer import (ImputationModel, ImputationStrategy, NuPolicy,
                          compose_beta, fit_sequential, impute)
from .ate_analysis import (AteEstimate, ModelForm, PipelineConfig,
                           VarianceMethod, WorkingModel, ate, estimate_ate,
                           fit_analysis, linearized_variance)
from .bootstrap import bootstrap_variance
from .mi_baseline import MiConfig, MiResult, run_mi
