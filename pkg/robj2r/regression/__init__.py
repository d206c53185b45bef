""" Robust loss functions and weighted M-estimation """
from .robust_loss import LossKind, LossSpec, psi, psi_prime, rho
from .robust_fit import FitResult, RLM, fit_weighted_robust, mad
from .weights import (CovariateWeighting, WeightMode, mahalanobis_weights,
                      robust_center_scatter)
from .cross_validation import DEFAULT_GRID, cross_validate_nu
