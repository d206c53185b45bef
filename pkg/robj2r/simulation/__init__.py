""" Submodule for simulation studies

    - scenarios: data-generating processes, dropout and outlier injection
    - montecarlo: replicate loop and Monte Carlo metrics
    - reproduce: published tables and their tolerance checks

"""
from .scenarios import (BUILTIN_SCENARIOS, Scenario, generate, get_scenario,
                        inject_outliers, true_ate)
from .montecarlo import McReport, Method, run_mc
from .reproduce import TABLES, reproduce
