"""Randomized quasi-Monte Carlo with scrambled (t,s)-sequences of arbitrary size.

Point-set generation (van der Corput, Sobol', Faure), Owen/affine nested
scrambling, exact net verification, spectral variance tables and bounds,
plus scrambled-net SIR and SQMC likelihood estimation for state-space
models.
"""

__version__ = "0.1.0"

from .anova import AnovaTable, build_table, haar_component, sigma_uk, theorem1_bound
from .integrands import IntegrandSpec, get_integrand, register_integrand
from .netcheck import BAryBox, enumerate_boxes, is_lambda_tms_net, is_tms_net
from .quadrature import (
    BoundReport,
    MSEReport,
    bound_b1,
    bound_b2,
    bound_basic,
    bound_report,
    crossover_N,
    estimate,
    fit_log_slope,
    gain_factor_bound,
    replicate,
)
from .scrambling import ScrambleState, derive_seed, point_values, scramble, scrambled_values
from .sequences import GeneratorSpec, PointSet, generate
from .sir import SirProblem, get_problem, sir_estimate, sir_estimate_mc
from .sqmc import (
    StateSpaceModel,
    get_model,
    grid_loglik,
    mse_sweep,
    nonlinear_model,
    simulate,
    smc_loglik,
    sqmc_loglik,
    sv_model,
)
