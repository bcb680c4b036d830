"""Numerical experiments on variable Lebesgue spaces and
pseudodifferential operators with slowly oscillating symbols.

Submodules
----------
grid       uniform grids, sampled functions, probe transforms
exponent   variable exponents and class checkers
modular    modular and Luxemburg norm
maximal    Hardy-Littlewood, q- and sharp maximal operators
symbols    symbol classes, seminorm estimates, cutoffs and regularizers
pdo        Op(a) by DFT quadrature
fredholm   regularizer pipeline and compactness probes
cli        the ``vexpdo`` command
"""

from .errors import (ConfigError, DerivativeUnavailableError, EllipticityError,
                     GridMismatchError, InfeasibleDecompositionError, NumericError,
                     PreconditionError, SupportError, VexpdoError)
from .exponent import (Exponent, check_bounds, check_log_holder_infinity, check_log_holder_local,
                       check_nekvinda, conjugate, constant_exponent, log_holder_decay_exponent,
                       log_holder_infinity_sweep, loglog_sine_exponent, mstar_decompose,
                       mstar_recombine)
from .fredholm import FredholmReport, ProbeFamilySpec, ellipticity_radius, run_fredholm_pipeline
from .grid import Grid, SampledFunction, bump, make_grid, transform_function
from .maximal import hl_maximal, q_maximal, sharp_maximal
from .modular import NormResult, luxemburg_norm, modular
from .pdo import PdoPlan, apply, apply_multiplier, composition_residual
from .symbols import (Symbol, SymbolLattice, builtin_symbol, cutoff_phi_R,
                      estimate_hormander_seminorms, regularizer_b_R, so_decay_profile)

__version__ = "0.1.0"
