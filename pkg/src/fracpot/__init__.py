"""Numerical reconstruction of Schrodinger potentials for the integral
fractional Laplacian from a single exterior measurement."""

from .grids import Field, Grid, discrete_norm, make_grid
from .problem import (FuncSpec, Observation, ProblemSpec, RingWindow,
                      parse_config_text)
from .stencil import (StencilSymbol, build_symbol, c_ns, cbar, dump_symbol,
                      load_symbol, sigma, tail_1d, tail_integral_2d,
                      weight_2d, weights_1d, weights_2d)
from .fastop import (FastOperator, KrylovReport, build_fast_operator,
                     dense_operator, krylov_solve)
from .forcing import BoundaryForcing, boundary_forcing
from .observe import ExteriorObserver
from .forward import (ForwardProblem, ForwardSolution, forward_operator,
                      solve_adjoint, solve_forward, solve_sensitivity)
from .inversion import (InversionConfig, InversionResult, cg_reconstruct,
                        choose_alpha, gradient, step_size, tikhonov_value)
from .presets import PRESETS, ExperimentPreset, get_preset
from .harness import (ExperimentContext, RunRecord, export_run, export_sweep,
                      gen_noise, run_experiment, stability_sweep)

__version__ = "0.1.0"
