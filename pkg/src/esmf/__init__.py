"""Evolution strategy with a merit function for relaxable and unrelaxable constraints."""
from .problem import (DimensionError, EvaluatedPoint, MeritParams, ProblemSpec, ViolationNorm,
                      barrier_value, eval_violation, in_unrelaxable, is_feasible, merit_value,
                      relax_equalities)
from .solver import (EventKind, MeritES, Phase, RunClass, RunRecord, SolverConfig,
                     SolverInputError, TraceEvent, classify_run, is_restoration_identifier,
                     is_successful_point, read_trace, solve, write_trace)
from .unrelaxable import solve_unrelaxable

__version__ = "0.1.0"
