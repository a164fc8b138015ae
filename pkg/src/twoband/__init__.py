"""Exact relaxation of a two-level system coupled to a two-band environment,
compared against the rate equation obtained from Hilbert-space averages."""

from .model import (
    ModelParams, Hamiltonian, PureState,
    build_hamiltonian, sample_coupling, initial_state, default_params,
)
from .propagator import Trajectory, DysonOperators, evolve_exact, build_u1, dyson_step
from .observables import (
    ObservableRecord, sector_probabilities, reduced_states, purities, correlation_measures,
)
from .hsa import (
    RateTheory, RegimeReport, rate_constant, regime_report, rate_solution, equilibrium,
    peak_function, u1_trace_prediction, u1_traces, hilbert_average_check,
    short_step_prediction,
)

__version__ = "0.1.0"
