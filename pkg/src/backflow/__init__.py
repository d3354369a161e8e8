"""Telescopic relative entropy and entropic bounds on information backflow."""
from .bounds import (
    BoundRecord,
    Quantifier,
    Trajectory,
    check_bounds,
    evolve_pair,
    intermediate_chain_check,
    lhs_revival,
    rhs_bound,
)
from .divergences import (
    kappa,
    kappa_alt,
    pinsker_coefficient,
    qjsd,
    relative_entropy,
    scalar_tre,
    sqrt_qjsd,
    symmetrized_tre,
    telescopic_re,
    trace_distance,
)
from .models import ModelSpec, ScenarioSpec, build_hamiltonian, default_scenario, excitation_operator

__version__ = "0.1.0"
