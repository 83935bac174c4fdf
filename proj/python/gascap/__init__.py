"""Channel assignment as QUBO/HUBO polynomials with Grover adaptive search."""

from ._core import (
    CapExceeded,
    CapInstance,
    Decoded,
    Formulation,
    ValidationError,
    appendix_a_instance,
    brute_force,
    coefficients,
    estimate,
    formulate,
    ideal_marked_probability,
    instance_from_json,
    load_instance,
    quadratize,
    solve,
    state_prep_resources,
    synthetic_instance,
    value_register_width,
    variable_counts,
)

__all__ = [
    "CapExceeded",
    "CapInstance",
    "Decoded",
    "Formulation",
    "ValidationError",
    "appendix_a_instance",
    "brute_force",
    "coefficients",
    "estimate",
    "formulate",
    "ideal_marked_probability",
    "instance_from_json",
    "load_instance",
    "quadratize",
    "solve",
    "state_prep_resources",
    "synthetic_instance",
    "value_register_width",
    "variable_counts",
]
