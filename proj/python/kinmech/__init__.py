"""Python bindings for the kinmech library."""

from ._core import (
    ConfigError,
    DataError,
    Dataset,
    Experiment,
    NoCandidatesError,
    case_names,
    design,
    discover,
    discrepancy,
    enumerate,
    fit,
    generate,
    is_feasible,
    isomorphic,
    odes,
    reactions,
    read_dataset,
    search_space_size,
    simulate,
    write_dataset,
)

__all__ = [
    "ConfigError",
    "DataError",
    "Dataset",
    "Experiment",
    "NoCandidatesError",
    "case_names",
    "design",
    "discover",
    "discrepancy",
    "enumerate",
    "fit",
    "generate",
    "is_feasible",
    "isomorphic",
    "odes",
    "reactions",
    "read_dataset",
    "search_space_size",
    "simulate",
    "write_dataset",
]
