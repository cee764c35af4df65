"""Positive scalings certifying the lower frame inequality for total sequences.

The heavy lifting lives in the compiled extension; this package re-exports
the public surface.
"""

from ._framescale import (
    Family,
    check_lower_frame,
    effective_vector,
    generate_family,
    hermitian_min_eig,
    load_family,
    make_family,
    min_norm_least_squares,
    operator_norm,
    run_pipeline,
    save_family,
    uniform_baseline,
    weighted_cs_gap,
)

__all__ = [
    "Family",
    "check_lower_frame",
    "effective_vector",
    "generate_family",
    "hermitian_min_eig",
    "load_family",
    "make_family",
    "min_norm_least_squares",
    "operator_norm",
    "run_pipeline",
    "save_family",
    "uniform_baseline",
    "weighted_cs_gap",
]

__version__ = "0.1.0"
