"""Integer linear models for the stack-up problem."""

from .lpformat import emit_lp, read_lp, validate_model
from .model import (
    Constraint,
    IlpModel,
    bin_model_size,
    build_bin_model,
    build_pallet_model,
    decode_bin_order,
    decode_layout,
    pallet_model_size,
)
from .tiny import IlpSolution, solve_tiny

__all__ = [
    "Constraint",
    "IlpModel",
    "IlpSolution",
    "bin_model_size",
    "build_bin_model",
    "build_pallet_model",
    "decode_bin_order",
    "decode_layout",
    "emit_lp",
    "pallet_model_size",
    "read_lp",
    "solve_tiny",
    "validate_model",
]
