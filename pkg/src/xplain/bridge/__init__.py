"""Bridge between flow networks and constraint programs, both directions."""

from .compile import UnsupportedBehavior, compile_network
from .encode import (
    EncodingTrace,
    Milp,
    binary_weights,
    encode_milp,
    expand_integer_column,
    milp_to_program,
    solve_encoded,
)
from .milp_io import load_milp, milp_from_dict, milp_to_dict, save_milp
from .simplify import SimplifiedProgram, simplify

__all__ = [
    "UnsupportedBehavior",
    "compile_network",
    "EncodingTrace",
    "Milp",
    "binary_weights",
    "encode_milp",
    "expand_integer_column",
    "milp_to_program",
    "solve_encoded",
    "load_milp",
    "milp_from_dict",
    "milp_to_dict",
    "save_milp",
    "SimplifiedProgram",
    "simplify",
]
