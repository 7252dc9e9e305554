"""Exact solvers for the FIFO stack-up problem."""

from .errors import CapacityError, FifoStackError, NotFoundUnderCut, ParameterError, ParseError
from .exact import solve_decision_bfs, solve_processing_bfs, solve_with_cutting
from .gen import GenParams, generate
from .instance import Instance, emit_instance, parse_instance, verify_solution
from .seqgraph import build_sequence_graph, directed_vertex_separation

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "FifoStackError",
    "GenParams",
    "Instance",
    "NotFoundUnderCut",
    "ParameterError",
    "ParseError",
    "build_sequence_graph",
    "directed_vertex_separation",
    "emit_instance",
    "generate",
    "parse_instance",
    "solve_decision_bfs",
    "solve_processing_bfs",
    "solve_with_cutting",
    "verify_solution",
]
