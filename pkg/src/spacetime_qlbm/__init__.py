"""Quantum lattice-gas encodings: unitarity no-go checks and a space-time encoded simulator."""
from .lattice import LatticeDescriptor, OccupancyField, build_descriptor, evolve_classical
from .realizability import TransitionSpec, gram_check, synthesize_unitary
from .simulator import RunConfig, Window, compare, full_grid_run, run
from .spacetime import CollisionParams, enumerate_vicinity, schedule, step_circuits
from .sparse import Circuit, Gate, SparseState, apply_circuit

__version__ = "0.1.0"

__all__ = [
    "Circuit", "CollisionParams", "Gate", "LatticeDescriptor", "OccupancyField", "RunConfig",
    "SparseState", "TransitionSpec", "Window", "apply_circuit", "build_descriptor", "compare",
    "enumerate_vicinity", "evolve_classical", "full_grid_run", "gram_check", "run", "schedule",
    "step_circuits", "synthesize_unitary",
]
