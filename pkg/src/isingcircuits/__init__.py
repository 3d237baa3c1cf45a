"""Zero-temperature Ising circuits: LP synthesis of Hamiltonians, removal of
spurious local minima, and exhaustive certification."""

from .circuit import AND, COPY, OR, XOR, XOR_AND, XOR_XOR, Circuit, glue, is_threshold
from .hamiltonian import Hamiltonian, make_generic
from .oracle import encodes, local_minima
from .synth import SynthesisResult, auxiliary_search, refine_spanning_trees, synthesize

__all__ = [
    "AND", "COPY", "OR", "XOR", "XOR_AND", "XOR_XOR", "Circuit", "glue", "is_threshold",
    "Hamiltonian", "make_generic", "encodes", "local_minima",
    "SynthesisResult", "auxiliary_search", "refine_spanning_trees", "synthesize",
]
