"""Pauli-weight optimization of fermion-to-qubit mappings.

Linear encodings (Jordan-Wigner, Parity, Bravyi-Kitaev, Ternary Tree),
their weight cost model, fermionic order search and ancilla-assisted
Jordan-Wigner Hamiltonians.
"""

from .ancilla import AncillaPlan, apply_plan, optimize_plan, plan_objective, verify_equivalence
from .bitmat import BinaryMatrix, invert
from .cost import cost_components, objective
from .encodings import EncodingKind, LinearEncoding, build_encoding
from .graphs import Edge, HamiltonianGraph, apply_model
from .pauli import Hamiltonian, PauliString, assemble_hamiltonian
from .qap import OrderResult, SearchParams, brute_force, optimize_order

__version__ = "0.1.0"

__all__ = [
    "AncillaPlan", "apply_plan", "optimize_plan", "plan_objective", "verify_equivalence",
    "BinaryMatrix", "invert",
    "cost_components", "objective",
    "EncodingKind", "LinearEncoding", "build_encoding",
    "Edge", "HamiltonianGraph", "apply_model",
    "Hamiltonian", "PauliString", "assemble_hamiltonian",
    "OrderResult", "SearchParams", "brute_force", "optimize_order",
]
