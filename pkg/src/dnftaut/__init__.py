"""Search for distinct DNF tautologies with long cubes."""

from .bounds import BoundResult, density_bound, exact_length_bound
from .dnf import Assignment, CapacityError, Cube, Dnf, VerificationReport, is_tautology, verify
from .encoder import CnfFormula, EncodeOptions, VarMap, build_instance
from .groups import GroupKind, GroupSpec, Permutation
from .oracle import OracleResult, exists_bruteforce
from .search import Budget, ResultStore, SearchResult, decode_and_verify, exact_k, max_k, reproduce_table
from .solver import SolveOutcome, Status, solve, solve_embedded, solve_external

__all__ = [
    "Assignment", "BoundResult", "Budget", "CapacityError", "CnfFormula", "Cube", "Dnf",
    "EncodeOptions", "GroupKind", "GroupSpec", "OracleResult", "Permutation", "ResultStore",
    "SearchResult", "SolveOutcome", "Status", "VarMap", "VerificationReport", "build_instance",
    "decode_and_verify", "density_bound", "exact_k", "exact_length_bound", "exists_bruteforce",
    "is_tautology", "max_k", "reproduce_table", "solve", "solve_embedded", "solve_external", "verify",
]
