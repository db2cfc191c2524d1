"""Shared numeric tolerances and size budgets.

The defaults below are used throughout the package; every function that
relies on one of them also accepts an explicit override.
"""

from dataclasses import dataclass


@dataclass
class Tolerances:
    equality: float = 1e-12      # exact-identity checks (hermiticity, traces)
    structural: float = 1e-8     # pattern matching (Pauli label recovery, decompositions)
    psd_floor: float = -1e-10    # smallest admissible density-matrix eigenvalue
    log_floor: float = 1e-14     # eigenvalue floor inside matrix logarithms
    support: float = 1e-12       # support-inclusion threshold for relative entropy
    negativity: float = 1e-12    # threshold below which a Wigner entry counts as negative


TOL = Tolerances()

# Dense-matrix budget: systems whose Hilbert dimension d**n exceeds this are
# rejected at construction.  Everything in this package is dense.
MAX_DENSE_DIM = 10_000

# Vertex budget for stabilizer polytope enumeration.
MAX_POLYTOPE_VERTICES = 10_000
