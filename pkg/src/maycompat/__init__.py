"""Exact chain-complex models of compatible triangulations, with traces and their additivity."""

from .linalg import INTEGERS, RATIONALS, Matrix, Ring, prime_field, solve_linear
from .complexes import (ChainComplex, ChainMap, Homotopy, SemiSplitSES, SplitSequence, Triangle, cone,
                        cylinder, direct_sum, homology, shift, unit_complex)
from .monoidal import dual_complex, dual_map, evaluation, coevaluation, symmetry, tensor, tensor_map
from .traces import additivity_run, euler_trace_oracle, lef, tr

__version__ = "0.1.0"
