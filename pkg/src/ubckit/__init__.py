"""Exact uniform-boundary-condition measurements on simplicial and
semi-simplicial complexes, with certified constant arithmetic."""

from .core import (
    BudgetExceeded,
    Chain,
    ComplexError,
    OrderedSimplicialComplex,
    PairComplex,
    Poset,
    SemiSimplicialSet,
    boundary,
    validate,
)
from .homology import reduced_betti, relative_betti
from .ubc import min_fill, relative_min_fill, transport_ubc, ubc_exact, ubc_sampled
from .calculus import CertifiedConstant, replay

__all__ = [
    "BudgetExceeded",
    "CertifiedConstant",
    "Chain",
    "ComplexError",
    "OrderedSimplicialComplex",
    "PairComplex",
    "Poset",
    "SemiSimplicialSet",
    "boundary",
    "min_fill",
    "reduced_betti",
    "relative_betti",
    "relative_min_fill",
    "replay",
    "transport_ubc",
    "ubc_exact",
    "ubc_sampled",
    "validate",
]
