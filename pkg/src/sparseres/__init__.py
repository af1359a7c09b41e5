"""Exact Sylvester-style matrices whose determinant quotient is the sparse resultant."""

from sparseres.core import (NotEssential, NotUnmixed, ResultantMatrix, System, analyze_essential, build_general,
                            build_unmixed, reduce_to_essential, resultant_degrees)
from sparseres.symbolic import extract_resultant

__all__ = ["NotEssential", "NotUnmixed", "ResultantMatrix", "System", "analyze_essential", "build_general",
           "build_unmixed", "extract_resultant", "reduce_to_essential", "resultant_degrees"]
