"""Exact computation of mixed and Buchsbaum-Rim multiplicities over k[x_1..x_d][T_1..T_p]."""
from .algebra import FreeElement, Polynomial, RingSpec
from .bridge import ModuleFamily, embed, module_fc_sequence, module_mixed_multiplicities, to_instance
from .errors import MmxError
from .graded import GradedPiece, Instance, MultiIndex, length_h_br, length_h_mixed, saturated_data
from .instance_io import dumps_instance, loads_instance, read_instance
from .multiplicity import buchsbaum_rim, buchsbaum_rim_all, mixed_multiplicities

__version__ = "0.1.0"

__all__ = [
    "FreeElement", "Polynomial", "RingSpec", "ModuleFamily", "embed", "module_fc_sequence",
    "module_mixed_multiplicities", "to_instance", "MmxError", "GradedPiece", "Instance", "MultiIndex",
    "length_h_br", "length_h_mixed", "saturated_data", "dumps_instance", "loads_instance", "read_instance",
    "buchsbaum_rim", "buchsbaum_rim_all", "mixed_multiplicities",
]
