"""Exact computation of Lê numbers, global Lê classes and Milnor classes of hypersurfaces."""

__version__ = "0.1.0"

from .classcalc import ClassVector, Stratum, StratumTable  # noqa: E402
from .errors import (  # noqa: E402
    ConsistencyError,
    GenericityError,
    InputError,
    LecalcError,
    NotIsolatedError,
    ParseError,
    ResourceCapExceeded,
)
from .ideals import Caps, Ideal, groebner, hilbert_data, local_multiplicity_at_origin, saturate  # noqa: E402
from .lecycles import GermInput, euler_char_milnor_fiber, le_analysis, projective_le_classes  # noqa: E402
from .polyring import Poly, Ring, parse_poly  # noqa: E402

__all__ = [
    "Caps",
    "ClassVector",
    "ConsistencyError",
    "GenericityError",
    "GermInput",
    "Ideal",
    "InputError",
    "LecalcError",
    "NotIsolatedError",
    "ParseError",
    "Poly",
    "ResourceCapExceeded",
    "Ring",
    "Stratum",
    "StratumTable",
    "euler_char_milnor_fiber",
    "groebner",
    "hilbert_data",
    "le_analysis",
    "local_multiplicity_at_origin",
    "parse_poly",
    "projective_le_classes",
    "saturate",
]
