"""Probability groups, fusion rings, finite-group character tables and Drinfeld double modular data."""
from .classdata import ClassData, class_data, conjugacy_classes
from .duality import DualProbabilityGroup, Functional, dual, dual_sizes, find_subgroups, quotient
from .errors import (InputError, ParseError, ProbHopfError)
from .exactmath import DEFAULTS, override_defaults
from .fusion import FusionRing, fpdims, to_probgroup
from .groups import FiniteGroup, builtin_group
from .probgroup import ProbabilityGroup, check_axioms, integrality_class, order, sizes
from .qdouble import DoubleData, build_double

__version__ = "0.1.0"

__all__ = [
    "ClassData", "class_data", "conjugacy_classes",
    "DualProbabilityGroup", "Functional", "dual", "dual_sizes", "find_subgroups", "quotient",
    "InputError", "ParseError", "ProbHopfError",
    "DEFAULTS", "override_defaults",
    "FusionRing", "fpdims", "to_probgroup",
    "FiniteGroup", "builtin_group",
    "ProbabilityGroup", "check_axioms", "integrality_class", "order", "sizes",
    "DoubleData", "build_double",
]
