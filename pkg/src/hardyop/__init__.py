"""Numerical toolkit for weighted composition operators ``uC_φ`` between Hardy spaces."""

__version__ = "0.1.0"

from .errors import (AliasingTooLarge, EmptyLevel, HardyError, NoConvergence, NonConvergent, NotBounded,
                     OutsideDomain, ParseError, SingularPoint, Undecided, ValidationError)
from .estimators import AnalysisConfig, analyze
from .funcspace import DiscFunction, Exponent, SelfMap, hardy_norm
from .scenario import Scenario, parse_scenario, serialize

__all__ = [
    "AliasingTooLarge", "AnalysisConfig", "DiscFunction", "EmptyLevel", "Exponent", "HardyError",
    "NoConvergence", "NonConvergent", "NotBounded", "OutsideDomain", "ParseError", "Scenario",
    "SelfMap", "SingularPoint", "Undecided", "ValidationError", "analyze", "hardy_norm",
    "parse_scenario", "serialize",
]
