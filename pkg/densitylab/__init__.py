"""
densitylab - Density measures on the natural numbers.

This package computes asymptotic, alpha- and Pólya densities of
structured subsets of the natural numbers, the window functional t(x)
on bounded sequences, and finite surrogate functionals approximating
the extremal finitely additive measures that extend asymptotic density.
"""

__version__ = "0.1.0"

# Import main modules for easy access
from . import tools
from . import natset
from . import seqcore
from . import densities
from . import polya
from . import extremal
from . import dsl

# Import the main classes and entry points for direct access
from .densities import DensityReport, EstimatorConfig
from .dsl import parse_seq_expr, parse_set_expr
from .extremal import Surrogate, lower_extreme, upper_extreme
from .polya import t_estimate

__all__ = [
    "DensityReport",
    "EstimatorConfig",
    "Surrogate",
    "parse_set_expr",
    "parse_seq_expr",
    "upper_extreme",
    "lower_extreme",
    "t_estimate",
    "tools",
    "natset",
    "seqcore",
    "densities",
    "polya",
    "extremal",
    "dsl",
]
