"""curvlab: curvature invariants of small-dimension Riemannian metrics.

The package evaluates the ten quadratic symmetric-2-form curvature
invariants of a metric (phi1..phi10), assembles the linear system those
invariants satisfy on a catalog of test manifolds, and recovers the unique
coefficient vector of the quadratic curvature identity that holds on every
4-dimensional Riemannian manifold.
"""

__version__ = "0.1.0"

from .errors import (
    CurvlabError,
    GenerationError,
    GeometryError,
    NullspaceError,
    ParseError,
)
from .jets import (
    Jet,
    jet_constant,
    jet_exp,
    jet_from_terms,
    jet_invert,
    jet_linear,
    jet_mul,
    jet_partial,
    jet_truncate,
    jet_var,
)

__all__ = [
    "__version__",
    "CurvlabError",
    "GeometryError",
    "ParseError",
    "GenerationError",
    "NullspaceError",
    "Jet",
    "jet_constant",
    "jet_var",
    "jet_from_terms",
    "jet_linear",
    "jet_mul",
    "jet_invert",
    "jet_exp",
    "jet_partial",
    "jet_truncate",
]
