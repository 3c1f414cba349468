"""incompatlab: desk-scale workbench for measurement incompatibility.

Decides N-wise joint measurability of unsharp dichotomic measurements,
locates critical unsharpness thresholds, evaluates and optimizes the
bipartite incompatibility witness with its sum-of-squares certificate, tests
steering assemblages for hidden-state decomposability, and runs the same
questions on finite polytopic GPT fragments by linear programming.
"""

from .backend import active_backend
from .config import DEFAULTS, Tolerances, load_tolerances
from .errors import DomainError, NumericError

__version__ = "0.1.0"

__all__ = [
    "DEFAULTS",
    "DomainError",
    "NumericError",
    "Tolerances",
    "active_backend",
    "load_tolerances",
    "__version__",
]
