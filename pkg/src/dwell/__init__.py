"""Global minimization of double-well quartic polynomials by canonical duality."""
from .diagonalize import CanonicalInstance, congruence_transform, to_canonical
from .dual import Boundary, Interior, Sphere, UniquePoint, primal_from_dual, solve_dual
from .exceptions import DomainError, DwellError, InconsistencyError, InstanceError
from .instance import (
    DwpInstance,
    evaluate_gradient,
    evaluate_objective,
    load_instance,
    read_instance,
    save_instance,
    write_instance,
)
from .pipeline import GLOBAL_MINIMUM, GLOBAL_SPHERE, UNBOUNDED, Solution, solve
from .reduction import Reduced, Unbounded, reduce

__all__ = [
    "Boundary", "CanonicalInstance", "DomainError", "DwellError", "DwpInstance",
    "GLOBAL_MINIMUM", "GLOBAL_SPHERE", "InconsistencyError", "InstanceError",
    "Interior", "Reduced", "Solution", "Sphere", "UNBOUNDED", "Unbounded",
    "UniquePoint", "congruence_transform", "evaluate_gradient", "evaluate_objective",
    "load_instance", "primal_from_dual", "read_instance", "reduce", "save_instance",
    "solve", "solve_dual", "to_canonical", "write_instance",
]
