"""End-to-end global minimization: reduce, diagonalize, solve the dual, lift."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .diagonalize import CanonicalInstance, canonical_objective, recover_x, to_canonical
from .dual import (
    DEFAULT_TOL,
    Boundary,
    Interior,
    Sphere,
    UniquePoint,
    dual_derivative,
    primal_from_dual,
    solve_dual,
)
from .instance import DwpInstance, evaluate_gradient, evaluate_objective
from .reduction import Certificate, LiftMap, Reduced, reduce, lift_solution

GLOBAL_MINIMUM = "GlobalMinimum"
GLOBAL_SPHERE = "GlobalSphere"
UNBOUNDED = "Unbounded"


@dataclass(eq=False)
class Solution:
    """Outcome of :func:`solve` on a raw instance.

    For bounded instances ``x`` is a global minimizer of the original
    problem and ``value`` the global minimum; ``solution`` holds the full set
    in the canonical coordinates ``w`` of the reduced instance, and
    :meth:`to_x` maps any of its members to the original space.
    """

    status: str
    instance: DwpInstance
    branch: str
    value: float = -np.inf
    x: np.ndarray | None = None
    sigma: float | None = None
    canonical: CanonicalInstance | None = None
    dual: Interior | Boundary | None = None
    solution: UniquePoint | Sphere | None = None
    lift: LiftMap | None = None
    certificate: Certificate | None = None
    diagnostics: dict = field(default_factory=dict)

    def to_x(self, w):
        return lift_solution(self.lift, recover_x(self.canonical, w))

    def sphere_samples(self, rng, k=2):
        """``k`` random members of the solution sphere, in x-space."""
        if not isinstance(self.solution, Sphere):
            raise ValueError("solution set is not a sphere")
        return [self.to_x(w) for w in self.solution.sample(rng, k)]


def solve(inst: DwpInstance, tol: float = DEFAULT_TOL) -> Solution:
    outcome = reduce(inst)
    if not isinstance(outcome, Reduced):
        cert = outcome.certificate
        return Solution(
            status=UNBOUNDED,
            instance=inst,
            branch=outcome.branch,
            certificate=cert,
            diagnostics={
                "reduction_branch": outcome.branch,
                "certificate_kind": cert.kind,
                "value_at_t_1e3": evaluate_objective(inst, cert.point(1e3)),
            },
        )

    can = to_canonical(outcome.sub)
    result = solve_dual(can, tol)
    sol = primal_from_dual(can, result, tol)
    x = lift_solution(outcome.lift, recover_x(can, sol.w))

    if isinstance(result, Interior):
        sigma, iterations = result.sigma_star, result.iterations
        I, J = [], list(range(can.n))
        g_at = dual_derivative(can, sigma)
    else:
        sigma, iterations = result.sigma0, 0
        I, J = result.I.tolist(), result.J.tolist()
        g_at = result.g_limit
    primal = evaluate_objective(inst, x)
    grad = evaluate_gradient(inst, x)
    family = outcome.lift.family_basis
    diagnostics = {
        "reduction_branch": outcome.branch,
        "reduced_dimension": can.n,
        "dual_case": "interior" if isinstance(result, Interior) else "boundary",
        "I": I,
        "J": J,
        "dual_iterations": iterations,
        "residuals": {
            "dual_derivative": float(g_at),
            "gradient_norm": float(np.linalg.norm(grad)),
            "duality_gap": float(primal - sol.value),
            "canonical_gap": float(canonical_objective(can, sol.w) - sol.value),
        },
    }
    if family.shape[1]:
        diagnostics["constant_directions"] = family.T.tolist()
    return Solution(
        status=GLOBAL_SPHERE if isinstance(sol, Sphere) else GLOBAL_MINIMUM,
        instance=inst,
        branch=outcome.branch,
        value=sol.value,
        x=x,
        sigma=sigma,
        canonical=can,
        dual=result,
        solution=sol,
        lift=outcome.lift,
        diagnostics=diagnostics,
    )
