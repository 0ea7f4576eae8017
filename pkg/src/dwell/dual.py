"""Canonical dual of the separated-squares problem and recovery of the primal
global solution set.

The dual function

    Pd(sigma) = -1/2 sigma^2 - 1/2 sum_i (psi_i + sigma phi_i)^2 / (alpha_i + sigma)
                - nu sigma

is concave on ``(sigma0, inf)`` with ``sigma0 = max_i(-alpha_i)``. Its
derivative is ``g(sigma) = Lambda(w(sigma)) - sigma`` where
``w(sigma)_i = (psi_i + sigma phi_i) / (alpha_i + sigma)``. ``g`` is convex
and strictly decreasing, so the dual maximizer is either its unique root or
the left endpoint ``sigma0`` (the hard case).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .diagonalize import CanonicalInstance, canonical_objective, lambda_operator
from .exceptions import DomainError, InconsistencyError

HARD_RTOL = 1e-8
TIE_RTOL = 1e-9
DEFAULT_TOL = 1e-10
MAX_ITER = 500


def tie_tolerance(can):
    return TIE_RTOL * max(1.0, float(np.max(np.abs(can.alpha))))


def hard_tolerance(can):
    scale = float(np.max(np.abs(can.psi))) + abs(can.sigma0) * float(np.max(np.abs(can.phi)))
    return HARD_RTOL * max(1.0, scale)


def critical_indices(can):
    """Index sets ``I = {i : alpha_i + sigma0 = 0}`` (up to ties) and its complement."""
    gap = can.alpha + can.sigma0
    mask = gap <= tie_tolerance(can)
    return np.flatnonzero(mask), np.flatnonzero(~mask)


def _numerators(can, sigma):
    return can.psi + sigma * can.phi


def _check_sigma(can, sigma):
    """Return the mask of terms dropped at the left endpoint, or None inside the domain."""
    sigma0 = can.sigma0
    if sigma > sigma0:
        return None
    if sigma < sigma0:
        raise DomainError(f"sigma = {sigma!r} lies below sigma0 = {sigma0!r}")
    I, _ = critical_indices(can)
    num = _numerators(can, sigma)[I]
    if np.any(np.abs(num) > hard_tolerance(can)):
        raise DomainError(
            "dual function is -inf at sigma0: psi_i + sigma0 phi_i != 0 for some critical i"
        )
    mask = np.zeros(can.n, dtype=bool)
    mask[I] = True
    return mask


def w_of_sigma(can: CanonicalInstance, sigma: float) -> np.ndarray:
    """Minimizer of the Lagrangian in w; at ``sigma0`` the limit value ``phi_i`` on I."""
    sigma = float(sigma)
    dropped = _check_sigma(can, sigma)
    num = _numerators(can, sigma)
    if dropped is None:
        return num / (can.alpha + sigma)
    w = np.empty(can.n)
    keep = ~dropped
    w[keep] = num[keep] / (can.alpha[keep] + sigma)
    w[dropped] = can.phi[dropped]
    return w


def dual_value(can: CanonicalInstance, sigma: float) -> float:
    sigma = float(sigma)
    dropped = _check_sigma(can, sigma)
    num = _numerators(can, sigma)
    den = can.alpha + sigma
    if dropped is not None:
        num, den = num[~dropped], den[~dropped]
    return float(-0.5 * sigma * sigma - 0.5 * np.sum(num * num / den)
                 - can.nu * sigma + can.constant_offset)


def dual_derivative(can: CanonicalInstance, sigma: float) -> float:
    return lambda_operator(can, w_of_sigma(can, sigma)) - float(sigma)


def _dual_second_derivative(can, sigma):
    tau = can.tau
    den = can.alpha + sigma
    return float(-np.sum(tau * tau / den**3) - 1.0)


@dataclass(frozen=True)
class Interior:
    sigma_star: float
    iterations: int = 0


@dataclass(frozen=True, eq=False)
class Boundary:
    sigma0: float
    g_limit: float
    I: np.ndarray
    J: np.ndarray


def _safeguarded_newton(g, dg, lo, hi, x, gx, ftol):
    """Root of a strictly decreasing ``g`` bracketed by ``lo < root < hi``.

    Newton steps are accepted only when they land inside the current bracket
    and shrink it fast enough; otherwise bisect.
    """
    it = 0
    dx_old = hi - lo
    while it < MAX_ITER:
        it += 1
        if abs(gx) <= ftol:
            break
        if gx > 0:
            lo = x
        else:
            hi = x
        if hi - lo <= 4 * np.finfo(float).eps * max(1.0, abs(x)):
            break
        d = dg(x)
        step = gx / d if d != 0 else math.inf
        x_new = x - step
        if not (lo < x_new < hi) or abs(step) > 0.5 * dx_old:
            x_new = 0.5 * (lo + hi)
            dx_old = hi - lo
        else:
            dx_old = abs(step)
        x = x_new
        gx = g(x)
    return x, it


def solve_dual(can: CanonicalInstance, tol: float = DEFAULT_TOL) -> Interior | Boundary:
    """Maximize the canonical dual over ``[sigma0, inf)``.

    Returns ``Interior`` with the root of ``g`` when the maximum is attained in
    the open interval, ``Boundary`` when it is attained at ``sigma0``.
    """
    sigma0 = can.sigma0
    I, J = critical_indices(can)
    ftol = tol * max(1.0, abs(can.nu))
    g = lambda s: dual_derivative(can, s)

    num_I = _numerators(can, sigma0)[I]
    pole = bool(np.any(np.abs(num_I) > hard_tolerance(can)))
    if not pole:
        g_limit = g(sigma0)
        if g_limit <= ftol:
            return Boundary(sigma0=sigma0, g_limit=g_limit, I=I, J=J)

    # g(sigma0+) is +inf (pole) or g_limit > 0: the root lies strictly right of sigma0.
    delta = max(1e-12, 1e-9 * (1.0 + abs(sigma0)))
    lo = sigma0
    x = sigma0 + delta
    gx = g(x)
    if gx < 0:
        hi = x
        x = 0.5 * (lo + hi)
        gx = g(x)
    else:
        lo = x
        step = 1.0
        hi = sigma0 + step
        g_hi = g(hi)
        while g_hi >= 0:
            lo = hi
            step *= 2.0
            hi = sigma0 + step
            g_hi = g(hi)
        # Newton from the left converges monotonically for convex decreasing g.
        x = lo
        gx = g(lo)
    dg = lambda s: _dual_second_derivative(can, s)
    root, iterations = _safeguarded_newton(g, dg, lo, hi, x, gx, ftol)
    return Interior(sigma_star=float(root), iterations=iterations)


# ---------------------------------------------------------------------------
# Primal recovery


@dataclass(frozen=True, eq=False)
class UniquePoint:
    w: np.ndarray
    value: float
    xi_star: float

    def points(self):
        return [self.w]


@dataclass(frozen=True, eq=False)
class Sphere:
    """Solutions ``w`` with ``w_J = fixed`` and ``||w_I - center|| = radius``.

    ``w`` is the representative obtained by moving the center a distance
    ``radius`` along the first coordinate of I.
    """

    center: np.ndarray
    radius: float
    fixed: np.ndarray
    I: np.ndarray
    J: np.ndarray
    w: np.ndarray
    value: float
    xi_star: float

    def member(self, direction):
        """Sphere point in the (not necessarily unit) direction ``direction`` over I."""
        u = np.asarray(direction, dtype=float)
        u = u / np.linalg.norm(u)
        w = np.empty(self.I.size + self.J.size)
        w[self.J] = self.fixed
        w[self.I] = self.center + self.radius * u
        return w

    def sample(self, rng, k=1):
        return [self.member(rng.standard_normal(self.I.size)) for _ in range(k)]


GlobalSolutionSet = UniquePoint | Sphere


def primal_from_dual(can: CanonicalInstance, result, tol: float = DEFAULT_TOL):
    """Global solution set of the separated-squares problem from a dual result."""
    if isinstance(result, Interior):
        s = result.sigma_star
        return UniquePoint(w=w_of_sigma(can, s), value=dual_value(can, s), xi_star=s)

    sigma0 = result.sigma0
    I, J = result.I, result.J
    w = w_of_sigma(can, sigma0)
    phi = can.phi
    wJ = w[J]
    rho2 = (np.sum(phi[I] ** 2) - np.sum(wJ * wJ - 2.0 * phi[J] * wJ)
            + 2.0 * sigma0 + 2.0 * can.nu)
    scale = max(1.0, abs(can.nu), abs(sigma0))
    if rho2 < -1e-8 * scale:
        raise InconsistencyError(
            f"squared sphere radius {rho2:.3g} is negative at a boundary optimum"
        )
    value = dual_value(can, sigma0)
    if rho2 <= 2.0 * tol * max(1.0, abs(can.nu)):
        return UniquePoint(w=w, value=value, xi_star=sigma0)

    radius = math.sqrt(rho2)
    rep = w.copy()
    rep[I[0]] += radius
    return Sphere(center=phi[I].copy(), radius=radius, fixed=wJ.copy(), I=I, J=J,
                  w=rep, value=value, xi_star=sigma0)


def gap_function(can: CanonicalInstance, w, sigma: float) -> float:
    w = np.asarray(w, dtype=float)
    return float(np.sum(0.5 * (can.alpha + sigma) * w * w))


def total_complementary(can: CanonicalInstance, w, sigma: float) -> float:
    w = np.asarray(w, dtype=float)
    return float(-0.5 * sigma * sigma
                 + np.sum(0.5 * (can.alpha + sigma) * w * w - (can.psi + sigma * can.phi) * w)
                 - sigma * can.nu + can.constant_offset)


def duality_gap(can, solution):
    """``Pi(w) - value`` at the representative of a solution set."""
    return canonical_objective(can, solution.w) - solution.value
