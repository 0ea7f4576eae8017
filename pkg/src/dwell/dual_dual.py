"""Dual of the canonical dual: a convex program in lambda over a shifted orthant.

    Pdd(lam) = sum alpha_i lam_i - sum |tau_i| sqrt(2 lam_i + phi_i^2)
               + 1/2 (sum lam_i - nu)^2 - sum tau_i phi_i
    s.t. lam_i + phi_i^2 / 2 >= 0,           tau = psi - alpha * phi

``w_from_lambda`` and ``lambda_from_w`` map it to the primal restricted to
``tau_i (w_i - phi_i) >= 0``, where both objectives agree.
"""
from __future__ import annotations

import numpy as np

from .diagonalize import CanonicalInstance
from .dual import w_of_sigma
from .exceptions import DomainError

FEAS_TOL = 1e-12
TAU_RTOL = 1e-12
BOUNDARY_OFFSET = 1e-14


def lower_bounds(can):
    return -0.5 * can.phi**2


def _tau_zero(can):
    tau = can.tau
    scale = max(1.0, float(np.max(np.abs(can.psi)))
                + float(np.max(np.abs(can.alpha))) * float(np.max(np.abs(can.phi))))
    return np.abs(tau) <= TAU_RTOL * scale


def _radicand(can, lam):
    lam = np.asarray(lam, dtype=float)
    if lam.shape != (can.n,):
        raise DomainError(f"lambda: expected length {can.n}, got shape {lam.shape}")
    rad = 2.0 * lam + can.phi**2
    if np.any(rad < -2.0 * FEAS_TOL):
        raise DomainError("lambda is infeasible: lambda_i + phi_i^2/2 < 0")
    return lam, np.maximum(rad, 0.0)


def pdd_value(can: CanonicalInstance, lam) -> float:
    lam, rad = _radicand(can, lam)
    tau = can.tau
    k = lam.sum() - can.nu
    return float(can.alpha @ lam - np.abs(tau) @ np.sqrt(rad) + 0.5 * k * k
                 - tau @ can.phi + can.constant_offset)


def _barrier_terms(can, lam):
    """``|tau_i| / sqrt(2 lam_i + phi_i^2)`` and its lam-derivative; zero where tau_i = 0."""
    lam, rad = _radicand(can, lam)
    abs_tau = np.where(_tau_zero(can), 0.0, np.abs(can.tau))
    with np.errstate(divide="ignore", invalid="ignore"):
        root = np.sqrt(rad)
        first = np.where(abs_tau > 0, abs_tau / root, 0.0)
        second = np.where(abs_tau > 0, abs_tau / (root * rad), 0.0)
    return lam, first, second


def pdd_gradient(can: CanonicalInstance, lam) -> np.ndarray:
    """Gradient in the interior; ``-inf`` components where the radicand vanishes and tau != 0."""
    lam, barrier, _ = _barrier_terms(can, lam)
    return can.alpha - barrier + (lam.sum() - can.nu)


def _hessian_diagonal(can, lam):
    _, _, curv = _barrier_terms(can, lam)
    return curv + 1.0


def w_from_lambda(can: CanonicalInstance, lam):
    """Primal point ``w(lam)`` and a mask of components where tau_i = 0.

    Where ``tau_i = 0`` both signs of the square root give the same value;
    the plus branch is returned.
    """
    _, rad = _radicand(can, lam)
    root = np.sqrt(rad)
    sign = np.where(can.tau < 0, -1.0, 1.0)
    multivalued = _tau_zero(can)
    sign[multivalued] = 1.0
    return can.phi + sign * root, multivalued


def lambda_from_w(can: CanonicalInstance, w):
    """``lam(w)`` and whether ``w`` satisfies the sign constraints ``tau_i (w_i - phi_i) >= 0``."""
    w = np.asarray(w, dtype=float)
    d = w - can.phi
    lam = 0.5 * d * d - 0.5 * can.phi**2
    ok = bool(np.all(can.tau * d >= -FEAS_TOL * max(1.0, float(np.max(np.abs(can.tau))))))
    return lam, ok


def f_value(can: CanonicalInstance, w) -> float:
    """Primal objective written with completed squares."""
    w = np.asarray(w, dtype=float)
    q = 0.5 * (w - can.phi) ** 2 - 0.5 * can.phi**2
    k = q.sum() - can.nu
    return float(0.5 * k * k + np.sum(can.alpha * q - can.tau * w) + can.constant_offset)


def solve_pdd(can: CanonicalInstance, tol: float = 1e-10, max_iter: int = 100_000):
    """Minimize ``Pdd`` by projected gradient with Armijo backtracking.

    The gradient is scaled by the Hessian diagonal, which keeps projection
    onto the bounds componentwise; trial steps use the Barzilai-Borwein
    length in that metric. Stops when the projected gradient step
    ``||proj(lam - g) - lam||`` is at most ``tol * max(1, |value|)`` or no
    representable decrease is left. Returns ``(lam, value, iterations)``.
    """
    lb = lower_bounds(can)
    # Coordinates with tau != 0 have infinite inward slope at the bound; keep them off it.
    lb_eff = lb.copy()
    nz = ~_tau_zero(can)
    lb_eff[nz] = lb[nz] + BOUNDARY_OFFSET * np.maximum(1.0, np.abs(lb[nz]))

    lam = lambda_from_w(can, w_of_sigma(can, can.sigma0 + 1.0))[0]
    lam = np.maximum(lam, lb_eff)
    val = pdd_value(can, lam)
    grad = pdd_gradient(can, lam)
    step = 1.0

    it = 0
    for it in range(1, max_iter + 1):
        pg = np.maximum(lam - grad, lb_eff) - lam
        if np.linalg.norm(pg) <= tol * max(1.0, abs(val)):
            break
        scaled = grad / _hessian_diagonal(can, lam)
        t = step
        while True:
            cand = np.maximum(lam - t * scaled, lb_eff)
            d = cand - lam
            cand_val = pdd_value(can, cand)
            if cand_val <= val + 1e-4 * (grad @ d):
                break
            t *= 0.5
            if t < 1e-20:
                break
        if t < 1e-20 or not np.any(d) or cand_val >= val:
            # No representable decrease left.
            break
        cand_grad = pdd_gradient(can, cand)
        D = _hessian_diagonal(can, cand)
        y = cand_grad - grad
        sy = float(d @ y)
        step = float(d @ (D * d)) / sy if sy > 0 else 10.0 * t
        step = min(max(step, 1e-12), 1e12)
        lam, val, grad = cand, cand_val, cand_grad
    return lam, val, it
