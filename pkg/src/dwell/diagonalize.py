"""Simultaneous diagonalization of (A, B^T B) by congruence.

With ``P^T B^T B P = I`` and ``P^T A P = Diag(alpha)``, the substitution
``x = P w`` turns the double well into a sum of separated squares::

    Pi(w) = 1/2 Lambda(w)^2 + sum_i (1/2 alpha_i w_i^2 - psi_i w_i)
    Lambda(w) = sum_i (1/2 w_i^2 - phi_i w_i) - nu
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .exceptions import InstanceError
from .instance import DwpInstance

PD_RTOL = 1e-10


def _inverse_sqrt_factor(G):
    """``P1`` with ``P1^T G P1 = I``: ``L^{-T}`` from Cholesky, else eigen-based."""
    try:
        L = sla.cholesky(G, lower=True)
        return sla.solve_triangular(L, np.eye(G.shape[0]), lower=True).T
    except np.linalg.LinAlgError:
        pass
    lam, Q = np.linalg.eigh(G)
    if lam[0] <= PD_RTOL * lam[-1]:
        raise InstanceError(
            "Gram matrix B^T B is not positive definite; reduce the instance first"
        )
    return Q / np.sqrt(lam)


def _fix_signs(Q):
    idx = np.argmax(np.abs(Q), axis=0)
    signs = np.sign(Q[idx, np.arange(Q.shape[1])])
    signs[signs == 0] = 1.0
    return Q * signs


def congruence_transform(A, G):
    """Return ``(P, alpha)`` with ``P^T G P = I`` and ``P^T A P = Diag(alpha)``.

    ``G`` must be symmetric positive definite. ``alpha`` is ascending and each
    eigenvector column has its largest-magnitude entry positive.
    """
    A = np.asarray(A, dtype=float)
    G = np.asarray(G, dtype=float)
    G = 0.5 * (G + G.T)
    lam = np.linalg.eigvalsh(G)
    if lam[-1] <= 0 or lam[0] <= PD_RTOL * lam[-1]:
        raise InstanceError(
            "Gram matrix B^T B is not positive definite; reduce the instance first"
        )
    P1 = _inverse_sqrt_factor(G)
    M = P1.T @ A @ P1
    alpha, P2 = np.linalg.eigh(0.5 * (M + M.T))
    P2 = _fix_signs(P2)
    return P1 @ P2, alpha


@dataclass(frozen=True, eq=False)
class CanonicalInstance:
    alpha: np.ndarray
    psi: np.ndarray
    phi: np.ndarray
    nu: float
    P: np.ndarray
    constant_offset: float = 0.0

    def __post_init__(self):
        for name in ("alpha", "psi", "phi"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        P = np.array(self.P, dtype=float)
        P.setflags(write=False)
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "nu", float(self.nu))
        object.__setattr__(self, "constant_offset", float(self.constant_offset))
        n = self.alpha.shape[0]
        if self.psi.shape != (n,) or self.phi.shape != (n,) or P.shape != (n, n):
            raise InstanceError("canonical data: inconsistent dimensions")

    @classmethod
    def from_parameters(cls, alpha, psi, phi, nu, constant_offset=0.0):
        """Canonical instance with ``P = I``, for working directly in w-space."""
        alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
        return cls(alpha=alpha, psi=psi, phi=phi, nu=nu,
                   P=np.eye(alpha.shape[0]), constant_offset=constant_offset)

    @property
    def n(self):
        return self.alpha.shape[0]

    @property
    def sigma0(self):
        return float(np.max(-self.alpha)) + 0.0  # no negative zero

    @property
    def tau(self):
        return self.psi - self.alpha * self.phi


def to_canonical(inst: DwpInstance) -> CanonicalInstance:
    P, alpha = congruence_transform(inst.A, inst.gram)
    return CanonicalInstance(
        alpha=alpha,
        psi=P.T @ inst.f,
        phi=P.T @ (inst.B.T @ inst.c),
        nu=inst.d - 0.5 * inst.c @ inst.c,
        P=P,
        constant_offset=inst.constant_offset,
    )


def lambda_operator(can: CanonicalInstance, w) -> float:
    w = np.asarray(w, dtype=float)
    return float(np.sum(0.5 * w * w - can.phi * w) - can.nu)


def canonical_objective(can: CanonicalInstance, w) -> float:
    w = np.asarray(w, dtype=float)
    xi = lambda_operator(can, w)
    return float(0.5 * xi * xi + np.sum(0.5 * can.alpha * w * w - can.psi * w)
                 + can.constant_offset)


def canonical_gradient(can: CanonicalInstance, w) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    xi = lambda_operator(can, w)
    return xi * (w - can.phi) + can.alpha * w - can.psi


def recover_x(can: CanonicalInstance, w) -> np.ndarray:
    return can.P @ np.asarray(w, dtype=float)


def to_w(can: CanonicalInstance, x) -> np.ndarray:
    """Inverse of :func:`recover_x`."""
    return np.linalg.solve(can.P, np.asarray(x, dtype=float))
