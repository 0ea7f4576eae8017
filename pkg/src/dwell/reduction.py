"""Elimination of the null space of B.

Writing ``x = U y + V z`` with ``U`` spanning null(B), the quartic term
depends on ``z`` only and the inner minimization over ``y`` is a convex
quadratic (or unbounded). After it, the remaining problem in ``z`` has a
positive definite Gram matrix ``(BV)^T (BV)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .instance import DwpInstance, evaluate_objective

RANK_RTOL = 1e-10
PSD_RTOL = 1e-9
ZERO_RTOL = 1e-9

# Certificates are scaled so the path reaches below -CERT_LEVEL by t = CERT_T.
CERT_T = 1e3
CERT_LEVEL = 1e6


@dataclass(frozen=True, eq=False)
class NullSpaceSplit:
    U: np.ndarray
    V: np.ndarray
    r: int


def null_space_basis(B) -> NullSpaceSplit:
    """Orthonormal bases of null(B) and its orthogonal complement.

    Rank is the number of singular values above ``RANK_RTOL * s_max``.
    """
    B = np.atleast_2d(np.asarray(B, dtype=float))
    n = B.shape[1]
    _, s, vh = np.linalg.svd(B, full_matrices=True)
    rank = int(np.sum(s > RANK_RTOL * s[0])) if s.size and s[0] > 0 else 0
    V = vh[:rank].T.copy()
    U = vh[rank:].T.copy()
    return NullSpaceSplit(U=U, V=V, r=n - rank)


def _pinv_sym(M, rtol):
    """Pseudoinverse and null-space basis of a symmetric PSD matrix."""
    lam, Q = np.linalg.eigh(M)
    cutoff = rtol * max(1.0, float(np.max(np.abs(lam)))) if lam.size else 0.0
    keep = lam > cutoff
    Qk = Q[:, keep]
    pinv = (Qk / lam[keep]) @ Qk.T
    return pinv, Q[:, ~keep]


@dataclass(frozen=True, eq=False)
class LiftMap:
    """Maps a solution ``z`` of the reduced instance back to ``x``.

    ``x = U y*(z) + V z`` with ``y*(z) = -A_uu^+ U^T (A V z - f)``. When
    ``W`` (a basis of null(A_uu)) is nonempty every ``x + U W beta`` has the
    same objective value.
    """

    U: np.ndarray
    V: np.ndarray
    pinv: np.ndarray
    W: np.ndarray
    A: np.ndarray
    f: np.ndarray

    @property
    def family_basis(self):
        """Columns spanning the directions of constant objective in x-space."""
        return self.U @ self.W

    def __call__(self, z):
        return lift_solution(self, z)


@dataclass(frozen=True, eq=False)
class Certificate:
    """Descent path ``t -> base + t * direction`` along which P -> -inf."""

    base: np.ndarray
    direction: np.ndarray
    kind: str

    def point(self, t):
        return self.base + t * self.direction


@dataclass(frozen=True, eq=False)
class Unbounded:
    certificate: Certificate
    branch: str


@dataclass(frozen=True, eq=False)
class Reduced:
    sub: DwpInstance
    lift: LiftMap
    branch: str


def _identity_lift(inst):
    n = inst.n
    return LiftMap(U=np.zeros((n, 0)), V=np.eye(n), pinv=np.zeros((0, 0)),
                   W=np.zeros((0, 0)), A=inst.A, f=inst.f)


def _scale_direction(inst, base, direction, drop):
    """Scale ``direction`` so that P(base + CERT_T * k * direction) <= -CERT_LEVEL.

    ``drop(k)`` is the exact objective decrease at t = CERT_T for scale k.
    """
    f0 = evaluate_objective(inst, base)
    k = 1.0
    need = f0 + CERT_LEVEL
    for _ in range(200):
        if drop(k) > need:
            break
        k *= 2.0
    return k * direction


def _quadratic_certificate(inst, U, A_uu):
    lam, Q = np.linalg.eigh(A_uu)
    v = U @ Q[:, 0]
    # Along x = t v: 1/2 lam t^2 - t f'v; pick the sign with a nonpositive linear term.
    if inst.f @ v < 0:
        v = -v
    base = np.zeros(inst.n)
    lin = float(inst.f @ v)
    curv = float(lam[0])
    T = CERT_T
    direction = _scale_direction(inst, base, v, lambda k: k * T * lin - 0.5 * curv * (k * T) ** 2)
    return Certificate(base=base, direction=direction, kind="negative-curvature")


def _linear_certificate(inst, split, M, h, W, tol):
    """Descent along ``U W d``: the objective is affine in t with slope d'(M z0 - h)."""
    U, V = split.U, split.V
    if np.max(np.abs(h)) > tol:
        z0 = np.zeros(V.shape[1])
        s = -h
    else:
        _, _, vh = np.linalg.svd(M)
        z0 = vh[0]
        s = M @ z0
    d = -s / np.linalg.norm(s)
    base = V @ z0
    u = U @ (W @ d)
    slope = float(np.linalg.norm(s))
    T = CERT_T
    direction = _scale_direction(inst, base, u, lambda k: k * T * slope)
    return Certificate(base=base, direction=direction, kind="linear")


def reduce(inst: DwpInstance) -> Reduced | Unbounded:
    """Reduce ``inst`` to an equivalent instance with positive definite B^T B.

    Branches:

    * ``"full-rank"``: B has trivial null space, returned unchanged.
    * ``"indefinite"``: A_uu has a negative eigenvalue (unbounded).
    * ``"linear"``: A_uu is singular and the inner problem in y has an
      unbounded linear part (unbounded).
    * ``"zero"``: A_uu = 0, A_uv = 0, U'f = 0.
    * ``"pseudoinverse"``: A_uu is PSD and nonzero, and the inner problem is solvable.
    """
    split = null_space_basis(inst.B)
    if split.r == 0:
        return Reduced(sub=inst, lift=_identity_lift(inst), branch="full-rank")

    U, V = split.U, split.V
    A, f = inst.A, inst.f
    A_uu = U.T @ A @ U
    A_uu = 0.5 * (A_uu + A_uu.T)
    A_uv = U.T @ A @ V
    f_u = U.T @ f

    lam = np.linalg.eigvalsh(A_uu)
    lam_scale = max(1.0, float(np.max(np.abs(lam))))
    if lam[0] < -PSD_RTOL * lam_scale:
        return Unbounded(_quadratic_certificate(inst, U, A_uu), branch="indefinite")

    pinv, W = _pinv_sym(A_uu, PSD_RTOL)
    is_zero = W.shape[1] == split.r
    tol = ZERO_RTOL * max(1.0, float(np.max(np.abs(A))), float(np.max(np.abs(f))))
    M = W.T @ A_uv
    h = W.T @ f_u
    if W.shape[1] > 0 and (np.max(np.abs(M), initial=0.0) > tol or np.max(np.abs(h)) > tol):
        cert = _linear_certificate(inst, split, M, h, W, tol)
        return Unbounded(cert, branch="linear")

    # A_hat = (I - A U A_uu^+ U^T) A, f_hat likewise; both vanish to A, f when A_uu = 0.
    AU = A @ U
    proj = np.eye(inst.n) - AU @ pinv @ U.T
    A_hat = proj @ A
    f_hat = proj @ f
    A_sub = V.T @ A_hat @ V
    A_sub = 0.5 * (A_sub + A_sub.T)
    sub = DwpInstance(
        A=A_sub,
        B=inst.B @ V,
        c=inst.c,
        d=inst.d,
        f=V.T @ f_hat,
        constant_offset=inst.constant_offset - 0.5 * f_u @ pinv @ f_u,
    )
    lift = LiftMap(U=U, V=V, pinv=pinv, W=W, A=A, f=f)
    return Reduced(sub=sub, lift=lift, branch="zero" if is_zero else "pseudoinverse")


def lift_solution(lift: LiftMap, z) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    if z.shape != (lift.V.shape[1],):
        raise ValueError(f"z: expected length {lift.V.shape[1]}, got shape {z.shape}")
    x_v = lift.V @ z
    if lift.U.shape[1] == 0:
        return x_v
    y = -lift.pinv @ (lift.U.T @ (lift.A @ x_v - lift.f))
    return lift.U @ y + x_v
