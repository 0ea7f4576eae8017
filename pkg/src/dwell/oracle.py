"""Brute-force checks and test-instance generators.

Nothing here is used by the solver itself. The grid and multistart searches
work on the raw instance; the stationary scan works on the canonical form
but finds roots of ``Lambda(w(xi)) - xi`` on every pole-free interval, not
just the dual-feasible one.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .diagonalize import CanonicalInstance, canonical_objective
from .dual import HARD_RTOL, TIE_RTOL
from .instance import DwpInstance, gradient_rows, objective_rows

GRID_MAX_DIM = 3
GRID_CHUNK = 1 << 18


@dataclass(frozen=True, eq=False)
class StationaryPoint:
    xi: float
    w: np.ndarray
    value: float
    kind: str  # "regular" or "singular"


def _g(can, xi):
    xi = np.asarray(xi, dtype=float)[..., None]
    w = (can.psi + xi * can.phi) / (can.alpha + xi)
    lam = np.sum(0.5 * w * w - can.phi * w, axis=-1) - can.nu
    return lam - xi[..., 0]


def _w(can, xi):
    return (can.psi + xi * can.phi) / (can.alpha + xi)


def _singular_candidate(can, xi):
    """Stationary point with ``xi = -alpha_k`` and free coordinates K, if one exists."""
    tie = TIE_RTOL * max(1.0, float(np.max(np.abs(can.alpha))))
    hard = HARD_RTOL * max(1.0, float(np.max(np.abs(can.psi))) + abs(xi) * float(np.max(np.abs(can.phi))))
    K = np.abs(can.alpha + xi) <= tie
    if np.any(np.abs(can.psi[K] + xi * can.phi[K]) > hard):
        return None
    w = np.empty(can.n)
    J = ~K
    w[J] = (can.psi[J] + xi * can.phi[J]) / (can.alpha[J] + xi)
    w[K] = can.phi[K]
    wj, pj = w[J], can.phi[J]
    rho2 = 2.0 * (xi + can.nu - np.sum(0.5 * wj * wj - pj * wj)) + np.sum(can.phi[K] ** 2)
    if rho2 < 0:
        return None
    w[np.flatnonzero(K)[0]] += np.sqrt(rho2)
    return StationaryPoint(xi=float(xi), w=w, value=canonical_objective(can, w), kind="singular")


def stationary_scan(can: CanonicalInstance, xi_range=(-50.0, 50.0), samples: int = 10_000):
    """Stationary points of the canonical objective with ``xi`` in ``xi_range``.

    Roots of ``g`` are found by sign changes on a uniform grid, so two roots
    closer than the grid spacing can be missed.
    """
    if samples < 100:
        raise ValueError("samples must be at least 100")
    lo, hi = map(float, xi_range)
    poles = np.unique(-can.alpha)
    inner = poles[(poles > lo) & (poles < hi)]
    edges = [lo, *inner, hi]
    span = hi - lo
    found = []
    for a, b in zip(edges[:-1], edges[1:]):
        margin = 1e-9 * max(1.0, abs(a), abs(b))
        a_ = a + margin if a in inner else a
        b_ = b - margin if b in inner else b
        if b_ <= a_:
            continue
        k = max(20, int(samples * (b - a) / span))
        xs = np.linspace(a_, b_, k + 1)
        gs = _g(can, xs)
        for x0, x1, g0, g1 in zip(xs[:-1], xs[1:], gs[:-1], gs[1:]):
            if g0 == 0.0:
                root = x0
            elif g0 * g1 < 0:
                root = bisect(lambda x: float(_g(can, x)), x0, x1, xtol=1e-10)
            else:
                continue
            w = _w(can, root)
            found.append(StationaryPoint(xi=float(root), w=w,
                                         value=canonical_objective(can, w), kind="regular"))
        if gs[-1] == 0.0 and b_ == hi:
            w = _w(can, b_)
            found.append(StationaryPoint(xi=float(b_), w=w,
                                         value=canonical_objective(can, w), kind="regular"))
    for p in poles:
        if lo <= p <= hi:
            cand = _singular_candidate(can, p)
            if cand is not None:
                found.append(cand)
    found.sort(key=lambda sp: sp.xi)
    return found


# ---------------------------------------------------------------------------
# Raw-instance searches


def _box(box, n):
    box = np.asarray(box, dtype=float)
    if box.shape == (2,):
        box = np.tile(box, (n, 1))
    if box.shape != (n, 2):
        raise ValueError(f"box: expected (lo, hi) or {n} such pairs")
    return box


def grid_min(inst: DwpInstance, box, steps: int):
    """Best point of the ``(steps + 1)^n`` lattice over ``box``."""
    n = inst.n
    if n > GRID_MAX_DIM:
        raise ValueError(f"grid search limited to n <= {GRID_MAX_DIM}, got n = {n}")
    if steps < 10:
        raise ValueError("steps must be at least 10")
    box = _box(box, n)
    axes = [np.linspace(lo, hi, steps + 1) for lo, hi in box]
    best_val, best_x = np.inf, None
    # Enumerate in chunks along the first axis to bound memory.
    rest = np.array(list(itertools.product(*axes[1:]))) if n > 1 else np.zeros((1, 0))
    per = max(1, GRID_CHUNK // max(1, rest.shape[0]))
    for start in range(0, steps + 1, per):
        head = axes[0][start:start + per]
        X = np.hstack([np.repeat(head, rest.shape[0])[:, None], np.tile(rest, (head.size, 1))])
        vals = objective_rows(inst, X)
        j = int(np.argmin(vals))
        if vals[j] < best_val:
            best_val, best_x = float(vals[j]), X[j].copy()
    return best_x, best_val


def instance_scale(inst: DwpInstance) -> float:
    """Rough radius of the region containing the wells."""
    s = np.linalg.svd(inst.B, compute_uv=False)
    s_min = s[s > 1e-10 * s[0]].min()
    A_norm = np.linalg.norm(inst.A, 2)
    R = (1.0 + np.linalg.norm(inst.c) + np.sqrt(2.0 * abs(inst.d)) + np.sqrt(A_norm)
         + np.cbrt(np.linalg.norm(inst.f))) / s_min
    return float(min(R, 1e3))


def local_descent(inst: DwpInstance, X0, max_iter: int = 20_000, gtol: float = 1e-10):
    """Gradient descent with backtracking from every row of ``X0`` at once.

    Trial steps use the Barzilai-Borwein length; each accepted step satisfies
    the Armijo condition. Rows whose iterates leave a ball of radius 1e8 are
    frozen. Returns ``(X, values)``.
    """
    X = np.array(X0, dtype=float, copy=True)
    F = objective_rows(inst, X)
    G = gradient_rows(inst, X)
    step = 1.0 / np.maximum(1.0, np.linalg.norm(G, axis=1))
    for _ in range(max_iter):
        gn = np.linalg.norm(G, axis=1)
        active = (gn > gtol * np.maximum(1.0, np.abs(F))) & (np.abs(X).max(axis=1) < 1e8)
        if not np.any(active):
            break
        idx = np.flatnonzero(active)
        t = step[idx].copy()
        Xa, Fa, Ga = X[idx], F[idx], G[idx]
        g2 = gn[idx] ** 2
        Xn = Xa - t[:, None] * Ga
        Fn = objective_rows(inst, Xn)
        bad = ~(Fn <= Fa - 1e-4 * t * g2)
        for _ in range(80):
            if not np.any(bad):
                break
            t[bad] *= 0.5
            Xn[bad] = Xa[bad] - t[bad, None] * Ga[bad]
            Fn[bad] = objective_rows(inst, Xn[bad])
            bad = ~(Fn <= Fa - 1e-4 * t * g2)
        # A decrease at roundoff level counts as no progress.
        bad |= Fa - Fn <= 1e-15 * np.maximum(1.0, np.abs(Fa))
        moved = ~bad
        if not np.any(moved):
            break
        Gn = gradient_rows(inst, Xn)
        S, Y = Xn - Xa, Gn - Ga
        sy = np.einsum("ij,ij->i", S, Y)
        ss = np.einsum("ij,ij->i", S, S)
        bb = np.where(sy > 0, ss / np.where(sy > 0, sy, 1.0), 4.0 * t)
        new_step = np.clip(bb, 1e-12, 1e12)
        upd = idx[moved]
        X[upd], F[upd], G[upd] = Xn[moved], Fn[moved], Gn[moved]
        step[upd] = new_step[moved]
        # Rows with no acceptable step are converged to roundoff.
        stalled = idx[bad]
        step[stalled] = 0.0
        if stalled.size:
            G[stalled] = 0.0
    return X, F


def multistart_min(inst: DwpInstance, starts: int, seed: int, box_scale: float | None = None):
    """Best local minimum from ``starts`` random points in ``[-R, R]^n``."""
    if starts < 1:
        raise ValueError("starts must be at least 1")
    rng = np.random.default_rng(seed)
    R = instance_scale(inst) if box_scale is None else float(box_scale)
    X0 = rng.uniform(-R, R, size=(starts, inst.n))
    X, F = local_descent(inst, X0)
    j = int(np.argmin(F))
    return X[j], float(F[j])


# ---------------------------------------------------------------------------
# Instance generators


def random_instance(rng, n: int, m: int | None = None) -> DwpInstance:
    """A, B, c, f uniform on [-3, 3]; d uniform on [-5, 40]."""
    m = n if m is None else m
    M = rng.uniform(-3, 3, size=(n, n))
    return DwpInstance(
        A=0.5 * (M + M.T),
        B=rng.uniform(-3, 3, size=(m, n)),
        c=rng.uniform(-3, 3, size=m),
        d=rng.uniform(-5, 40),
        f=rng.uniform(-3, 3, size=n),
    )


def _well_conditioned(rng, n, max_cond=1e2):
    while True:
        P = rng.uniform(-1, 1, size=(n, n)) + 1.5 * np.eye(n)
        if np.linalg.cond(P) < max_cond:
            return P


def instance_from_canonical(alpha, psi, phi, nu, P) -> DwpInstance:
    """Raw instance whose canonical form (for the congruence ``P``) is the given data."""
    Pinv = np.linalg.inv(P)
    A = Pinv.T @ np.diag(alpha) @ Pinv
    return DwpInstance(
        A=0.5 * (A + A.T),
        B=Pinv,
        c=np.asarray(phi, dtype=float),
        d=nu + 0.5 * np.dot(phi, phi),
        f=Pinv.T @ psi,
    )


def rigged_hard_case(rng, n: int, k: int = 1, margin: float | None = None) -> DwpInstance:
    """Instance whose dual maximum sits at sigma0 with a solution sphere.

    The ``k`` smallest eigenvalues tie, ``psi_i = -sigma0 phi_i`` on them, and
    ``nu`` is set so the dual derivative at sigma0 equals ``-margin``.
    """
    k = min(k, n)
    alpha = rng.uniform(-3, 3, size=n)
    alpha[:k] = alpha.min() - rng.uniform(0.5, 1.0)
    sigma0 = -alpha[0]
    phi = rng.uniform(-3, 3, size=n)
    psi = rng.uniform(-3, 3, size=n)
    psi[:k] = -sigma0 * phi[:k]
    J = slice(k, n)
    wJ = (psi[J] + sigma0 * phi[J]) / (alpha[J] + sigma0)
    g0 = -0.5 * np.sum(phi[:k] ** 2) + np.sum(0.5 * wJ**2 - phi[J] * wJ) - sigma0
    if margin is None:
        margin = rng.uniform(1.0, 20.0)
    nu = g0 + margin
    return instance_from_canonical(alpha, psi, phi, nu, _well_conditioned(rng, n))


def rank_deficient_instance(rng, n: int, rank: int, null_rank: int | None = None,
                            m: int | None = None) -> DwpInstance:
    """Bounded instance with ``rank(B) = rank < n``.

    In the basis ``[U, V]`` (U spanning null(B)) the block ``A_uu`` is PSD of
    rank ``null_rank`` and the cross block and ``U'f`` lie in its range, so
    the inner problem over ``y`` is solvable. ``null_rank = 0`` gives ``A_uu = 0``.
    """
    r = n - rank
    if not 0 < r < n:
        raise ValueError("need 1 <= rank < n")
    m = rank + 1 if m is None else m
    q = r if null_rank is None else null_rank
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    V, U = Q[:, :rank], Q[:, rank:]
    B = rng.uniform(-3, 3, size=(m, rank)) @ V.T
    Z = rng.uniform(-2, 2, size=(r, q))
    M = Z @ Z.T
    K = M @ rng.uniform(-1, 1, size=(r, rank))
    N = rng.uniform(-3, 3, size=(rank, rank))
    N = 0.5 * (N + N.T)
    Ablk = np.block([[M, K], [K.T, N]])
    UV = np.hstack([U, V])
    A = UV @ Ablk @ UV.T
    f = U @ (M @ rng.uniform(-1, 1, size=r)) + V @ rng.uniform(-3, 3, size=rank)
    return DwpInstance(
        A=0.5 * (A + A.T),
        B=B,
        c=rng.uniform(-3, 3, size=m),
        d=rng.uniform(-5, 40),
        f=f,
    )
