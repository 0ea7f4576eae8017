"""Finite-difference Ginzburg-Landau energy on the unit square and the
double-well instance built from it.

Nodes ``(i, j)``, ``i = 1..s+1`` along x and ``j = 1..t+1`` along y, are
stored at linear (0-based) index ``(i - 1) + (j - 1)(s + 1)``; reshaping a
field to ``(t + 1, s + 1)`` gives ``grid[j - 1, i - 1] = e_{i,j}``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .instance import DwpInstance, evaluate_objective
from .exceptions import InstanceError


@dataclass(frozen=True)
class GridSpec:
    s: int
    t: int
    gl_alpha: float
    gl_beta: float

    def __post_init__(self):
        if int(self.s) != self.s or int(self.t) != self.t or self.s < 1 or self.t < 1:
            raise InstanceError(f"grid: s and t must be positive integers, got s={self.s}, t={self.t}")
        if not self.gl_alpha > 0:
            raise InstanceError(f"grid: alpha must be positive, got {self.gl_alpha}")
        if not self.gl_beta > 0:
            raise InstanceError(f"grid: beta must be positive, got {self.gl_beta}")

    @property
    def size(self):
        return (self.s + 1) * (self.t + 1)


def node_index(spec: GridSpec, i: int, j: int) -> int:
    """0-based linear index of node ``e_{i,j}`` (1-based ``i``, ``j``)."""
    return (i - 1) + (j - 1) * (spec.s + 1)


def _grid(spec, e):
    e = np.asarray(e, dtype=float)
    if e.shape != (spec.size,):
        raise InstanceError(f"field: expected length {spec.size}, got shape {e.shape}")
    return e.reshape(spec.t + 1, spec.s + 1)


def discrete_energy(spec: GridSpec, e) -> float:
    """Riemann-sum energy over the cells ``i = 1..s``, ``j = 1..t``."""
    G = _grid(spec, e)
    s, t, a, b = spec.s, spec.t, spec.gl_alpha, spec.gl_beta
    core = G[:t, :s]
    dx = G[:t, 1:] - core
    dy = G[1:, :s] - core
    well = 0.5 * core * core - b
    return float(s / (2 * t) * np.sum(dx * dx) + t / (2 * s) * np.sum(dy * dy)
                 + a / (2 * s * t) * np.sum(well * well))


def index_set(spec: GridSpec) -> np.ndarray:
    """1-based ``{1, ..., (s+1)t}`` minus the multiples of ``s + 1``."""
    k = np.arange(1, (spec.s + 1) * spec.t + 1)
    return k[k % (spec.s + 1) != 0]


def difference_matrices(spec: GridSpec):
    """``(sum_T B_i, sum_T C_i)``: horizontal and vertical difference stencils."""
    n = spec.size
    idx = index_set(spec) - 1
    Bsum = np.zeros((n, n))
    Csum = np.zeros((n, n))
    for M, step in ((Bsum, 1), (Csum, spec.s + 1)):
        nb = idx + step
        np.add.at(M, (idx, idx), 1.0)
        np.add.at(M, (nb, nb), 1.0)
        np.add.at(M, (idx, nb), -1.0)
        np.add.at(M, (nb, idx), -1.0)
    return Bsum, Csum


def build_dwp_instance(spec: GridSpec) -> DwpInstance:
    """Double-well majorant of the discrete energy with ``x = e``."""
    s, t, a, b = spec.s, spec.t, spec.gl_alpha, spec.gl_beta
    n = spec.size
    Bsum, Csum = difference_matrices(spec)
    A = (s / t) * Bsum + (t / s) * Csum - (a * b / (t * s)) * np.eye(n)
    return DwpInstance(
        A=A,
        B=(a / (t * s)) ** 0.25 * np.eye(n),
        c=np.zeros(n),
        d=0.0,
        f=np.zeros(n),
        constant_offset=a * b * b / 2,
    )


def upper_bound_check(spec: GridSpec, e):
    """Return ``(bound, energy)`` for the field ``e``.

    ``bound`` is the double-well majorant evaluated at ``e``. With
    ``a = ||e||^2`` and ``b`` the sum of ``e_ij^2`` over cell nodes,
    ``bound - energy >= alpha / (8 s t) * (a - b) * (a + b - 4 beta)``, so it
    dominates whenever ``a + b >= 4 beta``. Small fields with mass on the
    last row or column can violate it; the inequality is reported, not enforced.
    """
    energy = discrete_energy(spec, e)
    bound = evaluate_objective(build_dwp_instance(spec), np.asarray(e, dtype=float))
    return bound, energy
