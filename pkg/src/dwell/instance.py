"""Problem data for the double-well potential

    P(x) = 1/2 (1/2 ||Bx - c||^2 - d)^2 + 1/2 x'Ax - f'x + offset

and its JSON file format.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .exceptions import InstanceError

SYMMETRY_RTOL = 1e-12


def _as_matrix(value, name):
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InstanceError(f"{name}: not a numeric array ({exc})") from None
    if arr.ndim != 2:
        raise InstanceError(f"{name}: expected a 2-D array, got {arr.ndim}-D")
    return arr


def _as_vector(value, name):
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InstanceError(f"{name}: not a numeric array ({exc})") from None
    if arr.ndim != 1:
        raise InstanceError(f"{name}: expected a 1-D array, got {arr.ndim}-D")
    return arr


@dataclass(frozen=True, eq=False)
class DwpInstance:
    """Raw double-well data ``(A, B, c, d, f)`` plus an additive constant.

    ``A`` is symmetrized on construction when its asymmetry is within
    ``SYMMETRY_RTOL * max(1, max|A|)``; larger violations are rejected.
    Arrays are copied and made read-only.
    """

    A: np.ndarray
    B: np.ndarray
    c: np.ndarray
    d: float
    f: np.ndarray
    constant_offset: float = 0.0
    n: int = field(init=False)
    m: int = field(init=False)

    def __post_init__(self):
        A = _as_matrix(self.A, "A")
        B = _as_matrix(self.B, "B")
        c = _as_vector(self.c, "c")
        f = _as_vector(self.f, "f")
        try:
            d = float(self.d)
            offset = float(self.constant_offset)
        except (TypeError, ValueError):
            raise InstanceError("d and constant_offset must be real scalars") from None

        m, n = B.shape
        if n < 1 or m < 1:
            raise InstanceError(f"B: need m >= 1 and n >= 1, got shape {B.shape}")
        if A.shape != (n, n):
            raise InstanceError(f"A: expected shape ({n}, {n}) to match B, got {A.shape}")
        if c.shape != (m,):
            raise InstanceError(f"c: expected length {m} to match B, got {c.shape[0]}")
        if f.shape != (n,):
            raise InstanceError(f"f: expected length {n} to match A, got {f.shape[0]}")
        for name, arr in (("A", A), ("B", B), ("c", c), ("f", f)):
            if not np.all(np.isfinite(arr)):
                raise InstanceError(f"{name}: non-finite entries")
        if not (np.isfinite(d) and np.isfinite(offset)):
            raise InstanceError("d and constant_offset must be finite")
        if not np.any(B != 0.0):
            raise InstanceError("B: must have at least one nonzero entry")

        scale = max(1.0, float(np.max(np.abs(A))))
        asym = float(np.max(np.abs(A - A.T)))
        if asym > SYMMETRY_RTOL * scale:
            raise InstanceError(
                f"A: not symmetric (max |A - A^T| = {asym:.3g} exceeds {SYMMETRY_RTOL * scale:.3g})"
            )
        A = 0.5 * (A + A.T)

        for arr in (A, B, c, f):
            arr.setflags(write=False)
        set_ = object.__setattr__
        set_(self, "A", A)
        set_(self, "B", B)
        set_(self, "c", c)
        set_(self, "f", f)
        set_(self, "d", d)
        set_(self, "constant_offset", offset)
        set_(self, "n", n)
        set_(self, "m", m)

    @property
    def gram(self):
        """``B^T B``."""
        return self.B.T @ self.B

    def replace(self, **changes):
        kwargs = dict(A=self.A, B=self.B, c=self.c, d=self.d, f=self.f,
                      constant_offset=self.constant_offset)
        kwargs.update(changes)
        return DwpInstance(**kwargs)


def _point(inst, x):
    x = np.asarray(x, dtype=float)
    if x.shape != (inst.n,):
        raise InstanceError(f"x: expected length {inst.n}, got shape {x.shape}")
    return x


def evaluate_objective(inst: DwpInstance, x) -> float:
    x = _point(inst, x)
    r = inst.B @ x - inst.c
    xi = 0.5 * (r @ r) - inst.d
    return float(0.5 * xi * xi + 0.5 * (x @ inst.A @ x) - inst.f @ x + inst.constant_offset)


def evaluate_gradient(inst: DwpInstance, x) -> np.ndarray:
    x = _point(inst, x)
    r = inst.B @ x - inst.c
    xi = 0.5 * (r @ r) - inst.d
    return xi * (inst.B.T @ r) + inst.A @ x - inst.f


def objective_rows(inst: DwpInstance, X) -> np.ndarray:
    """Objective at every row of ``X`` (shape ``(k, n)``)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    R = X @ inst.B.T - inst.c
    xi = 0.5 * np.einsum("ij,ij->i", R, R) - inst.d
    quad = 0.5 * np.einsum("ij,ij->i", X @ inst.A, X)
    return 0.5 * xi * xi + quad - X @ inst.f + inst.constant_offset


def gradient_rows(inst: DwpInstance, X) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    R = X @ inst.B.T - inst.c
    xi = 0.5 * np.einsum("ij,ij->i", R, R) - inst.d
    return xi[:, None] * (R @ inst.B) + X @ inst.A - inst.f


# ---------------------------------------------------------------------------
# JSON format

_REQUIRED = ("n", "m", "A", "B", "c", "d", "f")


def instance_from_dict(doc) -> DwpInstance:
    if not isinstance(doc, dict):
        raise InstanceError("instance document must be a JSON object")
    missing = [k for k in _REQUIRED if k not in doc]
    if missing:
        raise InstanceError(f"missing field(s): {', '.join(missing)}")
    try:
        n, m = int(doc["n"]), int(doc["m"])
    except (TypeError, ValueError):
        raise InstanceError("n, m: must be integers") from None
    if n != doc["n"] or m != doc["m"]:
        raise InstanceError("n, m: must be integers")

    A = _as_matrix(doc["A"], "A")
    B = _as_matrix(doc["B"], "B")
    if A.shape != (n, n):
        raise InstanceError(f"A: expected shape ({n}, {n}) from n, got {A.shape}")
    if B.shape != (m, n):
        raise InstanceError(f"B: expected shape ({m}, {n}) from m, n, got {B.shape}")
    c = _as_vector(doc["c"], "c")
    f = _as_vector(doc["f"], "f")
    if c.shape != (m,):
        raise InstanceError(f"c: expected length {m}, got {c.shape[0]}")
    if f.shape != (n,):
        raise InstanceError(f"f: expected length {n}, got {f.shape[0]}")
    return DwpInstance(A=A, B=B, c=c, d=doc["d"], f=f,
                       constant_offset=doc.get("constant_offset", 0.0))


def instance_to_dict(inst: DwpInstance) -> dict:
    return {
        "n": inst.n,
        "m": inst.m,
        "A": inst.A.tolist(),
        "B": inst.B.tolist(),
        "c": inst.c.tolist(),
        "d": inst.d,
        "f": inst.f.tolist(),
        "constant_offset": inst.constant_offset,
    }


def load_instance(data) -> DwpInstance:
    """Parse an instance from JSON text (``str`` or UTF-8 ``bytes``)."""
    if isinstance(data, (bytes, bytearray)):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"parse error: {exc}") from None
    return instance_from_dict(doc)


def save_instance(inst: DwpInstance) -> bytes:
    return (json.dumps(instance_to_dict(inst), indent=2) + "\n").encode("utf-8")


def read_instance(path) -> DwpInstance:
    with open(path, "rb") as fh:
        return load_instance(fh.read())


def write_instance(inst: DwpInstance, path):
    with open(path, "wb") as fh:
        fh.write(save_instance(inst))
