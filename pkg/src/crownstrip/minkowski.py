"""Linear algebra of the Minkowski space R^{2,1}.

Vectors are plain ``numpy`` arrays of shape ``(3,)`` holding ``(x, y, z)``.
The quadratic form is ``x**2 + y**2 - z**2``.  A vector doubles as a Killing
field of the hyperbolic plane, acting on a point ``p`` by ``mcross(v, p)``.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from crownstrip.errors import ZeroVector

#: relative tolerance for causal classification
CAUSAL_TOL = 1e-9

_SIGNATURE = np.array([1.0, 1.0, -1.0])


class CausalClass(Enum):
    SPACELIKE = "Spacelike"
    LIGHTLIKE_POSITIVE = "LightlikePositive"
    LIGHTLIKE_NEGATIVE = "LightlikeNegative"
    TIMELIKE_POSITIVE = "TimelikePositive"
    TIMELIKE_NEGATIVE = "TimelikeNegative"
    ZERO = "Zero"


def vec(x: float, y: float, z: float) -> np.ndarray:
    """Build a vector from its three coordinates."""
    return np.array([x, y, z], dtype=float)


def as_vec(v) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("vector components must be finite")
    return arr


def bilinear(u, v) -> float:
    """The form ``u.x*v.x + u.y*v.y - u.z*v.z``."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return float(u[0] * v[0] + u[1] * v[1] - u[2] * v[2])


def norm2(v) -> float:
    """Squared Minkowski norm (may be negative)."""
    return bilinear(v, v)


def spacelike_norm(v) -> float:
    """``sqrt(<v, v>)`` for spacelike or lightlike vectors; clipped at zero."""
    return float(np.sqrt(max(norm2(v), 0.0)))


def mcross(u, v) -> np.ndarray:
    """Minkowski cross product.

    ``<mcross(u, v), w>`` is alternating and vanishes for ``w`` in
    ``span(u, v)``.  It equals ``-det[u, v, w]``.
    """
    x1, y1, z1 = np.asarray(u, dtype=float)
    x2, y2, z2 = np.asarray(v, dtype=float)
    return np.array([
        -y1 * z2 + z1 * y2,
        -z1 * x2 + x1 * z2,
        x1 * y2 - y1 * x2,
    ])


def classify(v, tol: float = CAUSAL_TOL) -> CausalClass:
    """Causal type of ``v``; ``tol`` is relative to the largest component."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    v = np.asarray(v, dtype=float)
    scale = float(np.max(np.abs(v)))
    if scale == 0.0:
        return CausalClass.ZERO
    q = norm2(v / scale)
    if q > tol:
        return CausalClass.SPACELIKE
    future = v[2] > 0
    if q < -tol:
        return CausalClass.TIMELIKE_POSITIVE if future else CausalClass.TIMELIKE_NEGATIVE
    return CausalClass.LIGHTLIKE_POSITIVE if future else CausalClass.LIGHTLIKE_NEGATIVE


def dual_plane_normal(v) -> np.ndarray:
    """Normal of the orthogonal plane ``v^perp``.

    The plane is ``{w : <w, v> = 0}`` so the normal, read through the form, is
    ``v`` itself.  Returned as a copy.
    """
    v = as_vec(v)
    if not np.any(v):
        raise ZeroVector("the zero vector has no orthogonal plane")
    return v.copy()


def in_dual_plane(w, v, tol: float = 1e-12) -> bool:
    scale = max(1.0, float(np.max(np.abs(w))) * float(np.max(np.abs(v))))
    return abs(bilinear(w, v)) <= tol * scale


def det3(a, b, c) -> float:
    """Euclidean determinant of the stacked rows ``a, b, c``."""
    return float(np.linalg.det(np.array([a, b, c], dtype=float)))


def future_lightlike(v, tol: float = 1e-9) -> bool:
    return classify(v, tol) is CausalClass.LIGHTLIKE_POSITIVE


def lower_index(v) -> np.ndarray:
    """Euclidean covector representing ``<v, .>``."""
    return np.asarray(v, dtype=float) * _SIGNATURE
