"""Isometries of the hyperbolic plane as 2x2 matrices and their Lie algebra.

A vector ``v = (x, y, z)`` corresponds to the traceless matrix
``[[y, x + z], [x - z, -y]]``.  Conjugation by a matrix ``A`` pulled back
through this correspondence is the adjoint action ``Ad(A)`` on vectors; it
preserves the Minkowski form.  The commutator of two such matrices maps back
to ``AD_CONSTANT * mcross(v, w)`` with ``AD_CONSTANT = -2``.  Consequently
the Killing field ``p -> mcross(v, p)`` is generated by the matrix
``killing_to_matrix(v) / AD_CONSTANT``.

Orientation-reversing isometries (determinant -1) map the upper sheet of the
hyperboloid to the lower one under conjugation, so on points and ideal
points they act by ``-Ad(A)``; on Killing fields the action is ``Ad(A)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from crownstrip.errors import DependentEndpoints, NoAxis, NotHyperbolic
from crownstrip.hyperbolic import Geodesic, geodesic_from_endpoints
from crownstrip.minkowski import mcross, spacelike_norm

#: commutator of matrix images equals this constant times ``mcross``
AD_CONSTANT = -2.0

CLASSIFY_TOL = 1e-9


class IsometryType(Enum):
    IDENTITY = "Identity"
    HYPERBOLIC = "Hyperbolic"
    PARABOLIC = "Parabolic"
    ELLIPTIC = "Elliptic"
    REFLECTION = "Reflection"
    GLIDE_REFLECTION = "GlideReflection"


def canonical_sign(m) -> np.ndarray:
    """Projective representative whose first nonzero first-row entry is positive."""
    m = np.array(m, dtype=float)
    first = m[0, 0] if abs(m[0, 0]) > 1e-300 else m[0, 1]
    return -m if first < 0 else m


@dataclass(frozen=True)
class Isometry:
    """Element of PGL(2, R) stored with ``|det| = 1``."""

    m: np.ndarray
    det_sign: int

    @classmethod
    def from_matrix(cls, m) -> "Isometry":
        m = np.array(m, dtype=float)
        if m.shape != (2, 2):
            raise ValueError("an isometry is a 2x2 matrix")
        d = float(np.linalg.det(m))
        if d == 0.0 or not np.isfinite(d):
            raise ValueError("matrix is singular")
        m = m / np.sqrt(abs(d))
        return cls(canonical_sign(m), 1 if d > 0 else -1)

    def __matmul__(self, other: "Isometry") -> "Isometry":
        return Isometry.from_matrix(self.m @ other.m)

    def inverse(self) -> "Isometry":
        a, b = self.m[0]
        c, d = self.m[1]
        return Isometry.from_matrix(np.array([[d, -b], [-c, a]]) * self.det_sign)

    @property
    def trace(self) -> float:
        return float(self.m[0, 0] + self.m[1, 1])

    def adjoint_matrix(self) -> np.ndarray:
        """3x3 matrix of ``Ad(A)`` acting on vectors."""
        return np.column_stack([adjoint(self, e) for e in np.eye(3)])

    def point_matrix(self) -> np.ndarray:
        """3x3 matrix of the action on points of the hyperboloid."""
        return self.det_sign * self.adjoint_matrix()


IDENTITY = Isometry(np.eye(2), 1)


def killing_to_matrix(v) -> np.ndarray:
    x, y, z = np.asarray(v, dtype=float)
    return np.array([[y, x + z], [x - z, -y]])


def matrix_to_killing(m) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    y = 0.5 * (m[0, 0] - m[1, 1])
    x = 0.5 * (m[0, 1] + m[1, 0])
    z = 0.5 * (m[0, 1] - m[1, 0])
    return np.array([x, y, z])


def _as_matrix(a) -> np.ndarray:
    return a.m if isinstance(a, Isometry) else np.asarray(a, dtype=float)


def adjoint(a, v) -> np.ndarray:
    """``Ad(A) v``: conjugate the matrix of ``v`` by ``A``."""
    m = _as_matrix(a)
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    inv = np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]]) / det
    return matrix_to_killing(m @ killing_to_matrix(v) @ inv)


def act(a, p) -> np.ndarray:
    """Action on points, ideal points and decorations (keeps the future cone)."""
    m = _as_matrix(a)
    sign = 1.0 if np.linalg.det(m) > 0 else -1.0
    return sign * adjoint(m, p)


def commutator_vector(v, w) -> np.ndarray:
    """Vector of the matrix commutator ``[V, W]``."""
    V, W = killing_to_matrix(v), killing_to_matrix(w)
    return matrix_to_killing(V @ W - W @ V)


def _length_from_trace(tr: float) -> float:
    return float(2.0 * np.arccosh(abs(tr) / 2.0))


def trace_length(a) -> float:
    """Translation length ``2 arccosh(|tr| / 2)``; half the square's length if det < 0."""
    iso = a if isinstance(a, Isometry) else Isometry.from_matrix(a)
    if iso.det_sign < 0:
        sq = iso.m @ iso.m
        tr = float(sq[0, 0] + sq[1, 1])
        if abs(tr) <= 2.0:
            raise NotHyperbolic("square of the orientation-reversing element is not hyperbolic")
        return 0.5 * _length_from_trace(tr)
    if abs(iso.trace) <= 2.0:
        raise NotHyperbolic(f"|trace| = {abs(iso.trace):.6g} <= 2")
    return _length_from_trace(iso.trace)


def classify_isometry(a, tol: float = CLASSIFY_TOL) -> IsometryType:
    iso = a if isinstance(a, Isometry) else Isometry.from_matrix(a)
    if tol <= 0:
        raise ValueError("tol must be positive")
    if iso.det_sign < 0:
        if abs(iso.trace) <= tol:
            return IsometryType.REFLECTION
        return IsometryType.GLIDE_REFLECTION
    t = abs(iso.trace)
    if abs(t - 2.0) <= tol:
        if np.allclose(iso.m, np.eye(2), atol=tol) or np.allclose(iso.m, -np.eye(2), atol=tol):
            return IsometryType.IDENTITY
        return IsometryType.PARABOLIC
    return IsometryType.HYPERBOLIC if t > 2.0 else IsometryType.ELLIPTIC


def boundary_vector(e) -> np.ndarray:
    """Future lightlike vector of the boundary point fixed by the eigenvector ``e``."""
    e1, e2 = float(e[0]), float(e[1])
    return np.array([(e1 * e1 - e2 * e2) / 2.0, -e1 * e2, (e1 * e1 + e2 * e2) / 2.0])


def fixed_points(a) -> tuple[np.ndarray, np.ndarray]:
    """``(attracting, repelling)`` future lightlike fixed vectors."""
    iso = a if isinstance(a, Isometry) else Isometry.from_matrix(a)
    kind = classify_isometry(iso)
    if kind not in (IsometryType.HYPERBOLIC, IsometryType.GLIDE_REFLECTION):
        raise NoAxis(f"{kind.value} elements have no axis")
    vals, vecs = np.linalg.eig(iso.m)
    if np.any(np.abs(np.imag(vals)) > 0):
        raise NoAxis("complex eigenvalues")
    vals = np.real(vals)
    vecs = np.real(vecs)
    order = np.argsort(-np.abs(vals))
    attracting = boundary_vector(vecs[:, order[0]])
    repelling = boundary_vector(vecs[:, order[1]])
    return attracting / attracting[2], repelling / repelling[2]


def axis(a) -> Geodesic:
    """Axis oriented from the repelling to the attracting fixed point."""
    attracting, repelling = fixed_points(a)
    try:
        return geodesic_from_endpoints(repelling, attracting)
    except DependentEndpoints as exc:  # pragma: no cover - guarded by classification
        raise NoAxis(str(exc)) from exc


def _expm_traceless(m: np.ndarray) -> np.ndarray:
    """Closed-form exponential of a traceless 2x2 matrix (``m^2 = delta I``)."""
    delta = float(m[0, 0] ** 2 + m[0, 1] * m[1, 0])
    if delta > 1e-30:
        s = np.sqrt(delta)
        return np.cosh(s) * np.eye(2) + (np.sinh(s) / s) * m
    if delta < -1e-30:
        s = np.sqrt(-delta)
        return np.cos(s) * np.eye(2) + (np.sin(s) / s) * m
    return np.eye(2) + m + 0.5 * delta * np.eye(2)


def exp_matrix(v, t: float) -> np.ndarray:
    """``exp(t * killing_to_matrix(v))`` as a raw matrix."""
    return _expm_traceless(t * killing_to_matrix(v))


def exp_killing(v, t: float) -> Isometry:
    """Isometry ``exp(t * killing_to_matrix(v))``.

    Its point motion has derivative ``AD_CONSTANT * mcross(v, p)`` at ``t = 0``.
    """
    return Isometry.from_matrix(exp_matrix(v, t))


def flow(v, t: float) -> Isometry:
    """Time-``t`` flow of the Killing field ``p -> mcross(v, p)``."""
    return exp_killing(np.asarray(v, dtype=float) / AD_CONSTANT, t)


def longitudinal_motion(k, a, b) -> float:
    """``<k, mcross(a, b) / |mcross(a, b)|>`` for two distinct ideal points."""
    n = mcross(a, b)
    s = spacelike_norm(n)
    if s < 1e-14 * max(1.0, float(np.linalg.norm(a)) * float(np.linalg.norm(b))):
        raise DependentEndpoints("ideal points coincide")
    return float(np.dot(np.asarray(k, dtype=float) * np.array([1.0, 1.0, -1.0]), n / s))


def neutral_vector(a) -> np.ndarray:
    """Unit vector fixed by ``Ad(A)``, oriented so ``(repelling, v0, attracting)`` is positive.

    This is the unit Killing field translating along the axis in the
    direction of ``A``, so that pairing a cocycle with it gives the first
    variation of translation length.  Orientation-reversing elements use the
    data of their square.
    """
    return axis(a).n.copy()
