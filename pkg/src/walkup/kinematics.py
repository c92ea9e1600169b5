"""Geometric primitives: pairwise vectors, angles, and distances on landmarks.

Default plane is the 2D image plane (x, y); depth is retained as an option
but none of the shipped signals use it by default, since the hand-orientation
angle is only well defined against the image horizontal.
"""

from __future__ import annotations

import enum
import math
from typing import Sequence

import numpy as np

from .core import Landmark
from .errors import DegenerateVector, MissingLandmark

__all__ = ["Plane", "NORM_EPS", "vector_between", "angle_between", "angle_to_horizontal", "distance"]

# Below this norm (normalized units) a direction is considered undefined.
NORM_EPS = 1e-9


class Plane(enum.Enum):
    IMAGE_2D = "2d"
    FULL_3D = "3d"


def _coords(lm: Landmark, plane: Plane) -> np.ndarray:
    if plane is Plane.IMAGE_2D:
        return np.array([lm.x, lm.y], dtype=float)
    return np.array([lm.x, lm.y, lm.z], dtype=float)


def vector_between(
    points: Sequence[Landmark],
    a: int,
    b: int,
    plane: Plane = Plane.IMAGE_2D,
    min_visibility: float = 0.0,
) -> np.ndarray:
    """Vector from point ``b`` to point ``a`` (``points[a] - points[b]``)."""
    for idx in (a, b):
        if points[idx].visibility < min_visibility:
            raise MissingLandmark(idx, "visibility below threshold")
    return _coords(points[a], plane) - _coords(points[b], plane)


def angle_between(u: np.ndarray, v: np.ndarray) -> float:
    """Angle between two vectors in degrees, clamped into [0, 180]."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    nu = math.sqrt(float(np.dot(u, u)))
    nv = math.sqrt(float(np.dot(v, v)))
    if nu <= NORM_EPS or nv <= NORM_EPS:
        raise DegenerateVector(f"vector norms {nu:.3e}, {nv:.3e} below {NORM_EPS}")
    cos = float(np.dot(u, v)) / (nu * nv)
    cos = max(-1.0, min(1.0, cos))
    return math.degrees(math.acos(cos))


def angle_to_horizontal(u: np.ndarray) -> float:
    """Unsigned angle in [0, 90] degrees between a vector and the image x-axis.

    Uses the image-plane components only and is insensitive to the sign of
    ``u``: atan2(|dy|, |dx|).
    """
    u = np.asarray(u, dtype=float)
    dx, dy = float(u[0]), float(u[1])
    if math.hypot(dx, dy) <= NORM_EPS:
        raise DegenerateVector("vector norm below tolerance")
    return math.degrees(math.atan2(abs(dy), abs(dx)))


def distance(
    points: Sequence[Landmark],
    a: int,
    b: int,
    plane: Plane = Plane.IMAGE_2D,
    min_visibility: float = 0.0,
) -> float:
    """Euclidean distance between two landmarks in the selected plane."""
    vec = vector_between(points, a, b, plane=plane, min_visibility=min_visibility)
    return float(np.linalg.norm(vec))
