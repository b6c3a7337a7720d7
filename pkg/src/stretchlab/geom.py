"""Geometry of the unit square.

Point sampling, Euclidean distance and the exact area of a disc clipped to
``[0, 1]^2``.  The clipped-disc area is computed in closed form: start from
the full disc, subtract the circular segment cut off by each square edge the
circle crosses, then add back the corner pieces that were subtracted twice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        if not (0.0 <= self.x <= 1.0 and 0.0 <= self.y <= 1.0):
            raise InvalidInputError(f"point ({self.x}, {self.y}) lies outside the unit square")

    def __iter__(self):
        yield self.x
        yield self.y


@dataclass(frozen=True)
class ClippedDisc:
    """Disc of the given radius about ``centre``, intersected with the unit square."""

    centre: Point
    radius: float

    def __post_init__(self):
        if not (0.0 <= self.radius <= SQRT2):
            raise InvalidInputError(f"radius {self.radius} outside [0, sqrt(2)]")

    def area(self) -> float:
        return disc_square_area(self)


def euclid(u, v) -> float:
    # numpy's hypot, so that scalar and matrix distances agree bit-for-bit
    return float(np.hypot(u[0] - v[0], u[1] - v[1]))


def pairwise_euclid(xy: np.ndarray) -> np.ndarray:
    """Full n x n matrix of Euclidean distances between the rows of ``xy``.

    Entries equal :func:`euclid` of the corresponding rows exactly.
    """
    xy = np.asarray(xy, dtype=np.float64)
    return np.hypot(xy[:, 0][:, None] - xy[:, 0][None, :], xy[:, 1][:, None] - xy[:, 1][None, :])


def _half_chord(x, r):
    # sqrt(r^2 - x^2) without cancellation when x is close to r
    return math.sqrt(max((r - x) * (r + x), 0.0))


def _segment(h: float, r: float) -> float:
    # area of the part of a radius-r disc beyond a line at distance h >= 0 from its centre
    if h >= r:
        return 0.0
    s = _half_chord(h, r)
    return r * r * math.atan2(s, h) - h * s


def _antiderivative(x: float, r: float) -> float:
    # integral of sqrt(r^2 - t^2) dt from 0 to x, for 0 <= x <= r
    x = min(x, r)
    s = _half_chord(x, r)
    return 0.5 * (x * s + r * r * math.atan2(x, s))


def _corner(a: float, b: float, r: float) -> float:
    # area of the disc part with X >= a and Y >= b (a, b >= 0, centre at origin)
    if a * a + b * b >= r * r:
        return 0.0
    x_max = _half_chord(b, r)
    return _antiderivative(x_max, r) - _antiderivative(a, r) - b * (x_max - a)


def _check_disc(qx: float, qy: float, r: float) -> None:
    if not (0.0 <= qx <= 1.0 and 0.0 <= qy <= 1.0):
        raise InvalidInputError(f"centre ({qx}, {qy}) lies outside the unit square")
    if not r >= 0.0:
        raise InvalidInputError(f"negative radius {r}")


def disc_square_area(disc, radius: float | None = None) -> float:
    """Exact area of the disc ``C(Q, R)`` clipped to the unit square.

    Accepts either a :class:`ClippedDisc` or ``(centre, radius)``.  Radii
    beyond sqrt(2) are allowed here and give the whole square.
    """
    if radius is None:
        qx, qy = disc.centre
        r = disc.radius
    else:
        qx, qy = disc
        r = radius
    qx, qy, r = float(qx), float(qy), float(r)
    _check_disc(qx, qy, r)
    if r == 0.0:
        return 0.0
    # distances from the centre to the left, right, bottom and top edges
    left, right, bottom, top = qx, 1.0 - qx, qy, 1.0 - qy
    area = math.pi * r * r
    area -= _segment(left, r) + _segment(right, r) + _segment(bottom, r) + _segment(top, r)
    area += (
        _corner(left, bottom, r)
        + _corner(left, top, r)
        + _corner(right, bottom, r)
        + _corner(right, top, r)
    )
    return min(max(area, 0.0), 1.0)


def _half_chord_v(x, r):
    return np.sqrt(np.maximum((r - x) * (r + x), 0.0))


def _segment_v(h, r):
    inside = h < r
    s = _half_chord_v(h, r)
    return np.where(inside, r * r * np.arctan2(s, h) - h * s, 0.0)


def _antiderivative_v(x, r):
    x = np.minimum(x, r)
    s = _half_chord_v(x, r)
    return 0.5 * (x * s + r * r * np.arctan2(x, s))


def _corner_v(a, b, r):
    inside = a * a + b * b < r * r
    x_max = _half_chord_v(b, r)
    val = _antiderivative_v(x_max, r) - _antiderivative_v(a, r) - b * (x_max - a)
    return np.where(inside, val, 0.0)


def disc_square_area_many(qx, qy, r) -> np.ndarray:
    """Vectorised :func:`disc_square_area` over broadcastable arrays."""
    qx, qy, r = np.broadcast_arrays(
        np.asarray(qx, dtype=np.float64), np.asarray(qy, dtype=np.float64), np.asarray(r, dtype=np.float64)
    )
    if np.any((qx < 0) | (qx > 1) | (qy < 0) | (qy > 1)):
        raise InvalidInputError("centre outside the unit square")
    if np.any(~(r >= 0)):
        raise InvalidInputError("negative radius")
    left, right, bottom, top = qx, 1.0 - qx, qy, 1.0 - qy
    area = np.pi * r * r
    area = area - (_segment_v(left, r) + _segment_v(right, r) + _segment_v(bottom, r) + _segment_v(top, r))
    area = area + (
        _corner_v(left, bottom, r) + _corner_v(left, top, r) + _corner_v(right, bottom, r) + _corner_v(right, top, r)
    )
    return np.clip(area, 0.0, 1.0)


def prop1_lower_bound(r: float, regime: str) -> float:
    """Guaranteed minimum area of ``C(Q, r)`` over all centres Q in the square.

    ``regime="half"`` is valid for ``0 <= r <= 1/2`` and gives ``pi r^2 / 4``
    (a quarter disc always fits).  ``regime="sqrt2"`` is valid for
    ``0 <= r <= sqrt(2)`` and gives ``pi r^2 / 32``.
    """
    if regime == "half":
        if not 0.0 <= r <= 0.5:
            raise InvalidInputError(f"regime 'half' needs 0 <= R <= 1/2, got {r}")
        return math.pi * r * r / 4.0
    if regime == "sqrt2":
        if not 0.0 <= r <= SQRT2:
            raise InvalidInputError(f"regime 'sqrt2' needs 0 <= R <= sqrt(2), got {r}")
        return math.pi * r * r / 32.0
    raise InvalidInputError(f"unknown regime {regime!r}")


def sample_point(rng: np.random.Generator) -> Point:
    x, y = rng.random(2)
    return Point(float(x), float(y))


def sample_points(rng: np.random.Generator, k: int) -> np.ndarray:
    """``k`` i.i.d. uniform points as a ``(k, 2)`` array (x then y per row)."""
    return rng.random((k, 2))
