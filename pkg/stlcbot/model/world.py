"""
Workspace geometry: boxes, environments, footprints and clearance checks.
All distances use the max-norm.
"""

import math

import numpy as np

from stlcbot.base.base import STLcBOTBase
from stlcbot.base.errors import ModelError
from stlcbot.base.util import box_signed_distance, max_norm
from stlcbot.model.formula import (
    Always,
    Atom,
    DistToBoxAbove,
    HalfSpace,
    conjunction,
)


class Box(STLcBOTBase):
    """
    Axis-aligned box.
    """

    def __init__(self, center, half):
        center = np.array(center, dtype=float).ravel()
        half = np.array(half, dtype=float).ravel()
        if center.shape != (2,) or half.shape != (2,):
            raise ModelError("Boxes need a 2-D center and half-extent")
        if not (np.all(np.isfinite(center)) and np.all(np.isfinite(half))):
            raise ModelError("Box {0} / {1} is not finite", center, half)
        if not np.all(half > 0):
            raise ModelError("Box half-extents must be positive, got {0}", half)
        center.setflags(write=False)
        half.setflags(write=False)

        self.center = center
        """ Center.
        :type: numpy.ndarray """

        self.half = half
        """ Half-extents.
        :type: numpy.ndarray """

    @classmethod
    def from_corners(cls, low, high):
        low = np.asarray(low, dtype=float)
        high = np.asarray(high, dtype=float)
        return cls(0.5 * (low + high), 0.5 * (high - low))

    @property
    def low(self):
        return self.center - self.half

    @property
    def high(self):
        return self.center + self.half

    def contains_box(self, other, tol=1e-9):
        return bool(
            np.all(other.low >= self.low - tol) and np.all(other.high <= self.high + tol)
        )

    def signed_distance(self, points):
        return box_signed_distance(points, self.center, self.half)

    def __eq__(self, other):
        return (
            isinstance(other, Box)
            and np.array_equal(self.center, other.center)
            and np.array_equal(self.half, other.half)
        )

    def __hash__(self):
        return hash((tuple(self.center), tuple(self.half)))

    def __repr__(self):
        return "Box(center={0}, half={1})".format(self.center.tolist(), self.half.tolist())

    def todict(self):
        return {"center": self.center.tolist(), "half": self.half.tolist()}


def dist_inf(p, box):
    """
    Max-norm distance from a point to a box, zero inside.
    """

    return float(max(0.0, box.signed_distance(np.asarray(p, dtype=float))))


class Environment(STLcBOTBase):
    """
    Bounded workspace with box obstacles.
    """

    def __init__(self, bounds, obstacles=(), d_min=0.1, name=""):
        """
        Constructor.

        :param bounds: Workspace box.
        :type bounds: stlcbot.model.world.Box

        :param obstacles: Obstacle boxes, each inside the bounds.
        :type obstacles: list(stlcbot.model.world.Box)

        :param d_min: Minimum clearance (m).
        :type d_min: float

        :param name: Label.
        :type name: str
        """

        if not (math.isfinite(d_min) and d_min >= 0):
            raise ModelError("d_min must be nonnegative, got {0}", d_min)
        obstacles = tuple(obstacles)
        for k, o in enumerate(obstacles):
            if not bounds.contains_box(o):
                raise ModelError("Obstacle {0} {1} leaves the workspace {2}", k, o, bounds)

        self.bounds = bounds
        """ Workspace bounds.
        :type: stlcbot.model.world.Box """

        self.obstacles = obstacles
        """ Obstacles.
        :type: tuple(stlcbot.model.world.Box) """

        self.d_min = float(d_min)
        """ Minimum clearance.
        :type: float """

        self.name = name
        """ Label.
        :type: str """

        if obstacles:
            self.centers = np.array([o.center for o in obstacles])
            self.halves = np.array([o.half for o in obstacles])
        else:
            self.centers = np.zeros((0, 2))
            self.halves = np.zeros((0, 2))

    def __eq__(self, other):
        return (
            isinstance(other, Environment)
            and self.bounds == other.bounds
            and self.obstacles == other.obstacles
            and self.d_min == other.d_min
            and self.name == other.name
        )

    def __hash__(self):
        return hash((self.name, self.bounds, self.obstacles))

    def __repr__(self):
        return "Environment({0!r}, {1} obstacles)".format(self.name, len(self.obstacles))

    def obstacle_distances(self, points):
        """
        Signed distances from each point to each obstacle, shape (n, M).
        """

        points = np.atleast_2d(np.asarray(points, dtype=float))
        return np.max(
            np.abs(points[:, None, :] - self.centers[None, :, :]) - self.halves[None, :, :],
            axis=-1,
        )

    def todict(self):
        return {
            "name": self.name,
            "bounds": {
                "min": self.bounds.low.tolist(),
                "max": self.bounds.high.tolist(),
            },
            "obstacles": [o.todict() for o in self.obstacles],
            "d_min": self.d_min,
        }


class RobotFootprint(STLcBOTBase):
    """
    Axis-aligned square footprint of half-extent s.
    """

    def __init__(self, s):
        if not (math.isfinite(s) and s > 0):
            raise ModelError("Footprint half-extent must be positive, got {0}", s)
        self.s = float(s)


def _size(footprint):
    return footprint.s if isinstance(footprint, RobotFootprint) else float(footprint)


def footprints_overlap(p_i, s_i, p_j, s_j, margin=0.0):
    """
    True iff |p_i - p_j|_inf < s_i + s_j + margin.
    """

    delta = np.asarray(p_i, dtype=float) - np.asarray(p_j, dtype=float)
    return bool(max_norm(delta) < s_i + s_j + margin)


def clearance_threshold(env, s, margin=0.0):
    return env.d_min + s + margin


def deflated_bounds(env, s):
    return env.bounds.low + s, env.bounds.high - s


def segment_clear(env, states, footprint, margin=0.0):
    """
    True iff every sampled position keeps a max-norm distance above
    d_min + s (+ margin) from every obstacle and stays strictly inside the
    bounds deflated by s.
    """

    s = _size(footprint)
    p = np.atleast_2d(np.asarray(states, dtype=float))[:, :2]
    low, high = deflated_bounds(env, s)
    if not (np.all(p[:, 0] > low[0]) and np.all(p[:, 1] > low[1])):
        return False
    if not (np.all(high[0] - p[:, 0] > 0) and np.all(high[1] - p[:, 1] > 0)):
        return False
    if not env.obstacles:
        return True
    dist = np.maximum(env.obstacle_distances(p), 0.0)
    return bool(np.all(dist > clearance_threshold(env, s, margin)))


def clearance_slack(env, positions, s, margin=0.0):
    """
    Largest violation over a segment: positive where the clearance or bounds
    condition fails, <= 0 when every sample keeps clear.
    """

    p = np.atleast_2d(np.asarray(positions, dtype=float))[:, :2]
    low, high = deflated_bounds(env, s)
    slack = float(np.max(np.concatenate([low - p, p - high], axis=1)))
    if env.obstacles:
        nearest = float(np.min(np.maximum(env.obstacle_distances(p), 0.0)))
        slack = max(slack, clearance_threshold(env, s, margin) - nearest)
    return slack


def clearance_formula(env, footprint, horizon, robot=0, margin=0.0):
    """
    Formula form of segment_clear for one robot over [0, horizon].
    """

    s = _size(footprint)
    threshold = clearance_threshold(env, s, margin)
    low, high = deflated_bounds(env, s)
    atoms = [
        Atom(HalfSpace(robot, 1.0, 0.0, low[0])),
        Atom(HalfSpace(robot, 0.0, 1.0, low[1])),
        Atom(HalfSpace(robot, -1.0, 0.0, -high[0])),
        Atom(HalfSpace(robot, 0.0, -1.0, -high[1])),
    ]
    for o in env.obstacles:
        atoms.append(
            Atom(DistToBoxAbove(robot, o.center[0], o.center[1], o.half[0], o.half[1], threshold))
        )
    return Always(0.0, horizon, conjunction(atoms))
