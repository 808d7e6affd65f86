"""
Robot kinodynamic models and control windows.
"""

import math

import numpy as np

from stlcbot import DT, logger
from stlcbot.base.base import STLcBOTBase
from stlcbot.base.errors import ModelError, SchemaError


def wrap_angle(theta):
    """
    Wraps angles to (-pi, pi].
    """

    return theta - 2.0 * np.pi * np.ceil((theta - np.pi) / (2.0 * np.pi))


class KinodynamicLimits(STLcBOTBase):
    """
    Velocity and acceleration limits.
    """

    def __init__(
        self,
        v_max=1.0,
        v_min=0.0,
        a_max=0.5,
        yaw_rate_max=0.6981,
        yaw_accel_max=2.0472,
    ):
        values = (v_max, v_min, a_max, yaw_rate_max, yaw_accel_max)
        if not all(math.isfinite(v) and v >= 0 for v in values):
            raise ModelError("Kinodynamic limits must be finite and nonnegative, got {0}", values)
        if v_min > v_max:
            raise ModelError("v_min {0} exceeds v_max {1}", v_min, v_max)

        self.v_max = float(v_max)
        """ Maximum forward speed (m/s).
        :type: float """

        self.v_min = float(v_min)
        """ Minimum forward speed (m/s).
        :type: float """

        self.a_max = float(a_max)
        """ Maximum linear acceleration (m/s^2).
        :type: float """

        self.yaw_rate_max = float(yaw_rate_max)
        """ Maximum yaw rate (rad/s).
        :type: float """

        self.yaw_accel_max = float(yaw_accel_max)
        """ Maximum yaw acceleration (rad/s^2).
        :type: float """

    @classmethod
    def from_dict(cls, d, path="limits"):
        known = ("v_max", "v_min", "a_max", "yaw_rate_max", "yaw_accel_max")
        for k in d:
            if k not in known:
                raise SchemaError("{0}.{1}".format(path, k), "unknown field")
        return cls(**d)

    def todict(self):
        return {
            "v_max": self.v_max,
            "v_min": self.v_min,
            "a_max": self.a_max,
            "yaw_rate_max": self.yaw_rate_max,
            "yaw_accel_max": self.yaw_accel_max,
        }


class RobotModel(STLcBOTBase):
    """
    Base class for robot models x' = f(x, u). Arrays may carry leading batch
    axes.
    """

    kind = None
    state_dim = None
    control_dim = None

    def __init__(self, limits=None):
        self.limits = limits or KinodynamicLimits()
        """ Limits of this robot.
        :type: stlcbot.model.dynamics.KinodynamicLimits """

    def derivative(self, x, u):
        raise NotImplementedError()

    def clamp_state(self, x):
        return x

    def control_box(self):
        """
        (low, high) corners of the control box.
        """

        raise NotImplementedError()

    def admissible(self, u):
        low, high = self.control_box()
        u = np.asarray(u, dtype=float)
        return np.all((u >= low) & (u <= high), axis=-1)

    def project_control(self, u):
        low, high = self.control_box()
        return np.clip(np.asarray(u, dtype=float), low, high)

    def zero_control(self):
        return np.zeros(self.control_dim)

    def position(self, x):
        return np.asarray(x)[..., :2]

    def cost_to_go(self, x, goal, lookahead=0.0, dt=DT):
        """
        Estimated remaining path length (m) from states x to a goal
        position; batched over leading axes. Models without heading use
        the Euclidean distance.
        """

        d = self.position(np.asarray(x, dtype=float)) - np.asarray(goal, dtype=float)
        return np.linalg.norm(d, axis=-1)

    def initial_state(self, start):
        """
        State from a scenario start entry [x, y, theta, v, omega].
        """

        raise NotImplementedError()

    def __eq__(self, other):
        return type(self) is type(other) and self.limits.todict() == other.limits.todict()

    def __hash__(self):
        return hash(self.kind)


class SecondOrderUnicycle(RobotModel):
    """
    State (x, y, theta, v, omega), control (a, alpha).
    """

    kind = "SecondOrderUnicycle"
    state_dim = 5
    control_dim = 2

    def derivative(self, x, u):
        x = np.asarray(x, dtype=float)
        u = np.asarray(u, dtype=float)
        theta = x[..., 2]
        v = x[..., 3]
        out = np.empty(np.broadcast_shapes(x.shape, u.shape[:-1] + (5,)))
        out[..., 0] = v * np.cos(theta)
        out[..., 1] = v * np.sin(theta)
        out[..., 2] = x[..., 4]
        out[..., 3] = u[..., 0]
        out[..., 4] = u[..., 1]
        return out

    def clamp_state(self, x):
        x = np.array(x, dtype=float)
        lim = self.limits
        x[..., 2] = wrap_angle(x[..., 2])
        x[..., 3] = np.clip(x[..., 3], lim.v_min, lim.v_max)
        x[..., 4] = np.clip(x[..., 4], -lim.yaw_rate_max, lim.yaw_rate_max)
        return x

    def control_box(self):
        lim = self.limits
        high = np.array([lim.a_max, lim.yaw_accel_max])
        return -high, high

    def initial_state(self, start):
        start = list(start) + [0.0] * (5 - len(start))
        return self.clamp_state(np.array(start[:5], dtype=float))

    def turning_radius(self):
        lim = self.limits
        return lim.v_max / lim.yaw_rate_max if lim.yaw_rate_max > 0 else 0.0

    def coast(self, x, lookahead, dt=DT):
        """
        Positions and headings along the arc followed from states x when
        both accelerations are released, at no less than half the top
        speed, sampled every dt over ``lookahead`` seconds.

        :return: (positions of shape (..., n, 2), headings of shape (..., n))
        """

        x = np.asarray(x, dtype=float)
        t = np.arange(int(round(lookahead / dt)) + 1) * dt
        theta0 = x[..., 2, None]
        v = np.maximum(x[..., 3], 0.5 * self.limits.v_max)[..., None]
        w = x[..., 4, None]
        theta = theta0 + w * t

        straight = np.abs(w) < 1e-9
        w = np.where(straight, 1.0, w)
        dx = np.where(straight, v * t * np.cos(theta0), v / w * (np.sin(theta) - np.sin(theta0)))
        dy = np.where(straight, v * t * np.sin(theta0), v / w * (np.cos(theta0) - np.cos(theta)))
        positions = np.stack([x[..., 0, None] + dx, x[..., 1, None] + dy], axis=-1)
        return positions, theta

    def cost_to_go(self, x, goal, lookahead=0.0, dt=DT):
        """
        Best value along the coasting arc of the distance to the goal plus
        the heading error times the turning radius. The heading term fades
        out within one turning radius of the goal.
        """

        positions, theta = self.coast(x, lookahead, dt)
        e = np.asarray(goal, dtype=float) - positions
        d = np.hypot(e[..., 0], e[..., 1])
        error = np.abs(wrap_angle(np.arctan2(e[..., 1], e[..., 0]) - theta))
        return np.min(d + error * np.minimum(self.turning_radius(), d), axis=-1)


class SingleIntegrator2D(RobotModel):
    """
    State (x, y), control (vx, vy) with |(vx, vy)| <= v_max.
    """

    kind = "SingleIntegrator2D"
    state_dim = 2
    control_dim = 2

    def derivative(self, x, u):
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(np.asarray(u, dtype=float), np.broadcast(x, u).shape).copy()

    def control_box(self):
        high = np.full(2, self.limits.v_max)
        return -high, high

    def admissible(self, u):
        u = np.asarray(u, dtype=float)
        return np.linalg.norm(u, axis=-1) <= self.limits.v_max

    def project_control(self, u):
        u = np.asarray(u, dtype=float)
        norm = np.linalg.norm(u)
        if norm > self.limits.v_max:
            return u * (self.limits.v_max / norm)
        return u

    def initial_state(self, start):
        return np.array(list(start)[:2], dtype=float)


model_table = {
    "SecondOrderUnicycle": SecondOrderUnicycle,
    "unicycle": SecondOrderUnicycle,
    "SingleIntegrator2D": SingleIntegrator2D,
    "integrator": SingleIntegrator2D,
}


def make_model(kind, limits=None):
    if kind not in model_table:
        raise ModelError("Unknown robot model '{0}'", kind)
    return model_table[kind](limits)


def derivative(model, x, u):
    return model.derivative(x, u)


class WindowSpec(STLcBOTBase):
    """
    Control window {u : |u - center|_2 <= radius} intersected with the
    admissible controls of a model.
    """

    max_attempts = 1000

    def __init__(self, center, radius, model):
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        self.model = model
        low, high = model.control_box()
        self.low = np.maximum(low, self.center - self.radius)
        """ Lower corner of the sampling box.
        :type: numpy.ndarray """
        self.high = np.minimum(high, self.center + self.radius)
        """ Upper corner of the sampling box.
        :type: numpy.ndarray """

    def contains(self, u):
        u = np.asarray(u, dtype=float)
        return (np.linalg.norm(u - self.center, axis=-1) <= self.radius) & self.model.admissible(u)

    def sample(self, rng, count):
        """
        Uniform rejection sampling; the center fills in for draws that
        keep failing.

        :return: Array of shape (count, m).
        """

        out = []
        attempts = 0
        while len(out) < count and attempts < self.max_attempts * count:
            batch = rng.uniform(self.low, self.high, size=(count, len(self.center)))
            attempts += count
            for u in batch[self.contains(batch)]:
                out.append(u)
                if len(out) == count:
                    break
        if len(out) < count:
            logger.warning(
                "Control window around {0} yielded {1} of {2} samples".format(
                    self.center, len(out), count
                )
            )
            out.extend([self.center.copy()] * (count - len(out)))
        return np.array(out)


def control_window(center, radius, model):
    """
    Window of radius d around a nominal control, clipped to the model's
    admissible set. The center itself is moved into the admissible set.
    """

    if not radius > 0:
        raise ModelError("Window radius must be positive, got {0}", radius)
    return WindowSpec(model.project_control(center), radius, model)
