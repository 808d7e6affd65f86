"""
Uniformly sampled signals.
"""

import numpy as np

from stlcbot import DT
from stlcbot.base.base import STLcBOTBase
from stlcbot.base.errors import EvaluationError, ModelError
from stlcbot.base.util import grid_index, hold_final


class Signal(STLcBOTBase):
    """
    Uniformly sampled trajectory of one or more robots.

    Each sample stacks one block of ``stride`` columns per robot, in the
    order of ``robots``; the first two columns of a block are the robot's
    position.
    """

    def __init__(self, samples, dt=DT, t0=0.0, robots=(0,), goals=None):
        """
        Constructor.

        :param samples: Sample matrix, one row per time step.
        :type samples: array_like

        :param dt: Sampling step (seconds).
        :type dt: float

        :param t0: Time of the first sample (seconds).
        :type t0: float

        :param robots: Robot indices whose blocks the samples stack.
        :type robots: tuple(int)

        :param goals: Goal positions per robot index, used by unbound goal
        predicates.
        :type goals: dict(int -> (float, float))
        """

        samples = np.array(samples, dtype=float)
        if samples.ndim == 1:
            samples = samples.reshape(-1, 1)
        if samples.ndim != 2 or samples.shape[0] == 0:
            raise ModelError("A signal needs a nonempty 2-D sample matrix")
        if not dt > 0:
            raise ModelError("Sampling step must be positive, got {0}", dt)

        robots = tuple(int(r) for r in robots)
        if not robots or len(set(robots)) != len(robots):
            raise ModelError("Invalid robot list {0}", robots)
        if samples.shape[1] % len(robots) != 0:
            raise ModelError(
                "{0} columns cannot hold {1} robot blocks",
                samples.shape[1],
                len(robots),
            )
        samples.setflags(write=False)

        self.samples = samples
        """ Sample matrix (read-only).
        :type: numpy.ndarray """

        self.dt = float(dt)
        """ Sampling step.
        :type: float """

        self.t0 = float(t0)
        """ Time of the first sample.
        :type: float """

        self.robots = robots
        """ Robot indices in block order.
        :type: tuple(int) """

        self.goals = dict(goals) if goals else {}
        """ Goal positions per robot.
        :type: dict(int -> (float, float)) """

        self.stride = samples.shape[1] // len(robots)
        """ Columns per robot block.
        :type: int """

    def __len__(self):
        return self.samples.shape[0]

    def __str__(self):
        return "Signal({0} samples, dt={1}, t0={2}, robots={3})".format(
            len(self), self.dt, self.t0, self.robots
        )

    @property
    def dim(self):
        return self.samples.shape[1]

    def times(self):
        return self.t0 + self.dt * np.arange(len(self))

    def index_of(self, t):
        return grid_index(t, self.t0, self.dt, len(self))

    def column(self, robot, offset):
        try:
            block = self.robots.index(robot)
        except ValueError:
            raise EvaluationError(
                "Robot {0} is not part of this signal (robots {1})", robot, self.robots
            )
        if offset >= self.stride:
            raise EvaluationError(
                "Robot {0} has {1} columns, column {2} requested",
                robot,
                self.stride,
                offset,
            )
        return self.samples[:, block * self.stride + offset]

    def position(self, robot):
        """
        Positions of one robot.

        :return: Array of shape (n, 2).
        """

        if self.stride < 2:
            raise EvaluationError("Signal blocks of width 1 carry no 2-D position")
        return np.stack([self.column(robot, 0), self.column(robot, 1)], axis=1)

    def goal(self, robot):
        if robot not in self.goals:
            raise EvaluationError("No goal given for robot {0}", robot)
        return np.asarray(self.goals[robot], dtype=float)

    def relabel(self, robot):
        """
        Copy of a single-robot signal attributed to another robot index.
        """

        if len(self.robots) != 1:
            raise EvaluationError("Only single-robot signals can be relabelled")
        goals = {}
        if self.robots[0] in self.goals:
            goals[robot] = self.goals[self.robots[0]]
        if robot in self.goals:
            goals[robot] = self.goals[robot]
        return Signal(self.samples, self.dt, self.t0, (robot,), goals)

    def extended(self, length):
        """
        Copy extended to ``length`` samples by holding the final sample.
        """

        return Signal(
            hold_final(self.samples, length), self.dt, self.t0, self.robots, self.goals
        )

    def todict(self):
        return {
            "dt": self.dt,
            "t0": self.t0,
            "robots": list(self.robots),
            "samples": self.samples.tolist(),
        }


def team_signal(signals):
    """
    Stacks the positions of per-robot signals into one team signal, holding
    shorter trajectories at their final position.

    :param signals: Per-robot signals keyed by robot index.
    :type signals: dict(int -> stlcbot.model.signal.Signal)
    """

    if not signals:
        raise EvaluationError("No trajectories given")
    robots = tuple(sorted(signals))
    dts = set(signals[r].dt for r in robots)
    if len(dts) != 1:
        raise EvaluationError("Trajectories use different sampling steps {0}", dts)
    length = max(len(signals[r]) for r in robots)
    goals = {}
    blocks = []
    for r in robots:
        s = signals[r]
        rid = s.robots[0] if len(s.robots) == 1 else r
        blocks.append(hold_final(s.position(rid), length))
        if rid in s.goals:
            goals[r] = s.goals[rid]
    return Signal(
        np.concatenate(blocks, axis=1),
        dts.pop(),
        min(signals[r].t0 for r in robots),
        robots,
        goals,
    )
