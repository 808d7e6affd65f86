"""
Recorded single-robot plans.
"""

import numpy as np

from stlcbot import DT
from stlcbot.base.base import STLcBOTBase
from stlcbot.base.util import hold_final, path_length
from stlcbot.model.signal import Signal


class PlanResult(STLcBOTBase):
    """
    Trajectory returned by a single-robot planner, sampled on the grid.
    """

    def __init__(
        self,
        states,
        controls,
        solved,
        iterations=0,
        wall_time=0.0,
        dt=DT,
        robot=0,
        goal=None,
        nodes=1,
    ):
        states = np.array(states, dtype=float)
        if states.ndim == 1:
            states = states.reshape(1, -1)
        controls = np.array(controls, dtype=float)
        if controls.ndim != 2:
            controls = controls.reshape(len(states) - 1, -1) if controls.size else np.zeros((0, 0))

        self.states = states
        """ States, one row per grid step.
        :type: numpy.ndarray """

        self.controls = controls
        """ Control applied over each grid step (one row fewer than states).
        :type: numpy.ndarray """

        self.solved = bool(solved)
        """ Whether the final position lies in the goal set.
        :type: bool """

        self.iterations = int(iterations)
        """ Planner iterations spent.
        :type: int """

        self.wall_time = float(wall_time)
        """ Planning time (s).
        :type: float """

        self.dt = float(dt)
        """ Grid step.
        :type: float """

        self.robot = int(robot)
        """ Robot index.
        :type: int """

        self.goal = tuple(goal) if goal is not None else None
        """ Goal position.
        :type: tuple(float) """

        self.nodes = int(nodes)
        """ Size of the search tree.
        :type: int """

        self.path_length = path_length(self.positions())
        """ Length of the position trace (m).
        :type: float """

    def __len__(self):
        return len(self.states)

    @property
    def steps(self):
        return len(self.states) - 1

    @property
    def duration(self):
        return self.steps * self.dt

    def times(self):
        return self.dt * np.arange(len(self.states))

    def positions(self, length=None):
        """
        Positions, optionally held at the final one up to ``length`` samples.
        """

        p = self.states[:, :2]
        return hold_final(p, length) if length is not None else p

    def final_position(self):
        return self.states[-1, :2]

    def average_velocity(self):
        return self.path_length / self.duration if self.steps else 0.0

    def signal(self, length=None):
        goals = {self.robot: self.goal} if self.goal is not None else None
        return Signal(self.positions(length), self.dt, 0.0, (self.robot,), goals)

    def __eq__(self, other):
        return (
            isinstance(other, PlanResult)
            and np.array_equal(self.states, other.states)
            and np.array_equal(self.controls, other.controls)
            and self.solved == other.solved
            and self.iterations == other.iterations
            and self.dt == other.dt
            and self.robot == other.robot
        )

    def __hash__(self):
        return hash((self.robot, self.steps, self.solved))

    def __str__(self):
        return "PlanResult(robot {0}, {1}, {2} steps, length {3:.3f} m, {4} iterations)".format(
            self.robot,
            "solved" if self.solved else "unsolved",
            self.steps,
            self.path_length,
            self.iterations,
        )

    def __repr__(self):
        return self.__str__()

    def todict(self):
        return {
            "robot": self.robot,
            "solved": self.solved,
            "dt": self.dt,
            "iterations": self.iterations,
            "path_length": self.path_length,
            "times": self.times().tolist(),
            "states": self.states.tolist(),
            "controls": self.controls.tolist(),
        }
