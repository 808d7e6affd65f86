"""
Multi-robot planning scenarios.
"""

import itertools
import math

import numpy as np

from stlcbot.base.base import STLcBOTBase
from stlcbot.base.errors import ModelError
from stlcbot.base.util import max_norm
from stlcbot.model.dynamics import make_model
from stlcbot.model.world import RobotFootprint, dist_inf


class RobotSpec(STLcBOTBase):
    """
    One robot of a scenario.
    """

    def __init__(
        self, model="SecondOrderUnicycle", s_i=0.2, start=(0.0, 0.0), goal=(0.0, 0.0), r_goal=0.3
    ):
        """
        Constructor.

        :param model: Robot model kind.
        :type model: str

        :param s_i: Footprint half-extent (m).
        :type s_i: float

        :param start: Start entry [x, y, theta, v, omega]; missing entries are 0.
        :type start: sequence(float)

        :param goal: Goal position [x, y].
        :type goal: sequence(float)

        :param r_goal: Goal radius (m, max-norm).
        :type r_goal: float
        """

        make_model(model)
        RobotFootprint(s_i)
        start = [float(v) for v in start]
        start = start + [0.0] * (5 - len(start))
        if len(start) != 5 or not all(math.isfinite(v) for v in start):
            raise ModelError("Start must hold up to five finite values, got {0}", start)
        goal = [float(v) for v in goal]
        if len(goal) != 2 or not all(math.isfinite(v) for v in goal):
            raise ModelError("Goal must be a finite 2-D position, got {0}", goal)
        if not (math.isfinite(r_goal) and r_goal > 0):
            raise ModelError("Goal radius must be positive, got {0}", r_goal)

        self.model = model
        """ Robot model kind.
        :type: str """

        self.s_i = float(s_i)
        """ Footprint half-extent.
        :type: float """

        self.start = tuple(start)
        """ Start state entry.
        :type: tuple(float) """

        self.goal = tuple(goal)
        """ Goal position.
        :type: tuple(float) """

        self.r_goal = float(r_goal)
        """ Goal radius.
        :type: float """

    def make_model(self, limits=None):
        return make_model(self.model, limits)

    @property
    def start_position(self):
        return np.array(self.start[:2])

    def __eq__(self, other):
        return isinstance(other, RobotSpec) and self.todict() == other.todict()

    def __hash__(self):
        return hash((self.model, self.s_i, self.start, self.goal, self.r_goal))

    def __repr__(self):
        return "RobotSpec({0})".format(self.todict())

    def todict(self):
        return {
            "model": self.model,
            "s_i": self.s_i,
            "start": list(self.start),
            "goal": list(self.goal),
            "r_goal": self.r_goal,
        }


class Scenario(STLcBOTBase):
    """
    Environment, robots, horizon and robustness slack of one planning problem.
    """

    def __init__(self, environment, robots, horizon_T=50.0, epsilon=0.05, name=None):
        if not (math.isfinite(horizon_T) and horizon_T > 0):
            raise ModelError("Horizon must be positive, got {0}", horizon_T)
        if not (math.isfinite(epsilon) and epsilon >= 0):
            raise ModelError("Epsilon must be nonnegative, got {0}", epsilon)
        if not robots:
            raise ModelError("A scenario needs at least one robot")

        self.environment = environment
        """ Workspace.
        :type: stlcbot.model.world.Environment """

        self.robots = list(robots)
        """ Robots, indexed by position.
        :type: list(stlcbot.model.scenario.RobotSpec) """

        self.horizon_T = float(horizon_T)
        """ Plan-duration budget (s).
        :type: float """

        self.epsilon = float(epsilon)
        """ Robustness slack added to footprints (m).
        :type: float """

        self.name = name if name is not None else environment.name
        """ Label.
        :type: str """

    @property
    def n_robots(self):
        return len(self.robots)

    def __eq__(self, other):
        return isinstance(other, Scenario) and self.todict() == other.todict()

    def __hash__(self):
        return hash((self.name, self.n_robots))

    def pair_margin(self):
        """
        Separation added to s_i + s_j between robots: 2 epsilon + d_min.
        """

        return 2.0 * self.epsilon + self.environment.d_min

    def validate(self):
        """
        Checks that starts and goals keep clear of obstacles and bounds and
        that starts and goals are pairwise separated by more than
        s_i + s_j + 2 epsilon + d_min.

        :raises ModelError: on the first violation.
        """

        env = self.environment
        for k, r in enumerate(self.robots):
            for label, p in (("start", r.start_position), ("goal", np.array(r.goal))):
                need = r.s_i + env.d_min
                for o in env.obstacles:
                    if dist_inf(p, o) < need:
                        raise ModelError(
                            "Robot {0} {1} {2} is within {3} of obstacle {4}",
                            k,
                            label,
                            p.tolist(),
                            need,
                            o,
                        )
                inner = min(np.min(p - env.bounds.low), np.min(env.bounds.high - p))
                if inner < r.s_i:
                    raise ModelError(
                        "Robot {0} {1} {2} does not fit inside the workspace", k, label, p.tolist()
                    )
        for (i, a), (j, b) in itertools.combinations(enumerate(self.robots), 2):
            need = a.s_i + b.s_i + self.pair_margin()
            if max_norm(a.start_position - b.start_position) <= need:
                raise ModelError("Robots {0} and {1} start within {2}", i, j, need)
            if max_norm(np.subtract(a.goal, b.goal)) <= need:
                raise ModelError("Robots {0} and {1} have goals within {2}", i, j, need)
        return self

    def todict(self):
        d = self.environment.todict()
        d["name"] = self.name
        d["epsilon"] = self.epsilon
        d["horizon_T"] = self.horizon_T
        d["robots"] = [r.todict() for r in self.robots]
        return d
