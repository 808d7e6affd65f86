"""
Kinodynamic RRT with the constraint interface of the cBOT planner.
"""

import math

import numpy as np

from stlcbot import DT, logger
from stlcbot.base.base import STLcBOTBase
from stlcbot.base.errors import ModelError, SchemaError, SimError
from stlcbot.base.util import grid_steps
from stlcbot.model.dynamics import KinodynamicLimits, WindowSpec
from stlcbot.planner.tree import TreePlanner
from stlcbot.sim.integrate import rk4_propagate


class RrtParams(STLcBOTBase):
    """
    Parameters of the kinodynamic RRT.
    """

    def __init__(
        self,
        goal_bias=0.05,
        max_iterations=5000,
        propagation_horizon=1.0,
        max_horizon=50.0,
        seed=0,
        goal_radius=None,
        limits=None,
    ):
        if not 0.0 <= goal_bias <= 1.0:
            raise ModelError("Goal bias must lie in [0, 1], got {0}", goal_bias)
        if max_iterations < 1:
            raise ModelError("Need at least one iteration, got {0}", max_iterations)
        grid_steps(propagation_horizon, DT, "propagation horizon")
        if not propagation_horizon <= max_horizon:
            raise ModelError(
                "Propagation horizon {0} exceeds the plan horizon {1}",
                propagation_horizon,
                max_horizon,
            )
        if goal_radius is not None and not goal_radius > 0:
            raise ModelError("Goal radius must be positive, got {0}", goal_radius)

        self.goal_bias = float(goal_bias)
        """ Probability of sampling the goal.
        :type: float """

        self.max_iterations = int(max_iterations)
        self.propagation_horizon = float(propagation_horizon)
        self.max_horizon = float(max_horizon)
        self.seed = int(seed)
        self.goal_radius = goal_radius
        self.limits = limits or KinodynamicLimits()

    @classmethod
    def from_dict(cls, d, path="rrt"):
        d = dict(d)
        known = (
            "goal_bias",
            "max_iterations",
            "propagation_horizon",
            "max_horizon",
            "seed",
            "goal_radius",
            "limits",
        )
        for k in d:
            if k not in known:
                raise SchemaError("{0}.{1}".format(path, k), "unknown field")
        if "limits" in d:
            d["limits"] = KinodynamicLimits.from_dict(d["limits"], path + ".limits")
        try:
            return cls(**d)
        except SchemaError:
            raise
        except ModelError as e:
            raise SchemaError(path, "{0}", e.message)
        except (TypeError, ValueError) as e:
            raise SchemaError(path, "{0}", e)

    def replace(self, **changes):
        params = self.copy()
        for k, v in changes.items():
            setattr(params, k, v)
        return params

    def todict(self):
        return {
            "goal_bias": self.goal_bias,
            "max_iterations": self.max_iterations,
            "propagation_horizon": self.propagation_horizon,
            "max_horizon": self.max_horizon,
            "seed": self.seed,
            "goal_radius": self.goal_radius,
            "limits": self.limits.todict(),
        }


class RrtPlanner(TreePlanner):
    def __init__(
        self,
        robot,
        env,
        extra_constraints=(),
        params=None,
        index=0,
        clearance_margin=0.0,
        horizon=None,
        deadline=None,
    ):
        params = params or RrtParams()
        TreePlanner.__init__(
            self,
            robot,
            env,
            extra_constraints,
            index,
            clearance_margin,
            params.goal_radius,
            params.limits,
            deadline,
        )
        self.params = params
        self.rng = np.random.default_rng(params.seed)
        self.segment_steps = grid_steps(params.propagation_horizon, DT, "propagation horizon")
        horizon = params.max_horizon if horizon is None else min(horizon, params.max_horizon)
        self.max_steps = int(math.floor(horizon / DT + 1e-9))
        low, high = self.model.control_box()
        self.controls = WindowSpec(
            0.5 * (low + high), float(np.linalg.norm(high - low)), self.model
        )

    def sample_position(self):
        if self.rng.random() < self.params.goal_bias:
            return self.goal
        return self.rng.uniform(self.env.bounds.low, self.env.bounds.high)

    def plan(self):
        start = self.check_start()
        root = self.tree.add_root(start)
        if self.at_goal(start) and self.parking_ok(start, 0):
            return self.result(root, True, 0)

        iterations = 0
        while iterations < self.params.max_iterations and not self.expired():
            iterations += 1
            near = self.tree.nearest(self.sample_position())
            node = self.tree.nodes[near]
            if node.step + self.segment_steps > self.max_steps:
                continue
            u = self.controls.sample(self.rng, 1)[0]
            try:
                segment = rk4_propagate(
                    self.model, node.state, u, DT, self.params.propagation_horizon
                )
            except SimError as e:
                logger.debug(str(e))
                continue
            prefix = self.history(near)
            segment, arrived = self.truncate_at_goal(segment, node.step, prefix)
            if not self.check_segment(segment, node.step, prefix):
                continue
            new = self.tree.add(near, u, segment)
            if arrived:
                return self.result(new, True, iterations)

        return self.result(None, False, iterations)


def rrt_plan(
    robot,
    env,
    extra_constraints=(),
    params=None,
    index=0,
    clearance_margin=0.0,
    horizon=None,
    deadline=None,
):
    """
    Plans one robot with kinodynamic RRT. Takes the same arguments as
    stlcbot.planner.cbot.plan.

    :rtype: stlcbot.sim.recording.PlanResult
    """

    return RrtPlanner(
        robot, env, extra_constraints, params, index, clearance_margin, horizon, deadline
    ).plan()
