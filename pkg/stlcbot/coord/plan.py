"""
Team plans and the dispatch to single-robot planners.
"""

from stlcbot.base.base import STLcBOTBase
from stlcbot.base.errors import ModelError
from stlcbot.base.util import derive_seed
from stlcbot.planner.cbot import CbotParams, plan as cbot_plan
from stlcbot.planner.rrt import RrtParams, rrt_plan

LOW_LEVEL = ("cbot", "rrt")


class MultiRobotPlan(STLcBOTBase):
    """
    Per-robot plans of a team and the search statistics that produced them.
    """

    def __init__(
        self,
        plans,
        solved,
        merges=0,
        nodes_expanded=0,
        conflicts_resolved=0,
        open_size=0,
        max_conflict_count=0,
        failed_robot=None,
        wall_time=0.0,
        min_robustness=float("nan"),
    ):
        self.plans = list(plans)
        """ Plans indexed by robot.
        :type: list(stlcbot.sim.recording.PlanResult) """

        self.solved = bool(solved)
        self.merges = int(merges)
        self.nodes_expanded = int(nodes_expanded)
        self.conflicts_resolved = int(conflicts_resolved)
        self.open_size = int(open_size)
        self.max_conflict_count = int(max_conflict_count)

        self.failed_robot = failed_robot
        """ First robot no plan was found for, if any.
        :type: int """

        self.wall_time = float(wall_time)

        self.min_robustness = float(min_robustness)
        """ Minimum pairwise and clearance robustness of the plans.
        :type: float """

    @property
    def total_cost(self):
        return float(sum(p.path_length for p in self.plans if p is not None))

    def average_velocities(self):
        """
        Path length over duration per robot (m/s), None where no plan exists.
        """

        return [p.average_velocity() if p is not None else None for p in self.plans]

    def __str__(self):
        return "MultiRobotPlan({0} robots, {1}, cost {2:.3f} m, {3} nodes, {4} merges)".format(
            len(self.plans),
            "solved" if self.solved else "unsolved",
            self.total_cost,
            self.nodes_expanded,
            self.merges,
        )

    def todict(self):
        return {
            "solved": self.solved,
            "total_cost": self.total_cost,
            "merges": self.merges,
            "nodes_expanded": self.nodes_expanded,
            "conflicts_resolved": self.conflicts_resolved,
            "open_size": self.open_size,
            "max_conflict_count": self.max_conflict_count,
            "failed_robot": self.failed_robot,
            "wall_time": self.wall_time,
            "min_robustness": self.min_robustness,
            "average_velocities": self.average_velocities(),
            "plans": [p.todict() if p is not None else None for p in self.plans],
        }


def plan_robot(
    scenario,
    robot,
    constraints=(),
    low_level="cbot",
    cbot=None,
    rrt=None,
    seed=0,
    deadline=None,
):
    """
    Plans one robot of a scenario with the chosen single-robot planner.
    Static clearance is inflated by the scenario epsilon and the plan
    duration is capped by the scenario horizon.

    :rtype: stlcbot.sim.recording.PlanResult
    """

    spec = scenario.robots[robot]
    options = dict(
        index=robot,
        clearance_margin=scenario.epsilon,
        horizon=scenario.horizon_T,
        deadline=deadline,
    )
    if low_level == "cbot":
        params = (cbot or CbotParams()).replace(seed=seed)
        return cbot_plan(spec, scenario.environment, constraints, params, **options)
    if low_level == "rrt":
        params = (rrt or RrtParams()).replace(seed=seed)
        return rrt_plan(spec, scenario.environment, constraints, params, **options)
    raise ModelError("Unknown low-level planner '{0}'", low_level)


def low_level_seed(seed, robot, call):
    return derive_seed(seed, "low-level", robot, call)
