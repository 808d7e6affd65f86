"""
Prioritized planning: robots are planned one after another, each avoiding
the moving boxes of the robots planned before it.
"""

import time

from stlcbot import DT, logger
from stlcbot.base.errors import ModelError
from stlcbot.coord.conflicts import moving_box_constraint, pair_threshold
from stlcbot.coord.plan import MultiRobotPlan, low_level_seed, plan_robot
from stlcbot.coord.validate import validate_plan


def priority_plan(
    scenario, order=None, low_level="cbot", cbot=None, rrt=None, seed=0, time_budget=60.0
):
    """
    Plans a team in priority order.

    :param order: Permutation of robot indices; ascending by default.
    :type order: list(int)

    :param low_level: Single-robot planner, cbot or rrt.
    :type low_level: str

    :return: The combined plan, or an unsolved plan naming the first robot
    that could not be planned.
    :rtype: stlcbot.coord.plan.MultiRobotPlan
    """

    n = scenario.n_robots
    order = list(range(n)) if order is None else list(order)
    if sorted(order) != list(range(n)):
        raise ModelError("Priority order {0} is not a permutation of {1} robots", order, n)

    started = time.perf_counter()
    deadline = started + time_budget
    last_step = int(scenario.horizon_T / DT + 1e-9)
    env = scenario.environment
    plans = [None] * n
    failed = None

    for rank, robot in enumerate(order):
        spec = scenario.robots[robot]
        constraints = []
        for other in order[:rank]:
            threshold = pair_threshold(
                spec.s_i, scenario.robots[other].s_i, scenario.epsilon, env.d_min
            )
            constraints.append(
                moving_box_constraint(robot, plans[other].positions(), threshold, last_step)
            )
        plans[robot] = plan_robot(
            scenario,
            robot,
            constraints,
            low_level,
            cbot,
            rrt,
            low_level_seed(seed, robot, rank),
            deadline,
        )
        if not plans[robot].solved:
            failed = robot
            logger.info("Priority planning failed at robot {0} (rank {1})".format(robot, rank))
            break

    margin = float("nan")
    solved = failed is None
    if solved:
        solved, margin = validate_plan(plans, scenario)

    return MultiRobotPlan(
        plans,
        solved,
        nodes_expanded=n if failed is None else order.index(failed) + 1,
        failed_robot=failed,
        wall_time=time.perf_counter() - started,
        min_robustness=margin,
    )
