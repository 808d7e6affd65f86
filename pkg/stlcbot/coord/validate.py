"""
Mission specification of a scenario and certification of team plans.

The mission is safety and reachability: every robot pair keeps its
inflated separation over the joint horizon, every robot keeps clear of
obstacles and bounds along its own trajectory, and every robot eventually
reaches its goal.
"""

import itertools

from stlcbot import logger
from stlcbot.coord.conflicts import pair_safety_formula
from stlcbot.model.formula import AgentAtom, Atom, Eventually, WithinGoalRadius, conjunction
from stlcbot.model.world import clearance_formula
from stlcbot.sim.monitor import eval_ma_stl, ma_robustness


def reachability_formula(robot, spec, horizon):
    """
    F[0, T] goal(i, gx, gy) < r_goal
    """

    return Eventually(0.0, horizon, Atom(WithinGoalRadius(robot, spec.r_goal, spec.goal)))


def safety_formulas(scenario, durations):
    """
    Pairwise separation over the joint horizon and per-robot static
    clearance over each robot's own duration.

    :param durations: Plan duration (s) per robot.
    :type durations: list(float)
    """

    env = scenario.environment
    horizon = max(durations)
    out = []
    for i, j in itertools.combinations(range(scenario.n_robots), 2):
        a, b = scenario.robots[i], scenario.robots[j]
        out.append(pair_safety_formula(i, j, env.d_min, a.s_i, b.s_i, scenario.epsilon, horizon))
    for i, spec in enumerate(scenario.robots):
        out.append(AgentAtom(i, clearance_formula(env, spec.s_i, durations[i], i)))
    return out


def mission_formula(scenario, durations):
    """
    Safety and reachability of a scenario as one MA-STL formula.
    """

    reach = [
        AgentAtom(i, reachability_formula(i, spec, durations[i]))
        for i, spec in enumerate(scenario.robots)
    ]
    return conjunction(safety_formulas(scenario, durations) + reach)


def validate_plan(plans, scenario):
    """
    Evaluates the mission formula over the robots' trajectories.

    :param plans: Plans indexed by robot.
    :type plans: list(stlcbot.sim.recording.PlanResult)

    :return: (satisfied, minimum pairwise and clearance robustness)
    :rtype: (bool, float)
    """

    trajectories = {i: p.signal() for i, p in enumerate(plans)}
    durations = [p.duration for p in plans]
    satisfied = eval_ma_stl(mission_formula(scenario, durations), trajectories)
    margin = ma_robustness(conjunction(safety_formulas(scenario, durations)), trajectories)
    if not satisfied:
        logger.warning(
            "Plan for {0} violates its mission (margin {1:.4f})".format(scenario.name, margin)
        )
    return satisfied, margin
