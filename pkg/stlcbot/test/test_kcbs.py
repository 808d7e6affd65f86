"""
Unit tests for the conflict-based search. The search logic runs against a
scripted low-level planner; two tests plan with cBOT end to end.
"""

import unittest
from unittest import mock

import numpy as np

from stlcbot.base.errors import ModelError, SchemaError
from stlcbot.coord.conflicts import StlConstraint
from stlcbot.coord.kcbs import ConflictBasedSearch, KcbsParams, solve
from stlcbot.coord.validate import validate_plan
from stlcbot.model.environments import make_empty
from stlcbot.model.scenario import RobotSpec, Scenario
from stlcbot.planner.cbot import CbotParams
from stlcbot.sim.recording import PlanResult


def polyline(*points):
    """Positions sampled every 0.1 m along a polyline."""

    out = [np.array(points[0], dtype=float)]
    for a, b in zip(points[:-1], points[1:]):
        a, b = np.array(a, dtype=float), np.array(b, dtype=float)
        n = int(round(np.max(np.abs(b - a)) / 0.1))
        for k in range(1, n + 1):
            out.append(a + (b - a) * k / n)
    return np.array(out)


def swap_scenario():
    robots = [
        RobotSpec("SingleIntegrator2D", 0.2, (-2.0, 0.0), (2.0, 0.0)),
        RobotSpec("SingleIntegrator2D", 0.2, (2.0, 0.3), (-2.0, 0.3)),
    ]
    return Scenario(make_empty(10.0), robots, 20.0, 0.05, "swap")


class ScriptedPlanner(object):
    """
    Straight lines to the goal, ignoring constraints. Robot 1 takes a detour
    through y = 2 when it has to avoid a moving box over the whole horizon.
    """

    def __init__(self, fail_branches=False, fail_robot=None, short=False):
        self.fail_branches = fail_branches
        self.fail_robot = fail_robot
        self.short = short
        self.calls = []

    def __call__(self, scenario, robot, constraints=(), low_level="cbot", cbot=None, rrt=None,
                 seed=0, deadline=None):
        self.calls.append((robot, len(constraints), seed))
        spec = scenario.robots[robot]
        solved = robot != self.fail_robot
        if self.fail_branches and any(c.source is not None for c in constraints):
            solved = False
        moving = [c for c in constraints if isinstance(c, StlConstraint) and c.source is None]
        if robot == 1 and moving:
            states = polyline(spec.start[:2], (2.0, 2.0), (-2.0, 2.0), spec.goal)
        elif self.short and robot == 1:
            states = polyline(spec.start[:2], (0.0, 2.5))
        else:
            states = polyline(spec.start[:2], spec.goal)
        return PlanResult(
            states, np.zeros((len(states) - 1, 2)), solved, robot=robot, goal=spec.goal
        )


class TestKcbsParams(unittest.TestCase):
    def test_errors(self):
        for bad in (
            {"merge_bound": 0},
            {"max_nodes": 0},
            {"time_budget": 0.0},
            {"padding": -0.1},
            {"low_level": "prm"},
        ):
            with self.assertRaises(ModelError, msg=str(bad)):
                KcbsParams(**bad)

    def test_from_dict(self):
        params = KcbsParams.from_dict(
            {"merge_bound": 40, "low_level": "rrt", "rrt": {"goal_bias": 0.1}}
        )
        self.assertEqual((params.merge_bound, params.low_level), (40, "rrt"))
        self.assertEqual(params.rrt.goal_bias, 0.1)
        self.assertEqual(params.cbot.candidates, 15)

        with self.assertRaises(SchemaError) as cm:
            KcbsParams.from_dict({"cbot": {"p": 3}})
        self.assertEqual(cm.exception.path, "kcbs.cbot.p")
        with self.assertRaises(SchemaError) as cm:
            KcbsParams.from_dict({"merge_bound": -1})
        self.assertEqual(cm.exception.path, "kcbs")
        with self.assertRaises(SchemaError):
            KcbsParams.from_dict({"budget": 3})


class TestConflictBasedSearch(unittest.TestCase):
    def run_search(self, planner, **params):
        with mock.patch("stlcbot.coord.kcbs.plan_robot", planner):
            return solve(swap_scenario(), KcbsParams(**params))

    def test_merge(self):
        for stl in (True, False):
            with self.subTest(use_stl_monitors=stl):
                planner = ScriptedPlanner()
                team = self.run_search(planner, merge_bound=1, use_stl_monitors=stl)
                self.assertTrue(team.solved)
                self.assertEqual(team.merges, 1)
                self.assertEqual(team.nodes_expanded, 3)
                self.assertEqual(team.conflicts_resolved, 1)
                self.assertEqual(team.max_conflict_count, 2)
                self.assertGreater(team.min_robustness, 0)
                self.assertGreater(np.max(team.plans[1].positions()[:, 1]), 1.9)

    def test_no_merge_below_bound(self):
        team = self.run_search(ScriptedPlanner(), merge_bound=25, max_nodes=5)
        self.assertFalse(team.solved)
        self.assertEqual(team.merges, 0)
        self.assertEqual(team.nodes_expanded, 5)
        self.assertEqual(team.max_conflict_count, 5)
        self.assertGreater(team.open_size, 0)
        self.assertLess(team.min_robustness, 0)

    def test_branches_fail(self):
        team = self.run_search(ScriptedPlanner(fail_branches=True))
        self.assertFalse(team.solved)
        self.assertEqual(team.nodes_expanded, 1)
        self.assertEqual(team.conflicts_resolved, 1)
        self.assertEqual(team.open_size, 0)

    def test_root_fails(self):
        planner = ScriptedPlanner(fail_robot=0)
        team = self.run_search(planner)
        self.assertFalse(team.solved)
        self.assertEqual(team.failed_robot, 0)
        self.assertIsNone(team.plans[1])
        self.assertEqual(len(planner.calls), 1)

    def test_certification(self):
        # conflict free, but robot 1 stops short of its goal
        team = self.run_search(ScriptedPlanner(short=True))
        self.assertFalse(team.solved)
        self.assertEqual(team.nodes_expanded, 1)
        self.assertGreater(team.min_robustness, 0)

    def test_branch_constraints(self):
        planner = ScriptedPlanner()
        with mock.patch("stlcbot.coord.kcbs.plan_robot", planner):
            search = ConflictBasedSearch(swap_scenario(), KcbsParams())
            root, failed = search.root()
            self.assertIsNone(failed)
            conflicts = search.detect(root.plans)
            self.assertEqual(len(conflicts), 1)
            conflict = conflicts[0]
            self.assertEqual(conflict.pair(), (0, 1))

            child = search.branch(root, conflict, 1, 0)
            (constraint,) = child.constraints[1]
            self.assertEqual(constraint.robot, 1)
            self.assertEqual(constraint.source, conflict)
            self.assertEqual(constraint.start, max(0, conflict.start - 5))
            self.assertEqual(constraint.end, min(40, conflict.end + 5))
            self.assertAlmostEqual(constraint.threshold, 0.6)
            self.assertEqual(child.depth, 1)
            self.assertEqual(child.parent, root.id)

        seeds = [seed for _, _, seed in planner.calls]
        self.assertEqual(len(set(seeds)), len(seeds))

    def test_units(self):
        search = ConflictBasedSearch(swap_scenario())
        self.assertEqual(search.units, [(0,), (1,)])
        search.merge((0,), (1,))
        self.assertEqual(search.units, [(0, 1)])
        self.assertEqual(search.unit_of(1), (0, 1))
        with self.assertRaises(ModelError):
            search.unit_of(2)


class TestLanes(unittest.TestCase):
    def test_cbot(self):
        robots = [
            RobotSpec("SingleIntegrator2D", 0.2, (-2.0, -1.0), (2.0, -1.0)),
            RobotSpec("SingleIntegrator2D", 0.2, (-2.0, 1.0), (2.0, 1.0)),
        ]
        scenario = Scenario(make_empty(10.0), robots, 20.0, 0.05, "lanes")
        team = solve(scenario, KcbsParams(cbot=CbotParams(max_iterations=300), seed=1))
        self.assertTrue(team.solved)
        self.assertEqual(team.nodes_expanded, 1)
        self.assertEqual(team.merges, 0)
        self.assertGreater(team.min_robustness, 0)

    def test_swap(self):
        scenario = swap_scenario()
        params = KcbsParams(cbot=CbotParams(max_iterations=500), seed=1)
        team = solve(scenario, params)
        self.assertTrue(team.solved)
        satisfied, margin = validate_plan(team.plans, scenario)
        self.assertTrue(satisfied)
        self.assertGreater(margin, 0)


if __name__ == "__main__":
    unittest.main()
