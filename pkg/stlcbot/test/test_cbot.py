"""
Unit tests for the cBOT tree search and the shared tree machinery.
"""

import unittest
from unittest import mock

import numpy as np

from stlcbot.base.errors import ModelError, PlanError, SchemaError, WindowFailure
from stlcbot.base.util import max_norm, path_length
from stlcbot.gp.process import Dataset, KernelHyperparams
from stlcbot.model.environments import make_empty
from stlcbot.model.formula import Always, Atom, HalfSpace
from stlcbot.model.scenario import RobotSpec
from stlcbot.model.world import Box, Environment
from stlcbot.planner.cbot import (
    CbotParams,
    CbotPlanner,
    nominal_control_update,
    plan,
    select_control,
)
from stlcbot.planner.tree import MARGIN_CAP, FormulaConstraint, MotionTree, as_constraints


def left_of(x, robot=0):
    """Segment formula keeping the robot at x < ``x``."""

    return Always(0.0, 50.0, Atom(HalfSpace(robot, -1.0, 0.0, -x)))


def integrator(start=(0.0, 0.0), goal=(3.0, 0.0)):
    return RobotSpec("SingleIntegrator2D", 0.2, start, goal, 0.3)


class TestMotionTree(unittest.TestCase):
    def test_paths(self):
        tree = MotionTree()
        root = tree.add_root([0.0, 0.0])
        with self.assertRaises(PlanError):
            tree.add_root([1.0, 1.0])
        segment = [[0.0, 0.0], [0.1, 0.0], [0.2, 0.0]]
        child = tree.add(root, [1.0, 0.0], segment)
        grandchild = tree.add(child, [0.0, 1.0], [[0.2, 0.0], [0.2, 0.1]])

        self.assertEqual(len(tree), 3)
        self.assertEqual(tree.nodes[grandchild].step, 3)
        self.assertAlmostEqual(tree.nodes[grandchild].time, 0.3)

        states, controls = tree.path_to(grandchild)
        np.testing.assert_allclose(states, [[0, 0], [0.1, 0], [0.2, 0], [0.2, 0.1]])
        np.testing.assert_allclose(controls, [[1, 0], [1, 0], [0, 1]])

        states, controls = tree.path_to(root)
        self.assertEqual(states.shape, (1, 2))
        self.assertEqual(controls.size, 0)

        self.assertEqual(tree.nearest([0.25, 0.2]), grandchild)
        self.assertEqual(tree.nearest([-1.0, 0.0]), root)

    def test_nominal_control(self):
        planner = CbotPlanner(integrator(), make_empty())
        root = planner.tree.add_root([0.0, 0.0])
        child = planner.tree.add(root, [0.3, -0.2], [[0.0, 0.0], [0.03, -0.02]])
        np.testing.assert_array_equal(nominal_control_update(planner.tree, root, planner.model), [0, 0])
        np.testing.assert_array_equal(
            nominal_control_update(planner.tree, child, planner.model), [0.3, -0.2]
        )

    def test_as_constraints(self):
        f = left_of(1.0)
        constraints = as_constraints([f], 2)
        self.assertIsInstance(constraints[0], FormulaConstraint)
        self.assertEqual(constraints[0].robot, 2)
        self.assertEqual(as_constraints(constraints, 0), constraints)
        self.assertEqual(as_constraints(None, 0), [])


class TestFormulaConstraint(unittest.TestCase):
    def setUp(self):
        # x < 0.75 over [2, 3] s of the plan
        self.constraint = FormulaConstraint(Always(2.0, 3.0, Atom(HalfSpace(0, -1.0, 0.0, -0.75))))
        self.segment = np.stack([0.1 * np.arange(1, 11), np.zeros(10)], axis=1)

    def test_before_window(self):
        c = self.constraint
        self.assertEqual(c.horizon, 30)
        self.assertEqual(c.segment_margin(self.segment, 1, np.zeros((1, 2))), np.inf)
        self.assertTrue(c.segment_holds(self.segment, 1, np.zeros((1, 2))))

    def test_partly_inside_window(self):
        c = self.constraint
        self.assertAlmostEqual(c.segment_margin(self.segment, 15, np.zeros((15, 2))), -0.25)
        self.assertFalse(c.segment_holds(self.segment, 15, np.zeros((15, 2))))
        self.assertAlmostEqual(c.segment_margin(self.segment, 15), -0.25)

        slow = 0.5 * self.segment
        self.assertTrue(c.segment_holds(slow, 15, np.zeros((15, 2))))

    def test_after_window(self):
        c = self.constraint
        self.assertFalse(c.active(31, 10))
        self.assertAlmostEqual(c.segment_margin(self.segment, 31, np.zeros((31, 2))), 0.75)

        prefix = np.zeros((31, 2))
        prefix[25, 0] = 0.9
        self.assertAlmostEqual(c.segment_margin(self.segment, 31, prefix), -0.15)

    def test_parking(self):
        c = self.constraint
        self.assertAlmostEqual(c.parked_margin([1.0, 0.0], 15, np.zeros((15, 2))), -0.25)
        self.assertAlmostEqual(c.parked_margin([1.0, 0.0], 31, np.zeros((31, 2))), 0.75)

    def test_prefix_length(self):
        with self.assertRaises(PlanError):
            self.constraint.segment_margin(self.segment, 15, np.zeros((3, 2)))


class TestParams(unittest.TestCase):
    def test_defaults(self):
        params = CbotParams()
        self.assertEqual(params.candidates, 15)
        self.assertEqual(params.propagation_horizon, 1.0)
        self.assertEqual(params.max_horizon, 50.0)
        self.assertIsNone(params.window_radius)
        self.assertEqual((params.lookahead, params.stall_limit), (3.0, 10))

    def test_errors(self):
        for bad in (
            {"max_horizon": 2.0},
            {"max_horizon": 60.0},
            {"candidates": 1},
            {"window_radius": 0.0},
            {"propagation_horizon": 0.25},
            {"propagation_horizon": 4.0, "max_horizon": 3.0},
            {"goal_radius": -1.0},
            {"max_iterations": 0},
            {"lookahead": -1.0},
            {"lookahead": float("inf")},
            {"stall_limit": 0},
        ):
            with self.assertRaises(ModelError, msg=str(bad)):
                CbotParams(**bad)

    def test_from_dict(self):
        params = CbotParams.from_dict({"candidates": 8, "limits": {"v_max": 2.0}})
        self.assertEqual(params.candidates, 8)
        self.assertEqual(params.limits.v_max, 2.0)
        params = CbotParams.from_dict({"lookahead": 1.5, "stall_limit": 4})
        self.assertEqual((params.lookahead, params.stall_limit), (1.5, 4))
        self.assertEqual(CbotParams.from_dict(params.todict()).todict(), params.todict())

        with self.assertRaises(SchemaError) as cm:
            CbotParams.from_dict({"candidate": 8})
        self.assertEqual(cm.exception.path, "cbot.candidate")
        with self.assertRaises(SchemaError) as cm:
            CbotParams.from_dict({"max_horizon": 80.0})
        self.assertEqual(cm.exception.path, "cbot")

    def test_replace(self):
        params = CbotParams(seed=1)
        other = params.replace(seed=7)
        self.assertEqual((params.seed, other.seed), (1, 7))


class TestSelectControl(unittest.TestCase):
    def setUp(self):
        self.hyper = KernelHyperparams.for_window(2, 0.4)
        self.points = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [2.0, 0.0]]

    def dataset(self, costs, constraints):
        data = Dataset()
        for u, cost, c in zip(self.points, costs, constraints):
            data.add(u, cost, c)
        return data

    def test_lowest_cost(self):
        costs = [1.0, 0.8, 0.2, 0.9, 1.2]
        data = self.dataset(costs, [[-1.0]] * 5)
        self.assertEqual(select_control(data, self.hyper), 2)

    def test_infeasible_best(self):
        costs = [0.0, 0.5, 1.0, 1.0, 1.0]
        constraints = [[1.0], [-1.0], [-1.0], [-1.0], [-1.0]]
        self.assertEqual(select_control(self.dataset(costs, constraints), self.hyper), 1)

    def test_nonfinite_records(self):
        costs = [np.inf, 1.0, 0.2, 1.0, 1.0]
        constraints = [[-1.0], [-1.0], [-1.0], [np.nan], [-1.0]]
        self.assertEqual(select_control(self.dataset(costs, constraints), self.hyper), 2)

        data = self.dataset([np.inf] * 5, [[-1.0]] * 5)
        with self.assertRaises(WindowFailure):
            select_control(data, self.hyper)

    def test_refined(self):
        costs = [1.0, 0.8, 0.2, 0.9, 1.2]
        data = self.dataset(costs, [[-1.0]] * 5)
        self.assertEqual(select_control(data, self.hyper, refine=True), 2)


class TestCbotPlanner(unittest.TestCase):
    def setUp(self):
        self.env = make_empty()
        self.params = CbotParams(seed=1, max_horizon=20.0, max_iterations=300)

    def test_evaluate_candidate(self):
        planner = CbotPlanner(integrator(), self.env, params=self.params)
        cost, c = planner.evaluate_candidate(np.array([1.0, 0.0]), np.zeros(2))
        self.assertAlmostEqual(cost, 2.0)
        self.assertEqual(c.shape, (1,))
        self.assertLess(c[0], 0)

        planner = CbotPlanner(integrator(), self.env, [left_of(1.5)], self.params)
        cost, c = planner.evaluate_candidate(np.array([1.0, 0.0]), np.zeros(2))
        self.assertEqual(c.shape, (2,))
        self.assertAlmostEqual(c[1], -0.5)

        cost, c = planner.evaluate_candidate(np.array([np.inf, 0.0]), np.zeros(2))
        self.assertEqual(cost, np.inf)
        self.assertTrue(np.all(np.isinf(c)))
        self.assertEqual(c.shape, (2,))

    def test_evaluate_window(self):
        planner = CbotPlanner(integrator(), self.env, params=self.params)
        center = np.array([0.2, 0.1])
        candidates, segments, data = planner.evaluate_window(center, np.zeros(2), 0)
        self.assertEqual(candidates.shape, (15, 2))
        self.assertEqual(segments.shape, (15, 11, 2))
        self.assertEqual(len(data), 15)
        self.assertTrue(np.all(np.linalg.norm(candidates - center, axis=1) <= planner.radius + 1e-12))
        np.testing.assert_allclose(segments[:, -1], candidates)

    def test_plan_integrator(self):
        robot = integrator()
        result = plan(robot, self.env, params=self.params)
        self.assertTrue(result.solved)
        np.testing.assert_array_equal(result.states[0], [0.0, 0.0])
        self.assertLessEqual(max_norm(result.final_position() - np.array(robot.goal)), 0.3)
        self.assertEqual(result.controls.shape, (result.steps, 2))
        self.assertLessEqual(result.duration, 20.0 + 1e-9)

        again = plan(robot, self.env, params=self.params)
        np.testing.assert_array_equal(result.states, again.states)

    def test_plan_unicycle(self):
        robot = RobotSpec("SecondOrderUnicycle", 0.2, (0.0, 0.0, 0.0), (2.0, 0.0), 0.3)
        result = plan(robot, self.env, params=self.params.replace(max_iterations=500))
        self.assertTrue(result.solved)
        self.assertEqual(result.states.shape[1], 5)
        self.assertTrue(np.all(result.states[:, 3] <= 1.0 + 1e-12))

    def test_start_at_goal(self):
        result = plan(integrator(goal=(0.1, 0.0)), self.env, params=self.params)
        self.assertTrue(result.solved)
        self.assertEqual(result.iterations, 0)
        self.assertEqual(result.steps, 0)

    def test_blocked_start(self):
        env = Environment(Box((0.0, 0.0), (5.0, 5.0)), [Box((0.0, 0.0), (0.5, 0.5))])
        with self.assertRaises(PlanError):
            plan(integrator(), env, params=self.params)

    def test_constraint_holds(self):
        params = self.params.replace(max_iterations=60)
        result = plan(integrator(), self.env, [left_of(1.5)], params)
        self.assertFalse(result.solved)
        self.assertEqual(result.iterations, 60)
        self.assertTrue(np.all(result.positions()[:, 0] < 1.5))

    def test_horizon_cap(self):
        result = plan(integrator(goal=(12.0, 0.0)), self.env, params=self.params, horizon=3.0)
        self.assertFalse(result.solved)
        self.assertLessEqual(result.steps, 30)

    def test_horizon_too_short(self):
        result = plan(integrator(), self.env, params=self.params, horizon=0.5)
        self.assertFalse(result.solved)
        self.assertEqual(result.iterations, 0)
        self.assertEqual(result.steps, 0)

    def test_straight_unicycle(self):
        robot = RobotSpec("SecondOrderUnicycle", 0.2, (0.0, 0.0, 0.0), (5.0, 0.0), 0.3)
        for seed in range(5):
            params = self.params.replace(seed=seed, max_iterations=500)
            result = plan(robot, self.env, params=params)
            self.assertTrue(result.solved, seed)
            self.assertLessEqual(path_length(result.positions()), 7.5, seed)

    def test_stalled_branch(self):
        params = self.params.replace(max_iterations=12, stall_limit=2)
        planner = CbotPlanner(integrator(goal=(12.0, 12.0)), self.env, params=params)
        planner.rng = mock.Mock(wraps=planner.rng)
        with mock.patch.object(CbotPlanner, "cost_to_go", return_value=5.0):
            result = planner.plan()
        self.assertFalse(result.solved)
        self.assertEqual(result.iterations, 12)
        self.assertGreaterEqual(planner.rng.integers.call_count, 6)

    def test_future_window(self):
        f = Always(2.0, 3.0, Atom(HalfSpace(0, -1.0, 0.0, -0.75)))
        planner = CbotPlanner(integrator(), self.env, [f], self.params)
        cost, c = planner.evaluate_candidate(np.array([1.0, 0.0]), np.zeros(2))
        self.assertEqual(c[1], -MARGIN_CAP)

        result = plan(integrator(), self.env, [f], self.params.replace(max_iterations=150))
        self.assertTrue(np.all(result.positions()[20:31, 0] < 0.75))

    def test_history(self):
        planner = CbotPlanner(integrator(), self.env, [left_of(1.5)], self.params)
        root = planner.tree.add_root([0.0, 0.0])
        child = planner.tree.add(root, [1.0, 0.0], [[0.0, 0.0], [0.1, 0.0], [0.2, 0.0]])
        np.testing.assert_allclose(planner.history(child), [[0, 0], [0.1, 0], [0.2, 0]])
        self.assertIsNone(CbotPlanner(integrator(), self.env, params=self.params).history(0))

    def test_goal_truncation(self):
        params = self.params.replace(goal_radius=0.35)
        planner = CbotPlanner(integrator(goal=(1.0, 0.0)), self.env, params=params)
        segment = np.stack([np.linspace(0.0, 2.0, 21), np.zeros(21)], axis=1)
        cut, arrived = planner.truncate_at_goal(segment, 0)
        self.assertTrue(arrived)
        self.assertEqual(len(cut), 8)

        planner = CbotPlanner(integrator(goal=(1.0, 0.0)), self.env, [left_of(0.5)], params)
        cut, arrived = planner.truncate_at_goal(segment, 0)
        self.assertFalse(arrived)
        self.assertEqual(len(cut), 21)


if __name__ == "__main__":
    unittest.main()
