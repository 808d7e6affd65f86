"""
Unit tests for formula evaluation and streaming monitors.
"""

import unittest
from unittest import mock

import numpy as np

from stlcbot.base.errors import EvaluationError, HorizonError
from stlcbot.model.formula import (
    AgentAtom,
    Always,
    And,
    Atom,
    DistToPointAbove,
    Eventually,
    HalfSpace,
    Not,
    Or,
    PairwiseDistAbove,
    TrueFormula,
    Until,
    WithinGoalRadius,
)
from stlcbot.model.signal import Signal
from stlcbot.parser.stl import parse_formula
from stlcbot.sim.monitor import (
    Evaluator,
    StreamingMonitor,
    eval_boolean,
    eval_ma_stl,
    eval_robustness,
    horizon_steps,
    ma_robustness,
    prefix_robustness,
    streaming_monitor,
    window_offsets,
)


def constant(position, n=21, robot=0, goals=None):
    return Signal(np.tile(position, (n, 1)), robots=(robot,), goals=goals)


def x_signal(values):
    values = np.asarray(values, dtype=float)
    return Signal(np.stack([values, np.zeros(len(values))], axis=1))


X_POSITIVE = Atom(HalfSpace(0, 1.0, 0.0, 0.0))
Y_POSITIVE = Atom(HalfSpace(0, 0.0, 1.0, 0.0))


def random_formula(rng, depth):
    if depth == 0 or rng.random() < 0.25:
        kind = rng.integers(3)
        if kind == 0:
            n = rng.normal(size=2)
            return Atom(HalfSpace(0, n[0], n[1], rng.uniform(-1, 1)))
        if kind == 1:
            p = rng.uniform(-2, 2, size=2)
            return Atom(DistToPointAbove(0, p[0], p[1], rng.uniform(0, 2)))
        g = rng.uniform(-2, 2, size=2)
        return Atom(WithinGoalRadius(0, rng.uniform(0, 2), (g[0], g[1])))

    a = 0.1 * rng.integers(0, 6)
    b = a + 0.1 * rng.integers(0, 6)
    op = rng.integers(6)
    if op == 0:
        return Not(random_formula(rng, depth - 1))
    if op == 1:
        return And(random_formula(rng, depth - 1), random_formula(rng, depth - 1))
    if op == 2:
        return Or(random_formula(rng, depth - 1), random_formula(rng, depth - 1))
    if op == 3:
        return Always(a, b, random_formula(rng, depth - 1))
    if op == 4:
        return Eventually(a, b, random_formula(rng, depth - 1))
    return Until(a, b, random_formula(rng, depth - 1), random_formula(rng, depth - 1))


def piecewise_constant(rng, n=61, pieces=6):
    cuts = np.sort(rng.choice(np.arange(1, n), pieces - 1, replace=False))
    values = rng.uniform(-3, 3, size=(pieces, 2))
    index = np.searchsorted(cuts, np.arange(n), side="right")
    return Signal(values[index])


class TestSemantics(unittest.TestCase):
    def test_true(self):
        s = constant((0.0, 0.0))
        self.assertTrue(eval_boolean(TrueFormula(), s, 0.0))
        self.assertTrue(eval_boolean(TrueFormula(), s, 1.0))
        self.assertEqual(eval_robustness(TrueFormula(), s), np.inf)

    def test_constant_signal(self):
        s = constant((3.0, 0.0))
        far = Atom(DistToPointAbove(0, 0.0, 0.0, 1.0))
        self.assertTrue(eval_boolean(Always(0, 1, far), s, 0.0))
        self.assertEqual(eval_robustness(Always(0, 2, far), s, 0.0), 2.0)

    def test_min_max(self):
        self.assertEqual(eval_robustness(Eventually(0, 0.1, X_POSITIVE), x_signal([-1.0, 0.5])), 0.5)
        self.assertEqual(
            eval_robustness(Not(Always(0, 0.1, X_POSITIVE)), x_signal([2.0, -0.25])), 0.25
        )

    def test_until_matches_definition(self):
        rng = np.random.default_rng(3)
        for interval in ((0.0, 2.0), (0.5, 1.5), (0.3, 0.3)):
            f = Until(interval[0], interval[1], X_POSITIVE, Y_POSITIVE)
            for _ in range(20):
                s = Signal(rng.uniform(-1, 1, size=(21, 2)))
                left, right = s.samples[:, 0], s.samples[:, 1]
                la, lb = int(round(interval[0] / 0.1)), int(round(interval[1] / 0.1))
                for k in (0, 5, 12):
                    rho = -np.inf
                    holds = False
                    for tau in range(k + la, min(k + lb, 20) + 1):
                        prefix = left[k : tau + 1]
                        rho = max(rho, min(right[tau], prefix.min()))
                        holds = holds or (right[tau] > 0 and bool(np.all(prefix > 0)))
                    self.assertEqual(eval_robustness(f, s, 0.1 * k), rho)
                    self.assertEqual(eval_boolean(f, s, 0.1 * k), holds)

    def test_window_rounding(self):
        self.assertEqual(window_offsets(Always(0.05, 0.15, TrueFormula()), 0.1), (0, 2))
        self.assertEqual(window_offsets(Eventually(0.05, 0.15, TrueFormula()), 0.1), (1, 1))
        with self.assertRaises(EvaluationError):
            window_offsets(Eventually(0.01, 0.09, TrueFormula()), 0.1)
        with self.assertRaises(EvaluationError):
            eval_boolean(Eventually(0.01, 0.09, X_POSITIVE), x_signal([1.0] * 5))
        self.assertEqual(horizon_steps(Always(0, 1, Eventually(0.05, 0.25, TrueFormula()))), 12)

    def test_off_grid_windows(self):
        s = x_signal([1.0, -1.0, -1.0, 1.0])
        # [0.21, 0.29] widens to samples 2..3
        self.assertFalse(eval_boolean(Always(0.21, 0.29, X_POSITIVE), s))
        # [0.11, 0.29] shrinks to sample 2
        self.assertFalse(eval_boolean(Eventually(0.11, 0.29, X_POSITIVE), s))
        self.assertTrue(eval_boolean(Eventually(0.11, 0.31, X_POSITIVE), s))

    def test_domain_errors(self):
        s = x_signal([1.0] * 5)
        with self.assertRaises(EvaluationError):
            eval_boolean(X_POSITIVE, s, 0.05)
        with self.assertRaises(EvaluationError):
            eval_boolean(X_POSITIVE, s, 0.5)
        with self.assertRaises(EvaluationError):
            eval_boolean(Always(1.0, 2.0, X_POSITIVE), s)
        with self.assertRaises(EvaluationError):
            eval_boolean(Atom(PairwiseDistAbove(0, 1, 1.0)), s)
        with self.assertRaises(EvaluationError):
            eval_boolean(Atom(WithinGoalRadius(0, 1.0)), s)

    def test_unbound_goal(self):
        s = constant((1.0, 1.0), goals={0: (1.2, 0.9)})
        self.assertAlmostEqual(eval_robustness(Atom(WithinGoalRadius(0, 0.3)), s), 0.1)

    def test_time_shift(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            f = random_formula(rng, 3)
            samples = piecewise_constant(rng).samples
            s = Signal(samples)
            shifted = Signal(samples, t0=0.7)
            for t in (0.0, 0.8):
                self.assertEqual(eval_robustness(f, s, t), eval_robustness(f, shifted, t + 0.7))
                self.assertEqual(eval_boolean(f, s, t), eval_boolean(f, shifted, t + 0.7))

    def test_soundness(self):
        rng = np.random.default_rng(0)
        for _ in range(1000):
            f = random_formula(rng, 4)
            s = piecewise_constant(rng)
            rho = eval_robustness(f, s)
            if abs(rho) > 1e-9:
                self.assertEqual(rho > 0, eval_boolean(f, s), str(f))

    def test_algebra(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            f = random_formula(rng, 3)
            g = random_formula(rng, 3)
            s = piecewise_constant(rng)
            rf, rg = eval_robustness(f, s), eval_robustness(g, s)
            self.assertEqual(eval_robustness(Not(f), s), -rf)
            self.assertEqual(eval_robustness(And(f, g), s), min(rf, rg))
            self.assertEqual(eval_robustness(Or(f, g), s), max(rf, rg))


def x_trace(*xs):
    return Signal(np.array([[x, 0.0] for x in xs]), robots=(0,))


def x_above(c, robot=0):
    return Atom(HalfSpace(robot, 1.0, 0.0, c))


class TestPrefixBound(unittest.TestCase):
    def test_always(self):
        f = Always(0, 1, x_above(0.0))
        self.assertAlmostEqual(prefix_robustness(f, x_trace(0.5, 0.4, 0.3)), 0.3)
        self.assertAlmostEqual(prefix_robustness(f, x_trace(0.5, -0.2)), -0.2)

    def test_eventually(self):
        self.assertEqual(prefix_robustness(Eventually(0, 2, x_above(1.0)), x_trace(0.0, 0.2)), np.inf)
        self.assertAlmostEqual(
            prefix_robustness(Eventually(0, 0.1, x_above(1.0)), x_trace(0.0, 0.2)), -0.8
        )

    def test_negation(self):
        f = Not(Eventually(0, 2, x_above(1.0)))
        self.assertAlmostEqual(prefix_robustness(f, x_trace(0.0, 2.0)), -1.0)
        self.assertAlmostEqual(prefix_robustness(f, x_trace(0.0, 0.2)), 0.8)

    def test_complete_signal(self):
        f = Always(0, 0.2, x_above(0.0))
        s = x_trace(0.3, 0.2, 0.1, 0.4)
        self.assertAlmostEqual(prefix_robustness(f, s), eval_robustness(f, s))


class TestTeamSemantics(unittest.TestCase):
    def test_agent_atoms(self):
        good = Always(0, 1, Atom(DistToPointAbove(0, 0.0, 0.0, 1.0)))
        trajectories = {0: constant((3.0, 0.0)), 1: constant((0.5, 0.0), robot=1)}
        self.assertTrue(
            eval_ma_stl(And(AgentAtom(0, TrueFormula()), AgentAtom(1, TrueFormula())), trajectories)
        )
        self.assertTrue(eval_ma_stl(AgentAtom(0, good), trajectories))

        bad = Always(0, 1, Atom(DistToPointAbove(1, 0.0, 0.0, 1.0)))
        self.assertFalse(eval_ma_stl(AgentAtom(1, bad), trajectories))
        self.assertTrue(eval_ma_stl(Or(AgentAtom(1, bad), AgentAtom(0, good)), trajectories))
        self.assertAlmostEqual(ma_robustness(AgentAtom(1, bad), trajectories), -0.5)

    def test_relabelled_trajectories(self):
        # per-robot signals recorded as robot 0 are attributed to their key
        trajectories = {0: constant((0.0, 0.0)), 1: constant((2.0, 0.0))}
        f = AgentAtom(1, parse_formula("G[0, 1](dist(1, 0, 0) > 1.5)"))
        self.assertTrue(eval_ma_stl(f, trajectories))

    def test_team_formula(self):
        trajectories = {
            0: constant((0.0, 0.0), n=5),
            1: constant((3.0, 0.0), n=30, robot=1),
        }
        f = And(
            Always(0, 2.5, Atom(PairwiseDistAbove(0, 1, 1.0))),
            AgentAtom(0, TrueFormula()),
        )
        self.assertTrue(eval_ma_stl(f, trajectories))
        self.assertEqual(ma_robustness(f, trajectories), 2.0)

    def test_missing_robot(self):
        with self.assertRaises(EvaluationError):
            eval_ma_stl(AgentAtom(2, TrueFormula()), {0: constant((0.0, 0.0))})


class TestStreamingMonitor(unittest.TestCase):
    def test_constant_streams(self):
        d_min = 0.4
        safety = Atom(PairwiseDistAbove(0, 1, d_min))

        monitor = streaming_monitor(safety, robots=(0, 1))
        for _ in range(10):
            monitor.add_sample([1.0, 2.0, 1.0, 2.0])
        for k in range(10):
            self.assertAlmostEqual(monitor.robustness_at(k), -d_min)

        monitor = streaming_monitor(safety, robots=(0, 1))
        for _ in range(10):
            monitor.add_sample([0.0, 0.0, d_min + 1.0, 0.5])
        for k in range(10):
            self.assertAlmostEqual(monitor.robustness_at(k), 1.0)

    def test_matches_batch(self):
        rng = np.random.default_rng(7)
        f = parse_formula("G[0, 0.5](pairdist(0, 1) > 0.3) | F[0.2, 0.6](dist(0, 0, 0) > 1)")
        samples = np.cumsum(rng.normal(scale=0.2, size=(50, 4)), axis=0)
        batch = Signal(samples, robots=(0, 1))

        monitor = StreamingMonitor(f, robots=(0, 1), time_column=True)
        for n, x in enumerate(samples):
            monitor.add_sample(np.concatenate([[0.1 * n], x]))
            for k in range(n + 1):
                if monitor.covered(k):
                    self.assertAlmostEqual(monitor.robustness_at(k), eval_robustness(f, batch, 0.1 * k))

        self.assertEqual(monitor.horizon, 6)
        self.assertTrue(monitor.covered(43))
        self.assertFalse(monitor.covered(44))

    def test_incremental(self):
        monitor = StreamingMonitor(Always(0, 0.2, x_above(0.0)))
        with mock.patch("stlcbot.sim.monitor.Evaluator", side_effect=Evaluator) as evaluator:
            for k in range(10):
                monitor.add_sample([float(k), 0.0])
                if monitor.covered(k - 2):
                    self.assertAlmostEqual(monitor.robustness_at(k - 2), k - 2)
            self.assertAlmostEqual(monitor.robustness_at(3), 3.0)

        self.assertEqual(len(monitor.values), 8)
        self.assertEqual(evaluator.call_count, 8)
        self.assertEqual([len(c.args[0]) for c in evaluator.call_args_list], [3] * 8)

    def test_agent_atoms(self):
        f = AgentAtom(0, Eventually(0, 0.5, x_above(0.45)))
        batch = x_trace(*(0.1 * k for k in range(20)))
        monitor = StreamingMonitor(f)
        for n, x in enumerate(batch.samples):
            monitor.add_sample(x)
            for k in range(n + 1):
                if monitor.covered(k):
                    self.assertAlmostEqual(monitor.robustness_at(k), eval_robustness(f, batch, 0.1 * k))
        self.assertAlmostEqual(monitor.robustness_at(10), 0.05)

    def test_horizon(self):
        monitor = StreamingMonitor(Always(0, 1, Atom(PairwiseDistAbove(0, 1, 0.1))), robots=(0, 1))
        for _ in range(10):
            monitor.add_sample([0.0, 0.0, 1.0, 1.0])
        with self.assertRaises(HorizonError):
            monitor.robustness_at(0)
        monitor.add_sample([0.0, 0.0, 1.0, 1.0])
        self.assertAlmostEqual(monitor.robustness_at(0), 0.9)

    def test_sample_checks(self):
        monitor = StreamingMonitor(TrueFormula(), time_column=True)
        monitor.add_sample([0.0, 1.0, 1.0])
        with self.assertRaises(EvaluationError):
            monitor.add_sample([0.2, 1.0, 1.0])
        with self.assertRaises(EvaluationError):
            monitor.add_sample([0.1, 1.0, 1.0, 1.0])


if __name__ == "__main__":
    unittest.main()
