"""
Unit tests for robot models, control windows and RK4 propagation.
"""

import math
import unittest

import numpy as np

from stlcbot.base.errors import ModelError, SchemaError, SimError
from stlcbot.model.dynamics import (
    KinodynamicLimits,
    SecondOrderUnicycle,
    SingleIntegrator2D,
    control_window,
    derivative,
    make_model,
    wrap_angle,
)
from stlcbot.sim.integrate import integrate, rk4_propagate


class TestModels(unittest.TestCase):
    def test_limits(self):
        lim = KinodynamicLimits()
        self.assertEqual((lim.v_max, lim.v_min, lim.a_max), (1.0, 0.0, 0.5))
        self.assertEqual((lim.yaw_rate_max, lim.yaw_accel_max), (0.6981, 2.0472))
        with self.assertRaises(ModelError):
            KinodynamicLimits(v_max=0.5, v_min=1.0)
        with self.assertRaises(ModelError):
            KinodynamicLimits(a_max=-1.0)
        with self.assertRaises(SchemaError):
            KinodynamicLimits.from_dict({"vmax": 2.0})
        self.assertEqual(KinodynamicLimits.from_dict({"v_max": 2.0}).v_max, 2.0)

    def test_derivative(self):
        unicycle = SecondOrderUnicycle()
        np.testing.assert_array_equal(
            derivative(unicycle, [1.0, 2.0, 0.3, 0.0, 0.0], [0.0, 0.0]), np.zeros(5)
        )
        np.testing.assert_allclose(
            derivative(unicycle, [0.0, 0.0, 0.0, 1.0, 0.0], [0.2, -0.1]),
            [1.0, 0.0, 0.0, 0.2, -0.1],
        )
        np.testing.assert_array_equal(
            derivative(SingleIntegrator2D(), [5.0, 5.0], [0.3, -0.4]), [0.3, -0.4]
        )

        # batched states under one control and one state under many controls
        states = np.zeros((4, 5))
        states[:, 3] = 1.0
        self.assertEqual(unicycle.derivative(states, np.zeros(2)).shape, (4, 5))
        self.assertEqual(unicycle.derivative(states[0], np.zeros((3, 2))).shape, (3, 5))

    def test_make_model(self):
        self.assertIsInstance(make_model("unicycle"), SecondOrderUnicycle)
        self.assertIsInstance(make_model("SingleIntegrator2D"), SingleIntegrator2D)
        with self.assertRaises(ModelError):
            make_model("boat")
        self.assertEqual(make_model("unicycle"), SecondOrderUnicycle())

    def test_wrap_angle(self):
        self.assertAlmostEqual(wrap_angle(math.pi), math.pi)
        self.assertAlmostEqual(wrap_angle(-math.pi), math.pi)
        self.assertAlmostEqual(wrap_angle(3.0 * math.pi / 2.0), -math.pi / 2.0)
        self.assertAlmostEqual(wrap_angle(0.25 - 4.0 * math.pi), 0.25)

    def test_initial_state(self):
        unicycle = SecondOrderUnicycle()
        np.testing.assert_allclose(unicycle.initial_state([1.0, 2.0, 0.5]), [1, 2, 0.5, 0, 0])
        np.testing.assert_allclose(unicycle.initial_state([0, 0, 0, 3.0, -2.0])[3:], [1.0, -0.6981])
        np.testing.assert_allclose(SingleIntegrator2D().initial_state([1.0, 2.0, 0.5]), [1, 2])


class TestCostToGo(unittest.TestCase):
    def setUp(self):
        self.model = SecondOrderUnicycle()
        self.goal = (5.0, 0.0)

    def test_integrator(self):
        self.assertAlmostEqual(SingleIntegrator2D().cost_to_go([3.0, 4.0], [0.0, 0.0], 3.0), 5.0)

    def test_coast(self):
        positions, theta = self.model.coast(np.array([0.0, 0.0, 0.0, 1.0, 0.5]), 6.0)
        self.assertEqual(positions.shape, (61, 2))
        np.testing.assert_allclose(np.linalg.norm(positions - [0.0, 2.0], axis=1), 2.0)
        np.testing.assert_allclose(theta, 0.5 * 0.1 * np.arange(61))

        positions, _ = self.model.coast(np.array([0.0, 0.0, 0.0, 0.1, 0.0]), 2.0)
        np.testing.assert_allclose(positions[-1], [1.0, 0.0], atol=1e-12)

    def test_straight(self):
        x = np.array([0.0, 0.0, 0.0, 1.0, 0.0])
        self.assertAlmostEqual(self.model.cost_to_go(x, self.goal), 5.0)
        self.assertAlmostEqual(self.model.cost_to_go(x, self.goal, 3.0), 2.0)

    def test_heading(self):
        radius = 1.0 / 0.6981
        self.assertAlmostEqual(self.model.turning_radius(), radius)
        away = np.array([0.0, 0.0, math.pi, 0.0, 0.0])
        self.assertAlmostEqual(self.model.cost_to_go(away, self.goal), 5.0 + math.pi * radius)
        self.assertAlmostEqual(self.model.cost_to_go(away, self.goal, 3.0), 5.0 + math.pi * radius)

        aligned = self.model.cost_to_go(np.array([0.0, 0.0, 0.0, 1.0, 0.0]), self.goal)
        turned = self.model.cost_to_go(np.array([0.0, 0.0, 0.5, 1.0, 0.0]), self.goal)
        self.assertAlmostEqual(turned - aligned, 0.5 * radius)

    def test_batch(self):
        x = np.array([[1.0, 0.0, 0.0, 1.0, 0.0], [0.5, 0.0, 0.0, 0.0, 0.0]])
        np.testing.assert_allclose(self.model.cost_to_go(x, self.goal, 3.0), [1.0, 3.0])


class TestControlWindow(unittest.TestCase):
    def test_corner(self):
        model = SecondOrderUnicycle()
        low, high = model.control_box()
        window = control_window(high, 0.3, model)
        samples = window.sample(np.random.default_rng(0), 200)
        self.assertEqual(samples.shape, (200, 2))
        self.assertTrue(np.all(samples <= high))
        self.assertTrue(np.all(np.linalg.norm(samples - high, axis=1) <= 0.3))

    def test_large_radius(self):
        model = SecondOrderUnicycle()
        window = control_window((0.0, 0.0), 100.0, model)
        low, high = model.control_box()
        np.testing.assert_array_equal(window.low, low)
        np.testing.assert_array_equal(window.high, high)
        self.assertTrue(np.all(window.contains(window.sample(np.random.default_rng(1), 50))))

    def test_norm(self):
        model = SingleIntegrator2D()
        window = control_window((0.9, 0.0), 0.4, model)
        samples = window.sample(np.random.default_rng(2), 500)
        self.assertTrue(np.all(np.linalg.norm(samples - (0.9, 0.0), axis=1) <= 0.4))
        self.assertTrue(np.all(np.linalg.norm(samples, axis=1) <= 1.0))

    def test_center_projection(self):
        model = SingleIntegrator2D()
        window = control_window((3.0, 4.0), 0.1, model)
        np.testing.assert_allclose(window.center, [0.6, 0.8])
        with self.assertRaises(ModelError):
            control_window((0.0, 0.0), 0.0, model)


class TestPropagation(unittest.TestCase):
    def test_straight_line(self):
        x = rk4_propagate(SingleIntegrator2D(), [1.0, -1.0], [0.3, -0.4], 0.1, 2.0)
        self.assertEqual(x.shape, (21, 2))
        t = 0.1 * np.arange(21)
        np.testing.assert_allclose(x, np.stack([1.0 + 0.3 * t, -1.0 - 0.4 * t], axis=1))

    def test_order(self):
        def decay(x, u):
            return -x

        errors = []
        for h in (0.1, 0.05, 0.025):
            n = int(round(1.0 / h))
            end = integrate(decay, 1.0, None, h, n)[-1]
            errors.append(abs(end - math.exp(-1.0)))
        for coarse, fine in zip(errors, errors[1:]):
            self.assertTrue(12.0 <= coarse / fine <= 20.0)

    def test_arc(self):
        x = rk4_propagate(SecondOrderUnicycle(), [0, 0, 0, 1.0, 0.5], [0.0, 0.0], 0.1, 1.0)
        end = x[-1]
        self.assertAlmostEqual(end[0], 2.0 * math.sin(0.5), 6)
        self.assertAlmostEqual(end[1], 2.0 * (1.0 - math.cos(0.5)), 6)
        self.assertAlmostEqual(end[2], 0.5, 6)

    def test_limits_hold(self):
        model = SecondOrderUnicycle()
        rng = np.random.default_rng(3)
        low, high = model.control_box()
        for _ in range(20):
            x0 = model.initial_state(np.concatenate([rng.uniform(-5, 5, 2), rng.uniform(-3, 3, 3)]))
            x = rk4_propagate(model, x0, rng.uniform(low, high), 0.1, 3.0)
            self.assertTrue(np.all((x[:, 3] >= 0.0) & (x[:, 3] <= 1.0)))
            self.assertTrue(np.all(np.abs(x[:, 4]) <= 0.6981))
            self.assertTrue(np.all((x[:, 2] > -math.pi) & (x[:, 2] <= math.pi)))

    def test_batch_and_determinism(self):
        model = SecondOrderUnicycle()
        x0 = np.array([0.0, 0.0, 0.3, 0.5, 0.0])
        controls = np.array([[0.5, 0.0], [-0.5, 1.0], [0.1, -2.0]])
        batch = rk4_propagate(model, np.tile(x0, (3, 1)), controls)
        self.assertEqual(batch.shape, (11, 3, 5))
        for k, u in enumerate(controls):
            single = rk4_propagate(model, x0, u)
            np.testing.assert_allclose(batch[:, k, :], single, rtol=0, atol=1e-12)
            np.testing.assert_array_equal(single, rk4_propagate(model, x0, u))

    def test_errors(self):
        with self.assertRaises(ModelError):
            rk4_propagate(SingleIntegrator2D(), [0.0, 0.0], [0.1, 0.1], 0.1, 0.25)
        with self.assertRaises(SimError):
            rk4_propagate(SingleIntegrator2D(), [0.0, 0.0], [np.inf, 0.0], 0.1, 1.0)


if __name__ == "__main__":
    unittest.main()
