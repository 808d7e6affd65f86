"""
Constrained Bayesian-optimization tree search (cBOT).

Each iteration samples candidate controls in a window around the nominal
control, evaluates their cost and constraints over a short propagation
horizon, fits Gaussian-process surrogates to the evaluations and extends
the tree with the candidate of highest constrained expected improvement.
The cost is a cost-to-go estimate from the segment endpoint. When the
extension violates a constraint, or the branch stops approaching the goal,
the search restarts from a uniformly sampled tree node that can still be
extended before the plan horizon.
"""

import math

import numpy as np

from stlcbot import DT, logger
from stlcbot.base.base import STLcBOTBase
from stlcbot.base.errors import GPError, ModelError, SchemaError, SimError, WindowFailure
from stlcbot.base.util import grid_steps
from stlcbot.gp.acquisition import cei_many
from stlcbot.gp.process import Dataset, KernelHyperparams, fit, refine_hyperparameters
from stlcbot.model.dynamics import KinodynamicLimits, control_window
from stlcbot.planner.tree import TreePlanner
from stlcbot.sim.integrate import rk4_propagate

PROGRESS_TOLERANCE = 0.01
""" Decrease of the cost-to-go (m) counted as progress of a branch. """


class CbotParams(STLcBOTBase):
    """
    Parameters of the cBOT planner.
    """

    def __init__(
        self,
        window_radius=None,
        candidates=15,
        propagation_horizon=1.0,
        max_horizon=50.0,
        goal_radius=None,
        max_iterations=2000,
        seed=0,
        limits=None,
        refine_hyperparameters=False,
        lookahead=3.0,
        stall_limit=10,
    ):
        """
        Constructor.

        :param window_radius: Radius d of the control window; by default 0.3
        times the half-diagonal of the control box.
        :type window_radius: float

        :param candidates: Candidates p sampled per window.
        :type candidates: int

        :param propagation_horizon: Duration of one extension (s).
        :type propagation_horizon: float

        :param max_horizon: Plan-duration budget T (s), between 3 and 50.
        :type max_horizon: float

        :param goal_radius: Goal radius; by default the robot's r_goal.
        :type goal_radius: float

        :param max_iterations: Iteration budget.
        :type max_iterations: int

        :param seed: Seed of the candidate and backtracking draws.
        :type seed: int

        :param limits: Kinodynamic limits of the robot.
        :type limits: stlcbot.model.dynamics.KinodynamicLimits

        :param refine_hyperparameters: Refine lengthscales per window by
        marginal likelihood.
        :type refine_hyperparameters: bool

        :param lookahead: Coasting time (s) of the cost-to-go estimate of
        models with a heading.
        :type lookahead: float

        :param stall_limit: Extensions of a branch without progress towards
        the goal before the search backtracks.
        :type stall_limit: int
        """

        if window_radius is not None and not window_radius > 0:
            raise ModelError("Window radius must be positive, got {0}", window_radius)
        if candidates < 2:
            raise ModelError("Need at least two candidates per window, got {0}", candidates)
        if not 3.0 <= max_horizon <= 50.0:
            raise ModelError("Plan horizon must lie in [3, 50] s, got {0}", max_horizon)
        grid_steps(propagation_horizon, DT, "propagation horizon")
        if propagation_horizon > max_horizon:
            raise ModelError(
                "Propagation horizon {0} exceeds the plan horizon {1}",
                propagation_horizon,
                max_horizon,
            )
        if goal_radius is not None and not goal_radius > 0:
            raise ModelError("Goal radius must be positive, got {0}", goal_radius)
        if max_iterations < 1:
            raise ModelError("Need at least one iteration, got {0}", max_iterations)
        if not (math.isfinite(lookahead) and lookahead >= 0):
            raise ModelError("Lookahead must be finite and nonnegative, got {0}", lookahead)
        if stall_limit < 1:
            raise ModelError("Stall limit must be at least 1, got {0}", stall_limit)

        self.window_radius = window_radius
        self.candidates = int(candidates)
        self.propagation_horizon = float(propagation_horizon)
        self.max_horizon = float(max_horizon)
        self.goal_radius = goal_radius
        self.max_iterations = int(max_iterations)
        self.seed = int(seed)
        self.limits = limits or KinodynamicLimits()
        self.refine_hyperparameters = bool(refine_hyperparameters)
        self.lookahead = float(lookahead)
        self.stall_limit = int(stall_limit)

    @classmethod
    def from_dict(cls, d, path="cbot"):
        d = dict(d)
        known = (
            "window_radius",
            "candidates",
            "propagation_horizon",
            "max_horizon",
            "goal_radius",
            "max_iterations",
            "seed",
            "limits",
            "refine_hyperparameters",
            "lookahead",
            "stall_limit",
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
            "window_radius": self.window_radius,
            "candidates": self.candidates,
            "propagation_horizon": self.propagation_horizon,
            "max_horizon": self.max_horizon,
            "goal_radius": self.goal_radius,
            "max_iterations": self.max_iterations,
            "seed": self.seed,
            "limits": self.limits.todict(),
            "refine_hyperparameters": self.refine_hyperparameters,
            "lookahead": self.lookahead,
            "stall_limit": self.stall_limit,
        }


def default_window_radius(model):
    low, high = model.control_box()
    return 0.3 * float(np.linalg.norm(0.5 * (high - low)))


def select_control(dataset, hyper, refine=False):
    """
    Index of the candidate with the highest constrained expected
    improvement. Ties go to the lowest observed cost, then to the lowest
    index. J_best is the lowest cost among feasible candidates, or the
    lowest cost overall when none is feasible.

    Records with non-finite values are left out of the surrogates. If a
    surrogate cannot be fitted, candidates rank by feasibility, then cost.

    :raises WindowFailure: when no candidate has finite evaluations.
    """

    mask = dataset.finite()
    if not np.any(mask):
        raise WindowFailure("All {0} candidates of the window are non-finite", len(dataset))

    index = np.flatnonzero(mask)
    x = dataset.inputs()[mask]
    costs = dataset.cost_array()[mask]
    constraints = dataset.constraint_array()[mask]
    feasible = np.all(constraints <= 0, axis=1)
    j_best = float(np.min(costs[feasible]) if np.any(feasible) else np.min(costs))

    try:
        if refine and len(costs) > 1:
            hyper = refine_hyperparameters(x, costs, hyper)
        gp_j = fit(x, costs, hyper)
        gps = [fit(x, constraints[:, k], hyper) for k in range(constraints.shape[1])]
        scores = cei_many(gp_j, gps, x, j_best)
        keys = [(-scores[k], costs[k], index[k]) for k in range(len(index))]
    except GPError as e:
        logger.warning("Falling back to observed values: {0}".format(e))
        keys = [(not feasible[k], costs[k], index[k]) for k in range(len(index))]

    return int(min(keys)[2])


class CbotPlanner(TreePlanner):
    """
    cBOT search for one robot.
    """

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
        params = params or CbotParams()
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
        self.lookahead = params.lookahead
        self.rng = np.random.default_rng(params.seed)
        self.radius = params.window_radius or default_window_radius(self.model)
        self.hyper = KernelHyperparams.for_window(self.model.control_dim, self.radius)
        self.segment_steps = grid_steps(params.propagation_horizon, DT, "propagation horizon")
        horizon = params.max_horizon if horizon is None else min(horizon, params.max_horizon)
        self.max_steps = int(math.floor(horizon / DT + 1e-9))

    def evaluate_candidate(self, u, state, step=0, prefix=None):
        """
        Cost and constraint values of propagating ``state`` under ``u`` for
        one propagation horizon. A blow-up yields infinite values.

        :return: (J, c)
        """

        try:
            segment = rk4_propagate(self.model, state, u, DT, self.params.propagation_horizon)
        except SimError:
            active = self.active_constraints(step + 1, self.segment_steps)
            return np.inf, np.full(1 + len(active), np.inf)
        active = self.active_constraints(step + 1, len(segment) - 1)
        return self.segment_costs(segment, step, active, prefix)

    def evaluate_window(self, center, state, step, prefix=None):
        """
        Samples and evaluates one window of candidates.

        :return: (candidates, propagated segments of shape (p, steps + 1, dim), dataset)
        """

        window = control_window(center, self.radius, self.model)
        candidates = window.sample(self.rng, self.params.candidates)
        batch = np.repeat(np.asarray(state)[None, :], len(candidates), axis=0)
        segments = np.swapaxes(
            rk4_propagate(self.model, batch, candidates, DT, self.params.propagation_horizon), 0, 1
        )
        active = self.active_constraints(step + 1, self.segment_steps)
        dataset = Dataset()
        for u, segment in zip(candidates, segments):
            cost, c = self.segment_costs(segment, step, active, prefix)
            dataset.add(u, cost, c)
        return candidates, segments, dataset

    def extendable(self, node_id):
        return self.tree.nodes[node_id].step + self.segment_steps <= self.max_steps

    def plan(self):
        """
        Grows the current branch one window at a time. The search backtracks
        to a uniformly drawn node that still fits a segment before the
        horizon when an extension fails or when the branch has not moved
        closer to the goal for ``stall_limit`` extensions, and gives up
        once no such node is left.
        """

        start = self.check_start()
        current = self.tree.add_root(start)
        if self.at_goal(start) and self.parking_ok(start, 0):
            return self.result(current, True, 0)

        frontier = [current] if self.extendable(current) else []
        nominal = self.model.zero_control()
        best = self.cost_to_go(start)
        stalled = 0
        iterations = 0
        while iterations < self.params.max_iterations and not self.expired():
            if not frontier:
                logger.debug("No node of robot {0} fits another segment".format(self.index))
                break
            iterations += 1
            node = self.tree.nodes[current]

            if self.extendable(current):
                prefix = self.history(current)
                candidates, segments, dataset = self.evaluate_window(
                    nominal, node.state, node.step, prefix
                )
                try:
                    k = select_control(dataset, self.hyper, self.params.refine_hyperparameters)
                except WindowFailure as e:
                    logger.debug(str(e))
                    k = None

                if k is not None:
                    segment, arrived = self.truncate_at_goal(segments[k], node.step, prefix)
                    if self.check_segment(segment, node.step, prefix):
                        current = self.tree.add(current, candidates[k], segment)
                        nominal = candidates[k]
                        if arrived:
                            return self.result(current, True, iterations)
                        if self.extendable(current):
                            frontier.append(current)

                        cost = dataset.costs[k]
                        if cost < best - PROGRESS_TOLERANCE:
                            best, stalled = cost, 0
                        else:
                            stalled += 1
                        if stalled < self.params.stall_limit:
                            continue
                        logger.debug("Branch stalled after {0} extensions".format(stalled))

            current = frontier[int(self.rng.integers(len(frontier)))]
            nominal = nominal_control_update(self.tree, current, self.model)
            best = self.cost_to_go(self.tree.nodes[current].state)
            stalled = 0
            logger.debug(
                "Backtracking to node {0} at step {1}".format(current, self.tree.nodes[current].step)
            )

        return self.result(None, False, iterations)


def nominal_control_update(tree, node_id, model):
    """
    Window center for a window grown from a tree node: the control that
    led to it, zero at the root.
    """

    control = tree.nodes[node_id].control
    return model.zero_control() if control is None else np.array(control)


def plan(
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
    Plans one robot with cBOT.

    :param robot: Robot entry of a scenario.
    :type robot: stlcbot.model.scenario.RobotSpec

    :param env: Workspace.
    :type env: stlcbot.model.world.Environment

    :param extra_constraints: Formulas or constraint objects every segment
    has to satisfy.
    :type extra_constraints: list

    :param params: Planner parameters.
    :type params: stlcbot.planner.cbot.CbotParams

    :param index: Robot index used by formulas and the result.
    :type index: int

    :param clearance_margin: Extra static clearance (the scenario epsilon).
    :type clearance_margin: float

    :param horizon: Optional cap on the plan duration (s).
    :type horizon: float

    :param deadline: Optional time.perf_counter() value after which the
    search gives up.
    :type deadline: float

    :rtype: stlcbot.sim.recording.PlanResult
    """

    return CbotPlanner(
        robot, env, extra_constraints, params, index, clearance_margin, horizon, deadline
    ).plan()
