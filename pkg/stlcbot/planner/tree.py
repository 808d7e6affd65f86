"""
Search trees of single-robot planners and the segment checks they share.
"""

import time

import numpy as np

from stlcbot import DT, logger
from stlcbot.base.base import STLcBOTBase
from stlcbot.base.errors import PlanError
from stlcbot.base.util import max_norm
from stlcbot.model.formula import Formula
from stlcbot.model.signal import Signal
from stlcbot.model.world import RobotFootprint, clearance_formula, clearance_slack, segment_clear
from stlcbot.sim.monitor import eval_boolean, eval_robustness, horizon_steps, prefix_robustness
from stlcbot.sim.recording import PlanResult

MARGIN_CAP = 100.0
""" Bound (m) on constraint margins fed to the surrogates; formulas that do
not read a segment yet have unbounded margin. """


class TreeNode(STLcBOTBase):
    """
    Node of a motion tree.
    """

    __slots__ = ("id", "state", "step", "parent", "control", "segment")

    def __init__(self, id, state, step, parent=None, control=None, segment=None):
        self.id = id
        """ Index in the tree.
        :type: int """

        self.state = state
        """ Robot state at this node.
        :type: numpy.ndarray """

        self.step = step
        """ Grid step of the node (time = step * dt).
        :type: int """

        self.parent = parent
        """ Parent index, None at the root.
        :type: int """

        self.control = control
        """ Control applied on the incoming edge.
        :type: numpy.ndarray """

        self.segment = segment
        """ States sampled along the incoming edge, starting at the parent state.
        :type: numpy.ndarray """

    @property
    def time(self):
        return self.step * DT

    def __repr__(self):
        return "TreeNode({0}, step {1}, parent {2})".format(self.id, self.step, self.parent)


class MotionTree(STLcBOTBase):
    """
    Tree of states linked by control-labelled edges, rooted at the
    initial state at time 0.
    """

    def __init__(self, dt=DT):
        self.dt = dt
        self.nodes = []
        self.positions = []

    def __len__(self):
        return len(self.nodes)

    def add_root(self, state):
        if self.nodes:
            raise PlanError("Tree already has a root")
        return self._append(TreeNode(0, np.array(state, dtype=float), 0))

    def add(self, parent, control, segment):
        """
        Adds a node at the end of a segment grown from ``parent``.

        :param segment: States on the grid, the first being the parent state.
        """

        node = self.nodes[parent]
        segment = np.array(segment, dtype=float)
        return self._append(
            TreeNode(
                len(self.nodes),
                segment[-1].copy(),
                node.step + len(segment) - 1,
                parent,
                np.array(control, dtype=float),
                segment,
            )
        )

    def _append(self, node):
        self.nodes.append(node)
        self.positions.append(node.state[:2].copy())
        return node.id

    def path_to(self, node_id):
        """
        States and per-step controls from the root to a node.

        :return: (states of shape (n + 1, dim), controls of shape (n, m))
        """

        chain = []
        while node_id is not None:
            chain.append(self.nodes[node_id])
            node_id = self.nodes[node_id].parent
        chain.reverse()

        states = [chain[0].state[None, :]]
        controls = []
        for node in chain[1:]:
            states.append(node.segment[1:])
            controls.append(np.repeat(node.control[None, :], len(node.segment) - 1, axis=0))
        states = np.concatenate(states, axis=0)
        if controls:
            controls = np.concatenate(controls, axis=0)
        else:
            controls = np.zeros((0, 0))
        return states, controls

    def nearest(self, position):
        """
        Node whose position is closest to ``position`` (Euclidean).
        """

        d = np.linalg.norm(np.array(self.positions) - np.asarray(position, dtype=float), axis=1)
        return int(np.argmin(d))

    def closest_to(self, goal):
        return self.nearest(goal)


class FormulaConstraint(STLcBOTBase):
    """
    Formula over a robot's whole trajectory, read at time 0 of the plan.

    A segment is admitted unless the trace from the root through it
    violates the formula whatever follows; a parked robot holds its final
    position for good.
    """

    reads_history = True

    def __init__(self, formula, robot=0):
        self.formula = formula
        self.robot = robot

        self.horizon = horizon_steps(formula)
        """ Last grid step the formula reads.
        :type: int """

    def active(self, first_step, n_samples):
        return first_step <= self.horizon

    def trace(self, positions, first_step, prefix=None):
        """
        Positions from step 0 through ``positions``, whose first sample sits
        at ``first_step``. ``prefix`` holds steps [0, first_step); without
        it the robot waits at the first of ``positions`` until then.
        """

        positions = np.asarray(positions, dtype=float)[:, :2]
        if prefix is None:
            prefix = np.repeat(positions[:1], first_step, axis=0)
        prefix = np.asarray(prefix, dtype=float).reshape(-1, 2)
        if len(prefix) != first_step:
            raise PlanError("{0} positions precede step {1}", len(prefix), first_step)
        return np.concatenate([prefix, positions], axis=0)

    def segment_margin(self, positions, first_step, prefix=None):
        signal = Signal(self.trace(positions, first_step, prefix), DT, 0.0, (self.robot,))
        return prefix_robustness(self.formula, signal)

    def segment_holds(self, positions, first_step, prefix=None):
        return self.segment_margin(positions, first_step, prefix) > 0

    def parked_margin(self, position, step, prefix=None):
        trace = self.trace(np.asarray(position, dtype=float)[:2].reshape(1, 2), step, prefix)
        signal = Signal(trace, DT, 0.0, (self.robot,))
        return eval_robustness(self.formula, signal.extended(len(trace) + self.horizon + 1))

    def __repr__(self):
        return "FormulaConstraint({0})".format(self.formula)


def as_constraints(extra_constraints, robot):
    """
    Wraps bare formulas into segment constraints for the given robot.
    """

    out = []
    for c in extra_constraints or ():
        out.append(FormulaConstraint(c, robot) if isinstance(c, Formula) else c)
    return out


class TreePlanner(STLcBOTBase):
    """
    Machinery shared by tree planners: segment checks against static
    clearance and extra constraints, goal tests with parking, and the
    assembly of results.

    The first sample of a segment is its parent's state and is not checked
    again; the root is checked once when the planner starts. Constraints
    that read the whole trajectory get the positions of the branch before
    a segment as ``prefix``: steps [0, parent step].
    """

    lookahead = 0.0
    """ Coasting time (s) of the cost-to-go estimate.
    :type: float """

    def __init__(
        self,
        robot,
        env,
        extra_constraints=(),
        index=0,
        clearance_margin=0.0,
        goal_radius=None,
        limits=None,
        deadline=None,
    ):
        self.spec = robot
        self.env = env
        self.index = index
        self.model = robot.make_model(limits)
        self.footprint = RobotFootprint(robot.s_i)
        self.clearance_margin = clearance_margin
        self.goal = np.array(robot.goal, dtype=float)
        self.goal_radius = goal_radius if goal_radius is not None else robot.r_goal
        self.constraints = as_constraints(extra_constraints, index)
        self.reads_history = any(getattr(c, "reads_history", False) for c in self.constraints)
        self.deadline = deadline
        self.clearance_formulas = {}
        self.tree = MotionTree()
        self.started = time.perf_counter()

    def check_start(self):
        start = self.model.initial_state(self.spec.start)
        if not segment_clear(self.env, start[None, :], self.footprint):
            raise PlanError(
                "Start {0} of robot {1} is not clear of obstacles", start[:2].tolist(), self.index
            )
        return start

    def expired(self):
        return self.deadline is not None and time.perf_counter() > self.deadline

    def signal(self, positions):
        return Signal(positions, DT, 0.0, (self.index,))

    def history(self, node_id):
        """
        Positions of the branch from the root to a node, or None when no
        constraint reads them.
        """

        if not self.reads_history:
            return None
        return self.tree.path_to(node_id)[0][:, :2]

    def branch_prefix(self, segment, start_step, prefix):
        if prefix is not None or not self.reads_history:
            return prefix
        return np.repeat(np.asarray(segment, dtype=float)[:1, :2], start_step + 1, axis=0)

    def cost_to_go(self, state):
        return float(self.model.cost_to_go(state, self.goal, self.lookahead, DT))

    def clearance_check(self, n_samples):
        if n_samples not in self.clearance_formulas:
            self.clearance_formulas[n_samples] = clearance_formula(
                self.env,
                self.footprint,
                (n_samples - 1) * DT,
                self.index,
                self.clearance_margin,
            )
        return self.clearance_formulas[n_samples]

    def active_constraints(self, start_step, n_samples):
        return [c for c in self.constraints if c.active(start_step, n_samples)]

    def segment_costs(self, segment, start_step, active, prefix=None):
        """
        Cost J and constraint values c (feasible where <= 0) of a segment:
        the cost-to-go from its endpoint, static clearance slack and minus
        the robustness of each active constraint.
        """

        if not np.all(np.isfinite(segment)):
            return np.inf, np.full(1 + len(active), np.inf)
        p = segment[1:, :2]
        prefix = self.branch_prefix(segment, start_step, prefix)
        cost = self.cost_to_go(segment[-1])
        c = [clearance_slack(self.env, p, self.footprint.s, self.clearance_margin)]
        for constraint in active:
            margin = constraint.segment_margin(p, start_step + 1, prefix)
            c.append(-min(margin, MARGIN_CAP))
        return cost, np.array(c)

    def check_segment(self, segment, start_step, prefix=None):
        """
        Monitors the static clearance formula and every active constraint
        on the new samples of a segment.

        :rtype: bool
        """

        p = segment[1:, :2]
        if not np.all(np.isfinite(p)):
            return False
        signal = self.signal(p)
        if not eval_boolean(self.clearance_check(len(p)), signal):
            return False
        prefix = self.branch_prefix(segment, start_step, prefix)
        for constraint in self.active_constraints(start_step + 1, len(p)):
            if not constraint.segment_holds(p, start_step + 1, prefix):
                return False
        return True

    def at_goal(self, position):
        return bool(max_norm(np.asarray(position)[:2] - self.goal) <= self.goal_radius)

    def parking_ok(self, position, step, prefix=None):
        """
        True iff holding ``position`` from ``step`` on keeps every extra
        constraint satisfied. ``prefix`` holds the positions of steps
        [0, step).
        """

        return all(c.parked_margin(position[:2], step, prefix) > 0 for c in self.constraints)

    def truncate_at_goal(self, segment, start_step, prefix=None):
        """
        Cuts a segment at its first new sample inside the goal set where the
        robot may park.

        :return: (segment, arrived)
        """

        prefix = self.branch_prefix(segment, start_step, prefix)
        for m in range(1, len(segment)):
            if not self.at_goal(segment[m]):
                continue
            before = None
            if prefix is not None:
                before = np.concatenate([prefix, np.asarray(segment, dtype=float)[1:m, :2]])
            if self.parking_ok(segment[m], start_step + m, before):
                return segment[: m + 1], True
        return segment, False

    def result(self, node_id, solved, iterations):
        if not solved:
            node_id = self.tree.closest_to(self.goal)
        states, controls = self.tree.path_to(node_id)
        if controls.size == 0:
            controls = np.zeros((0, self.model.control_dim))
        wall_time = time.perf_counter() - self.started
        result = PlanResult(
            states,
            controls,
            solved,
            iterations,
            wall_time,
            DT,
            self.index,
            tuple(self.goal),
            len(self.tree),
        )
        logger.info(
            "{0} for robot {1} after {2} iterations ({3:.2f} s)".format(
                "Solved" if solved else "No plan", self.index, iterations, wall_time
            )
        )
        return result
