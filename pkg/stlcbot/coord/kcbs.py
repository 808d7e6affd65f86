"""
Kinodynamic conflict-based search with STL safety monitors.

The high level keeps a best-first tree of constraint sets. Each node holds
one plan per robot; the earliest conflict of a node yields two children
that constrain one robot of the pair each. A robot pair that keeps
conflicting is merged into a unit planned by internal prioritization and
the search restarts from a fresh root.
"""

import heapq
import time

from stlcbot import DT, logger
from stlcbot.base.base import STLcBOTBase
from stlcbot.base.errors import ModelError, SchemaError
from stlcbot.coord.conflicts import (
    coalesce,
    constraint_from_conflict,
    geometric_conflict_search,
    moving_box_constraint,
    pair_safety_formula,
    pair_threshold,
    stl_conflict_search,
)
from stlcbot.coord.plan import LOW_LEVEL, MultiRobotPlan, low_level_seed, plan_robot
from stlcbot.coord.validate import validate_plan
from stlcbot.planner.cbot import CbotParams
from stlcbot.planner.rrt import RrtParams


class KcbsParams(STLcBOTBase):
    """
    Parameters of the conflict-based search.
    """

    def __init__(
        self,
        merge_bound=25,
        max_nodes=1000,
        time_budget=60.0,
        padding=0.5,
        use_stl_monitors=True,
        low_level="cbot",
        cbot=None,
        rrt=None,
        seed=0,
    ):
        """
        Constructor.

        :param merge_bound: Conflicts of a unit pair tolerated before the
        pair is merged (25 to 60 in benchmarks).
        :type merge_bound: int

        :param max_nodes: Budget of expanded constraint-tree nodes.
        :type max_nodes: int

        :param time_budget: Wall-clock budget (s).
        :type time_budget: float

        :param padding: Time added on both sides of a conflict interval (s).
        :type padding: float

        :param use_stl_monitors: Detect conflicts with pairwise STL monitors;
        footprint intersection otherwise.
        :type use_stl_monitors: bool

        :param low_level: Single-robot planner, cbot or rrt.
        :type low_level: str

        :param seed: Base seed of the low-level planners.
        :type seed: int
        """

        if merge_bound < 1:
            raise ModelError("Merge bound must be at least 1, got {0}", merge_bound)
        if max_nodes < 1:
            raise ModelError("Node budget must be at least 1, got {0}", max_nodes)
        if not time_budget > 0:
            raise ModelError("Time budget must be positive, got {0}", time_budget)
        if not padding >= 0:
            raise ModelError("Padding must be nonnegative, got {0}", padding)
        if low_level not in LOW_LEVEL:
            raise ModelError("Unknown low-level planner '{0}'", low_level)

        self.merge_bound = int(merge_bound)
        self.max_nodes = int(max_nodes)
        self.time_budget = float(time_budget)
        self.padding = float(padding)
        self.use_stl_monitors = bool(use_stl_monitors)
        self.low_level = low_level
        self.cbot = cbot or CbotParams()
        self.rrt = rrt or RrtParams()
        self.seed = int(seed)

    @classmethod
    def from_dict(cls, d, path="kcbs"):
        d = dict(d)
        known = (
            "merge_bound",
            "max_nodes",
            "time_budget",
            "padding",
            "use_stl_monitors",
            "low_level",
            "cbot",
            "rrt",
            "seed",
        )
        for k in d:
            if k not in known:
                raise SchemaError("{0}.{1}".format(path, k), "unknown field")
        if "cbot" in d:
            d["cbot"] = CbotParams.from_dict(d["cbot"], path + ".cbot")
        if "rrt" in d:
            d["rrt"] = RrtParams.from_dict(d["rrt"], path + ".rrt")
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


class ConflictTreeNode(STLcBOTBase):
    """
    Node of the constraint tree, ordered by cost and then creation order.
    """

    def __init__(self, id, constraints, plans, parent=None, depth=0):
        self.id = id

        self.constraints = constraints
        """ Constraints per robot.
        :type: dict(int -> tuple) """

        self.plans = plans
        """ Plans indexed by robot.
        :type: list(stlcbot.sim.recording.PlanResult) """

        self.parent = parent
        self.depth = depth

        self.cost = float(sum(p.path_length for p in plans))
        """ Sum of path lengths (m).
        :type: float """

    def __lt__(self, other):
        return (self.cost, self.id) < (other.cost, other.id)

    def __repr__(self):
        return "ConflictTreeNode({0}, cost {1:.3f}, depth {2})".format(
            self.id, self.cost, self.depth
        )


class ConflictBasedSearch(STLcBOTBase):
    """
    One run of the constraint-tree search on a scenario.
    """

    def __init__(self, scenario, params=None):
        self.scenario = scenario
        self.params = params or KcbsParams()
        self.units = [(i,) for i in range(scenario.n_robots)]
        self.counts = {}
        self.max_count = 0
        self.calls = 0
        self.merges = 0
        self.expanded = 0
        self.resolved = 0
        self.nodes = 0
        self.last_step = int(scenario.horizon_T / DT + 1e-9)
        self.started = time.perf_counter()
        self.deadline = self.started + self.params.time_budget

    def threshold(self, i, j):
        r = self.scenario.robots
        return pair_threshold(
            r[i].s_i, r[j].s_i, self.scenario.epsilon, self.scenario.environment.d_min
        )

    def unit_of(self, robot):
        for unit in self.units:
            if robot in unit:
                return unit
        raise ModelError("Robot {0} belongs to no unit", robot)

    def expired(self):
        return time.perf_counter() > self.deadline

    def plan_unit(self, unit, constraints):
        """
        Plans the robots of a unit in index order; each robot also avoids
        the moving boxes of the unit members planned before it.

        :return: (plans keyed by robot, failing robot or None)
        """

        plans = {}
        for k, robot in enumerate(unit):
            extra = list(constraints.get(robot, ()))
            for other in unit[:k]:
                threshold = self.threshold(robot, other)
                extra.append(
                    moving_box_constraint(
                        robot, plans[other].positions(), threshold, self.last_step
                    )
                )
            result = plan_robot(
                self.scenario,
                robot,
                extra,
                self.params.low_level,
                self.params.cbot,
                self.params.rrt,
                low_level_seed(self.params.seed, robot, self.calls),
                self.deadline,
            )
            self.calls += 1
            plans[robot] = result
            if not result.solved:
                return plans, robot
        return plans, None

    def new_node(self, constraints, plans, parent=None):
        node = ConflictTreeNode(
            self.nodes,
            constraints,
            plans,
            parent.id if parent else None,
            parent.depth + 1 if parent else 0,
        )
        self.nodes += 1
        return node

    def root(self):
        plans = [None] * self.scenario.n_robots
        for unit in self.units:
            unit_plans, failed = self.plan_unit(unit, {})
            for robot, p in unit_plans.items():
                plans[robot] = p
            if failed is not None:
                return plans, failed
        return self.new_node({}, plans), None

    def detect(self, plans):
        """
        Coalesced conflicts of a node's plans, earliest first.
        """

        trajectories = {i: p for i, p in enumerate(plans)}
        if self.params.use_stl_monitors:
            horizon = (max(len(p) for p in plans) - 1) * DT
            env = self.scenario.environment
            formulas = {}
            for i in range(len(plans)):
                for j in range(i + 1, len(plans)):
                    a, b = self.scenario.robots[i], self.scenario.robots[j]
                    formulas[(i, j)] = pair_safety_formula(
                        i, j, env.d_min, a.s_i, b.s_i, self.scenario.epsilon, horizon
                    )
            raw = stl_conflict_search(trajectories, formulas, DT)
        else:
            sizes = {i: r.s_i for i, r in enumerate(self.scenario.robots)}
            raw = geometric_conflict_search(trajectories, sizes, self.scenario.pair_margin())
        return coalesce(raw)

    def branch(self, node, conflict, robot, other):
        length = max(len(p) for p in node.plans)
        constraint = constraint_from_conflict(
            conflict,
            robot,
            node.plans[other].positions(length),
            self.threshold(robot, other),
            self.params.padding,
            DT,
            length - 1,
        )
        constraints = dict(node.constraints)
        constraints[robot] = constraints.get(robot, ()) + (constraint,)
        unit_plans, failed = self.plan_unit(self.unit_of(robot), constraints)
        if failed is not None:
            logger.debug("Replanning robot {0} under {1} failed".format(robot, constraint))
            return None
        plans = list(node.plans)
        for r, p in unit_plans.items():
            plans[r] = p
        return self.new_node(constraints, plans, node)

    def merge(self, a, b):
        merged = tuple(sorted(a + b))
        self.units = [u for u in self.units if u not in (a, b)] + [merged]
        self.units.sort()
        self.counts = {}
        self.merges += 1
        logger.info("Merging units {0} and {1}, restarting the search".format(a, b))

    def finish(self, plans, solved, open_size=0, failed=None):
        margin = float("nan")
        if all(p is not None for p in plans):
            satisfied, margin = validate_plan(plans, self.scenario)
            if solved and not satisfied:
                logger.warning("Conflict-free plan failed certification")
                solved = False
        result = MultiRobotPlan(
            plans,
            solved,
            self.merges,
            self.expanded,
            self.resolved,
            open_size,
            self.max_count,
            failed,
            time.perf_counter() - self.started,
            margin,
        )
        logger.info(str(result))
        return result

    def solve(self):
        while True:
            root, failed = self.root()
            if failed is not None:
                return self.finish(root, False, 0, failed)

            open_list = [root]
            best = root
            restart = False
            while open_list:
                if self.expanded >= self.params.max_nodes or self.expired():
                    return self.finish(best.plans, False, len(open_list))
                node = heapq.heappop(open_list)
                self.expanded += 1
                conflicts = self.detect(node.plans)
                if not conflicts:
                    return self.finish(node.plans, True, len(open_list))

                best = node
                conflict = conflicts[0]
                ui, uj = self.unit_of(conflict.i), self.unit_of(conflict.j)
                key = tuple(sorted((ui, uj)))
                self.counts[key] = self.counts.get(key, 0) + 1
                self.max_count = max(self.max_count, self.counts[key])
                logger.debug(
                    "Node {0}: {1} ({2} conflicts)".format(node.id, conflict, len(conflicts))
                )

                if ui != uj and self.counts[key] > self.params.merge_bound:
                    self.merge(ui, uj)
                    restart = True
                    break

                self.resolved += 1
                for robot, other in ((conflict.i, conflict.j), (conflict.j, conflict.i)):
                    child = self.branch(node, conflict, robot, other)
                    if child is not None:
                        heapq.heappush(open_list, child)

            if not restart:
                return self.finish(best.plans, False, 0)


def solve(scenario, params=None):
    """
    Plans a team with conflict-based search.

    :type scenario: stlcbot.model.scenario.Scenario
    :type params: stlcbot.coord.kcbs.KcbsParams
    :rtype: stlcbot.coord.plan.MultiRobotPlan
    """

    return ConflictBasedSearch(scenario, params).solve()
