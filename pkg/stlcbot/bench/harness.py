"""
Benchmark harness: algorithm arms, trial records and the benchmark matrix.

Bench configuration schema (JSON)::

    {envs: [..], arms: [..], robots: [N, ..], trials, seed, seeds?: [..],
     time_budget, env_params?: {kind: {..}}, cbot?: {..}, rrt?: {..},
     kcbs?: {..}, record_wall_time?, strict?}
"""

import concurrent.futures
import math
import os

import numpy as np

from stlcbot import logger
from stlcbot.base.base import STLcBOTBase
from stlcbot.base.errors import BenchError, ModelError, SchemaError, STLcBOTError
from stlcbot.base.util import derive_seed
from stlcbot.coord.kcbs import KcbsParams, solve
from stlcbot.coord.priority import priority_plan
from stlcbot.coord.validate import validate_plan
from stlcbot.model.environments import make_scenario
from stlcbot.parser.scenario import FieldReader, read_json
from stlcbot.planner.cbot import CbotParams
from stlcbot.planner.rrt import RrtParams

ARMS = {
    "STLcBOT": ("kcbs", "cbot", True),
    "KcBOT": ("kcbs", "cbot", False),
    "KRRT": ("kcbs", "rrt", False),
    "STLRRT": ("kcbs", "rrt", True),
    "PPcBOT": ("priority", "cbot", None),
    "PPRRT": ("priority", "rrt", None),
}
""" Arm name -> (coordinator, low-level planner, STL conflict monitors). """

EXTERNAL_ARMS = ("PBS+STGCS", "SP+STGCS", "RP+STGCS", "SP+STRRT*", "MILP", "MPC", "GCBF")
""" Arms whose results come from external CSV files with the same columns. """

ENVS = ("empty", "crosshall", "forest", "bugtrap")

TRIAL_FIELDS = (
    "env",
    "arm",
    "n_robots",
    "trial",
    "seed",
    "solved",
    "wall_time",
    "total_path_length",
    "min_robustness",
    "conflicts_resolved",
    "nodes_expanded",
)


def _float(value):
    return "{0:.6f}".format(value) if math.isfinite(value) else str(value)


class TrialRecord(STLcBOTBase):
    """
    Outcome of one benchmark trial.
    """

    def __init__(
        self,
        env,
        arm,
        n_robots,
        trial,
        seed,
        solved,
        wall_time,
        total_path_length,
        min_robustness,
        conflicts_resolved=0,
        nodes_expanded=0,
    ):
        self.env = env
        self.arm = arm
        self.n_robots = int(n_robots)
        self.trial = int(trial)
        self.seed = int(seed)
        self.solved = bool(solved)
        self.wall_time = float(wall_time)
        self.total_path_length = float(total_path_length)
        self.min_robustness = float(min_robustness)
        self.conflicts_resolved = int(conflicts_resolved)
        self.nodes_expanded = int(nodes_expanded)

    def row(self):
        """
        CSV cells in TRIAL_FIELDS order.
        """

        return [
            self.env,
            self.arm,
            str(self.n_robots),
            str(self.trial),
            str(self.seed),
            "true" if self.solved else "false",
            _float(self.wall_time),
            _float(self.total_path_length),
            _float(self.min_robustness),
            str(self.conflicts_resolved),
            str(self.nodes_expanded),
        ]

    @classmethod
    def from_row(cls, row):
        """
        Record from a CSV row keyed by field name.
        """

        try:
            return cls(
                row["env"],
                row["arm"],
                int(row["n_robots"]),
                int(row["trial"]),
                int(row["seed"]),
                row["solved"].strip().lower() in ("true", "1"),
                float(row["wall_time"]),
                float(row["total_path_length"]),
                float(row["min_robustness"]),
                int(row["conflicts_resolved"]),
                int(row["nodes_expanded"]),
            )
        except (KeyError, ValueError, AttributeError) as e:
            raise BenchError("Malformed trial record {0}: {1}", row, e)

    def __eq__(self, other):
        return isinstance(other, TrialRecord) and self.row() == other.row()

    def __hash__(self):
        return hash(tuple(self.row()))

    def __repr__(self):
        return "TrialRecord({0})".format(", ".join(self.row()))


class BenchConfig(STLcBOTBase):
    """
    Benchmark matrix: environments x arms x team sizes x trials.
    """

    def __init__(
        self,
        envs,
        arms,
        robots,
        trials=10,
        seed=0,
        seeds=None,
        time_budget=60.0,
        env_params=None,
        cbot=None,
        rrt=None,
        kcbs=None,
        record_wall_time=True,
        strict=False,
    ):
        self.envs = list(envs)
        self.arms = list(arms)
        self.robots = [int(n) for n in robots]
        self.trials = int(trials)
        self.seed = int(seed)
        self.seeds = list(seeds) if seeds is not None else None
        self.time_budget = float(time_budget)
        self.env_params = dict(env_params or {})
        self.cbot = cbot or CbotParams()
        self.rrt = rrt or RrtParams()
        self.kcbs = kcbs or KcbsParams()

        self.record_wall_time = bool(record_wall_time)
        """ Write measured wall time; 0.0 otherwise, for byte-identical reruns.
        :type: bool """

        self.strict = bool(strict)
        """ Raise BenchError when a solved plan fails re-validation.
        :type: bool """

    @classmethod
    def from_dict(cls, data):
        reader = FieldReader(data)
        reader.reject_unknown(
            (
                "envs",
                "arms",
                "robots",
                "trials",
                "seed",
                "seeds",
                "time_budget",
                "env_params",
                "cbot",
                "rrt",
                "kcbs",
                "record_wall_time",
                "strict",
            )
        )

        envs = []
        for item, path in reader.items("envs"):
            if item not in ENVS:
                raise SchemaError(path, "unknown environment {0!r}", item)
            envs.append(item)

        arms = []
        for item, path in reader.items("arms"):
            if item in EXTERNAL_ARMS:
                raise SchemaError(path, "arm '{0}' runs outside this harness", item)
            if item not in ARMS:
                raise SchemaError(path, "unknown arm {0!r}", item)
            arms.append(item)

        robots = []
        for item, path in reader.items("robots"):
            if isinstance(item, bool) or not isinstance(item, int) or item < 1:
                raise SchemaError(path, "expected a positive team size, got {0!r}", item)
            robots.append(item)

        trials = reader.integer("trials", 10, required=False)
        if trials < 1:
            raise SchemaError("trials", "expected at least one trial")

        seeds = None
        if reader.has("seeds"):
            seeds = []
            for item, path in reader.items("seeds"):
                if isinstance(item, bool) or not isinstance(item, int):
                    raise SchemaError(path, "expected an integer seed, got {0!r}", item)
                seeds.append(item)
            if len(seeds) != trials:
                raise SchemaError("seeds", "expected {0} seeds, got {1}", trials, len(seeds))

        time_budget = reader.number("time_budget", 60.0, required=False)
        if not time_budget > 0:
            raise SchemaError("time_budget", "expected a positive budget")

        env_params = {}
        if reader.has("env_params"):
            params = reader.child("env_params")
            params.reject_unknown(ENVS)
            for kind in ENVS:
                if params.has(kind):
                    env_params[kind] = dict(params.child(kind).data)

        cbot = CbotParams.from_dict(reader.raw("cbot", {}, required=False), "cbot")
        rrt = RrtParams.from_dict(reader.raw("rrt", {}, required=False), "rrt")
        kcbs = KcbsParams.from_dict(reader.raw("kcbs", {}, required=False), "kcbs")

        return cls(
            envs,
            arms,
            robots,
            trials,
            reader.integer("seed", 0, required=False),
            seeds,
            time_budget,
            env_params,
            cbot,
            rrt,
            kcbs,
            reader.boolean("record_wall_time", True, required=False),
            reader.boolean("strict", False, required=False),
        )

    @classmethod
    def load(cls, path):
        return cls.from_dict(read_json(path))

    def trial_seed(self, env, n_robots, trial):
        """
        Seed of one trial, shared by every arm so trials are paired.
        """

        if self.seeds is not None:
            return int(self.seeds[trial])
        return derive_seed(self.seed, env, n_robots, trial)

    def cells(self):
        return [
            (env, arm, n, trial)
            for env in self.envs
            for n in self.robots
            for arm in self.arms
            for trial in range(self.trials)
        ]


def run_arm(scenario, arm, seed, kcbs=None, cbot=None, rrt=None, time_budget=60.0):
    """
    Plans a scenario with one algorithm arm.

    :rtype: stlcbot.coord.plan.MultiRobotPlan
    """

    if arm not in ARMS:
        raise ModelError("Unknown arm '{0}'", arm)
    coordinator, low_level, monitors = ARMS[arm]
    cbot = cbot or CbotParams()
    rrt = rrt or RrtParams()
    if coordinator == "kcbs":
        params = (kcbs or KcbsParams()).replace(
            use_stl_monitors=monitors,
            low_level=low_level,
            cbot=cbot,
            rrt=rrt,
            seed=seed,
            time_budget=time_budget,
        )
        return solve(scenario, params)
    order = np.random.default_rng(seed).permutation(scenario.n_robots).tolist()
    return priority_plan(scenario, order, low_level, cbot, rrt, seed, time_budget)


def run_trial(config, env, arm, n_robots, trial):
    """
    Runs one cell of the matrix. Failures of the trial are recorded as
    unsolved and never propagate, except failed re-validation in strict mode.

    :rtype: stlcbot.bench.harness.TrialRecord
    """

    seed = config.trial_seed(env, n_robots, trial)
    record = TrialRecord(env, arm, n_robots, trial, seed, False, 0.0, 0.0, float("nan"))
    try:
        scenario = make_scenario(env, n_robots, seed, **config.env_params.get(env, {}))
        result = run_arm(
            scenario, arm, seed, config.kcbs, config.cbot, config.rrt, config.time_budget
        )
    except STLcBOTError as e:
        logger.error("Trial {0}/{1}/N={2}/#{3} failed: {4}".format(env, arm, n_robots, trial, e))
        return record

    solved = result.solved
    margin = result.min_robustness
    if solved:
        ok, margin = validate_plan(result.plans, scenario)
        if not ok:
            if config.strict:
                raise BenchError(
                    "Solved plan of {0}/{1}/N={2}/#{3} fails validation", env, arm, n_robots, trial
                )
            logger.warning("Solved plan failed re-validation, recording as unsolved")
            solved = False

    record.solved = solved
    record.wall_time = result.wall_time if config.record_wall_time else 0.0
    record.total_path_length = result.total_cost
    record.min_robustness = margin
    record.conflicts_resolved = result.conflicts_resolved
    record.nodes_expanded = result.nodes_expanded
    logger.info(repr(record))
    return record


def _run_cell(arguments):
    config, cell = arguments
    return run_trial(config, *cell)


def run_matrix(config, out_dir, workers=1):
    """
    Runs every cell of a benchmark matrix and writes records.csv in
    ``out_dir``, flushing each record in matrix order as soon as it and
    all earlier ones are done.

    :return: The records in matrix order.
    :rtype: list(stlcbot.bench.harness.TrialRecord)
    """

    from stlcbot.bench.report import RecordWriter

    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as e:
        raise BenchError("Cannot create {0}: {1}", out_dir, e)

    cells = config.cells()
    records = []
    logger.info("Running {0} trials with {1} workers".format(len(cells), workers))
    with RecordWriter(os.path.join(out_dir, "records.csv")) as writer:
        if workers <= 1:
            for cell in cells:
                record = run_trial(config, *cell)
                writer.write(record)
                records.append(record)
        else:
            with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
                for record in pool.map(_run_cell, [(config, cell) for cell in cells]):
                    writer.write(record)
                    records.append(record)
    return records
