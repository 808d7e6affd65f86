"""
Reader and writer for JSON scenario files.

Schema::

    {name, bounds: {min: [x, y], max: [x, y]},
     obstacles: [{center: [x, y], half: [hx, hy]}],
     d_min, epsilon, horizon_T,
     robots: [{model, s_i, start: [x, y, theta, v, omega], goal: [x, y], r_goal}]}
"""

import json
import math

from stlcbot import logger
from stlcbot.base.errors import BenchError, ModelError, SchemaError
from stlcbot.model.scenario import RobotSpec, Scenario
from stlcbot.model.world import Box, Environment


class FieldReader(object):
    """
    Typed access to fields of a decoded JSON document, reporting errors
    with the dotted path of the field.
    """

    def __init__(self, data, path=""):
        if not isinstance(data, dict):
            raise SchemaError(path or "<root>", "expected an object")
        self.data = data
        self.path = path

    def where(self, key):
        return "{0}.{1}".format(self.path, key) if self.path else key

    def has(self, key):
        return key in self.data

    def raw(self, key, default=None, required=True):
        if key not in self.data:
            if required:
                raise SchemaError(self.where(key), "missing required field")
            return default
        return self.data[key]

    def number(self, key, default=None, required=True):
        value = self.raw(key, default, required)
        return as_number(value, self.where(key))

    def integer(self, key, default=None, required=True):
        value = self.raw(key, default, required)
        if isinstance(value, bool) or not isinstance(value, int):
            raise SchemaError(self.where(key), "expected an integer, got {0!r}", value)
        return value

    def boolean(self, key, default=None, required=True):
        value = self.raw(key, default, required)
        if not isinstance(value, bool):
            raise SchemaError(self.where(key), "expected true or false, got {0!r}", value)
        return value

    def string(self, key, default=None, required=True):
        value = self.raw(key, default, required)
        if not isinstance(value, str):
            raise SchemaError(self.where(key), "expected a string, got {0!r}", value)
        return value

    def vector(self, key, sizes, default=None, required=True):
        value = self.raw(key, default, required)
        path = self.where(key)
        if not isinstance(value, list) or len(value) not in sizes:
            raise SchemaError(path, "expected a list of {0} numbers", " or ".join(map(str, sizes)))
        return [as_number(v, "{0}[{1}]".format(path, k)) for k, v in enumerate(value)]

    def items(self, key, required=True):
        value = self.raw(key, [], required)
        if not isinstance(value, list):
            raise SchemaError(self.where(key), "expected a list")
        return [
            (item, "{0}[{1}]".format(self.where(key), k)) for k, item in enumerate(value)
        ]

    def child(self, key, required=True):
        return FieldReader(self.raw(key, {}, required), self.where(key))

    def reject_unknown(self, known):
        for key in self.data:
            if key not in known:
                raise SchemaError(self.where(key), "unknown field")


def as_number(value, path):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(path, "expected a number, got {0!r}", value)
    if not math.isfinite(value):
        raise SchemaError(path, "expected a finite number, got {0!r}", value)
    return float(value)


def _model_error(path, error):
    raise SchemaError(path, "{0}", error.message)


def scenario_from_dict(data):
    """
    Builds a scenario from a decoded JSON document.

    :raises SchemaError: naming the first offending field.
    """

    reader = FieldReader(data)
    reader.reject_unknown(
        ("name", "bounds", "obstacles", "d_min", "epsilon", "horizon_T", "robots")
    )

    bounds_reader = reader.child("bounds")
    low = bounds_reader.vector("min", (2,))
    high = bounds_reader.vector("max", (2,))
    try:
        bounds = Box.from_corners(low, high)
    except ModelError as e:
        _model_error("bounds", e)

    obstacles = []
    for item, path in reader.items("obstacles", required=False):
        r = FieldReader(item, path)
        r.reject_unknown(("center", "half"))
        try:
            obstacles.append(Box(r.vector("center", (2,)), r.vector("half", (2,))))
        except ModelError as e:
            if isinstance(e, SchemaError):
                raise
            _model_error(path, e)

    name = reader.string("name", "", required=False)
    try:
        env = Environment(bounds, obstacles, reader.number("d_min", 0.1, required=False), name)
    except ModelError as e:
        if isinstance(e, SchemaError):
            raise
        _model_error("obstacles", e)

    robots = []
    for item, path in reader.items("robots"):
        r = FieldReader(item, path)
        r.reject_unknown(("model", "s_i", "start", "goal", "r_goal"))
        try:
            robots.append(
                RobotSpec(
                    r.string("model", "SecondOrderUnicycle", required=False),
                    r.number("s_i"),
                    r.vector("start", (2, 3, 4, 5)),
                    r.vector("goal", (2,)),
                    r.number("r_goal", 0.3, required=False),
                )
            )
        except ModelError as e:
            if isinstance(e, SchemaError):
                raise
            _model_error(path, e)
    if not robots:
        raise SchemaError("robots", "at least one robot is required")

    try:
        return Scenario(
            env,
            robots,
            reader.number("horizon_T", 50.0, required=False),
            reader.number("epsilon", 0.05, required=False),
            name,
        )
    except ModelError as e:
        if isinstance(e, SchemaError):
            raise
        _model_error("<root>", e)


def scenario_to_dict(scenario):
    return scenario.todict()


def read_json(path):
    try:
        with open(path) as f:
            return json.load(f)
    except (IOError, OSError) as e:
        raise BenchError("Cannot read {0}: {1}", path, e)
    except ValueError as e:
        raise SchemaError("<root>", "{0} is not valid JSON: {1}", path, e)


def load_scenario(path, validate=True):
    """
    Reads a scenario file.

    :param validate: Also check start and goal clearance.
    :type validate: bool
    """

    scenario = scenario_from_dict(read_json(path))
    if validate:
        scenario.validate()
    logger.debug("Loaded scenario {0} with {1} robots".format(scenario.name, scenario.n_robots))
    return scenario


def save_scenario(scenario, path):
    try:
        with open(path, "w") as f:
            json.dump(scenario_to_dict(scenario), f, indent=2)
            f.write("\n")
    except (IOError, OSError) as e:
        raise BenchError("Cannot write {0}: {1}", path, e)
