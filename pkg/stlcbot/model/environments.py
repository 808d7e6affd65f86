"""
Benchmark environments (empty, crosshall, forest, bugtrap), default
scenarios and a coarse reachability check.
"""

import collections
import math

import numpy as np

from stlcbot import logger
from stlcbot.base.errors import ModelError
from stlcbot.base.util import max_norm
from stlcbot.model.scenario import RobotSpec, Scenario
from stlcbot.model.world import Box, Environment

FOREST_MAX_ATTEMPTS = 10000

FOREST_RESEEDS = 20


def _bounds(size):
    return Box((0.0, 0.0), (0.5 * size, 0.5 * size))


def make_empty(size=30.0, d_min=0.1):
    return Environment(_bounds(size), (), d_min, "empty")


def make_crosshall(size=30.0, corridor=3.0, d_min=0.1):
    """
    Four blocks filling the quadrants, leaving two perpendicular corridors
    of width ``corridor`` that cross at the origin.
    """

    if not 0 < corridor < size:
        raise ModelError("Corridor width {0} does not fit a {1} m workspace", corridor, size)
    half = 0.25 * (size - corridor)
    offset = 0.5 * corridor + half
    blocks = [
        Box((sx * offset, sy * offset), (half, half)) for sx in (1, -1) for sy in (1, -1)
    ]
    return Environment(_bounds(size), blocks, d_min, "crosshall")


def make_bugtrap(size=30.0, trap=10.0, opening=2.0, wall=0.5, d_min=0.1):
    """
    C-shaped enclosure centered at the origin: back wall at -x, top and
    bottom walls, and two lips at +x leaving an opening of width ``opening``.
    """

    h = 0.5 * trap
    if not (0 < opening < trap - 2 * wall and trap < size):
        raise ModelError("Bugtrap opening {0} does not fit a {1} m trap", opening, trap)
    lip = h - wall - 0.5 * opening
    walls = [
        Box.from_corners((-h, -h), (-h + wall, h)),
        Box.from_corners((-h, h - wall), (h, h)),
        Box.from_corners((-h, -h), (h, -h + wall)),
        Box.from_corners((h - wall, 0.5 * opening), (h, 0.5 * opening + lip)),
        Box.from_corners((h - wall, -0.5 * opening - lip), (h, -0.5 * opening)),
    ]
    return Environment(_bounds(size), walls, d_min, "bugtrap")


def make_forest(
    seed=0, size=30.0, intensity=40.0, obstacle=1.0, keepout=(), keepout_radius=1.0, d_min=0.1
):
    """
    Poisson number of square obstacles with uniform centers, rejecting any
    obstacle that comes within ``keepout_radius`` of a keep-out point.

    :raises ModelError: when rejection sampling needs more than 10^4 draws.
    """

    rng = np.random.default_rng(seed)
    count = int(rng.poisson(intensity))
    half = 0.5 * obstacle
    bounds = _bounds(size)
    keepout = np.array(keepout, dtype=float).reshape(-1, 2)
    obstacles = []
    attempts = 0
    while len(obstacles) < count:
        attempts += 1
        if attempts > FOREST_MAX_ATTEMPTS:
            raise ModelError(
                "Placed {0} of {1} forest obstacles in {2} attempts",
                len(obstacles),
                count,
                FOREST_MAX_ATTEMPTS,
            )
        center = rng.uniform(bounds.low + half, bounds.high - half)
        if len(keepout):
            gap = np.max(np.abs(keepout - center) - half, axis=1)
            if np.min(gap) < keepout_radius:
                continue
        obstacles.append(Box(center, (half, half)))
    return Environment(bounds, obstacles, d_min, "forest")


def make_environment(kind, seed=0, **size_params):
    """
    Builds a benchmark environment.

    :param kind: One of empty, crosshall, forest, bugtrap.
    :type kind: str
    """

    if kind == "empty":
        return make_empty(**size_params)
    if kind == "crosshall":
        return make_crosshall(**size_params)
    if kind == "forest":
        return make_forest(seed, **size_params)
    if kind == "bugtrap":
        return make_bugtrap(**size_params)
    raise ModelError("Unknown environment kind '{0}'", kind)


def _heading(start, goal):
    return math.atan2(goal[1] - start[1], goal[0] - start[0])


def _ring(n, radius):
    out = []
    for k in range(n):
        a = 2.0 * math.pi * k / n
        start = (radius * math.cos(a), radius * math.sin(a))
        out.append((start, (-start[0], -start[1])))
    return out


def _crosshall_slots(n, size, corridor, spacing):
    lanes = [-0.3 * corridor, 0.0, 0.3 * corridor]
    arms = [(1, 0), (0, 1), (-1, 0), (0, -1)]
    reach = 0.5 * size - 1.0
    out = []
    for k in range(n):
        ax, ay = arms[k % 4]
        slot = k // 4
        lane = lanes[slot % len(lanes)]
        along = reach - spacing * (slot // len(lanes))
        start = (ax * along - ay * lane, ay * along + ax * lane)
        out.append((start, (-start[0], -start[1])))
    return out


def _random_points(rng, count, low, high, separation, taken):
    points = []
    attempts = 0
    while len(points) < count:
        attempts += 1
        if attempts > FOREST_MAX_ATTEMPTS:
            raise ModelError("Cannot place {0} separated points", count)
        p = rng.uniform(low, high)
        others = taken + points
        if others and np.min(max_norm(np.array(others) - p)) < separation:
            continue
        points.append(p)
    return points


def _grid_slots(n, x0, y0, step, columns, dx):
    return [
        (x0 + dx * step * (k // columns), y0 + step * (k % columns)) for k in range(n)
    ]


def make_scenario(
    kind,
    n_robots,
    seed=0,
    model="SecondOrderUnicycle",
    s_i=0.2,
    r_goal=0.3,
    epsilon=0.05,
    horizon_T=50.0,
    **size_params
):
    """
    Default scenario for a benchmark environment: a ring with antipodal
    goals (empty), arm ends with point-reflected goals (crosshall), seeded
    random starts and goals (forest), or starts inside the trap with goals
    behind it (bugtrap).
    """

    if n_robots < 1:
        raise ModelError("Need at least one robot, got {0}", n_robots)
    size = size_params.get("size", 30.0)

    if kind == "empty":
        env = make_environment(kind, seed, **size_params)
        pairs = _ring(n_robots, 0.4 * size)
    elif kind == "crosshall":
        env = make_environment(kind, seed, **size_params)
        pairs = _crosshall_slots(
            n_robots, size, size_params.get("corridor", 3.0), 1.0
        )
    elif kind == "forest":
        rng = np.random.default_rng(seed)
        margin = 1.5
        low = np.full(2, -0.5 * size + margin)
        high = -low
        starts = _random_points(rng, n_robots, low, high, 1.0, [])
        goals = _random_points(rng, n_robots, low, high, 1.0, [])
        keepout = [tuple(p) for p in starts + goals]
        for _ in range(FOREST_RESEEDS):
            env = make_forest(int(rng.integers(2 ** 31)), keepout=keepout, **size_params)
            if all(grid_path_exists(env, a, b, s_i + epsilon) for a, b in zip(starts, goals)):
                break
        else:
            raise ModelError(
                "No forest with a free path for every robot in {0} draws", FOREST_RESEEDS
            )
        pairs = [(tuple(a), tuple(b)) for a, b in zip(starts, goals)]
    elif kind == "bugtrap":
        env = make_environment(kind, seed, **size_params)
        trap = size_params.get("trap", 10.0)
        columns = max(1, int(trap - 3.0))
        starts = _grid_slots(n_robots, -0.5 * trap + 2.0, -0.5 * columns + 0.5, 1.0, columns, 1)
        goals = _grid_slots(n_robots, -0.5 * trap - 4.0, -columns + 0.5, 1.0, 2 * columns, -1)
        pairs = list(zip(starts, goals))
    else:
        raise ModelError("Unknown environment kind '{0}'", kind)

    robots = [
        RobotSpec(model, s_i, (s[0], s[1], _heading(s, g), 0.0, 0.0), g, r_goal)
        for s, g in pairs
    ]
    scenario = Scenario(env, robots, horizon_T, epsilon, "{0}-{1}".format(kind, n_robots))
    scenario.validate()
    logger.debug("Built scenario {0} (seed {1})".format(scenario.name, seed))
    return scenario


def grid_path_exists(env, start, goal, clearance, resolution=0.25):
    """
    Breadth-first search over a 4-connected occupancy grid whose free cells
    keep ``clearance`` from obstacles and bounds.

    :rtype: bool
    """

    low, high = env.bounds.low, env.bounds.high
    nx = int(math.floor((high[0] - low[0]) / resolution))
    ny = int(math.floor((high[1] - low[1]) / resolution))
    xs = low[0] + resolution * (np.arange(nx) + 0.5)
    ys = low[1] + resolution * (np.arange(ny) + 0.5)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    cells = np.stack([gx.ravel(), gy.ravel()], axis=1)

    free = (
        (cells[:, 0] - low[0] >= clearance)
        & (high[0] - cells[:, 0] >= clearance)
        & (cells[:, 1] - low[1] >= clearance)
        & (high[1] - cells[:, 1] >= clearance)
    )
    if env.obstacles:
        free &= np.min(env.obstacle_distances(cells), axis=1) >= clearance
    free = free.reshape(nx, ny)

    def cell_of(p):
        i = int(np.clip(np.floor((p[0] - low[0]) / resolution), 0, nx - 1))
        j = int(np.clip(np.floor((p[1] - low[1]) / resolution), 0, ny - 1))
        return i, j

    source, target = cell_of(start), cell_of(goal)
    if not (free[source] and free[target]):
        return False

    seen = np.zeros_like(free)
    seen[source] = True
    queue = collections.deque([source])
    while queue:
        i, j = queue.popleft()
        if (i, j) == target:
            return True
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            a, b = i + di, j + dj
            if 0 <= a < nx and 0 <= b < ny and free[a, b] and not seen[a, b]:
                seen[a, b] = True
                queue.append((a, b))
    return False
