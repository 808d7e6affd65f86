"""
Trajectory drawings (SVG) and benchmark metric plots.
"""

import os

import numpy as np
from lxml import etree

from stlcbot.base.errors import BenchError
from stlcbot.sim.recording import PlanResult

SVG_NS = "http://www.w3.org/2000/svg"

COLORS = (
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#ff7f0e",
    "#9467bd",
    "#8c564b",
    "#e377c2",
    "#17becf",
    "#bcbd22",
    "#7f7f7f",
)

FOOTPRINT_SAMPLES = 5


def _sub(parent, tag, **attributes):
    attributes = {k.replace("_", "-"): str(v) for k, v in attributes.items()}
    return etree.SubElement(parent, "{%s}%s" % (SVG_NS, tag), attributes)


def _fmt(value):
    return "{0:.4f}".format(value)


def _rect(parent, center, half, **style):
    return _sub(
        parent,
        "rect",
        x=_fmt(center[0] - half[0]),
        y=_fmt(center[1] - half[1]),
        width=_fmt(2 * half[0]),
        height=_fmt(2 * half[1]),
        **style
    )


def trajectory_document(plan, env, robots=None, scale=40.0):
    """
    SVG document of an environment and a team plan. World coordinates are
    drawn with y pointing up.

    :param plan: Team plan or single-robot plan.
    :type plan: stlcbot.coord.plan.MultiRobotPlan

    :param robots: Robot entries supplying footprint sizes, starts and goals.
    :type robots: list(stlcbot.model.scenario.RobotSpec)

    :rtype: lxml.etree._Element
    """

    plans = [plan] if isinstance(plan, PlanResult) else [p for p in plan.plans if p is not None]
    low, high = env.bounds.low, env.bounds.high
    width, height = high - low

    root = etree.Element(
        "{%s}svg" % SVG_NS,
        nsmap={None: SVG_NS},
        version="1.1",
        width=_fmt(scale * width),
        height=_fmt(scale * height),
        viewBox="{0} {1} {2} {3}".format(_fmt(low[0]), _fmt(-high[1]), _fmt(width), _fmt(height)),
    )
    _sub(root, "title").text = env.name or "plan"
    world = _sub(root, "g", transform="scale(1,-1)")

    _rect(world, env.bounds.center, env.bounds.half, fill="white", stroke="black", stroke_width=0.05)
    obstacles = _sub(world, "g", id="obstacles", fill="#555555")
    for o in env.obstacles:
        _rect(obstacles, o.center, o.half)

    for p in plans:
        color = COLORS[p.robot % len(COLORS)]
        group = _sub(world, "g", id="robot-{0}".format(p.robot))
        positions = p.positions()
        _sub(
            group,
            "polyline",
            points=" ".join("{0},{1}".format(_fmt(x), _fmt(y)) for x, y in positions),
            fill="none",
            stroke=color,
            stroke_width=0.06,
        )

        spec = robots[p.robot] if robots is not None else None
        size = spec.s_i if spec is not None else 0.2
        for index in np.unique(np.linspace(0, len(positions) - 1, FOOTPRINT_SAMPLES).astype(int)):
            _rect(
                group,
                positions[index],
                (size, size),
                fill="none",
                stroke=color,
                stroke_width=0.03,
                stroke_opacity=0.6,
            )

        start = positions[0]
        _sub(group, "circle", cx=_fmt(start[0]), cy=_fmt(start[1]), r=0.12, fill=color)
        goal = spec.goal if spec is not None else p.goal
        if goal is not None:
            radius = spec.r_goal if spec is not None else 0.3
            _rect(
                group,
                goal,
                (radius, radius),
                fill=color,
                fill_opacity=0.25,
                stroke=color,
                stroke_width=0.03,
                **{"class": "goal"}
            )
    return root


def emit_trajectory_svg(plan, env, path, robots=None):
    """
    Writes the trajectory drawing of a plan.
    """

    document = etree.ElementTree(trajectory_document(plan, env, robots))
    try:
        document.write(path, xml_declaration=True, encoding="utf-8", pretty_print=True)
    except (IOError, OSError) as e:
        raise BenchError("Cannot write {0}: {1}", path, e)
    return path


def plot_metrics(rows, out_dir):
    """
    Plots success rate, runtime and path length against team size, one
    figure per environment and one curve per arm, written as SVG.

    :param rows: Summary rows from stlcbot.bench.report.emit_summary.
    :return: Paths of the written figures.
    """

    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as pylab

    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as e:
        raise BenchError("Cannot create {0}: {1}", out_dir, e)

    panels = (
        ("success_rate", None, "success rate (%)"),
        ("runtime_mean", "runtime_sd", "runtime (s), solved trials"),
        ("path_length_mean", "path_length_sd", "path length (m), solved trials"),
    )
    paths = []
    for env in sorted(set(r["env"] for r in rows)):
        fig, axes = pylab.subplots(1, 3, figsize=(12, 3.5))
        for arm in sorted(set(r["arm"] for r in rows if r["env"] == env)):
            cells = sorted(
                (r for r in rows if r["env"] == env and r["arm"] == arm),
                key=lambda r: r["n_robots"],
            )
            n = [r["n_robots"] for r in cells]
            for axis, (mean, sd, label) in zip(axes, panels):
                y = np.array([r[mean] for r in cells], dtype=float)
                if sd is None:
                    axis.plot(n, y, marker="o", label=arm)
                else:
                    yerr = [r[sd] for r in cells]
                    axis.errorbar(n, y, yerr=yerr, marker="o", capsize=3, label=arm)
                axis.set_xlabel("number of robots")
                axis.set_ylabel(label)
        axes[0].legend()
        fig.suptitle(env)
        fig.tight_layout()
        path = os.path.join(out_dir, "{0}.svg".format(env))
        fig.savefig(path, format="svg")
        pylab.close(fig)
        paths.append(path)
    return paths
