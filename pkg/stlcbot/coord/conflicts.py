"""
Pairwise safety formulas, conflict detection and the constraints that
resolve conflicts.

Trajectories are position arrays on the shared grid. Shorter trajectories
are held at their final position up to the longest one.
"""

import itertools

import numpy as np

from stlcbot import DT
from stlcbot.base.base import STLcBOTBase
from stlcbot.base.errors import EvaluationError
from stlcbot.base.util import box_signed_distance, hold_final
from stlcbot.model.formula import (
    Always,
    Atom,
    DistToBoxAbove,
    PairwiseDistAbove,
    always_body,
    conjunction,
)
from stlcbot.model.signal import Signal
from stlcbot.model.world import footprints_overlap
from stlcbot.sim.monitor import StreamingMonitor, eval_boolean, eval_robustness


def pair_threshold(s_i, s_j, epsilon=0.0, d_min=0.0):
    return s_i + s_j + 2.0 * epsilon + d_min


def pair_safety_formula(i, j, d_min, s_i, s_j, epsilon, horizon):
    """
    G[0, T] pairdist(i, j) > s_i + s_j + 2 epsilon + d_min
    """

    return Always(
        0.0, horizon, Atom(PairwiseDistAbove(i, j, pair_threshold(s_i, s_j, epsilon, d_min)))
    )


class Conflict(STLcBOTBase):
    """
    Robots i < j in conflict at grid step t, optionally over the
    coalesced interval [start, end] of steps.
    """

    def __init__(self, i, j, t, start=None, end=None):
        self.i = int(i)
        self.j = int(j)
        self.t = int(t)
        self.start = self.t if start is None else int(start)
        self.end = self.t if end is None else int(end)

    def pair(self):
        return (self.i, self.j)

    def key(self):
        return (self.start, self.i, self.j, self.end)

    def __eq__(self, other):
        return isinstance(other, Conflict) and self.key() == other.key() and self.t == other.t

    def __hash__(self):
        return hash(self.key())

    def __lt__(self, other):
        return self.key() < other.key()

    def __repr__(self):
        if self.start == self.end:
            return "Conflict({0}, {1}, t={2})".format(self.i, self.j, self.t)
        return "Conflict({0}, {1}, [{2}, {3}])".format(self.i, self.j, self.start, self.end)


def _positions(trajectory):
    if hasattr(trajectory, "positions"):
        return trajectory.positions()
    return np.asarray(trajectory, dtype=float)[:, :2]


def _joint(trajectories):
    positions = {r: _positions(t) for r, t in trajectories.items()}
    length = max(len(p) for p in positions.values())
    return {r: hold_final(p, length) for r, p in positions.items()}, length


def stl_conflict_search(trajectories, formulas, dt=DT):
    """
    Runs one streaming monitor per robot pair and reports every grid step
    whose robustness is negative.

    Each monitor watches the body of the pair's outer Always formula and is
    fed joint samples [t, p_i(t), p_j(t)]; steps outside the formula's
    interval are not reported.

    :param trajectories: Position arrays (or plans) keyed by robot index.
    :type trajectories: dict(int -> numpy.ndarray)

    :param formulas: Pair safety formulas keyed by (i, j) with i < j.
    :type formulas: dict((int, int) -> stlcbot.model.formula.Formula)

    :return: Conflicts grouped by pair, sorted by time.
    :rtype: list(stlcbot.coord.conflicts.Conflict)
    """

    for r, t in trajectories.items():
        step = getattr(t, "dt", dt)
        if abs(step - dt) > 1e-12:
            raise EvaluationError("Trajectory of robot {0} uses step {1}, expected {2}", r, step, dt)

    positions, length = _joint(trajectories)
    conflicts = []
    for i, j in sorted(formulas):
        interval, body = always_body(formulas[(i, j)])
        first, last = 0, length - 1
        if interval is not None:
            first = max(first, int(round(interval[0] / dt)))
            last = min(last, int(round(interval[1] / dt)))
        monitor = StreamingMonitor(body, dt, 0.0, (i, j), time_column=True)
        for k in range(length):
            monitor.add_sample(np.concatenate([[k * dt], positions[i][k], positions[j][k]]))
        for k in range(first, last + 1):
            if monitor.covered(k) and monitor.robustness_at(k) < 0:
                conflicts.append(Conflict(i, j, k))
    return conflicts


def geometric_conflict_search(trajectories, sizes, margin=0.0):
    """
    Footprint-overlap detection: |p_i - p_j|_inf < s_i + s_j + margin at a
    grid step.

    :param sizes: Footprint half-extents keyed by robot index.
    :type sizes: dict(int -> float)
    """

    positions, length = _joint(trajectories)
    conflicts = []
    for i, j in itertools.combinations(sorted(positions), 2):
        for k in range(length):
            if footprints_overlap(positions[i][k], sizes[i], positions[j][k], sizes[j], margin):
                conflicts.append(Conflict(i, j, k))
    return conflicts


def coalesce(conflicts):
    """
    Merges consecutive conflicting steps of a pair into intervals.
    """

    by_pair = {}
    for c in conflicts:
        by_pair.setdefault(c.pair(), []).append(c)
    out = []
    for (i, j), items in sorted(by_pair.items()):
        items.sort(key=lambda c: c.start)
        start, end = items[0].start, items[0].end
        for c in items[1:]:
            if c.start <= end + 1:
                end = max(end, c.end)
            else:
                out.append(Conflict(i, j, start, start, end))
                start, end = c.start, c.end
        out.append(Conflict(i, j, start, start, end))
    return sorted(out)


def _box_atom(robot, center, threshold):
    return Atom(DistToBoxAbove(robot, center[0], center[1], threshold, threshold, 0.0))


class StlConstraint(STLcBOTBase):
    """
    Requirement that a robot keeps out of the moving box of half-extent
    ``threshold`` around another robot's positions over grid steps
    [start, end]: one Always([tau, tau], distbox > 0) atom per step. The
    formula reads the constrained robot's own positions only.
    """

    reads_history = False

    def __init__(self, robot, other_positions, threshold, start, end, source=None, dt=DT):
        other_positions = np.asarray(other_positions, dtype=float)[:, :2]
        if len(other_positions) <= end:
            other_positions = hold_final(other_positions, end + 1)

        self.robot = int(robot)
        """ Constrained robot.
        :type: int """

        self.other_positions = other_positions
        """ Positions of the box center per grid step.
        :type: numpy.ndarray """

        self.threshold = float(threshold)
        """ Box half-extent.
        :type: float """

        self.start = int(start)
        self.end = int(end)
        """ Grid steps covered by the constraint.
        :type: int """

        self.source = source
        """ Conflict the constraint resolves.
        :type: stlcbot.coord.conflicts.Conflict """

        self.dt = dt
        self._formula = None

    def _atoms(self, first, last, shift):
        return [
            Always(
                (tau - shift) * self.dt,
                (tau - shift) * self.dt,
                _box_atom(self.robot, self.other_positions[tau], self.threshold),
            )
            for tau in range(first, last + 1)
        ]

    @property
    def formula(self):
        if self._formula is None:
            self._formula = conjunction(self._atoms(self.start, self.end, 0))
        return self._formula

    def overlap(self, first_step, n_samples):
        return max(self.start, first_step), min(self.end, first_step + n_samples - 1)

    def active(self, first_step, n_samples):
        a, b = self.overlap(first_step, n_samples)
        return a <= b

    def segment_formula(self, first_step, n_samples):
        """
        The part of the formula falling on a segment, with times relative to
        the segment's first sample.
        """

        a, b = self.overlap(first_step, n_samples)
        return conjunction(self._atoms(a, b, first_step))

    def segment_margin(self, positions, first_step, prefix=None):
        """
        Robustness of the part of the formula falling on a segment whose
        first sample sits at ``first_step``; infinite when inactive. The
        atoms pin absolute steps, so earlier positions are not needed.
        """

        a, b = self.overlap(first_step, len(positions))
        if a > b:
            return np.inf
        p = np.asarray(positions, dtype=float)[a - first_step : b - first_step + 1, :2]
        half = np.full(2, self.threshold)
        return float(np.min(box_signed_distance(p, self.other_positions[a : b + 1], half)))

    def segment_holds(self, positions, first_step, prefix=None):
        """
        Monitors the part of the formula falling on a segment.
        """

        positions = np.asarray(positions, dtype=float)[:, :2]
        formula = self.segment_formula(first_step, len(positions))
        return eval_boolean(formula, Signal(positions, self.dt, 0.0, (self.robot,)))

    def parked_margin(self, position, step, prefix=None):
        """
        Robustness when the robot holds ``position`` from ``step`` on.
        """

        a = max(self.start, step)
        if a > self.end:
            return np.inf
        centers = self.other_positions[a : self.end + 1]
        half = np.full(2, self.threshold)
        return float(np.min(box_signed_distance(np.asarray(position)[:2], centers, half)))

    def robustness(self, signal):
        """
        Robustness of the formula on a signal of the constrained robot,
        held at its final sample when shorter than the constraint.
        """

        if len(signal) <= self.end:
            signal = signal.extended(self.end + 1)
        return eval_robustness(self.formula, signal)

    def __repr__(self):
        return "StlConstraint(robot {0}, steps [{1}, {2}], threshold {3})".format(
            self.robot, self.start, self.end, self.threshold
        )


def constraint_from_conflict(
    conflict, robot, other_positions, threshold, padding=0.5, dt=DT, last_step=None
):
    """
    Constraint keeping ``robot`` out of the other robot's moving box over the
    conflict interval padded by ``padding`` seconds and clipped to
    [0, last_step].
    """

    pad = int(round(padding / dt))
    other_positions = np.asarray(other_positions, dtype=float)
    if last_step is None:
        last_step = len(other_positions) - 1
    start = max(0, conflict.start - pad)
    end = min(last_step, conflict.end + pad)
    return StlConstraint(robot, other_positions, threshold, start, end, conflict, dt)


def moving_box_constraint(robot, other_positions, threshold, last_step, dt=DT):
    """
    Constraint keeping ``robot`` out of another robot's moving box over
    steps [0, last_step].
    """

    return StlConstraint(robot, other_positions, threshold, 0, last_step, None, dt)
