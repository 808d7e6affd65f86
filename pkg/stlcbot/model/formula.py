"""
STL and MA-STL formulas over a closed predicate vocabulary.

Every predicate computes a margin per sample; the atom holds where the
margin is strictly positive and its robustness is the margin itself.
Distances use the max-norm.
"""

import math

from stlcbot.base.base import STLcBOTBase
from stlcbot.base.errors import FormulaError
from stlcbot.base.util import box_signed_distance, max_norm


def _num(value):
    return repr(float(value))


def _finite(name, *values):
    for v in values:
        if not math.isfinite(v):
            raise FormulaError("{0} needs finite parameters, got {1}", name, values)


def _robot_id(value):
    if int(value) != value or value < 0:
        raise FormulaError("Robot index must be a nonnegative integer, got {0}", value)
    return int(value)


class Predicate(STLcBOTBase):
    """
    Base class for atomic predicates.
    """

    kind = None

    def robots(self):
        """
        Robot indices the predicate reads.

        :rtype: frozenset(int)
        """

        return frozenset([self.robot])

    def margin(self, signal):
        """
        Margin at every sample of a signal.

        :rtype: numpy.ndarray
        """

        raise NotImplementedError()

    def key(self):
        raise NotImplementedError()

    def __eq__(self, other):
        return type(self) is type(other) and self.key() == other.key()

    def __hash__(self):
        return hash((self.kind, self.key()))

    def __repr__(self):
        return self.__str__()


class DistToPointAbove(Predicate):
    """
    ``dist(rid, px, py) > c``: the robot stays farther than c from a point.
    """

    kind = "DistToPointAbove"

    def __init__(self, robot, px, py, threshold):
        _finite(self.kind, px, py, threshold)
        self.robot = _robot_id(robot)
        self.point = (float(px), float(py))
        self.threshold = float(threshold)

    def margin(self, signal):
        return max_norm(signal.position(self.robot) - self.point) - self.threshold

    def key(self):
        return (self.robot, self.point, self.threshold)

    def __str__(self):
        return "dist({0}, {1}, {2}) > {3}".format(
            self.robot, _num(self.point[0]), _num(self.point[1]), _num(self.threshold)
        )


class DistToBoxAbove(Predicate):
    """
    ``distbox(rid, cx, cy, hx, hy) > c``: the robot stays farther than c from an
    axis-aligned box. The distance is signed so that robustness stays
    informative inside the box.
    """

    kind = "DistToBoxAbove"

    def __init__(self, robot, cx, cy, hx, hy, threshold):
        _finite(self.kind, cx, cy, hx, hy, threshold)
        if not (hx > 0 and hy > 0):
            raise FormulaError(
                "Box half-extents must be strictly positive, got ({0}, {1})", hx, hy
            )
        self.robot = _robot_id(robot)
        self.center = (float(cx), float(cy))
        self.half = (float(hx), float(hy))
        self.threshold = float(threshold)

    def margin(self, signal):
        return (
            box_signed_distance(signal.position(self.robot), self.center, self.half)
            - self.threshold
        )

    def key(self):
        return (self.robot, self.center, self.half, self.threshold)

    def __str__(self):
        return "distbox({0}, {1}, {2}, {3}, {4}) > {5}".format(
            self.robot,
            _num(self.center[0]),
            _num(self.center[1]),
            _num(self.half[0]),
            _num(self.half[1]),
            _num(self.threshold),
        )


class PairwiseDistAbove(Predicate):
    """
    ``pairdist(i, j) > c``: two robots keep a max-norm separation above c.
    """

    kind = "PairwiseDistAbove"

    def __init__(self, i, j, threshold):
        _finite(self.kind, threshold)
        self.i = _robot_id(i)
        self.j = _robot_id(j)
        if self.i == self.j:
            raise FormulaError("Pairwise distance needs two distinct robots, got {0}", i)
        self.threshold = float(threshold)

    def robots(self):
        return frozenset([self.i, self.j])

    def margin(self, signal):
        return (
            max_norm(signal.position(self.i) - signal.position(self.j))
            - self.threshold
        )

    def key(self):
        return (self.i, self.j, self.threshold)

    def __str__(self):
        return "pairdist({0}, {1}) > {2}".format(self.i, self.j, _num(self.threshold))


class HalfSpace(Predicate):
    """
    ``half(rid, nx, ny) > c``: the robot position p satisfies n . p > c.
    """

    kind = "HalfSpace"

    def __init__(self, robot, nx, ny, offset):
        _finite(self.kind, nx, ny, offset)
        if nx == 0 and ny == 0:
            raise FormulaError("Half-space normal must be nonzero")
        self.robot = _robot_id(robot)
        self.normal = (float(nx), float(ny))
        self.offset = float(offset)

    def margin(self, signal):
        p = signal.position(self.robot)
        return self.normal[0] * p[:, 0] + self.normal[1] * p[:, 1] - self.offset

    def key(self):
        return (self.robot, self.normal, self.offset)

    def __str__(self):
        return "half({0}, {1}, {2}) > {3}".format(
            self.robot, _num(self.normal[0]), _num(self.normal[1]), _num(self.offset)
        )


class WithinGoalRadius(Predicate):
    """
    ``goal(rid) < r``: the robot is within r of its goal. Without an explicit
    goal (``goal(rid, gx, gy) < r``) the goal is read from the signal.
    """

    kind = "WithinGoalRadius"

    def __init__(self, robot, radius, goal=None):
        _finite(self.kind, radius)
        if radius < 0:
            raise FormulaError("Goal radius must be nonnegative, got {0}", radius)
        self.robot = _robot_id(robot)
        self.radius = float(radius)
        self.goal = None
        if goal is not None:
            _finite(self.kind, *goal)
            self.goal = (float(goal[0]), float(goal[1]))

    def margin(self, signal):
        goal = self.goal if self.goal is not None else signal.goal(self.robot)
        return self.radius - max_norm(signal.position(self.robot) - goal)

    def key(self):
        return (self.robot, self.radius, self.goal)

    def __str__(self):
        if self.goal is None:
            return "goal({0}) < {1}".format(self.robot, _num(self.radius))
        return "goal({0}, {1}, {2}) < {3}".format(
            self.robot, _num(self.goal[0]), _num(self.goal[1]), _num(self.radius)
        )


PREDICATE_KINDS = {
    p.kind: p
    for p in (
        DistToPointAbove,
        DistToBoxAbove,
        PairwiseDistAbove,
        HalfSpace,
        WithinGoalRadius,
    )
}


class Formula(STLcBOTBase):
    """
    Base class for formula nodes. Nodes are immutable and compare
    structurally.
    """

    def children(self):
        return ()

    def key(self):
        return tuple(c.key() for c in self.children())

    def __eq__(self, other):
        return type(self) is type(other) and self.key() == other.key()

    def __ne__(self, other):
        return not self.__eq__(other)

    def __hash__(self):
        return hash((type(self).__name__, self.key()))

    def __repr__(self):
        return self.__str__()

    def robots(self):
        """
        Robot indices read by the formula's predicates.
        """

        out = frozenset()
        for c in self.children():
            out = out | c.robots()
        return out

    def horizon(self):
        """
        Length of signal (seconds) needed past the evaluation time.
        """

        return max([c.horizon() for c in self.children()] + [0.0])

    def atoms(self):
        out = []
        for c in self.children():
            out.extend(c.atoms())
        return out

    def has_agent_atoms(self):
        return any(c.has_agent_atoms() for c in self.children())


def _operand(f):
    if isinstance(f, Atom):
        return "(" + str(f) + ")"
    return str(f)


def _check_interval(a, b):
    if not (math.isfinite(a) and math.isfinite(b)):
        raise FormulaError("Temporal intervals must be bounded, got [{0}, {1}]", a, b)
    if a < 0 or a > b:
        raise FormulaError("Malformed interval [{0}, {1}]", a, b)
    return float(a), float(b)


class TrueFormula(Formula):
    def key(self):
        return ()

    def __str__(self):
        return "true"


class Atom(Formula):
    def __init__(self, predicate):
        if not isinstance(predicate, Predicate):
            raise FormulaError("Atom needs a predicate, got {0!r}", predicate)
        self.predicate = predicate

    def key(self):
        return (self.predicate.kind, self.predicate.key())

    def robots(self):
        return self.predicate.robots()

    def atoms(self):
        return [self]

    def __str__(self):
        return str(self.predicate)


class Not(Formula):
    def __init__(self, child):
        self.child = child

    def children(self):
        return (self.child,)

    def __str__(self):
        return "!" + _operand(self.child)


class And(Formula):
    def __init__(self, left, right):
        self.left = left
        self.right = right

    def children(self):
        return (self.left, self.right)

    def __str__(self):
        return "({0} & {1})".format(self.left, self.right)


class Or(Formula):
    def __init__(self, left, right):
        self.left = left
        self.right = right

    def children(self):
        return (self.left, self.right)

    def __str__(self):
        return "({0} | {1})".format(self.left, self.right)


class TemporalFormula(Formula):
    """
    Base class for the bounded temporal operators.
    """

    symbol = None

    def __init__(self, a, b, child):
        self.a, self.b = _check_interval(a, b)
        self.child = child

    def children(self):
        return (self.child,)

    def key(self):
        return (self.a, self.b, self.child.key())

    def horizon(self):
        return self.b + self.child.horizon()

    def __str__(self):
        return "{0}[{1}, {2}]{3}".format(
            self.symbol, _num(self.a), _num(self.b), _operand(self.child)
        )


class Eventually(TemporalFormula):
    symbol = "F"


class Always(TemporalFormula):
    symbol = "G"


class Until(Formula):
    def __init__(self, a, b, left, right):
        self.a, self.b = _check_interval(a, b)
        self.left = left
        self.right = right

    def children(self):
        return (self.left, self.right)

    def key(self):
        return (self.a, self.b, self.left.key(), self.right.key())

    def horizon(self):
        return self.b + max(self.left.horizon(), self.right.horizon())

    def __str__(self):
        return "({0} U[{1}, {2}] {3})".format(
            self.left, _num(self.a), _num(self.b), self.right
        )


class AgentAtom(Formula):
    """
    ``agent(i): f``: robot i's own trajectory satisfies f from time 0.
    """

    def __init__(self, robot, child):
        self.robot = _robot_id(robot)
        if child.has_agent_atoms():
            raise FormulaError("Agent atoms cannot be nested (robot {0})", robot)
        for atom in child.atoms():
            if isinstance(atom.predicate, PairwiseDistAbove):
                raise FormulaError(
                    "Agent formula for robot {0} reads another robot: {1}", robot, atom
                )
        stray = child.robots() - frozenset([self.robot])
        if stray:
            raise FormulaError(
                "Agent formula for robot {0} reads robots {1}", robot, sorted(stray)
            )
        self.child = child

    def children(self):
        return (self.child,)

    def key(self):
        return (self.robot, self.child.key())

    def robots(self):
        return frozenset([self.robot])

    def has_agent_atoms(self):
        return True

    def __str__(self):
        return "agent({0}): {1}".format(self.robot, _operand(self.child))


def conjunction(formulas):
    """
    Balanced conjunction of a list of formulas; ``true`` when empty.
    """

    formulas = list(formulas)
    if not formulas:
        return TrueFormula()
    if len(formulas) == 1:
        return formulas[0]
    mid = len(formulas) // 2
    return And(conjunction(formulas[:mid]), conjunction(formulas[mid:]))


def disjunction(formulas):
    formulas = list(formulas)
    if not formulas:
        return Not(TrueFormula())
    if len(formulas) == 1:
        return formulas[0]
    mid = len(formulas) // 2
    return Or(disjunction(formulas[:mid]), disjunction(formulas[mid:]))


def always_body(formula):
    """
    Splits an outer Always into (interval, body); other formulas give
    (None, formula).
    """

    if isinstance(formula, Always):
        return (formula.a, formula.b), formula.child
    return None, formula
