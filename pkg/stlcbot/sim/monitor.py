"""
Boolean and robustness semantics of formulas on sampled signals, team-level
MA-STL evaluation and the streaming monitor.

Evaluation computes a trace per subformula: one value per sample, NaN where
the subformula is undefined because its window starts past the last sample.
Windows running past the end are clipped to the available samples. Always
windows are widened to the enclosing grid points, Eventually and Until
windows shrunk to the grid points they contain.
"""

import numpy as np

from stlcbot import DT
from stlcbot.base.base import STLcBOTBase
from stlcbot.base.errors import EvaluationError, HorizonError
from stlcbot.base.util import steps_inward, steps_outward
from stlcbot.model.formula import (
    AgentAtom,
    Always,
    And,
    Atom,
    Eventually,
    Not,
    Or,
    TrueFormula,
    Until,
)
from stlcbot.model.signal import Signal, team_signal


def _shift(trace, offset):
    """
    trace[k + offset] at every k, NaN past the end.
    """

    out = np.full(len(trace), np.nan)
    if offset < len(trace):
        out[: len(trace) - offset] = trace[offset:]
    return out


def window_offsets(formula, dt):
    if isinstance(formula, Always):
        return steps_outward(formula.a, formula.b, dt)
    la, lb = steps_inward(formula.a, formula.b, dt)
    if la > lb:
        raise EvaluationError(
            "Empty effective interval [{0}, {1}] on the {2} s grid",
            formula.a,
            formula.b,
            dt,
        )
    return la, lb


def horizon_steps(formula, dt=DT):
    """
    Number of samples past the evaluation step a formula reads.
    """

    if isinstance(formula, (Always, Eventually)):
        return window_offsets(formula, dt)[1] + horizon_steps(formula.child, dt)
    if isinstance(formula, Until):
        return window_offsets(formula, dt)[1] + max(
            horizon_steps(formula.left, dt), horizon_steps(formula.right, dt)
        )
    return max([horizon_steps(c, dt) for c in formula.children()] + [0])


class Evaluator(STLcBOTBase):
    """
    Computes traces of a formula over one signal.
    """

    def __init__(self, signal, boolean=False, agents=None, known=None):
        """
        Constructor.

        :param signal: Signal the formula is evaluated on.
        :type signal: stlcbot.model.signal.Signal

        :param boolean: Compute 1/0 truth values instead of robustness.
        :type boolean: bool

        :param agents: Per-robot signals used by agent atoms.
        :type agents: dict(int -> stlcbot.model.signal.Signal)

        :param known: Number of leading samples that are observed. Atoms
        past them take their most favourable value, so traces bound the
        robustness of every continuation from above.
        :type known: int
        """

        self.signal = signal
        self.boolean = boolean
        self.agents = agents
        self.known = known

    def value(self, formula, t):
        k = self.signal.index_of(t)
        v = self.trace(formula)[k]
        if np.isnan(v):
            raise EvaluationError(
                "No sample falls in a window of {0} evaluated at t={1}", formula, t
            )
        return v

    def trace(self, f, upper=True):
        """
        One value per sample. With ``known`` set, ``upper`` selects the
        upper or the lower bound over the unobserved samples.
        """

        n = len(self.signal)

        if isinstance(f, TrueFormula):
            return np.ones(n) if self.boolean else np.full(n, np.inf)

        if isinstance(f, Atom):
            margin = np.array(f.predicate.margin(self.signal), dtype=float)
            if self.known is not None:
                margin[self.known :] = np.inf if upper else -np.inf
            return (margin > 0).astype(float) if self.boolean else margin

        if isinstance(f, Not):
            inner = self.trace(f.child, not upper)
            return 1.0 - inner if self.boolean else -inner

        if isinstance(f, And):
            return np.minimum(self.trace(f.left, upper), self.trace(f.right, upper))

        if isinstance(f, Or):
            return np.maximum(self.trace(f.left, upper), self.trace(f.right, upper))

        if isinstance(f, (Always, Eventually)):
            la, lb = window_offsets(f, self.signal.dt)
            inner = self.trace(f.child, upper)
            reduce = np.fmin if isinstance(f, Always) else np.fmax
            acc = _shift(inner, la)
            for offset in range(la + 1, lb + 1):
                acc = reduce(acc, _shift(inner, offset))
            return acc

        if isinstance(f, Until):
            la, lb = window_offsets(f, self.signal.dt)
            left = self.trace(f.left, upper)
            right = self.trace(f.right, upper)
            acc = np.full(n, np.nan)
            running = left.copy()
            for offset in range(0, lb + 1):
                if offset > 0:
                    running = np.minimum(running, _shift(left, offset))
                if offset >= la:
                    acc = np.fmax(acc, np.minimum(running, _shift(right, offset)))
            return acc

        if isinstance(f, AgentAtom):
            agent = self.agent_signal(f.robot)
            v = Evaluator(agent, self.boolean).value(f.child, agent.t0)
            return np.full(n, v)

        raise EvaluationError("Unsupported formula node {0!r}", f)

    def agent_signal(self, robot):
        if self.agents is None:
            return self.signal
        if robot not in self.agents:
            raise EvaluationError("No trajectory for robot {0}", robot)
        return self.agents[robot]


def eval_boolean(f, s, t=0.0):
    """
    Boolean semantics of a formula on a signal at time t.

    :rtype: bool
    """

    return bool(Evaluator(s, boolean=True).value(f, t) > 0.5)


def eval_robustness(f, s, t=0.0):
    """
    Space robustness of a formula on a signal at time t.

    :rtype: float
    """

    return float(Evaluator(s).value(f, t))


def prefix_robustness(f, s):
    """
    Upper bound on the robustness at the first sample of ``s`` over every
    continuation of the signal. Negative only when the observed samples
    already violate the formula.

    :rtype: float
    """

    known = len(s)
    padded = s.extended(known + horizon_steps(f, s.dt) + 1)
    return float(Evaluator(padded, known=known).value(f, s.t0))


def _agents(trajectories):
    agents = {}
    for robot, s in trajectories.items():
        if len(s.robots) == 1 and s.robots[0] != robot:
            s = s.relabel(robot)
        agents[robot] = s
    return agents


def _ma_value(f, trajectories, boolean):
    agents = _agents(trajectories)
    for robot in f.robots():
        if robot not in agents:
            raise EvaluationError("No trajectory for robot {0}", robot)
    team = team_signal(agents)
    return Evaluator(team, boolean, agents).value(f, team.t0)


def eval_ma_stl(f, trajectories):
    """
    Team-level MA-STL semantics: agent atoms dispatch to the robot's own
    trajectory at time 0; other subformulas are evaluated on the stacked
    team signal at time 0.

    :param trajectories: Per-robot signals keyed by robot index.
    :type trajectories: dict(int -> stlcbot.model.signal.Signal)

    :rtype: bool
    """

    return bool(_ma_value(f, trajectories, True) > 0.5)


def ma_robustness(f, trajectories):
    """
    Quantitative counterpart of eval_ma_stl.
    """

    return float(_ma_value(f, trajectories, False))


class StreamingMonitor(STLcBOTBase):
    """
    Monitor fed one sample at a time.

    Samples may carry a leading time column, which is checked against the
    grid and dropped.
    """

    def __init__(
        self, formula, dt=DT, t0=0.0, robots=(0,), goals=None, time_column=False
    ):
        self.formula = formula
        self.dt = dt
        self.t0 = t0
        self.robots = tuple(robots)
        self.goals = goals
        self.time_column = time_column

        self.horizon = horizon_steps(formula, dt)
        """ Samples past a timestep needed to evaluate it.
        :type: int """

        self.samples = []

        self.values = []
        """ Robustness of the timesteps covered at the last query.
        :type: list(float) """

    def __len__(self):
        return len(self.samples)

    def add_sample(self, x):
        x = np.array(x, dtype=float).ravel()
        if self.time_column:
            expected = self.t0 + len(self.samples) * self.dt
            if abs(x[0] - expected) > 1e-6:
                raise EvaluationError(
                    "Sample time {0} does not follow the grid (expected {1})",
                    x[0],
                    expected,
                )
            x = x[1:]
        if self.samples and len(x) != len(self.samples[0]):
            raise EvaluationError(
                "Sample has {0} values, monitor expects {1}", len(x), len(self.samples[0])
            )
        self.samples.append(x)

    def covered(self, timestep):
        return 0 <= timestep and timestep + self.horizon <= len(self.samples) - 1

    def robustness_at(self, timestep):
        """
        Robustness at a timestep whose window is covered by the samples
        appended so far.
        """

        if not self.covered(timestep):
            raise HorizonError(
                "Timestep {0} needs {1} samples, {2} appended",
                timestep,
                timestep + self.horizon + 1,
                len(self.samples),
            )
        if timestep >= len(self.values):
            self.advance()
        return self.values[timestep]

    def advance(self):
        """
        Evaluates the timesteps covered since the last query. A covered
        timestep reads samples up to ``horizon`` ahead only, so the
        evaluation runs over the new suffix of the stream. Agent atoms read
        their robot's stream from its start and keep the whole stream.
        """

        first = len(self.values)
        last = len(self.samples) - 1 - self.horizon
        if last < first:
            return
        start = 0 if self.formula.has_agent_atoms() else first
        signal = Signal(
            np.array(self.samples[start:]),
            self.dt,
            self.t0 + start * self.dt,
            self.robots,
            self.goals,
        )
        trace = Evaluator(signal).trace(self.formula)
        self.values.extend(float(v) for v in trace[first - start : last - start + 1])


def streaming_monitor(formula, **options):
    return StreamingMonitor(formula, **options)
