"""
Fixed-step fourth-order Runge-Kutta integration.
"""

import numpy as np

from stlcbot import DT
from stlcbot.base.errors import SimError
from stlcbot.base.util import grid_steps


def rk4_step(fun, x, u, h):
    """
    One RK4 step of x' = fun(x, u) with u held constant.
    """

    k1 = fun(x, u)
    k2 = fun(x + 0.5 * h * k1, u)
    k3 = fun(x + 0.5 * h * k2, u)
    k4 = fun(x + h * k3, u)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate(fun, x0, u, step, n_steps, post=None):
    """
    Integrates n_steps RK4 steps, applying ``post`` to each new state.

    :return: Array of n_steps + 1 states, starting with x0.
    """

    x = np.asarray(x0, dtype=float)
    states = [x]
    for _ in range(n_steps):
        x = rk4_step(fun, x, u, step)
        if post is not None:
            x = post(x)
        states.append(x)
    return np.array(states)


def rk4_propagate(model, x, u, step=DT, horizon=1.0):
    """
    Propagates a robot under a constant control. After each step speeds are
    clamped to the model limits and the heading is wrapped.

    x and u may carry a leading batch axis; the result then has shape
    (steps + 1, batch, state_dim) and non-finite rows are left for the caller.

    :raises SimError: if an unbatched trajectory becomes non-finite.
    """

    n_steps = grid_steps(horizon, step, "propagation horizon")
    x = model.clamp_state(np.asarray(x, dtype=float))
    u = np.asarray(u, dtype=float)
    with np.errstate(all="ignore"):
        states = integrate(model.derivative, x, u, step, n_steps, model.clamp_state)
    if states.ndim == 2 and not np.all(np.isfinite(states)):
        raise SimError("Non-finite state while propagating {0} under {1}", x, u)
    return states
