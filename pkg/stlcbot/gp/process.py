"""
Gaussian-process regression with an ARD squared-exponential kernel.
"""

import numpy as np
from scipy.linalg import LinAlgError, cho_solve, cholesky, solve_triangular

from stlcbot import logger
from stlcbot.base.base import STLcBOTBase
from stlcbot.base.errors import GPError, ModelError, SchemaError

NOISE_FLOOR = 1e-8

JITTER_RETRIES = 3


class KernelHyperparams(STLcBOTBase):
    """
    Hyperparameters of the ARD squared-exponential kernel.
    """

    def __init__(self, signal_variance=1.0, lengthscales=(1.0,), noise_variance=1e-4):
        """
        Constructor.

        :param signal_variance: Prior variance sigma_f^2.
        :type signal_variance: float

        :param lengthscales: One lengthscale per input dimension.
        :type lengthscales: sequence(float)

        :param noise_variance: Observation noise; raised to the 1e-8 floor.
        :type noise_variance: float
        """

        lengthscales = np.array(lengthscales, dtype=float).ravel()
        if not signal_variance > 0:
            raise ModelError("Signal variance must be positive, got {0}", signal_variance)
        if lengthscales.size == 0 or not np.all(lengthscales > 0):
            raise ModelError("Lengthscales must be positive, got {0}", lengthscales)
        if not noise_variance >= 0:
            raise ModelError("Noise variance must be nonnegative, got {0}", noise_variance)

        self.signal_variance = float(signal_variance)
        """ Prior variance.
        :type: float """

        self.lengthscales = lengthscales
        """ Per-dimension lengthscales.
        :type: numpy.ndarray """

        self.noise_variance = max(float(noise_variance), NOISE_FLOOR)
        """ Observation noise variance.
        :type: float """

    @classmethod
    def for_window(cls, dim, radius, signal_variance=1.0, noise_variance=1e-4):
        """
        Session defaults for a control window: every lengthscale is half the
        window radius.
        """

        return cls(signal_variance, np.full(dim, 0.5 * radius), noise_variance)

    @classmethod
    def from_dict(cls, d, path="hyper"):
        known = ("signal_variance", "lengthscales", "noise_variance")
        for k in d:
            if k not in known:
                raise SchemaError("{0}.{1}".format(path, k), "unknown field")
        return cls(**d)

    def scaled(self, factor):
        return KernelHyperparams(
            self.signal_variance, self.lengthscales * factor, self.noise_variance
        )

    def todict(self):
        return {
            "signal_variance": self.signal_variance,
            "lengthscales": self.lengthscales.tolist(),
            "noise_variance": self.noise_variance,
        }

    def __repr__(self):
        return "KernelHyperparams({0}, {1}, {2})".format(
            self.signal_variance, self.lengthscales.tolist(), self.noise_variance
        )


def kernel(u, v, h):
    """
    sigma_f^2 exp(-1/2 sum_d ((u_d - v_d) / l_d)^2)
    """

    u = np.asarray(u, dtype=float).ravel()
    v = np.asarray(v, dtype=float).ravel()
    if u.shape != h.lengthscales.shape or v.shape != h.lengthscales.shape:
        raise ModelError(
            "Kernel inputs of size {0} and {1} for {2} lengthscales",
            u.size,
            v.size,
            h.lengthscales.size,
        )
    r = (u - v) / h.lengthscales
    return float(h.signal_variance * np.exp(-0.5 * np.dot(r, r)))


def gram(a, b, h):
    """
    Kernel matrix between the rows of a and b.
    """

    a = np.atleast_2d(np.asarray(a, dtype=float)) / h.lengthscales
    b = np.atleast_2d(np.asarray(b, dtype=float)) / h.lengthscales
    sq = np.sum((a[:, None, :] - b[None, :, :]) ** 2, axis=-1)
    return h.signal_variance * np.exp(-0.5 * sq)


class Dataset(STLcBOTBase):
    """
    Observations (u, J(u), c_1(u) .. c_K(u)) gathered in one control window.
    """

    def __init__(self):
        self.controls = []
        self.costs = []
        self.constraints = []

    def __len__(self):
        return len(self.controls)

    def add(self, u, cost, constraints=()):
        u = np.asarray(u, dtype=float).ravel()
        constraints = np.asarray(constraints, dtype=float).ravel()
        if self.controls:
            if u.shape != self.controls[0].shape:
                raise ModelError(
                    "Control of size {0}, dataset holds size {1}",
                    u.size,
                    self.controls[0].size,
                )
            if constraints.shape != self.constraints[0].shape:
                raise ModelError(
                    "{0} constraint values, dataset holds {1}",
                    constraints.size,
                    self.constraints[0].size,
                )
        self.controls.append(u)
        self.costs.append(float(cost))
        self.constraints.append(constraints)

    @property
    def n_constraints(self):
        return self.constraints[0].size if self.constraints else 0

    def inputs(self):
        return np.array(self.controls)

    def cost_array(self):
        return np.array(self.costs)

    def constraint_array(self):
        return np.array(self.constraints).reshape(len(self), self.n_constraints)

    def finite(self):
        """
        Mask of records whose cost and constraints are all finite.
        """

        return np.isfinite(self.cost_array()) & np.all(
            np.isfinite(self.constraint_array()), axis=1
        )


class GaussianProcess(STLcBOTBase):
    """
    Fitted Gaussian process with zero prior mean.
    """

    def __init__(self, inputs, targets, hyper, chol, alpha, jitter=0.0):
        self.inputs = inputs
        """ Training inputs, n x m.
        :type: numpy.ndarray """

        self.targets = targets
        """ Training targets.
        :type: numpy.ndarray """

        self.hyper = hyper
        """ Kernel hyperparameters.
        :type: stlcbot.gp.process.KernelHyperparams """

        self.chol = chol
        """ Lower Cholesky factor of K + (noise + jitter) I.
        :type: numpy.ndarray """

        self.alpha = alpha
        """ (K + noise I)^-1 y.
        :type: numpy.ndarray """

        self.jitter = jitter
        """ Diagonal jitter added during factorization.
        :type: float """

    def predict(self, u):
        return predict(self, u)

    def predict_many(self, points):
        """
        Posterior mean and variance at each row of points.
        """

        ks = gram(points, self.inputs, self.hyper)
        mean = ks.dot(self.alpha)
        v = solve_triangular(self.chol, ks.T, lower=True)
        var = self.hyper.signal_variance - np.sum(v * v, axis=0)
        return mean, np.maximum(var, 0.0)


def fit(inputs, targets, h):
    """
    Factors K + noise I for the training data.

    :raises GPError: if the matrix stays indefinite after jitter escalation.
    """

    x = np.atleast_2d(np.asarray(inputs, dtype=float))
    y = np.asarray(targets, dtype=float).ravel()
    if x.shape[0] < 1 or x.shape[0] != y.size:
        raise GPError("Need matching inputs and targets, got {0} and {1}", x.shape, y.size)
    if x.shape[1] != h.lengthscales.size:
        raise GPError(
            "Inputs of dimension {0} for {1} lengthscales", x.shape[1], h.lengthscales.size
        )
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise GPError("Training data must be finite")

    k = gram(x, x, h)
    k[np.diag_indices_from(k)] += h.noise_variance

    jitter = 0.0
    for attempt in range(JITTER_RETRIES + 1):
        try:
            chol = cholesky(k + jitter * np.eye(len(y)), lower=True)
            break
        except LinAlgError:
            jitter = h.signal_variance * 1e-8 * 10.0 ** attempt
            logger.warning("Covariance not positive definite, adding jitter {0}".format(jitter))
    else:
        raise GPError("Covariance matrix of {0} points is ill-conditioned", len(y))

    alpha = cho_solve((chol, True), y)
    return GaussianProcess(x, y, h, chol, alpha, jitter)


def predict(gp, u):
    """
    Posterior mean and variance at one input.

    :rtype: (float, float)
    """

    mean, var = gp.predict_many(np.asarray(u, dtype=float).reshape(1, -1))
    return float(mean[0]), float(var[0])


def log_marginal_likelihood(gp):
    return float(
        -0.5 * np.dot(gp.targets, gp.alpha)
        - np.sum(np.log(np.diag(gp.chol)))
        - 0.5 * len(gp.targets) * np.log(2.0 * np.pi)
    )


def refine_hyperparameters(inputs, targets, h, factors=(0.25, 0.5, 1.0, 2.0, 4.0)):
    """
    Picks the lengthscale scaling with the highest log marginal likelihood.
    """

    best, best_lml = h, -np.inf
    for factor in factors:
        candidate = h.scaled(factor)
        try:
            lml = log_marginal_likelihood(fit(inputs, targets, candidate))
        except GPError:
            continue
        if lml > best_lml:
            best, best_lml = candidate, lml
    return best
