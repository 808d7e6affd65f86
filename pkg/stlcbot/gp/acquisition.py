"""
Expected improvement, probability of feasibility and constrained expected
improvement. Constraints are feasible where c(u) <= 0.
"""

import numpy as np
from scipy.special import erfc

Z_SATURATION = 8.0

SQRT2 = np.sqrt(2.0)
INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)


def _out(values):
    values = np.asarray(values, dtype=float)
    return float(values) if values.ndim == 0 else values


def normal_cdf(z):
    """
    Standard normal CDF through erfc, saturating to 0 / 1 beyond |z| > 8.
    """

    z = np.asarray(z, dtype=float)
    inside = 0.5 * erfc(-z / SQRT2)
    return _out(np.where(z > Z_SATURATION, 1.0, np.where(z < -Z_SATURATION, 0.0, inside)))


def normal_pdf(z):
    z = np.asarray(z, dtype=float)
    inside = INV_SQRT_2PI * np.exp(-0.5 * np.minimum(z * z, 2.0 * Z_SATURATION ** 2))
    return _out(np.where(np.abs(z) > Z_SATURATION, 0.0, inside))


def ei_from_moments(mean, variance, j_best):
    """
    (J_best - mu) Phi(z) + sigma phi(z) with z = (J_best - mu) / sigma;
    zero where sigma is zero.
    """

    mean = np.asarray(mean, dtype=float)
    sigma = np.sqrt(np.maximum(np.asarray(variance, dtype=float), 0.0))
    positive = sigma > 0
    safe = np.where(positive, sigma, 1.0)
    improvement = j_best - mean
    z = improvement / safe
    ei = improvement * normal_cdf(z) + safe * normal_pdf(z)
    return _out(np.where(positive, np.maximum(ei, 0.0), 0.0))


def feasibility_from_moments(means, variances):
    """
    Product over constraints of Phi(-mu_k / sigma_k); a zero-variance factor
    is 1 when mu_k <= 0 and 0 otherwise.

    :param means: Constraint means, shape (K,) or (K, n).
    :param variances: Constraint variances, same shape.
    """

    means = np.asarray(means, dtype=float)
    variances = np.maximum(np.asarray(variances, dtype=float), 0.0)
    if means.shape[0] == 0:
        return _out(np.ones(means.shape[1:]))
    sigma = np.sqrt(variances)
    positive = sigma > 0
    safe = np.where(positive, sigma, 1.0)
    factors = np.where(positive, normal_cdf(-means / safe), (means <= 0).astype(float))
    return _out(np.prod(factors, axis=0))


def expected_improvement(gp_j, u, j_best):
    mean, var = gp_j.predict(u)
    return ei_from_moments(mean, var, j_best)


def feasibility_probability(constraint_gps, u):
    if not constraint_gps:
        return 1.0
    moments = [gp.predict(u) for gp in constraint_gps]
    return feasibility_from_moments([m for m, _ in moments], [v for _, v in moments])


def cei(gp_j, constraint_gps, u, j_best):
    """
    Constrained expected improvement: EI times the feasibility probability.
    """

    return expected_improvement(gp_j, u, j_best) * feasibility_probability(
        constraint_gps, u
    )


def cei_many(gp_j, constraint_gps, points, j_best):
    """
    CEI at every row of points.
    """

    mean, var = gp_j.predict_many(points)
    ei = np.atleast_1d(ei_from_moments(mean, var, j_best))
    if not constraint_gps:
        return ei
    moments = [gp.predict_many(points) for gp in constraint_gps]
    feas = feasibility_from_moments(
        np.array([m for m, _ in moments]), np.array([v for _, v in moments])
    )
    return ei * np.atleast_1d(feas)
