"""
STLcBOT utility functions: grid arithmetic, max-norm geometry, seeding and
SVG validation.
"""

import math
import zlib

import numpy as np

from stlcbot.base.errors import EvaluationError, ModelError

GRID_TOLERANCE = 1e-9


def steps_outward(a, b, dt):
    """
    Converts an interval in seconds to sample offsets, widening it to the
    enclosing grid points.

    :return: (first offset, last offset)
    :rtype: (int, int)
    """

    return (
        int(math.floor(a / dt + GRID_TOLERANCE)),
        int(math.ceil(b / dt - GRID_TOLERANCE)),
    )


def steps_inward(a, b, dt):
    """
    Converts an interval in seconds to sample offsets, shrinking it to the
    grid points it contains.

    :return: (first offset, last offset); the interval is empty when first > last.
    :rtype: (int, int)
    """

    return (
        int(math.ceil(a / dt - GRID_TOLERANCE)),
        int(math.floor(b / dt + GRID_TOLERANCE)),
    )


def grid_steps(duration, dt, what="duration"):
    """
    Number of grid steps in a duration that must be a multiple of dt.
    """

    steps = int(round(duration / dt))
    if steps <= 0 or abs(steps * dt - duration) > 1e-6:
        raise ModelError(
            "{0} {1} is not a positive multiple of the {2} s grid", what, duration, dt
        )
    return steps


def grid_index(t, t0, dt, n):
    """
    Index of time t on a grid of n samples starting at t0.
    """

    raw = (t - t0) / dt
    k = int(round(raw))
    if abs(raw - k) > 1e-6:
        raise EvaluationError("time {0} is not on the {1} s sampling grid", t, dt)
    if k < 0 or k >= n:
        raise EvaluationError(
            "time {0} lies outside the sampled span [{1}, {2}]",
            t,
            t0,
            t0 + (n - 1) * dt,
        )
    return k


def hold_final(values, length):
    """
    Extends a sample array to the given length by repeating its last row.
    """

    values = np.asarray(values, dtype=float)
    if len(values) >= length:
        return values[:length]
    pad = np.repeat(values[-1:], length - len(values), axis=0)
    return np.concatenate([values, pad], axis=0)


def max_norm(delta):
    """
    Max-norm over the last axis.
    """

    return np.max(np.abs(delta), axis=-1)


def box_signed_distance(points, center, half):
    """
    Signed max-norm distance from points to an axis-aligned box; negative
    inside, zero on the boundary.

    :param points: Array of positions, shape (..., 2).
    :param center: Box center.
    :param half: Box half-extents.
    """

    return np.max(np.abs(np.asarray(points, dtype=float) - center) - half, axis=-1)


def path_length(positions):
    positions = np.asarray(positions, dtype=float)
    if len(positions) < 2:
        return 0.0
    return float(np.sum(np.linalg.norm(np.diff(positions, axis=0), axis=1)))


def derive_seed(*parts):
    """
    Deterministic 32-bit seed from a base seed and any labels.
    """

    entropy = []
    for part in parts:
        if isinstance(part, str):
            entropy.append(zlib.crc32(part.encode("utf-8")))
        else:
            entropy.append(int(part) & 0xFFFFFFFF)
    return int(np.random.SeedSequence(entropy).generate_state(1)[0])


def validate_svg(file_name):
    """
    Parses an SVG file and checks its root element.

    :return: The parsed document.
    :rtype: lxml.etree._ElementTree
    """

    from lxml import etree

    document = etree.parse(file_name)
    root = document.getroot()
    if root.tag != "{http://www.w3.org/2000/svg}svg":
        raise ModelError("{0} is not an SVG document (root {1})", file_name, root.tag)
    return document
