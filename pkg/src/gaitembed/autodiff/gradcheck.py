"""Central finite-difference oracle for backward()"""
import logging

import numpy as np

from gaitembed.autodiff.graph import backward
from gaitembed.errors import InvalidParams


log = logging.getLogger(__name__)


def _same_side(state, reference):
    return all(np.array_equal(a, b) for a, b in zip(state, reference))


def finite_difference_check(graph, parameter, epsilon=1e-5, coordinates=None):
    """Max over coordinates of |numeric - analytic| / max(1, |analytic|)

    Each coordinate of the named leaf is perturbed by ±epsilon. A coordinate is excluded when
    either perturbation moves any relu (or hinge) to the other side of its kink, since the
    difference quotient is meaningless there. The leaf value is restored afterwards.
    """
    if not 1e-6 <= epsilon <= 1e-4:
        raise InvalidParams(f"epsilon must be in [1e-6, 1e-4], got {epsilon}")
    leaf = graph.leaf(parameter)
    if leaf.data.dtype != np.float64:
        raise InvalidParams("finite-difference checks need double precision leaves")

    graph.forward()
    analytic = backward(graph)[parameter]
    reference = graph.kink_state()
    original = leaf.data.copy()
    if coordinates is None:
        coordinates = range(original.size)

    worst = 0.0
    excluded = 0
    try:
        for index in coordinates:
            values = []
            crossed = False
            for step in (epsilon, -epsilon):
                perturbed = original.copy()
                perturbed.flat[index] += step
                graph.set_value(parameter, perturbed)
                values.append(graph.forward())
                crossed = crossed or not _same_side(graph.kink_state(), reference)
            if crossed:
                excluded += 1
                continue
            numeric = (values[0] - values[1]) / (2.0 * epsilon)
            exact = float(analytic.flat[index])
            worst = max(worst, abs(numeric - exact) / max(1.0, abs(exact)))
    finally:
        graph.set_value(parameter, original)
        graph.forward()
    log.debug(f"Gradient check of '{parameter}': max error {worst:.3e}, {excluded} kink coordinates")
    return worst
