"""Adam with bias correction (β1=0.9, β2=0.999, ε=1e-8)"""
import collections

import numpy as np

from gaitembed.errors import ShapeMismatch


BETA1 = 0.9
BETA2 = 0.999
EPSILON = 1e-8


class AdamState:
    """Per-parameter first and second moments plus the step counter"""

    def __init__(self, first_moments, second_moments, step=0):
        self.first_moments = collections.OrderedDict(first_moments)
        self.second_moments = collections.OrderedDict(second_moments)
        self.step = int(step)

    @classmethod
    def zeros_like(cls, params):
        """Fresh state for a mapping of parameter arrays"""
        return cls(
            [(name, np.zeros_like(value)) for name, value in params.items()],
            [(name, np.zeros_like(value)) for name, value in params.items()],
        )

    def __repr__(self):
        return f"AdamState<step={self.step}, tensors={len(self.first_moments)}>"


def adam_step(params, grads, state, learning_rate):
    """Returns (updated params, updated state); inputs are left untouched"""
    step = state.step + 1
    correction1 = 1.0 - BETA1 ** step
    correction2 = 1.0 - BETA2 ** step
    new_params = collections.OrderedDict()
    first_moments = collections.OrderedDict()
    second_moments = collections.OrderedDict()
    for name, value in params.items():
        grad = grads[name]
        if grad.shape != value.shape:
            raise ShapeMismatch(f"gradient of '{name}'", value.shape, grad.shape)
        if state.first_moments[name].shape != value.shape:
            raise ShapeMismatch(f"moments of '{name}'", value.shape, state.first_moments[name].shape)
        grad = grad.astype(value.dtype, copy=False)
        first = BETA1 * state.first_moments[name] + (1.0 - BETA1) * grad
        second = BETA2 * state.second_moments[name] + (1.0 - BETA2) * grad * grad
        update = learning_rate * (first / correction1) / (np.sqrt(second / correction2) + EPSILON)
        new_params[name] = (value - update).astype(value.dtype, copy=False)
        first_moments[name] = first.astype(value.dtype, copy=False)
        second_moments[name] = second.astype(value.dtype, copy=False)
    return new_params, AdamState(first_moments, second_moments, step)
