"""Define-by-run computation graph with reverse-mode gradients

Operators run eagerly when applied and are recorded in creation order, which is already a
topological order. Every node keeps its forward function so the whole graph can be re-evaluated
after a leaf value changes (used by finite-difference checks).
"""
import collections
import logging

import numpy as np

from gaitembed.errors import GraphNotEvaluated, InvalidParams, ShapeMismatch


log = logging.getLogger(__name__)


class Tensor:
    """Dense real array recorded in a Graph, with its adjoint after backward"""

    __slots__ = ('graph', 'data', 'grad', 'op', 'name', 'parents', 'cache',
                 '_forward', '_backward', '_kinks')

    def __init__(self, graph, data, op='leaf', name=None, parents=()):
        self.graph = graph
        self.data = data
        self.grad = None
        self.op = op
        self.name = name
        self.parents = tuple(parents)
        self.cache = None
        self._forward = None
        self._backward = None
        self._kinks = None

    @property
    def shape(self):
        """Shape of the forward value"""
        return self.data.shape

    @property
    def is_leaf(self):
        """True for named parameters and inputs"""
        return self.op == 'leaf'

    def __repr__(self):
        label = self.name or self.op
        return f"Tensor<{label}, shape={self.shape}, dtype={self.data.dtype}>"


class Graph:
    """Topologically ordered operator applications plus named leaf tensors"""

    def __init__(self):
        self.nodes = []
        self.parameters = collections.OrderedDict()
        self.inputs = collections.OrderedDict()
        self.loss = None
        self.evaluated = True

    def _leaf(self, registry, name, value):
        if name in self.parameters or name in self.inputs:
            raise InvalidParams(f"leaf name '{name}' already used in this graph")
        data = np.asarray(value)
        if not np.issubdtype(data.dtype, np.floating):
            data = data.astype(np.float64)
        tensor = Tensor(self, data, name=name)
        registry[name] = tensor
        self.nodes.append(tensor)
        return tensor

    def parameter(self, name, value):
        """Adds a learnable leaf tensor"""
        return self._leaf(self.parameters, name, value)

    def input(self, name, value):
        """Adds a non-learnable leaf tensor (gradients are still computed)"""
        return self._leaf(self.inputs, name, value)

    def leaf(self, name):
        """Looks up a parameter or input by name"""
        if name in self.parameters:
            return self.parameters[name]
        if name in self.inputs:
            return self.inputs[name]
        raise KeyError(name)

    def apply(self, op, parents, forward, backward, kinks=None):
        """Records an operator node and evaluates it

        forward(*parent_values) -> (value, cache); backward(grad, cache) -> one gradient (or
        None) per parent; kinks(cache) -> boolean array describing which side of each
        non-differentiable point the node is on.
        """
        for parent in parents:
            if parent.graph is not self:
                raise InvalidParams(f"operand of '{op}' belongs to another graph")
        data, cache = forward(*[parent.data for parent in parents])
        tensor = Tensor(self, data, op=op, parents=parents)
        tensor.cache = cache
        tensor._forward = forward  # pylint: disable=protected-access
        tensor._backward = backward  # pylint: disable=protected-access
        tensor._kinks = kinks  # pylint: disable=protected-access
        self.nodes.append(tensor)
        return tensor

    def set_loss(self, tensor):
        """Designates the scalar output that backward starts from"""
        if tensor.graph is not self:
            raise InvalidParams("loss tensor belongs to another graph")
        if tensor.data.size != 1:
            raise ShapeMismatch("loss", (), tensor.shape)
        self.loss = tensor
        return tensor

    def set_value(self, name, value):
        """Replaces a leaf value; forward must run again before backward"""
        leaf = self.leaf(name)
        value = np.asarray(value, dtype=leaf.data.dtype)
        if value.shape != leaf.shape:
            raise ShapeMismatch(f"leaf '{name}'", leaf.shape, value.shape)
        leaf.data = value
        self.evaluated = False

    def forward(self):
        """Re-evaluates every operator node in order; returns the loss value if one is set"""
        for node in self.nodes:
            if node.is_leaf:
                continue
            node.data, node.cache = node._forward(  # pylint: disable=protected-access
                *[parent.data for parent in node.parents])
        self.evaluated = True
        return None if self.loss is None else float(self.loss.data.reshape(()))

    def kink_state(self):
        """Side-of-kink indicators of all non-smooth nodes, in node order"""
        return [
            node._kinks(node.cache)  # pylint: disable=protected-access
            for node in self.nodes
            if node._kinks is not None  # pylint: disable=protected-access
        ]

    def __repr__(self):
        return (f"Graph<nodes={len(self.nodes)}, parameters={len(self.parameters)}, "
                f"inputs={len(self.inputs)}>")


def backward(graph):
    """Reverse-topological adjoint accumulation from the designated scalar loss

    Returns an ordered mapping of gradients for every parameter then every input.
    Parent adjoints are accumulated in operand order so results are reproducible.
    """
    if graph.loss is None:
        raise GraphNotEvaluated("no loss tensor designated")
    if not graph.evaluated or graph.loss.data is None:
        raise GraphNotEvaluated("forward values are stale; run forward() first")
    log.debug(f"Backward over {len(graph.nodes)} nodes")

    for node in graph.nodes:
        node.grad = None
    graph.loss.grad = np.ones_like(graph.loss.data)

    for node in reversed(graph.nodes):
        if node.grad is None or node.is_leaf:
            continue
        parent_grads = node._backward(node.grad, node.cache)  # pylint: disable=protected-access
        for parent, grad in zip(node.parents, parent_grads):
            if grad is None:
                continue
            if parent.grad is None:
                parent.grad = np.array(grad, dtype=parent.data.dtype)
            else:
                parent.grad = parent.grad + grad

    gradients = collections.OrderedDict()
    for name, leaf in list(graph.parameters.items()) + list(graph.inputs.items()):
        gradients[name] = leaf.grad if leaf.grad is not None else np.zeros_like(leaf.data)
    return gradients
