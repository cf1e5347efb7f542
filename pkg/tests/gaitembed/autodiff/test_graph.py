import unittest

import numpy as np

from gaitembed.autodiff import Graph, add, backward, reduce_sum, relu
from gaitembed.errors import GraphNotEvaluated, InvalidParams, ShapeMismatch


class TestGraph(unittest.TestCase):

    def test_sum_of_relu_gradient(self):
        graph = Graph()
        x = graph.parameter('x', [-1.0, 2.0])
        graph.set_loss(reduce_sum(relu(x)))
        gradients = backward(graph)
        np.testing.assert_array_equal(gradients['x'], [0.0, 1.0])

    def test_reused_tensor_accumulates(self):
        graph = Graph()
        x = graph.parameter('x', [1.0, -3.0])
        graph.set_loss(reduce_sum(add(x, x)))
        np.testing.assert_array_equal(backward(graph)['x'], [2.0, 2.0])

    def test_gradients_ordered_parameters_then_inputs(self):
        graph = Graph()
        data = graph.input('data', [1.0])
        weight = graph.parameter('weight', [2.0])
        graph.set_loss(reduce_sum(add(data, weight)))
        assert list(backward(graph)) == ['weight', 'data']

    def test_unused_leaf_gets_zero_gradient(self):
        graph = Graph()
        x = graph.parameter('x', [1.0])
        graph.parameter('unused', np.ones((2, 2)))
        graph.set_loss(reduce_sum(x))
        np.testing.assert_array_equal(backward(graph)['unused'], np.zeros((2, 2)))

    def test_backward_without_loss(self):
        graph = Graph()
        relu(graph.parameter('x', [1.0]))
        with self.assertRaises(GraphNotEvaluated):
            backward(graph)

    def test_backward_after_set_value_needs_forward(self):
        graph = Graph()
        x = graph.parameter('x', [1.0, 2.0])
        graph.set_loss(reduce_sum(relu(x)))
        graph.set_value('x', [-1.0, 2.0])
        with self.assertRaises(GraphNotEvaluated):
            backward(graph)
        assert graph.forward() == 2.0
        np.testing.assert_array_equal(backward(graph)['x'], [0.0, 1.0])

    def test_duplicate_leaf_name(self):
        graph = Graph()
        graph.parameter('x', [1.0])
        with self.assertRaises(InvalidParams):
            graph.input('x', [1.0])

    def test_non_scalar_loss(self):
        graph = Graph()
        x = graph.parameter('x', [1.0, 2.0])
        with self.assertRaises(ShapeMismatch):
            graph.set_loss(relu(x))

    def test_operands_from_other_graph(self):
        first, second = Graph(), Graph()
        a = first.parameter('a', [1.0])
        b = second.parameter('b', [1.0])
        with self.assertRaises(InvalidParams):
            add(a, b)

    def test_integer_leaf_promoted(self):
        graph = Graph()
        assert graph.parameter('x', [1, 2]).data.dtype == np.float64
