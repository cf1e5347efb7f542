"""Minimal reverse-mode automatic differentiation over dense numpy arrays"""
from gaitembed.autodiff.graph import Graph, Tensor, backward
from gaitembed.autodiff.gradcheck import finite_difference_check
from gaitembed.autodiff.ops import (
    add,
    conv2d,
    global_avg_pool,
    l2_normalize,
    linear,
    reduce_sum,
    relu,
)
