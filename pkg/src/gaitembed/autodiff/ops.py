"""Operator set of the embedder: conv2d, relu, add, global_avg_pool, linear, l2_normalize

Each operator accepts one sample or an explicit leading batch axis and states its shape rule;
there is no implicit broadcasting. reduce_sum turns any tensor into a scalar loss.
"""
import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from gaitembed.errors import ShapeMismatch


L2_EPS = 1e-12


def _batched(array, sample_ndim, what):
    """Adds a leading batch axis to single samples; returns (array, was_single)"""
    if array.ndim == sample_ndim:
        return array[np.newaxis], True
    if array.ndim == sample_ndim + 1:
        return array, False
    raise ShapeMismatch(what, f"{sample_ndim}-d sample or {sample_ndim + 1}-d batch", array.shape)


def _output_extent(size, kernel, stride, padding):
    return (size + 2 * padding - kernel) // stride + 1


def _windows(padded, kernel_h, kernel_w, stride):
    """(N, C, Hp, Wp) -> strided view (N, C, H', W', kH, kW)"""
    view = sliding_window_view(padded, (kernel_h, kernel_w), axis=(2, 3))
    return view[:, :, ::stride, ::stride]


def conv2d(x, weight, bias, stride=1, padding=0):
    """Zero-padded cross-correlation: (C_in, H, W) or (N, C_in, H, W) -> (.., C_out, H', W')"""
    kernel_h, kernel_w = _check_conv(x, weight, bias, stride, padding)

    def forward(x_value, w_value, b_value):
        batch, single = _batched(x_value, 3, 'conv2d input')
        pad = ((0, 0), (0, 0), (padding, padding), (padding, padding))
        padded = np.pad(batch, pad) if padding else batch
        columns = _windows(padded, kernel_h, kernel_w, stride)
        out = np.tensordot(columns, w_value, axes=([1, 4, 5], [1, 2, 3]))  # (N, H', W', C_out)
        out = out.transpose(0, 3, 1, 2) + b_value[np.newaxis, :, np.newaxis, np.newaxis]
        out = np.ascontiguousarray(out)
        cache = (columns, w_value, padded.shape, batch.shape, single)
        return (out[0] if single else out), cache

    def backward(grad, cache):
        columns, w_value, padded_shape, input_shape, single = cache
        grad = grad[np.newaxis] if single else grad
        out_h, out_w = grad.shape[2], grad.shape[3]
        grad_w = np.tensordot(grad, columns, axes=([0, 2, 3], [0, 2, 3]))
        grad_b = grad.sum(axis=(0, 2, 3))
        grad_columns = np.tensordot(grad, w_value, axes=([1], [0]))  # (N, H', W', C_in, kH, kW)
        grad_padded = np.zeros(padded_shape, dtype=grad.dtype)
        for i in range(kernel_h):
            rows = slice(i, i + stride * (out_h - 1) + 1, stride)
            for j in range(kernel_w):
                cols = slice(j, j + stride * (out_w - 1) + 1, stride)
                grad_padded[:, :, rows, cols] += grad_columns[:, :, :, :, i, j].transpose(0, 3, 1, 2)
        height, width = input_shape[2], input_shape[3]
        grad_x = grad_padded[:, :, padding:padding + height, padding:padding + width]
        grad_x = np.ascontiguousarray(grad_x)
        return (grad_x[0] if single else grad_x), grad_w, grad_b

    return x.graph.apply('conv2d', (x, weight, bias), forward, backward)


def _check_conv(x, weight, bias, stride, padding):
    if weight.data.ndim != 4:
        raise ShapeMismatch('conv2d weight', '(C_out, C_in, kH, kW)', weight.shape)
    c_out, c_in, kernel_h, kernel_w = weight.shape
    batch, _ = _batched(x.data, 3, 'conv2d input')
    if batch.shape[1] != c_in:
        raise ShapeMismatch('conv2d input channels', c_in, batch.shape[1])
    if kernel_h % 2 == 0 or kernel_w % 2 == 0:
        raise ShapeMismatch('conv2d kernel (odd extents)', '(odd, odd)', (kernel_h, kernel_w))
    if bias.shape != (c_out,):
        raise ShapeMismatch('conv2d bias', (c_out,), bias.shape)
    if stride < 1 or padding < 0:
        raise ShapeMismatch('conv2d stride/padding', 'stride >= 1, padding >= 0', (stride, padding))
    out_h = _output_extent(batch.shape[2], kernel_h, stride, padding)
    out_w = _output_extent(batch.shape[3], kernel_w, stride, padding)
    if out_h < 1 or out_w < 1:
        raise ShapeMismatch('conv2d output', '(>=1, >=1)', (out_h, out_w))
    return kernel_h, kernel_w


def relu(x):
    """max(0, x) elementwise; the subgradient at 0 is 0"""
    def forward(value):
        mask = value > 0
        return np.where(mask, value, np.zeros_like(value)), mask

    def backward(grad, mask):
        return (np.where(mask, grad, np.zeros_like(grad)),)

    return x.graph.apply('relu', (x,), forward, backward, kinks=lambda mask: mask)


def add(a, b):
    """Elementwise sum of two tensors of identical shape (residual connections)"""
    if a.shape != b.shape:
        raise ShapeMismatch('add', a.shape, b.shape)

    def forward(a_value, b_value):
        return a_value + b_value, None

    def backward(grad, _):
        return grad, grad

    return a.graph.apply('add', (a, b), forward, backward)


def global_avg_pool(x):
    """Per-channel mean: (C, H, W) -> (C) or (N, C, H, W) -> (N, C)"""
    _batched(x.data, 3, 'global_avg_pool input')

    def forward(value):
        return value.mean(axis=(-2, -1)), value.shape

    def backward(grad, shape):
        area = shape[-2] * shape[-1]
        spread = np.broadcast_to((grad / area)[..., np.newaxis, np.newaxis], shape)
        return (np.array(spread),)

    return x.graph.apply('global_avg_pool', (x,), forward, backward)


def linear(x, weight, bias):
    """weight · x + bias: (F) -> (D) or (N, F) -> (N, D), weight (D, F), bias (D)"""
    if weight.data.ndim != 2:
        raise ShapeMismatch('linear weight', '(D, F)', weight.shape)
    out_features, in_features = weight.shape
    batch, _ = _batched(x.data, 1, 'linear input')
    if batch.shape[1] != in_features:
        raise ShapeMismatch('linear input features', in_features, batch.shape[1])
    if bias.shape != (out_features,):
        raise ShapeMismatch('linear bias', (out_features,), bias.shape)

    def forward(x_value, w_value, b_value):
        return x_value @ w_value.T + b_value, (x_value, w_value)

    def backward(grad, cache):
        x_value, w_value = cache
        if x_value.ndim == 1:
            return grad @ w_value, np.outer(grad, x_value), grad
        return grad @ w_value, grad.T @ x_value, grad.sum(axis=0)

    return x.graph.apply('linear', (x, weight, bias), forward, backward)


def l2_normalize(x):
    """x / max(||x||, 1e-12) along the last axis: (D) or (N, D)"""
    _batched(x.data, 1, 'l2_normalize input')

    def forward(value):
        norm = np.sqrt(np.sum(value * value, axis=-1, keepdims=True))
        denominator = np.maximum(norm, L2_EPS)
        out = value / denominator
        return out, (out, denominator)

    def backward(grad, cache):
        out, denominator = cache
        # Jacobian (I - x̂x̂ᵀ) / max(||x||, eps)
        radial = np.sum(out * grad, axis=-1, keepdims=True)
        return ((grad - out * radial) / denominator,)

    return x.graph.apply('l2_normalize', (x,), forward, backward)


def reduce_sum(x, weights=None):
    """Scalar Σ w·x (w = 1 when omitted), used to close non-scalar graphs into a loss"""
    if weights is not None:
        weights = np.asarray(weights, dtype=x.data.dtype)
        if weights.shape != x.shape:
            raise ShapeMismatch('reduce_sum weights', x.shape, weights.shape)

    def forward(value):
        if weights is None:
            return np.asarray(value.sum()), value.shape
        return np.asarray(np.sum(value * weights)), value.shape

    def backward(grad, shape):
        if weights is None:
            return (np.full(shape, grad, dtype=grad.dtype),)
        return (grad * weights,)

    return x.graph.apply('reduce_sum', (x,), forward, backward)
