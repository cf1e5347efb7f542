"""Useful decorators for facilitating logging"""
import functools
import time

import numpy as np


def _short_repr(value):
    """Summarizes arrays by shape and dtype so debug logs stay readable"""
    if isinstance(value, np.ndarray):
        return f"<ndarray shape={value.shape} dtype={value.dtype}>"
    if isinstance(value, (list, tuple)) and len(value) > 8:
        return f"<{type(value).__name__} len={len(value)}>"
    return repr(value)


def log_call(log):
    """Decorates a function and debug logs a call with arguments representations"""
    def internal_log_call(func):
        @functools.wraps(func)
        def wrapper_log_call(*args, **kwargs):
            args_repr = [_short_repr(x) for x in args]
            kwargs_repr = [f"{k}={_short_repr(v)}" for k, v in kwargs.items()]
            signature = ", ".join(args_repr + kwargs_repr)
            log.debug(f"Calling {func.__name__}({signature})")
            return func(*args, **kwargs)
        return wrapper_log_call
    return internal_log_call


def log_duration(log, label=None):
    """Decorates a function and info logs the wall time it took"""
    def internal_log_duration(func):
        @functools.wraps(func)
        def wrapper_log_duration(*args, **kwargs):
            started = time.perf_counter()
            try:
                return func(*args, **kwargs)
            finally:
                elapsed = time.perf_counter() - started
                log.info(f"{label or func.__name__} finished in {elapsed:.2f}s")
        return wrapper_log_duration
    return internal_log_duration
