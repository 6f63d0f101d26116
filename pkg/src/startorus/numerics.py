"""Shared finite-difference and reporting helpers."""

from __future__ import annotations

import numpy as np

__all__ = [
    "SingularMetricError",
    "richardson_order",
    "central_diff",
    "second_diff",
    "cross_diff",
]


class SingularMetricError(Exception):
    """Raised when a background metric degenerates at an evaluation point."""

    def __init__(self, message: str, location=None):
        super().__init__(message if location is None else f"{message} at {location}")
        self.location = location


def richardson_order(coarse: float, fine: float, factor: float = 2.0) -> float:
    """Observed convergence order from two residual sups at steps h, h/factor."""
    if coarse <= 0 or fine <= 0:
        raise ValueError("residual magnitudes must be positive")
    return float(np.log(coarse / fine) / np.log(factor))


def _shift(point, i, delta):
    p = list(point)
    p[i] = p[i] + delta
    return tuple(p)


def central_diff(fn, point, i, h):
    return (np.asarray(fn(_shift(point, i, h))) - np.asarray(fn(_shift(point, i, -h)))) / (2.0 * h)


def second_diff(fn, point, i, h):
    return (
        np.asarray(fn(_shift(point, i, h)))
        - 2.0 * np.asarray(fn(point))
        + np.asarray(fn(_shift(point, i, -h)))
    ) / (h * h)


def cross_diff(fn, point, i, j, h):
    pp = np.asarray(fn(_shift(_shift(point, i, h), j, h)))
    pm = np.asarray(fn(_shift(_shift(point, i, h), j, -h)))
    mp = np.asarray(fn(_shift(_shift(point, i, -h), j, h)))
    mm = np.asarray(fn(_shift(_shift(point, i, -h), j, -h)))
    return (pp - pm - mp + mm) / (4.0 * h * h)
