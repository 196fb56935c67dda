"""Catalog of smooth convex test objectives usable from instance files.

An oracle returns floating values and gradients and declares its strong
convexity modulus ``mu`` and smoothness constant ``L``.  Instance files refer
to an oracle by registry name plus a parameter dict.
"""
from __future__ import annotations

import numpy as np

from .errors import ArgumentError


class SmoothOracle:
    name = "abstract"

    def __init__(self, dim: int, params: dict | None = None):
        self.dim = int(dim)
        self.params = dict(params or {})

    mu: float = 0.0
    L: float = 1.0

    def value(self, x) -> float:
        raise NotImplementedError

    def grad(self, x) -> np.ndarray:
        raise NotImplementedError

    def describe(self) -> dict:
        return {"name": self.name, "dim": self.dim, "params": self.params, "mu": self.mu, "L": self.L}

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim}, params={self.params})"


def _vec(params, key, dim, default):
    raw = params.get(key, default)
    arr = np.full(dim, float(raw)) if np.isscalar(raw) else np.asarray(raw, dtype=float)
    if arr.shape != (dim,):
        raise ArgumentError(f"oracle parameter {key!r} must have length {dim}")
    return arr


class SumOfSquares(SmoothOracle):
    """f(x) = sum_i w_i (x_i - a_i)^2."""

    name = "sum_of_squares"

    def __init__(self, dim, params=None):
        super().__init__(dim, params)
        self.w = _vec(self.params, "weights", dim, 1.0)
        self.a = _vec(self.params, "center", dim, 0.0)
        if np.any(self.w <= 0):
            raise ArgumentError("sum_of_squares weights must be positive")
        self.mu = float(2 * self.w.min())
        self.L = float(2 * self.w.max())

    def value(self, x):
        d = np.asarray(x, dtype=float) - self.a
        return float(np.dot(self.w, d * d))

    def grad(self, x):
        return 2 * self.w * (np.asarray(x, dtype=float) - self.a)


class LogisticRidge(SmoothOracle):
    """f(x) = sum_i log(1 + exp(s_i x_i)) + (r/2) ||x||^2."""

    name = "logistic_ridge"

    def __init__(self, dim, params=None):
        super().__init__(dim, params)
        self.r = float(self.params.get("ridge", 1.0))
        self.s = _vec(self.params, "slopes", dim, 1.0)
        if self.r <= 0:
            raise ArgumentError("logistic_ridge needs a positive ridge term")
        self.mu = self.r
        self.L = float(self.r + 0.25 * np.max(self.s**2))

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return float(np.sum(np.logaddexp(0.0, self.s * x)) + 0.5 * self.r * np.dot(x, x))

    def grad(self, x):
        x = np.asarray(x, dtype=float)
        sig = 0.5 * (1.0 + np.tanh(0.5 * self.s * x))
        return self.s * sig + self.r * x


class LinearOracle(SmoothOracle):
    """f(x) = g^T x; any L > 0 is a valid smoothness constant."""

    name = "linear"

    def __init__(self, dim, params=None):
        super().__init__(dim, params)
        self.g = _vec(self.params, "coef", dim, 0.0)
        self.mu = 0.0
        self.L = float(self.params.get("L", 1.0))

    def value(self, x):
        return float(np.dot(self.g, np.asarray(x, dtype=float)))

    def grad(self, x):
        return self.g.copy()


REGISTRY = {cls.name: cls for cls in (SumOfSquares, LogisticRidge, LinearOracle)}


def make_oracle(name: str, dim: int, params: dict | None = None) -> SmoothOracle:
    try:
        cls = REGISTRY[name]
    except KeyError:
        raise ArgumentError(f"unknown oracle {name!r}; known: {sorted(REGISTRY)}") from None
    return cls(dim, params)
