"""Gradient-based local methods on forward-difference gradients.

One step is one gradient evaluation followed by one Armijo backtracking line
search.  A line search that cannot find sufficient decrease ends the run: at
that point the finite-difference noise floor has been reached.
"""
from __future__ import annotations

import numpy as np

from .base import Optimizer, fd_gradient


class _LineSearchMethod(Optimizer):
    DEFAULTS = {"gtol": 1e-8, "c1": 1e-4, "h": 1e-8, "max_backtracks": 50}

    def _start(self, instance, x0):
        self.x = x0.copy()
        self.fx = self._f(instance, self.x)
        self.g_prev = None

    def _gradient(self, instance):
        return fd_gradient(instance, self.x, self.opts["h"], fx=self.fx,
                           evaluate=lambda v: self._f(instance, v))

    def _armijo(self, instance, d, slope):
        alpha = 1.0
        for _ in range(self.opts["max_backtracks"]):
            xn = self.x + alpha * d
            fn = self._f(instance, xn)
            # strict decrease too: near the noise floor the Armijo bound rounds to fx
            if fn < self.fx and fn <= self.fx + self.opts["c1"] * alpha * slope:
                return xn, fn
            alpha *= 0.5
        return None


class BFGS(_LineSearchMethod):
    def _start(self, instance, x0):
        super()._start(instance, x0)
        self.H = np.eye(self.dim)
        self.s = None

    def _iterate(self, instance):
        g = self._gradient(instance)
        if self.s is not None:
            y = g - self.g_prev
            sy = self.s @ y
            if sy > 1e-10 * np.linalg.norm(self.s) * np.linalg.norm(y):
                rho = 1.0 / sy
                A = np.eye(self.dim) - rho * np.outer(self.s, y)
                self.H = A @ self.H @ A.T + rho * np.outer(self.s, self.s)
        self.g_prev = g
        if np.max(np.abs(g)) < self.opts["gtol"]:
            return True
        d = -self.H @ g
        slope = g @ d
        if not slope < 0:
            self.H = np.eye(self.dim)
            d = -g
            slope = g @ d
        found = self._armijo(instance, d, slope)
        if found is None:
            return True
        xn, fn = found
        self.s = xn - self.x
        self.x, self.fx = xn, fn
        return False


class CG(_LineSearchMethod):
    """Nonlinear conjugate gradient with the Fletcher-Reeves update."""

    def _start(self, instance, x0):
        super()._start(instance, x0)
        self.d = None
        self.since_restart = 0

    def _iterate(self, instance):
        g = self._gradient(instance)
        if np.max(np.abs(g)) < self.opts["gtol"]:
            return True
        restart = self.d is None or self.since_restart >= self.dim
        if not restart:
            with np.errstate(all="ignore"):
                beta = (g @ g) / (self.g_prev @ self.g_prev)
            d = -g + beta * self.d
            restart = not (np.isfinite(beta) and g @ d < 0)
        if restart:
            d = -g
            self.since_restart = 0
        self.since_restart += 1
        slope = g @ d
        self.g_prev, self.d = g, d
        found = self._armijo(instance, d, slope)
        if found is None:
            return True
        self.x, self.fx = found
        return False
