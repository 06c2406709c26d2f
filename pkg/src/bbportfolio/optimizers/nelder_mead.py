"""Nelder-Mead downhill simplex, one simplex update per step."""
from __future__ import annotations

import numpy as np

from .base import Optimizer


class NelderMead(Optimizer):
    DEFAULTS = {
        "reflection": 1.0,
        "expansion": 2.0,
        "contraction": 0.5,
        "shrink": 0.5,
        "initial_delta": 0.05,
        "zero_delta": 0.00025,
        "xatol": 1e-11,
        "fatol": 1e-11,
    }

    def _start(self, instance, x0):
        k = self.dim
        sim = np.empty((k + 1, k))
        sim[0] = x0
        for i in range(k):
            y = x0.copy()
            y[i] = (1 + self.opts["initial_delta"]) * y[i] if y[i] != 0 else self.opts["zero_delta"]
            sim[i + 1] = y
        fsim = np.array([self._f(instance, v) for v in sim])
        order = np.argsort(fsim, kind="stable")
        self.sim, self.fsim = sim[order], fsim[order]

    def _iterate(self, instance):
        rho, chi = self.opts["reflection"], self.opts["expansion"]
        psi, sigma = self.opts["contraction"], self.opts["shrink"]
        sim, fsim = self.sim, self.fsim
        xbar = sim[:-1].mean(axis=0)
        worst = sim[-1]
        xr = (1 + rho) * xbar - rho * worst
        fxr = self._f(instance, xr)
        shrink = False
        if fxr < fsim[0]:
            xe = (1 + rho * chi) * xbar - rho * chi * worst
            fxe = self._f(instance, xe)
            if fxe < fxr:
                sim[-1], fsim[-1] = xe, fxe
            else:
                sim[-1], fsim[-1] = xr, fxr
        elif fxr < fsim[-2]:
            sim[-1], fsim[-1] = xr, fxr
        elif fxr < fsim[-1]:
            xc = (1 + psi * rho) * xbar - psi * rho * worst
            fxc = self._f(instance, xc)
            if fxc <= fxr:
                sim[-1], fsim[-1] = xc, fxc
            else:
                shrink = True
        else:
            xcc = (1 - psi) * xbar + psi * worst
            fxcc = self._f(instance, xcc)
            if fxcc < fsim[-1]:
                sim[-1], fsim[-1] = xcc, fxcc
            else:
                shrink = True
        if shrink:
            for j in range(1, len(sim)):
                sim[j] = sim[0] + sigma * (sim[j] - sim[0])
                fsim[j] = self._f(instance, sim[j])
        order = np.argsort(fsim, kind="stable")
        self.sim, self.fsim = sim[order], fsim[order]
        return (np.max(np.abs(self.sim[1:] - self.sim[0])) <= self.opts["xatol"]
                and np.max(np.abs(self.fsim[1:] - self.fsim[0])) <= self.opts["fatol"])
