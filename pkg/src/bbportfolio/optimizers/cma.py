"""(mu/mu_w, lambda)-CMA-ES with rank-one and rank-mu covariance updates.

One step is one generation.  No internal restarts: when a termination
criterion fires the state reports convergence and the caller decides what
to do next.
"""
from __future__ import annotations

import math

import numpy as np

from .base import NumericalFailure, Optimizer


class CMA(Optimizer):
    LOCAL = False
    DEFAULTS = {
        "sigma0": 2.0,
        "popsize": None,
        "tolfun": 1e-12,
        "tolx": 1e-11,
        "max_condition": 1e14,
    }

    def _start(self, instance, x0):
        n = self.dim
        lam = self.opts["popsize"] or 4 + int(math.floor(3 * math.log(n)))
        mu = lam // 2
        w = math.log(lam / 2 + 0.5) - np.log(np.arange(1, mu + 1))
        w /= w.sum()
        mueff = 1.0 / (w @ w)
        self.lam, self.mu, self.weights, self.mueff = lam, mu, w, mueff
        self.cc = (4 + mueff / n) / (n + 4 + 2 * mueff / n)
        self.cs = (mueff + 2) / (n + mueff + 5)
        self.c1 = 2 / ((n + 1.3) ** 2 + mueff)
        self.cmu = min(1 - self.c1, 2 * (mueff - 2 + 1 / mueff) / ((n + 2) ** 2 + mueff))
        self.damps = 1 + 2 * max(0.0, math.sqrt((mueff - 1) / (n + 1)) - 1) + self.cs
        self.chin = math.sqrt(n) * (1 - 1 / (4 * n) + 1 / (21 * n * n))

        self.mean = x0.copy()
        self.sigma = float(self.opts["sigma0"])
        self.pc = np.zeros(n)
        self.ps = np.zeros(n)
        self.C = np.eye(n)
        self.B = np.eye(n)
        self.D = np.ones(n)
        self.generation = 0
        self.recent_best: list[float] = []
        self.history_len = 10 + int(math.ceil(30 * n / lam))

    def _iterate(self, instance):
        n = self.dim
        z = self.rng.standard_normal((self.lam, n))
        y = z @ (self.B * self.D).T
        xs = self.mean + self.sigma * y
        fs = np.array([self._f(instance, x) for x in xs])

        order = np.argsort(fs, kind="stable")
        y_sel = y[order[: self.mu]]
        y_w = self.weights @ y_sel
        self.mean = self.mean + self.sigma * y_w

        c_inv_sqrt = (self.B / self.D) @ self.B.T
        self.ps = (1 - self.cs) * self.ps + math.sqrt(self.cs * (2 - self.cs) * self.mueff) * (c_inv_sqrt @ y_w)
        self.generation += 1
        ps_norm = np.linalg.norm(self.ps)
        hsig = ps_norm / math.sqrt(1 - (1 - self.cs) ** (2 * self.generation)) < (1.4 + 2 / (n + 1)) * self.chin
        self.pc = (1 - self.cc) * self.pc + hsig * math.sqrt(self.cc * (2 - self.cc) * self.mueff) * y_w

        rank_mu = (y_sel.T * self.weights) @ y_sel
        self.C = ((1 - self.c1 - self.cmu + (1 - hsig) * self.c1 * self.cc * (2 - self.cc)) * self.C
                  + self.c1 * np.outer(self.pc, self.pc) + self.cmu * rank_mu)
        self.sigma *= math.exp((self.cs / self.damps) * (ps_norm / self.chin - 1))

        self.C = np.triu(self.C) + np.triu(self.C, 1).T
        if not (np.isfinite(self.C).all() and math.isfinite(self.sigma) and self.sigma > 0):
            raise NumericalFailure("covariance or step size degenerated")
        d2, self.B = np.linalg.eigh(self.C)
        if d2.min() <= 0:
            raise NumericalFailure("covariance lost positive definiteness")
        self.D = np.sqrt(d2)

        self.recent_best.append(fs[order[0]])
        if len(self.recent_best) > self.history_len:
            self.recent_best.pop(0)
        return self._terminated(fs)

    def _terminated(self, fs):
        if self.generation >= len(self.recent_best) and len(self.recent_best) == self.history_len:
            span = max(fs.max(), max(self.recent_best)) - min(fs.min(), min(self.recent_best))
            if span < self.opts["tolfun"]:
                return True
        if self.sigma * max(np.sqrt(np.diag(self.C)).max(), np.abs(self.pc).max()) < self.opts["tolx"]:
            return True
        return self.D.max() ** 2 > self.opts["max_condition"] * self.D.min() ** 2
