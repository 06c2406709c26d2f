"""Powell's conjugate direction method; one full sweep of the direction set per step."""
from __future__ import annotations

import math

import numpy as np

from .base import Optimizer

GOLD = 1.618034
CGOLD = 0.3819660
MAX_EXPAND = 60
MAX_BRENT = 100


def bracket(f, fa: float, b: float = 1.0):
    """Grow a bracket ``a < b < c`` (or reversed) around a minimum of ``f``, with ``a = 0``.

    Returns ``(a, b, c, fb)``; gives up after ``MAX_EXPAND`` expansions and
    returns whatever interval it holds.
    """
    a = 0.0
    fb = f(b)
    if fb > fa:
        a, b, fa, fb = b, a, fb, fa
    c = b + GOLD * (b - a)
    fc = f(c)
    n = 0
    while fc < fb and n < MAX_EXPAND:
        a, b, fa, fb = b, c, fb, fc
        c = b + GOLD * (b - a)
        fc = f(c)
        n += 1
    return a, b, c, fb


def brent(f, a: float, b: float, c: float, fb: float, tol: float, zeps: float = 1e-11):
    """Brent's parabolic/golden-section minimization inside a bracket. Returns (x, fx)."""
    lo, hi = min(a, c), max(a, c)
    x = w = v = b
    fx = fw = fv = fb
    d = e = 0.0
    for _ in range(MAX_BRENT):
        xm = 0.5 * (lo + hi)
        tol1 = tol * abs(x) + zeps
        tol2 = 2.0 * tol1
        if abs(x - xm) <= tol2 - 0.5 * (hi - lo):
            break
        use_golden = True
        if abs(e) > tol1:
            r = (x - w) * (fx - fv)
            q = (x - v) * (fx - fw)
            p = (x - v) * q - (x - w) * r
            q = 2.0 * (q - r)
            if q > 0.0:
                p = -p
            q = abs(q)
            etemp = e
            e = d
            if abs(p) < abs(0.5 * q * etemp) and q * (lo - x) < p < q * (hi - x):
                d = p / q
                u = x + d
                if u - lo < tol2 or hi - u < tol2:
                    d = math.copysign(tol1, xm - x)
                use_golden = False
        if use_golden:
            e = (lo - x) if x >= xm else (hi - x)
            d = CGOLD * e
        u = x + d if abs(d) >= tol1 else x + math.copysign(tol1, d)
        fu = f(u)
        if fu <= fx:
            if u >= x:
                lo = x
            else:
                hi = x
            v, w, x = w, x, u
            fv, fw, fx = fw, fx, fu
        else:
            if u < x:
                lo = u
            else:
                hi = u
            if fu <= fw or w == x:
                v, w, fv, fw = w, u, fw, fu
            elif fu <= fv or v == x or v == w:
                v, fv = u, fu
    return x, fx


class Powell(Optimizer):
    DEFAULTS = {"xtol": 1e-11, "ftol": 1e-11}

    def _start(self, instance, x0):
        self.x = x0.copy()
        self.fx = self._f(instance, self.x)
        self.directions = np.eye(self.dim)

    def _line_min(self, instance, x, fx, d):
        def along(t):
            return self._f(instance, x + t * d)

        a, b, c, fb = bracket(along, fx)
        t, ft = brent(along, a, b, c, fb, self.opts["xtol"])
        if ft < fx:
            return x + t * d, ft
        return x, fx

    def _iterate(self, instance):
        x, fx = self.x, self.fx
        x_start, f_start = x.copy(), fx
        biggest, big_drop = 0, 0.0
        for i, d in enumerate(self.directions):
            f_before = fx
            x, fx = self._line_min(instance, x, fx, d)
            if f_before - fx > big_drop:
                biggest, big_drop = i, f_before - fx
        self.x, self.fx = x, fx
        if 2.0 * (f_start - fx) <= self.opts["ftol"] * (abs(f_start) + abs(fx)) + 1e-20:
            return True
        shift = x - x_start
        if not np.any(shift):
            return True
        f_ext = self._f(instance, x + shift)
        if f_ext < f_start:
            t = 2.0 * (f_start - 2.0 * fx + f_ext) * (f_start - fx - big_drop) ** 2 \
                - big_drop * (f_start - f_ext) ** 2
            if t < 0.0:
                self.x, self.fx = self._line_min(instance, x, fx, shift)
                self.directions[biggest] = self.directions[-1]
                self.directions[-1] = shift
        return False
