"""Brute-force reference implementations used only by tests and for deriving
expected values.

Everything here is deliberately dumb: literal double loops, direct summation,
grid scans.  No code is shared with the optimized modules, so agreement tests
actually mean something.  Do not use these in production paths.
"""

from __future__ import annotations

import cmath
import math

import numpy as np


def naive_count(a: int, m: int, X, W, mode: str) -> int:
    """Literal double loop over x in X and y in [Z+1, Z+Y] testing the congruence."""
    total = 0
    for x in X:
        if mode in ("inverse", "multiple_coprime") and math.gcd(x % m, m) != 1:
            continue
        if mode == "inverse":
            xinv = pow(x % m, -1, m)
        for y in range(W.Z + 1, W.Z + W.Y + 1):
            if mode == "inverse":
                hit = (a * xinv - y) % m == 0
            else:
                hit = (a * x - y) % m == 0
            if hit:
                total += 1
                break  # each x counted at most once
    return total


def naive_kloosterman(r: int, s: int, p: int) -> complex:
    """Direct (p-1)-term sum, returned as a full complex number so callers can
    assert the imaginary part is tiny."""
    total = 0j
    for n in range(1, p):
        total += cmath.exp(2j * math.pi * ((r * n + s * pow(n, -1, p)) % p) / p)
    return total


def _simpson_density(a: float, b: float, steps: int) -> float:
    """Composite Simpson rule for (2/pi) * sin(gamma)**2 over [a, b]."""
    if steps < 2:
        steps = 2
    if steps % 2:
        steps += 1
    h = (b - a) / steps

    def f(g: float) -> float:
        return (2.0 / math.pi) * math.sin(g) ** 2

    acc = f(a) + f(b)
    for i in range(1, steps):
        acc += f(a + i * h) * (4 if i % 2 else 2)
    return acc * h / 3.0


def naive_mu(w, steps: int) -> float:
    """Numerical Sato-Tate mass of the window [w.alpha, w.beta]."""
    return _simpson_density(w.alpha, w.beta, steps)


def naive_discrepancy(p: int, table, grid: int) -> float:
    """Max over a dense beta-grid of |empirical CDF - Sato-Tate CDF|.

    A lower bound for the exact supremum (it scans a finite subset of betas).
    The target CDF is integrated segment by segment with Simpson's rule, so
    this path stays independent of the closed-form measure.
    """
    angles = np.sort(np.asarray(table.angles))
    n = len(angles)
    worst = 0.0
    cdf = 0.0
    prev = 0.0
    for k in range(grid):
        beta = math.pi * (k + 1) / grid
        cdf += _simpson_density(prev, beta, 64)
        prev = beta
        emp = float(np.searchsorted(angles, beta, side="right")) / n
        worst = max(worst, abs(emp - cdf))
    return worst
