"""Sato-Tate measure, per-prime angle statistics, and the averaged counts.

The measure on [0, pi] has density (2/pi)*sin(gamma)**2.  For a prime p the
angles psi_{1,a}, a = 1..p-1, are compared against it three ways: window
counts (#A_p), the star discrepancy of the empirical CDF, and the pair counts
#Q over boxes |r| <= R, |s| <= S via the reduction psi_{r,s} = psi_{1,rs}.
Averaging over primes p <= T gives the statistic Pi and the dispersion Delta.

Degenerate pairs: primes dividing r*s carry no angle under the 2*sqrt(p)
normalization.  They are skipped everywhere (pi_rs skips the prime, q_count
never counts the pair), which keeps the prime-streaming evaluation of Pi and
the literal pair-sum definition in exact agreement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kloosterman import KloostermanTable, resolve_table
from .modmath import PrimeList, primes_up_to

# Dispersion counters are O(R*S); refuse boxes beyond this.
MAX_PAIR_BOX = 1 << 27


@dataclass(frozen=True)
class AngleWindow:
    """An angle window [alpha, beta] inside [0, pi], both endpoints inclusive."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (0.0 <= self.alpha < self.beta <= math.pi):
            raise ValueError(f"need 0 <= alpha < beta <= pi, got ({self.alpha}, {self.beta})")

    def contains(self, psi: float) -> bool:
        return self.alpha <= psi <= self.beta


FULL_WINDOW = AngleWindow(0.0, math.pi)


@dataclass(frozen=True)
class STStats:
    """One averaged-statistics run: inputs, observed values, and bound scales."""

    R: int
    S: int
    T: int
    window: AngleWindow
    pi_T: int
    mu: float
    Pi: float
    Delta: float | None
    bound3: float
    bound4: float
    bound5: float


def mu_st(w: AngleWindow) -> float:
    """Closed-form Sato-Tate mass: (beta-alpha)/pi - (sin 2*beta - sin 2*alpha)/(2*pi)."""
    return (w.beta - w.alpha) / math.pi - (math.sin(2 * w.beta) - math.sin(2 * w.alpha)) / (2 * math.pi)


def angle_set_count(p: int, w: AngleWindow, table: KloostermanTable) -> int:
    """#A_p = #{a in 1..p-1 : alpha <= psi_{1,a}(p) <= beta}, boundary inclusive."""
    a = table.angles
    return int(np.count_nonzero((a >= w.alpha) & (a <= w.beta)))


def discrepancy(p: int, table: KloostermanTable) -> float:
    """Star discrepancy sup_beta |#A_p(0,beta)/(p-1) - mu_st(0,beta)|.

    Exact via the two-sided Kolmogorov-Smirnov scan: sort the angles and
    compare the continuous CDF against the empirical CDF from both sides of
    each jump.
    """
    angles = np.sort(table.angles)
    n = len(angles)
    cdf = angles / math.pi - np.sin(2 * angles) / (2 * math.pi)
    steps = np.arange(1, n + 1) / n
    d_plus = float(np.max(steps - cdf))
    d_minus = float(np.max(cdf - (steps - 1.0 / n)))
    return max(d_plus, d_minus)


def _window_residues(w: AngleWindow, table: KloostermanTable) -> np.ndarray:
    """Residues a = 1..p-1 whose angle lies in the window."""
    mask = (table.angles >= w.alpha) & (table.angles <= w.beta)
    return np.nonzero(mask)[0].astype(np.int64) + 1


def q_count(p: int, R: int, S: int, w: AngleWindow, table: KloostermanTable) -> int:
    """#Q = #{(r, s) : 0 < |r| <= R, 0 < |s| <= S, gcd(rs, p) = 1, psi_{r,s} in window}.

    For each r coprime to p and each window residue a, the admissible s form
    one residue class a*r^-1 mod p; their count in [-S, S] is floor
    arithmetic.  No (r, s) pair is ever materialized.
    """
    hits = _window_residues(w, table)
    if not len(hits):
        return 0
    total = 0
    for r in range(-R, R + 1):
        rho = r % p
        if rho == 0:
            continue
        rinv = pow(rho, -1, p)
        c = hits * rinv % p  # the s residue class for each window residue
        total += int(((S - c) // p + (S + c) // p + 1).sum())
    return total


def pi_rs(r: int, s: int, w: AngleWindow, primes: PrimeList, tables=None) -> int:
    """#{p <= T : gcd(rs, p) = 1 and psi_{r,s}(p) in the window}.

    Primes dividing r*s are skipped (their angle is undefined here).
    """
    if r == 0 or s == 0:
        raise ValueError("r and s must be nonzero")
    count = 0
    for p in primes:
        a = (r * s) % p
        if a == 0:
            continue
        table = resolve_table(tables, p)
        if w.contains(table.angle(a)):
            count += 1
    return count


def pi_average(R: int, S: int, T: int, w: AngleWindow, tables=None) -> float:
    """Pi = (1/4RS) * sum over primes p <= T of q_count(p, R, S, window).

    Streaming: one table is resident at a time.  With the degenerate-pair skip
    this equals the pair-sum (1/4RS) * sum_{r,s} pi_rs exactly.
    """
    if min(R, S, T) < 1:
        raise ValueError("R, S, T must be positive")
    total = 0
    for p in primes_up_to(T):
        total += q_count(p, R, S, w, resolve_table(tables, p))
    return total / (4 * R * S)


def pair_counts_over(primes, R: int, S: int, w: AngleWindow, tables=None) -> np.ndarray:
    """pi_rs window counters accumulated over an explicit iterable of primes.

    Shape (2R, 2S); row i is r = -R..-1,1..R, column j likewise for s.
    Partial counters over disjoint prime sets add, which is what makes the
    parallel merge in the CLI valid.
    """
    if R * S > MAX_PAIR_BOX:
        raise ValueError(f"R*S = {R * S} exceeds the {MAX_PAIR_BOX} counter cap")
    r_vals = np.concatenate([np.arange(-R, 0), np.arange(1, R + 1)]).astype(np.int64)
    s_vals = np.concatenate([np.arange(-S, 0), np.arange(1, S + 1)]).astype(np.int64)
    counts = np.zeros((2 * R, 2 * S), dtype=np.int32)
    for p in primes:
        table = resolve_table(tables, p)
        in_window = np.zeros(p, dtype=bool)
        in_window[1:] = (table.angles >= w.alpha) & (table.angles <= w.beta)
        s_ok = s_vals % p != 0
        for i, r in enumerate(r_vals):
            if r % p == 0:
                continue
            prod = (r * s_vals) % p
            counts[i] += in_window[prod] & s_ok
    return counts


def pair_counts(R: int, S: int, T: int, w: AngleWindow, tables=None) -> np.ndarray:
    """The full matrix of pi_rs window counts for 0 < |r| <= R, 0 < |s| <= S."""
    return pair_counts_over(primes_up_to(T), R, S, w, tables)


def delta_dispersion(R: int, S: int, T: int, w: AngleWindow, tables=None) -> float:
    """Delta = (1/4RS) * sum over pairs of (pi_rs - mu_st * pi(T))**2."""
    counts = pair_counts(R, S, T, w, tables)
    prediction = mu_st(w) * len(primes_up_to(T))
    dev = counts.astype(np.float64) - prediction
    return float((dev * dev).sum() / (4 * R * S))


def bound_theorem3(p: int, R: int, S: int) -> float:
    """Scale R*S*p^(-1/4) + sqrt(R*S)*p^(1/2), with o(1) factors set to zero."""
    return R * S * p ** -0.25 + math.sqrt(R * S) * math.sqrt(p)


def bound_theorem4(R: int, S: int, T: int) -> float:
    """Scale T^(3/4) + T^(3/2)/sqrt(R*S)."""
    return T ** 0.75 + T ** 1.5 / math.sqrt(R * S)


def bound_theorem5(R: int, S: int, T: int) -> float:
    """Scale T^(7/4) + T^3/sqrt(R*S)."""
    return T ** 1.75 + T ** 3 / math.sqrt(R * S)


def collect_stats(R: int, S: int, T: int, w: AngleWindow, tables=None,
                  with_dispersion: bool = False) -> STStats:
    """Run the averaged statistic (and optionally the dispersion) once and
    bundle it with the matching bound scales.

    bound3 is evaluated at the largest prime <= T, the dominant term of the
    prime-by-prime sum.
    """
    primes = primes_up_to(T)
    if not len(primes):
        raise ValueError(f"no primes <= {T}")
    if with_dispersion:
        # one streaming pass: Pi is the mean of the same counters Delta squares
        counts = pair_counts(R, S, T, w, tables)
        Pi = float(counts.sum()) / (4 * R * S)
        dev = counts.astype(np.float64) - mu_st(w) * len(primes)
        Delta = float((dev * dev).sum() / (4 * R * S))
    else:
        Pi = pi_average(R, S, T, w, tables)
        Delta = None
    return STStats(
        R=R, S=S, T=T, window=w,
        pi_T=len(primes),
        mu=mu_st(w),
        Pi=Pi,
        Delta=Delta,
        bound3=bound_theorem3(primes.primes[-1], R, S),
        bound4=bound_theorem4(R, S, T),
        bound5=bound_theorem5(R, S, T),
    )
