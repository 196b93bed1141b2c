"""Window counts for modular inverses and multiples, their variance sums, and
exceptional-set counters.

The central objects: a sample set of integers x with |x| <= X, a residue
window of Y consecutive residues mod m, and for each residue a the number of
x whose inverse-ratio a/x (or product a*x) lands in the window.  The residue
index a runs over 1..m, with a = m standing for the zero residue class.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Literal, Sequence

import numpy as np

from .modmath import coprime_count_interval, euler_phi, mod_inverse

Mode = Literal["inverse", "multiple", "multiple_coprime"]
MODES: tuple[Mode, ...] = ("inverse", "multiple", "multiple_coprime")

# Histogram memory is O(m); refuse moduli whose counter array would not fit.
MAX_MODULUS = 1 << 26


@dataclass(frozen=True)
class SampleSet:
    """A finite set of integers inside [-X, X].

    ``elements`` is None for the full symmetric interval (zero included) or an
    explicit strictly ascending tuple.
    """

    bound: int
    elements: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.bound < 1:
            raise ValueError(f"bound must be >= 1, got {self.bound}")
        if self.elements is not None:
            elems = tuple(self.elements)
            if any(abs(x) > self.bound for x in elems):
                raise ValueError("element outside [-X, X]")
            if any(a >= b for a, b in zip(elems, elems[1:])):
                raise ValueError("elements must be strictly ascending")
            object.__setattr__(self, "elements", elems)

    @classmethod
    def full(cls, X: int) -> "SampleSet":
        return cls(X, None)

    @classmethod
    def explicit(cls, xs: Sequence[int], bound: int | None = None) -> "SampleSet":
        xs = tuple(sorted(set(xs)))
        if bound is None:
            bound = max((abs(x) for x in xs), default=1)
        return cls(max(1, bound), xs)

    @property
    def is_full_interval(self) -> bool:
        return self.elements is None

    def __len__(self) -> int:
        if self.elements is None:
            return 2 * self.bound + 1
        return len(self.elements)

    def __iter__(self) -> Iterator[int]:
        if self.elements is None:
            return iter(range(-self.bound, self.bound + 1))
        return iter(self.elements)

    def coprime_size(self, m: int) -> int:
        """#X_m = #{x in X : gcd(x, m) = 1}, exact."""
        if self.elements is None:
            return coprime_count_interval(self.bound, m)
        return sum(1 for x in self.elements if math.gcd(x, m) == 1)


@dataclass(frozen=True)
class Window:
    """Y consecutive residues (Z+1 .. Z+Y) mod m, with 1 <= Y <= m."""

    Z: int
    Y: int
    m: int

    def __post_init__(self):
        if self.m < 2:
            raise ValueError(f"modulus must be >= 2, got {self.m}")
        if not 1 <= self.Y <= self.m:
            raise ValueError(f"window length must satisfy 1 <= Y <= m, got Y={self.Y}, m={self.m}")

    def contains(self, residue: int) -> bool:
        return (residue - (self.Z + 1)) % self.m < self.Y

    def residues(self) -> np.ndarray:
        """The Y distinct residues of the window, as an int64 array."""
        return np.arange(self.Z + 1, self.Z + 1 + self.Y, dtype=np.int64) % self.m


@dataclass(frozen=True)
class DeviationReport:
    """Observed vs expected window count for one residue a."""

    a: int
    observed: int
    expected: float
    deviation: float
    squared: float

    @classmethod
    def make(cls, a: int, observed: int, expected: float) -> "DeviationReport":
        dev = observed - expected
        return cls(a, observed, expected, dev, dev * dev)


def _check_window(m: int, W: Window) -> None:
    if W.m != m:
        raise ValueError(f"window modulus {W.m} does not match m={m}")
    if m > MAX_MODULUS:
        raise ValueError(f"modulus {m} exceeds the 2**26 memory cap")


def count_inverse_window(a: int, m: int, X: SampleSet, W: Window) -> int:
    """#{x in X : gcd(x, m) = 1 and a * x^-1 mod m falls in the window}."""
    _check_window(m, W)
    total = 0
    for x in X:
        xm = x % m
        if math.gcd(xm, m) != 1:
            continue
        if W.contains(a * mod_inverse(xm, m) % m):
            total += 1
    return total


def count_multiple_window(a: int, m: int, X: SampleSet, W: Window) -> int:
    """#{x in X : a * x mod m falls in the window}; x = 0 contributes residue 0."""
    _check_window(m, W)
    total = 0
    for x in X:
        if W.contains(a * x % m):
            total += 1
    return total


def count_multiple_coprime_window(a: int, m: int, X: SampleSet, W: Window) -> int:
    """Like count_multiple_window but restricted to x with gcd(x, m) = 1."""
    _check_window(m, W)
    total = 0
    for x in X:
        if math.gcd(x % m, m) != 1:
            continue
        if W.contains(a * x % m):
            total += 1
    return total


def expected_inverse(m: int, X: SampleSet, W: Window) -> float:
    """#X_m * Y / m, the expected inverse-window count per residue."""
    return X.coprime_size(m) * W.Y / m


def expected_multiple(m: int, X: SampleSet, W: Window) -> float:
    """#X * Y / m, the expected multiple-window count per residue."""
    return len(X) * W.Y / m


def window_histogram(m: int, X: SampleSet, W: Window, mode: Mode) -> np.ndarray:
    """All m window counts at once, as an int64 array indexed by a = 1..m.

    Index 0 is unused (always 0); entry m is the zero residue class.  Runs in
    O(#X * Y): instead of scanning a for each x, each admissible x scatters
    its Y window residues to the residues a they determine (a = x*y for
    inverse mode, a = y/x for the multiple modes; non-coprime x in plain
    multiple mode solve a*x = y directly class-by-class).
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    _check_window(m, W)
    res = np.zeros(m, dtype=np.int64)  # indexed by residue class 0..m-1
    ys = W.residues()
    for x in X:
        xm = x % m
        g = math.gcd(xm, m)
        if g == 1:
            # fancy-index += is safe: a unit multiple of Y distinct residues
            # is again Y distinct residues, so no index repeats
            if mode == "inverse":
                res[(ys * xm) % m] += 1
            else:
                res[(ys * mod_inverse(xm, m)) % m] += 1
        elif mode == "multiple":
            # a * x = y (mod m) is solvable iff g | y, with g solutions spaced m/g.
            sel = ys[ys % g == 0]
            if len(sel):
                mg = m // g
                inv = pow((xm // g) % mg, -1, mg) if mg > 1 else 0
                base = (sel // g * inv) % mg
                idx = (base[None, :] + np.arange(g, dtype=np.int64)[:, None] * mg).ravel()
                res[idx] += 1
    hist = np.zeros(m + 1, dtype=np.int64)
    hist[1:m] = res[1:]
    hist[m] = res[0]
    return hist


def deviation_reports(m: int, X: SampleSet, W: Window, mode: Mode) -> list[DeviationReport]:
    """Per-residue DeviationReports for a = 1..m, computed from the histogram."""
    hist = window_histogram(m, X, W, mode)
    expected = expected_multiple(m, X, W) if mode == "multiple" else expected_inverse(m, X, W)
    return [DeviationReport.make(a, int(hist[a]), expected) for a in range(1, m + 1)]


def _variance_from_hist(hist: np.ndarray, m: int, expected_num: int) -> float:
    # sum over a of (count - expected_num/m)^2, as exact integer numerator over m^2
    counts = [int(c) for c in hist[1:]]
    num = sum((c * m - expected_num) ** 2 for c in counts)
    return num / (m * m)


def variance_sum_inverse(m: int, X: SampleSet, W: Window) -> float:
    """Sum over a = 1..m of (M_a - #X_m * Y / m)^2, exactly (integer numerator)."""
    hist = window_histogram(m, X, W, "inverse")
    return _variance_from_hist(hist, m, X.coprime_size(m) * W.Y)


def variance_sum_multiple(m: int, X: SampleSet, W: Window) -> float:
    """Sum over a = 1..m of (N_a - #X * Y / m)^2, exactly (integer numerator)."""
    hist = window_histogram(m, X, W, "multiple")
    return _variance_from_hist(hist, m, len(X) * W.Y)


def exceptional_count(m: int, X: SampleSet, W: Window, gamma: float,
                      mode: Literal["inverse", "multiple"]) -> int:
    """Number of residues a whose count deviates from the interval reference by
    at least the fraction gamma.

    The reference is 2*X*Y*phi(m)/m**2 for inverse mode and 2*X*Y/m for
    multiple mode; the sample set must be the full symmetric interval.  The
    threshold test |count - ref| >= gamma*ref is evaluated with denominators
    cleared, so residues sitting exactly on the threshold never flip on float
    rounding.
    """
    if not X.is_full_interval:
        raise ValueError("exceptional_count is defined for full-interval sample sets")
    if not 0.0 < gamma < 1.0:
        raise ValueError(f"gamma must lie in (0, 1), got {gamma}")
    if mode not in ("inverse", "multiple"):
        raise ValueError(f"unknown mode {mode!r}")
    gamma_f = Fraction(gamma)
    if mode == "inverse":
        hist = window_histogram(m, X, W, "inverse")
        ref_num = 2 * X.bound * W.Y * euler_phi(m)  # reference = ref_num / m^2
        denom = m * m
    else:
        hist = window_histogram(m, X, W, "multiple")
        ref_num = 2 * X.bound * W.Y  # reference = ref_num / m
        denom = m
    threshold = gamma_f * ref_num
    count = 0
    for a in range(1, m + 1):
        if abs(Fraction(int(hist[a]) * denom - ref_num)) >= threshold:
            count += 1
    return count


def exceptional_scale(m: int, X_bound: int, Y: int, gamma: float) -> float:
    """Gamma**-2 * Y**-1 * (X**-1 + Y**-1) * m**2, the exceptional-set scale."""
    return (1.0 / gamma ** 2) * (1.0 / Y) * (1.0 / X_bound + 1.0 / Y) * m * m
