import math
import random

import numpy as np
import pytest

from kloostlab import oracle
from kloostlab.kloosterman import kloosterman_all
from kloostlab.modmath import primes_up_to
from kloostlab.satotate import (
    FULL_WINDOW,
    AngleWindow,
    angle_set_count,
    bound_theorem3,
    bound_theorem4,
    bound_theorem5,
    collect_stats,
    delta_dispersion,
    discrepancy,
    mu_st,
    pair_counts,
    pi_average,
    pi_rs,
    q_count,
)


def brute_angle(r: int, s: int, p: int) -> float:
    """Angle of K_{r,s}(p) straight from the defining sum."""
    K = oracle.naive_kloosterman(r, s, p).real
    return math.acos(max(-1.0, min(1.0, K / (2 * math.sqrt(p)))))


def brute_q_count(p, R, S, w):
    total = 0
    for r in range(-R, R + 1):
        for s in range(-S, S + 1):
            if r == 0 or s == 0 or (r * s) % p == 0:
                continue
            if w.alpha <= brute_angle(r, s, p) <= w.beta:
                total += 1
    return total


def brute_pair_counts(R, S, T, w):
    primes = list(primes_up_to(T))
    r_vals = list(range(-R, 0)) + list(range(1, R + 1))
    s_vals = list(range(-S, 0)) + list(range(1, S + 1))
    counts = np.zeros((2 * R, 2 * S), dtype=np.int64)
    for i, r in enumerate(r_vals):
        for j, s in enumerate(s_vals):
            n = 0
            for p in primes:
                if (r * s) % p == 0:
                    continue
                if w.alpha <= brute_angle(r, s, p) <= w.beta:
                    n += 1
            counts[i, j] = n
    return counts


def test_window_validation():
    with pytest.raises(ValueError):
        AngleWindow(-0.1, 1.0)
    with pytest.raises(ValueError):
        AngleWindow(1.0, 1.0)
    with pytest.raises(ValueError):
        AngleWindow(0.0, math.pi + 0.1)


def test_mu_st_examples():
    assert mu_st(FULL_WINDOW) == pytest.approx(1.0, abs=1e-12)
    assert mu_st(AngleWindow(0.0, math.pi / 2)) == pytest.approx(0.5, abs=1e-12)
    assert mu_st(AngleWindow(math.pi / 3, 2 * math.pi / 3)) == pytest.approx(
        1 / 3 + math.sqrt(3) / (2 * math.pi), abs=1e-12)


def test_mu_st_against_simpson():
    rng = random.Random(4)
    for _ in range(100):
        a = rng.uniform(0.0, math.pi - 1e-6)
        b = rng.uniform(a + 1e-6, math.pi)
        w = AngleWindow(a, b)
        assert mu_st(w) == pytest.approx(oracle.naive_mu(w, 4000), abs=1e-10)


def test_mu_st_additive_and_reflective():
    rng = random.Random(9)
    for _ in range(60):
        a, b, c = sorted(rng.uniform(0, math.pi) for _ in range(3))
        if not (a < b < c):
            continue
        assert mu_st(AngleWindow(a, c)) == pytest.approx(
            mu_st(AngleWindow(a, b)) + mu_st(AngleWindow(b, c)), abs=1e-12)
        assert mu_st(AngleWindow(a, b)) == pytest.approx(
            mu_st(AngleWindow(math.pi - b, math.pi - a)), abs=1e-12)


def test_angle_set_count():
    for p in (5, 11, 101):
        table = kloosterman_all(p)
        assert angle_set_count(p, FULL_WINDOW, table) == p - 1
    t3 = kloosterman_all(3)
    # psi_{1,1}(3) ~ 1.8636, psi_{1,2}(3) ~ 0.9553
    assert angle_set_count(3, AngleWindow(1.5, 2.0), t3) == 1


def test_angle_set_count_matches_brute_force():
    windows = [AngleWindow(0.4, 1.1), AngleWindow(1.0, 2.7), FULL_WINDOW]
    for p in (7, 53, 199):
        table = kloosterman_all(p)
        for w in windows:
            brute = sum(1 for a in range(1, p) if w.alpha <= brute_angle(1, a, p) <= w.beta)
            assert angle_set_count(p, w, table) == brute


def test_discrepancy_perfect_quantiles():
    # synthetic angles sitting exactly on the measure's quantiles
    n = 200
    qs = (np.arange(1, n + 1) - 0.5) / n
    grid = np.linspace(0, math.pi, 20001)
    cdf = grid / math.pi - np.sin(2 * grid) / (2 * math.pi)
    angles = np.interp(qs, cdf, grid)
    fake = kloosterman_all(5, "naive")
    synthetic = type(fake)(p=n + 1, values=2 * math.sqrt(n + 1) * np.cos(angles),
                           angles=angles, method="naive", max_imag=0.0)
    assert discrepancy(n + 1, synthetic) <= 1.0 / n + 1e-3


def test_discrepancy_sandwich_with_grid_oracle():
    for p in (5, 101, 499):
        table = kloosterman_all(p)
        exact = discrepancy(p, table)
        grid = oracle.naive_discrepancy(p, table, 1500)
        assert grid <= exact + 1e-9
        assert exact - grid <= 1.0 / 1500 + 2e-3
    # a one-point grid is a coarse lower bound
    t = kloosterman_all(101)
    assert oracle.naive_discrepancy(101, t, 1) <= discrepancy(101, t) + 1e-9


def test_two_sided_window_deviation_within_twice_discrepancy():
    # sup over (alpha, beta) windows of |empirical - mu| <= 2 * anchored discrepancy
    for p in (101, 499):
        table = kloosterman_all(p)
        d = discrepancy(p, table)
        worst = 0.0
        grid = np.linspace(0.0, math.pi, 60)
        for i, a in enumerate(grid[:-1]):
            for b in grid[i + 1:]:
                w = AngleWindow(float(a), float(b))
                emp = angle_set_count(p, w, table) / (p - 1)
                worst = max(worst, abs(emp - mu_st(w)))
        assert worst <= 2 * d + 1e-9


def test_q_count_full_window_identity():
    t7 = kloosterman_all(7)
    assert q_count(7, 3, 3, FULL_WINDOW, t7) == 36
    for p in (5, 13, 41):
        table = kloosterman_all(p)
        for R, S in ((1, 1), (2, 5), (p - 1, p - 1)):
            coprime_r = sum(1 for r in range(-R, R + 1) if r != 0 and r % p != 0)
            coprime_s = sum(1 for s in range(-S, S + 1) if s != 0 and s % p != 0)
            assert q_count(p, R, S, FULL_WINDOW, table) == coprime_r * coprime_s


def test_q_count_narrow_window_p3():
    # pairs (1,1) and (-1,-1) reduce to a=1; (1,-1) and (-1,1) to a=2
    t3 = kloosterman_all(3)
    assert q_count(3, 1, 1, AngleWindow(1.5, 2.0), t3) == 2
    assert q_count(3, 1, 1, AngleWindow(0.5, 1.2), t3) == 2
    assert q_count(3, 1, 1, AngleWindow(0.5, 2.0), t3) == 4


def test_q_count_matches_brute_force():
    rng = random.Random(17)
    for p in (5, 11, 23, 47):
        table = kloosterman_all(p)
        for _ in range(6):
            R = rng.randint(1, 10)
            S = rng.randint(1, 10)
            a = rng.uniform(0, 2.9)
            w = AngleWindow(a, rng.uniform(a + 0.05, math.pi))
            assert q_count(p, R, S, w, table) == brute_q_count(p, R, S, w)


def test_q_count_ranges_beyond_p():
    # R, S larger than p exercise the floor-count branch over multiple periods
    for p in (5, 11):
        table = kloosterman_all(p)
        for R, S in ((p, 3 * p), (2 * p + 1, p + 2)):
            w = AngleWindow(0.3, 2.8)
            assert q_count(p, R, S, w, table) == brute_q_count(p, R, S, w)


def test_window_additivity_of_q_count():
    table = kloosterman_all(31)
    # boundary chosen away from every sample angle
    lo, mid, hi = 0.2, 1.57, 3.0
    assert q_count(31, 4, 6, AngleWindow(lo, hi), table) == (
        q_count(31, 4, 6, AngleWindow(lo, mid), table)
        + q_count(31, 4, 6, AngleWindow(mid + 1e-12, hi), table))


def test_pi_rs_examples():
    primes10 = primes_up_to(10)
    assert pi_rs(1, 1, FULL_WINDOW, primes10) == 4
    assert pi_rs(6, 1, FULL_WINDOW, primes10) == 2
    # window excluding psi_{1,1}(3): only p=2 of the primes <= 3 counts
    psi2 = brute_angle(1, 1, 2)
    w = AngleWindow(psi2 - 0.1, psi2 + 0.1)
    assert pi_rs(1, 1, w, primes_up_to(3)) == 1
    with pytest.raises(ValueError):
        pi_rs(0, 1, FULL_WINDOW, primes10)


def test_pi_average_full_window():
    assert pi_average(1, 1, 10, FULL_WINDOW) == pytest.approx(4.0, abs=1e-12)


def test_pi_average_equals_pair_sum():
    rng = random.Random(23)
    for _ in range(4):
        R, S, T = rng.randint(1, 5), rng.randint(1, 5), rng.randint(10, 50)
        a = rng.uniform(0, 2.0)
        w = AngleWindow(a, rng.uniform(a + 0.2, math.pi))
        primes = primes_up_to(T)
        tables = {p: kloosterman_all(p) for p in primes}
        pair_sum = sum(
            pi_rs(r, s, w, primes, tables)
            for r in range(-R, R + 1) if r != 0
            for s in range(-S, S + 1) if s != 0)
        assert pi_average(R, S, T, w, tables) == pytest.approx(
            pair_sum / (4 * R * S), abs=1e-12)


def test_pi_average_monotone_in_window():
    tables = {p: kloosterman_all(p) for p in primes_up_to(60)}
    nested = [AngleWindow(1.2, 1.8), AngleWindow(0.9, 2.2), AngleWindow(0.4, 2.9)]
    values = [pi_average(3, 3, 60, w, tables) for w in nested]
    assert values[0] <= values[1] <= values[2]


def test_pair_counts_match_brute_force():
    w = AngleWindow(0.8, 2.3)
    for R, S, T in ((1, 1, 30), (2, 3, 20), (3, 3, 30)):
        fast = pair_counts(R, S, T, w)
        brute = brute_pair_counts(R, S, T, w)
        assert (fast == brute).all()


def test_delta_zero_for_trivial_box():
    for T in (10, 29, 30):
        assert delta_dispersion(1, 1, T, FULL_WINDOW) == 0.0


def test_delta_matches_brute_force():
    w = AngleWindow(0.6, 2.0)
    R, S, T = 2, 3, 30
    counts = brute_pair_counts(R, S, T, w)
    prediction = mu_st(w) * len(primes_up_to(T))
    expected = float(((counts - prediction) ** 2).sum() / (4 * R * S))
    assert delta_dispersion(R, S, T, w) == pytest.approx(expected, rel=1e-12)


def test_bound_evaluators():
    assert bound_theorem3(10**4, 100, 100) == pytest.approx(11000.0)
    assert bound_theorem4(1, 1, 1) == pytest.approx(2.0)
    assert bound_theorem5(1, 1, 1) == pytest.approx(2.0)
    assert bound_theorem4(4, 9, 16) == pytest.approx(16 ** 0.75 + 16 ** 1.5 / 6)
    assert bound_theorem5(4, 9, 16) == pytest.approx(16 ** 1.75 + 16 ** 3 / 6)


def test_collect_stats():
    w = AngleWindow(0.5, 2.5)
    stats = collect_stats(2, 2, 30, w, with_dispersion=True)
    assert stats.pi_T == len(primes_up_to(30))
    assert stats.mu == pytest.approx(mu_st(w))
    assert stats.Pi == pytest.approx(pi_average(2, 2, 30, w), abs=1e-12)
    assert stats.Delta == pytest.approx(delta_dispersion(2, 2, 30, w), rel=1e-12)
    assert stats.bound4 == bound_theorem4(2, 2, 30)
    lean = collect_stats(2, 2, 30, w)
    assert lean.Delta is None and lean.Pi == stats.Pi
