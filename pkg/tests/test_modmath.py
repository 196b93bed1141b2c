import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kloostlab.modmath import (
    NotInvertibleError,
    coprime_count_interval,
    divisor_count,
    e_m,
    egcd,
    euler_phi,
    is_prime,
    mod_inverse,
    primes_up_to,
    primitive_root,
)


def test_egcd_examples():
    assert egcd(0, 5) == (5, 0, 1)
    g, u, v = egcd(2, 7)
    assert g == 1 and 2 * u + 7 * v == 1
    g, u, v = egcd(12, 18)
    assert g == 6 and 12 * u + 18 * v == 6


def test_egcd_both_zero():
    with pytest.raises(ValueError):
        egcd(0, 0)


@given(st.integers(-10**9, 10**9), st.integers(-10**9, 10**9))
def test_egcd_bezout(a, b):
    if a == 0 and b == 0:
        return
    g, u, v = egcd(a, b)
    assert g == math.gcd(a, b)
    assert u * a + v * b == g
    if a:
        assert a % g == 0
    if b:
        assert b % g == 0


def test_mod_inverse_examples():
    assert mod_inverse(1, 11) == 1
    assert mod_inverse(2, 7) == 4
    with pytest.raises(NotInvertibleError) as exc:
        mod_inverse(4, 8)
    assert exc.value.gcd == 4


def test_mod_inverse_exhaustive_small():
    for m in range(2, 60):
        for x in range(1, m):
            if math.gcd(x, m) == 1:
                y = mod_inverse(x, m)
                assert 1 <= y <= m - 1
                assert x * y % m == 1


def test_euler_phi_examples():
    assert euler_phi(1) == 1
    assert euler_phi(7) == 6
    assert euler_phi(12) == 4


@given(st.integers(1, 2000), st.integers(1, 2000))
def test_euler_phi_multiplicative(m, n):
    if math.gcd(m, n) != 1:
        return
    assert euler_phi(m * n) == euler_phi(m) * euler_phi(n)


def test_coprime_count_examples():
    assert coprime_count_interval(5, 6) == 4   # {+-1, +-5}
    assert coprime_count_interval(3, 2) == 4   # {+-1, +-3}
    for X in (1, 4, 17):
        assert coprime_count_interval(X, 1) == 2 * X + 1


@settings(max_examples=300)
@given(st.integers(1, 200), st.integers(1, 200))
def test_coprime_count_matches_enumeration(X, m):
    exact = sum(1 for x in range(-X, X + 1) if math.gcd(x, m) == 1)
    assert coprime_count_interval(X, m) == exact


@given(st.integers(1, 500), st.integers(2, 500))
def test_coprime_count_error_envelope(X, m):
    # inclusion-exclusion error vs the smooth main term is at most d(m)
    approx = 2 * X * euler_phi(m) / m
    assert abs(coprime_count_interval(X, m) - approx) <= divisor_count(m)


def test_primes_up_to():
    assert list(primes_up_to(10)) == [2, 3, 5, 7]
    assert list(primes_up_to(2)) == [2]
    assert len(primes_up_to(30)) == 10
    assert len(primes_up_to(1)) == 0
    ps = primes_up_to(1000)
    assert all(is_prime(p) for p in ps)
    assert list(ps.primes) == sorted(set(ps.primes))


def test_primitive_root_examples():
    assert primitive_root(3) == 2
    assert primitive_root(7) == 3
    assert primitive_root(5) == 2
    with pytest.raises(ValueError):
        primitive_root(8)
    with pytest.raises(ValueError):
        primitive_root(2)


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13, 101, 257, 1009])
def test_primitive_root_has_full_order(p):
    g = primitive_root(p)
    seen = set()
    acc = 1
    for _ in range(p - 1):
        seen.add(acc)
        acc = acc * g % p
    assert len(seen) == p - 1


def test_e_m_examples():
    assert abs(e_m(0, 9) - 1) < 1e-12
    assert abs(e_m(2, 4) + 1) < 1e-12
    assert abs(e_m(1, 4) - 1j) < 1e-12


@given(st.integers(-10**12, 10**12), st.integers(1, 10**6))
def test_e_m_periodic_unit(z, m):
    assert abs(e_m(z + m, m) - e_m(z, m)) <= 1e-12
    assert abs(abs(e_m(z, m)) - 1.0) <= 1e-12
