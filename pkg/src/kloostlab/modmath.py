"""Exact integer and modular arithmetic primitives shared by every other module.

Everything here is deterministic, pure, and sized for desk-scale moduli
(trial division suffices up to ~10**7; there is no probabilistic primality
or general-purpose factoring).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field


class NotInvertibleError(ValueError):
    """Raised when a modular inverse does not exist; carries the offending gcd."""

    def __init__(self, x: int, m: int, g: int):
        super().__init__(f"{x} is not invertible mod {m}: gcd = {g}")
        self.gcd = g


def egcd(a: int, b: int) -> tuple[int, int, int]:
    """Extended Euclid: return (g, u, v) with g = gcd(|a|, |b|) >= 0 and u*a + v*b = g."""
    if a == 0 and b == 0:
        raise ValueError("gcd(0, 0) is undefined")
    old_r, r = a, b
    old_u, u = 1, 0
    old_v, v = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_u, u = u, old_u - q * u
        old_v, v = v, old_v - q * v
    if old_r < 0:
        old_r, old_u, old_v = -old_r, -old_u, -old_v
    return old_r, old_u, old_v


def mod_inverse(x: int, m: int) -> int:
    """Inverse of x modulo m, canonicalized to [1, m-1].

    Raises NotInvertibleError (carrying the gcd) when gcd(x, m) != 1.
    """
    if m < 2:
        raise ValueError(f"modulus must be >= 2, got {m}")
    g, u, _ = egcd(x, m)
    if g != 1:
        raise NotInvertibleError(x, m, g)
    return u % m


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division, as a {prime: exponent} map."""
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def is_prime(n: int) -> bool:
    """Deterministic trial-division primality test."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def euler_phi(m: int) -> int:
    """Euler totient: #{1 <= k <= m : gcd(k, m) = 1}."""
    if m < 1:
        raise ValueError(f"euler_phi needs m >= 1, got {m}")
    result = m
    for p in factorize(m):
        result -= result // p
    return result


def divisor_count(m: int) -> int:
    """Number of positive divisors d(m)."""
    out = 1
    for e in factorize(m).values():
        out *= e + 1
    return out


def coprime_count_interval(X: int, m: int) -> int:
    """Exact #{x : |x| <= X, gcd(x, m) = 1}.

    Inclusion-exclusion over the squarefree divisors of m: the count of
    multiples of d in [-X, X] is 2*floor(X/d) + 1, and the Mobius-weighted
    sum of the +1 terms vanishes for m >= 2, so x = 0 is counted only for
    m = 1 (where gcd(0, 1) = 1).
    """
    if X < 1:
        raise ValueError(f"X must be >= 1, got {X}")
    if m == 1:
        return 2 * X + 1
    primes = list(factorize(m))
    total = 0
    for mask in range(1 << len(primes)):
        d = 1
        bits = 0
        for i, p in enumerate(primes):
            if mask >> i & 1:
                d *= p
                bits += 1
        sign = -1 if bits % 2 else 1
        total += sign * (2 * (X // d) + 1)
    return total


@dataclass(frozen=True)
class PrimeList:
    """All primes up to an inclusive bound, ascending. Immutable, shareable."""

    bound: int
    primes: tuple[int, ...] = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.primes)

    def __iter__(self):
        return iter(self.primes)


def primes_up_to(T: int) -> PrimeList:
    """Sieve of Eratosthenes up to T inclusive. T < 2 yields an empty list."""
    if T < 2:
        return PrimeList(T, ())
    sieve = bytearray([1]) * (T + 1)
    sieve[0] = sieve[1] = 0
    for p in range(2, math.isqrt(T) + 1):
        if sieve[p]:
            start = p * p
            sieve[start:: p] = bytearray(len(range(start, T + 1, p)))
    return PrimeList(T, tuple(i for i, flag in enumerate(sieve) if flag))


def primitive_root(p: int) -> int:
    """Smallest generator of the multiplicative group mod an odd prime p.

    Verified by checking g^((p-1)/q) != 1 for every prime q | p-1.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p == 2:
        raise ValueError("p = 2 has a trivial multiplicative group; no root in [2, p-1]")
    order = p - 1
    factors = list(factorize(order))
    for g in range(2, p):
        if all(pow(g, order // q, p) != 1 for q in factors):
            return g
    raise AssertionError(f"no primitive root found for prime {p}")  # unreachable


def e_m(z: int, m: int) -> complex:
    """exp(2*pi*i*z/m). z is reduced mod m first, so periodicity is exact."""
    if m < 1:
        raise ValueError(f"modulus must be >= 1, got {m}")
    return cmath.exp(2j * math.pi * (z % m) / m)
