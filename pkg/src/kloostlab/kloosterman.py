"""Kloosterman sums, full per-prime value/angle tables, and the on-disk angle cache.

The sum for parameters (r, s) and prime p runs over n = 1..p-1 and adds
exp(2*pi*i*(r*n + s*n^-1)/p).  Conjugation symmetry makes it real; the Weil
bound |K| <= 2*sqrt(p) lets every value be written as 2*sqrt(p)*cos(psi) for
a unique angle psi in [0, pi].

Two table builders are provided.  The naive one evaluates the defining double
loop (vectorized, still O(p^2)).  The fast one walks the multiplicative group
with a primitive root g, which turns the whole table into one cyclic
self-convolution of length p-1: with f(k) = e_p(g^k),

    K_{1, g^j} = sum_k f(k) * f(j - k)   (indices mod p-1).

The convolution length p-1 is arbitrary, so it is evaluated with a chirp
(Bluestein) transform that only ever runs power-of-two FFTs.
"""

from __future__ import annotations

import math
import os
import struct
import tempfile
from dataclasses import dataclass

import numpy as np

from .modmath import is_prime, primitive_root

# |Im K| beyond this (times sqrt(p)) signals a broken build, not bad input.
REALNESS_TOL = 1e-9
# Slack allowed past the Weil bound before angle conversion refuses a value.
WEIL_CLAMP_TOL = 1e-6
# Largest prime a table will be built for (memory and float-error budget).
MAX_TABLE_PRIME = 10_000_019

CACHE_MAGIC = b"KLT1"
_METHOD_TAGS = {"naive": 0, "convolution": 1}
_TAG_METHODS = {v: k for k, v in _METHOD_TAGS.items()}


class NumericIntegrityError(ArithmeticError):
    """A computed quantity violated an identity that holds in exact arithmetic."""


class WeilViolationError(NumericIntegrityError):
    """A value exceeded the 2*sqrt(p) bound by more than the clamp tolerance."""


class CacheCorruptionError(ValueError):
    """An angle-table cache file failed its structural or checksum check."""


@dataclass(frozen=True)
class KloostermanTable:
    """Values K_{1,a} and angles psi_{1,a} for a = 1..p-1, index a-1."""

    p: int
    values: np.ndarray
    angles: np.ndarray
    method: str
    max_imag: float

    def value(self, a: int) -> float:
        return float(self.values[a % self.p - 1])

    def angle(self, a: int) -> float:
        return float(self.angles[a % self.p - 1])


def _require_prime(p: int) -> None:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")


def kloosterman_sum(r: int, s: int, p: int) -> float:
    """K_{r,s}(p) as a real number.

    The complex accumulation's imaginary part is checked against the realness
    tolerance before being discarded; a violation raises NumericIntegrityError
    because it means the implementation, not the input, is wrong.
    """
    _require_prime(p)
    r, s = r % p, s % p  # keep the int64 exponent products inside 2**63
    n = np.arange(1, p, dtype=np.int64)
    ninv = _inverse_table(p)
    total = complex(np.exp(2j * np.pi / p * ((r * n + s * ninv) % p)).sum())
    if abs(total.imag) > REALNESS_TOL * math.sqrt(p):
        raise NumericIntegrityError(
            f"K_({r},{s})({p}) has imaginary part {total.imag:.3e}")
    return total.real


def _inverse_table(p: int) -> np.ndarray:
    """n^-1 mod p for n = 1..p-1, via the prefix-product trick (one pow call)."""
    if p == 2:
        return np.array([1], dtype=np.int64)
    pref = [1] * p  # pref[i] = i! mod p
    acc = 1
    for i in range(1, p):
        acc = acc * i % p
        pref[i] = acc
    inv = np.empty(p - 1, dtype=np.int64)
    run = pow(pref[p - 1], -1, p)
    for i in range(p - 1, 0, -1):
        inv[i - 1] = run * pref[i - 1] % p
        run = run * i % p
    return inv


def angle(K: float, p: int) -> float:
    """The unique psi in [0, pi] with K = 2*sqrt(p)*cos(psi).

    Arguments within WEIL_CLAMP_TOL of the bound are clamped onto it; anything
    further out raises WeilViolationError.
    """
    bound = 2.0 * math.sqrt(p)
    if abs(K) > bound + WEIL_CLAMP_TOL:
        raise WeilViolationError(f"|K| = {abs(K):.6g} exceeds 2*sqrt({p}) = {bound:.6g}")
    return math.acos(min(1.0, max(-1.0, K / bound)))


def reduce_pair(r: int, s: int, p: int) -> int:
    """The residue a = r*s mod p with psi_{r,s}(p) = psi_{1,a}(p).

    Pairs with p | r*s have no angle under this normalization and are refused;
    degenerate-pair policy belongs to the caller.
    """
    _require_prime(p)
    a = (r * s) % p
    if a == 0:
        raise ValueError(f"p = {p} divides r*s = {r * s}; the pair has no reduced angle")
    return a


def _table_from_values(p: int, values: np.ndarray, method: str, max_imag: float) -> KloostermanTable:
    if max_imag > REALNESS_TOL * math.sqrt(p):
        raise NumericIntegrityError(
            f"table for p={p} ({method}): max |Im| = {max_imag:.3e} exceeds realness tolerance")
    bound = 2.0 * math.sqrt(p)
    if float(np.abs(values).max()) > bound + WEIL_CLAMP_TOL:
        worst = float(np.abs(values).max())
        raise WeilViolationError(f"table for p={p}: |K| = {worst:.6g} exceeds 2*sqrt(p)")
    first = float(values.sum())
    second = float((values * values).sum())
    if abs(first - 1.0) > 1e-6 * p or abs(second - (p * p - p - 1)) > 1e-6 * p * p:
        raise NumericIntegrityError(
            f"table for p={p} ({method}): moment identities violated "
            f"(sum={first!r}, sum of squares={second!r})")
    angles = np.arccos(np.clip(values / bound, -1.0, 1.0))
    return KloostermanTable(p, values, angles, method, max_imag)


def _build_naive(p: int) -> KloostermanTable:
    n = np.arange(1, p, dtype=np.int64)
    ninv = _inverse_table(p)
    values = np.empty(p - 1, dtype=np.float64)
    max_imag = 0.0
    for lo in range(1, p, 256):  # chunk a to keep the (a, n) matrix small
        a = np.arange(lo, min(lo + 256, p), dtype=np.int64)
        expo = (n[None, :] + a[:, None] * ninv[None, :]) % p
        K = np.exp(2j * np.pi / p * expo).sum(axis=1)
        max_imag = max(max_imag, float(np.abs(K.imag).max()))
        values[lo - 1: lo - 1 + len(a)] = K.real
    return _table_from_values(p, values, "naive", max_imag)


def _chirp_dft(x: np.ndarray) -> np.ndarray:
    """DFT of arbitrary length n by Bluestein's reduction to a linear
    convolution, evaluated with power-of-two FFTs only.

    The chirp exponent k^2 is reduced mod 2n in integer arithmetic before the
    angle is formed; without that, k^2*pi/n loses the low bits that carry the
    phase once k^2 overflows the 53-bit mantissa.
    """
    n = len(x)
    if n == 1:
        return x.astype(np.complex128)
    k = np.arange(n, dtype=np.int64)
    half_sq = (k * k) % (2 * n)
    w = np.exp(-1j * np.pi / n * half_sq)
    size = 1 << (2 * n - 1).bit_length()
    a = np.zeros(size, dtype=np.complex128)
    a[:n] = x * w
    b = np.zeros(size, dtype=np.complex128)
    b[:n] = w.conj()
    b[size - n + 1:] = w[1:][::-1].conj()
    conv = np.fft.ifft(np.fft.fft(a) * np.fft.fft(b))
    return w * conv[:n]


def _cyclic_self_convolution(f: np.ndarray) -> np.ndarray:
    """c[j] = sum_k f[k] * f[(j-k) mod n] via the convolution theorem."""
    F = _chirp_dft(f)
    # inverse DFT through the forward transform: idft(X) = conj(dft(conj(X)))/n
    return np.conj(_chirp_dft(np.conj(F * F))) / len(f)


def _build_convolution(p: int) -> KloostermanTable:
    if p == 2:
        return _build_naive(p)
    g = primitive_root(p)
    L = p - 1
    powers = np.empty(L, dtype=np.int64)
    acc = 1
    for k in range(L):
        powers[k] = acc
        acc = acc * g % p
    f = np.exp(2j * np.pi / p * powers)
    conv = _cyclic_self_convolution(f)
    max_imag = float(np.abs(conv.imag).max())
    values = np.empty(p - 1, dtype=np.float64)
    values[powers - 1] = conv.real  # K_{1, g^j} = conv[j]
    return _table_from_values(p, values, "convolution", max_imag)


def kloosterman_all(p: int, method: str = "convolution") -> KloostermanTable:
    """Build the full K_{1,a} table for a prime p.

    method "naive" is the quadratic double loop; "convolution" is the
    primitive-root cyclic convolution.  Both end in the same integrity checks
    (realness, Weil bound, first and second moments).
    """
    _require_prime(p)
    if p > MAX_TABLE_PRIME:
        raise ValueError(f"p = {p} exceeds the table cap {MAX_TABLE_PRIME}")
    if method == "naive":
        return _build_naive(p)
    if method == "convolution":
        return _build_convolution(p)
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# Angle cache files: "KLT1" | u64 p | u32 method | (p-1) f8 angles | u64 xor
# ---------------------------------------------------------------------------

def _xor_fold(body: bytes) -> int:
    words = np.frombuffer(body, dtype="<u8")
    return int(np.bitwise_xor.reduce(words)) if len(words) else 0


def save_table(table: KloostermanTable, path: str | os.PathLike) -> None:
    """Write the angle table atomically (temp file + rename)."""
    body = np.ascontiguousarray(table.angles, dtype="<f8").tobytes()
    blob = (CACHE_MAGIC
            + struct.pack("<QI", table.p, _METHOD_TAGS[table.method])
            + body
            + struct.pack("<Q", _xor_fold(body)))
    path = os.fspath(path)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path) or ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(blob)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_table(path: str | os.PathLike) -> KloostermanTable:
    """Read an angle cache file; values are reconstructed as 2*sqrt(p)*cos(psi).

    Raises CacheCorruptionError on any structural or checksum mismatch.
    """
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < 24 or blob[:4] != CACHE_MAGIC:
        raise CacheCorruptionError(f"{path}: bad magic or truncated header")
    p, tag = struct.unpack_from("<QI", blob, 4)
    if tag not in _TAG_METHODS:
        raise CacheCorruptionError(f"{path}: unknown method tag {tag}")
    body_len = (p - 1) * 8
    expected_len = 16 + body_len + 8
    if len(blob) != expected_len:
        raise CacheCorruptionError(f"{path}: length {len(blob)} != expected {expected_len}")
    body = blob[16:16 + body_len]
    (checksum,) = struct.unpack_from("<Q", blob, 16 + body_len)
    if _xor_fold(body) != checksum:
        raise CacheCorruptionError(f"{path}: checksum mismatch")
    angles = np.frombuffer(body, dtype="<f8").astype(np.float64)
    values = 2.0 * math.sqrt(p) * np.cos(angles)
    return KloostermanTable(int(p), values, angles, _TAG_METHODS[tag], 0.0)


class TableSource:
    """Hands out per-prime tables, built on demand and optionally disk-cached.

    Tables are not retained in memory: streaming consumers get one table per
    call and drop it when done.  Corrupt cache files are rebuilt in place.
    """

    def __init__(self, method: str = "convolution", cache_dir: str | os.PathLike | None = None):
        self.method = method
        self.cache_dir = os.fspath(cache_dir) if cache_dir is not None else None
        self.rebuilt: list[int] = []

    def path_for(self, p: int) -> str:
        assert self.cache_dir is not None
        return os.path.join(self.cache_dir, f"{p}.klt")

    def __call__(self, p: int) -> KloostermanTable:
        if self.cache_dir is None:
            return kloosterman_all(p, self.method)
        os.makedirs(self.cache_dir, exist_ok=True)
        path = self.path_for(p)
        if os.path.exists(path):
            try:
                return load_table(path)
            except CacheCorruptionError:
                self.rebuilt.append(p)
        table = kloosterman_all(p, self.method)
        save_table(table, path)
        return table


def resolve_table(tables, p: int) -> KloostermanTable:
    """Accept a TableSource, any callable, a mapping, or None (build on demand)."""
    if tables is None:
        return kloosterman_all(p)
    if callable(tables):
        return tables(p)
    return tables[p]
