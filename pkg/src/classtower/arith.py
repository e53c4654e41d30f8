"""Integer primitives: primality, sieving, Kronecker symbols and radicand profiles."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "kronecker",
    "is_prime",
    "prime_sieve",
    "primes_up_to",
    "smallest_prime_factors",
    "factorize",
    "factorize_spf",
    "RadicandProfile",
    "Rejection",
    "RadicandRejected",
    "profile_radicand",
    "profile_from_factors",
]

# Deterministic for every n < 3.3e24, which covers the full 64-bit range.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_MR_LIMIT = 3317044064679887385961981


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n).

    >>> kronecker(17, 5), kronecker(5, 11), kronecker(3, 1)
    (-1, 1, 1)
    """
    if n == 0:
        raise ValueError("kronecker symbol undefined for n = 0")
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    v = (n & -n).bit_length() - 1
    if v:
        if a % 2 == 0:
            return 0
        if v & 1 and a % 8 in (3, 5):
            result = -result
        n >>= v
    # n is now odd and positive: Jacobi symbol by quadratic reciprocity
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    if n >= _MR_LIMIT:
        raise ValueError(f"{n} exceeds the deterministic Miller-Rabin range")
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@lru_cache(maxsize=8)
def prime_sieve(limit: int) -> np.ndarray:
    """Boolean array ``s`` with ``s[k]`` true iff k is prime, for 0 <= k <= limit."""
    sieve = np.ones(max(limit + 1, 2), dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    sieve.flags.writeable = False
    return sieve


def primes_up_to(limit: int) -> np.ndarray:
    return np.flatnonzero(prime_sieve(limit))


@lru_cache(maxsize=4)
def smallest_prime_factors(limit: int) -> np.ndarray:
    """Smallest prime factor of every k <= limit (0 and 1 map to themselves)."""
    spf = np.zeros(limit + 1, dtype=np.int64)
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p] == 0:
            block = spf[p * p :: p]
            block[block == 0] = p
    unset = np.flatnonzero(spf == 0)
    spf[unset] = unset
    spf.flags.writeable = False
    return spf


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorization by trial division with sieved primes up to sqrt(n)."""
    if n < 1:
        raise ValueError("factorize expects a positive integer")
    factors = []
    for p in primes_up_to(math.isqrt(n)).tolist():
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            factors.append((p, e))
    if n > 1:
        factors.append((n, 1))
    return factors


def factorize_spf(n: int, spf) -> list[tuple[int, int]]:
    """Factor n with a precomputed smallest-prime-factor table (a list or array)."""
    factors = []
    while n > 1:
        p = int(spf[n])
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        factors.append((p, e))
    return factors


class Rejection(str, enum.Enum):
    NOT_SQUAREFREE = "not-squarefree"
    WRONG_FACTOR_COUNT = "wrong-factor-count"
    NO_CONGRUENCE_ASSIGNMENT = "no-congruence-assignment"
    LEGENDRE_P1_P2 = "legendre-p1-p2"
    LEGENDRE_P1_Q = "legendre-p1-q"


class RadicandRejected(ValueError):
    def __init__(self, d: int, reason: Rejection):
        super().__init__(f"radicand {d} rejected: {reason.value}")
        self.d = d
        self.reason = reason


@dataclass(frozen=True)
class RadicandProfile:
    """A radicand d = p1*p2*q with p1 = 1 (mod 8), p2 = 5 (mod 8), q = 3 (mod 4)."""

    d: int
    p1: int
    p2: int
    q: int
    legendre_p1_p2: int
    legendre_p1_q: int
    legendre_p2_q: int


def profile_from_factors(d: int, factors: list[tuple[int, int]]) -> RadicandProfile | Rejection:
    """Check the admission conditions given the factorization of d.

    Returns the profile, or the first failed condition. The survey calls this
    directly to avoid raising for the ~99.4% of integers that are rejected.
    """
    if any(e > 1 for _, e in factors):
        return Rejection.NOT_SQUAREFREE
    if len(factors) != 3:
        return Rejection.WRONG_FACTOR_COUNT
    by_class: dict[str, int] = {}
    for p, _ in factors:
        if p % 8 == 1:
            key = "p1"
        elif p % 8 == 5:
            key = "p2"
        elif p % 4 == 3:
            key = "q"
        else:
            return Rejection.NO_CONGRUENCE_ASSIGNMENT
        if key in by_class:
            return Rejection.NO_CONGRUENCE_ASSIGNMENT
        by_class[key] = p
    p1, p2, q = by_class["p1"], by_class["p2"], by_class["q"]
    l12 = kronecker(p1, p2)
    if l12 != -1:
        return Rejection.LEGENDRE_P1_P2
    l1q = kronecker(p1, q)
    if l1q != -1:
        return Rejection.LEGENDRE_P1_Q
    return RadicandProfile(d, p1, p2, q, l12, l1q, kronecker(p2, q))


def profile_radicand(d: int) -> RadicandProfile:
    """Factor and validate a radicand; raises RadicandRejected with the reason."""
    if d <= 0:
        raise ValueError("radicand must be positive")
    result = profile_from_factors(d, factorize(d))
    if isinstance(result, Rejection):
        raise RadicandRejected(d, result)
    return result
