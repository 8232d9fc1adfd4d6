"""Prime generation, 64-bit primality, and per-segment factorization data.

Everything downstream sieves against a shared ``PrimeTable``.  A
``FactorizationSegment`` carries, for every n in [lo, hi), the number of
distinct odd prime divisors omega*(n) and membership in the set N of
integers with 4 not dividing n and no prime factor congruent to 3 mod 4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import isqrt

import numpy as np

from .errors import InputError

# Memory guard for a single sieve allocation; overridable per call.
DEFAULT_LIMIT_GUARD = 2**40

# Default cap on a single factorization segment (elements).
DEFAULT_SEGMENT_SPAN = 2**26

# Witnesses making Miller-Rabin deterministic for all n < 3.3 * 10^24,
# which covers the full 64-bit range.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


@dataclass(frozen=True, eq=False)
class PrimeTable:
    """Immutable ascending table of all primes <= limit."""

    limit: int
    primes: np.ndarray  # int64, ascending

    def __len__(self) -> int:
        return len(self.primes)

    def covers_factoring_of(self, hi: int) -> bool:
        """True if the table suffices to factor every n < hi."""
        return self.limit * self.limit >= hi


def primes_up_to(limit: int, limit_guard: int = DEFAULT_LIMIT_GUARD) -> PrimeTable:
    """Sieve of Eratosthenes returning all primes <= limit.

    Raises InputError for limit < 2 or above the memory guard.
    """
    if limit < 2:
        raise InputError(f"sieve limit must be >= 2, got {limit}")
    if limit > limit_guard:
        raise InputError(f"sieve limit {limit} exceeds guard {limit_guard}")
    is_p = np.ones(limit + 1, dtype=bool)
    is_p[:2] = False
    for p in range(2, isqrt(limit) + 1):
        if is_p[p]:
            is_p[p * p :: p] = False
    return PrimeTable(limit=limit, primes=np.flatnonzero(is_p).astype(np.int64))


def is_prime(n: int) -> bool:
    """Deterministic strong-pseudoprime test, exact for all 64-bit n."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = (x * x) % n
            if x == n - 1:
                break
        else:
            return False
    return True


def factorize(n: int) -> dict[int, int]:
    """Prime factorization {p: exponent} by trial division."""
    if n < 1:
        raise InputError(f"factorize requires n >= 1, got {n}")
    out: dict[int, int] = {}
    m = n
    for p in (2, 3):
        while m % p == 0:
            out[p] = out.get(p, 0) + 1
            m //= p
    d = 5
    step = 2
    while d * d <= m:
        while m % d == 0:
            out[d] = out.get(d, 0) + 1
            m //= d
        d += step
        step = 6 - step  # alternate 5,7,11,13,... (6k +- 1)
    if m > 1:
        out[m] = out.get(m, 0) + 1
    return out


def omega_star(n: int) -> int:
    """Number of *distinct* odd prime divisors of n (multiplicity ignored)."""
    if n < 1:
        raise InputError(f"omega_star requires n >= 1, got {n}")
    return sum(1 for p in factorize(n) if p != 2)


@dataclass(frozen=True, eq=False)
class FactorizationSegment:
    """omega*(n) and N-membership for every n in [lo, hi)."""

    lo: int
    hi: int
    omega: np.ndarray  # uint8
    in_n: np.ndarray  # bool

    def omega_star_of(self, n: int) -> int:
        if not self.lo <= n < self.hi:
            raise InputError(f"n={n} outside segment [{self.lo}, {self.hi})")
        return int(self.omega[n - self.lo])

    def in_N_of(self, n: int) -> bool:
        if not self.lo <= n < self.hi:
            raise InputError(f"n={n} outside segment [{self.lo}, {self.hi})")
        return bool(self.in_n[n - self.lo])


def factorize_segment(
    lo: int,
    hi: int,
    base: PrimeTable,
    max_span: int = DEFAULT_SEGMENT_SPAN,
) -> FactorizationSegment:
    """Compute omega* and N-membership for all n in [lo, hi).

    Strategy: one strided pass per base prime p counts the odd primes and
    clears N-membership for p = 3 mod 4; passes over prime powers p^e
    accumulate the p-smooth part of each n, so the (at most one) prime
    factor exceeding sqrt(hi-1) is recovered as n divided by that product.

    Requires base.limit^2 >= hi so the leftover cofactor is prime.
    """
    if not 0 <= lo < hi:
        raise InputError(f"need 0 <= lo < hi, got [{lo}, {hi})")
    if hi - lo > max_span:
        raise InputError(f"segment span {hi - lo} exceeds cap {max_span}")
    if not base.covers_factoring_of(hi):
        raise InputError(
            f"prime table limit {base.limit} insufficient for hi={hi} "
            f"(need limit^2 >= hi)"
        )
    n_vals = np.arange(lo, hi, dtype=np.int64)
    size = hi - lo
    omega = np.zeros(size, dtype=np.uint8)
    in_n = (n_vals & 3) != 0  # 4 | n excluded from N
    smooth = np.ones(size, dtype=np.int64)
    top = hi - 1
    sq_limit = isqrt(top)
    for p in base.primes:
        p = int(p)
        if p > sq_limit:
            break
        first = ((lo + p - 1) // p) * p
        sl = slice(first - lo, None, p)
        if p > 2:
            omega[sl] += 1
            if p & 3 == 3:
                in_n[sl] = False
        pe = p
        while pe <= top:
            st = ((lo + pe - 1) // pe) * pe
            smooth[st - lo :: pe] *= p
            pe *= p
    # n in {0, 1} have no prime factors; 0 is a multiple of everything.
    for v in range(lo, min(2, hi)):
        smooth[v - lo] = v
        omega[v - lo] = 0
        in_n[v - lo] = v == 1
    left = smooth != n_vals
    if left.any():
        q = n_vals[left] // smooth[left]
        omega[left] += 1  # leftover prime > sqrt(hi-1) is odd
        idx = np.flatnonzero(left)[(q & 3) == 3]
        in_n[idx] = False
    return FactorizationSegment(lo=lo, hi=hi, omega=omega, in_n=in_n)
