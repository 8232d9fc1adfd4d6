"""Primitive representations n = a^2 + b^2 and the prime-square counts r1, r1*.

r0*(n) counts pairs (a >= 0, b > 0) with a^2 + b^2 = n and gcd(a, b) = 1;
it is multiplicative, supported exactly on N, where it equals 2^omega*(n).
r1(n) counts pairs (a, p) with a > 0, p prime, a^2 + p^2 = n, and r1*(n)
additionally requires gcd(a, p) = 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, isqrt

from .errors import InputError, InvariantError
from .primes import PrimeTable, factorize, primes_up_to


@dataclass(frozen=True)
class Representation:
    """One representation n = a^2 + b^2 with a >= 0, b > 0."""

    a: int
    b: int
    n: int

    def __post_init__(self) -> None:
        if self.a < 0 or self.b <= 0 or self.a * self.a + self.b * self.b != self.n:
            raise InputError(f"({self.a}, {self.b}) does not represent {self.n}")

    @property
    def is_primitive(self) -> bool:
        return gcd(self.a, self.b) == 1


def enumerate_primitive_reps(n: int) -> list[Representation]:
    """All primitive (a >= 0, b > 0) with a^2 + b^2 = n, ascending in a."""
    if n < 1:
        raise InputError(f"need n >= 1, got {n}")
    out = []
    a = 0
    while a * a < n:
        m = n - a * a
        b = isqrt(m)
        if b * b == m and gcd(a, b) == 1:
            out.append(Representation(a=a, b=b, n=n))
        a += 1
    return out


def r0_star(n: int) -> int:
    """Multiplicative count of primitive representations of n.

    Local factors: 1 at 2^1, 0 at 2^k for k >= 2, and 1 + (-1|p) at any
    odd prime power, so the value is 2^omega*(n) on N and 0 off N.
    """
    if n < 1:
        raise InputError(f"need n >= 1, got {n}")
    result = 1
    for p, e in factorize(n).items():
        if p == 2:
            if e >= 2:
                return 0
        elif p % 4 == 1:
            result *= 2
        else:
            return 0
    return result


def compose(rep_m: Representation, rep_n: Representation) -> tuple[Representation, Representation]:
    """Compose primitive representations of coprime m, n into two of m*n.

    With m = a^2 + b^2 and n = c^2 + d^2 (all of a, b, c, d > 0), the
    products are (ac+bd) + i|ad-bc| and |ac-bd| + i(ad+bc).  Ranging over
    all representations of both factors hits every primitive
    representation of m*n exactly twice.
    """
    if gcd(rep_m.n, rep_n.n) != 1:
        raise InputError(f"moduli {rep_m.n} and {rep_n.n} are not coprime")
    if rep_m.a <= 0 or rep_n.a <= 0:
        raise InputError("composition requires a, b, c, d > 0")
    if not (rep_m.is_primitive and rep_n.is_primitive):
        raise InputError("composition requires primitive representations")
    a, b = rep_m.a, rep_m.b
    c, d = rep_n.a, rep_n.b
    mn = rep_m.n * rep_n.n
    cross = abs(a * d - b * c)
    if cross == 0:
        raise InvariantError(
            f"degenerate composition of ({a},{b}) and ({c},{d}): |ad-bc| = 0"
        )
    first = Representation(a=a * c + b * d, b=cross, n=mn)
    second = Representation(a=abs(a * c - b * d), b=a * d + b * c, n=mn)
    return first, second


def r1_of(n: int, base: PrimeTable | None = None) -> tuple[int, int]:
    """Brute-force (r1(n), r1*(n)) by scanning primes p with p^2 < n.

    This is the per-n oracle the segmented pair sieve is checked against;
    it shares nothing with the sieve beyond the prime table.
    """
    if n < 2:
        raise InputError(f"need n >= 2, got {n}")
    if base is None or base.limit * base.limit < n:
        base = primes_up_to(max(isqrt(n - 1), 2))
    r1 = r1_star = 0
    for p in base.primes:
        p = int(p)
        pp = p * p
        if pp >= n:
            break
        m = n - pp
        a = isqrt(m)
        if a * a == m:
            r1 += 1
            if a % p != 0:
                r1_star += 1
    return r1, r1_star


def _r0(n: int) -> int:
    """Count of all (x >= 0, y > 0) with x^2 + y^2 = n; internal bound check."""
    count = 0
    x = 0
    while x * x < n:
        m = n - x * x
        y = isqrt(m)
        if y * y == m:
            count += 1
        x += 1
    return count
