"""Quadratic-form congruence data for quadruples (g, h, r, s) and its
brute-force verifiers.

From u1 + i v1 = (r+is)(g-ih) and u2 + i v2 = (r+is)(g+ih) one gets

    Delta = u1 v2 - u2 v1 = 2 g h (r^2 + s^2)
    xi    = u1 u2 + v1 v2 = (r^2 + s^2)(g^2 - h^2)
    F(x, y) = m x^2 - 2 xi x y + m y^2,   m = (r^2+s^2)(g^2+h^2)

and a residue ell mod Delta such that a = (p v2 - q v1)/Delta and
b = (q u1 - p u2)/Delta are integers exactly when q = ell p (mod Delta).
ell is assembled by CRT from three congruences over the pairwise coprime
moduli r^2+s^2, h*(2,h), g*(2,g), whose product must equal Delta; this
forces exactly one of g, h (and of r, s) to be even.

Everything here is exact integer arithmetic; the verifiers enumerate the
full residue space, which is the point.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

import numpy as np

from .errors import InputError
from .primes import factorize

_ELL_BRUTE_MAX_DELTA = 10**5


@dataclass(frozen=True)
class SieveContext:
    g: int
    h: int
    r: int
    s: int
    u1: int
    v1: int
    u2: int
    v2: int
    m: int
    delta: int
    xi: int
    ell: int

    def quadratic_form(self, x: int, y: int) -> int:
        """F(x, y) = m x^2 - 2 xi x y + m y^2 of discriminant -4 Delta^2."""
        return self.m * x * x - 2 * self.xi * x * y + self.m * y * y


def _crt(pairs: list[tuple[int, int]]) -> int:
    """Solve x = a_i (mod n_i) for pairwise coprime n_i."""
    x, n = 0, 1
    for a, ni in pairs:
        if ni == 1:
            continue
        inv = pow(n % ni, -1, ni)
        x = x + n * ((a - x) * inv % ni)
        n *= ni
    return x % n if n > 1 else 0


def build_context(g: int, h: int, r: int, s: int) -> SieveContext:
    """Derive the full congruence context, validating admissibility.

    Requirements: all positive; gcd(g^2+h^2, r^2+s^2) = 1; gcd(r, s) = 1;
    and the moduli r^2+s^2, h*(2,h), g*(2,g) pairwise coprime with product
    Delta = 2 g h (r^2+s^2).
    """
    if min(g, h, r, s) < 1:
        raise InputError("g, h, r, s must be positive")
    m1 = r * r + s * s
    gh2 = g * g + h * h
    if gcd(gh2, m1) != 1:
        raise InputError(f"g^2+h^2 = {gh2} and r^2+s^2 = {m1} are not coprime")
    if gcd(r, s) != 1:
        raise InputError(f"gcd(r, s) = {gcd(r, s)} != 1")
    u1, v1 = r * g + s * h, s * g - r * h
    u2, v2 = r * g - s * h, s * g + r * h
    delta = u1 * v2 - u2 * v1
    xi = u1 * u2 + v1 * v2
    m = m1 * gh2
    m2 = h * gcd(2, h)
    m3 = g * gcd(2, g)
    for name, (a, b) in {
        "(r^2+s^2, h(2,h))": (m1, m2),
        "(r^2+s^2, g(2,g))": (m1, m3),
        "(h(2,h), g(2,g))": (m2, m3),
    }.items():
        if gcd(a, b) != 1:
            raise InputError(f"moduli {name} share a factor: gcd = {gcd(a, b)}")
    if m1 * m2 * m3 != delta:
        raise InputError(
            f"moduli product {m1 * m2 * m3} != Delta = {delta}; "
            "exactly one of g, h must be even"
        )
    # i with s = i r mod (r^2+s^2)^2, reduced mod m1 (the congruence below
    # only sees i mod m1, so the choice of lift cannot change ell).
    try:
        i = (s * pow(r, -1, m1 * m1)) % (m1 * m1)
        lhs = (g * i - h) % m1
        ell1 = ((h + i * g) * pow(lhs, -1, m1)) % m1
    except ValueError as exc:
        raise InputError(f"unsolvable modular inverse mod {m1}: {exc}") from exc
    ell = _crt([(ell1, m1), (1, m2), (-1 % m3 if m3 > 1 else 0, m3)])
    ctx = SieveContext(
        g=g, h=h, r=r, s=s, u1=u1, v1=v1, u2=u2, v2=v2,
        m=m, delta=delta, xi=xi, ell=ell,
    )
    assert delta == 2 * g * h * m1
    assert xi == m1 * (g * g - h * h)
    assert 4 * xi * xi - 4 * m * m == -4 * delta * delta
    assert ctx.quadratic_form(1, ell) % (delta * delta) == 0
    return ctx


def verify_ell_bruteforce(ctx: SieveContext) -> bool:
    """Exhaustively check, for all p coprime to Delta and all q mod Delta,
    that a and b are integers iff q = ell p (mod Delta)."""
    d = ctx.delta
    if d > _ELL_BRUTE_MAX_DELTA:
        raise InputError(f"Delta = {d} too large for exhaustive check")
    q = np.arange(d, dtype=np.int64)
    qv1 = (q * ctx.v1) % d
    qu1 = (q * ctx.u1) % d
    for p in range(1, d):
        if gcd(p, d) != 1:
            continue
        integral = (qv1 == (p * ctx.v2) % d) & ((p * ctx.u2) % d == qu1)
        expected = q == (ctx.ell * p) % d
        if not np.array_equal(integral, expected):
            return False
    return True


def nu(d: int, ctx: SieveContext) -> int:
    """Multiplicative root count: over primes p | d, the factor is
    1 + (-4|p) if p does not divide m, 1 if p | r^2+s^2, 0 if p | g^2+h^2."""
    if d < 1:
        raise InputError(f"nu requires d >= 1, got {d}")
    fac = factorize(d)
    if any(e > 1 for e in fac.values()):
        raise InputError(f"d = {d} is not squarefree")
    result = 1
    m1 = ctx.r * ctx.r + ctx.s * ctx.s
    for p in fac:
        if ctx.m % p == 0:
            if m1 % p == 0:
                factor = 1
            else:
                factor = 0  # p | g^2 + h^2
        elif p == 2:
            factor = 1  # Kronecker (-4|2) = 0
        elif p % 4 == 1:
            factor = 2
        else:
            factor = 0
        result *= factor
    return result


def verify_nu_bruteforce(d: int, ctx: SieveContext) -> bool:
    """Count lambda mod d*Delta with lambda = ell (mod Delta),
    gcd(lambda, d) = 1 and d Delta^2 | F(1, lambda); compare against nu.

    Accepts any squarefree d (primes suffice for the lemma; composites
    exercise multiplicativity against the raw definition).
    """
    if d * ctx.delta > 10**6:
        raise InputError(f"d * Delta = {d * ctx.delta} too large for brute force")
    fac = factorize(d)
    if any(e > 1 for e in fac.values()):
        raise InputError(f"d = {d} is not squarefree")
    dd = ctx.delta * ctx.delta
    count = 0
    for j in range(d):
        lam = ctx.ell + j * ctx.delta
        if gcd(lam, d) != 1:
            continue
        if ctx.quadratic_form(1, lam) % (d * dd) == 0:
            count += 1
    return count == nu(d, ctx)


def random_context(
    rng, coord_max: int = 40, delta_max: int | None = None, tries: int = 10**5
) -> SieveContext:
    """Sample an admissible context with coordinates <= coord_max."""
    for _ in range(tries):
        g, h, r, s = (rng.randrange(1, coord_max + 1) for _ in range(4))
        try:
            ctx = build_context(g, h, r, s)
        except InputError:
            continue
        if delta_max is not None and ctx.delta > delta_max:
            continue
        return ctx
    raise InputError(f"no admissible quadruple found in {tries} tries")
