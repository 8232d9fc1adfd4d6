"""Constants and periodic functions behind the predicted secondary terms.

The multiplication table constant delta = 1 - (1 + loglog 2)/log 2 and
tau = log(1/log 2)/log 2 are closed forms.  kappa = c_lambda *
sqrt((2*lambda)^3 / pi) is recomputed from the Euler product every time,
never hardcoded; reports carry the prime limit used.

The oscillatory amplitudes are bilateral sums over y = 2^m * beta with
beta = 2^(1 - frac(t)), invariant under beta -> 2*beta:

    f_R(beta)    = sum_m y^R e^-y
    psi_r(t)     = (kappa / r!) sum_m y^(r-1-tau) e^-y          (r >= 2)
    psi*_0(t)    = kappa sum_m y^(-1-tau) (e^-y - 1 + y)
    psi*_1(t)    = kappa sum_m y^(-tau)   (1 - e^-y)
    psi*_2(t)    = kappa sum_m y^(-1-tau) (1 - (1+y) e^-y)

Tails are truncated once the next term drops below tol times the running
sum; the +m side decays doubly exponentially and the -m side geometrically,
and analytic bounds for both cut tails are logged at DEBUG level.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from math import lgamma, log2

import numpy as np

from .errors import InputError, InvariantError
from .primes import primes_up_to

logger = logging.getLogger(__name__)

LOG2 = math.log(2.0)
DELTA = 1.0 - (1.0 + math.log(LOG2)) / LOG2
TAU = math.log(1.0 / LOG2) / LOG2
LAMBDA = 1.0 / LOG2

DEFAULT_PRIME_LIMIT = 10**6

# Below this y the alternating series replace expm1 forms: the direct
# expressions lose all precision to cancellation (error ~ eps * y^-tau).
_SMALL_Y = 1.0 / 16.0


@dataclass(frozen=True)
class Constants:
    """Computed constants; kappa derives from the Euler product at lam."""

    delta: float
    tau: float
    lam: float
    c_lambda: float
    kappa: float
    prime_limit_used: int


def euler_product_c_kappa(kappa_param: float, prime_limit: int) -> float:
    """Evaluate c_kappa over primes <= prime_limit.

    c_kappa = 3 / (2^(kappa+2) Gamma(kappa+1))
              * prod_{p = 1 mod 4} (1 + 2 kappa/(p-1)) (1 - 1/p)^kappa
              * prod_{p = 3 mod 4} (1 - 1/p)^kappa

    The two residue classes only converge jointly, so both run to the same
    cutoff; accumulation is in log space with compensated summation.
    """
    if not 0.0 <= kappa_param <= 4.0:
        raise InputError(f"kappa must be in [0, 4], got {kappa_param}")
    if prime_limit < 10**3:
        raise InputError(f"prime_limit must be >= 1000, got {prime_limit}")
    odd = primes_up_to(prime_limit).primes
    odd = odd[odd > 2]
    ps = odd.astype(np.float64)
    terms = kappa_param * np.log1p(-1.0 / ps)
    mask1 = (odd & 3) == 1
    terms[mask1] += np.log1p(2.0 * kappa_param / (ps[mask1] - 1.0))
    log_product = math.fsum(terms.tolist())
    front = 3.0 / (2.0 ** (kappa_param + 2.0) * math.gamma(kappa_param + 1.0))
    return front * math.exp(log_product)


def compute_constants(prime_limit: int = 10**7) -> Constants:
    """Populate every constant; kappa uses the Euler product at kappa = lam."""
    if prime_limit < 10**3:
        raise InputError(f"prime_limit must be >= 1000, got {prime_limit}")
    c_lambda = euler_product_c_kappa(LAMBDA, prime_limit)
    kappa = c_lambda * math.sqrt((2.0 * LAMBDA) ** 3 / math.pi)
    return Constants(
        delta=DELTA,
        tau=TAU,
        lam=LAMBDA,
        c_lambda=c_lambda,
        kappa=kappa,
        prime_limit_used=prime_limit,
    )


_DEFAULT_CONSTANTS: Constants | None = None


def default_constants() -> Constants:
    """Constants at the default prime limit, computed once per process."""
    global _DEFAULT_CONSTANTS
    if _DEFAULT_CONSTANTS is None:
        _DEFAULT_CONSTANTS = compute_constants(DEFAULT_PRIME_LIMIT)
    return _DEFAULT_CONSTANTS


def gamma_fn(s: float) -> float:
    """Gamma(s) for s > 0 (raises OverflowError past s ~ 171.6)."""
    if s <= 0:
        raise InputError(f"gamma_fn requires s > 0, got {s}")
    return math.gamma(s)


def _bilateral_log_sum(log_term, m_seed: int, tol: float) -> float:
    """log of sum_m exp(log_term(m)), seeded at the peak index.

    ``m_seed`` must be within one step of the maximizing m; the sequence
    is unimodal, so scanning outward in both directions and stopping when
    a term falls below tol times the running sum is safe.
    """
    lt_f = log_term(m_seed)
    lt_c = log_term(m_seed + 1)
    m0, lt0 = (m_seed, lt_f) if lt_f >= lt_c else (m_seed + 1, lt_c)
    acc = 1.0
    tails = [0.0, 0.0]
    for side, direction in enumerate((1, -1)):
        m = m0 + direction
        prev = 0.0
        while True:
            v = math.exp(min(log_term(m) - lt0, 0.0))
            acc += v
            if v < tol * acc:
                # geometric bound on the cut tail from the observed ratio
                q = v / prev if prev > 0 else 0.5
                tails[side] = v * q / (1.0 - q) if q < 1.0 else float("nan")
                break
            prev = v
            m += direction
    logger.debug(
        "bilateral sum: peak m=%d, tail bounds +m %.3e, -m %.3e (x sum)",
        m0, tails[0], tails[1],
    )
    return lt0 + math.log(acc)


def log_f_R(R: float, beta: float, tol: float = 1e-12) -> float:
    """log f_R(beta); usable far beyond the overflow range of f_R itself."""
    if R <= 0:
        raise InputError(f"f_R requires R > 0, got {R}")
    if beta <= 0:
        raise InputError(f"f_R requires beta > 0, got {beta}")
    if not 0.0 < tol <= 1e-6:
        raise InputError(f"tol must be in (0, 1e-6], got {tol}")

    def log_term(m: int) -> float:
        y = math.ldexp(beta, m)
        return R * math.log(y) - y

    m_seed = math.floor(log2(R / beta))  # peak of y^R e^-y is at y = R
    return _bilateral_log_sum(log_term, m_seed, tol)


def f_R(R: float, beta: float, tol: float = 1e-12) -> float:
    """Self-similar sum f_R(beta) = sum_m (2^m beta)^R exp(-2^m beta)."""
    return math.exp(log_f_R(R, beta, tol))


def psi_r(r: int, t: float, constants: Constants | None = None) -> float:
    """1-periodic amplitude psi_r(t) = (kappa / r!) f_{r-1-tau}(2^(1-frac t)).

    The defining series diverges for r < 2 (the exponent r-1-tau goes
    nonpositive), so r >= 2 is required.
    """
    if r < 2:
        raise InputError(f"psi_r requires r >= 2, got {r}")
    c = constants if constants is not None else default_constants()
    beta = 2.0 ** (1.0 - (t % 1.0))
    log_val = log_f_R(r - 1.0 - c.tau, beta) + math.log(c.kappa) - lgamma(r + 1.0)
    return math.exp(log_val)


def _g0(y: float) -> float:
    """e^-y - 1 + y, series below _SMALL_Y (coefficients (-1)^j / j!)."""
    if y < _SMALL_Y:
        return y * y * (
            1.0 / 2
            + y * (-1.0 / 6 + y * (1.0 / 24 + y * (-1.0 / 120 + y * (1.0 / 720 + y * (-1.0 / 5040 + y / 40320)))))
        )
    return math.expm1(-y) + y


def _g1(y: float) -> float:
    """1 - e^-y."""
    return -math.expm1(-y)


def _g2(y: float) -> float:
    """1 - (1+y) e^-y, series below _SMALL_Y (coefficients (-1)^j (j-1)/j!)."""
    if y < _SMALL_Y:
        return y * y * (
            1.0 / 2
            + y * (-1.0 / 3 + y * (1.0 / 8 + y * (-1.0 / 30 + y * (1.0 / 144 + y * (-1.0 / 840 + y / 5760)))))
        )
    return -math.expm1(-y) - y * math.exp(-y)


_STAR_FACTORS = {0: _g0, 1: _g1, 2: _g2}


def psi_star_term(variant: int, y: float) -> float:
    """One m-term of psi*_variant (without kappa) at y = 2^m beta."""
    g = _STAR_FACTORS[variant]
    exponent = -TAU if variant == 1 else -1.0 - TAU
    return y**exponent * g(y)


def psi_star(
    variant: int, t: float, constants: Constants | None = None, tol: float = 1e-13
) -> float:
    """psi*_0, psi*_1 or psi*_2 at t; all three are 1-periodic and positive."""
    if variant not in (0, 1, 2):
        raise InputError(f"variant must be 0, 1 or 2, got {variant}")
    c = constants if constants is not None else default_constants()
    beta = 2.0 ** (1.0 - (t % 1.0))
    total = psi_star_term(variant, beta)
    for direction in (1, -1):
        m = direction
        while True:
            v = psi_star_term(variant, math.ldexp(beta, m))
            total += v
            if v < tol * total:
                break
            m += direction
    return c.kappa * total


def heuristic_pmf(R: int, x, r: int) -> float:
    """Binomial model: each of R primitive representations is prime-second
    with probability 1/log sqrt(x), independently.

    ``x`` may be an arbitrary-precision int, so log x stays finite even for
    x far beyond float range.
    """
    if R < 0 or r < 0:
        raise InputError("R and r must be nonnegative")
    if r > R:
        raise InputError(f"r = {r} exceeds R = {R}")
    if x < 100:
        raise InputError(f"x must be >= 100, got {x}")
    q = 2.0 / math.log(x)  # 1 / log sqrt(x); math.log takes big ints
    return math.comb(R, r) * q**r * (1.0 - q) ** (R - r)


def loglog_params(x: float) -> tuple[float, int, float]:
    """(L, K, lambda) with L = loglog x and K = floor(lambda L).

    Asserts the defining property 2^K in (log(x)/2, log(x)].
    """
    if x <= math.e:
        raise InputError(f"loglog_params requires x > e, got {x}")
    logx = math.log(x)
    L = math.log(logx)
    K = math.floor(LAMBDA * L)
    if not (0.5 * logx < 2.0**K <= logx):
        raise InvariantError(
            f"2^K = {2.0 ** K} outside (log x / 2, log x] = ({logx / 2}, {logx}] at x = {x}"
        )
    return L, K, LAMBDA


def predict(
    kind: str,
    x: float,
    r: int,
    k: int | None = None,
    constants: Constants | None = None,
) -> float:
    """Heuristic size of N_r(x) ("N_r") or pi_N(x; k, r) ("pi_N_kr").

    N_r:      psi_r(loglog x / log 2) / sqrt(loglog x) * x / (log x)^(1+delta)
    pi_N_kr:  kappa x / ((log x)^(1+delta) sqrt(L)) *
              e^(-2^m alpha_K) (2^m alpha_K)^(r-1-tau) / r!,
              with alpha_K = 2^(K+1)/log x and m = k - K.
    """
    c = constants if constants is not None else default_constants()
    if x < math.exp(math.e):
        raise InputError(f"predict requires x >= e^e, got {x}")
    L, K, _ = loglog_params(x)
    logx = math.log(x)
    scale = x / (logx ** (1.0 + c.delta) * math.sqrt(L))
    if kind == "N_r":
        if r < 2:
            raise InputError(f"N_r prediction requires r >= 2, got {r}")
        return psi_r(r, L / LOG2, constants=c) * scale
    if kind == "pi_N_kr":
        if k is None:
            raise InputError("pi_N_kr prediction requires k")
        if r < 0:
            raise InputError(f"r must be >= 0, got {r}")
        alpha = 2.0 ** (k + 1) / logx  # = 2^(k-K) * alpha_K
        log_val = -alpha + (r - 1.0 - c.tau) * math.log(alpha) - lgamma(r + 1.0)
        return c.kappa * scale * math.exp(log_val)
    raise InputError(f"unknown prediction kind {kind!r}")


@dataclass(frozen=True)
class BetaPoint:
    """Both sides of the comparison at one beta."""

    beta: float
    lhs: float  # f_(r-1-tau)(beta)
    rhs: float  # f_(r-tau)(beta) / (r+1)

    @property
    def holds(self) -> bool:
        return self.lhs >= self.rhs


@dataclass(frozen=True)
class CrossoverReport:
    """Scan of f_(r-1-tau)(beta) >= f_(r-tau)(beta)/(r+1) over beta in (1, 2].

    The inequality holding everywhere corresponds to psi_r > psi_(r+1)
    everywhere, i.e. N_r(x) > N_(r+1)(x) along all large x.
    """

    r: int
    grid: tuple[BetaPoint, ...]
    special: dict[str, BetaPoint]
    verdict: str  # "holds-everywhere" | "fails-somewhere"
    witness_beta: float | None

    def all_points(self):
        yield from self.grid
        yield from self.special.values()


def reduce_to_octave(beta: float) -> float:
    """Multiply or divide by 2 until beta lands in (1, 2]."""
    if beta <= 0:
        raise InputError(f"beta must be positive, got {beta}")
    return 2.0 ** (1.0 - (1.0 - log2(beta)) % 1.0)


# Families of special beta values scanned alongside the grid.  The scaling
# factors 7/6 and 5/6 come from the x-families exp(6 * 2^m / (7 (r-tau)))
# and exp(6 * 2^m / (5 (r-tau))); 6/5 is kept as an extra reference point.
SPECIAL_BETA_FACTORS = {"7/6": 7.0 / 6.0, "5/6": 5.0 / 6.0, "6/5": 6.0 / 5.0}


def crossover_scan(
    r_min: int, r_max: int, grid_points: int = 256
) -> list[CrossoverReport]:
    """Scan r in [r_min, r_max] on a log-uniform beta grid plus specials."""
    if not 2 <= r_min <= r_max <= 100:
        raise InputError(f"need 2 <= r_min <= r_max <= 100, got [{r_min}, {r_max}]")
    if grid_points < 64:
        raise InputError(f"grid_points must be >= 64, got {grid_points}")
    out = []
    for r in range(r_min, r_max + 1):
        def point(beta: float) -> BetaPoint:
            lhs = math.exp(log_f_R(r - 1.0 - TAU, beta))
            rhs = math.exp(log_f_R(r - TAU, beta)) / (r + 1.0)
            if not (lhs > 0.0 and rhs > 0.0):
                raise InvariantError(f"nonpositive side at r={r}, beta={beta}")
            return BetaPoint(beta=beta, lhs=lhs, rhs=rhs)

        grid = tuple(
            point(2.0 ** (j / grid_points)) for j in range(1, grid_points + 1)
        )
        special = {
            name: point(reduce_to_octave(factor * (r - TAU)))
            for name, factor in SPECIAL_BETA_FACTORS.items()
        }
        witness = next(
            (p.beta for p in list(grid) + list(special.values()) if not p.holds), None
        )
        out.append(
            CrossoverReport(
                r=r,
                grid=grid,
                special=special,
                verdict="holds-everywhere" if witness is None else "fails-somewhere",
                witness_beta=witness,
            )
        )
    return out
