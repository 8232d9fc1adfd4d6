"""Headline quantities from tally data and comparisons with predictions.

Asymptotic statements with unspecified constants are never asserted as
fixed numbers here; callers compare empirical/predicted ratios across a
ladder of x values and test boundedness or monotone trends.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from math import isqrt

import numpy as np

from .errors import CapabilityError, InputError
from .heuristics import euler_product_c_kappa
from .primes import PrimeTable, factorize, factorize_segment, primes_up_to
from .sieve import DEFAULT_SEGMENT_SIZE, TallyReport

LOG4_MINUS_1 = math.log(4.0) - 1.0

_ANGLE_SLACK = 1e-12


@dataclass(frozen=True)
class AsymptoticComparison:
    """One empirical-vs-predicted row; ratio = empirical/predicted."""

    x: float
    empirical: float
    predicted: float
    ratio: float
    note: str


def _comparison(x: float, empirical: float, predicted: float, note: str) -> AsymptoticComparison:
    ratio = empirical / predicted if predicted != 0 else 0.0
    return AsymptoticComparison(
        x=x, empirical=empirical, predicted=predicted, ratio=ratio, note=note
    )


def n_r_table(report: TallyReport) -> dict[int, int]:
    """N_r(x) for every r >= 1 with a nonzero count.

    Joint cells cover n in N; integers outside N with representations are
    carried in the report's side histogram and folded in here.
    """
    table: dict[int, int] = {}
    for (_, r), c in report.joint.items():
        if r >= 1:
            table[r] = table.get(r, 0) + c
    for r, c in report.non_n.items():
        table[r] = table.get(r, 0) + c
    return dict(sorted(table.items()))


def count_representable(report: TallyReport) -> int:
    """N_0(x): integers up to x with at least one representation a^2 + p^2."""
    return sum(n_r_table(report).values())


def stratified_moment2(report: TallyReport) -> dict[int, int]:
    """Per-k sums of C(r1(n), 2) over n in N with omega*(n) = k."""
    if not report.joint:
        raise CapabilityError("report carries no joint (k, r) histogram")
    out: dict[int, int] = {}
    for (k, r), c in report.joint.items():
        if r >= 2:
            out[k] = out.get(k, 0) + (r * (r - 1) // 2) * c
    return dict(sorted(out.items()))


def pi_N_histogram(
    x: int,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    base: PrimeTable | None = None,
) -> dict[int, int]:
    """Exact counts {k: pi_N(x; k)} over n in [1, x] by segmented sweep."""
    if x < 2:
        raise InputError(f"pi_N_histogram requires x >= 2, got {x}")
    if base is None:
        base = primes_up_to(max(isqrt(x) + 1, 2))
    counts = np.zeros(0, dtype=np.int64)
    for lo in range(1, x + 1, segment_size):
        hi = min(lo + segment_size, x + 1)
        fs = factorize_segment(lo, hi, base, max_span=segment_size)
        seg = np.bincount(fs.omega[fs.in_n])
        if len(seg) > len(counts):
            seg[: len(counts)] += counts
            counts = seg
        else:
            counts[: len(seg)] += seg
    return {int(k): int(counts[k]) for k in np.flatnonzero(counts)}


def compare_pi_N(
    x: int,
    k: int,
    prime_limit: int = 10**6,
    histogram: dict[int, int] | None = None,
) -> AsymptoticComparison:
    """pi_N(x; k) against c_kappa * x/log x * (L/2)^(k-1)/(k-1)!.

    kappa = (k-1)/loglog x.  When kappa leaves the Euler-product domain
    (k far above loglog x) the Poisson factor is already astronomically
    small, so the prediction is reported as 0.
    """
    if k < 1:
        raise InputError(f"compare_pi_N requires k >= 1, got {k}")
    L = math.log(math.log(x))
    kappa = (k - 1) / L
    if kappa <= 4.0:
        c = euler_product_c_kappa(kappa, prime_limit)
        predicted = (
            c * (x / math.log(x)) * (0.5 * L) ** (k - 1) / math.factorial(k - 1)
        )
    else:
        predicted = 0.0
    hist = histogram if histogram is not None else pi_N_histogram(x)
    empirical = float(hist.get(k, 0))
    return _comparison(
        x, empirical, predicted, f"pi_N(x;{k}) vs Selberg-style main term"
    )


def daniel_ratio(report: TallyReport) -> AsymptoticComparison:
    """Second-moment sum against its main term (9/8) x / log x."""
    if report.x < 10**3:
        raise InputError(f"daniel_ratio requires x >= 1000, got {report.x}")
    predicted = 1.125 * report.x / math.log(report.x)
    return _comparison(
        report.x, float(report.moment2), predicted, "sum C(r1,2) vs (9/8) x/log x"
    )


def gcd_defect_check(report: TallyReport) -> AsymptoticComparison:
    """Count of pairs with p | a against the sqrt(x) loglog x envelope."""
    if report.x < 100:
        raise InputError(f"gcd_defect_check requires x >= 100, got {report.x}")
    predicted = math.sqrt(report.x) * math.log(math.log(report.x))
    return _comparison(
        report.x,
        float(report.gcd_defect),
        predicted,
        "sum (r1 - r1*) vs sqrt(x) loglog x",
    )


def _angle_at_least(r: np.ndarray, s: np.ndarray, theta: float) -> np.ndarray:
    """arg(r+is) >= theta, exact when theta is a multiple of pi/4.

    Points are restricted to the closed first quadrant, so only the
    multiples 0, pi/4, pi/2 need exact handling; other endpoints fall back
    to atan2 with documented 1e-12 slack.
    """
    quarter = theta / (math.pi / 4.0)
    q = round(quarter)
    if abs(quarter - q) < 1e-9 and 0 <= q <= 2:
        if q == 0:
            return np.ones(len(r), dtype=bool)
        if q == 1:
            return s >= r
        return r <= 0
    return np.arctan2(s, r) >= theta - _ANGLE_SLACK


def keysums_count(m: int, k: int, interval: tuple[float, float], R: float) -> int:
    """Count Gaussian integers r+is with arg in [lo, hi), r^2+s^2 in
    [2R^2, 4R^2], omega*(r^2+s^2) = k, and gcd(r^2+s^2, 2m) = 1.

    Direct enumeration of the first-quadrant annulus; n-level conditions
    come from a factorization sweep of the n-range.
    """
    lo_angle, hi_angle = interval
    if not lo_angle < hi_angle:
        raise InputError(f"empty angle interval [{lo_angle}, {hi_angle})")
    if not (0.0 <= lo_angle and hi_angle <= math.pi / 2 + 1e-9):
        raise InputError("interval must lie within [0, pi/2]")
    if m < 1 or k < 1:
        raise InputError("m and k must be positive")
    if not 0 < R <= 10**4:
        raise InputError(f"R must be in (0, 1e4], got {R}")
    n_lo = math.ceil(2 * R * R)
    n_hi = math.floor(4 * R * R)
    if n_hi < 2:
        return 0
    n_lo = max(n_lo, 2)
    base = primes_up_to(max(isqrt(n_hi) + 1, 2))
    odd_m_primes = [p for p in factorize(m) if p != 2]
    total = 0
    chunk = DEFAULT_SEGMENT_SIZE
    for clo in range(n_lo, n_hi + 1, chunk):
        chi = min(clo + chunk, n_hi + 1)
        fs = factorize_segment(clo, chi, base, max_span=chunk)
        n_vals = np.arange(clo, chi, dtype=np.int64)
        good = (fs.omega == k) & ((n_vals & 1) == 1)
        for p in odd_m_primes:
            first = ((clo + p - 1) // p) * p
            good[first - clo :: p] = False
        if not good.any():
            continue
        r_hi = isqrt(chi - 1)
        for r in range(0, r_hi + 1):
            rr = r * r
            s_max_sq = chi - 1 - rr
            if s_max_sq < 0:
                continue
            s_max = isqrt(s_max_sq)
            t = clo - rr
            s_min = 0 if t <= 0 else isqrt(t - 1) + 1
            if s_min > s_max:
                continue
            s = np.arange(s_min, s_max + 1, dtype=np.int64)
            ok = good[rr + s * s - clo]
            if not ok.any():
                continue
            s_ok = s[ok]
            r_arr = np.full(len(s_ok), r, dtype=np.int64)
            in_sector = _angle_at_least(r_arr, s_ok, lo_angle) & ~_angle_at_least(
                r_arr, s_ok, hi_angle
            )
            total += int(in_sector.sum())
    return total


def main_contrib_fraction(report: TallyReport, C: float, epsilon: float) -> float:
    """Share of the second moment from cells near k = 2L with
    r in the (log x)^(log4 - 1 +- epsilon) window."""
    if not report.joint:
        raise CapabilityError("report carries no joint (k, r) histogram")
    if report.moment2 == 0:
        return 0.0
    logx = math.log(report.x)
    L = math.log(logx)
    k_center = 2.0 * L
    k_width = C * math.sqrt(L * math.log(L))
    r_lo = logx ** (LOG4_MINUS_1 - epsilon)
    r_hi = logx ** (LOG4_MINUS_1 + epsilon)
    num = 0
    for (k, r), c in report.joint.items():
        if r >= 2 and abs(k - k_center) <= k_width and r_lo < r < r_hi:
            num += (r * (r - 1) // 2) * c
    return num / report.moment2


def comparisons_to_csv(rows: list[AsymptoticComparison]) -> str:
    """CSV text (x, empirical, predicted, ratio, note), 17 significant digits."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["x", "empirical", "predicted", "ratio", "note"])
    for row in rows:
        writer.writerow(
            [
                format(row.x, ".17g"),
                format(row.empirical, ".17g"),
                format(row.predicted, ".17g"),
                format(row.ratio, ".17g"),
                row.note,
            ]
        )
    return buf.getvalue()
