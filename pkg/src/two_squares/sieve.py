"""Segmented pair sieve over n = a^2 + p^2 and the tally data it produces.

For every prime p and every a >= 1 with a^2 + p^2 <= x, the pair is
credited to n = a^2 + p^2.  Per-n pair counts are combined with omega*(n)
into a joint (k, r) histogram over N; integers outside N that still carry
pairs (all of their representations have p | a) are tallied separately so
that N_r(x) and the moment sums stay exact.

All counters are integers and segment tallies merge by plain addition, so
the final report is bit-identical for any segment size or worker count.
"""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, wait
from dataclasses import dataclass, field
from math import isqrt
from pathlib import Path

import numpy as np

from . import __version__
from .errors import InputError, InvariantError
from .primes import PrimeTable, factorize_segment, primes_up_to

DEFAULT_SEGMENT_SIZE = 2**22
MIN_SEGMENT_SIZE = 2**16

# Per-n pair counters are 16-bit by contract; exceeding this is a hard error.
_R1_COUNTER_MAX = 2**16 - 1

# Test hook: seconds to sleep after each completed segment (fault injection).
_THROTTLE_ENV = "TWO_SQUARES_SEGMENT_THROTTLE"


def pair_counts_segment(lo: int, hi: int, base: PrimeTable) -> tuple[np.ndarray, np.ndarray]:
    """Per-n arrays (r1, defect) for n in [lo, hi), defect = r1 - r1*.

    For each prime p the admissible a-range is computed with integer
    square roots, so segment boundaries are exact.  Pairs with p | a are
    counted again into ``defect``.
    """
    if not 2 <= lo < hi:
        raise InputError(f"need 2 <= lo < hi, got [{lo}, {hi})")
    size = hi - lo
    top = hi - 1
    idx_all: list[np.ndarray] = []
    idx_def: list[np.ndarray] = []
    for p in base.primes:
        p = int(p)
        pp = p * p
        if pp >= top:
            break
        a_max = isqrt(top - pp)
        t = lo - pp
        a_min = 1 if t <= 1 else isqrt(t - 1) + 1
        if a_min > a_max:
            continue
        a = np.arange(a_min, a_max + 1, dtype=np.int64)
        idx_all.append(a * a + (pp - lo))
        a0 = ((a_min + p - 1) // p) * p
        if a0 <= a_max:
            ad = np.arange(a0, a_max + 1, p, dtype=np.int64)
            idx_def.append(ad * ad + (pp - lo))
    r1 = (
        np.bincount(np.concatenate(idx_all), minlength=size)
        if idx_all
        else np.zeros(size, dtype=np.int64)
    )
    defect = (
        np.bincount(np.concatenate(idx_def), minlength=size)
        if idx_def
        else np.zeros(size, dtype=np.int64)
    )
    if len(r1) and int(r1.max()) > _R1_COUNTER_MAX:
        raise InvariantError(f"per-n r1 counter overflow in [{lo}, {hi})")
    return r1, defect


@dataclass
class SegmentTally:
    """Exact counters for one segment [lo, hi); merges by addition."""

    lo: int
    hi: int
    joint: dict[tuple[int, int], int] = field(default_factory=dict)
    non_n: dict[int, int] = field(default_factory=dict)
    r1_total: int = 0
    r1_star_total: int = 0
    moment2: int = 0
    moment3: int = 0
    gcd_defect: int = 0

    def merge(self, other: "SegmentTally") -> "SegmentTally":
        joint = dict(self.joint)
        for cell, c in other.joint.items():
            joint[cell] = joint.get(cell, 0) + c
        non_n = dict(self.non_n)
        for r, c in other.non_n.items():
            non_n[r] = non_n.get(r, 0) + c
        return SegmentTally(
            lo=min(self.lo, other.lo),
            hi=max(self.hi, other.hi),
            joint=joint,
            non_n=non_n,
            r1_total=self.r1_total + other.r1_total,
            r1_star_total=self.r1_star_total + other.r1_star_total,
            moment2=self.moment2 + other.moment2,
            moment3=self.moment3 + other.moment3,
            gcd_defect=self.gcd_defect + other.gcd_defect,
        )


def tally_segment(lo: int, hi: int, base: PrimeTable) -> SegmentTally:
    """Full tally for one segment: pair counts joined with omega*/N data."""
    r1, defect = pair_counts_segment(lo, hi, base)
    fs = factorize_segment(lo, hi, base, max_span=hi - lo)
    # Exact moments via the value histogram (python ints, no overflow).
    hist = np.bincount(r1)
    r1_total = r1_star_total = moment2 = moment3 = 0
    for v, c in enumerate(hist.tolist()):
        if v == 0 or c == 0:
            continue
        r1_total += v * c
        moment2 += (v * (v - 1) // 2) * c
        moment3 += (v * (v - 1) * (v - 2) // 6) * c
    gcd_defect = int(defect.sum())
    r1_star_total = r1_total - gcd_defect

    joint: dict[tuple[int, int], int] = {}
    enc = fs.omega[fs.in_n].astype(np.int64) * (_R1_COUNTER_MAX + 1) + r1[fs.in_n]
    cells = np.bincount(enc)
    for code in np.flatnonzero(cells):
        k, r = divmod(int(code), _R1_COUNTER_MAX + 1)
        joint[(k, r)] = int(cells[code])
    non_n: dict[int, int] = {}
    outside = (~fs.in_n) & (r1 > 0)
    if outside.any():
        counts = np.bincount(r1[outside])
        for r in np.flatnonzero(counts):
            non_n[int(r)] = int(counts[r])
    return SegmentTally(
        lo=lo,
        hi=hi,
        joint=joint,
        non_n=non_n,
        r1_total=r1_total,
        r1_star_total=r1_star_total,
        moment2=moment2,
        moment3=moment3,
        gcd_defect=gcd_defect,
    )


@dataclass
class TallyReport:
    """Aggregated tally for the full range [2, x]."""

    x: int
    generated_by_version: str
    joint: dict[tuple[int, int], int]
    non_n: dict[int, int]
    r1_total: int
    r1_star_total: int
    moment2: int
    moment3: int
    gcd_defect: int

    @classmethod
    def from_tally(cls, x: int, tally: SegmentTally) -> "TallyReport":
        return cls(
            x=x,
            generated_by_version=__version__,
            joint=tally.joint,
            non_n=tally.non_n,
            r1_total=tally.r1_total,
            r1_star_total=tally.r1_star_total,
            moment2=tally.moment2,
            moment3=tally.moment3,
            gcd_defect=tally.gcd_defect,
        )

    def to_doc(self) -> dict:
        return {
            "x": self.x,
            "generated_by_version": self.generated_by_version,
            "joint": [[k, r, c] for (k, r), c in sorted(self.joint.items())],
            "non_n_hist": [[r, c] for r, c in sorted(self.non_n.items())],
            "r1_total": self.r1_total,
            "r1_star_total": self.r1_star_total,
            "moment2": self.moment2,
            "moment3": self.moment3,
            "gcd_defect": self.gcd_defect,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "TallyReport":
        return cls(
            x=int(doc["x"]),
            generated_by_version=str(doc["generated_by_version"]),
            joint={(int(k), int(r)): int(c) for k, r, c in doc["joint"]},
            non_n={int(r): int(c) for r, c in doc.get("non_n_hist", [])},
            r1_total=int(doc["r1_total"]),
            r1_star_total=int(doc["r1_star_total"]),
            moment2=int(doc["moment2"]),
            moment3=int(doc["moment3"]),
            gcd_defect=int(doc["gcd_defect"]),
        )

    def to_json_bytes(self) -> bytes:
        return (json.dumps(self.to_doc(), separators=(",", ":")) + "\n").encode()

    @classmethod
    def from_json_bytes(cls, data: bytes) -> "TallyReport":
        return cls.from_doc(json.loads(data))

    def to_csv_text(self) -> str:
        lines = ["k,r,count"]
        lines.extend(f"{k},{r},{c}" for (k, r), c in sorted(self.joint.items()))
        return "\n".join(lines) + "\n"


def segment_ranges(x: int, segment_size: int) -> list[tuple[int, int]]:
    """Disjoint [lo, hi) ranges covering [2, x]."""
    return [(lo, min(lo + segment_size, x + 1)) for lo in range(2, x + 1, segment_size)]


def _checkpoint_name(lo: int, hi: int) -> str:
    return f"segment_{lo:016d}_{hi:016d}.json"


def _write_checkpoint(directory: Path, x: int, tally: SegmentTally) -> None:
    doc = {
        "x": x,
        "generated_by_version": __version__,
        "lo": tally.lo,
        "hi": tally.hi,
        "joint": [[k, r, c] for (k, r), c in sorted(tally.joint.items())],
        "non_n_hist": [[r, c] for r, c in sorted(tally.non_n.items())],
        "r1_total": tally.r1_total,
        "r1_star_total": tally.r1_star_total,
        "moment2": tally.moment2,
        "moment3": tally.moment3,
        "gcd_defect": tally.gcd_defect,
    }
    path = directory / _checkpoint_name(tally.lo, tally.hi)
    tmp = path.with_suffix(".tmp")
    tmp.write_bytes(json.dumps(doc).encode())
    os.replace(tmp, path)


def _read_checkpoint(path: Path, x: int) -> SegmentTally | None:
    try:
        doc = json.loads(path.read_bytes())
    except (OSError, ValueError):
        return None
    if doc.get("x") != x or doc.get("generated_by_version") != __version__:
        return None
    return SegmentTally(
        lo=int(doc["lo"]),
        hi=int(doc["hi"]),
        joint={(int(k), int(r)): int(c) for k, r, c in doc["joint"]},
        non_n={int(r): int(c) for r, c in doc["non_n_hist"]},
        r1_total=int(doc["r1_total"]),
        r1_star_total=int(doc["r1_star_total"]),
        moment2=int(doc["moment2"]),
        moment3=int(doc["moment3"]),
        gcd_defect=int(doc["gcd_defect"]),
    )


_WORKER_TABLE: PrimeTable | None = None


def _worker_init(limit: int) -> None:
    global _WORKER_TABLE
    _WORKER_TABLE = primes_up_to(limit)


def _worker_tally(rng: tuple[int, int]) -> SegmentTally:
    assert _WORKER_TABLE is not None
    return tally_segment(rng[0], rng[1], _WORKER_TABLE)


def pair_sieve(
    x: int,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    thread_budget: int = 1,
    checkpoint_dir: str | Path | None = None,
) -> TallyReport:
    """Count all pairs a^2 + p^2 <= x into a TallyReport.

    Segments are processed independently (optionally by a worker pool) and
    merged; with ``checkpoint_dir`` each completed segment is persisted and
    a rerun resumes from whatever valid checkpoints it finds.
    """
    if x < 100:
        raise InputError(f"pair_sieve requires x >= 100, got {x}")
    if segment_size < MIN_SEGMENT_SIZE:
        raise InputError(f"segment_size must be >= {MIN_SEGMENT_SIZE}")
    if thread_budget < 1:
        raise InputError("thread_budget must be >= 1")
    throttle = float(os.environ.get(_THROTTLE_ENV, "0") or 0)
    limit = max(isqrt(x) + 1, 3)
    ranges = segment_ranges(x, segment_size)
    done: dict[tuple[int, int], SegmentTally] = {}

    ckdir: Path | None = None
    if checkpoint_dir is not None:
        ckdir = Path(checkpoint_dir)
        ckdir.mkdir(parents=True, exist_ok=True)
        for rng in ranges:
            t = _read_checkpoint(ckdir / _checkpoint_name(*rng), x)
            if t is not None and (t.lo, t.hi) == rng:
                done[rng] = t

    todo = [rng for rng in ranges if rng not in done]

    def _finish(rng: tuple[int, int], tally: SegmentTally) -> None:
        done[rng] = tally
        if ckdir is not None:
            _write_checkpoint(ckdir, x, tally)
        if throttle > 0:
            time.sleep(throttle)

    if thread_budget == 1 or len(todo) <= 1:
        base = primes_up_to(limit)
        for rng in todo:
            _finish(rng, tally_segment(rng[0], rng[1], base))
    else:
        workers = min(thread_budget, len(todo))
        with ProcessPoolExecutor(
            max_workers=workers, initializer=_worker_init, initargs=(limit,)
        ) as pool:
            pending = {pool.submit(_worker_tally, rng): rng for rng in todo}
            remaining = set(pending)
            while remaining:
                finished, remaining = wait(remaining, return_when=FIRST_COMPLETED)
                for fut in finished:
                    _finish(pending[fut], fut.result())

    merged = SegmentTally(lo=2, hi=x + 1)
    for rng in ranges:
        merged = merged.merge(done[rng])
    return TallyReport.from_tally(x, merged)
