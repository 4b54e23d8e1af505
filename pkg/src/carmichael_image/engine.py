"""Exact V_lambda(x) by a segmented lcm-accumulation sieve.

Each segment ``[lo, hi)`` starts from ``acc[n] = 2^v2(n)`` and absorbs
``(p - 1) * p^vp(n)`` for every odd prime ``p`` with ``(p - 1) | n``; a
number is a lambda-value exactly when its accumulator reaches ``n`` (see
:mod:`carmichael_image.oracle` for why).  Segments are independent, so they
run on a thread pool; the compiled kernels release the GIL.
"""

from __future__ import annotations

import logging
import os
import time
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from . import _kernels
from .errors import ConfigurationError, RangeError, SinkError
from .series import CountCheckpoint, CountSeries, eta_hat, read_series

log = logging.getLogger(__name__)

DEFAULT_MAX_X = 10**10
DEFAULT_SEGMENT_SIZE = 1 << 20
MIN_SEGMENT_SIZE = 1 << 10


def available_cpus() -> int:
    """CPUs this process may run on (affinity-aware where the OS supports it)."""
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1


@dataclass(frozen=True, eq=False)
class PrimeSource:
    """All primes up to ``bound``, shared read-only between workers."""

    bound: int
    primes: np.ndarray

    @classmethod
    def up_to(cls, bound: int) -> "PrimeSource":
        arr = _kernels.prime_sieve(int(bound))
        arr.setflags(write=False)
        return cls(int(bound), arr)

    def covers(self, hi: int) -> bool:
        return self.bound >= hi


@dataclass(frozen=True)
class SegmentPlan:
    lo: int
    hi: int
    segment_size: int


def plan_segments(lo: int, hi: int, segment_size: int,
                  breaks: Iterable[int] = ()) -> list[SegmentPlan]:
    """Partition ``[lo, hi)`` into windows of ``segment_size``, also cut at ``breaks``."""
    cuts = set(range(lo, hi, segment_size)) | {b for b in breaks if lo < b < hi} | {lo, hi}
    cuts = sorted(cuts)
    return [SegmentPlan(a, b, segment_size) for a, b in zip(cuts, cuts[1:])]


def _check_segment(lo: int, hi: int, source: PrimeSource) -> None:
    if lo < 1 or hi < lo:
        raise RangeError(f"bad segment [{lo}, {hi})")
    if not source.covers(hi):
        raise RangeError(f"prime source to {source.bound} does not cover segment end {hi}")


def segment_lambda_divisors(lo: int, hi: int, source: PrimeSource, cut: int | None = None) -> np.ndarray:
    """The maximal lambda-divisor L(n) for each n in [lo, hi)."""
    _check_segment(lo, hi, source)
    if hi == lo:
        return np.empty(0, dtype=np.int64)
    return _kernels.segment_accumulate(lo, hi, source.primes, cut or max(hi - lo, 2))


def segment_membership(lo: int, hi: int, source: PrimeSource, cut: int | None = None) -> np.ndarray:
    """Boolean mask over [lo, hi): True where n is a value of lambda."""
    acc = segment_lambda_divisors(lo, hi, source, cut)
    return acc == np.arange(lo, hi, dtype=np.int64)


def count_segment(lo: int, hi: int, source: PrimeSource, cut: int | None = None) -> int:
    """#{lo <= n < hi : n = lambda(m) for some m}."""
    _check_segment(lo, hi, source)
    if hi == lo:
        return 0
    return int(_kernels.segment_count(lo, hi, source.primes, cut or max(hi - lo, 2)))


@dataclass(frozen=True)
class ResumeState:
    """Where an interrupted count picks up: next unprocessed n and the count before it."""

    next_n: int
    v_lambda: int
    wall_seconds: float
    series: CountSeries


def resume(path) -> ResumeState:
    series = read_series(path)
    last = series.last
    if last is None:
        return ResumeState(1, 0, 0.0, series)
    return ResumeState(last.x + 1, last.v_lambda, last.wall_seconds, series)


def count_up_to(
    x: int,
    checkpoints: Sequence[int] = (),
    workers: int = 1,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    sink: Callable[[CountCheckpoint], None] | None = None,
    *,
    start: ResumeState | None = None,
    source: PrimeSource | None = None,
    max_x: int = DEFAULT_MAX_X,
) -> CountSeries:
    """Count lambda-values up to ``x`` and emit a checkpoint at each requested point.

    ``x`` itself is always a checkpoint.  Checkpoints at or before the resume
    point are skipped.  The result does not depend on ``workers`` or
    ``segment_size``.  The pool never holds more threads than there are
    available CPUs: oversubscribed segments only evict each other's cache.
    """
    x = int(x)
    if x < 1 or x > max_x:
        raise RangeError(f"x={x} outside [1, {max_x}]")
    if workers < 1:
        raise ConfigurationError("workers must be >= 1")
    if segment_size < 1:
        raise ConfigurationError("segment_size must be >= 1")
    marks = sorted({int(c) for c in checkpoints} | {x})
    if marks[0] < 1 or marks[-1] > x:
        raise ConfigurationError(f"checkpoints must lie in [1, {x}]")

    series = CountSeries() if start is None else start.series
    lo = 1 if start is None else start.next_n
    total = 0 if start is None else start.v_lambda
    wall0 = 0.0 if start is None else start.wall_seconds
    marks = [c for c in marks if c >= lo]
    if not marks:
        return series
    if source is None or not source.covers(x + 1):
        source = PrimeSource.up_to(x + 1)

    plan = plan_segments(lo, x + 1, segment_size, (c + 1 for c in marks))
    pending_marks = deque(marks)
    t0 = time.perf_counter()
    log.info("counting [%d, %d] in %d segments on %d workers", lo, x, len(plan), workers)

    def run(seg: SegmentPlan) -> int:
        return count_segment(seg.lo, seg.hi, source, segment_size)

    def emit(seg_hi: int) -> None:
        while pending_marks and pending_marks[0] + 1 == seg_hi:
            c = pending_marks.popleft()
            cp = CountCheckpoint(c, total, eta_hat(c, total),
                                 round(wall0 + time.perf_counter() - t0, 6), segment_size, workers)
            series.append(cp)
            if sink is not None:
                try:
                    sink(cp)
                except SinkError:
                    raise
                except Exception as exc:
                    raise SinkError(f"sink failed at x={c}: {exc}") from exc

    if workers == 1:
        for seg in plan:
            total += run(seg)
            emit(seg.hi)
        return series

    pool_size = min(workers, available_cpus())
    if pool_size < workers:
        log.info("capping %d requested workers at %d available cpus", workers, pool_size)
    window = 4 * pool_size
    with ThreadPoolExecutor(max_workers=pool_size) as pool:
        inflight: deque = deque()
        it = iter(plan)
        for seg in it:
            inflight.append((seg, pool.submit(run, seg)))
            if len(inflight) >= window:
                break
        while inflight:
            seg, fut = inflight.popleft()
            total += fut.result()
            emit(seg.hi)
            nxt = next(it, None)
            if nxt is not None:
                inflight.append((nxt, pool.submit(run, nxt)))
    return series


def membership_bitmap(x: int, segment_size: int = DEFAULT_SEGMENT_SIZE,
                      source: PrimeSource | None = None) -> np.ndarray:
    """Boolean array ``b`` of length ``x + 1`` with ``b[n]`` True iff n is a lambda-value."""
    if source is None or not source.covers(x + 1):
        source = PrimeSource.up_to(x + 1)
    out = np.zeros(x + 1, dtype=bool)
    for seg in plan_segments(1, x + 1, segment_size):
        out[seg.lo:seg.hi] = segment_membership(seg.lo, seg.hi, source, segment_size)
    return out
