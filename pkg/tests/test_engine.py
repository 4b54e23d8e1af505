import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from carmichael_image.engine import (
    PrimeSource,
    count_segment,
    count_up_to,
    membership_bitmap,
    plan_segments,
    resume,
    segment_lambda_divisors,
    segment_membership,
)
from carmichael_image.errors import ConfigurationError, CorruptSeriesError, RangeError, SinkError
from carmichael_image.oracle import is_lambda_value, max_lambda_divisor
from carmichael_image.series import (
    FORMAT_VERSION,
    CountSeries,
    SeriesWriter,
    eta_hat,
    read_series,
    write_records,
)


def test_count_segment_examples(source, small_tables):
    assert count_segment(1, 11, source) == 6
    assert count_segment(11, 12, source) == 0
    assert count_segment(1, 101, source) == sum(is_lambda_value(n, small_tables) for n in range(1, 101))


def test_segment_divisors_match_oracle_profile(source, small_tables):
    acc = segment_lambda_divisors(1, 5001, source, 64)
    for n in range(1, 5001):
        assert acc[n - 1] == max_lambda_divisor(n, small_tables).L


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 10**6 - 5000), st.integers(1, 5000), st.integers(2, 5000))
def test_segment_window_and_cut_do_not_matter(source, lo, length, cut):
    hi = lo + length
    a = segment_membership(lo, hi, source, cut)
    b = membership_bitmap(hi, 1 << 12, source)[lo:hi]
    assert np.array_equal(a, b)


def test_oracle_equivalence_to_1e5(source, tables):
    bitmap = membership_bitmap(10**5, 1 << 12, source)
    for n in range(1, 10**5 + 1):
        assert bitmap[n] == is_lambda_value(n, tables)


def test_segment_source_must_cover():
    with pytest.raises(RangeError):
        count_segment(1, 200, PrimeSource.up_to(100))


def test_plan_partitions():
    plan = plan_segments(1, 1001, 128, [500, 501])
    assert plan[0].lo == 1 and plan[-1].hi == 1001
    assert all(a.hi == b.lo for a, b in zip(plan, plan[1:]))
    assert {500, 501} <= {s.lo for s in plan}


def test_count_up_to_small():
    series = count_up_to(10, [10])
    assert [(c.x, c.v_lambda) for c in series.checkpoints] == [(10, 6)]


def test_count_lower_bound_and_monotone(source):
    series = count_up_to(10**5, [10**3, 10**4, 5 * 10**4], segment_size=1 << 12, source=source)
    xs = [c.x for c in series.checkpoints]
    assert xs == [10**3, 10**4, 5 * 10**4, 10**5]
    vs = [c.v_lambda for c in series.checkpoints]
    assert vs == sorted(vs)
    primes = source.primes
    for c in series.checkpoints:
        assert c.v_lambda >= int(np.searchsorted(primes, c.x + 1, side="right"))
    assert series.checkpoints[0].v_lambda >= 168


@pytest.mark.parametrize("seg", [1 << 10, 1 << 14, 1 << 17])
@pytest.mark.parametrize("workers", [1, 3])
def test_determinism(source, seg, workers):
    # expected counts frozen from a per-n is_lambda_value loop
    series = count_up_to(3 * 10**5, [12345, 10**5], workers=workers, segment_size=seg, source=source)
    assert [(c.x, c.v_lambda) for c in series.checkpoints] == [(12345, 3592), (10**5, 27155), (3 * 10**5, 79039)]


def test_eta_hat_definition():
    assert eta_hat(1000, 1000) == 0.0
    import math
    x = 10**6
    assert eta_hat(x, x / math.log(x)) == pytest.approx(1.0)
    assert eta_hat(2, 1) is None


def test_bad_arguments():
    with pytest.raises(RangeError):
        count_up_to(10**11)
    with pytest.raises(ConfigurationError):
        count_up_to(100, workers=0)
    with pytest.raises(ConfigurationError):
        count_up_to(100, [200])


def test_series_file_round_trip(tmp_path, source):
    path = tmp_path / "s.jsonl"
    with SeriesWriter(path) as w:
        series = count_up_to(10**4, [100, 1000], sink=w, source=source)
    lines = path.read_text().splitlines()
    head = json.loads(lines[0])
    assert head["version"] == FORMAT_VERSION and "engine" in head
    recs = [json.loads(line) for line in lines[1:]]
    assert set(recs[0]) == {"version", "x", "v_lambda", "eta_hat", "wall_seconds", "segment_size", "workers"}
    back = read_series(path)
    assert back.checkpoints == series.checkpoints


def test_resume_extends_to_same_count(tmp_path, source):
    path = tmp_path / "r.jsonl"
    with SeriesWriter(path) as w:
        count_up_to(10**6 // 2, sink=w, segment_size=1 << 14, source=source)
    state = resume(path)
    assert state.next_n == 10**6 // 2 + 1
    with SeriesWriter(path) as w:
        extended = count_up_to(10**6, sink=w, start=state, segment_size=1 << 16, source=source)
    fresh = count_up_to(10**6, source=source)
    assert extended.last.v_lambda == fresh.last.v_lambda == 256158
    assert [c.x for c in read_series(path).checkpoints] == [10**6 // 2, 10**6]


def test_resume_empty_file(tmp_path):
    path = tmp_path / "empty.jsonl"
    path.write_text("")
    state = resume(path)
    assert state.next_n == 1 and state.v_lambda == 0


@pytest.mark.parametrize("text", [
    '{"format": "nope", "version": 1}\n',
    '{"format": "carmichael-image-series", "version": 99}\n',
    'garbage\n',
    '{"format": "carmichael-image-series", "version": 1}\n{"version": 1, "x": 10',
    '{"format": "carmichael-image-series", "version": 1}\n{"version": 1, "x": 10}\n',
])
def test_resume_corrupt(tmp_path, text):
    path = tmp_path / "bad.jsonl"
    path.write_text(text)
    with pytest.raises(CorruptSeriesError):
        resume(path)


def test_sink_failure_keeps_resumable_prefix(tmp_path, source):
    path = tmp_path / "p.jsonl"
    writer = SeriesWriter(path)
    calls = []

    def flaky(cp):
        if calls:
            raise OSError("disk full")
        calls.append(cp)
        writer(cp)

    with pytest.raises(SinkError):
        count_up_to(2000, [1000], sink=flaky, source=source)
    writer.close()
    state = resume(path)
    assert state.next_n == 1001
    done = count_up_to(2000, start=state, source=source)
    assert done.last.v_lambda == count_up_to(2000, source=source).last.v_lambda


def test_csv_rendering():
    series = count_up_to(1000, [10])
    text = write_records(series.checkpoints, "csv")
    assert text.splitlines()[0] == "x,v_lambda,eta_hat,wall_seconds"
    assert text.splitlines()[1].startswith("10,6,")


def test_series_rejects_disorder():
    series = CountSeries()
    series.append(count_up_to(100).last)
    with pytest.raises(ValueError):
        series.append(count_up_to(50).last)
