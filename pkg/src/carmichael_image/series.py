"""Checkpoint records and the line-delimited series file.

File layout (UTF-8, one JSON object per line)::

    {"format": "carmichael-image-series", "version": 1, "engine": "...", "created": "..."}
    {"version": 1, "x": 1000, "v_lambda": 249, "eta_hat": 0.55, "wall_seconds": 0.01, "segment_size": 1048576, "workers": 1}
    ...

The file is append-only; a run that dies between records leaves a valid
prefix that :func:`read_series` and the engine's resume path accept.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from typing import IO, Iterable

from .errors import CorruptSeriesError, SinkError

FORMAT_NAME = "carmichael-image-series"
FORMAT_VERSION = 1
ENGINE_ID = "carmichael_image/segmented-lcm-sieve/1"
CSV_COLUMNS = ("x", "v_lambda", "eta_hat", "wall_seconds")


def eta_hat(x: int, v_lambda: int) -> float | None:
    """log(x / V(x)) / log log x, or None where log log x <= 0."""
    if x < 3 or v_lambda < 1:
        return None
    return math.log(x / v_lambda) / math.log(math.log(x))


@dataclass(frozen=True)
class CountCheckpoint:
    x: int
    v_lambda: int
    eta_hat: float | None
    wall_seconds: float
    segment_size: int
    workers: int

    def to_record(self) -> dict:
        return {"version": FORMAT_VERSION, **asdict(self)}

    @classmethod
    def from_record(cls, rec: dict) -> "CountCheckpoint":
        if rec.get("version") != FORMAT_VERSION:
            raise CorruptSeriesError(f"record version {rec.get('version')!r} != {FORMAT_VERSION}")
        try:
            return cls(
                x=int(rec["x"]),
                v_lambda=int(rec["v_lambda"]),
                eta_hat=None if rec["eta_hat"] is None else float(rec["eta_hat"]),
                wall_seconds=float(rec["wall_seconds"]),
                segment_size=int(rec["segment_size"]),
                workers=int(rec["workers"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise CorruptSeriesError(f"bad checkpoint record {rec!r}") from exc


@dataclass
class CountSeries:
    checkpoints: list[CountCheckpoint] = field(default_factory=list)
    version: int = FORMAT_VERSION
    engine: str = ENGINE_ID
    created: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())

    def header(self) -> dict:
        return {"format": FORMAT_NAME, "version": self.version, "engine": self.engine,
                "created": self.created}

    def append(self, cp: CountCheckpoint) -> None:
        if self.checkpoints:
            last = self.checkpoints[-1]
            if cp.x <= last.x or cp.v_lambda < last.v_lambda:
                raise ValueError(f"checkpoint {cp.x} breaks series order after {last.x}")
        self.checkpoints.append(cp)

    @property
    def last(self) -> CountCheckpoint | None:
        return self.checkpoints[-1] if self.checkpoints else None


def _parse_line(line: str, lineno: int) -> dict:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise CorruptSeriesError(f"line {lineno}: not JSON ({exc.msg})") from exc
    if not isinstance(obj, dict):
        raise CorruptSeriesError(f"line {lineno}: expected an object")
    return obj


def read_series(path: str | os.PathLike) -> CountSeries:
    """Load a series file.  An empty file is an empty series."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    if not text.strip():
        return CountSeries()
    if not text.endswith("\n"):
        raise CorruptSeriesError(f"{path}: truncated final record")
    lines = text.splitlines()
    head = _parse_line(lines[0], 1)
    if head.get("format") != FORMAT_NAME:
        raise CorruptSeriesError(f"{path}: not a {FORMAT_NAME} file")
    if head.get("version") != FORMAT_VERSION:
        raise CorruptSeriesError(f"{path}: version {head.get('version')!r}, expected {FORMAT_VERSION}")
    series = CountSeries(version=FORMAT_VERSION, engine=str(head.get("engine", "")),
                         created=str(head.get("created", "")))
    for i, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            series.append(CountCheckpoint.from_record(_parse_line(line, i)))
        except ValueError as exc:
            raise CorruptSeriesError(f"line {i}: {exc}") from exc
    return series


class SeriesWriter:
    """Append-only JSON-lines sink.  Writes the header if the file is new or empty."""

    def __init__(self, path: str | os.PathLike, series: CountSeries | None = None):
        self.path = os.fspath(path)
        fresh = not os.path.exists(self.path) or os.path.getsize(self.path) == 0
        try:
            self._fh = open(self.path, "a", encoding="utf-8")
            if fresh:
                self._write((series or CountSeries()).header())
        except OSError as exc:
            raise SinkError(f"cannot open {self.path}: {exc}") from exc

    def _write(self, obj: dict) -> None:
        self._fh.write(json.dumps(obj) + "\n")
        self._fh.flush()

    def __call__(self, cp: CountCheckpoint) -> None:
        try:
            self._write(cp.to_record())
        except OSError as exc:
            raise SinkError(f"writing checkpoint x={cp.x} to {self.path}: {exc}") from exc

    def close(self) -> None:
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def write_records(checkpoints: Iterable[CountCheckpoint], fmt: str = "json",
                  out: IO[str] | None = None) -> str:
    """Render checkpoints as JSON lines or CSV (columns ``CSV_COLUMNS``)."""
    buf = out if out is not None else io.StringIO()
    if fmt == "csv":
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for cp in checkpoints:
            w.writerow([cp.x, cp.v_lambda, "" if cp.eta_hat is None else repr(cp.eta_hat),
                        cp.wall_seconds])
    elif fmt == "json":
        for cp in checkpoints:
            buf.write(json.dumps(cp.to_record()) + "\n")
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return buf.getvalue() if out is None else ""
