"""File formats: CSV/JSON tables, histogram + sidecar, angle parsing.

Every writer goes through ``atomic_write`` so a failed command never leaves
a partial file behind.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import re
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from ncqwalk.errors import InvalidArgumentError
from ncqwalk.experiment import BinnedHistogram
from ncqwalk.observables import PositionDistribution

_ANGLE_RE = re.compile(
    r"""^\s*(?P<sign>[+-])?\s*
    (?P<coef>\d+(?:\.\d*)?(?:/\d+)?)?\s*\*?\s*
    pi\s*
    (?:/\s*(?P<den>\d+))?\s*$""",
    re.VERBOSE | re.IGNORECASE,
)
_DEG_RE = re.compile(r"^\s*(?P<val>[+-]?\d+(?:\.\d*)?(?:/\d+)?)\s*(?:deg|°)\s*$", re.IGNORECASE)


def parse_angle(text: str) -> float:
    """
    Parse an angle in radians.

    Accepts decimal radians (``0.3``), rational multiples of pi (``pi``,
    ``-pi/4``, ``3pi/4``, ``3*pi/4``, ``1/2 pi``) and degrees with an explicit
    suffix (``45deg``). Rational forms are evaluated as ``num * pi / den`` so
    ``pi/4`` gives the same double as ``math.pi / 4``.
    """
    m = _ANGLE_RE.match(text)
    if m:
        coef = Fraction(m["coef"]) if m["coef"] else Fraction(1)
        if m["den"]:
            coef /= int(m["den"])
        if m["sign"] == "-":
            coef = -coef
        return coef.numerator * math.pi / coef.denominator
    m = _DEG_RE.match(text)
    if m:
        coef = Fraction(m["val"]) / 180
        return coef.numerator * math.pi / coef.denominator
    try:
        value = float(text)
    except ValueError:
        raise InvalidArgumentError(f"cannot parse angle {text!r}") from None
    if not math.isfinite(value):
        raise InvalidArgumentError(f"angle must be finite, got {text!r}")
    return value


def parse_range(text: str) -> tuple[float, float, float]:
    """``start:stop:step`` with each part parsed by ``parse_angle``."""
    parts = text.split(":")
    if len(parts) != 3 or not all(p.strip() for p in parts):
        raise InvalidArgumentError(f"range must look like start:stop:step, got {text!r}")
    return tuple(parse_angle(p) for p in parts)  # type: ignore[return-value]


def fmt(value: Any) -> str:
    """Deterministic text form: shortest round-trip repr for floats."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def atomic_write(path: str | os.PathLike, text: str) -> None:
    """Write ``text`` to a temp file next to ``path`` and rename it into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def json_text(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def table_text(columns: Sequence[str], rows: Iterable[Sequence[Any]], fmt_name: str) -> str:
    """Render a table as CSV or as a JSON list of records."""
    rows = list(rows)
    if fmt_name == "csv":
        return csv_text(columns, rows)
    if fmt_name == "json":
        records = [dict(zip(columns, (_plain(v) for v in r))) for r in rows]
        return json_text(records)
    raise InvalidArgumentError(f"unknown format {fmt_name!r}")


def _plain(v):
    if isinstance(v, np.generic):
        return v.item()
    return v


def read_csv(path: str | os.PathLike) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InvalidArgumentError(f"{path}: empty file") from None
        return [h.strip() for h in header], [row for row in reader if row]


# distributions: CSV (x, p)

def distribution_rows(dist: PositionDistribution, threshold: float | None = None):
    for x, p in zip(dist.positions, dist.probabilities):
        if threshold is None or p > threshold:
            yield int(x), float(p)


def read_distribution(path: str | os.PathLike) -> PositionDistribution:
    header, rows = read_csv(path)
    if header[:2] != ["x", "p"]:
        raise InvalidArgumentError(f"{path}: expected header 'x,p', got {','.join(header)}")
    values: dict[int, float] = {}
    for row in rows:
        values[int(row[0])] = values.get(int(row[0]), 0.0) + float(row[1])
    return PositionDistribution.from_mapping(values)


# histograms: CSV (time_ns, counts) + JSON sidecar

def sidecar_path(path: str | os.PathLike) -> Path:
    return Path(path).with_suffix(".json")


def histogram_texts(hist: BinnedHistogram) -> tuple[str, str]:
    rows = ((float(t), int(c)) for t, c in zip(hist.times, hist.counts))
    meta = {"bin_width_ns": float(hist.bin_width), "trigger_origin_ns": float(hist.origin)}
    return csv_text(["time_ns", "counts"], rows), json_text(meta)


def write_histogram(path: str | os.PathLike, hist: BinnedHistogram) -> None:
    body, meta = histogram_texts(hist)
    atomic_write(sidecar_path(path), meta)
    atomic_write(path, body)


def read_histogram(path: str | os.PathLike) -> BinnedHistogram:
    """
    Read a histogram CSV. The sidecar supplies bin width and origin; without
    one they are inferred from the first two time stamps.
    """
    header, rows = read_csv(path)
    if header[:2] != ["time_ns", "counts"]:
        raise InvalidArgumentError(
            f"{path}: expected header 'time_ns,counts', got {','.join(header)}"
        )
    times = np.array([float(r[0]) for r in rows])
    counts = np.array([float(r[1]) for r in rows])
    side = sidecar_path(path)
    if side.exists():
        meta = json.loads(side.read_text())
        width = float(meta["bin_width_ns"])
        origin = float(meta.get("trigger_origin_ns", 0.0))
    elif times.size >= 2:
        width = float(times[1] - times[0])
        origin = float(times[0])
    else:
        raise InvalidArgumentError(f"{path}: bin width unknown (no sidecar, <2 rows)")
    if times.size:
        idx = np.rint((times - origin) / width).astype(np.int64)
        if np.any(idx < 0):
            raise InvalidArgumentError(f"{path}: time stamps before the trigger origin")
        dense = np.zeros(int(idx.max()) + 1)
        np.add.at(dense, idx, counts)
    else:
        dense = np.zeros(0)
    return BinnedHistogram(width, dense, origin)
