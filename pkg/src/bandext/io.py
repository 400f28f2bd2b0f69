"""Reading densities and writing tables.

Densities are JSON documents validated against ``schemas/density.v1.json``.
Tables are CSV with ``#``-prefixed ``key=value`` preamble lines and every
float printed with 12 significant digits.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import jsonschema
import numpy as np

from .density import ConstantSegment, Density, GridSegment, PowerSegment
from .errors import BandextError, ParseError

SCHEMA_VERSION = 1
OUTPUT_DIR_ENV = "BANDEXT_OUTPUT_DIR"


@lru_cache(maxsize=1)
def density_schema() -> dict:
    text = resources.files("bandext").joinpath("schemas/density.v1.json").read_text()
    return json.loads(text)


def density_to_dict(v: Density) -> dict:
    segments = []
    for seg in v.segments:
        if isinstance(seg, ConstantSegment):
            segments.append({"form": "constant", "lo": seg.lo, "hi": seg.hi, "c": seg.c})
        elif isinstance(seg, PowerSegment):
            hi = None if math.isinf(seg.hi) else seg.hi
            segments.append(
                {"form": "power", "lo": seg.lo, "hi": hi, "c": seg.c, "gamma": seg.gamma, "anchor": seg.anchor}
            )
        else:
            segments.append(
                {
                    "form": "grid",
                    "lo": seg.lo,
                    "hi": seg.hi,
                    "t": seg.t.tolist(),
                    "v": seg.v.tolist(),
                    "interp": seg.interp,
                }
            )
    return {"version": SCHEMA_VERSION, "segments": segments}


def density_from_dict(doc: Mapping) -> Density:
    """Validate and build a :class:`Density`.

    Raises:
        ParseError: on schema violations or inconsistent segment data.
    """
    try:
        jsonschema.validate(doc, density_schema())
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path)
        raise ParseError(f"density document invalid at '{path}': {exc.message}") from None

    segments = []
    try:
        for i, s in enumerate(doc["segments"]):
            hi = math.inf if s["hi"] is None else s["hi"]
            if s["form"] == "constant":
                segments.append(ConstantSegment(s["lo"], hi, s["c"]))
            elif s["form"] == "power":
                segments.append(PowerSegment(s["lo"], hi, s["c"], s["gamma"], s["anchor"]))
            else:
                seg = GridSegment(np.asarray(s["t"]), np.asarray(s["v"]), s.get("interp", "linear"))
                if seg.lo != s["lo"] or seg.hi != hi:
                    raise ParseError(f"segment {i}: grid abscissae must start at lo and end at hi")
                segments.append(seg)
        return Density(tuple(segments))
    except ParseError:
        raise
    except BandextError as exc:
        raise ParseError(f"invalid density: {exc}") from None


def load_density(path: str | os.PathLike) -> Density:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: not valid JSON ({exc.msg} at line {exc.lineno})") from None
    return density_from_dict(doc)


def dump_density(v: Density, path: str | os.PathLike) -> None:
    atomic_write(path, json.dumps(density_to_dict(v), indent=2) + "\n")


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.12g}"
    return str(x)


def csv_table(
    columns: Sequence[str],
    rows: Iterable[Mapping | Sequence],
    preamble: Mapping[str, object] | None = None,
) -> str:
    buf = io.StringIO()
    for key, value in (preamble or {}).items():
        buf.write(f"# {key}={fmt(value)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        if isinstance(row, Mapping):
            row = [row.get(c) for c in columns]
        writer.writerow([fmt(x) for x in row])
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isnan(x):
            return None
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return float(f"{x:.12g}")
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def json_document(doc: Mapping) -> str:
    return json.dumps(_jsonable(doc), indent=2, sort_keys=False) + "\n"


def resolve_output(path: str | os.PathLike) -> Path:
    """Relative output paths land in ``$BANDEXT_OUTPUT_DIR`` when it is set."""
    p = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    return p


def atomic_write(path: str | os.PathLike, text: str) -> Path:
    """Write via a temporary file in the target directory, then rename."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{target.name}.", dir=target.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise
    return target
