"""JSON and CSV output: sorted keys, integers as decimal strings."""

from __future__ import annotations

import csv
import io
import json
import sys
from dataclasses import fields, is_dataclass
from fractions import Fraction
from typing import Any, Iterable

from .folding import ImagePrefix, ZValue
from .interval import Interval
from .minkowski import Dyadic

# exponents and quotients here routinely pass the default 4300-digit limit
if hasattr(sys, "set_int_max_str_digits"):
    sys.set_int_max_str_digits(0)


def to_plain(obj: Any) -> Any:
    """Convert results to JSON-ready values. Numbers become strings."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, Dyadic):
        return {"num": str(obj.num), "exp": str(obj.exp)}
    if isinstance(obj, Interval):
        return {"lo": str(obj.lo), "hi": str(obj.hi), "approx": str(obj)}
    if isinstance(obj, ZValue):
        return zvalue_plain(obj)
    if isinstance(obj, ImagePrefix):
        return image_plain(obj)
    if is_dataclass(obj):
        return {f.name: to_plain(getattr(obj, f.name)) for f in fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def zvalue_plain(z: ZValue) -> dict:
    if z.value is not None:
        return {"exact": str(z.value), "s": str(z.s)}
    # bounds 2^(s+1)-1 .. 2^(s+2)-1 are written symbolically
    return {"bounds": [f"2^{z.s + 1}-1", f"2^{z.s + 2}-1"], "s": str(z.s)}


def image_plain(img: ImagePrefix) -> dict:
    blocks = []
    for i, b in enumerate(img.blocks, start=1):
        entry: dict[str, Any] = {
            "sum_exp": to_plain(b.sum_exp),
            "cont_exp": [to_plain(b.cont_lo_exp), to_plain(b.cont_hi_exp)],
        }
        if img.raw is not None:
            entry["range"] = [str(b.start), str(b.stop)]
            entry["entries"] = to_plain(img.block(i))
        if b.z_before is not None:
            entry["z"] = zvalue_plain(b.z_before)
        blocks.append(entry)
    return {"mode": img.mode, "raw": to_plain(img.raw), "blocks": blocks}


def dumps(obj: Any) -> str:
    return json.dumps(to_plain(obj), sort_keys=True, indent=2) + "\n"


DECAY_COLUMNS = ("level", "block", "exact", "t", "S_t", "log2_width",
                 "log2_image_width", "log2_quotient_lo", "log2_quotient_hi")


def _cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, Fraction):
        return f"{float(v):.12g}"
    return str(v)


def decay_records(rows: Iterable) -> list[dict]:
    out = []
    for r in rows:
        q = r.log2_quotient
        out.append({
            "level": r.level,
            "block": r.block,
            "exact": r.exact,
            "t": r.t,
            "S_t": r.S_t,
            "log2_width": r.log2_width.hi if r.log2_width is not None else None,
            "log2_image_width": r.log2_image_width.hi if r.log2_image_width is not None else None,
            "log2_quotient_lo": q.lo if q is not None else None,
            "log2_quotient_hi": q.hi if q is not None else r.log2_quotient_upper,
        })
    return out


def to_csv(records: list[dict], columns: Iterable[str] | None = None) -> str:
    columns = list(columns) if columns is not None else (list(records[0]) if records else [])
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for rec in records:
        writer.writerow([_cell(rec.get(c)) for c in columns])
    return buf.getvalue()
