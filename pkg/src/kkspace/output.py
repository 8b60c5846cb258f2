"""Deterministic CSV / JSON writers for the scan results."""

from __future__ import annotations

import io
import json
import math
from pathlib import Path

SPECTRUM_HEADER = ["delta_p_over_gamma12", "R_l", "R_r", "T", "C", "D_kk", "regime"]
PROFILE_HEADER = ["x_m", "chi_re", "chi_im", "chi_kk_re"]
MAP_HEADER = ["delta0_over_gamma12", "delta_p_over_gamma12", "D_kk", "R_l", "R_r"]
LENGTHS_HEADER = ["L_m"] + SPECTRUM_HEADER


def fmt(value) -> str:
    value = float(value)
    if math.isnan(value):
        return "nan"
    return f"{value:.9g}"


def num(value):
    """Round to 9 significant digits for structured output; NaN becomes null."""
    value = float(value)
    if math.isnan(value):
        return None
    return float(f"{value:.9g}")


def _spectrum_cells(row):
    return [fmt(row.delta_p), fmt(row.R_l), fmt(row.R_r), fmt(row.T), fmt(row.C), fmt(row.d_kk), row.regime.value]


def _spectrum_obj(row):
    return {
        "delta_p_over_gamma12": num(row.delta_p),
        "R_l": num(row.R_l),
        "R_r": num(row.R_r),
        "T": num(row.T),
        "C": num(row.C),
        "D_kk": num(row.d_kk),
        "regime": row.regime.value,
    }


def spectrum_table(rows):
    return SPECTRUM_HEADER, [_spectrum_cells(r) for r in rows], [_spectrum_obj(r) for r in rows]


def profile_table(table):
    cells, objs = [], []
    for x, chi, kk in zip(table.x, table.chi, table.chi_kk):
        cells.append([fmt(x), fmt(chi.real), fmt(chi.imag), fmt(kk)])
        objs.append({"x_m": num(x), "chi_re": num(chi.real), "chi_im": num(chi.imag), "chi_kk_re": num(kk)})
    return PROFILE_HEADER, cells, {"delta_p_over_gamma12": num(table.delta_p), "rows": objs}


def map_table(result):
    cells = []
    for i, d0 in enumerate(result.delta0):
        for j, dp in enumerate(result.delta_p):
            cells.append([fmt(d0), fmt(dp), fmt(result.d_kk[i, j]), fmt(result.R_l[i, j]), fmt(result.R_r[i, j])])
    obj = {
        "delta0_over_gamma12": [num(v) for v in result.delta0],
        "delta_p_over_gamma12": [num(v) for v in result.delta_p],
        "D_kk": [[num(v) for v in row] for row in result.d_kk],
        "R_l": [[num(v) for v in row] for row in result.R_l],
        "R_r": [[num(v) for v in row] for row in result.R_r],
    }
    return MAP_HEADER, cells, obj


def lengths_table(sweep):
    cells, obj = [], []
    for L, rows in sweep.items():
        cells += [[fmt(L)] + _spectrum_cells(r) for r in rows]
        obj.append({"L_m": num(L), "rows": [_spectrum_obj(r) for r in rows]})
    return LENGTHS_HEADER, cells, obj


def render(header, cells, obj, fmt_name: str) -> str:
    if fmt_name == "csv":
        buf = io.StringIO()
        buf.write(",".join(header) + "\n")
        for row in cells:
            buf.write(",".join(row) + "\n")
        return buf.getvalue()
    if fmt_name == "structured":
        return json.dumps(obj, indent=1, sort_keys=True, allow_nan=False) + "\n"
    raise ValueError(f"unknown format {fmt_name!r}")


def write_output(table, fmt_name: str, path) -> str:
    """Render ``(header, cells, obj)`` and write it as UTF-8 with LF line endings."""
    header, cells, obj = table
    if not cells:
        raise ValueError("nothing to write")
    text = render(header, cells, obj, fmt_name)
    with open(Path(path), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return text
