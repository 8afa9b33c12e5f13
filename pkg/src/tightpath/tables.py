"""Threshold table for small uniformities, recomputed from the solvers.

Every entry is the least k (or an interval for it) such that all large
(r,k)-tournaments contain the stated kind of tight path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import AlgorithmFailure, UnsupportedError
from .families import load_data
from .psg import build_psg
from .thresholds import (
    constant_path_threshold,
    growing_threshold,
    linear_threshold_upper,
    spanning_threshold_upper,
    tau_formula_divisible,
    theta_exact,
    verify_certificate,
    walk_certificate_psg,
)

Value = int | tuple[int, int]


@dataclass(frozen=True)
class TableRow:
    key: str
    row: str
    value: Value

    def to_json(self) -> dict:
        v = list(self.value) if isinstance(self.value, tuple) else self.value
        return {"row": self.row, "key": self.key, "value": v}


def _lo(v: Value) -> int:
    return v[0] if isinstance(v, tuple) else v


def _interval(lo: int, hi: int) -> Value:
    return lo if lo == hi else (lo, hi)


def _cross_check(r: int, t: int) -> None:
    """Match the divisible-case formula against an exact or certified value."""
    _, theta = tau_formula_divisible(r, t)
    if r <= 4:
        got = theta_exact(build_psg(r), t)[0]
    else:
        D = build_psg(r)
        cert = walk_certificate_psg(r, t)
        if not (verify_certificate(D, cert) and cert.is_tight()):
            raise AlgorithmFailure(f"walk certificate for r={r}, t={t} is not tight")
        got = len(cert.avoid)
    if got != theta:
        raise AlgorithmFailure(f"theta_{t}(PSG_{r}) = {got} but the formula gives {theta}")


def table_thresholds(r: int, cross_check: bool = True) -> list[TableRow]:
    if r not in (3, 4, 5):
        raise UnsupportedError(f"threshold table available for r in 3..5, got r={r}")
    rows = []
    for t in range(2, r):
        if (r - 1) % t:
            continue
        if cross_check:
            _cross_check(r, t)
        rows.append(TableRow(f"const_t{t}", f"path with r-1+{t} vertices", constant_path_threshold(r, t)))
    grow = growing_threshold(r)
    rows.append(TableRow("growing", "growing paths", grow))
    lo = _lo(grow)
    if r == 3:
        # the binary (3,3) construction keeps paths logarithmic, so k = 3 is not enough
        lo = 4
    lin = math.ceil(linear_threshold_upper(r))
    rows.append(TableRow("linear", "linear paths", _interval(lo, lin)))
    # k = 5 already forces spanning paths when r = 3
    span = 5 if r == 3 else spanning_threshold_upper(r)
    rows.append(TableRow("spanning", "spanning paths", _interval(lo, span)))
    return rows


def expected_table(r: int) -> list[TableRow] | None:
    rows = load_data("expected_tables.json").get(str(r))
    if rows is None:
        return None
    return [TableRow(x["key"], x["row"], tuple(x["value"]) if isinstance(x["value"], list) else x["value"]) for x in rows]


def diff_table(computed: list[TableRow], expected: list[TableRow] | None) -> list[str]:
    """Cell-level differences; empty when they agree or nothing is expected."""
    if expected is None:
        return []
    got = {row.key: row.value for row in computed}
    want = {row.key: row.value for row in expected}
    out = []
    for key in sorted(set(got) | set(want)):
        if got.get(key) != want.get(key):
            out.append(f"{key}: computed {got.get(key)!r}, expected {want.get(key)!r}")
    return out


def format_value(v: Value) -> str:
    return f"[{v[0]},{v[1]}]" if isinstance(v, tuple) else str(v)


def format_table(r: int, rows: list[TableRow]) -> str:
    width = max(len(row.row) for row in rows)
    lines = [f"r = {r}"]
    lines += [f"  {row.row.ljust(width)}  {format_value(row.value)}" for row in rows]
    return "\n".join(lines)
