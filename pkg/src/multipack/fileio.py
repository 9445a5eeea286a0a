"""CSV formats for point lists, finite codes, and constellations.

A point-list file starts with ``# n=<n>`` and carries one point per row as
comma-separated decimals.  Code files add ``# L= # N= # K= # seed=
# expurgated=`` header lines; constellation files additionally carry
``# period=`` and ``# gap=``.  Floats are written with repr so files
round-trip exactly and identical runs produce identical bytes.
"""

from __future__ import annotations

import numpy as np

from .construction import Constellation, FiniteCode
from .errors import ParseError
from .geometry import PointList


def _fmt_row(row) -> str:
    return ",".join(repr(float(v)) for v in row)


def _parse_rows(lines, n, path, first_lineno):
    rows = []
    for off, line in enumerate(lines):
        lineno = first_lineno + off
        line = line.strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != n:
            raise ParseError(
                f"{path}:{lineno}: expected {n} coordinates, got {len(parts)}"
            )
        try:
            rows.append([float(p) for p in parts])
        except ValueError as exc:
            raise ParseError(f"{path}:{lineno}: {exc}") from None
    return np.array(rows, dtype=float).reshape(len(rows), n)


def _read_headers(lines, path):
    """Leading '# key=value' lines as a dict, plus the index of the first data row."""
    headers = {}
    i = 0
    for i, line in enumerate(lines):
        s = line.strip()
        if not s.startswith("#"):
            break
        body = s.lstrip("#").strip()
        if "=" not in body:
            raise ParseError(f"{path}:{i + 1}: malformed header line {s!r}")
        key, _, value = body.partition("=")
        headers[key.strip()] = value.strip()
    else:
        i = len(lines)
    return headers, i


def write_points(path, pl: PointList) -> None:
    with open(path, "w") as fh:
        fh.write(f"# n={pl.n}\n")
        for row in pl.points:
            fh.write(_fmt_row(row) + "\n")


def read_points(path) -> PointList:
    with open(path) as fh:
        lines = fh.readlines()
    headers, start = _read_headers(lines, path)
    if "n" not in headers:
        raise ParseError(f"{path}:1: missing '# n=<n>' header")
    try:
        n = int(headers["n"])
    except ValueError:
        raise ParseError(f"{path}:1: n must be an integer, got {headers['n']!r}") from None
    if n < 1:
        raise ParseError(f"{path}:1: n must be positive, got {n}")
    pts = _parse_rows(lines[start:], n, path, start + 1)
    if len(pts) < 2:
        raise ParseError(f"{path}: a point list needs at least 2 rows, got {len(pts)}")
    return PointList(pts)


def _write_code_headers(fh, code: FiniteCode) -> None:
    fh.write(f"# n={code.n}\n")
    fh.write(f"# L={code.L}\n")
    fh.write(f"# N={code.N!r}\n")
    fh.write(f"# K={code.K!r}\n")
    if code.seed is not None:
        fh.write(f"# seed={code.seed}\n")
    fh.write(f"# expurgated={code.expurgated_count}\n")


def write_code(path, code: FiniteCode) -> None:
    with open(path, "w") as fh:
        _write_code_headers(fh, code)
        for row in code.points:
            fh.write(_fmt_row(row) + "\n")


def write_constellation(path, c: Constellation) -> None:
    with open(path, "w") as fh:
        _write_code_headers(fh, c.base)
        fh.write(f"# period={c.period!r}\n")
        fh.write(f"# gap={c.gap!r}\n")
        for row in c.base.points:
            fh.write(_fmt_row(row) + "\n")


def _code_from_headers(headers, lines, start, path) -> FiniteCode:
    for key in ("n", "L", "N", "K", "expurgated"):
        if key not in headers:
            raise ParseError(f"{path}: missing '# {key}=' header")
    try:
        n = int(headers["n"])
        L = int(headers["L"])
        N = float(headers["N"])
        K = float(headers["K"])
        seed = int(headers["seed"]) if "seed" in headers else None
        expurgated = int(headers["expurgated"])
    except ValueError as exc:
        raise ParseError(f"{path}: bad header value: {exc}") from None
    pts = _parse_rows(lines[start:], n, path, start + 1)
    return FiniteCode(
        points=pts, n=n, L=L, N=N, K=K, seed=seed, expurgated_count=expurgated
    )


def read_code(path) -> FiniteCode:
    with open(path) as fh:
        lines = fh.readlines()
    headers, start = _read_headers(lines, path)
    if "period" in headers or "gap" in headers:
        raise ParseError(f"{path}: constellation file; use read_constellation")
    return _code_from_headers(headers, lines, start, path)


def read_constellation(path) -> Constellation:
    with open(path) as fh:
        lines = fh.readlines()
    headers, start = _read_headers(lines, path)
    if "gap" not in headers:
        raise ParseError(f"{path}: missing '# gap=' header; not a constellation file")
    base = _code_from_headers(headers, lines, start, path)
    c = Constellation(base=base, gap=float(headers["gap"]))
    if "period" in headers:
        period = float(headers["period"])
        if abs(period - c.period) > 1e-9 * max(1.0, abs(period)):
            raise ParseError(
                f"{path}: period header {period!r} does not match 2K + 2*gap = {c.period!r}"
            )
    return c


def load(path):
    """Read a point file as whatever it is: Constellation, FiniteCode, or PointList."""
    with open(path) as fh:
        lines = fh.readlines()
    headers, _ = _read_headers(lines, path)
    if "gap" in headers:
        return read_constellation(path)
    if "L" in headers:
        return read_code(path)
    return read_points(path)
