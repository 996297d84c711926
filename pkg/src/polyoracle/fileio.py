"""Plain-text polytope, point and ray files.

Polytope files start with a ``d n`` line followed by ``n`` lines of
``a_1 ... a_d b``.  Point files hold one point per line, ray files one ray
(apex then direction, ``2d`` numbers) per line.  Lines starting with ``#``
carry metadata and are skipped by every reader.
"""

from __future__ import annotations

import io
from pathlib import Path

import numpy as np

from .errors import FileFormatError
from .geom import HPolytope, Ray


def _fmt(x: float) -> str:
    return repr(float(x))


def _header_lines(meta: dict | None) -> list[str]:
    if not meta:
        return []
    return [f"# {k}: {v}" for k, v in meta.items()]


def _data_lines(path) -> list[str]:
    with open(path, "r", encoding="ascii") as fh:
        lines = [ln.strip() for ln in fh]
    return [ln for ln in lines if ln and not ln.startswith("#")]


def _numbers(path, lines) -> list[list[float]]:
    try:
        return [[float(tok) for tok in ln.split()] for ln in lines]
    except ValueError as exc:
        raise FileFormatError(f"{path}: {exc}") from exc


def read_meta(path) -> dict:
    """Collect ``# key: value`` header lines."""
    meta = {}
    with open(path, "r", encoding="ascii") as fh:
        for ln in fh:
            ln = ln.strip()
            if not ln.startswith("#"):
                if ln:
                    break
                continue
            key, sep, val = ln[1:].partition(":")
            if sep:
                meta[key.strip()] = val.strip()
    return meta


def format_polytope(P: HPolytope, meta: dict | None = None) -> str:
    buf = io.StringIO()
    for ln in _header_lines(meta):
        buf.write(ln + "\n")
    buf.write(f"{P.d} {P.n}\n")
    rows = np.hstack([P.A, P.b[:, None]])
    for row in rows:
        buf.write(" ".join(map(_fmt, row)) + "\n")
    return buf.getvalue()


def write_polytope(path, P: HPolytope, meta: dict | None = None) -> None:
    Path(path).write_text(format_polytope(P, meta), encoding="ascii")


def read_polytope(path) -> HPolytope:
    lines = _data_lines(path)
    if not lines:
        raise FileFormatError(f"{path}: empty polytope file")
    try:
        d, n = (int(tok) for tok in lines[0].split())
    except ValueError as exc:
        raise FileFormatError(f"{path}: bad header line {lines[0]!r}") from exc
    if len(lines) - 1 != n:
        raise FileFormatError(f"{path}: header announces {n} rows, found {len(lines) - 1}")
    rows = _numbers(path, lines[1:])
    if any(len(r) != d + 1 for r in rows):
        raise FileFormatError(f"{path}: expected {d + 1} numbers per row")
    rows = np.array(rows, dtype=float).reshape(n, d + 1)
    return HPolytope(rows[:, :d], rows[:, d])


def write_points(path, pts, meta: dict | None = None) -> None:
    pts = np.asarray(pts, float)
    out = _header_lines(meta)
    if pts.size:
        out.extend(" ".join(map(_fmt, p)) for p in np.atleast_2d(pts))
    Path(path).write_text("\n".join(out) + "\n", encoding="ascii")


def read_points(path, d: int | None = None) -> np.ndarray:
    lines = _data_lines(path)
    rows = _numbers(path, lines)
    if not rows:
        return np.empty((0, d or 0))
    width = d if d is not None else len(rows[0])
    if any(len(r) != width for r in rows):
        raise FileFormatError(f"{path}: every line needs {width} numbers")
    return np.array(rows, dtype=float)


def write_rays(path, rays, meta: dict | None = None) -> None:
    out = _header_lines(meta)
    out.extend(" ".join(map(_fmt, np.concatenate([r.s, r.v]))) for r in rays)
    Path(path).write_text("\n".join(out) + "\n", encoding="ascii")


def read_rays(path, d: int) -> list[Ray]:
    rows = read_points(path, 2 * d)
    return [Ray(row[:d], row[d:]) for row in rows]
