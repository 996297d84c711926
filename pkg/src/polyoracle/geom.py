"""Geometric vocabulary: H-polytopes, hyperplanes, rays, boxes.

Everything here is immutable after construction and every function is pure,
so instances can be shared freely between benchmark workers.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateError, DimensionError, NotInteriorError

PARALLEL_TOL = 1e-12
MEMBERSHIP_TOL = 1e-9


def _frozen(x) -> np.ndarray:
    arr = np.array(x, dtype=float)
    arr.setflags(write=False)
    return arr


class Membership(enum.Enum):
    INSIDE = "inside"
    OUTSIDE = "outside"
    BOUNDARY = "boundary"


class HPolytope:
    """The polyhedron ``{x : A x <= b}``.

    Row ``i`` of ``A`` together with ``b[i]`` is facet ``i``; row norms are
    cached because projection, slack normalisation and the Chebyshev LP all
    reuse them.  Redundant rows are not detected.
    """

    def __init__(self, A, b):
        A = np.array(A, dtype=float)
        b = np.array(b, dtype=float).reshape(-1)
        if A.ndim != 2:
            raise DimensionError(f"A must be a matrix, got shape {A.shape}")
        if A.shape[0] != b.shape[0]:
            raise DimensionError(
                f"A has {A.shape[0]} rows but b has {b.shape[0]} entries")
        if A.shape[0] == 0 or A.shape[1] == 0:
            raise DimensionError("empty constraint system")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise DegenerateError("non-finite coefficient")
        norms = np.linalg.norm(A, axis=1)
        zero = np.flatnonzero(norms == 0.0)
        if zero.size:
            raise DegenerateError(f"row {int(zero[0])} has a zero normal")
        self.A = _frozen(A)
        self.b = _frozen(b)
        self.row_norms = _frozen(norms)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def d(self) -> int:
        return self.A.shape[1]

    @property
    def scale(self) -> float:
        """Magnitude used to make absolute tolerances relative."""
        return float(max(1.0, np.max(np.abs(self.b)), np.max(self.row_norms)))

    def hyperplane(self, i: int) -> "Hyperplane":
        return Hyperplane(self.A[i], self.b[i])

    def translate(self, t) -> "HPolytope":
        """Return ``P + t``."""
        t = _as_point(t, self.d)
        return HPolytope(self.A, self.b + self.A @ t)

    def with_rows(self, A_extra, b_extra) -> "HPolytope":
        """Return the intersection with additional halfspaces."""
        return HPolytope(np.vstack([self.A, A_extra]),
                         np.concatenate([self.b, np.asarray(b_extra, float)]))

    def intersect_box(self, box: "Box") -> "HPolytope":
        eye = np.eye(self.d)
        return self.with_rows(np.vstack([eye, -eye]),
                              np.concatenate([box.hi, -box.lo]))

    def eroded(self, radius: float) -> "HPolytope":
        """Points whose distance to every facet hyperplane is at least ``radius``."""
        return HPolytope(self.A, self.b - radius * self.row_norms)

    def require_oracle_ready(self) -> None:
        if self.d < 2 or self.n < self.d + 1:
            raise DimensionError(
                f"oracles need d >= 2 and n >= d+1, got d={self.d}, n={self.n}")

    def __repr__(self):
        return f"HPolytope(d={self.d}, n={self.n})"

    def __eq__(self, other):
        if not isinstance(other, HPolytope):
            return NotImplemented
        return np.array_equal(self.A, other.A) and np.array_equal(self.b, other.b)

    __hash__ = None


@dataclass(frozen=True)
class Hyperplane:
    """The set ``{x : a . x = b}``."""

    a: np.ndarray
    b: float

    def __post_init__(self):
        a = _frozen(self.a).reshape(-1)
        if not np.any(a):
            raise DegenerateError("hyperplane normal is zero")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", float(self.b))


@dataclass(frozen=True)
class Ray:
    """Half-line ``{s + t v : t >= 0}``; ``v`` is normalised on construction
    so that ``t`` is Euclidean arc length."""

    s: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        s = _frozen(self.s).reshape(-1)
        v = np.array(self.v, dtype=float).reshape(-1)
        if s.shape != v.shape:
            raise DimensionError(f"apex has dim {s.size}, direction {v.size}")
        norm = np.linalg.norm(v)
        if not norm > 0.0:
            raise DegenerateError("ray direction is zero")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "v", _frozen(v / norm))

    @property
    def d(self) -> int:
        return self.s.size

    def at(self, t: float) -> np.ndarray:
        return self.s + t * self.v


@dataclass(frozen=True)
class Box:
    lo: np.ndarray
    hi: np.ndarray
    _diag: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        lo = _frozen(self.lo).reshape(-1)
        hi = _frozen(self.hi).reshape(-1)
        if lo.shape != hi.shape:
            raise DimensionError("box corners differ in dimension")
        if np.any(lo > hi):
            raise DegenerateError("box has lo > hi in some coordinate")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "_diag", float(np.linalg.norm(hi - lo)))

    @property
    def diagonal(self) -> float:
        return self._diag

    def contains_strictly(self, p) -> bool:
        p = np.asarray(p, float)
        return bool(np.all(p > self.lo) and np.all(p < self.hi))


def _as_point(q, d: int) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    if q.shape[-1] != d:
        raise DimensionError(f"expected points of dimension {d}, got {q.shape}")
    return q


def slack(P: HPolytope, q) -> np.ndarray:
    """``b - A q``; accepts one point ``(d,)`` or a batch ``(m, d)``."""
    q = _as_point(q, P.d)
    return P.b - q @ P.A.T


def membership_direct(P: HPolytope, q, tol: float = MEMBERSHIP_TOL) -> Membership:
    """Reference membership test that checks every inequality."""
    if tol < 0:
        raise ValueError("tol must be non-negative")
    m = float(np.min(slack(P, q)))
    band = tol * P.scale
    if m > band:
        return Membership.INSIDE
    if m < -band:
        return Membership.OUTSIDE
    return Membership.BOUNDARY


def boundary_distance(P: HPolytope, q) -> np.ndarray:
    """Signed clearance ``min_i slack_i / ||a_i||``.

    Exact distance to the boundary for interior points.  For exterior
    points it equals ``-max_i violation_i / ||a_i||``, whose magnitude
    bounds the distance to ``P`` from below.
    """
    return np.min(slack(P, q) / P.row_norms, axis=-1)


def project_onto_hyperplane(p, H: Hyperplane) -> np.ndarray:
    p = _as_point(p, H.a.size)
    return p + ((H.b - H.a @ p) / (H.a @ H.a)) * H.a


def reflect_across_hyperplane(p, H: Hyperplane) -> np.ndarray:
    p = _as_point(p, H.a.size)
    return 2.0 * project_onto_hyperplane(p, H) - p


def ray_hyperplane_param(r: Ray, H: Hyperplane,
                         parallel_tol: float = PARALLEL_TOL) -> float | None:
    """Arc length at which the ray's line meets ``H``; may be negative."""
    if H.a.size != r.d:
        raise DimensionError("ray and hyperplane differ in dimension")
    denom = H.a @ r.v
    if abs(denom) <= parallel_tol * np.linalg.norm(H.a):
        return None
    return float((H.b - H.a @ r.s) / denom)


def ray_hyperplane_intersect(r: Ray, H: Hyperplane,
                             parallel_tol: float = PARALLEL_TOL) -> np.ndarray | None:
    t = ray_hyperplane_param(r, H, parallel_tol)
    return None if t is None else r.at(t)


def ray_box_exit_param(r: Ray, Q: Box) -> float:
    if Q.lo.size != r.d:
        raise DimensionError("ray and box differ in dimension")
    if not Q.contains_strictly(r.s):
        raise NotInteriorError("ray apex is not strictly inside the box")
    with np.errstate(divide="ignore", invalid="ignore"):
        t_hi = np.where(r.v > 0, (Q.hi - r.s) / r.v, np.inf)
        t_lo = np.where(r.v < 0, (Q.lo - r.s) / r.v, np.inf)
    return float(min(t_hi.min(), t_lo.min()))


def ray_box_exit(r: Ray, Q: Box) -> np.ndarray:
    """Point where the ray leaves ``Q`` (slab method)."""
    return r.at(ray_box_exit_param(r, Q))
