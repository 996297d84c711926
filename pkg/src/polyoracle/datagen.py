"""Synthetic polytopes, interior/exterior query sets and brute-force
reference answers for scoring the oracles.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateError, NotInteriorError, ParameterError, UnboundedError
from .geom import HPolytope, Ray, slack, _as_point
from .rand import make_rng, unit_vectors

RAND_MAX = 32767
COEF_MOD = 1000


class Variant(enum.Enum):
    PAPER = "paper"
    SYMMETRIZED = "symmetrized"


@dataclass(frozen=True)
class GenSpec:
    """Parameters of one random polytope ``{x : A x <= rhs}``.

    ``integer_mod`` switches the coefficient draw from the real remainder
    ``U(0, 32767) mod 1000`` to the integer ``randint(0, 32767) % 1000``.
    """

    d: int
    n: int
    rhs: float = 1000.0
    seed: int = 0
    variant: Variant = Variant.PAPER
    integer_mod: bool = False

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        if self.d < 2 or self.n < self.d + 1:
            raise ParameterError(f"need d >= 2 and n >= d+1, got d={self.d}, n={self.n}")
        if not self.rhs > 0:
            raise ParameterError("rhs must be positive")

    def meta(self) -> dict:
        return {"generator": "polyoracle.gen_polytope", "d": self.d, "n": self.n,
                "rhs": repr(float(self.rhs)), "seed": self.seed,
                "variant": self.variant.value, "integer_mod": self.integer_mod}


def coefficient_density_cdf(x):
    """CDF of ``U(0, 32767) mod 1000`` on ``[0, 1000)``.

    Residues below 767 have 33 pre-image intervals, the rest 32.
    """
    x = np.clip(np.asarray(x, float), 0.0, COEF_MOD)
    cut = RAND_MAX % COEF_MOD
    full = RAND_MAX // COEF_MOD
    return (np.minimum(x, cut) * (full + 1) + np.maximum(x - cut, 0.0) * full) / RAND_MAX


def gen_polytope(spec: GenSpec) -> HPolytope:
    rng = make_rng(spec.seed)
    shape = (spec.n, spec.d)
    if spec.integer_mod:
        A = (rng.integers(0, RAND_MAX + 1, size=shape) % COEF_MOD).astype(float)
    else:
        A = np.fmod(rng.uniform(0.0, RAND_MAX, size=shape), COEF_MOD)
    if spec.variant is Variant.SYMMETRIZED:
        A = np.where(rng.random(shape) < 0.5, -A, A)
    zero = np.flatnonzero(~A.any(axis=1))
    if zero.size:
        # an all-zero row is astronomically unlikely; redraw it deterministically
        A[zero, 0] = 1.0
    return HPolytope(A, np.full(spec.n, float(spec.rhs)))


def chord(P: HPolytope, s_vec: np.ndarray, u: np.ndarray) -> tuple[float, float]:
    """Parameter interval ``{t : x + t u in P}`` given the slack vector at ``x``."""
    au = P.A @ u
    with np.errstate(divide="ignore"):
        ratio = s_vec / au
    pos = au > 0
    neg = au < 0
    if not pos.any() or not neg.any():
        raise UnboundedError("hit-and-run chord is unbounded", direction=u)
    return float(ratio[neg].max()), float(ratio[pos].min())


def hit_and_run(P: HPolytope, start, burn: int, count: int, seed: int,
                thin: int = 1) -> np.ndarray:
    """Hit-and-run walk from an interior point.

    Each move draws a uniform direction, intersects the line with ``P`` and
    jumps to a uniform point of the chord.  The first ``burn`` states are
    dropped, then every ``thin``-th state is kept until ``count`` points are
    collected.

    Returns
    -------
    np.ndarray, shape (count, d)
    """
    if burn < 0 or count < 0 or thin < 1:
        raise ParameterError("burn/count must be >= 0 and thin >= 1")
    x = _as_point(start, P.d).astype(float).reshape(-1).copy()
    s_vec = slack(P, x)
    if not np.min(s_vec) > 0:
        raise NotInteriorError("hit-and-run must start strictly inside")
    rng = make_rng(seed)
    out = np.empty((count, P.d))
    total = burn + count * thin
    kept = 0
    for it in range(total):
        u = unit_vectors(rng, 1, P.d)[0]
        lo, hi = chord(P, s_vec, u)
        t = rng.uniform(lo, hi)
        x_new = x + t * u
        s_new = slack(P, x_new)
        if np.min(s_new) > 0:
            x, s_vec = x_new, s_new
        j = it - burn
        if j >= 0 and j % thin == thin - 1:
            out[kept] = x
            kept += 1
    return out


def brute_ray_param(P: HPolytope, r: Ray) -> tuple[float, int]:
    """Smallest positive exit parameter over all facets, and its facet."""
    if not np.min(slack(P, r.s)) > 0:
        raise NotInteriorError("ray apex must be strictly inside")
    av = P.A @ r.v
    pos = av > 0
    if not pos.any():
        raise UnboundedError("ray never leaves the polytope", direction=r.v)
    ratio = np.full(P.n, np.inf)
    ratio[pos] = slack(P, r.s)[pos] / av[pos]
    i = int(np.argmin(ratio))
    return float(ratio[i]), i


def brute_ray_shoot(P: HPolytope, r: Ray) -> tuple[np.ndarray, int]:
    """Exact ray/boundary intersection by checking every facet."""
    t, i = brute_ray_param(P, r)
    return r.at(t), i


def exit_params(P: HPolytope, origin, directions) -> np.ndarray:
    """Vectorised exit parameter from ``origin`` along unit ``directions``.

    Entries are ``inf`` for directions along which ``P`` is unbounded.
    """
    s0 = slack(P, origin)
    av = directions @ P.A.T
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(av > 0, s0 / av, np.inf)
    return ratio.min(axis=1)


def make_outside(P: HPolytope, pts, anchor, margin: float) -> np.ndarray:
    """Push each point radially away from ``anchor`` to ``margin`` beyond the boundary."""
    if not margin > 0:
        raise ParameterError("margin must be positive")
    pts = np.atleast_2d(_as_point(pts, P.d))
    anchor = _as_point(anchor, P.d)
    if not np.min(slack(P, anchor)) > 0:
        raise NotInteriorError("anchor must be strictly inside")
    diff = pts - anchor
    norm = np.linalg.norm(diff, axis=1)
    if np.any(norm == 0):
        raise DegenerateError("a point coincides with the anchor")
    u = diff / norm[:, None]
    t_exit = exit_params(P, anchor, u)
    if np.any(~np.isfinite(t_exit)):
        bad = int(np.flatnonzero(~np.isfinite(t_exit))[0])
        raise UnboundedError(f"point {bad} lies along an unbounded direction", direction=u[bad])
    return anchor + (t_exit + margin)[:, None] * u


def push_outside(P: HPolytope, pts, anchor, clearance: float) -> tuple[np.ndarray, np.ndarray]:
    """Move points radially until some facet is violated by ``clearance``.

    Each output lies on the boundary of ``{a_i x <= b_i + clearance ||a_i||}``,
    so its distance to ``P`` is at least ``clearance``.  Returns the points
    and a mask of the inputs kept (directions along which the offset
    polytope is unbounded are dropped).
    """
    if not clearance > 0:
        raise ParameterError("clearance must be positive")
    pts = np.atleast_2d(_as_point(pts, P.d))
    anchor = _as_point(anchor, P.d)
    diff = pts - anchor
    norm = np.linalg.norm(diff, axis=1)
    keep = norm > 0
    u = diff[keep] / norm[keep, None]
    t = exit_params(P.eroded(-clearance), anchor, u)
    fin = np.isfinite(t)
    keep[np.flatnonzero(keep)[~fin]] = False
    return anchor + t[fin, None] * u[fin], keep


def random_rays(starts, seed: int) -> list[Ray]:
    """One uniformly oriented ray from each start point."""
    starts = np.atleast_2d(np.asarray(starts, float))
    dirs = unit_vectors(make_rng(seed), starts.shape[0], starts.shape[1])
    return [Ray(s, v) for s, v in zip(starts, dirs)]
