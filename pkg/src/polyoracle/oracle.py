"""Membership and boundary oracles built on nearest-neighbour search.

Exact membership asks whether the anchor is a nearest site.  Approximate
membership first rejects queries beyond the far cut ``delta / (2 eps)``,
then compares the anchor against the best candidate an index returns.
The boundary oracles walk a ray inwards from its bounding-box exit,
jumping to the hyperplane of whichever facet site the index reports.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass

import numpy as np

from .ann import ExactIndex
from .errors import NotInteriorError, ParameterError
from .geom import Box, HPolytope, Ray, ray_box_exit_param, ray_hyperplane_param, slack
from .lp import bounding_box
from .sites import SiteSet

log = logging.getLogger(__name__)

# relative slack on squared distances under which the anchor counts as tied
TIE_RTOL = 1e-10
STEP_FRACTION = 1e-2
STEP_FLOOR = 1e-9


class BoundaryStatus(enum.Enum):
    HIT = "hit"
    APEX_NEAR_BOUNDARY = "apex_near_boundary"
    MAX_ITERS = "max_iters"
    NO_INTERSECTION = "no_intersection"


@dataclass(frozen=True)
class BoundaryResult:
    """Point ``s + t v`` returned by a boundary oracle.

    ``path`` lists the arc lengths visited (starting with the box exit) and
    ``visited`` the site indices the index reported along the way.
    """

    point: np.ndarray
    steps: int
    status: BoundaryStatus
    t: float
    path: tuple = ()
    visited: tuple = ()


def epsilon_prime(eps: float, diam: float | None = None, mode: str = "branch2") -> float:
    """ANN approximation factor that separates the anchor from every site.

    ``mode="branch2"`` returns ``sqrt(1 + 2 eps^2) - 1``.  ``mode="paper"``
    returns the two-branch ``min(sqrt(eps^4 diam) - 1, sqrt(1 + 2 eps^2) - 1)``,
    which can be negative; callers must check.
    """
    if not 0 < eps < 1:
        raise ParameterError(f"eps must lie in (0, 1), got {eps}")
    second = math.sqrt(1.0 + 2.0 * eps * eps) - 1.0
    if mode == "branch2":
        return second
    if mode == "paper":
        if diam is None or not diam > 0:
            raise ParameterError("the two-branch formula needs a positive diameter")
        return min(math.sqrt(eps**4 * diam) - 1.0, second)
    raise ParameterError(f"unknown eps-prime mode {mode!r}")


@dataclass(frozen=True)
class OracleConfig:
    eps: float
    eps_prime: float
    diam_ub: float
    delta: float
    far_cut: float
    step: float
    max_iters: int

    @classmethod
    def build(cls, S: SiteSet, eps: float, diam_ub: float, *, scale: float = 1.0,
              eps_prime_mode: str = "branch2", step: float | None = None,
              max_iters: int | None = None) -> "OracleConfig":
        """Derive the far cut, step length and iteration budget.

        The step defaults to ``eps * diam_ub / 100`` (at least
        ``1e-9 * scale``) and the budget to ``10 n + ceil(diam_ub / step)``.
        """
        if not diam_ub > 0 or not math.isfinite(diam_ub):
            raise ParameterError("approximate oracles need a finite positive diameter bound")
        ep = epsilon_prime(eps, diam_ub, eps_prime_mode)
        if not ep > 0:
            log.warning("two-branch eps' is %.4g <= 0; using sqrt(1+2eps^2)-1", ep)
            ep = epsilon_prime(eps)
        if step is None:
            step = max(eps * diam_ub * STEP_FRACTION, STEP_FLOOR * scale)
        if not step > 0:
            raise ParameterError("step must be positive")
        n = len(S) - 1
        if max_iters is None:
            max_iters = 10 * n + math.ceil(diam_ub / step)
        return cls(eps, ep, diam_ub, S.delta, S.delta / (2.0 * eps), step, int(max_iters))


def exact_membership(idx: ExactIndex, q) -> bool | np.ndarray:
    """True iff the anchor is a nearest site; accepts a batch of rows."""
    q = np.asarray(q, float)
    if q.ndim == 2:
        return idx.query_many(q)[0] == 0
    return idx.query(q).index == 0


def _approx_verdict(idx, cfg: OracleConfig, q) -> tuple[bool, int | None]:
    """``(inside, site)``; ``site`` is the closer candidate when outside."""
    q = np.asarray(q, float)
    dq = float(np.linalg.norm(q - idx.anchor))
    if dq >= cfg.far_cut:
        return False, None
    nb = idx.query(q)
    if nb is None or nb.index == 0 or dq <= nb.distance:
        return True, None
    return False, nb.index


def approx_membership(idx, cfg: OracleConfig, q) -> bool:
    """Approximate membership through any index exposing ``anchor`` and ``query``.

    Answers are only meaningful for points farther than ``eps * diam`` from
    the boundary.
    """
    return _approx_verdict(idx, cfg, q)[0]


def _check_apex(P: HPolytope, r: Ray) -> None:
    if r.d != P.d:
        raise ParameterError("ray and polytope differ in dimension")
    if not np.min(slack(P, r.s)) > 0:
        raise NotInteriorError("ray apex must be strictly inside the polytope")


def exact_boundary(P: HPolytope, S: SiteSet, idx: ExactIndex, r: Ray, *,
                   box: Box | None = None, max_iters: int | None = None) -> BoundaryResult:
    """Exact ray shooting by repeated nearest-site hyperplane jumps.

    Every jump lands on the hyperplane of a facet the current point
    violates, so the arc length strictly decreases and no site repeats;
    the walk stops once the anchor is (within rounding) a nearest site.
    """
    _check_apex(P, r)
    if box is None:
        box = bounding_box(P)
    if max_iters is None:
        max_iters = P.n + 2
    t = ray_box_exit_param(r, box)
    path, visited = [t], []
    for steps in range(1, max_iters + 1):
        tied = idx.ties(r.at(t), TIE_RTOL)
        if tied[0] == 0:
            return BoundaryResult(r.at(t), steps, BoundaryStatus.HIT, t,
                                  tuple(path), tuple(visited))
        # several nearest sites only on degenerate inputs: take the deepest jump
        best_t, best_j = None, None
        for j in tied:
            tj = ray_hyperplane_param(r, P.hyperplane(S.facet(int(j))))
            if tj is not None and tj < t and (best_t is None or tj < best_t):
                best_t, best_j = tj, int(j)
        if best_t is None:
            # the current point sits on its site's hyperplane up to rounding
            return BoundaryResult(r.at(t), steps, BoundaryStatus.HIT, t,
                                  tuple(path), tuple(visited))
        if best_t < 0:
            return BoundaryResult(r.at(best_t), steps, BoundaryStatus.NO_INTERSECTION,
                                  best_t, tuple(path), tuple(visited))
        t = best_t
        path.append(t)
        visited.append(best_j)
    return BoundaryResult(r.at(t), max_iters, BoundaryStatus.MAX_ITERS, t,
                          tuple(path), tuple(visited))


def approx_boundary(P: HPolytope, S: SiteSet, idx, cfg: OracleConfig, r: Ray, *,
                    box: Box | None = None) -> BoundaryResult:
    """Approximate ray shooting with an approximate membership oracle.

    A jump that does not move closer to the apex, or an outside verdict
    with no candidate site (far cut, parallel hyperplane), is replaced by a
    step of length ``cfg.step`` towards the apex.  The walk returns one
    step past the first point judged inside, or one step past the apex if
    it walks behind it.
    """
    _check_apex(P, r)
    if box is None:
        box = bounding_box(P)
    step = cfg.step
    t = ray_box_exit_param(r, box)
    path, visited = [t], []
    for steps in range(1, cfg.max_iters + 1):
        inside, site = _approx_verdict(idx, cfg, r.at(t))
        if inside:
            return BoundaryResult(r.at(t + step), steps, BoundaryStatus.HIT, t + step,
                                  tuple(path), tuple(visited))
        t_prev = t
        t = None
        if site is not None:
            visited.append(site)
            t = ray_hyperplane_param(r, P.hyperplane(S.facet(site)))
        if t is None or abs(t) >= abs(t_prev):
            t = t_prev - step
        path.append(t)
        if t < 0:
            return BoundaryResult(r.at(step), steps, BoundaryStatus.APEX_NEAR_BOUNDARY, step,
                                  tuple(path), tuple(visited))
    return BoundaryResult(r.at(t), cfg.max_iters, BoundaryStatus.MAX_ITERS, t,
                          tuple(path), tuple(visited))
