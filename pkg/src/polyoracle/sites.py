"""Voronoi site sets whose anchor cell is exactly the polytope.

Reflecting an interior anchor across every facet hyperplane gives ``n``
sites; each hyperplane is then the perpendicular bisector between the
anchor and its mirror image, so a point lies in the polytope exactly when
no site is strictly closer to it than the anchor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotInteriorError
from .fileio import write_points
from .geom import HPolytope, slack, _as_point
from .lp import chebyshev_center

INTERIOR_MARGIN = 1e-9


@dataclass(frozen=True)
class SiteSet:
    """Anchor plus reflected sites, stored contiguously.

    ``points[0]`` is the anchor and ``points[j]`` for ``j >= 1`` is the
    mirror image of the anchor across facet ``facet_of[j - 1]``.
    """

    points: np.ndarray
    facet_of: np.ndarray
    delta: float

    @property
    def anchor(self) -> np.ndarray:
        return self.points[0]

    @property
    def sites(self) -> np.ndarray:
        return self.points[1:]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]

    def facet(self, j: int) -> int:
        """Facet index behind point ``j`` (``j >= 1``)."""
        if j < 1:
            raise IndexError("the anchor has no facet")
        return int(self.facet_of[j - 1])

    def dump(self, path, meta: dict | None = None) -> None:
        write_points(path, self.points, meta)


def build_sites(P: HPolytope, p_star, interior_margin: float = INTERIOR_MARGIN) -> SiteSet:
    """Reflect ``p_star`` across every facet hyperplane of ``P``.

    Raises
    ------
    NotInteriorError
        If the anchor's smallest slack is below ``interior_margin * P.scale``.
    """
    p_star = _as_point(p_star, P.d).reshape(-1)
    s = slack(P, p_star)
    if not np.min(s) >= interior_margin * P.scale:
        raise NotInteriorError(
            f"anchor is not strictly interior (min slack {np.min(s):.3g})")
    # p_i = p* + 2 (b_i - a_i p*) / ||a_i||^2 * a_i
    coef = 2.0 * s / P.row_norms**2
    points = np.empty((P.n + 1, P.d))
    points[0] = p_star
    points[1:] = p_star + coef[:, None] * P.A
    points.setflags(write=False)
    facet_of = np.arange(P.n)
    facet_of.setflags(write=False)
    delta = float(np.max(np.linalg.norm(points[1:] - p_star, axis=1)))
    return SiteSet(points, facet_of, delta)


def anchor_from_chebyshev(P: HPolytope) -> np.ndarray:
    return chebyshev_center(P).c
