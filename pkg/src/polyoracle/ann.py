"""Nearest-neighbour indices over a site set.

``ExactIndex`` is a linear scan over the anchor and all sites.
``LshIndex`` hashes the sites (never the anchor) with random-hyperplane
signs after translating the anchor to the origin, and answers queries by
multi-probing the buckets whose keys differ from the query key in the bits
with the smallest projection margins.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DimensionError, ParameterError
from .rand import make_rng
from .sites import SiteSet

# below this many bits all 2^k probe masks are scored at once
_ENUM_MAX_BITS = 12
_CHUNK = 1 << 22


class Neighbor(NamedTuple):
    index: int
    distance: float


def lsh_defaults(n: int) -> tuple[int, int, int]:
    """``(k, l, probes)`` used for a polytope with ``n`` facets."""
    return (11, 1, 40) if n >= 10000 else (8, 1, 150)


class ExactIndex:
    """Linear scan.  Ties go to the anchor (index 0), then the lowest index."""

    def __init__(self, points):
        points = np.asarray(points, dtype=float)
        if points.ndim != 2 or points.shape[0] == 0:
            raise ParameterError("exact index needs at least one point")
        self.points = points

    @property
    def anchor(self) -> np.ndarray:
        return self.points[0]

    def sq_distances(self, q) -> np.ndarray:
        q = np.asarray(q, float)
        if q.shape != (self.points.shape[1],):
            raise DimensionError(f"query has shape {q.shape}")
        diff = self.points - q
        return np.einsum("ij,ij->i", diff, diff)

    def query(self, q) -> Neighbor:
        d2 = self.sq_distances(q)
        j = int(np.argmin(d2))
        return Neighbor(j, float(np.sqrt(d2[j])))

    def query_many(self, Q) -> tuple[np.ndarray, np.ndarray]:
        """Vectorised ``query`` over the rows of ``Q``."""
        Q = np.atleast_2d(np.asarray(Q, float))
        N, d = self.points.shape
        if Q.shape[1] != d:
            raise DimensionError(f"queries have dimension {Q.shape[1]}, index {d}")
        idx = np.empty(Q.shape[0], dtype=np.int64)
        dist = np.empty(Q.shape[0])
        step = max(1, _CHUNK // (N * d))
        for lo in range(0, Q.shape[0], step):
            diff = self.points[None, :, :] - Q[lo:lo + step, None, :]
            d2 = np.einsum("qij,qij->qi", diff, diff)
            j = np.argmin(d2, axis=1)
            idx[lo:lo + step] = j
            dist[lo:lo + step] = np.sqrt(d2[np.arange(j.size), j])
        return idx, dist

    def ties(self, q, rtol: float) -> np.ndarray:
        """Indices whose squared distance is within ``rtol`` of the minimum."""
        d2 = self.sq_distances(q)
        best = d2.min()
        return np.flatnonzero(d2 <= best + rtol * max(best, np.finfo(float).tiny))


def build_exact(S: SiteSet) -> ExactIndex:
    return ExactIndex(S.points)


def query_exact(idx: ExactIndex, q) -> Neighbor:
    return idx.query(q)


def sample_hyperplanes(rng: np.random.Generator, count: int, d: int) -> np.ndarray:
    """Unit normals of ``count`` random hyperplanes through the origin."""
    g = rng.standard_normal((count, d))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def hash_bits(planes: np.ndarray, X) -> np.ndarray:
    """Sign bits ``g . x > 0`` for each plane (last axis)."""
    return (np.asarray(X) @ planes.T) > 0


def _pack(bits: np.ndarray) -> np.ndarray:
    weights = np.uint64(1) << np.arange(bits.shape[-1], dtype=np.uint64)
    return (bits.astype(np.uint64) * weights).sum(axis=-1, dtype=np.uint64)


def probe_masks_heap(margins: np.ndarray, probes: int) -> list[int]:
    """Flip masks in increasing order of summed margin, via a heap.

    The first mask is always 0 (the query's own bucket).  Perturbation sets
    are grown over margin ranks with the usual shift/expand moves, which
    visits every subset exactly once in score order.
    """
    k = margins.size
    order = np.argsort(margins, kind="stable")
    z = margins[order]
    out = [0]
    heap = [(float(z[0]), (0,))] if k else []
    while heap and len(out) < min(probes, 1 << k):
        score, ranks = heapq.heappop(heap)
        out.append(sum(1 << int(order[r]) for r in ranks))
        last = ranks[-1]
        if last + 1 < k:
            heapq.heappush(heap, (score - z[last] + z[last + 1], ranks[:-1] + (last + 1,)))
            heapq.heappush(heap, (score + z[last + 1], ranks + (last + 1,)))
    return out


class _Table:
    __slots__ = ("planes", "keys", "starts", "rows", "points")

    def __init__(self, planes, X):
        self.planes = planes
        keys = _pack(hash_bits(planes, X))
        order = np.argsort(keys, kind="stable")
        ukeys, starts = np.unique(keys[order], return_index=True)
        self.keys = ukeys
        self.starts = np.append(starts, order.size)
        self.rows = order
        # bucket members sit in consecutive rows
        self.points = np.ascontiguousarray(X[order])


@dataclass(frozen=True)
class LshIndex:
    """Multi-probe hyperplane LSH over a site set (anchor excluded).

    Attributes
    ----------
    k, l, probes, seed : build parameters
    centered : always True; points are hashed relative to the anchor
    """

    sites: SiteSet
    k: int
    l: int
    probes: int
    seed: int
    tables: tuple
    centered: bool = True

    @property
    def anchor(self) -> np.ndarray:
        return self.sites.anchor

    def _masks(self, margins: np.ndarray) -> np.ndarray:
        limit = min(self.probes, 1 << self.k)
        if self.k <= _ENUM_MAX_BITS:
            bits = _mask_bits(self.k)
            score = bits @ margins
            top = np.argsort(score, kind="stable")[:limit]
            return top.astype(np.uint64)
        return np.array(probe_masks_heap(margins, limit), dtype=np.uint64)

    def candidates(self, q) -> np.ndarray:
        """Site indices (1-based point numbering) found in the probed buckets."""
        x = np.asarray(q, float) - self.anchor
        found = []
        for tab in self.tables:
            proj = tab.planes @ x
            keys = _pack(proj > 0) ^ self._masks(np.abs(proj))
            for p in _hits(tab.keys, keys):
                found.append(tab.rows[tab.starts[p]:tab.starts[p + 1]])
        if not found:
            return np.empty(0, dtype=np.int64)
        return np.concatenate(found) + 1

    def query(self, q) -> Neighbor | None:
        """Closest site among the probed buckets, or ``None`` if all are empty."""
        q = np.asarray(q, float)
        if q.shape != (self.sites.d,):
            raise DimensionError(f"query has shape {q.shape}")
        x = q - self.anchor
        best_j, best_d2 = -1, np.inf
        for tab in self.tables:
            proj = tab.planes @ x
            keys = _pack(proj > 0) ^ self._masks(np.abs(proj))
            pos = _hits(tab.keys, keys)
            if pos.size == 0:
                continue
            lo = tab.starts[pos]
            counts = tab.starts[pos + 1] - lo
            total = int(counts.sum())
            offs = np.repeat(lo - np.cumsum(counts) + counts, counts) + np.arange(total)
            diff = tab.points[offs] - x
            d2 = np.einsum("ij,ij->i", diff, diff)
            m = d2.min()
            if m <= best_d2:
                rows = tab.rows[offs[d2 == m]]
                j = int(rows.min()) + 1
                if m < best_d2 or j < best_j:
                    best_j, best_d2 = j, m
        if best_j < 0:
            return None
        # report the distance with the same arithmetic as the exact scan
        diff = self.sites.points[best_j] - q
        return Neighbor(best_j, float(np.sqrt(diff @ diff)))


def _hits(ukeys: np.ndarray, keys: np.ndarray) -> np.ndarray:
    pos = np.searchsorted(ukeys, keys)
    ok = pos < ukeys.size
    pos = pos[ok]
    return pos[ukeys[pos] == keys[ok]]


_MASK_CACHE: dict[int, np.ndarray] = {}


def _mask_bits(k: int) -> np.ndarray:
    bits = _MASK_CACHE.get(k)
    if bits is None:
        masks = np.arange(1 << k, dtype=np.uint64)
        bits = ((masks[:, None] >> np.arange(k, dtype=np.uint64)) & np.uint64(1)).astype(float)
        _MASK_CACHE[k] = bits
    return bits


def build_lsh(S: SiteSet, k: int, l: int, probes: int, seed: int) -> LshIndex:
    """Hash every site of ``S`` (anchor excluded) into ``l`` tables of ``k`` bits."""
    for name, val in (("k", k), ("l", l), ("probes", probes)):
        if int(val) != val or val < 1:
            raise ParameterError(f"{name} must be a positive integer, got {val!r}")
    if k > 63:
        raise ParameterError("k is limited to 63 bits")
    rng = make_rng(seed)
    X = S.sites - S.anchor
    tables = tuple(_Table(sample_hyperplanes(rng, k, S.d), X) for _ in range(l))
    return LshIndex(S, int(k), int(l), int(probes), int(seed), tables)


def query_lsh(idx: LshIndex, q) -> Neighbor | None:
    return idx.query(q)
