"""Benchmark harness: preprocessing, membership and boundary runs, CSV reports.

Interior query points come from a hit-and-run walk started at the anchor;
exterior points are the same points pushed radially past the boundary.
Only queries whose clearance exceeds ``eps * diam_ub`` are scored unless
clearance filtering is off.

Polytopes that are unbounded (the plain generator's output always is) are
sampled inside the truncation ``P ∩ [anchor - W, anchor + W]`` with
``W = delta``, twice the farthest facet hyperplane distance from the
anchor; ``diam_ub`` then refers to that truncated body.
"""

from __future__ import annotations

import csv
import logging
import os
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields

import numpy as np

from .ann import build_exact, build_lsh, lsh_defaults
from .datagen import brute_ray_param, hit_and_run, push_outside, random_rays
from .errors import UnboundedError
from .geom import Box, HPolytope, Membership, boundary_distance, membership_direct
from .lp import bounding_box
from .oracle import (BoundaryStatus, OracleConfig, approx_boundary, approx_membership,
                     exact_boundary, exact_membership)
from .sites import anchor_from_chebyshev, build_sites

log = logging.getLogger(__name__)

PHASES = ("PREPROCESS", "MEMBERSHIP", "BOUNDARY")


@dataclass
class BenchRow:
    d: int
    n: int
    instance: str
    phase: str
    method: str
    wall_time_s: float
    mean_time_s: float
    queries: int
    success_rate: float
    avg_steps: float
    dist_min: float
    dist_max: float
    dist_avg: float
    k: int
    l: int
    probes: int
    eps: float
    seed: int


COLUMNS = tuple(f.name for f in fields(BenchRow))
NAN = float("nan")


def write_csv(rows, fh, meta: dict | None = None) -> None:
    """Metadata lines (``#``), one header row, then ``rows``."""
    for key, val in (meta or {}).items():
        fh.write(f"# {key}: {val}\n")
    writer = csv.DictWriter(fh, fieldnames=COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _fmt(v) for k, v in asdict(row).items()})


def _fmt(v):
    if isinstance(v, float):
        return "nan" if v != v else repr(v)
    return v


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("POLYORACLE_THREADS", "1")))
    except ValueError:
        return 1


def _timed_map(fn, items, threads):
    """Apply ``fn`` to each item; returns (results, wall seconds)."""
    t0 = time.perf_counter()
    if threads <= 1 or len(items) < 2:
        out = [fn(x) for x in items]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            out = list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * threads))))
    return out, time.perf_counter() - t0


@dataclass
class Prepared:
    """Everything built from one polytope before queries run."""

    P: HPolytope
    anchor: np.ndarray
    sites: object
    lsh: object
    exact: object
    body: HPolytope
    box: Box
    bounded: bool
    cfg: OracleConfig
    preprocess_s: float
    params: tuple


def choose_anchor(P, how):
    if how == "origin":
        return np.zeros(P.d)
    if how == "chebyshev":
        return anchor_from_chebyshev(P)
    raise ValueError(f"unknown anchor choice {how!r}")


def prepare(P: HPolytope, *, eps: float, k=None, l=None, probes=None, seed: int = 0,
            anchor: str = "origin", eps_prime_mode: str = "branch2",
            repeats: int = 3, need_bounded: bool = False) -> Prepared:
    """Build sites and indices; the preprocessing time is the median of ``repeats``.

    Timed work covers the anchor, the site set and the LSH index, i.e. the
    cost of turning a polytope into a membership structure.
    """
    dk, dl, dp = lsh_defaults(P.n)
    k, l, probes = k or dk, l or dl, probes or dp
    times = []
    for _ in range(max(1, repeats)):
        t0 = time.perf_counter()
        p_star = choose_anchor(P, anchor)
        S = build_sites(P, p_star)
        lsh = build_lsh(S, k, l, probes, seed)
        times.append(time.perf_counter() - t0)
    exact = build_exact(S)
    try:
        box = bounding_box(P)
        body, bounded = P, True
    except UnboundedError:
        if need_bounded:
            raise
        w = S.delta
        body = P.intersect_box(Box(p_star - w, p_star + w))
        box = bounding_box(body)
        bounded = False
        log.info("unbounded polytope: sampling inside anchor +/- %.4g", w)
    cfg = OracleConfig.build(S, eps, box.diagonal, scale=P.scale, eps_prime_mode=eps_prime_mode)
    return Prepared(P, p_star, S, lsh, exact, body, box, bounded, cfg,
                    statistics.median(times), (k, l, probes))


def sample_queries(prep: Prepared, count: int, seed: int, clearance: bool = True,
                   margin: float | None = None, max_rounds: int = 50):
    """Interior and exterior query points with ground-truth labels.

    Exterior points are pushed out until their certified clearance is
    ``margin`` (default ``2 eps diam_ub``).

    Returns ``(inside_pts, outside_pts)``; either may hold fewer than
    ``count`` rows if the filter rejects too many candidates.
    """
    P, cfg = prep.P, prep.cfg
    if count == 0:
        return np.empty((0, P.d)), np.empty((0, P.d))
    if margin is None:
        margin = 2.0 * cfg.eps * cfg.diam_ub
    need = cfg.eps * cfg.diam_ub if clearance else 0.0
    inside, outside = [], []
    start = prep.anchor
    n_in = n_out = 0
    for rnd in range(max_rounds):
        pts = hit_and_run(prep.body, start, burn=10 * P.d if rnd == 0 else 0,
                          count=count, seed=seed + 7919 * rnd)
        start = pts[-1]
        clr = boundary_distance(P, pts)
        keep = pts[clr > need] if clearance else pts[clr > 0]
        inside.append(keep)
        n_in += keep.shape[0]
        out, _ = push_outside(P, pts, prep.anchor, margin)
        clr_out = -boundary_distance(P, out) if out.size else np.empty(0)
        keep = out[clr_out > need] if clearance else out[clr_out > 0]
        outside.append(keep)
        n_out += keep.shape[0]
        if n_in >= count and n_out >= count:
            break
    inside = np.vstack(inside)[:count]
    outside = np.vstack(outside)[:count]
    if inside.shape[0] < count or outside.shape[0] < count:
        log.warning("clearance filter kept %d inside / %d outside of %d requested",
                    inside.shape[0], outside.shape[0], count)
    return inside, outside


def _stats(values):
    if len(values) == 0:
        return NAN, NAN, NAN
    arr = np.asarray(values, float)
    return float(arr.min()), float(arr.max()), float(arr.mean())


def membership_rows(prep: Prepared, queries_in, queries_out, *, instance: str, seed: int,
                    threads: int = 1, methods=("lsh", "exact", "naive")) -> list[BenchRow]:
    P, cfg = prep.P, prep.cfg
    Q = np.vstack([queries_in, queries_out]) if len(queries_in) + len(queries_out) else np.empty((0, P.d))
    truth = np.array([True] * len(queries_in) + [False] * len(queries_out))
    k, l, probes = prep.params
    rows = []
    fns = {
        "lsh": lambda q: approx_membership(prep.lsh, cfg, q),
        "exact": lambda q: exact_membership(prep.exact, q),
        "naive": lambda q: membership_direct(P, q) is not Membership.OUTSIDE,
    }
    for method in methods:
        answers, wall = _timed_map(fns[method], list(Q), threads)
        m = len(answers)
        rate = float(np.mean(np.array(answers, bool) == truth)) if m else NAN
        rows.append(BenchRow(P.d, P.n, instance, "MEMBERSHIP", method, wall,
                             wall / m if m else NAN, m, rate, NAN, NAN, NAN, NAN,
                             k, l, probes, cfg.eps, seed))
    return rows


def preprocess_row(prep: Prepared, *, instance: str, seed: int) -> BenchRow:
    k, l, probes = prep.params
    return BenchRow(prep.P.d, prep.P.n, instance, "PREPROCESS", "lsh", prep.preprocess_s,
                    prep.preprocess_s, 0, NAN, NAN, NAN, NAN, NAN, k, l, probes,
                    prep.cfg.eps, seed)


def bench_membership(P: HPolytope, *, eps: float, k=None, l=None, probes=None,
                     queries: int = 1000, seed: int = 0, anchor: str = "origin",
                     clearance: bool = True, margin: float | None = None,
                     eps_prime_mode: str = "branch2", instance: str = "0",
                     threads: int | None = None) -> list[BenchRow]:
    prep = prepare(P, eps=eps, k=k, l=l, probes=probes, seed=seed, anchor=anchor,
                   eps_prime_mode=eps_prime_mode)
    if queries == 0:
        return []
    q_in, q_out = sample_queries(prep, queries, seed, clearance=clearance, margin=margin)
    rows = [preprocess_row(prep, instance=instance, seed=seed)]
    rows += membership_rows(prep, q_in, q_out, instance=instance, seed=seed,
                            threads=threads or worker_count())
    return rows


def bench_boundary(P: HPolytope, *, eps: float, rays: int = 1000, seed: int = 0,
                   mode: str = "approx", k=None, l=None, probes=None,
                   anchor: str = "chebyshev", instance: str = "0",
                   threads: int | None = None) -> list[BenchRow]:
    """Shoot rays from hit-and-run points and compare with brute force."""
    if mode not in ("approx", "exact"):
        raise ValueError(f"unknown boundary mode {mode!r}")
    prep = prepare(P, eps=eps, k=k, l=l, probes=probes, seed=seed, anchor=anchor,
                   need_bounded=True)
    if rays == 0:
        return []
    starts = hit_and_run(P, prep.anchor, burn=10 * P.d, count=rays, seed=seed)
    ray_set = random_rays(starts, seed + 1)
    if mode == "exact":
        def shoot(r):
            return exact_boundary(P, prep.sites, prep.exact, r, box=prep.box)
    else:
        def shoot(r):
            return approx_boundary(P, prep.sites, prep.lsh, prep.cfg, r, box=prep.box)
    threads = threads or worker_count()
    results, wall = _timed_map(shoot, ray_set, threads)
    refs, wall_ref = _timed_map(lambda r: r.at(brute_ray_param(P, r)[0]), ray_set, threads)
    dists = [float(np.linalg.norm(res.point - ref)) for res, ref in zip(results, refs)]
    ok = [res.status in (BoundaryStatus.HIT, BoundaryStatus.APEX_NEAR_BOUNDARY) for res in results]
    k, l, probes = prep.params
    dmin, dmax, davg = _stats(dists)
    m = len(results)
    return [
        preprocess_row(prep, instance=instance, seed=seed),
        BenchRow(P.d, P.n, instance, "BOUNDARY", mode, wall, wall / m, m,
                 float(np.mean(ok)), float(np.mean([r.steps for r in results])),
                 dmin, dmax, davg, k, l, probes, eps, seed),
        BenchRow(P.d, P.n, instance, "BOUNDARY", "naive", wall_ref, wall_ref / m, m,
                 1.0, 1.0, 0.0, 0.0, 0.0, k, l, probes, eps, seed),
    ]


def sweep(P: HPolytope, *, ks, ls, probes_list, eps: float, queries: int = 1000,
          seed: int = 0, anchor: str = "origin", clearance: bool = True,
          eps_prime_mode: str = "branch2", instance: str = "0",
          threads: int | None = None) -> list[BenchRow]:
    """LSH membership accuracy and time over the grid ``ks x ls x probes_list``.

    Every grid point answers the same query set.
    """
    if not (len(ks) and len(ls) and len(probes_list)):
        raise ValueError("empty parameter grid")
    base = prepare(P, eps=eps, seed=seed, anchor=anchor, eps_prime_mode=eps_prime_mode,
                   repeats=1)
    q_in, q_out = sample_queries(base, queries, seed, clearance=clearance)
    rows = []
    for k in ks:
        for l in ls:
            for pr in probes_list:
                lsh = build_lsh(base.sites, k, l, pr, seed)
                prep = Prepared(**{**base.__dict__, "lsh": lsh, "params": (k, l, pr)})
                rows += membership_rows(prep, q_in, q_out, instance=instance, seed=seed,
                                        threads=threads or worker_count(), methods=("lsh",))
    return rows
