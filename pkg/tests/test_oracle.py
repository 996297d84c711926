import logging
import math

import numpy as np
import pytest

from polyoracle.ann import build_exact, build_lsh, lsh_defaults
from polyoracle.datagen import GenSpec, brute_ray_param, gen_polytope, hit_and_run
from polyoracle.errors import NotInteriorError, ParameterError
from polyoracle.geom import HPolytope, Membership, Ray, boundary_distance, membership_direct, slack
from polyoracle.lp import bounding_box, chebyshev_center
from polyoracle.oracle import (BoundaryStatus, OracleConfig, approx_boundary, approx_membership,
                               epsilon_prime, exact_boundary, exact_membership)
from polyoracle.rand import make_rng, unit_vectors
from polyoracle.sites import build_sites

from conftest import bounded_symmetrized, mixed_queries


def needle():
    """Triangle with vertices (0, -1), (0, 1), (4, 0)."""
    return HPolytope([[-1, 0], [1, 4], [1, -4]], [0, 4, 4])


class ExplodingIndex:
    """Index stub that fails if the oracle consults it."""

    def __init__(self, anchor):
        self.anchor = np.asarray(anchor, float)

    def query(self, q):
        raise AssertionError("index must not be queried")


class TestEpsilonPrime:
    def test_second_branch(self):
        assert epsilon_prime(0.1) == pytest.approx(math.sqrt(1.02) - 1)
        assert epsilon_prime(0.1) == pytest.approx(0.0099505, abs=1e-7)

    def test_small_eps(self):
        vals = [epsilon_prime(e) for e in (1e-1, 1e-2, 1e-3, 1e-4)]
        assert all(a > b > 0 for a, b in zip(vals, vals[1:]))
        assert vals[-1] < 1e-7

    def test_two_branch_negative(self):
        first = math.sqrt(0.5**4 * 8) - 1
        assert first < 0
        assert epsilon_prime(0.5, 8.0, mode="paper") == pytest.approx(first)
        assert epsilon_prime(0.5, 8.0) == pytest.approx(math.sqrt(1.5) - 1)

    def test_two_branch_small_eps_limit(self):
        # the first branch tends to -1, not 0, as eps shrinks
        assert epsilon_prime(1e-3, 8.0, mode="paper") == pytest.approx(-1.0, abs=1e-5)

    @pytest.mark.parametrize("eps", [0.0, 1.0, -0.1, 1.5])
    def test_range(self, eps):
        with pytest.raises(ParameterError):
            epsilon_prime(eps)

    def test_config_falls_back(self, square, caplog):
        S = build_sites(square, [0, 0])
        with caplog.at_level(logging.WARNING, logger="polyoracle.oracle"):
            cfg = OracleConfig.build(S, 0.5, 8.0, eps_prime_mode="paper")
        assert cfg.eps_prime == pytest.approx(math.sqrt(1.5) - 1)
        assert "sqrt(1+2eps^2)-1" in caplog.text


class TestOracleConfig:
    def test_fields(self, square):
        S = build_sites(square, [0, 0])
        cfg = OracleConfig.build(S, 0.1, 2 * math.sqrt(2))
        assert cfg.far_cut == pytest.approx(S.delta / 0.2)
        assert cfg.step == pytest.approx(0.1 * 2 * math.sqrt(2) / 100)
        assert cfg.max_iters == 10 * 4 + math.ceil(cfg.diam_ub / cfg.step)

    def test_step_floor(self, square):
        S = build_sites(square, [0, 0])
        cfg = OracleConfig.build(S, 1e-9, 1e-3, scale=10.0)
        assert cfg.step == pytest.approx(1e-8)

    @pytest.mark.parametrize("diam", [0.0, math.inf, -1.0])
    def test_rejects_diameter(self, square, diam):
        with pytest.raises(ParameterError):
            OracleConfig.build(build_sites(square, [0, 0]), 0.1, diam)


class TestExactMembership:
    def test_square(self, square):
        idx = build_exact(build_sites(square, [0, 0]))
        assert exact_membership(idx, (0.5, 0.5))
        assert not exact_membership(idx, (1.5, 0))
        assert exact_membership(idx, (1.0, 0.0))

    @pytest.mark.parametrize("d, n, count", [(10, 100, 60_000), (40, 1000, 30_000),
                                             (100, 5000, 10_000)])
    def test_agrees_with_halfspaces(self, d, n, count, rng):
        P = gen_polytope(GenSpec(d, n, seed=d))
        idx = build_exact(build_sites(P, np.zeros(d)))
        Q = mixed_queries(P, np.zeros(d), count, rng)
        m = slack(P, Q).min(axis=1)
        clear = np.abs(m) > 1e-9 * P.scale
        got = exact_membership(idx, Q[clear])
        np.testing.assert_array_equal(got, m[clear] > 0)
        assert 0.2 < got.mean() < 0.8


class TestApproxMembership:
    @pytest.fixture
    def setup(self):
        P, box, _ = bounded_symmetrized(10, 300, seed=3)
        S = build_sites(P, chebyshev_center(P).c)
        cfg = OracleConfig.build(S, 0.05, box.diagonal, scale=P.scale)
        return P, S, cfg

    def test_anchor_inside(self, setup):
        P, S, cfg = setup
        assert approx_membership(build_lsh(S, 8, 1, 150, 0), cfg, S.anchor)

    def test_far_cut_skips_index(self, setup):
        P, S, cfg = setup
        u = unit_vectors(make_rng(0), 1, P.d)[0]
        q = S.anchor + 10 * cfg.far_cut * u
        assert not approx_membership(ExplodingIndex(S.anchor), cfg, q)

    def test_no_candidate_means_inside(self, square):
        S = build_sites(square, [0, 0])
        cfg = OracleConfig.build(S, 0.1, 2 * math.sqrt(2))

        class Empty(ExplodingIndex):
            def query(self, q):
                return None

        assert approx_membership(Empty(S.anchor), cfg, (1.5, 0))

    def test_exact_index_is_exact_off_slab(self, setup, rng):
        """With an exact index the only error source left is the far cut."""
        P, S, cfg = setup
        idx = build_exact(S)
        Q = mixed_queries(P, S.anchor, 3000, rng)
        clear = np.abs(boundary_distance(P, Q)) > cfg.eps * cfg.diam_ub
        for q in Q[clear]:
            truth = membership_direct(P, q) is Membership.INSIDE
            assert approx_membership(idx, cfg, q) == truth

    def test_interior_never_rejected(self, setup, rng):
        """No site beats the anchor inside, so a weak index only errs outside."""
        P, S, cfg = setup
        lsh = build_lsh(S, 6, 1, 4, 0)
        Q = mixed_queries(P, S.anchor, 2000, rng)
        inside = Q[slack(P, Q).min(axis=1) > 1e-9 * P.scale]
        assert len(inside) > 500
        assert all(approx_membership(lsh, cfg, q) for q in inside)


class TestSeparation:
    @pytest.mark.parametrize("eps", [0.05, 0.1, 0.2])
    def test_ratio_on_eroded_body(self, eps):
        P, box, _ = bounded_symmetrized(2, 20, seed=0)
        ball = chebyshev_center(P)
        need = eps * box.diagonal
        assert ball.rc > need
        S = build_sites(P, ball.c)
        inner = P.eroded(need)
        Q = hit_and_run(inner, ball.c, burn=50, count=5000, seed=1)
        assert np.all(boundary_distance(P, Q) > need)
        num = ((Q[:, None, :] - S.sites[None]) ** 2).sum(-1)
        den = ((Q - S.anchor) ** 2).sum(1)[:, None]
        assert (num / den).min() >= 1 + 2 * eps**2 - 1e-9


class TestExactBoundary:
    def test_square(self, square):
        S = build_sites(square, [0, 0])
        res = exact_boundary(square, S, build_exact(S), Ray((0, 0), (2, 1)))
        np.testing.assert_allclose(res.point, (1, 0.5))
        assert res.steps == 1 and res.status is BoundaryStatus.HIT

    def test_triangle(self, tri):
        S = build_sites(tri, chebyshev_center(tri).c)
        res = exact_boundary(tri, S, build_exact(S), Ray((0.2, 0.2), (1, 1)))
        np.testing.assert_allclose(res.point, (0.5, 0.5), atol=1e-12)
        assert res.status is BoundaryStatus.HIT

    def test_apex_outside(self, square):
        S = build_sites(square, [0, 0])
        with pytest.raises(NotInteriorError):
            exact_boundary(square, S, build_exact(S), Ray((1.5, 0), (1, 0)))

    def test_random_rays_match_brute_force(self):
        P, box, _ = bounded_symmetrized(10, 200, seed=0)
        c = chebyshev_center(P).c
        S = build_sites(P, c)
        idx = build_exact(S)
        dirs = unit_vectors(make_rng(8), 1000, P.d)
        for v in dirs:
            r = Ray(c, v)
            res = exact_boundary(P, S, idx, r, box=box)
            t_ref, _ = brute_ray_param(P, r)
            assert res.status is BoundaryStatus.HIT
            assert np.linalg.norm(res.point - r.at(t_ref)) <= 1e-7 * P.scale
            assert membership_direct(P, res.point, tol=1e-7) is Membership.BOUNDARY
            path = np.array(res.path)
            assert np.all(np.diff(path) < 0)
            assert len(set(res.visited)) == len(res.visited)


class TestApproxBoundary:
    def test_square_with_exact_index(self, square):
        S = build_sites(square, [0, 0])
        box = bounding_box(square)
        cfg = OracleConfig.build(S, 0.01, box.diagonal, scale=square.scale)
        res = approx_boundary(square, S, build_exact(S), cfg, Ray((0, 0), (1, 0)), box=box)
        assert res.status is BoundaryStatus.HIT
        assert np.linalg.norm(res.point - (1, 0)) <= 0.01 * box.diagonal

    def test_needle_apex_case(self):
        P = needle()
        S = build_sites(P, (0.5, 0))
        box = bounding_box(P)
        cfg = OracleConfig.build(S, 0.5, box.diagonal, scale=P.scale)
        r = Ray((2.5, 0), (1, 0))
        # the far cut rejects every point of the ray beyond the apex
        assert np.linalg.norm(r.s - S.anchor) >= cfg.far_cut
        res = approx_boundary(P, S, build_exact(S), cfg, r, box=box)
        assert res.status is BoundaryStatus.APEX_NEAR_BOUNDARY
        np.testing.assert_allclose(res.point, r.at(cfg.step))
        assert boundary_distance(P, r.s) <= cfg.eps * cfg.diam_ub + cfg.step

    def test_steps_make_progress(self):
        P = needle()
        S = build_sites(P, (0.5, 0))
        box = bounding_box(P)
        cfg = OracleConfig.build(S, 0.5, box.diagonal, scale=P.scale)
        res = approx_boundary(P, S, build_exact(S), cfg, Ray((2.5, 0), (1, 0)), box=box)
        np.testing.assert_allclose(-np.diff(res.path), cfg.step)
        assert res.steps <= cfg.max_iters

    @pytest.mark.parametrize("d, n", [(2, 50), (10, 500)])
    def test_distance_surrogate_bound(self, d, n):
        P, box, _ = bounded_symmetrized(d, n, seed=1)
        c = chebyshev_center(P).c
        S = build_sites(P, c)
        cfg = OracleConfig.build(S, 0.05, box.diagonal, scale=P.scale)
        lsh = build_lsh(S, *lsh_defaults(n), seed=0)
        starts = hit_and_run(P, c, burn=20, count=300, seed=2)
        dirs = unit_vectors(make_rng(3), 300, d)
        bound = cfg.eps * cfg.diam_ub + 1e-7 * P.scale
        for s, v in zip(starts, dirs):
            res = approx_boundary(P, S, lsh, cfg, Ray(s, v), box=box)
            assert res.status in (BoundaryStatus.HIT, BoundaryStatus.APEX_NEAR_BOUNDARY)
            surrogate = abs(slack(P, res.point).min()) / P.row_norms.min()
            assert surrogate <= bound
            if res.status is BoundaryStatus.APEX_NEAR_BOUNDARY:
                assert boundary_distance(P, s) <= cfg.eps * cfg.diam_ub + cfg.step
