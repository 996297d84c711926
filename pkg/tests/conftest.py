import numpy as np
import pytest

from polyoracle.datagen import GenSpec, Variant, gen_polytope
from polyoracle.errors import UnboundedError
from polyoracle.geom import HPolytope
from polyoracle.lp import bounding_box


def unit_square() -> HPolytope:
    return HPolytope([[1, 0], [-1, 0], [0, 1], [0, -1]], [1, 1, 1, 1])


def triangle() -> HPolytope:
    return HPolytope([[-1, 0], [0, -1], [1, 1]], [0, 0, 1])


def bounded_symmetrized(d, n, seed=0, tries=200):
    """First bounded SYMMETRIZED instance at or after ``seed``."""
    for s in range(seed, seed + tries):
        P = gen_polytope(GenSpec(d, n, seed=s, variant=Variant.SYMMETRIZED))
        try:
            return P, bounding_box(P), s
        except UnboundedError:
            continue
    raise RuntimeError(f"no bounded instance for d={d}, n={n}")


@pytest.fixture
def square():
    return unit_square()


@pytest.fixture
def tri():
    return triangle()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def site_residuals(P, S):
    """Worst violations of the midpoint, parallelism and doubling properties.

    All three are returned relative to ``P.scale`` (parallelism is already
    dimensionless).
    """
    diff = S.sites - S.anchor
    A = P.A[S.facet_of]
    norms = P.row_norms[S.facet_of]
    mid = (S.sites + S.anchor) / 2
    midpoint = np.abs(np.einsum("ij,ij->i", A, mid) - P.b[S.facet_of]) / norms
    unit = A / norms[:, None]
    along = np.einsum("ij,ij->i", diff, unit)
    lengths = np.linalg.norm(diff, axis=1)
    perp = np.linalg.norm(diff - along[:, None] * unit, axis=1) / np.maximum(lengths, 1e-300)
    dist = (P.b[S.facet_of] - A @ S.anchor) / norms
    doubling = np.abs(lengths - 2 * dist)
    return (float(midpoint.max() / P.scale), float(perp.max()),
            float(doubling.max() / P.scale), abs(S.delta - lengths.max()))


def mixed_queries(P, anchor, count, rng, spread=(0.5, 1.5)):
    """Points on random rays from ``anchor`` at a random fraction of the exit
    distance, so that roughly half land inside.  Unbounded directions are
    redrawn."""
    from polyoracle.datagen import exit_params

    out = []
    while sum(len(o) for o in out) < count:
        u = rng.normal(size=(count, P.d))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        t = exit_params(P, anchor, u)
        ok = np.isfinite(t)
        f = rng.uniform(*spread, size=ok.sum())
        out.append(anchor + (t[ok] * f)[:, None] * u[ok])
    return np.vstack(out)[:count]


ACCEPTANCE: dict = {}


def record(number: int, title: str, passed: bool, detail: str) -> None:
    """Store one acceptance verdict; printed in the terminal summary."""
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:2d} {title}: {detail}"
    ACCEPTANCE[(number, title)] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[key])
