import numpy as np
import pytest

from polyoracle.datagen import GenSpec, Variant, gen_polytope
from polyoracle.errors import FileFormatError
from polyoracle.fileio import (read_meta, read_points, read_polytope, read_rays, write_points,
                               write_polytope, write_rays)
from polyoracle.geom import Ray


class TestPolytopeFiles:
    def test_roundtrip_exact(self, tmp_path):
        spec = GenSpec(5, 30, seed=2, variant=Variant.SYMMETRIZED)
        P = gen_polytope(spec)
        write_polytope(tmp_path / "p.poly", P, spec.meta())
        assert read_polytope(tmp_path / "p.poly") == P
        meta = read_meta(tmp_path / "p.poly")
        assert meta["seed"] == "2" and meta["variant"] == "symmetrized"

    def test_format(self, tmp_path, square):
        write_polytope(tmp_path / "sq.poly", square)
        lines = (tmp_path / "sq.poly").read_text().splitlines()
        assert lines[0] == "2 4"
        assert lines[1] == "1.0 0.0 1.0"

    def test_comments_anywhere(self, tmp_path):
        (tmp_path / "t.poly").write_text("# hi\n2 3\n-1 0 0\n# mid\n0 -1 0\n1 1 1\n")
        P = read_polytope(tmp_path / "t.poly")
        assert P.n == 3 and P.d == 2

    @pytest.mark.parametrize("text", ["", "2 3\n1 0 1\n", "2 1\n1 0\n", "x y\n", "2 1\n1 a 1\n"])
    def test_malformed(self, tmp_path, text):
        (tmp_path / "bad.poly").write_text(text)
        with pytest.raises(FileFormatError):
            read_polytope(tmp_path / "bad.poly")


class TestPointAndRayFiles:
    def test_points_roundtrip(self, tmp_path, rng):
        pts = rng.normal(size=(7, 3))
        write_points(tmp_path / "q.txt", pts, {"seed": 1})
        np.testing.assert_array_equal(read_points(tmp_path / "q.txt", 3), pts)

    def test_empty_points(self, tmp_path):
        write_points(tmp_path / "q.txt", np.empty((0, 3)))
        assert read_points(tmp_path / "q.txt", 3).shape == (0, 3)

    def test_points_dimension(self, tmp_path):
        (tmp_path / "q.txt").write_text("1 2\n3 4 5\n")
        with pytest.raises(FileFormatError):
            read_points(tmp_path / "q.txt")

    def test_rays_roundtrip(self, tmp_path):
        rays = [Ray((0, 0), (1, 1)), Ray((0.5, -0.25), (0, -2))]
        write_rays(tmp_path / "r.txt", rays)
        back = read_rays(tmp_path / "r.txt", 2)
        for a, b in zip(rays, back):
            np.testing.assert_array_equal(a.s, b.s)
            np.testing.assert_allclose(a.v, b.v, rtol=1e-15)
