import re

import numpy as np
import pytest

from overlapgifs.dimension import incidence_matrix
from overlapgifs.render import (PointCloud, cloud_csv, cloud_json, convex_hull, emit_dot,
                                emit_svg, expand_pieces, hausdorff_distance, ifs_system,
                                piece_counts, point_cloud)

from conftest import load, pipeline
from oracles import brute_hausdorff, matrix_power_counts


def golden_setup():
    res = pipeline("golden_triangle")
    return res.reduced, res.config.ifs


def test_depth_zero_and_one():
    r, ifs = golden_setup()
    (p,) = expand_pieces(r, ifs.maps, 0, 0)
    assert p.a == 1 and p.b == 0 and p.type == 0
    level1 = expand_pieces(r, ifs.maps, 0, 1)
    assert [p.type + 1 for p in level1] == [1, 2, 3]
    assert all(abs(abs(p.a) - ifs.ratio) < 1e-12 for p in level1)


@pytest.mark.parametrize("name", ["golden_triangle", "square_pisot_2i", "hexagon",
                                  "pisot_square_tile"])
def test_piece_counts_match_matrix_powers(name):
    r = pipeline(name).reduced
    M = incidence_matrix(r)
    for k in range(r.n):
        assert piece_counts(r, k, 10) == matrix_power_counts(M, k, 10)
    maps = pipeline(name).config.ifs.maps
    assert len(expand_pieces(r, maps, 0, 4)) == matrix_power_counts(M, 0, 4)[-1]
    assert len(point_cloud(r, maps, 0, 6)) == matrix_power_counts(M, 0, 6)[-1]


def test_piece_ratio_invariant():
    r, ifs = golden_setup()
    for p in expand_pieces(r, ifs.maps, 0, 5):
        assert abs(abs(p.a) - ifs.ratio ** 5) < 1e-9


def test_cloud_default_seed_and_diameter():
    r, ifs = golden_setup()
    c0 = point_cloud(r, ifs.maps, 0, 0)
    a, b = ifs.numeric_maps()[0]
    assert len(c0) == 1 and abs(c0.points[0] - b / (1 - a)) < 1e-15
    one = point_cloud(r, ifs.maps, 0, 0, seeds=[0.25 + 0.5j])
    assert one.points[0] == 0.25 + 0.5j
    c = point_cloud(r, ifs.maps, 0, 7)
    assert c.diameter() <= 2 * ifs.bounding_radius()


def test_ifs_and_gifs_clouds_agree():
    r, ifs = golden_setup()
    A = point_cloud(ifs_system(ifs.m), ifs.maps, 0, 8)
    B = point_cloud(r, ifs.maps, 0, 8)
    R = ifs.bounding_radius()
    assert hausdorff_distance(A, B) <= 2 * R * ifs.ratio ** 8


def test_distance_basics():
    P = PointCloud(np.array([0j]), np.array([0]))
    assert hausdorff_distance(P, P) == 0
    assert hausdorff_distance([0j], [3 + 4j]) == 5
    with pytest.raises(ValueError):
        hausdorff_distance([], [1j])


def test_distance_equals_brute_force():
    rng = np.random.default_rng(11)
    for _ in range(40):
        n, m = rng.integers(1, 500, size=2)
        P = rng.normal(size=n) + 1j * rng.normal(size=n)
        Q = rng.normal(size=m) + 1j * rng.normal(size=m)
        if rng.random() < 0.3:
            Q = np.round(Q, 1)   # ties
        assert hausdorff_distance(P, Q) == brute_hausdorff(P, Q)


def test_convex_hull():
    pts = [0, 1, 1 + 1j, 1j, 0.5 + 0.5j, 0.5]
    hull = convex_hull(pts)
    assert sorted(hull, key=lambda z: (z.real, z.imag)) == [0, 1j, 1, 1 + 1j]
    assert convex_hull([2j]) == [2j]


def test_svg_golden_triangle_colors(tmp_path):
    r, ifs = golden_setup()
    pieces = expand_pieces(r, ifs.maps, 0, 3)
    text = emit_svg(pieces, tmp_path / "g.svg", r, ifs.maps)
    fills = set(re.findall(r'polygon[^>]*fill="(#[0-9a-f]{6})"', text))
    assert len(fills) == 6
    assert (tmp_path / "g.svg").read_text() == text
    assert emit_svg(pieces, None, r, ifs.maps) == text


def test_svg_empty_and_cloud():
    text = emit_svg([], None)
    assert text.startswith("<?xml") and "<polygon" not in text
    c = PointCloud(np.array([0j, 1 + 1j]), np.array([0, 1]))
    assert text != emit_svg(c) and emit_svg(c).count("<circle") == 2


def test_dot_and_clouds(tmp_path):
    og = load("small_overlap_graph").overlap_graph
    text = emit_dot(og, tmp_path / "g.dot")
    assert 'label="23"' in text
    r, ifs = golden_setup()
    c = point_cloud(r, ifs.maps, 0, 2)
    csv_text = cloud_csv(c)
    assert csv_text.splitlines()[0] == "re,im,type" and len(csv_text.splitlines()) == len(c) + 1
    assert cloud_json(c) == cloud_json(point_cloud(r, ifs.maps, 0, 2))
