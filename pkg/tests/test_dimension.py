import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from overlapgifs.dimension import (WeightedGifs, char_poly, hausdorff_dim, incidence_matrix,
                                   perron_factor, perron_root, poly_divmod, poly_eval,
                                   spectral_radius)
from overlapgifs.errors import NonConvergence
from overlapgifs.gifsbuild import GifsSystem

from conftest import load, pipeline
from oracles import cofactor_charpoly, divides, poly_from_high

GOLDEN_POLY = poly_from_high([1, -3, -1, 6, 0, -3, 0])     # x(x-1)(x+1)(x^3-3x^2+3)
CUBIC = poly_from_high([1, -3, 0, 3])
RATIONAL_MATRIX = [
    [1, 1, 0, 0, 0, 0],
    [0, 1, 1, Fraction(1, 2), 0, 0],
    [0, 0, 1, Fraction(1, 2), 1, 0],
    [0, 2, 0, 0, 1, 0],
    [0, 0, 2, 0, 0, Fraction(1, 3)],
    [0, 0, 0, 0, 3, 0],
]


def system(eqs):
    return GifsSystem(max(i for eq in eqs for i, _ in eq), eqs, [frozenset()] * len(eqs))


def test_incidence_multiplicity():
    assert incidence_matrix(system([[(1, 0), (2, 0)]])).tolist() == [[2]]


def test_golden_triangle_matrix():
    r = pipeline("golden_triangle").reduced
    M = incidence_matrix(r)
    assert sorted(M.sum(axis=1).tolist(), reverse=True) == [3, 3, 3, 2, 2, 2]
    assert char_poly(M) == GOLDEN_POLY
    rho = spectral_radius(M)
    assert abs(rho - 2.5320888862379562) < 1e-12
    assert abs(hausdorff_dim(r) - 1.9306) < 1e-4


def test_small_graph_matrix():
    r = pipeline("small_overlap_graph").reduced
    assert incidence_matrix(r).tolist() == [[2, 1, 0, 0], [1, 0, 1, 1], [1, 1, 0, 1], [0, 0, 1, 0]]


def test_char_poly_small():
    assert char_poly(np.eye(2, dtype=int)) == [1, -2, 1]
    assert char_poly([[Fraction(1, 2)]]) == [Fraction(-1, 2), 1]


def test_rational_matrix():
    p = char_poly(RATIONAL_MATRIX)
    assert divides(CUBIC, p) and divides(CUBIC, GOLDEN_POLY)
    assert abs(spectral_radius(RATIONAL_MATRIX) - spectral_radius(incidence_matrix(
        pipeline("golden_triangle").reduced))) < 1e-9


small_matrix = st.integers(1, 6).flatmap(
    lambda n: st.lists(st.lists(st.integers(-4, 6), min_size=n, max_size=n), min_size=n, max_size=n))


@settings(max_examples=80, deadline=None)
@given(small_matrix)
def test_char_poly_matches_cofactor(M):
    assert char_poly(M) == cofactor_charpoly(M)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 7).flatmap(
    lambda n: st.lists(st.lists(st.integers(0, 3), min_size=n, max_size=n), min_size=n, max_size=n)))
def test_spectral_radius_properties(M):
    A = np.array(M, dtype=float)
    rho = spectral_radius(A)
    ev = np.linalg.eigvals(A)
    assert abs(rho - max(abs(ev))) < 1e-7 * max(1, rho)
    assert abs(poly_eval(char_poly(M), rho)) < 1e-6 * max(1.0, rho) ** len(M)


def test_spectral_radius_row_sum_bounds():
    rng = np.random.default_rng(0)
    for _ in range(50):
        A = rng.integers(1, 4, size=(6, 6)).astype(float)   # positive, irreducible
        rho = spectral_radius(A)
        assert A.sum(1).min() - 1e-12 <= rho <= A.sum(1).max() + 1e-12


def test_perron_root_nonconvergence():
    # a 2-cycle: A + I is primitive, but one step is not enough
    with pytest.raises(NonConvergence):
        perron_root(np.array([[0.0, 1.0], [4.0, 0.0]]), maxiter=1, fallback=False)
    assert abs(perron_root(np.array([[0.0, 1.0], [4.0, 0.0]])) - 2) < 1e-12


def test_interval_dimension():
    assert hausdorff_dim(system([[(1, 0), (2, 0)]]), 0.5) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        hausdorff_dim(system([[(1, 0), (2, 0)]]))


def test_square_pisot_dimension():
    r = pipeline("square_pisot_2i").reduced
    assert abs(hausdorff_dim(r) - 1.9364) < 1e-4


def test_weighted_golden():
    cfg = load("weighted_golden")
    w = WeightedGifs.from_json(cfg.weighted, cfg.constants)
    beta = hausdorff_dim(w)
    t = (math.sqrt(5) - 1) / 2
    s = t ** beta
    assert abs(beta - 1.682) < 1e-3
    assert abs(s ** 3 - 2 * s - s ** 2 + 1) < 1e-9
    assert abs(s - 0.445) < 1e-3


def test_weighted_monotone_and_equal_ratio():
    cfg = load("weighted_golden")
    w = WeightedGifs.from_json(cfg.weighted, cfg.constants)
    betas = np.linspace(0.1, 3, 15)
    rhos = [spectral_radius(w.matrix(b)) for b in betas]
    assert all(x > y for x, y in zip(rhos, rhos[1:]))
    r = pipeline("golden_triangle").reduced
    ratio = r.ratio
    equal = WeightedGifs([[(t, ratio) for _, t in eq] for eq in r.equations])
    assert abs(hausdorff_dim(equal) - hausdorff_dim(r)) < 1e-9


def test_weighted_validation():
    with pytest.raises(ValueError):
        WeightedGifs([[(0, 1.5)]])
    with pytest.raises(ValueError):
        WeightedGifs([[(3, 0.5)]])


def test_poly_helpers_and_factor():
    q, r = poly_divmod(GOLDEN_POLY, CUBIC)
    assert r == [0] and q == poly_from_high([1, 0, -1, 0])
    rho = spectral_radius(incidence_matrix(pipeline("golden_triangle").reduced))
    assert perron_factor(GOLDEN_POLY, rho) == CUBIC
