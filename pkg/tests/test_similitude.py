import random
from fractions import Fraction

import pytest

from overlapgifs.errors import ConfigError
from overlapgifs.similitude import IfsSpec, Similitude, compose, evaluate, invert

from conftest import load


def test_golden_triangle_neighbor_maps(golden):
    ifs = golden.ifs
    c = golden.constants
    f1, f2, f3 = ifs.maps
    assert compose(invert(f3), f2) == Similitude.translation(c["t"] ** 0)
    assert compose(invert(f2), f1) == Similitude.translation(c["w"])
    assert invert(f3) == Similitude(c["t"] + 1, c["t"] * 0)
    assert abs(evaluate(f3, 0)) < 1e-15


def test_identity_and_involution(golden):
    f = golden.ifs.maps[0]
    field = golden.field
    ident = Similitude.identity(field)
    assert compose(f, ident) == f and compose(ident, f) == f
    assert invert(ident) == ident
    refl = Similitude(field(-1), field(4))
    assert invert(refl) == refl
    assert compose(refl, refl).is_identity()
    assert evaluate(ident, 1 + 1j) == 1 + 1j


def test_square_pisot_map():
    ifs = load("square_pisot_2i").ifs
    assert abs(evaluate(ifs.maps[3], 0) - 1) < 1e-15


def test_compose_associative_random(golden):
    field = golden.field
    rng = random.Random(7)

    def rnd():
        while True:
            a = field.element([Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(4)])
            if a:
                return Similitude(a, field.element([rng.randint(-5, 5) for _ in range(4)]))

    for _ in range(100):
        f, g, h = rnd(), rnd(), rnd()
        assert compose(compose(f, g), h) == compose(f, compose(g, h))
        assert compose(f, invert(f)).is_identity()


def test_ifs_validation(golden):
    field = golden.field
    with pytest.raises(ConfigError):
        IfsSpec(field, [Similitude(field(2), field(0))])
    with pytest.raises(ConfigError):
        IfsSpec(field, [Similitude(field(Fraction(1, 2)), field(0)),
                        Similitude(field(Fraction(1, 3)), field(1))])
    with pytest.raises(ConfigError):
        golden.ifs.permuted([1, 1, 2])


def test_permuted_and_radius(golden):
    ifs = golden.ifs
    p = ifs.permuted([3, 1, 2])
    assert p.maps == [ifs.maps[2], ifs.maps[0], ifs.maps[1]]
    R = ifs.bounding_radius()
    # every fixed point lies in the attractor, hence in the disk of radius R
    for a, b in ifs.numeric_maps():
        assert abs(b / (1 - a)) <= R + 1e-12


def test_json_roundtrip(golden):
    for f in golden.ifs.maps:
        assert Similitude.from_json(golden.field, f.to_json()) == f
