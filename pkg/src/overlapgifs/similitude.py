"""Planar similitudes z -> a*z + b with coefficients in a number field."""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Sequence

from .algebra import FieldElement, NumberField
from .errors import ConfigError

__all__ = ["Similitude", "IfsSpec", "compose", "invert", "evaluate"]


@dataclass(frozen=True)
class Similitude:
    a: FieldElement
    b: FieldElement

    def __post_init__(self):
        if self.a.is_zero():
            raise ValueError("similitude multiplier must be nonzero")

    @classmethod
    def identity(cls, field: NumberField) -> "Similitude":
        return cls(field.one, field.zero)

    @classmethod
    def translation(cls, b: FieldElement) -> "Similitude":
        return cls(b.field.one, b)

    @property
    def field(self) -> NumberField:
        return self.a.field

    def is_identity(self) -> bool:
        return self.a == 1 and self.b.is_zero()

    def __matmul__(self, other: "Similitude") -> "Similitude":
        return compose(self, other)

    def inverse(self) -> "Similitude":
        return invert(self)

    def __call__(self, z: complex) -> complex:
        return evaluate(self, z)

    @property
    def ratio(self) -> float:
        return abs(self.a.embed())

    def __str__(self):
        a, b = str(self.a), str(self.b)
        if a == "1":
            lin = "z"
        elif a == "-1":
            lin = "-z"
        else:
            lin = f"({a})*z"
        if b == "0":
            return lin
        return f"{lin} + ({b})"

    def to_json(self) -> dict:
        return {"a": self.a.to_json(), "b": self.b.to_json()}

    @classmethod
    def from_json(cls, field: NumberField, data: dict) -> "Similitude":
        return cls(field.element(data["a"]), field.element(data["b"]))


def compose(f: Similitude, g: Similitude) -> Similitude:
    """f o g, i.e. z -> a_f*(a_g*z + b_g) + b_f."""
    return Similitude(f.a * g.a, f.a * g.b + f.b)


def invert(f: Similitude) -> Similitude:
    ainv = f.a.inverse()
    return Similitude(ainv, -(ainv * f.b))


def evaluate(f: Similitude, z: complex) -> complex:
    return f.a.embed() * z + f.b.embed()


@dataclass
class IfsSpec:
    """An ordered list of equal-ratio contracting similitudes.

    The map order matters: overlaps are cut from the piece with the larger
    index.
    """

    field: NumberField
    maps: list
    ratio_tol: float = 1e-12
    ratio: float = dc_field(init=False)

    def __post_init__(self):
        if not self.maps:
            raise ConfigError("an IFS needs at least one map")
        ratios = [f.ratio for f in self.maps]
        if any(not 0 < r < 1 for r in ratios):
            raise ConfigError(f"map ratios must lie in (0, 1), got {ratios}")
        if max(ratios) - min(ratios) > self.ratio_tol:
            raise ConfigError(f"maps must share one contraction ratio, got {ratios}")
        self.ratio = ratios[0]
        self._inverses = [invert(f) for f in self.maps]

    @property
    def m(self) -> int:
        return len(self.maps)

    def inverse(self, i: int) -> Similitude:
        """Inverse of map ``i`` (1-based label)."""
        return self._inverses[i - 1]

    def bounding_radius(self) -> float:
        """Radius R of a disk about 0 that contains the attractor."""
        return max(abs(f.b.embed()) for f in self.maps) / (1 - self.ratio)

    def permuted(self, ordering: Sequence[int]) -> "IfsSpec":
        """New IFS whose k-th map is the old map ``ordering[k]`` (1-based)."""
        if sorted(ordering) != list(range(1, self.m + 1)):
            raise ConfigError(f"ordering {list(ordering)} is not a permutation of 1..{self.m}")
        return IfsSpec(self.field, [self.maps[k - 1] for k in ordering], self.ratio_tol)

    def numeric_maps(self) -> list:
        return [(f.a.embed(), f.b.embed()) for f in self.maps]
