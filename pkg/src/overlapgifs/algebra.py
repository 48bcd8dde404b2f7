"""Exact arithmetic in a number field Q(x)/(p(x)) with one complex embedding.

Elements are stored as an integer numerator vector over a common positive
denominator, reduced modulo the monic minimal polynomial.  Two elements are
equal exactly when their stored tuples are equal, so elements hash and compare
structurally.
"""
from __future__ import annotations

import cmath
from fractions import Fraction
from math import gcd
from numbers import Rational
from typing import Iterable, Sequence

import mpmath
import numpy as np

from .errors import DivisionByZero, NonInvertible, RootRefinementFailed

__all__ = ["NumberField", "FieldElement", "canonicalize", "field_arith", "embed"]


def _content(nums: Iterable[int], den: int) -> int:
    g = den
    for c in nums:
        g = gcd(g, c)
        if g == 1:
            break
    return g


def _newton(coeffs: Sequence[int], z: complex, tol: float, maxiter: int = 200):
    """Newton iteration on the polynomial with constant-first ``coeffs``."""
    dcoeffs = [k * c for k, c in enumerate(coeffs)][1:]
    for _ in range(maxiter):
        p = _horner(coeffs, z)
        dp = _horner(dcoeffs, z)
        if dp == 0:
            return None
        step = p / dp
        z -= step
        if abs(step) <= tol * max(1.0, abs(z)):
            return z
    return None


def _horner(coeffs: Sequence, z):
    acc = 0 * z
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


class NumberField:
    """The quotient ring Q[x]/(min_poly) with a designated complex root.

    ``min_poly`` lists integer coefficients constant term first and must be
    monic.  ``root_hint`` selects the conjugate used by :meth:`FieldElement.embed`.
    Irreducibility is not checked; a reducible polynomial shows up as
    :class:`NonInvertible` on division.
    """

    def __init__(self, min_poly: Sequence[int], root_hint: complex,
                 embed_precision: float = 1e-12):
        poly = [int(c) for c in min_poly]
        if len(poly) < 2 or poly[-1] != 1:
            raise ValueError("min_poly must be monic of degree >= 1")
        if embed_precision <= 0:
            raise ValueError("embed_precision must be positive")
        self.min_poly = tuple(poly)
        self.degree = len(poly) - 1
        self.root_hint = complex(root_hint)
        self.embed_precision = float(embed_precision)
        d = self.degree
        # x^k mod p for k = d .. 2d-2, used to fold products back into degree < d
        self._fold = []
        cur = [-c for c in poly[:-1]]  # x^d
        for _ in range(d - 1):
            self._fold.append(tuple(cur))
            top = cur[-1]
            cur = [0] + cur[:-1]
            cur = [c - top * pc for c, pc in zip(cur, poly[:-1])]
        self._fold.append(tuple(cur))
        self.root = self._refine_root()
        self._mp_root = None
        self._mp_dps = 0

    def _refine_root(self) -> complex:
        if not cmath.isfinite(self.root_hint):
            raise RootRefinementFailed(f"root hint {self.root_hint} is not finite")
        z = _newton(self.min_poly, self.root_hint, 1e-15)
        if z is None or abs(z - self.root_hint) > 0.5 * max(1.0, abs(self.root_hint)):
            roots = np.roots(list(reversed(self.min_poly)))
            nearest = complex(min(roots, key=lambda r: abs(r - self.root_hint)))
            z = _newton(self.min_poly, nearest, 1e-15)
        if z is None:
            raise RootRefinementFailed(
                f"Newton refinement of {self.min_poly} from {self.root_hint} failed")
        scale = sum(abs(c) * abs(z) ** k for k, c in enumerate(self.min_poly))
        if abs(_horner(self.min_poly, z)) > 1e-12 * scale:
            raise RootRefinementFailed(f"no root of {self.min_poly} near {self.root_hint}")
        return z

    def mp_root(self, dps: int):
        """The designated root at ``dps`` decimal digits (mpmath)."""
        if self._mp_root is None or self._mp_dps < dps:
            with mpmath.workdps(dps + 10):
                z = mpmath.mpc(self.root.real, self.root.imag)
                coeffs = [mpmath.mpf(c) for c in self.min_poly]
                dcoeffs = [k * c for k, c in enumerate(coeffs)][1:]
                tol = mpmath.mpf(10) ** (-(dps + 5))
                for _ in range(200):
                    step = _horner(coeffs, z) / _horner(dcoeffs, z)
                    z -= step
                    if abs(step) < tol:
                        break
                else:
                    raise RootRefinementFailed("multiprecision refinement failed")
            self._mp_root, self._mp_dps = z, dps
        return self._mp_root

    # construction helpers

    def __call__(self, value) -> "FieldElement":
        return self.element(value)

    def element(self, value) -> "FieldElement":
        if isinstance(value, FieldElement):
            if value.field is not self and value.field != self:
                raise ValueError("element belongs to a different field")
            return value
        if isinstance(value, (int, Rational)):
            return self.from_rational(value)
        return canonicalize(self, value)

    def from_rational(self, q) -> "FieldElement":
        q = Fraction(q)
        nums = [0] * self.degree
        nums[0] = q.numerator
        return FieldElement._make(self, tuple(nums), q.denominator)

    @property
    def zero(self) -> "FieldElement":
        return self.from_rational(0)

    @property
    def one(self) -> "FieldElement":
        return self.from_rational(1)

    @property
    def gen(self) -> "FieldElement":
        if self.degree == 1:
            return self.from_rational(-self.min_poly[0])
        nums = [0] * self.degree
        nums[1] = 1
        return FieldElement._make(self, tuple(nums), 1)

    def __eq__(self, other):
        if not isinstance(other, NumberField):
            return NotImplemented
        return self.min_poly == other.min_poly and self.root == other.root

    def __hash__(self):
        return hash((self.min_poly, self.root))

    def __repr__(self):
        return f"NumberField({list(self.min_poly)}, root≈{self.root:.6g})"

    def to_json(self) -> dict:
        return {"min_poly": list(self.min_poly),
                "root_hint": [self.root_hint.real, self.root_hint.imag],
                "embed_precision": self.embed_precision}

    @classmethod
    def from_json(cls, data: dict) -> "NumberField":
        hint = data["root_hint"]
        if isinstance(hint, (list, tuple)):
            hint = complex(hint[0], hint[1])
        return cls(data["min_poly"], hint, data.get("embed_precision", 1e-12))


def _poly_fold(field: NumberField, prod: list) -> list:
    d = field.degree
    out = prod[:d] + [0] * (d - len(prod[:d]))
    for k in range(d, len(prod)):
        c = prod[k]
        if c:
            for idx, f in enumerate(field._fold[k - d]):
                if f:
                    out[idx] += c * f
    return out


def canonicalize(field: NumberField, coeffs: Sequence) -> "FieldElement":
    """Reduce an arbitrary-length rational coefficient vector into ``field``."""
    fr = [Fraction(c) for c in coeffs] or [Fraction(0)]
    den = 1
    for c in fr:
        den = den * c.denominator // gcd(den, c.denominator)
    nums = [int(c * den) for c in fr]
    # nums beyond 2d-2 are folded by repeated reduction
    d = field.degree
    while len(nums) > 2 * d - 1:
        top = nums.pop()
        k = len(nums) - d
        for idx, c in enumerate(field.min_poly[:-1]):
            nums[k + idx] -= top * c
    nums = _poly_fold(field, nums)
    return FieldElement._make(field, tuple(nums), den)


class FieldElement:
    """Immutable element of a :class:`NumberField`."""

    __slots__ = ("field", "nums", "den", "_hash", "_embed")

    @classmethod
    def _make(cls, field, nums, den):
        if den < 0:
            nums, den = tuple(-c for c in nums), -den
        g = _content(nums, den)
        if g != 1:
            nums, den = tuple(c // g for c in nums), den // g
        self = object.__new__(cls)
        self.field, self.nums, self.den = field, nums, den
        self._hash = None
        self._embed = None
        return self

    @property
    def coeffs(self) -> tuple:
        """Rational coefficients of 1, x, ..., x^(d-1)."""
        return tuple(Fraction(c, self.den) for c in self.nums)

    def is_zero(self) -> bool:
        return not any(self.nums)

    def is_rational(self) -> bool:
        return not any(self.nums[1:])

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.field is not self.field and other.field != self.field:
                raise ValueError("operands live in different fields")
            return other
        if isinstance(other, (int, Rational)):
            return self.field.from_rational(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        d1, d2 = self.den, other.den
        if d1 == d2:
            return FieldElement._make(self.field, tuple(a + b for a, b in zip(self.nums, other.nums)), d1)
        return FieldElement._make(
            self.field, tuple(a * d2 + b * d1 for a, b in zip(self.nums, other.nums)), d1 * d2)

    __radd__ = __add__

    def __neg__(self):
        return FieldElement._make(self.field, tuple(-a for a in self.nums), self.den)

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self.nums, other.nums
        if other.is_rational():
            k = b[0]
            return FieldElement._make(self.field, tuple(x * k for x in a), self.den * other.den)
        if self.is_rational():
            k = a[0]
            return FieldElement._make(self.field, tuple(x * k for x in b), self.den * other.den)
        prod = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        return FieldElement._make(self.field, tuple(_poly_fold(self.field, prod)),
                                  self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        """Multiplicative inverse by the extended Euclidean algorithm mod min_poly."""
        if self.is_zero():
            raise DivisionByZero("division by zero field element")
        if self.is_rational():
            return self.field.from_rational(Fraction(self.den, self.nums[0]))
        # invariant: s * self == r (mod p)
        p = [Fraction(c) for c in self.field.min_poly]
        r0, r1 = p, _trim(list(self.coeffs))
        s0, s1 = [Fraction(0)], [Fraction(1)]
        while len(r1) > 1:
            q, rem = _pdivmod(r0, r1)
            r0, r1 = r1, rem
            s0, s1 = s1, _psub(s0, _pmul(q, s1))
        if not r1 or r1[0] == 0:
            raise NonInvertible(
                f"element shares a factor with {list(self.field.min_poly)}; "
                "the minimal polynomial is reducible")
        return canonicalize(self.field, [c / r1[0] for c in s1])

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        base = self if n >= 0 else self.inverse()
        n = abs(n)
        result = self.field.one
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.nums == other.nums and self.den == other.den and (
                self.field is other.field or self.field == other.field)
        if isinstance(other, (int, Rational)):
            return self.is_rational() and Fraction(self.nums[0], self.den) == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nums, self.den))
        return self._hash

    def __bool__(self):
        return not self.is_zero()

    def embed(self, precision: float | None = None) -> complex:
        """Value at the designated root.

        Double precision Horner evaluation is used unless ``precision`` asks
        for more than it can deliver, in which case mpmath is used.
        """
        if precision is None or precision >= 1e-11:
            if self._embed is None:
                self._embed = _horner(self.nums, self.field.root) / self.den
            return self._embed
        dps = int(-np.log10(precision)) + 10
        root = self.field.mp_root(dps)
        with mpmath.workdps(dps):
            v = _horner([mpmath.mpf(c) for c in self.nums], root) / self.den
        return complex(v)

    def __complex__(self):
        return complex(self.embed())

    def __repr__(self):
        return f"FieldElement({self})"

    def __str__(self):
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mon = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
            if mon and c == 1:
                terms.append(mon)
            elif mon and c == -1:
                terms.append("-" + mon)
            else:
                cs = str(c)
                if mon and "/" in cs:
                    cs = f"({cs})"
                terms.append(cs + ("*" + mon if mon else ""))
        if not terms:
            return "0"
        return " + ".join(terms).replace("+ -", "- ")

    def to_json(self) -> list:
        return [str(c) for c in self.coeffs]


def _trim(p):
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def _pdivmod(a, b):
    a = list(a)
    q = [Fraction(0)] * max(1, len(a) - len(b) + 1)
    lead = b[-1]
    while len(a) >= len(b) and any(a):
        k = len(a) - len(b)
        c = a[-1] / lead
        q[k] = c
        for i, bc in enumerate(b):
            a[k + i] -= c * bc
        a.pop()
        _trim(a)
        if len(a) < len(b):
            break
    return _trim(q), _trim(a or [Fraction(0)])


def _pmul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _trim(out)


def _psub(a, b):
    n = max(len(a), len(b))
    a = list(a) + [Fraction(0)] * (n - len(a))
    b = list(b) + [Fraction(0)] * (n - len(b))
    return _trim([x - y for x, y in zip(a, b)])


def field_arith(a: FieldElement, b: FieldElement, op: str) -> FieldElement:
    """Functional form of the four field operations (``add/sub/mul/div``)."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown op {op!r}")


def embed(a: FieldElement, precision: float | None = None) -> complex:
    return a.embed(precision)
