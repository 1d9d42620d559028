"""Exact scalar types: complex rationals and quadratic-radical extensions.

Two scalar modes run through the package.  Float mode uses plain ``float`` /
``complex``.  Exact mode uses :class:`ExactComplex` (a pair of Fractions) for
group-algebra coefficients and :class:`RadicalScalar` for operator entries,
which live in the quadratic extension Q(i)(sqrt(r)).  For the deformation
matrices r = 1 - t^2, so entries carrying a symbolic 1/sqrt(1-t^2) factor
multiply exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

RationalLike = Union[int, Fraction]


def _frac(x: RationalLike) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class ExactComplex:
    """Complex number with rational real and imaginary parts."""

    re: Fraction
    im: Fraction = Fraction(0)

    @staticmethod
    def of(re: RationalLike, im: RationalLike = 0) -> "ExactComplex":
        return ExactComplex(_frac(re), _frac(im))

    def __add__(self, other: "ExactComplex") -> "ExactComplex":
        return ExactComplex(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "ExactComplex") -> "ExactComplex":
        return ExactComplex(self.re - other.re, self.im - other.im)

    def __neg__(self) -> "ExactComplex":
        return ExactComplex(-self.re, -self.im)

    def __mul__(self, other: "ExactComplex") -> "ExactComplex":
        return ExactComplex(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def scale(self, c: RationalLike) -> "ExactComplex":
        c = _frac(c)
        return ExactComplex(self.re * c, self.im * c)

    def conjugate(self) -> "ExactComplex":
        return ExactComplex(self.re, -self.im)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def to_complex(self) -> complex:
        return complex(self.re) + 1j * float(self.im)


EC_ZERO = ExactComplex(Fraction(0))
EC_ONE = ExactComplex(Fraction(1))


def _exact_sqrt(r: Fraction) -> Fraction | None:
    """sqrt(r) when r is a perfect rational square, else None."""
    import math

    if r < 0:
        return None
    pn, qd = r.numerator, r.denominator
    sn, sd = math.isqrt(pn), math.isqrt(qd)
    if sn * sn == pn and sd * sd == qd:
        return Fraction(sn, sd)
    return None


@dataclass(frozen=True)
class RadicalScalar:
    """Element ``base + coef * sqrt(rad)`` with complex-rational base and coef.

    ``rad`` is a shared nonnegative rational; operations between two scalars
    whose radical parts are both nonzero require equal ``rad``.  A scalar with
    ``coef == 0`` combines with any radical context.  Perfect-square radicals
    fold into the rational part, so equality is mathematical equality.
    """

    base: ExactComplex
    coef: ExactComplex
    rad: Fraction

    def __post_init__(self) -> None:
        if not self.coef.is_zero():
            root = _exact_sqrt(self.rad)
            if root is not None:
                object.__setattr__(self, "base", self.base + self.coef.scale(root))
                object.__setattr__(self, "coef", EC_ZERO)

    @staticmethod
    def rational(x: RationalLike, rad: RationalLike = 0) -> "RadicalScalar":
        return RadicalScalar(ExactComplex.of(x), EC_ZERO, _frac(rad))

    @staticmethod
    def radical_part(x: RationalLike, rad: RationalLike) -> "RadicalScalar":
        """The value x * sqrt(rad)."""
        return RadicalScalar(EC_ZERO, ExactComplex.of(x), _frac(rad))

    def _join(self, other: "RadicalScalar") -> Fraction:
        if self.coef.is_zero():
            return other.rad
        if other.coef.is_zero():
            return self.rad
        if self.rad != other.rad:
            raise ValueError(f"incompatible radical contexts {self.rad} vs {other.rad}")
        return self.rad

    def __add__(self, other: "RadicalScalar") -> "RadicalScalar":
        return RadicalScalar(self.base + other.base, self.coef + other.coef, self._join(other))

    def __sub__(self, other: "RadicalScalar") -> "RadicalScalar":
        return RadicalScalar(self.base - other.base, self.coef - other.coef, self._join(other))

    def __neg__(self) -> "RadicalScalar":
        return RadicalScalar(-self.base, -self.coef, self.rad)

    def __mul__(self, other: "RadicalScalar") -> "RadicalScalar":
        rad = self._join(other)
        base = self.base * other.base + (self.coef * other.coef).scale(rad)
        coef = self.base * other.coef + self.coef * other.base
        return RadicalScalar(base, coef, rad)

    def scale(self, c: ExactComplex) -> "RadicalScalar":
        return RadicalScalar(self.base * c, self.coef * c, self.rad)

    def conjugate(self) -> "RadicalScalar":
        # sqrt(rad) is real, so conjugation acts on the complex components only.
        return RadicalScalar(self.base.conjugate(), self.coef.conjugate(), self.rad)

    def is_zero(self) -> bool:
        return self.base.is_zero() and self.coef.is_zero()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RadicalScalar):
            return NotImplemented
        if self.base != other.base:
            return False
        if self.coef.is_zero() and other.coef.is_zero():
            return True
        return self.coef == other.coef and self.rad == other.rad

    def __hash__(self) -> int:
        if self.coef.is_zero():
            return hash((self.base, 0))
        return hash((self.base, self.coef, self.rad))

    def to_complex(self) -> complex:
        r = float(self.rad) ** 0.5
        return self.base.to_complex() + r * self.coef.to_complex()


def format_exact(re: Fraction, im_coef: Fraction | None = None) -> str:
    """Serialize a rational, optionally with a radical coefficient, as text.

    Plain rationals render as ``p/q``.  A value ``a + b*sqrt(rad)`` renders as
    ``a+b*s`` (``b*s`` when a == 0), where ``s`` is the ambient radical that file
    headers declare.
    """
    if im_coef is None or im_coef == 0:
        return str(re)
    if re == 0:
        return f"{im_coef}*s"
    return f"{re}+{im_coef}*s" if im_coef > 0 else f"{re}{im_coef}*s"


def parse_exact(text: str) -> tuple[Fraction, Fraction]:
    """Inverse of :func:`format_exact`: returns (rational part, radical coefficient)."""
    text = text.strip()
    if not text.endswith("*s"):
        return Fraction(text), Fraction(0)
    body = text[:-2]
    for k in range(1, len(body)):
        if body[k] in "+-" and body[k - 1] not in "+-/":
            head, tail = body[:k], body[k:]
            if tail.startswith("+"):
                tail = tail[1:]
            return Fraction(head), Fraction(tail)
    return Fraction(0), Fraction(body)
