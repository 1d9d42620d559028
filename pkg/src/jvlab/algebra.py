"""Finitely supported group-algebra elements with convolution and involution.

Coefficients run in one of two scalar modes, never mixed: ``exact`` uses
complex rationals (:class:`~jvlab.scalars.ExactComplex`), ``float`` uses
Python complex numbers.  Identities are proved in exact mode; spectral work
uses float mode.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

from .errors import GroupMismatch, ScalarModeMismatch
from .groups import Group, GroupElement
from .scalars import ExactComplex

Scalar = ExactComplex | complex


def _is_zero(c: Scalar) -> bool:
    return c.is_zero() if isinstance(c, ExactComplex) else c == 0


class GroupAlgebraElement:
    """A finite map from group elements to scalars."""

    def __init__(self, group: Group, coeffs: Mapping[GroupElement, Scalar], mode: str):
        if mode not in ("exact", "float"):
            raise ValueError(f"unknown scalar mode {mode!r}")
        self.group = group
        self.mode = mode
        self.coeffs: dict[GroupElement, Scalar] = {
            g: c for g, c in coeffs.items() if not _is_zero(c)
        }
        for g in self.coeffs:
            if g.group != group:
                raise GroupMismatch(f"{g!r} does not belong to {group!r}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GroupAlgebraElement):
            return NotImplemented
        return (
            self.group == other.group
            and self.mode == other.mode
            and self.coeffs == other.coeffs
        )

    def __repr__(self) -> str:
        parts = ", ".join(f"{g.label}:{c}" for g, c in sorted(self.coeffs.items(), key=lambda t: t[0].label))
        return f"GroupAlgebraElement({self.mode}; {parts})"

    def __len__(self) -> int:
        return len(self.coeffs)

    def _compatible(self, other: "GroupAlgebraElement") -> None:
        if self.group != other.group:
            raise GroupMismatch("elements of different group algebras")
        if self.mode != other.mode:
            raise ScalarModeMismatch(f"cannot mix {self.mode} and {other.mode} scalars")

    def convolve(self, other: "GroupAlgebraElement") -> "GroupAlgebraElement":
        """(a * b)(g) = sum_h a(h) b(h^-1 g)."""
        self._compatible(other)
        acc: dict[GroupElement, Scalar] = {}
        for g, cg in self.coeffs.items():
            for h, ch in other.coeffs.items():
                k = self.group.multiply(g, h)
                prod = cg * ch
                if k in acc:
                    acc[k] = acc[k] + prod
                else:
                    acc[k] = prod
        return GroupAlgebraElement(self.group, acc, self.mode)

    def star(self) -> "GroupAlgebraElement":
        """a*(g) = conjugate(a(g^-1))."""
        acc = {self.group.inverse(g): c.conjugate() for g, c in self.coeffs.items()}
        return GroupAlgebraElement(self.group, acc, self.mode)

    def __add__(self, other: "GroupAlgebraElement") -> "GroupAlgebraElement":
        self._compatible(other)
        acc: dict[GroupElement, Scalar] = dict(self.coeffs)
        for g, c in other.coeffs.items():
            acc[g] = acc[g] + c if g in acc else c
        return GroupAlgebraElement(self.group, acc, self.mode)

    def __sub__(self, other: "GroupAlgebraElement") -> "GroupAlgebraElement":
        return self + other.scale(ExactComplex.of(-1) if self.mode == "exact" else -1.0)

    def scale(self, c: Scalar) -> "GroupAlgebraElement":
        if self.mode == "exact":
            if not isinstance(c, ExactComplex):
                raise ScalarModeMismatch("exact elements scale by ExactComplex")
            return GroupAlgebraElement(self.group, {g: v * c for g, v in self.coeffs.items()}, self.mode)
        return GroupAlgebraElement(self.group, {g: v * c for g, v in self.coeffs.items()}, self.mode)

    def is_selfadjoint(self) -> bool:
        return self == self.star()

    def l1_norm(self) -> float:
        return float(sum(abs(self._to_complex(c)) for c in self.coeffs.values()))

    def trivial_value(self) -> complex:
        """The image of the element under the trivial representation: sum of coefficients."""
        total = 0j
        for c in self.coeffs.values():
            total += self._to_complex(c)
        return total

    def max_word_length(self) -> int:
        return max((self.group.word_length(g) for g in self.coeffs), default=0)

    @staticmethod
    def _to_complex(c: Scalar) -> complex:
        return c.to_complex() if isinstance(c, ExactComplex) else complex(c)

    def as_float(self) -> "GroupAlgebraElement":
        if self.mode == "float":
            return self
        return GroupAlgebraElement(
            self.group, {g: c.to_complex() for g, c in self.coeffs.items()}, "float"
        )

    def sorted_items(self) -> list[tuple[GroupElement, Scalar]]:
        return sorted(self.coeffs.items(), key=lambda t: (self.group.word_length(t[0]), t[0].label))

    def describe(self) -> str:
        return ";".join(f"{g.label}" for g, _ in self.sorted_items())

    def to_csv(self, path: str) -> None:
        """Rows ``word,re,im``; exact rationals serialize as ``p/q`` strings."""
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("word,re,im\n")
            for g, c in self.sorted_items():
                if self.mode == "exact":
                    assert isinstance(c, ExactComplex)
                    fh.write(f"{g.label},{c.re},{c.im}\n")
                else:
                    c = complex(c)
                    fh.write(f"{g.label},{c.real!r},{c.imag!r}\n")

    @classmethod
    def from_csv(cls, group: Group, path: str, mode: str = "exact") -> "GroupAlgebraElement":
        acc: dict[GroupElement, Scalar] = {}
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline().strip()
            if header != "word,re,im":
                raise ValueError(f"bad group-algebra CSV header: {header!r}")
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                word, re_s, im_s = line.split(",")
                g = group.element(word)
                if mode == "exact":
                    c: Scalar = ExactComplex(Fraction(re_s), Fraction(im_s))
                else:
                    c = complex(float(Fraction(re_s)), float(Fraction(im_s)))
                acc[g] = acc[g] + c if g in acc else c
        return cls(group, acc, mode)


def delta(group: Group, g: GroupElement, mode: str = "exact") -> GroupAlgebraElement:
    """The point mass at g."""
    one: Scalar = ExactComplex.of(1) if mode == "exact" else 1.0 + 0j
    return GroupAlgebraElement(group, {g: one}, mode)


def markov_element(group: Group, mode: str = "exact") -> GroupAlgebraElement:
    """Uniform average over the standard symmetric generating steps.

    For F_n these are the 2n generators and inverses; for the amalgam the four
    steps s, s^-1, u, u^-1.
    """
    steps = group.generator_steps()
    if mode == "exact":
        c: Scalar = ExactComplex.of(Fraction(1, len(steps)))
    else:
        c = complex(1.0 / len(steps))
    acc: dict[GroupElement, Scalar] = {}
    for g in steps:
        acc[g] = acc[g] + c if g in acc else c
    return GroupAlgebraElement(group, acc, mode)


def from_items(
    group: Group, items: Iterable[tuple[GroupElement, Scalar]], mode: str = "exact"
) -> GroupAlgebraElement:
    acc: dict[GroupElement, Scalar] = {}
    for g, c in items:
        acc[g] = acc[g] + c if g in acc else c
    return GroupAlgebraElement(group, acc, mode)
