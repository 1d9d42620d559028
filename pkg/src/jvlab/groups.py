"""Group elements with exact normal forms, and their action on tree vertices.

Two families are built in:

* free groups F_n, elements stored as freely reduced words (``a..z`` with
  inverses ``A..Z``);
* the amalgam Z/4 *_{Z/2} Z/6 (isomorphic to SL2(Z)), elements stored in the
  normal form z^eps * x1 x2 ... xk where z = s^2 = u^3 generates the central
  Z/2, and the xi alternate between the transversal letters ``s`` (of Z/2 in
  Z/4) and ``u``/``U`` = u^2 (of Z/2 in Z/6).

Normal forms are unique, so element equality is bit-exact.  ``word_length``
is the free length for F_n and the syllable length for the amalgam (z alone
has length 1: it is a nontrivial element of both factors).
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import GroupMismatch
from .trees import AmalgamTree, FreeCayleyTree, TreeSpec, Vertex

_U_LETTERS = "uU"
_U_VAL = {"u": 1, "U": 2}
_U_SYM = {1: "u", 2: "U"}


@dataclass(frozen=True)
class FreeWord:
    """Element of a free group: a reduced word."""

    group: "FreeGroup"
    word: str

    def __mul__(self, other: "FreeWord") -> "FreeWord":
        return self.group.multiply(self, other)

    def inverse(self) -> "FreeWord":
        return self.group.inverse(self)

    @property
    def label(self) -> str:
        return self.word or "e"

    def __repr__(self) -> str:
        return f"FreeWord({self.label!r})"


@dataclass(frozen=True)
class AmalgamElement:
    """Element of Z/4 *_{Z/2} Z/6 in central-flag times alternating-word form."""

    group: "AmalgamGroup"
    central: bool
    word: str

    def __mul__(self, other: "AmalgamElement") -> "AmalgamElement":
        return self.group.multiply(self, other)

    def inverse(self) -> "AmalgamElement":
        return self.group.inverse(self)

    @property
    def label(self) -> str:
        body = ("z" if self.central else "") + self.word
        return body or "e"

    def __repr__(self) -> str:
        return f"AmalgamElement({self.label!r})"


def _reduce_free(word: str) -> str:
    out: list[str] = []
    for c in word:
        if out and out[-1] == c.swapcase():
            out.pop()
        else:
            out.append(c)
    return "".join(out)


class FreeGroup:
    """The free group on n generators, acting on its Cayley tree."""

    def __init__(self, n: int):
        if not 1 <= n <= 26:
            raise ValueError("free rank must be between 1 and 26")
        self.n = n
        self._tree = FreeCayleyTree(n)

    def __repr__(self) -> str:
        return f"FreeGroup({self.n})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FreeGroup) and other.n == self.n

    def __hash__(self) -> int:
        return hash(("F", self.n))

    def tree(self) -> FreeCayleyTree:
        return self._tree

    @property
    def identity(self) -> FreeWord:
        return FreeWord(self, "")

    def generators(self) -> list[FreeWord]:
        return [FreeWord(self, c) for c in self._tree.letters]

    def generator_steps(self) -> list[FreeWord]:
        """Generators and inverses in the neighbor order a, a^-1, b, b^-1, ..."""
        return [FreeWord(self, c) for c in self._tree.step_order]

    def element(self, word: str) -> FreeWord:
        if word == "e":
            word = ""
        for c in word:
            if c not in self._tree.step_order:
                raise ValueError(f"letter {c!r} not in alphabet of {self!r}")
        return FreeWord(self, _reduce_free(word))

    def _check(self, g: FreeWord) -> None:
        if not isinstance(g, FreeWord) or g.group != self:
            raise GroupMismatch(f"{g!r} is not an element of {self!r}")

    def multiply(self, g: FreeWord, h: FreeWord) -> FreeWord:
        self._check(g)
        self._check(h)
        return FreeWord(self, _reduce_free(g.word + h.word))

    def inverse(self, g: FreeWord) -> FreeWord:
        self._check(g)
        return FreeWord(self, g.word[::-1].swapcase())

    def word_length(self, g: FreeWord) -> int:
        self._check(g)
        return len(g.word)

    def act(self, g: FreeWord, x: Vertex) -> Vertex:
        """Left translation of the Cayley-tree vertex labeled by a reduced word."""
        self._check(g)
        if ":" in x.label:
            raise GroupMismatch(f"{x!r} is not a vertex of the Cayley tree of {self!r}")
        w = "" if x.label == "e" else x.label
        word = _reduce_free(g.word + w)
        return Vertex(word or "e", len(word))

    def random_element(self, rng: random.Random, length: int) -> FreeWord:
        """Uniform reduced word of exactly the given length."""
        word: list[str] = []
        for _ in range(length):
            options = [c for c in self._tree.step_order if not word or c != word[-1].swapcase()]
            word.append(rng.choice(options))
        return FreeWord(self, "".join(word))

    def elements_up_to_length(self, length: int) -> list[FreeWord]:
        """All elements of word length at most the given bound."""
        words = [""]
        frontier = [""]
        for _ in range(length):
            nxt = []
            for w in frontier:
                for c in self._tree.step_order:
                    if not w or w[-1] != c.swapcase():
                        nxt.append(w + c)
            words.extend(nxt)
            frontier = nxt
        return [FreeWord(self, w) for w in words]


def _reduce_amalgam(central: bool, word: str, tail: str) -> tuple[bool, str]:
    stack = list(word)
    for c in tail:
        while True:
            if not stack:
                stack.append(c)
                break
            top = stack[-1]
            same_factor = (top in _U_LETTERS) == (c in _U_LETTERS)
            if not same_factor:
                stack.append(c)
                break
            if top == "s":  # s*s = z
                stack.pop()
                central = not central
                break
            total = _U_VAL[top] + _U_VAL[c]
            if total == 3:  # u^3 = z
                stack.pop()
                central = not central
                break
            stack.pop()
            if total == 4:  # u^4 = z*u
                central = not central
                c = "u"
                continue
            stack.append(_U_SYM[total])
            break
    return central, "".join(stack)


class AmalgamGroup:
    """Z/4 *_{Z/2} Z/6 with generators s (order 4) and u (order 6), s^2 = u^3."""

    def __init__(self) -> None:
        self._tree = AmalgamTree()

    def __repr__(self) -> str:
        return "AmalgamGroup()"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, AmalgamGroup)

    def __hash__(self) -> int:
        return hash("amalgam-group")

    def tree(self) -> AmalgamTree:
        return self._tree

    @property
    def identity(self) -> AmalgamElement:
        return AmalgamElement(self, False, "")

    @property
    def s(self) -> AmalgamElement:
        return AmalgamElement(self, False, "s")

    @property
    def u(self) -> AmalgamElement:
        return AmalgamElement(self, False, "u")

    @property
    def z(self) -> AmalgamElement:
        return AmalgamElement(self, True, "")

    def generators(self) -> list[AmalgamElement]:
        return [self.s, self.u]

    def generator_steps(self) -> list[AmalgamElement]:
        """s, s^-1, u, u^-1: the steps of the standard random walk."""
        return [self.s, self.inverse(self.s), self.u, self.inverse(self.u)]

    def element(self, word: str) -> AmalgamElement:
        """Build an element from letters s, u, U (= u^2) and z, left to right."""
        if word == "e":
            word = ""
        central, acc = False, ""
        for c in word:
            if c == "z":
                central = not central
            elif c in "suU":
                central, acc = _reduce_amalgam(central, acc, c)
            else:
                raise ValueError(f"letter {c!r} not in amalgam alphabet s/u/U/z")
        return AmalgamElement(self, central, acc)

    def _check(self, g: AmalgamElement) -> None:
        if not isinstance(g, AmalgamElement) or g.group != self:
            raise GroupMismatch(f"{g!r} is not an element of {self!r}")

    def multiply(self, g: AmalgamElement, h: AmalgamElement) -> AmalgamElement:
        self._check(g)
        self._check(h)
        central, word = _reduce_amalgam(g.central != h.central, g.word, h.word)
        return AmalgamElement(self, central, word)

    def inverse(self, g: AmalgamElement) -> AmalgamElement:
        self._check(g)
        # each letter inverts inside its factor at the cost of one z:
        # s^-1 = z*s, u^-1 = z*u^2, (u^2)^-1 = z*u
        central = g.central != (len(g.word) % 2 == 1)
        word = "".join("s" if c == "s" else _U_SYM[3 - _U_VAL[c]] for c in reversed(g.word))
        return AmalgamElement(self, central, word)

    def word_length(self, g: AmalgamElement) -> int:
        self._check(g)
        if g.word:
            return len(g.word)
        return 1 if g.central else 0

    def act(self, g: AmalgamElement, x: Vertex) -> Vertex:
        """Left translation of a coset vertex; z acts trivially."""
        self._check(g)
        kind, _, w = x.label.partition(":")
        if kind not in ("A", "B"):
            raise GroupMismatch(f"{x!r} is not a vertex of the tree of {self!r}")
        if w == "e":
            w = ""
        _, word = _reduce_amalgam(False, g.word, w)
        if kind == "A" and word.endswith("s"):
            word = word[:-1]
        elif kind == "B" and word and word[-1] in _U_LETTERS:
            word = word[:-1]
        label = f"{kind}:{word or 'e'}"
        return Vertex(label, AmalgamTree._word_depth(kind, word))

    def random_element(self, rng: random.Random, length: int) -> AmalgamElement:
        """Uniform normal form of exactly the given syllable length."""
        if length == 0:
            return self.identity
        central = rng.random() < 0.5
        word: list[str] = []
        start_u = rng.random() < 0.5
        for i in range(length):
            if (i % 2 == 0) == start_u:
                word.append(rng.choice("uU"))
            else:
                word.append("s")
        # syllable length counts letters except for the bare central element
        return AmalgamElement(self, central, "".join(word))

    def elements_up_to_length(self, length: int) -> list[AmalgamElement]:
        """All elements of syllable length at most the given bound."""
        out = [self.identity]
        if length >= 1:
            out.append(self.z)
        words: list[str] = [""]
        for _ in range(length):
            nxt = []
            for w in words:
                if not w or w[-1] in _U_LETTERS:
                    nxt.append(w + "s")
                if not w or w[-1] == "s":
                    nxt.extend((w + "u", w + "U"))
            for w in nxt:
                out.append(AmalgamElement(self, False, w))
                out.append(AmalgamElement(self, True, w))
            words = nxt
        return out


def stabilizer_probe(group: Group, x: Vertex, max_length: int) -> list[GroupElement]:
    """Brute-force: all elements of word length <= max_length fixing the vertex."""
    return [g for g in group.elements_up_to_length(max_length) if group.act(g, x) == x]


Group = FreeGroup | AmalgamGroup
GroupElement = FreeWord | AmalgamElement


def group_for_tree(tree: TreeSpec) -> Group:
    """The group whose standard action realizes the given tree."""
    if isinstance(tree, FreeCayleyTree):
        return FreeGroup(tree.n)
    if isinstance(tree, AmalgamTree):
        return AmalgamGroup()
    raise TypeError(f"no group registered for {tree!r}")
