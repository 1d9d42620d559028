"""Implicit locally finite trees realized through group data.

Two trees are provided: the 2n-regular Cayley tree of a free group on n
generators, and the Bass-Serre tree of the amalgam Z/4 *_{Z/2} Z/6 (vertices
are cosets of the Z/4 and Z/6 factors, so valences alternate between 2 and 3).
Vertices are canonical labels; the infinite tree is never materialized and all
operations are local.

Label conventions:

* free tree: the reduced word, generators ``a, b, c, ...`` with inverses
  ``A, B, C, ...``; the base vertex (empty word) is labeled ``e``.
* amalgam tree: ``A:<word>`` or ``B:<word>`` for cosets of Z/4 resp. Z/6,
  where ``<word>`` alternates the letters ``s`` (Z/4 transversal) and
  ``u``/``U`` (Z/6 transversal, u and u^2); the empty word is written ``e``.
  Canonical A-words end with a u-letter, canonical B-words end with ``s``.

Ball enumeration is breadth-first with lexicographic tie-break on labels;
this order is the frozen index order of every truncated operator.
"""

from __future__ import annotations

import os
import string
from dataclasses import dataclass, field

import numpy as np

from .errors import BaseVertexHasNoPredecessor, ResourceLimit

DEFAULT_MAX_BALL = 200000
MAX_BALL_ENV = "JVLAB_MAX_BALL"

_U_LETTERS = "uU"


def max_ball_vertices() -> int:
    """Ball-size cap: the JVLAB_MAX_BALL environment variable, or 200000."""
    raw = os.environ.get(MAX_BALL_ENV)
    if raw is None:
        return DEFAULT_MAX_BALL
    try:
        return int(raw)
    except ValueError as exc:
        raise ValueError(f"{MAX_BALL_ENV} must be an integer, got {raw!r}") from exc


@dataclass(frozen=True)
class Vertex:
    """A tree vertex: canonical label plus cached distance to the base vertex."""

    label: str
    depth: int

    def __repr__(self) -> str:
        return f"Vertex({self.label!r}, depth={self.depth})"


@dataclass
class BallIndex:
    """Array view of a ball: labels in BFS-lex order plus level structure.

    ``offsets[k]`` is the first index of depth-k vertices; ``parents[i]`` is
    the index of the predecessor of vertex i (-1 for the base vertex).  When
    ``uniform_child_counts`` is set, the children of consecutive parents are
    consecutive in the next level, with the stated count per parent.
    """

    labels: list[str]
    offsets: list[int]
    parents: np.ndarray
    uniform_child_counts: list[int] | None = None
    _lookup: dict[str, int] | None = field(default=None, repr=False)

    @property
    def size(self) -> int:
        return self.offsets[-1]

    @property
    def radius(self) -> int:
        return len(self.offsets) - 2

    def level(self, k: int) -> tuple[int, int]:
        return self.offsets[k], self.offsets[k + 1]

    def index(self, label: str) -> int:
        if self._lookup is None:
            self._lookup = {lab: i for i, lab in enumerate(self.labels)}
        return self._lookup[label]

    def depth_of(self, i: int) -> int:
        lo, hi = 0, len(self.offsets) - 1
        while lo + 1 < hi:
            mid = (lo + hi) // 2
            if self.offsets[mid] <= i:
                lo = mid
            else:
                hi = mid
        return lo


class TreeSpec:
    """Common interface of the two tree models."""

    base_label: str

    @property
    def base(self) -> Vertex:
        return Vertex(self.base_label, 0)

    def vertex(self, label: str) -> Vertex:
        self._validate(label)
        return Vertex(label, self._depth(label))

    def neighbors(self, x: Vertex) -> list[Vertex]:
        raise NotImplementedError

    def predecessor(self, x: Vertex) -> Vertex:
        raise NotImplementedError

    def distance(self, x: Vertex, y: Vertex) -> int:
        raise NotImplementedError

    def _validate(self, label: str) -> None:
        raise NotImplementedError

    def _depth(self, label: str) -> int:
        raise NotImplementedError

    def _children(self, label: str) -> list[str]:
        raise NotImplementedError

    def geodesic(self, x: Vertex, y: Vertex) -> list[Vertex]:
        """The unique path from x to y, endpoints included."""
        left, right = [x], [y]
        a, b = x, y
        while a.depth > b.depth:
            a = self.predecessor(a)
            left.append(a)
        while b.depth > a.depth:
            b = self.predecessor(b)
            right.append(b)
        while a != b:
            a = self.predecessor(a)
            b = self.predecessor(b)
            left.append(a)
            right.append(b)
        right.pop()
        return left + right[::-1]

    def ball_index(self, radius: int, max_vertices: int | None = None) -> BallIndex:
        """Enumerate the radius-R ball in BFS-lex order as a label/parent array."""
        if radius < 0:
            raise ValueError("radius must be nonnegative")
        cap = max_ball_vertices() if max_vertices is None else max_vertices
        labels = [self.base_label]
        offsets = [0, 1]
        parents: list[np.ndarray] = [np.array([-1], dtype=np.int64)]
        uniform: list[int] | None = [] if self._uniform_children else None
        for _ in range(radius):
            lo, hi = offsets[-2], offsets[-1]
            level: list[tuple[str, int]] = []
            for i in range(lo, hi):
                for child in self._children(labels[i]):
                    level.append((child, i))
            if self._uniform_children:
                # free tree: parents are sorted equal-length words and children
                # are emitted in letter order, so the level is already sorted
                assert uniform is not None
                uniform.append(len(level) // (hi - lo) if hi > lo else 0)
            else:
                level.sort()
            if len(labels) + len(level) > cap:
                raise ResourceLimit(
                    f"ball would exceed {cap} vertices; raise {MAX_BALL_ENV} to allow"
                )
            labels.extend(lab for lab, _ in level)
            parents.append(np.fromiter((p for _, p in level), dtype=np.int64, count=len(level)))
            offsets.append(len(labels))
        return BallIndex(labels, offsets, np.concatenate(parents), uniform)

    def ball(self, radius: int, max_vertices: int | None = None) -> list[Vertex]:
        """All vertices within distance R of the base, in BFS-lex order."""
        idx = self.ball_index(radius, max_vertices)
        out = []
        for k in range(len(idx.offsets) - 1):
            lo, hi = idx.offsets[k], idx.offsets[k + 1]
            out.extend(Vertex(idx.labels[i], k) for i in range(lo, hi))
        return out

    def export_adjacency_csv(self, path: str, radius: int, max_vertices: int | None = None) -> int:
        """Write ``vertex_label,neighbor_label`` rows (one per edge direction)
        for all edges with both endpoints in the radius-R ball.  Returns the
        number of rows written."""
        ball = self.ball(radius, max_vertices)
        inside = {v.label for v in ball}
        rows = 0
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("vertex_label,neighbor_label\n")
            for v in ball:
                for w in self.neighbors(v):
                    if w.label in inside:
                        fh.write(f"{v.label},{w.label}\n")
                        rows += 1
        return rows

    _uniform_children = False


class FreeCayleyTree(TreeSpec):
    """Cayley tree of the free group on n generators (2n-regular)."""

    base_label = "e"

    def __init__(self, n: int):
        if not 1 <= n <= 26:
            raise ValueError("free rank must be between 1 and 26")
        self.n = n
        self.letters = string.ascii_lowercase[:n]
        # neighbor order: a, a^-1, b, b^-1, ...
        self.step_order = "".join(c + c.upper() for c in self.letters)
        self.alphabet = "".join(sorted(self.step_order))

    def __repr__(self) -> str:
        return f"FreeCayleyTree({self.n})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FreeCayleyTree) and other.n == self.n

    def __hash__(self) -> int:
        return hash(("free", self.n))

    _uniform_children = True

    def _word(self, label: str) -> str:
        return "" if label == "e" else label

    def _label(self, word: str) -> str:
        return word if word else "e"

    def _validate(self, label: str) -> None:
        word = self._word(label)
        for i, c in enumerate(word):
            if c not in self.step_order:
                raise ValueError(f"letter {c!r} not in alphabet of {self!r}")
            if i and word[i - 1] == c.swapcase():
                raise ValueError(f"label {label!r} is not a reduced word")

    def _depth(self, label: str) -> int:
        return len(self._word(label))

    def neighbors(self, x: Vertex) -> list[Vertex]:
        w = self._word(x.label)
        out = []
        for c in self.step_order:
            if w and w[-1] == c.swapcase():
                out.append(Vertex(self._label(w[:-1]), x.depth - 1))
            else:
                out.append(Vertex(w + c, x.depth + 1))
        return out

    def predecessor(self, x: Vertex) -> Vertex:
        if x.label == "e":
            raise BaseVertexHasNoPredecessor("the base vertex has no predecessor")
        return Vertex(self._label(x.label[:-1]), x.depth - 1)

    def distance(self, x: Vertex, y: Vertex) -> int:
        wx, wy = self._word(x.label), self._word(y.label)
        k = 0
        m = min(len(wx), len(wy))
        while k < m and wx[k] == wy[k]:
            k += 1
        return len(wx) + len(wy) - 2 * k

    def _children(self, label: str) -> list[str]:
        w = self._word(label)
        if not w:
            return list(self.alphabet)
        skip = w[-1].swapcase()
        return [w + c for c in self.alphabet if c != skip]


class AmalgamTree(TreeSpec):
    """Bass-Serre tree of Z/4 *_{Z/2} Z/6; valences alternate between 2 and 3."""

    base_label = "A:e"

    def __repr__(self) -> str:
        return "AmalgamTree()"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, AmalgamTree)

    def __hash__(self) -> int:
        return hash("amalgam")

    @staticmethod
    def _split(label: str) -> tuple[str, str]:
        kind, _, word = label.partition(":")
        return kind, ("" if word == "e" else word)

    @staticmethod
    def _join(kind: str, word: str) -> str:
        return f"{kind}:{word or 'e'}"

    def _validate(self, label: str) -> None:
        kind, word = self._split(label)
        if kind not in ("A", "B"):
            raise ValueError(f"amalgam label must start with 'A:' or 'B:', got {label!r}")
        for i, c in enumerate(word):
            if c not in "suU":
                raise ValueError(f"letter {c!r} not in amalgam alphabet")
            if i and (word[i - 1] in _U_LETTERS) == (c in _U_LETTERS):
                raise ValueError(f"label {label!r} does not alternate factors")
        if word:
            if kind == "A" and word[-1] not in _U_LETTERS:
                raise ValueError(f"A-coset label {label!r} must end with a u-letter")
            if kind == "B" and word[-1] != "s":
                raise ValueError(f"B-coset label {label!r} must end with 's'")

    @staticmethod
    def _word_depth(kind: str, word: str) -> int:
        if not word:
            return 0 if kind == "A" else 1
        return len(word) + (1 if word[0] in _U_LETTERS else 0)

    def _depth(self, label: str) -> int:
        return self._word_depth(*self._split(label))

    def neighbors(self, x: Vertex) -> list[Vertex]:
        kind, w = self._split(x.label)
        if kind == "A":
            # cosets of Z/4 meet the two edge-cosets w{e,s}; valence |Z4/Z2| = 2
            first = w[:-1] if w else ""
            labs = [self._join("B", first), self._join("B", w + "s")]
        else:
            # cosets of Z/6 meet the edge-cosets w{e,u,u^2}; valence |Z6/Z2| = 3
            first = w[:-1] if w else ""
            labs = [self._join("A", first), self._join("A", w + "u"), self._join("A", w + "U")]
        return [Vertex(lab, self._depth(lab)) for lab in labs]

    def predecessor(self, x: Vertex) -> Vertex:
        kind, w = self._split(x.label)
        if kind == "A" and not w:
            raise BaseVertexHasNoPredecessor("the base vertex has no predecessor")
        if not w:  # B:e hangs directly off the base
            return Vertex("A:e", 0)
        lab = self._join("B" if kind == "A" else "A", w[:-1])
        return Vertex(lab, x.depth - 1)

    def distance(self, x: Vertex, y: Vertex) -> int:
        if x.label == y.label:
            return 0
        (kx, wx), (ky, wy) = self._split(x.label), self._split(y.label)
        k = 0
        m = min(len(wx), len(wy))
        while k < m and wx[k] == wy[k]:
            k += 1
        if k < len(wx) and k < len(wy):
            if (wx[k] in _U_LETTERS) and (wy[k] in _U_LETTERS):
                meet = self._word_depth("B", wx[:k])
            else:  # differing factor classes can only split at the base
                meet = 0
            return x.depth + y.depth - 2 * meet
        if len(wx) > len(wy):
            (kx, wx), (ky, wy) = (ky, wy), (kx, wx)
            x, y = y, x
        # wx is now a prefix of wy (possibly equal, with different kinds)
        if len(wx) == len(wy):
            return abs(x.depth - y.depth)
        if wx:
            meet = x.depth
        elif kx == "A":
            meet = 0
        else:  # x = B:e lies on the chain of y only if y branches through it
            meet = 1 if wy[0] in _U_LETTERS else -1  # -1: meet is the base, one step past x
        if meet >= 0:
            return y.depth - meet + (x.depth - meet)
        return y.depth + 1

    def _children(self, label: str) -> list[str]:
        kind, w = self._split(label)
        if kind == "A":
            if not w:  # the base: both incident edge-cosets lead downward
                return ["B:e", "B:s"]
            return [self._join("B", w + "s")]
        return [self._join("A", w + "u"), self._join("A", w + "U")]
