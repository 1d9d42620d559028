"""The deformation family pi_t built from the tree-distance kernel.

The construction: abstract vectors v_x (one per vertex) with inner products
<v_x, v_y> = t^{d(x,y)} and the action pi_t(g) v_x = v_{gx}.  Orthonormalizing
along predecessors gives the u-basis

    u_o = v_o,      u_x = (v_x - t v_{x-}) / sqrt(1 - t^2)   for x != o,

in which all matrix entries are explicit kernel combinations.  At t = 0 (with
the convention 0^0 = 1) the family degenerates to the vertex permutation
representation; t = 1 is excluded here and handled by the separate edge block
model :func:`pi1_block_model`.

Exact mode keeps every entry in Q(i)(sqrt(1-t^2)): entries of mixed type
(base row or column) are pure multiples of (1-t^2)^{-1/2}, everything else is
rational, so squared quantities and products of two mixed entries are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Union

import numpy as np

from .algebra import GroupAlgebraElement
from .errors import DegenerateParameter, GroupMismatch, ScalarModeMismatch
from .groups import Group, GroupElement
from .scalars import ExactComplex, RadicalScalar, format_exact
from .trees import TreeSpec, Vertex

Scalar = Union[RadicalScalar, complex]


class DeformationParameter:
    """A deformation value t in [0, 1), exact rational or float."""

    def __init__(self, value: Fraction | float, mode: str):
        if mode not in ("exact", "float"):
            raise ValueError(f"unknown scalar mode {mode!r}")
        if mode == "exact" and not isinstance(value, Fraction):
            raise TypeError("exact mode requires a Fraction value")
        if not 0 <= value < 1:
            raise DegenerateParameter(
                f"deformation parameter must lie in [0, 1), got {value}"
            )
        self.value = value
        self.mode = mode
        self._powers: list = [value**0, value]

    @classmethod
    def exact(cls, value) -> "DeformationParameter":
        return cls(Fraction(value), "exact")

    @classmethod
    def inexact(cls, value: float) -> "DeformationParameter":
        return cls(float(value), "float")

    def __repr__(self) -> str:
        return f"DeformationParameter({self.value}, {self.mode})"

    @property
    def is_exact(self) -> bool:
        return self.mode == "exact"

    @property
    def rad(self) -> Fraction | float:
        """1 - t^2, the square of the orthonormalization denominator."""
        return 1 - self.value * self.value

    def as_float(self) -> float:
        return float(self.value)

    def pow(self, k: int):
        """t^k with the convention t^0 = 1 (so 0^0 = 1 at t = 0)."""
        while len(self._powers) <= k:
            self._powers.append(self._powers[-1] * self.value)
        return self._powers[k]

    def one(self) -> Scalar:
        if self.is_exact:
            return RadicalScalar.rational(1, self.rad)
        return complex(1.0)

    def zero(self) -> Scalar:
        if self.is_exact:
            return RadicalScalar.rational(0, self.rad)
        return complex(0.0)

    def rational_scalar(self, q) -> Scalar:
        """Lift a rational value into the operator scalar type."""
        if self.is_exact:
            return RadicalScalar.rational(q, self.rad)
        return complex(float(q))

    def mixed_scalar(self, q) -> Scalar:
        """The value q / sqrt(1 - t^2), kept symbolic in exact mode."""
        if self.is_exact:
            return RadicalScalar.radical_part(Fraction(q) / self.rad, self.rad)
        return complex(float(q) / math.sqrt(self.rad))

    def sqrt_scalar(self, q) -> Scalar:
        """The value q * sqrt(1 - t^2), kept symbolic in exact mode."""
        if self.is_exact:
            return RadicalScalar.radical_part(q, self.rad)
        return complex(float(q) * math.sqrt(self.rad))


def kernel(tree: TreeSpec, t: DeformationParameter, x: Vertex, y: Vertex):
    """The positive-definite kernel t^{d(x,y)} (0^0 = 1)."""
    return t.pow(tree.distance(x, y))


def _pred(tree: TreeSpec, x: Vertex) -> Vertex:
    return tree.predecessor(x)


def u_entry(group: Group, t: DeformationParameter, g: GroupElement, x: Vertex, y: Vertex) -> Scalar:
    """<pi_t(g) u_x, u_y>, expanded in kernel values."""
    tree = group.tree()
    gx = group.act(g, x)
    if x.depth == 0 and y.depth == 0:
        return t.rational_scalar(t.pow(tree.distance(gx, y)))
    if x.depth == 0:
        yp = _pred(tree, y)
        q = t.pow(tree.distance(gx, y)) - t.value * t.pow(tree.distance(gx, yp))
        return t.mixed_scalar(q)
    gxp = group.act(g, _pred(tree, x))
    if y.depth == 0:
        q = t.pow(tree.distance(gx, y)) - t.value * t.pow(tree.distance(gxp, y))
        return t.mixed_scalar(q)
    yp = _pred(tree, y)
    q = (
        t.pow(tree.distance(gx, y))
        - t.value * t.pow(tree.distance(gx, yp))
        - t.value * t.pow(tree.distance(gxp, y))
        + t.value * t.value * t.pow(tree.distance(gxp, yp))
    )
    return t.rational_scalar(q / t.rad)


def v_in_u_coords(
    tree: TreeSpec, t: DeformationParameter, x: Vertex
) -> list[tuple[Vertex, Scalar]]:
    """Coordinates of v_x in the u-basis, along the geodesic from the base.

    v_x = t^k u_o + sqrt(1-t^2) * sum_j t^{k-j} u_{x_j} with x_j the depth-j
    vertex on the geodesic, x_k = x.
    """
    k = x.depth
    chain = [x]
    v = x
    while v.depth > 0:
        v = _pred(tree, v)
        chain.append(v)
    chain.reverse()
    out: list[tuple[Vertex, Scalar]] = [(chain[0], t.rational_scalar(t.pow(k)))]
    for j in range(1, k + 1):
        out.append((chain[j], t.sqrt_scalar(t.pow(k - j))))
    return out


def reconstruct_pairing(
    group: Group, t: DeformationParameter, g: GroupElement, x: Vertex, y: Vertex
) -> Scalar:
    """<pi_t(g) v_x, v_y> rebuilt from the u-expansion; equals t^{d(gx,y)}."""
    tree = group.tree()
    cx = v_in_u_coords(tree, t, x)
    cy = v_in_u_coords(tree, t, y)
    total = t.zero()
    for xp, cp in cx:
        for yq, cq in cy:
            total = total + cp * cq.conjugate() * u_entry(group, t, g, xp, yq)
    return total


@dataclass
class TruncatedOperator:
    """A ball-compressed operator in the u-basis (or the edge basis).

    ``labels`` freeze the index order.  Float mode stores a dense complex
    array with ``data[i, j] = <op u_{labels[j]}, u_{labels[i]}>``; exact mode
    stores the nonzero entries in a dict keyed by (row, column).
    """

    labels: tuple[str, ...]
    mode: str
    dense: np.ndarray | None = None
    sparse: dict[tuple[int, int], RadicalScalar] | None = None
    meta: dict[str, str] = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.labels)

    def entry(self, i: int, j: int):
        if self.mode == "float":
            assert self.dense is not None
            return self.dense[i, j]
        assert self.sparse is not None
        zero = RadicalScalar.rational(0)
        return self.sparse.get((i, j), zero)

    def to_dense(self) -> np.ndarray:
        if self.mode == "float":
            assert self.dense is not None
            return self.dense
        assert self.sparse is not None
        out = np.zeros((self.size, self.size), dtype=complex)
        for (i, j), v in self.sparse.items():
            out[i, j] = v.to_complex()
        return out

    def hermitian_defect(self) -> float:
        m = self.to_dense()
        return float(np.max(np.abs(m - m.conj().T))) if self.size else 0.0

    def is_hermitian_exact(self) -> bool:
        if self.mode != "exact":
            raise ScalarModeMismatch("exact Hermiticity check requires exact mode")
        assert self.sparse is not None
        for (i, j), v in self.sparse.items():
            if self.sparse.get((j, i), RadicalScalar.rational(0)).conjugate() != v:
                return False
        return True

    def to_csv(self, path: str) -> None:
        """Rows ``row_label,col_label,re,im``; '#' metadata header lines.

        Exact rationals serialize as ``p/q``; entries carrying the symbolic
        factor s = (1-t^2)^(-1/2) serialize with a ``*s`` suffix.
        """
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for key in sorted(self.meta):
                fh.write(f"# {key} = {self.meta[key]}\n")
            if self.mode == "exact":
                fh.write("# s = (1-t^2)^(-1/2)\n")
            fh.write("row_label,col_label,re,im\n")
            if self.mode == "float":
                assert self.dense is not None
                for i in range(self.size):
                    for j in range(self.size):
                        v = self.dense[i, j]
                        if v != 0:
                            fh.write(
                                f"{self.labels[i]},{self.labels[j]},{v.real!r},{v.imag!r}\n"
                            )
            else:
                assert self.sparse is not None
                for (i, j) in sorted(self.sparse):
                    v = self.sparse[(i, j)]
                    re = format_exact(v.base.re, v.coef.re * v.rad)
                    im = format_exact(v.base.im, v.coef.im * v.rad)
                    fh.write(f"{self.labels[i]},{self.labels[j]},{re},{im}\n")
        return None


def _column_entries(
    group: Group, t: DeformationParameter, g: GroupElement, x: Vertex
) -> dict[str, Scalar]:
    """Sparse column of pi_t(g) at x: row label -> operator scalar.

    pi_t(g) u_x expands over the predecessor chains of g.x and g.(x-); the
    sqrt(1-t^2) factors cancel on interior rows, leaving rationals, while the
    base row keeps one uncancelled factor.
    """
    tree = group.tree()
    gx = group.act(g, x)
    acc: dict[str, object] = {}

    def add_chain(top: Vertex, weight) -> None:
        # coefficient of v_top at chain vertex y is weight * t^{d(top) - d(y)}
        v = top
        while True:
            q = weight * t.pow(top.depth - v.depth)
            acc[v.label] = acc.get(v.label, 0) + q
            if v.depth == 0:
                return
            v = _pred(tree, v)

    base_label = tree.base_label
    one = Fraction(1) if t.is_exact else 1.0
    out: dict[str, Scalar] = {}
    if x.depth == 0:
        add_chain(gx, one)  # pi(g) u_o = v_{g.o}
        for label, q in acc.items():
            out[label] = t.rational_scalar(q) if label == base_label else t.sqrt_scalar(q)
    else:
        gxp = group.act(g, _pred(tree, x))
        add_chain(gx, one)
        add_chain(gxp, -t.value)  # pi(g) u_x = (v_{gx} - t v_{gxp}) / sqrt(1-t^2)
        for label, q in acc.items():
            out[label] = t.mixed_scalar(q) if label == base_label else t.rational_scalar(q)
    if t.is_exact:
        return {k: v for k, v in out.items() if not v.is_zero()}
    return {k: v for k, v in out.items() if v != 0}


def rep_matrix(
    group: Group, t: DeformationParameter, g: GroupElement, radius: int,
    max_vertices: int | None = None,
) -> TruncatedOperator:
    """The ball(R) compression of pi_t(g) in the u-basis."""
    tree = group.tree()
    ball = tree.ball(radius, max_vertices)
    index = {v.label: i for i, v in enumerate(ball)}
    labels = tuple(v.label for v in ball)
    meta = {
        "t": str(t.value),
        "element": g.label,
        "radius": str(radius),
        "mode": t.mode,
        "basis": "vertex-u",
    }
    if t.is_exact:
        sparse: dict[tuple[int, int], RadicalScalar] = {}
        for j, x in enumerate(ball):
            for label, val in _column_entries(group, t, g, x).items():
                i = index.get(label)
                if i is not None:
                    assert isinstance(val, RadicalScalar)
                    sparse[(i, j)] = val
        return TruncatedOperator(labels, "exact", sparse=sparse, meta=meta)
    dense = np.zeros((len(ball), len(ball)), dtype=complex)
    for j, x in enumerate(ball):
        for label, val in _column_entries(group, t, g, x).items():
            i = index.get(label)
            if i is not None:
                dense[i, j] = val
    return TruncatedOperator(labels, "float", dense=dense, meta=meta)


def rep_of_element(
    group: Group, t: DeformationParameter, a: GroupAlgebraElement, radius: int,
    max_vertices: int | None = None,
) -> TruncatedOperator:
    """The ball(R) compression of pi_t(a) = sum_g a(g) pi_t(g)."""
    if a.group != group:
        raise GroupMismatch(f"{a!r} does not live on {group!r}")
    if t.mode != a.mode:
        raise ScalarModeMismatch("parameter and element must share a scalar mode")
    tree = group.tree()
    ball = tree.ball(radius, max_vertices)
    index = {v.label: i for i, v in enumerate(ball)}
    labels = tuple(v.label for v in ball)
    meta = {
        "t": str(t.value),
        "element": a.describe(),
        "radius": str(radius),
        "mode": t.mode,
        "basis": "vertex-u",
    }
    if t.is_exact:
        sparse: dict[tuple[int, int], RadicalScalar] = {}
        for g, coeff in a.coeffs.items():
            assert isinstance(coeff, ExactComplex)
            for j, x in enumerate(ball):
                for label, val in _column_entries(group, t, g, x).items():
                    i = index.get(label)
                    if i is None:
                        continue
                    assert isinstance(val, RadicalScalar)
                    contrib = val.scale(coeff)
                    key = (i, j)
                    prev = sparse.get(key)
                    nxt = contrib if prev is None else prev + contrib
                    if nxt.is_zero():
                        sparse.pop(key, None)
                    else:
                        sparse[key] = nxt
        return TruncatedOperator(labels, "exact", sparse=sparse, meta=meta)
    dense = np.zeros((len(ball), len(ball)), dtype=complex)
    for g, coeff in a.coeffs.items():
        c = complex(coeff)
        for j, x in enumerate(ball):
            for label, val in _column_entries(group, t, g, x).items():
                i = index.get(label)
                if i is not None:
                    dense[i, j] += c * val
    return TruncatedOperator(labels, "float", dense=dense, meta=meta)


def finite_rank_support(
    group: Group, t: DeformationParameter, g: GroupElement, radius: int,
    max_vertices: int | None = None,
) -> frozenset[tuple[int, int]]:
    """Index pairs (column x, row y) where pi_t(g) and pi_0(g) differ on ball(R).

    Exact computation.  A column x can differ from the permutation column only
    when the predecessor is displaced, g.(x-) != (g.x)-, or when x is the base
    and g moves it: otherwise (v_{gx} - t v_{g.x-})/sqrt(1-t^2) is u_{gx} on
    the nose.  All columns are scanned; no localization is assumed.
    """
    if not t.is_exact:
        raise ScalarModeMismatch("finite_rank_support requires an exact parameter")
    tree = group.tree()
    ball = tree.ball(radius, max_vertices)
    index = {v.label: i for i, v in enumerate(ball)}
    zero_t = DeformationParameter.exact(0)
    support: set[tuple[int, int]] = set()
    for j, x in enumerate(ball):
        gx = group.act(g, x)
        if x.depth == 0:
            if gx.depth == 0:
                continue  # v_{g.o} = v_o = u_o: identical columns
        else:
            gxp = group.act(g, _pred(tree, x))
            if gx.depth > 0 and gxp == _pred(tree, gx):
                continue  # column is exactly u_{gx}: identical to pi_0
        col_t = _column_entries(group, t, g, x)
        col_0 = _column_entries(group, zero_t, g, x)
        rows = set(col_t) | set(col_0)
        for label in rows:
            i = index.get(label)
            if i is None:
                continue
            vt = col_t.get(label)
            v0 = col_0.get(label)
            if vt is None or v0 is None:
                support.add((j, i))
                continue
            assert isinstance(vt, RadicalScalar) and isinstance(v0, RadicalScalar)
            if vt != v0:
                support.add((j, i))
    return frozenset(support)


def pi1_block_model(
    group: Group, g: GroupElement, radius: int, max_vertices: int | None = None
) -> tuple[float, TruncatedOperator]:
    """The t = 1 endpoint: trivial block plus the edge permutation on ball(R).

    Edges are indexed by their deeper endpoint, so the edge basis is the ball
    minus the base vertex, in ball order.
    """
    tree = group.tree()
    ball = tree.ball(radius, max_vertices)
    edges = ball[1:]
    eindex = {v.label: i for i, v in enumerate(edges)}
    sparse: dict[tuple[int, int], RadicalScalar] = {}
    one = RadicalScalar.rational(1)
    for j, x in enumerate(edges):
        gx = group.act(g, x)
        gp = group.act(g, _pred(tree, x))
        child = gx if gx.depth > gp.depth else gp
        i = eindex.get(child.label)
        if i is not None:
            sparse[(i, j)] = one
    meta = {
        "t": "1",
        "element": g.label,
        "radius": str(radius),
        "mode": "exact",
        "basis": "edge",
    }
    op = TruncatedOperator(tuple(v.label for v in edges), "exact", sparse=sparse, meta=meta)
    return 1.0, op


def u_gram_defects(
    tree: TreeSpec, t: DeformationParameter, radius: int, max_vertices: int | None = None
) -> list[tuple[int, int]]:
    """Exact orthonormality check of the u-system over ball(R).

    Recomputes every Gram entry <u_x, u_y> from four independently computed
    kernel distances and verifies it equals the identity matrix.  The rational
    arithmetic is carried out on integers (scaled by q^max) for speed.  Returns
    the list of offending index pairs (empty on success).
    """
    if not t.is_exact:
        raise ScalarModeMismatch("orthonormality check requires an exact parameter")
    ball = tree.ball(radius, max_vertices)
    tv = t.value
    p, q = tv.numerator, tv.denominator
    top = 2 * radius + 4
    P = [p**k for k in range(top + 1)]
    Q = [q**k for k in range(top + 1)]
    n = len(ball)
    preds = [None] + [tree.predecessor(v) for v in ball[1:]]
    defects: list[tuple[int, int]] = []

    from .trees import FreeCayleyTree

    if isinstance(tree, FreeCayleyTree):
        words = ["" if v.label == "e" else v.label for v in ball]

        def dist(wa: str, wb: str) -> int:
            k = 0
            m = min(len(wa), len(wb))
            while k < m and wa[k] == wb[k]:
                k += 1
            return len(wa) + len(wb) - 2 * k

        pword = [""] + [w[:-1] for w in words[1:]]
        for i in range(1, n):
            wi, pi = words[i], pword[i]
            for j in range(i + 1, n):
                wj, pj = words[j], pword[j]
                d1 = dist(wi, wj)
                d2 = dist(pi, wj)
                d3 = dist(wi, pj)
                d4 = dist(pi, pj)
                if P[d1] * Q[top - d1] - P[d2 + 1] * Q[top - d2 - 1] \
                        - P[d3 + 1] * Q[top - d3 - 1] + P[d4 + 2] * Q[top - d4 - 2]:
                    defects.append((i, j))
    else:
        for i in range(n):
            x, px = ball[i], preds[i]
            for j in range(i + 1, n):
                y, py = ball[j], preds[j]
                if i == 0:
                    d1 = tree.distance(x, y)
                    d3 = tree.distance(x, py)
                    if P[d1] * Q[top - d1] != P[d3 + 1] * Q[top - d3 - 1]:
                        defects.append((i, j))
                    continue
                d1 = tree.distance(x, y)
                d2 = tree.distance(px, y)
                d3 = tree.distance(x, py)
                d4 = tree.distance(px, py)
                if P[d1] * Q[top - d1] - P[d2 + 1] * Q[top - d2 - 1] \
                        - P[d3 + 1] * Q[top - d3 - 1] + P[d4 + 2] * Q[top - d4 - 2]:
                    defects.append((i, j))
    # base row against interior columns (the free path starts at i = 1)
    if isinstance(tree, FreeCayleyTree):
        for j in range(1, n):
            dj = ball[j].depth
            dpj = preds[j].depth
            if P[dj] * Q[top - dj] != P[dpj + 1] * Q[top - dpj - 1]:
                defects.append((0, j))
    # diagonal entries: (1 - 2t^2 + t^2)/(1-t^2) must equal one
    diag_num = Fraction(Q[top] - P[2] * Q[top - 2], Q[top])
    if diag_num != t.rad:
        defects.extend((i, i) for i in range(1, n))
    return defects


def kernel_gram_ldl(
    tree: TreeSpec, t: DeformationParameter, vertices: list[Vertex]
) -> tuple[list[Fraction], list[dict[int, Fraction]]]:
    """Exact LDL^T factorization of the Gram matrix [t^{d(x,y)}].

    Returns (diag, rows) with rows[i] = {j: L[i][j] for j < i, nonzero}.
    Left-looking elimination over Fractions; zero fill is dropped, which keeps
    the factor ancestor-sparse when the vertex order is compatible with the
    tree (any order is correct, just slower).
    """
    if not t.is_exact:
        raise ScalarModeMismatch("exact LDL requires an exact parameter")
    n = len(vertices)
    tv = t.value
    powers: dict[int, Fraction] = {0: Fraction(1)}

    def tpow(k: int) -> Fraction:
        if k not in powers:
            powers[k] = tv ** k
        return powers[k]

    diag: list[Fraction] = []
    rows: list[dict[int, Fraction]] = [dict() for _ in range(n)]
    for j in range(n):
        row_j = rows[j]
        pivot = Fraction(1)  # K(j,j) = t^0
        for z, ljz in row_j.items():
            pivot -= ljz * ljz * diag[z]
        if pivot < 0:
            raise ValueError(f"negative pivot {pivot} at index {j}: matrix not PSD")
        diag.append(pivot)
        for i in range(j + 1, n):
            s = tpow(tree.distance(vertices[i], vertices[j]))
            row_i = rows[i]
            for z, ljz in row_j.items():
                liz = row_i.get(z)
                if liz is not None:
                    s -= liz * ljz * diag[z]
            if s:
                if pivot == 0:
                    raise ValueError(f"zero pivot at index {j} with nonzero column")
                row_i[j] = s / pivot
    return diag, rows


def permutation_matrix(
    group: Group, g: GroupElement, radius: int, max_vertices: int | None = None
) -> TruncatedOperator:
    """The ball(R) truncation of the vertex permutation action of g (= pi_0(g))."""
    tree = group.tree()
    ball = tree.ball(radius, max_vertices)
    index = {v.label: i for i, v in enumerate(ball)}
    one = RadicalScalar.rational(1)
    sparse: dict[tuple[int, int], RadicalScalar] = {}
    for j, x in enumerate(ball):
        i = index.get(group.act(g, x).label)
        if i is not None:
            sparse[(i, j)] = one
    meta = {"t": "0", "element": g.label, "radius": str(radius), "mode": "exact", "basis": "vertex-u"}
    return TruncatedOperator(tuple(v.label for v in ball), "exact", sparse=sparse, meta=meta)
