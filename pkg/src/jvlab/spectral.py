"""Spectral analysis of ball compressions: norm curves, gaps, separation.

Norms are reported as monotone lower bounds: the largest singular value of
the ball(R) compression of pi_t(a) in the u-basis.  Compressions in a nested
orthonormal family are nondecreasing in R and converge to the true norm; the
l1 norm of the element is the only rigorous upper bound used.

Three computation paths produce the same values and cross-check one another
in the tests:

* a dense eigensolver below ``DENSE_CUTOFF`` vertices (the oracle);
* an implicitly restarted Lanczos (ARPACK) on a matrix-free operator that
  applies pi_t(g) through predecessor-chain recursions, for large balls;
* for the free-group averaging element at t = 0 a radial reduction: the ball
  adjacency operator commutes with the automorphisms fixing the base vertex,
  so its top eigenvalue equals that of the (R+1) x (R+1) shell tridiagonal
  with couplings sqrt(|S_{k+1}|/|S_k|).

All Lanczos start vectors derive from an explicit seed, so results are
deterministic; ``ConvergenceFailure`` surfaces when ARPACK exhausts its
iteration cap (10 * size) without converging.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.sparse.linalg as spla

from .algebra import GroupAlgebraElement, markov_element
from .deformation import DeformationParameter, rep_of_element
from .errors import ConvergenceFailure, ResourceLimit
from .groups import Group, GroupElement
from .trees import AmalgamTree, BallIndex, FreeCayleyTree, TreeSpec, max_ball_vertices

DENSE_CUTOFF = 2000


def ball_size(tree: TreeSpec, radius: int) -> int:
    """|ball(R)| from the shell recursion, without enumerating the ball."""
    return sum(shell_sizes(tree, radius))


def shell_sizes(tree: TreeSpec, radius: int) -> list[int]:
    if isinstance(tree, FreeCayleyTree):
        n = tree.n
        out = [1]
        if radius >= 1:
            out.append(2 * n)
        for _ in range(2, radius + 1):
            out.append(out[-1] * (2 * n - 1))
        return out[: radius + 1]
    if isinstance(tree, AmalgamTree):
        out = [1]
        for k in range(1, radius + 1):
            if k == 1:
                out.append(2)
            elif k % 2 == 0:  # previous level holds B-cosets, each with 2 children
                out.append(out[-1] * 2)
            else:  # previous level holds A-cosets, each with 1 child
                out.append(out[-1])
        return out
    raise TypeError(f"unknown tree {tree!r}")


class BallCompression:
    """Matrix-free ball(R) compression machinery for one group-algebra element.

    The maps x -> g.x are precomputed per support element into index arrays
    over the halo ball(R + L); they do not depend on t, so one instance serves
    a whole t-grid and all radii r <= R.
    """

    def __init__(
        self,
        group: Group,
        a: GroupAlgebraElement,
        radius: int,
        max_vertices: int | None = None,
    ):
        a = a.as_float()
        self.group = group
        self.element = a
        self.radius = radius
        tree = group.tree()
        cap = max_ball_vertices() if max_vertices is None else max_vertices
        if ball_size(tree, radius) > cap:
            raise ResourceLimit(
                f"ball({radius}) of {tree!r} exceeds the cap of {cap} vertices"
            )
        # the user-facing ball was cap-checked above; the halo ball(R + L) is
        # a structural necessity of the matvec and is allowed explicitly
        halo = radius + a.max_word_length()
        self.big: BallIndex = tree.ball_index(halo, max_vertices=ball_size(tree, halo))
        self.n_small = self.big.offsets[radius + 1]
        self.real = all(abs(c.imag) == 0 for c in a.coeffs.values())
        self.dtype = np.float64 if self.real else np.complex128
        self.coeffs: list[tuple[float | complex, np.ndarray]] = []
        levels = [
            (self.big.offsets[k], self.big.offsets[k + 1])
            for k in range(len(self.big.offsets) - 1)
        ]
        self.levels = levels
        for g, c in a.sorted_items():
            gmap = self._action_map(g)
            self.coeffs.append((c.real if self.real else complex(c), gmap))
        # labels and the lookup dict are only needed while building the maps
        self.big._lookup = None
        self.big.labels = []

    def _action_map(self, g: GroupElement) -> np.ndarray:
        group, big = self.group, self.big
        from .trees import Vertex

        out = np.empty(self.n_small, dtype=np.int64)
        pos = 0
        for depth in range(self.radius + 1):
            lo, hi = big.level(depth)
            for i in range(lo, hi):
                out[pos] = big.index(group.act(g, Vertex(big.labels[i], depth)).label)
                pos += 1
        return out

    def _child_sums(self, c: np.ndarray) -> np.ndarray:
        """Per-parent sums of c over ball(R) \\ {base}; indexed by ball(R-1)."""
        big = self.big
        n_par = big.offsets[self.radius] if self.radius >= 1 else 0
        out = np.zeros(n_par, dtype=c.dtype)
        uniform = big.uniform_child_counts
        for k in range(1, self.radius + 1):
            lo, hi = big.level(k)
            if hi == lo:
                continue
            plo, phi = big.level(k - 1)
            if uniform is not None:
                cnt = uniform[k - 1]
                out[plo:phi] += c[lo:hi].reshape(phi - plo, cnt).sum(axis=1)
            else:
                np.add.at(out, big.parents[lo:hi], c[lo:hi])
        return out

    def _pull_up(self, s: np.ndarray, tval: float) -> None:
        """In place: s_z += t * sum over children of s, deepest level first."""
        big = self.big
        uniform = big.uniform_child_counts
        for k in range(len(big.offsets) - 2, 0, -1):
            lo, hi = big.level(k)
            if hi == lo:
                continue
            plo, phi = big.level(k - 1)
            if uniform is not None:
                cnt = uniform[k - 1]
                s[plo:phi] += tval * s[lo:hi].reshape(phi - plo, cnt).sum(axis=1)
            else:
                np.add.at(s, big.parents[lo:hi], tval * s[lo:hi])

    def matvec(self, c: np.ndarray, tval: float, r: int | None = None) -> np.ndarray:
        """Apply the ball(r) compression of pi_t(a) to a coefficient vector."""
        r = self.radius if r is None else r
        n_r = self.big.offsets[r + 1]
        if c.shape[0] != n_r:
            raise ValueError(f"expected vector of length {n_r}, got {c.shape[0]}")
        full = np.zeros(self.n_small, dtype=self.dtype)
        full[:n_r] = c
        if tval == 0.0:
            out_big = np.zeros(self.big.size, dtype=self.dtype)
            for coeff, gmap in self.coeffs:
                out_big[gmap] += coeff * full
            return out_big[:n_r].copy()
        inv = 1.0 / math.sqrt(1.0 - tval * tval)
        sq = math.sqrt(1.0 - tval * tval)
        csum = self._child_sums(full)
        b = np.zeros(self.big.size, dtype=self.dtype)
        for coeff, gmap in self.coeffs:
            # pi(g) u_x = (v_{gx} - t v_{g.x-})/sqrt(1-t^2) for x != o, v_{g.o} for x = o;
            # the second term aggregates per parent before its (injective) scatter
            b[gmap[1:]] += (coeff * inv) * full[1:]
            b[gmap[0]] += coeff * full[0]
            if csum.size:
                b[gmap[: csum.size]] -= (coeff * tval * inv) * csum
        self._pull_up(b, tval)
        out = b[:n_r].copy()
        out[1:] *= sq
        return out


def _dense_norm(group: Group, tval: float, a: GroupAlgebraElement, radius: int,
                selfadjoint: bool, max_vertices: int | None) -> float:
    t = DeformationParameter.inexact(tval)
    op = rep_of_element(group, t, a.as_float(), radius, max_vertices=max_vertices)
    m = op.to_dense()
    if selfadjoint:
        return float(np.max(np.abs(np.linalg.eigvalsh(m))))
    return float(np.linalg.svd(m, compute_uv=False)[0]) if m.size else 0.0


def _radial_markov_zero(tree: FreeCayleyTree, radius: int) -> float:
    """f_R(0) for the generator-averaging element on a free Cayley tree.

    The t = 0 compression is 1/(2n) times the ball adjacency matrix, whose
    Perron vector is radial; the radial block is the shell tridiagonal.
    """
    if radius == 0:
        return 0.0
    shells = shell_sizes(tree, radius)
    off = [math.sqrt(shells[k + 1] / shells[k]) for k in range(radius)]
    m = np.zeros((radius + 1, radius + 1))
    for k, v in enumerate(off):
        m[k, k + 1] = m[k + 1, k] = v
    lam = float(np.max(np.abs(np.linalg.eigvalsh(m))))
    return lam / (2 * tree.n)


def _is_markov(group: Group, a: GroupAlgebraElement) -> bool:
    ref = markov_element(group, "float")
    return a.as_float() == ref


def _eigsh_norm(
    matvec, n: int, dtype, seed: int, selfadjoint: bool, rmatvec=None,
    v0: np.ndarray | None = None,
) -> tuple[float, np.ndarray]:
    """Largest singular value via ARPACK with a seeded (or warm) start vector.

    Returns the value together with the attaining vector; the value is the
    Rayleigh quotient of that vector, hence a certified lower bound.
    """
    if n == 1:
        e = np.ones(1, dtype=dtype)
        return float(abs(matvec(e)[0])), e
    if v0 is None:
        rng = np.random.default_rng(seed)
        v0 = rng.standard_normal(n)
        if dtype == np.complex128:
            v0 = v0 + 1j * rng.standard_normal(n)
    maxiter = 10 * n
    try:
        if selfadjoint:
            op = spla.LinearOperator((n, n), matvec=matvec, dtype=dtype)
            _, vecs = spla.eigsh(op, k=1, which="LM", v0=v0, maxiter=maxiter, tol=0)
            vec = vecs[:, 0]
            av = matvec(vec)
            return float(abs(np.vdot(vec, av)) / np.vdot(vec, vec).real), vec
        assert rmatvec is not None

        def ata(c):
            return rmatvec(matvec(c))

        op = spla.LinearOperator((n, n), matvec=ata, dtype=dtype)
        _, vecs = spla.eigsh(op, k=1, which="LA", v0=v0, maxiter=maxiter, tol=0)
        vec = vecs[:, 0]
        av = matvec(vec)
        val = float(math.sqrt(max(np.vdot(av, av).real / np.vdot(vec, vec).real, 0.0)))
        return val, vec
    except spla.ArpackNoConvergence as exc:
        raise ConvergenceFailure(f"Lanczos did not converge within {maxiter} iterations") from exc


def compression_norm(
    group: Group,
    t: DeformationParameter,
    a: GroupAlgebraElement,
    radius: int,
    *,
    seed: int = 0,
    method: str = "auto",
    max_vertices: int | None = None,
    ctx: BallCompression | None = None,
) -> float:
    """Largest singular value of the ball(R) compression of pi_t(a).

    A certified lower bound on ||pi_t(a)||: the returned value is a Rayleigh
    quotient of the compression.  Deterministic for a fixed seed.
    """
    tval = t.as_float()
    a = a.as_float()
    tree = group.tree()
    selfadjoint = a.is_selfadjoint()
    if method not in ("auto", "dense", "sparse", "radial"):
        raise ValueError(f"unknown method {method!r}")
    if method == "auto":
        if tval == 0.0 and isinstance(tree, FreeCayleyTree) and _is_markov(group, a):
            method = "radial"
        elif ball_size(tree, radius) <= DENSE_CUTOFF:
            method = "dense"
        else:
            method = "sparse"
    if method == "radial":
        if tval != 0.0 or not isinstance(tree, FreeCayleyTree) or not _is_markov(group, a):
            raise ValueError("radial path applies to the averaging element at t = 0 only")
        cap = max_ball_vertices() if max_vertices is None else max_vertices
        if ball_size(tree, radius) > cap:
            raise ResourceLimit(f"ball({radius}) exceeds the cap of {cap} vertices")
        return _radial_markov_zero(tree, radius)
    if method == "dense":
        return _dense_norm(group, tval, a, radius, selfadjoint, max_vertices)
    if ctx is None:
        ctx = BallCompression(group, a, radius, max_vertices)
    return _sparse_norm(group, tval, a, radius, seed, ctx, max_vertices)[0]


def _sparse_norm(
    group: Group,
    tval: float,
    a: GroupAlgebraElement,
    radius: int,
    seed: int,
    ctx: BallCompression,
    max_vertices: int | None,
    v0: np.ndarray | None = None,
) -> tuple[float, np.ndarray]:
    if radius > ctx.radius:
        raise ValueError("context built for a smaller radius")
    n_r = ctx.big.offsets[radius + 1]

    def mv(c):
        return ctx.matvec(np.asarray(c).astype(ctx.dtype, copy=False), tval, radius)

    if a.is_selfadjoint():
        return _eigsh_norm(mv, n_r, ctx.dtype, seed, True, v0=v0)
    star_ctx = BallCompression(group, a.star(), radius, max_vertices)

    def rmv(c):
        return star_ctx.matvec(np.asarray(c).astype(ctx.dtype, copy=False), tval, radius)

    return _eigsh_norm(mv, n_r, ctx.dtype, seed, False, rmatvec=rmv, v0=v0)


@dataclass
class NormCurve:
    """Norm values f_r(t) of one element over a t-grid and nested radii."""

    element: str
    grid: list[float]
    radius: int
    values: list[float]
    convergence: list[list[float]] = field(default_factory=list)  # per t: f_1..f_R
    l1_bound: float = 0.0
    extrapolated: list[float] = field(default_factory=list)  # advisory, never asserted

    def value_at(self, tval: float) -> float:
        return self.values[self.grid.index(tval)]


def richardson_extrapolate(trace: list[float]) -> float:
    """Advisory limit estimate from the last two radii, model f_r ~ f - c/r^2."""
    r = len(trace)
    if r < 2:
        return trace[-1] if trace else 0.0
    f2, f1 = trace[-1], trace[-2]
    return (r * r * f2 - (r - 1) * (r - 1) * f1) / (r * r - (r - 1) * (r - 1))


def _curve_single_t(
    group: Group,
    a: GroupAlgebraElement,
    tval: float,
    radius: int,
    seed: int,
    max_vertices: int | None,
    ctx: BallCompression | None,
) -> list[float]:
    t = DeformationParameter.inexact(tval)
    tree = group.tree()
    radial = tval == 0.0 and isinstance(tree, FreeCayleyTree) and _is_markov(group, a)
    trace = []
    vec: np.ndarray | None = None
    for r in range(1, radius + 1):
        if ctx is not None and not radial and ball_size(tree, r) > DENSE_CUTOFF:
            n_r = ctx.big.offsets[r + 1]
            v0 = None
            if vec is not None and vec.shape[0] < n_r:
                v0 = np.zeros(n_r, dtype=ctx.dtype)
                v0[: vec.shape[0]] = vec  # warm start from the nested compression
            val, vec = _sparse_norm(group, tval, a, r, seed, ctx, max_vertices, v0=v0)
            trace.append(val)
        else:
            trace.append(
                compression_norm(group, t, a, r, seed=seed, max_vertices=max_vertices)
            )
    return trace


def norm_curve(
    group: Group,
    a: GroupAlgebraElement,
    grid: list[float],
    radius: int,
    *,
    seed: int = 0,
    jobs: int = 1,
    max_vertices: int | None = None,
) -> NormCurve:
    """f_r(t) for every grid value and every radius r <= R.

    Grid points are independent jobs; the action maps are built once and
    shared read-only.  Output ordering follows the grid, so runs with the
    same seed are reproducible bit for bit.
    """
    a = a.as_float()
    for tval in grid:
        if not 0 <= tval < 1:
            raise ValueError(f"grid value {tval} outside [0, 1)")
    tree = group.tree()
    radial_covers_all = (
        isinstance(tree, FreeCayleyTree)
        and _is_markov(group, a)
        and all(tval == 0.0 for tval in grid)
    )
    needs_sparse = ball_size(tree, radius) > DENSE_CUTOFF and not radial_covers_all
    ctx = BallCompression(group, a, radius, max_vertices) if needs_sparse else None

    def job(tval: float) -> list[float]:
        return _curve_single_t(group, a, tval, radius, seed, max_vertices, ctx)

    if jobs > 1 and len(grid) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            traces = list(pool.map(job, grid))
    else:
        traces = [job(tval) for tval in grid]
    values = [tr[-1] if tr else 0.0 for tr in traces]
    return NormCurve(
        element=a.describe(),
        grid=list(grid),
        radius=radius,
        values=values,
        convergence=traces,
        l1_bound=a.l1_norm(),
        extrapolated=[richardson_extrapolate(tr) for tr in traces],
    )


def difference_norm(
    group: Group,
    t: DeformationParameter,
    s: DeformationParameter,
    a: GroupAlgebraElement,
    radius: int,
    *,
    seed: int = 0,
    max_vertices: int | None = None,
) -> float:
    """Largest singular value of pi_t(a) - pi_s(a) compressed to ball(R)."""
    a = a.as_float()
    tval, sval = t.as_float(), s.as_float()
    if tval == sval:
        return 0.0
    tree = group.tree()
    if ball_size(tree, radius) <= DENSE_CUTOFF:
        mt = rep_of_element(group, DeformationParameter.inexact(tval), a, radius,
                            max_vertices=max_vertices).to_dense()
        ms = rep_of_element(group, DeformationParameter.inexact(sval), a, radius,
                            max_vertices=max_vertices).to_dense()
        diff = mt - ms
        if a.is_selfadjoint():
            return float(np.max(np.abs(np.linalg.eigvalsh(diff)))) if diff.size else 0.0
        return float(np.linalg.svd(diff, compute_uv=False)[0]) if diff.size else 0.0
    ctx = BallCompression(group, a, radius, max_vertices)
    n_r = ctx.big.offsets[radius + 1]

    def mv(c):
        c = np.asarray(c).astype(ctx.dtype, copy=False)
        return ctx.matvec(c, tval, radius) - ctx.matvec(c, sval, radius)

    if a.is_selfadjoint():
        return _eigsh_norm(mv, n_r, ctx.dtype, seed, True)[0]
    star_ctx = BallCompression(group, a.star(), radius, max_vertices)

    def rmv(c):
        c = np.asarray(c).astype(ctx.dtype, copy=False)
        return star_ctx.matvec(c, tval, radius) - star_ctx.matvec(c, sval, radius)

    return _eigsh_norm(mv, n_r, ctx.dtype, seed, False, rmatvec=rmv)[0]


def spectral_gap_report(
    group: Group,
    a: GroupAlgebraElement,
    radius: int,
    *,
    seed: int = 0,
    max_vertices: int | None = None,
) -> tuple[float, float]:
    """(f_R(0), |1_G(a)|): truncated pi_0-norm against the trivial character.

    A persistent gap across increasing R witnesses that the permutation
    representation stays away from the trivial one.
    """
    if not a.is_selfadjoint():
        raise ValueError("gap reports require a self-adjoint element")
    f0 = compression_norm(group, DeformationParameter.inexact(0.0), a, radius,
                          seed=seed, max_vertices=max_vertices)
    return f0, abs(a.trivial_value())


def distinguishability_report(
    curve: NormCurve, eps: float
) -> list[tuple[float, float]]:
    """All grid pairs (t, s) with |f_R(t) - f_R(s)| > eps, in grid order."""
    out = []
    for i, tv in enumerate(curve.grid):
        for j in range(i + 1, len(curve.grid)):
            sv = curve.grid[j]
            if abs(curve.values[i] - curve.values[j]) > eps:
                out.append((tv, sv))
    return out


def curve_to_csv(curve: NormCurve, path: str) -> None:
    """Header ``t,radius,norm,l1_bound``; one row per (t, r) trace point."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("t,radius,norm,l1_bound\n")
        for tval, trace in zip(curve.grid, curve.convergence):
            for r, v in enumerate(trace, start=1):
                fh.write(f"{tval!r},{r},{v!r},{curve.l1_bound!r}\n")


def curve_to_svg(curve: NormCurve, path: str) -> None:
    """Minimal self-contained line chart of f_R(t) against t."""
    w, h, pad = 640, 440, 50
    xs = curve.grid
    ys = curve.values
    if not xs:
        raise ValueError("empty curve")
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0

    def sx(x: float) -> float:
        return pad + (x - x0) / (x1 - x0) * (w - 2 * pad)

    def sy(y: float) -> float:
        return h - pad - (y - y0) / (y1 - y0) * (h - 2 * pad)

    pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs, ys))
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}">',
        f'<rect width="{w}" height="{h}" fill="white"/>',
        f'<line x1="{pad}" y1="{h - pad}" x2="{w - pad}" y2="{h - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{h - pad}" stroke="black"/>',
        f'<polyline points="{pts}" fill="none" stroke="#1f6fb2" stroke-width="2"/>',
    ]
    for x, y in zip(xs, ys):
        lines.append(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="3" fill="#1f6fb2"/>')
        lines.append(
            f'<text x="{sx(x):.2f}" y="{h - pad + 18}" font-size="11" text-anchor="middle">{x:g}</text>'
        )
    lines.append(
        f'<text x="{pad - 8}" y="{sy(y0):.2f}" font-size="11" text-anchor="end">{y0:.4f}</text>'
    )
    lines.append(
        f'<text x="{pad - 8}" y="{sy(y1):.2f}" font-size="11" text-anchor="end">{y1:.4f}</text>'
    )
    lines.append(
        f'<text x="{w / 2:.0f}" y="{h - 12}" font-size="12" text-anchor="middle">deformation parameter t</text>'
    )
    lines.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
