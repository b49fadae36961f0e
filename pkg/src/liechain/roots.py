"""Real root-space decomposition, root combinatorics and structure constants."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .algebra import (
    StructuralError,
    Subspace,
    intersect,
    orth_complement,
    orthonormal_span,
    span_rows,
    sum_span,
)
from .lie import DegenerateProbeError, LieAlgebraModel, maximal_torus

TAU_ROOT = 1e-8
CLUSTER_RTOL = 1e-7
MAX_PROBES = 5
# rank2_span_type labels
A2, B2, G2, REDUCIBLE = "A2", "B2", "G2", "REDUCIBLE"


class FrameConventionError(RuntimeError):
    """Brackets of the root frames disagree with the extracted structure constants."""


def positivity_vector(r: int) -> np.ndarray:
    return np.pi ** -np.arange(r, dtype=float)


@dataclass(frozen=True, eq=False)
class RootDatum:
    """Positive roots of ``algebra`` relative to the torus ``torus``.

    Root ``i`` (``0 <= i < p``) is the positive root ``roots[i]``; signed index
    ``p + i`` stands for ``-roots[i]``.  ``X[i]``, ``Y[i]`` are flat ambient
    vectors with ``ad_H X = a(H) Y`` and ``ad_H Y = -a(H) X``.
    """

    algebra: LieAlgebraModel
    torus: Subspace
    roots: np.ndarray
    X: np.ndarray
    Y: np.ndarray
    v: np.ndarray

    @property
    def space(self):
        return self.algebra.space

    @property
    def rank(self) -> int:
        return self.torus.dim

    @property
    def n_positive(self) -> int:
        return self.roots.shape[0]

    @cached_property
    def signed(self) -> np.ndarray:
        """All roots, positive ones first: shape ``(2p, r)``."""
        return np.vstack([self.roots, -self.roots])

    def positive_index(self, a: int) -> int:
        return a % self.n_positive

    def is_positive(self, a: int) -> bool:
        return a < self.n_positive

    def negate(self, a: int) -> int:
        p = self.n_positive
        return a + p if a < p else a - p

    @cached_property
    def _scale(self) -> float:
        return float(np.max(np.linalg.norm(self.roots, axis=1))) if self.n_positive else 1.0

    def index_of(self, covector) -> int | None:
        if self.n_positive == 0:
            return None
        d = np.linalg.norm(self.signed - np.asarray(covector), axis=1)
        i = int(np.argmin(d))
        return i if d[i] < 1e-6 * self._scale else None

    def lengths(self) -> np.ndarray:
        return np.linalg.norm(self.roots, axis=1)

    @cached_property
    def long_roots(self) -> tuple:
        """Signed indices of roots of maximal length within their irreducible component."""
        out = []
        for comp in irreducible_components(self):
            L = np.linalg.norm(self.signed[list(comp)], axis=1)
            out += [a for a, l in zip(comp, L) if l > L.max() * (1 - 1e-6)]
        return tuple(sorted(out))

    def E(self, a: int) -> tuple:
        """``E_a = X - iY`` (positive) or ``X + iY`` (negative) as (real, imag) flats."""
        i = self.positive_index(a)
        s = -1.0 if self.is_positive(a) else 1.0
        return self.X[i], s * self.Y[i]

    def coroot(self, a: int) -> np.ndarray:
        """Unit torus element dual to root ``a`` (flat ambient vector)."""
        c = self.signed[a] @ self.torus.basis
        return c / np.linalg.norm(c)

    @cached_property
    def N(self) -> np.ndarray:
        return structure_constants(self)

    def summary(self) -> str:
        return f"rank {self.rank}, {self.n_positive} positive roots, type {root_system_type(self)}"


# -- decomposition ---------------------------------------------------------------------

def _ad_matrix(rd_space, H: np.ndarray, W: np.ndarray) -> np.ndarray:
    """Matrix of ``ad_H`` on the span of the orthonormal rows ``W`` (column j = image of W_j)."""
    br = rd_space.bracket_flat(np.broadcast_to(H, W.shape), W)
    return W @ br.T


def _clusters(theta: np.ndarray) -> list:
    order = np.argsort(theta)
    groups, cur = [], [order[0]]
    top = max(float(theta.max()), 1e-300)
    for a, b in zip(order[:-1], order[1:]):
        if theta[b] - theta[a] <= CLUSTER_RTOL * top:
            cur.append(b)
        else:
            groups.append(cur)
            cur = [b]
    groups.append(cur)
    return groups


def _split_blocks(sp, W: np.ndarray, probes: list, depth: int, rng, torus: Subspace) -> list:
    """Split the span of ``W`` into 2-dimensional rotation blocks ``(X, Y, theta)``."""
    if depth >= len(probes):
        if len(probes) >= MAX_PROBES:
            raise DegenerateProbeError("rotation speeds still clustered after all probes")
        h = rng.standard_normal(torus.dim) @ torus.basis
        probes.append(h / np.linalg.norm(h))
    H = probes[depth]
    A = _ad_matrix(sp, H, W)
    w, V = np.linalg.eigh(-(A @ A))
    theta = np.sqrt(np.clip(w, 0.0, None))
    blocks = []
    for g in _clusters(theta):
        Wg = V[:, g].T @ W
        if len(g) == 2 and theta[g[0]] > 1e-6:
            th = float(np.mean(theta[g]))
            X = Wg[0]
            Y = sp.bracket_flat(H, X) / th
            Y = Y - (Y @ X) * X
            blocks.append((X, Y / np.linalg.norm(Y)))
        elif len(g) % 2 == 1:
            raise DegenerateProbeError(f"odd cluster of size {len(g)}; torus is not maximal")
        else:
            blocks += _split_blocks(sp, orthonormal_span(Wg, sp).basis, probes, depth + 1, rng, torus)
    return blocks


def _gauge(X: np.ndarray, Y: np.ndarray) -> tuple:
    """Rotate so that the first non-negligible ambient coordinate has Y = 0 and X > 0."""
    r2 = X * X + Y * Y
    c = int(np.argmax(r2 > 1e-6 * r2.max()))
    t = np.arctan2(Y[c], X[c])
    return np.cos(t) * X + np.sin(t) * Y, -np.sin(t) * X + np.cos(t) * Y


def root_decomposition(g: LieAlgebraModel, t: Subspace | None = None, seed: int = 0) -> RootDatum:
    """Real root spaces of ``g`` relative to the maximal torus ``t``."""
    sp = g.space
    if t is None:
        t = maximal_torus(g, seed)
    comp = orth_complement(t, g.basis, tol=1e-7)
    r = t.dim
    v = positivity_vector(r)
    if comp.dim == 0:
        z = np.zeros((0, sp.real_dim))
        return RootDatum(g, t, np.zeros((0, r)), z, z, v)
    rng = np.random.default_rng([seed, 1])
    h0 = rng.standard_normal(r) @ t.basis
    blocks = _split_blocks(sp, comp.basis, [h0 / np.linalg.norm(h0)], 0, rng, t)
    roots, Xs, Ys = [], [], []
    for X, Y in blocks:
        br = sp.bracket_flat(t.basis, np.broadcast_to(X, t.basis.shape))
        a = br @ Y
        if abs(a @ v) < 1e-9 * np.linalg.norm(a):
            raise DegenerateProbeError("root orthogonal to the positivity vector")
        if a @ v < 0:
            a, Y = -a, -Y
        X, Y = _gauge(X, Y)
        roots.append(a)
        Xs.append(X)
        Ys.append(Y)
    order = sorted(range(len(roots)), key=lambda i: (-roots[i] @ v, tuple(-roots[i])))
    return RootDatum(g, t, np.array(roots)[order], np.array(Xs)[order], np.array(Ys)[order], v)


def frame_rotate(rd: RootDatum, a: int, t: float) -> RootDatum:
    """Rotate the frame of positive root ``a`` by angle ``t``."""
    if not rd.is_positive(a):
        raise StructuralError("frame_rotate expects a positive root")
    X, Y = rd.X.copy(), rd.Y.copy()
    c, s = np.cos(t), np.sin(t)
    X[a], Y[a] = c * rd.X[a] + s * rd.Y[a], -s * rd.X[a] + c * rd.Y[a]
    return replace(rd, X=X, Y=Y)


def frame_relation_residual(rd: RootDatum, H: np.ndarray) -> float:
    """Largest deviation from ``ad_H X = a(H) Y``, ``ad_H Y = -a(H) X`` for a torus element."""
    if rd.n_positive == 0:
        return 0.0
    sp = rd.space
    h = rd.torus.coords(H)
    a = rd.roots @ h
    rx = sp.bracket_flat(np.broadcast_to(H, rd.X.shape), rd.X) - a[:, None] * rd.Y
    ry = sp.bracket_flat(np.broadcast_to(H, rd.Y.shape), rd.Y) + a[:, None] * rd.X
    return float(max(np.abs(rx).max(), np.abs(ry).max()))


def structure_constants(rd: RootDatum, tol: float = TAU_ROOT) -> np.ndarray:
    """Complex table ``N[a, b]`` with ``[E_a, E_b] = N[a, b] E_{a+b}`` over signed indices.

    Entries vanish when ``a + b`` is not a root (including ``a + b = 0``).
    """
    sp = rd.space
    n = 2 * rd.n_positive
    N = np.zeros((n, n), dtype=complex)
    for a, b in itertools.product(range(n), repeat=2):
        c = rd.index_of(rd.signed[a] + rd.signed[b])
        (xa, ya), (xb, yb) = rd.E(a), rd.E(b)
        re = sp.bracket_flat(xa, xb) - sp.bracket_flat(ya, yb)
        im = sp.bracket_flat(xa, yb) + sp.bracket_flat(ya, xb)
        if c is None:
            if np.linalg.norm(re) + np.linalg.norm(im) > tol * 10 and np.any(rd.signed[a] + rd.signed[b]):
                raise FrameConventionError(f"[E_{a}, E_{b}] nonzero although the sum is not a root")
            continue
        xc, yc = rd.E(c)
        val = complex(xc @ re + yc @ im, xc @ im - yc @ re) / 2.0
        rre = re - (val.real * xc - val.imag * yc)
        rim = im - (val.real * yc + val.imag * xc)
        if max(np.abs(rre).max(), np.abs(rim).max()) > tol * 10:
            raise FrameConventionError(f"[E_{a}, E_{b}] is not a multiple of E_{c}")
        N[a, b] = val
    p = rd.n_positive
    conj = np.block([[N[p:, p:], N[p:, :p]], [N[:p, p:], N[:p, :p]]])
    if np.abs(conj - N.conj()).max() > tol * 10:
        raise FrameConventionError("N_{-a,-b} differs from conj(N_{a,b})")
    return N


# -- combinatorics ------------------------------------------------------------------------

@dataclass(frozen=True)
class RootSubset:
    datum: RootDatum = field(repr=False)
    indices: frozenset

    @classmethod
    def of(cls, rd: RootDatum, indices: Iterable[int]) -> "RootSubset":
        return cls(rd, frozenset(int(i) for i in indices))

    @property
    def positive(self) -> list:
        return sorted({self.datum.positive_index(a) for a in self.indices})


def subset_properties(S: RootSubset) -> tuple:
    """``(symmetric, closed)`` for a set of signed root indices."""
    rd = S.datum
    symmetric = all(rd.negate(a) in S.indices for a in S.indices)
    closed = True
    for a, b in itertools.product(S.indices, repeat=2):
        c = rd.index_of(rd.signed[a] + rd.signed[b])
        if c is not None and c not in S.indices:
            closed = False
            break
    return symmetric, closed


def integer_span_roots(rd: RootDatum, generators: Sequence[int]) -> list:
    """Signed indices of roots that are integer combinations of the generators."""
    G = rd.signed[list(generators)]
    out = []
    for a, r in enumerate(rd.signed):
        c, *_ = np.linalg.lstsq(G.T, r, rcond=None)
        if np.linalg.norm(G.T @ c - r) < 1e-8 * rd._scale and np.allclose(c, np.round(c), atol=1e-6):
            out.append(a)
    return out


def rank2_span_type(rd: RootDatum, a: int, b: int) -> str:
    """Type of the rank-two subsystem spanned over the integers by roots ``a`` and ``b``."""
    G = rd.signed[[a, b]]
    if np.linalg.matrix_rank(G, tol=1e-8 * rd._scale) < 2:
        raise StructuralError("rank2_span_type needs linearly independent roots")
    S = integer_span_roots(rd, (a, b))
    L = np.linalg.norm(rd.signed[S], axis=1)
    ratio = L.max() / L.min()
    if len(S) == 6 and abs(ratio - 1) < 1e-6:
        return A2
    if len(S) == 8 and abs(ratio - np.sqrt(2)) < 1e-6:
        return B2
    if len(S) == 12 and abs(ratio - np.sqrt(3)) < 1e-6:
        return G2
    return REDUCIBLE


def irreducible_components(rd: RootDatum) -> list:
    """Connected components (signed indices) of the non-orthogonality graph."""
    n = 2 * rd.n_positive
    gram = rd.signed @ rd.signed.T
    seen, comps = set(), []
    for s in range(n):
        if s in seen:
            continue
        stack, comp = [s], set()
        while stack:
            a = stack.pop()
            if a in comp:
                continue
            comp.add(a)
            stack += [b for b in range(n) if b not in comp and abs(gram[a, b]) > 1e-8 * rd._scale ** 2]
        seen |= comp
        comps.append(tuple(sorted(comp)))
    return sorted(comps)


def component_type(rd: RootDatum, comp: Sequence[int]) -> str:
    R = rd.signed[list(comp)]
    r = int(np.linalg.matrix_rank(R, tol=1e-8 * rd._scale))
    n = len(comp)
    L = np.linalg.norm(R, axis=1)
    long_ = L > L.max() * (1 - 1e-6)
    n_short = int(np.sum(~long_))
    if n_short == 0:
        if n == r * (r + 1):
            return f"A{r}"
        if r >= 4 and n == 2 * r * (r - 1):
            return f"D{r}"
        return f"?{r}({n})"
    if r == 2 and n == 12:
        return "G2"
    if r == 2 and n == 8:
        return "B2"
    if n_short == 2 * r:
        return f"B{r}"
    if n - n_short == 2 * r:
        return f"C{r}"
    return f"?{r}({n})"


def root_system_type(rd: RootDatum) -> str:
    parts = sorted(component_type(rd, c) for c in irreducible_components(rd))
    return "+".join(parts) if parts else "0"


# -- subalgebras from roots -------------------------------------------------------------------

def coroot_span(rd: RootDatum, indices: Iterable[int]) -> Subspace:
    rows = [rd.coroot(a) for a in indices]
    return span_rows(rd.space, np.array(rows)) if rows else Subspace.zero(rd.space)


def regular_subalgebra_from_roots(rd: RootDatum, S: RootSubset, t0: Subspace | None = None,
                                  name: str = "l") -> LieAlgebraModel:
    """``t0`` plus the real root spaces of ``S``; closure failures name a violating pair."""
    t0 = rd.torus if t0 is None else t0
    pos = S.positive
    rows = [t0.basis] + [rd.X[pos], rd.Y[pos]]
    span = span_rows(rd.space, np.vstack(rows))
    try:
        return LieAlgebraModel.from_subspace(name, span)
    except StructuralError:
        for a, b in itertools.product(sorted(S.indices), repeat=2):
            c = rd.index_of(rd.signed[a] + rd.signed[b])
            if c is not None and c not in S.indices:
                raise StructuralError(f"{name}: roots {a} and {b} sum to root {c} outside the subset") from None
        raise StructuralError(f"{name}: torus part does not contain the coroots of the subset") from None


def root_subset_algebra(parent, selector, torus: str = "full", seed: int = 0) -> LieAlgebraModel:
    """Regular subalgebra of ``parent`` chosen by a root selector.

    ``selector`` is a list of signed indices or one of ``"long"`` (all long roots),
    ``"one_long"`` (a single long root pair) and ``"long_orthogonal_short"`` (a long root
    and a short root orthogonal to it).  ``torus`` is ``"full"`` or ``"coroots"``.
    """
    if isinstance(parent, str):
        from .lie import make_g2

        parent = {"g2": make_g2}[parent]()
    rd = root_decomposition(parent, maximal_torus(parent, seed), seed)
    S = RootSubset.of(rd, select_roots(rd, selector))
    t0 = rd.torus if torus == "full" else coroot_span(rd, S.indices)
    return regular_subalgebra_from_roots(rd, S, t0, name=str(selector))


def select_roots(rd: RootDatum, selector) -> list:
    if not isinstance(selector, str):
        return sorted(set(selector) | {rd.negate(a) for a in selector})
    longs = [a for a in rd.long_roots if rd.is_positive(a)]
    if selector == "long":
        pos = longs
    elif selector == "one_long":
        pos = longs[:1]
    elif selector == "long_orthogonal_short":
        g = longs[0]
        shorts = [a for a in range(rd.n_positive) if a not in longs
                  and abs(rd.roots[a] @ rd.roots[g]) < 1e-8 * rd._scale ** 2]
        if not shorts:
            raise StructuralError("no short root orthogonal to the chosen long root")
        pos = [g, shorts[0]]
    else:
        raise StructuralError(f"unknown root selector {selector!r}")
    return sorted(set(pos) | {rd.negate(a) for a in pos})


# -- ideals and types -----------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class IdealSplit:
    center: Subspace
    ideals: tuple  # of (Subspace, type string)


def simple_ideals(g: LieAlgebraModel, seed: int = 0) -> IdealSplit:
    """Center and simple ideals of a compact algebra via irreducible root components."""
    if g.dim == 0:
        return IdealSplit(g.basis, ())
    rd = root_decomposition(g, maximal_torus(g, seed), seed)
    ideals = []
    all_coroots = []
    for comp in irreducible_components(rd):
        pos = sorted({rd.positive_index(a) for a in comp})
        cr = coroot_span(rd, comp)
        all_coroots.append(cr)
        I = span_rows(g.space, np.vstack([cr.basis, rd.X[pos], rd.Y[pos]]))
        ideals.append((I, component_type(rd, comp)))
    semis = sum_span(*all_coroots) if all_coroots else Subspace.zero(g.space)
    center = orth_complement(semis, rd.torus, tol=1e-7) if semis.dim else rd.torus
    return IdealSplit(center, tuple(ideals))


def algebra_type(g: LieAlgebraModel, seed: int = 0) -> tuple:
    """``(sorted simple types, center dimension)``; ``so(4)`` gives ``(("A1", "A1"), 0)``."""
    split = simple_ideals(g, seed)
    return tuple(sorted(t for _, t in split.ideals)), split.center.dim


def max_root_length(g: LieAlgebraModel, seed: int = 0) -> float:
    rd = root_decomposition(g, maximal_torus(g, seed), seed)
    return float(rd.lengths().max()) if rd.n_positive else 0.0


def sl2_root_length(g: LieAlgebraModel, I: Subspace, seed: int = 0) -> float:
    """Length, measured in the trace form, of the root of a 3-dimensional simple ideal ``I``."""
    model = LieAlgebraModel.from_subspace("sl2", I)
    rd = root_decomposition(model, maximal_torus(model, seed), seed)
    return float(rd.lengths()[0])


def in_common(S: Subspace, T: Subspace) -> Subspace:
    return intersect(S, T, tol=1e-7)
