"""Compact matrix Lie algebras: constructors, embeddings and structural queries."""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .algebra import (
    TAU_STRUCT,
    Field,
    MatrixElement,
    MatrixSpace,
    StructuralError,
    Subspace,
    E,
    F,
    kernel,
    orth_complement,
    orthonormal_span,
    span_rows,
)

# Associative 3-form on R^7 whose annihilator in so(7) is g2.  Pinned so that
# certificates built on g2 chains are reproducible.
G2_FORM_TERMS = (
    ((1, 2, 7), 1), ((3, 4, 7), 1), ((5, 6, 7), 1), ((1, 3, 5), 1),
    ((1, 4, 6), -1), ((2, 3, 6), -1), ((2, 4, 5), -1),
)
# Cayley 4-form on R^8 = R e_0 + R^7 is e_0 ^ phi + CAYLEY_STAR_SIGN * (*phi).
CAYLEY_STAR_SIGN = 1


class ConstructionError(RuntimeError):
    """A recipe produced something other than what it promised."""


class DegenerateProbeError(RuntimeError):
    """Random probes disagreed; retry with another seed."""


@dataclass(frozen=True, eq=False)
class LieAlgebraModel:
    """A matrix Lie algebra with an orthonormal basis and its structure constants.

    ``structure[i, j, k]`` is the coefficient of ``b_k`` in ``[b_i, b_j]``.
    """

    name: str
    basis: Subspace
    structure: np.ndarray = field(repr=False)
    closure_residual: float = 0.0

    @classmethod
    def from_subspace(cls, name: str, S: Subspace, tol: float = TAU_STRUCT) -> "LieAlgebraModel":
        B = S.basis
        N = B.shape[0]
        if N == 0:
            return cls(name, S, np.zeros((0, 0, 0)), 0.0)
        br = S.space.bracket_flat(B[:, None, :], B[None, :, :])
        c = br @ B.T
        resid = br - c @ B
        worst = float(np.max(np.linalg.norm(resid, axis=-1)))
        if worst >= tol:
            i, j = np.unravel_index(np.argmax(np.linalg.norm(resid, axis=-1)), (N, N))
            raise StructuralError(
                f"{name}: span is not closed under brackets (pair {i},{j}, residual {worst:.3g})"
            )
        return cls(name, S, c, worst)

    @classmethod
    def from_elements(cls, name: str, elements: Sequence, space: MatrixSpace | None = None,
                      tol: float = TAU_STRUCT) -> "LieAlgebraModel":
        S = orthonormal_span(elements, space, tol=1e-8)
        return cls.from_subspace(name, S, tol)

    @property
    def space(self) -> MatrixSpace:
        return self.basis.space

    @property
    def dim(self) -> int:
        return self.basis.dim

    def coords(self, X) -> np.ndarray:
        return self.basis.coords(X)

    def element(self, coords) -> MatrixElement:
        return MatrixElement.from_flat(self.space, np.asarray(coords) @ self.basis.basis)

    def ad(self, x: np.ndarray) -> np.ndarray:
        """Matrix of ``ad_x`` in the model's coordinates: ``ad(x) @ y = [x, y]``."""
        return np.einsum("i,ijk->kj", x, self.structure)

    def bracket_coords(self, x, y) -> np.ndarray:
        return np.einsum("...i,...j,ijk->...k", x, y, self.structure)

    def contains(self, X, tol: float = TAU_STRUCT) -> bool:
        return self.basis.contains(X, tol)

    def contains_algebra(self, other: "LieAlgebraModel", tol: float = TAU_STRUCT) -> bool:
        return other.space == self.space and self.basis.contains_subspace(other.basis, tol)

    def subalgebra(self, name: str, S: Subspace) -> "LieAlgebraModel":
        if not self.basis.contains_subspace(S, 1e-7):
            raise StructuralError(f"{name} is not inside {self.name}")
        return LieAlgebraModel.from_subspace(name, S)

    @cached_property
    def torus(self) -> Subspace:
        return maximal_torus(self, seed=0)

    @cached_property
    def rank(self) -> int:
        return self.torus.dim

    def __repr__(self):
        return f"LieAlgebraModel({self.name!r}, dim={self.dim}, {self.space.field.name} {self.space.n}x{self.space.n})"


# -- classical constructors ---------------------------------------------------

def _so_elements(sp: MatrixSpace, n: int, offset: int = 0) -> list:
    return [E(sp, offset + a, offset + b) / np.sqrt(2)
            for a in range(1, n + 1) for b in range(a + 1, n + 1)]


def _traceless_diagonal(sp: MatrixSpace, n: int, unit: str, offset: int = 0) -> list:
    diag = [F(sp, offset + a, offset + a, unit) for a in range(1, n + 1)]
    diffs = [diag[a] - diag[a + 1] for a in range(n - 1)]
    return orthonormal_span(diffs, sp).elements() if diffs else []


def classical_elements(kind: str, n: int, sp: MatrixSpace, offset: int = 0) -> list:
    """Orthonormal basis of so/su/u/sp(n) (or the diagonal torus ``t``) placed at ``offset``."""
    if n < 1:
        raise StructuralError(f"{kind}({n}) needs n >= 1")
    r2 = np.sqrt(2)
    pairs = [(a, b) for a in range(offset + 1, offset + n + 1) for b in range(a + 1, offset + n + 1)]
    if kind == "so":
        return _so_elements(sp, n, offset)
    if kind in ("su", "u"):
        out = [E(sp, a, b) / r2 for a, b in pairs] + [F(sp, a, b, "i") / r2 for a, b in pairs]
        if kind == "su":
            return out + _traceless_diagonal(sp, n, "i", offset)
        return out + [F(sp, a, a, "i") for a in range(offset + 1, offset + n + 1)]
    if kind == "sp":
        out = [E(sp, a, b) / r2 for a, b in pairs]
        for u in "ijk":
            out += [F(sp, a, b, u) / r2 for a, b in pairs]
            out += [F(sp, a, a, u) for a in range(offset + 1, offset + n + 1)]
        return out
    if kind == "t":
        return [F(sp, a, a, "i") for a in range(offset + 1, offset + n + 1)]
    raise StructuralError(f"unknown classical kind {kind!r}")


_KIND_FIELD = {"so": Field.REAL, "su": Field.COMPLEX, "u": Field.COMPLEX, "sp": Field.QUATERNION,
               "t": Field.COMPLEX}


def make_classical(kind: str, n: int, space: MatrixSpace | None = None, offset: int = 0) -> LieAlgebraModel:
    """so(n), su(n), u(n) or sp(n) in its defining representation."""
    if n < 1:
        raise StructuralError(f"{kind}({n}) needs n >= 1")
    if kind not in _KIND_FIELD:
        raise StructuralError(f"unknown classical kind {kind!r}")
    sp = space or MatrixSpace(_KIND_FIELD[kind], n)
    return LieAlgebraModel.from_elements(f"{kind}({n})", classical_elements(kind, n, sp, offset), sp)


def direct_sum(name: str, parts: Sequence, sp: MatrixSpace) -> LieAlgebraModel:
    """Block-diagonal sum; ``parts`` holds ``(kind, n, offset)`` triples (0-based offsets)."""
    elems = []
    for kind, n, offset in parts:
        elems += classical_elements(kind, n, sp, offset)
    return LieAlgebraModel.from_elements(name, elems, sp)


# -- complex structures ---------------------------------------------------------

def complex_structure(n: int, layout: str = "pairs") -> MatrixElement:
    """``J`` on R^{2n}: 2x2 rotation blocks (``pairs``) or ``[[0, -I], [I, 0]]`` (``halves``)."""
    sp = MatrixSpace(Field.REAL, 2 * n)
    J = sp.zeros()
    for a in range(n):
        i, j = (2 * a, 2 * a + 1) if layout == "pairs" else (a, n + a)
        J[i, j, 0] = -1.0
        J[j, i, 0] = 1.0
    return MatrixElement(sp, J)


def unitary_in_so(n: int, part: str = "u", layout: str = "pairs",
                  space: MatrixSpace | None = None, offset: int = 0) -> LieAlgebraModel:
    """u(n) as the commutant of ``J`` in so(2n), or its trace-free part su(n)."""
    so = make_classical("so", 2 * n)
    J = complex_structure(n, layout)
    sp = so.space
    comm = np.stack([sp.bracket(J.data, b.data).reshape(-1) for b in so.basis.elements()], axis=1)
    C = kernel(comm)
    if C.shape[1] != n * n:
        raise ConstructionError(f"commutant of J has dim {C.shape[1]}, expected {n * n}")
    rows = C.T @ so.basis.basis
    if part == "su":
        j = J.flat / J.norm()
        rows = rows - np.outer(rows @ j, j)
    elif part != "u":
        raise StructuralError(f"unknown part {part!r}")
    S = span_rows(sp, rows)
    if space is not None:
        S = Subspace(space, sp.embed_into(S.basis.reshape((-1,) + sp.shape), space, offset).reshape(S.dim, -1))
    return LieAlgebraModel.from_subspace(f"{part}({n})", S)


# -- invariant forms ----------------------------------------------------------------

def _perm_sign(p) -> int:
    p = list(p)
    s = 1
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j]:
                s = -s
    return s


def _alternating(n: int, terms) -> np.ndarray:
    k = len(terms[0][0])
    T = np.zeros((n,) * k)
    for idx, c in terms:
        for p in itertools.permutations(range(k)):
            T[tuple(idx[i] for i in p)] += c * _perm_sign(p)
    return T


def g2_three_form() -> np.ndarray:
    return _alternating(7, [(tuple(i - 1 for i in t), c) for t, c in G2_FORM_TERMS])


def cayley_four_form() -> np.ndarray:
    phi = {t: c for t, c in G2_FORM_TERMS}
    terms = [((0,) + t, c) for t, c in G2_FORM_TERMS]
    for sub in itertools.combinations(range(1, 8), 4):
        comp = tuple(sorted(set(range(1, 8)) - set(sub)))
        if comp in phi:
            sign = _perm_sign([x - 1 for x in sub + comp])
            terms.append((sub, CAYLEY_STAR_SIGN * sign * phi[comp]))
    return _alternating(8, terms)


def form_stabilizer(name: str, form: np.ndarray, expected_dim: int) -> LieAlgebraModel:
    """Subalgebra of so(n) annihilating an alternating form."""
    n = form.shape[0]
    so = make_classical("so", n)
    rows = []
    for b in so.basis.elements():
        A = b.data[..., 0]
        D = sum(np.moveaxis(np.tensordot(A, form, axes=([0], [s])), 0, s) for s in range(form.ndim))
        rows.append(D.ravel())
    C = kernel(np.array(rows).T)
    if C.shape[1] != expected_dim:
        raise ConstructionError(f"{name}: stabilizer has dim {C.shape[1]}, expected {expected_dim}")
    return LieAlgebraModel.from_subspace(name, span_rows(so.space, C.T @ so.basis.basis))


def make_g2() -> LieAlgebraModel:
    """The 14-dimensional annihilator of the pinned 3-form inside so(7)."""
    return form_stabilizer("g2", g2_three_form(), 14)


def make_spin7() -> LieAlgebraModel:
    """spin(7) inside so(8) as the annihilator of the Cayley 4-form."""
    return form_stabilizer("spin(7)", cayley_four_form(), 21)


def pad(model: LieAlgebraModel, target: MatrixSpace, offset: int = 0, name: str | None = None) -> LieAlgebraModel:
    """Re-home a model as a diagonal block of a larger matrix space."""
    src = model.space
    B = src.embed_into(model.basis.basis.reshape((-1,) + src.shape), target, offset)
    return LieAlgebraModel.from_subspace(name or model.name, Subspace(target, B.reshape(model.dim, -1)))


# -- structural queries ---------------------------------------------------------------

def centralizer(g: LieAlgebraModel, S: Subspace) -> Subspace:
    """``{X in g : [X, s] = 0 for all s in S}``."""
    if S.dim == 0 or g.dim == 0:
        return g.basis
    B = g.basis.basis
    M = np.concatenate([g.space.bracket_flat(B, np.broadcast_to(s, B.shape)).T for s in S.basis], axis=0)
    C = kernel(M)
    return Subspace(g.space, C.T @ B) if C.size else Subspace.zero(g.space)


def is_abelian(S: Subspace, tol: float = TAU_STRUCT) -> bool:
    B = S.basis
    if S.dim < 2:
        return True
    br = S.space.bracket_flat(B[:, None, :], B[None, :, :])
    return bool(np.max(np.abs(br)) < tol)


def maximal_torus(g: LieAlgebraModel, seed: int = 0, within: Subspace | None = None) -> Subspace:
    """Centralizer of a random element (of ``within`` if given), majority over three probes."""
    if g.dim == 0:
        return g.basis
    rng = np.random.default_rng(seed)
    probe_space = within if within is not None else g.basis
    results = []
    for _ in range(3):
        x = rng.standard_normal(probe_space.dim) @ probe_space.basis
        results.append(centralizer(g, Subspace(g.space, x / np.linalg.norm(x))))
    dims = [t.dim for t in results]
    for t in results:
        if dims.count(t.dim) >= 2:
            if not is_abelian(t):
                raise StructuralError(f"centralizer of a probe in {g.name} is not abelian")
            return t
    raise DegenerateProbeError(f"torus probes of {g.name} gave dimensions {dims}")


def rank(g: LieAlgebraModel) -> int:
    return g.rank


def is_regular_subalgebra(g: LieAlgebraModel, k: LieAlgebraModel) -> bool:
    """Rank identity rk C_g(k) = rk g - rk k + rk Z(k)."""
    if not g.contains_algebra(k, 1e-7):
        raise StructuralError(f"{k.name} is not inside {g.name}")
    C = LieAlgebraModel.from_subspace(f"C({k.name})", centralizer(g, k.basis))
    Z = centralizer(k, k.basis)
    return C.rank == g.rank - k.rank + Z.dim


# -- embeddings -------------------------------------------------------------------------

class Recipe(enum.Enum):
    BLOCK = "BLOCK"
    COMPLEX_STRUCTURE_J = "COMPLEX_STRUCTURE_J"
    ROOT_SUBSET = "ROOT_SUBSET"
    G2_FORM = "G2_FORM"


@dataclass(frozen=True)
class EmbeddingSpec:
    """How to realise ``source`` inside ``target``.

    Parameters per recipe:

    * ``BLOCK``: ``field``, ``n`` (target size) and ``blocks`` as ``(kind, size, offset)``.
    * ``COMPLEX_STRUCTURE_J``: ``n``, ``part`` (``u``/``su``), ``layout``, optional
      ``target_n`` and ``offset`` for padding into a larger so(N).
    * ``ROOT_SUBSET``: ``parent`` model, ``roots`` (signed root indices or ``"long"``),
      optional ``torus`` (``"full"`` or ``"coroots"``) and ``seed``.
    * ``G2_FORM``: ``form`` (``"g2"`` or ``"spin7"``), optional ``target_n``/``offset``.
    """

    source: str
    target: str
    recipe: Recipe
    params: tuple = ()

    @classmethod
    def make(cls, source: str, target: str, recipe: Recipe, **params) -> "EmbeddingSpec":
        return cls(source, target, recipe, tuple(sorted(params.items(), key=lambda kv: kv[0])))

    @property
    def options(self) -> dict:
        return dict(self.params)


def embed(spec: EmbeddingSpec) -> LieAlgebraModel:
    p = spec.options
    try:
        if spec.recipe is Recipe.BLOCK:
            sp = MatrixSpace(p["field"], p["n"])
            model = direct_sum(spec.source, p["blocks"], sp)
        elif spec.recipe is Recipe.COMPLEX_STRUCTURE_J:
            n = p["n"]
            target_n = p.get("target_n", 2 * n)
            sp = MatrixSpace(Field.REAL, target_n)
            model = unitary_in_so(n, p.get("part", "u"), p.get("layout", "pairs"), sp, p.get("offset", 0))
        elif spec.recipe is Recipe.G2_FORM:
            base = make_g2() if p["form"] == "g2" else make_spin7()
            target_n = p.get("target_n", base.space.n)
            model = pad(base, MatrixSpace(Field.REAL, target_n), p.get("offset", 0))
        elif spec.recipe is Recipe.ROOT_SUBSET:
            from .roots import root_subset_algebra

            model = root_subset_algebra(p["parent"], p["roots"], p.get("torus", "full"), p.get("seed", 0))
        else:  # pragma: no cover
            raise StructuralError(f"unknown recipe {spec.recipe}")
    except KeyError as exc:
        raise StructuralError(f"{spec.recipe.value}: missing parameter {exc}") from None
    return LieAlgebraModel(spec.source, model.basis, model.structure, model.closure_residual)


def orth_part(k: LieAlgebraModel, h: LieAlgebraModel) -> Subspace:
    return orth_complement(h.basis, k.basis)
