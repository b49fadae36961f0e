"""Named chains h < k < g with their expected verdicts."""
from __future__ import annotations

import enum
import hashlib
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .algebra import (
    UNITS,
    Field,
    MatrixElement,
    MatrixSpace,
    StructuralError,
    Subspace,
    orth_complement,
    span_rows,
    sum_span,
)
from .lie import (
    EmbeddingSpec,
    LieAlgebraModel,
    Recipe,
    classical_elements,
    embed,
)


class Expected(str, enum.Enum):
    SYMMETRIC_PAIR = "SYMMETRIC_PAIR"
    FAILS = "FAILS"
    HOLDS_PROVED = "HOLDS_PROVED"
    HOLDS_CONJECTURED = "HOLDS_CONJECTURED"


class UnknownChainError(KeyError):
    pass


# -- matrix expressions ----------------------------------------------------------------------

_TERM = re.compile(r"\s*([+-]?)\s*(\d+(?:\.\d+)?(?:/\d+)?)?\s*\*?\s*([ijk]?)\s*([EFe])(\d)(\d)\s*")


def parse_matrix(expr: str, sp: MatrixSpace) -> MatrixElement:
    """Parse sums like ``"iF12 + E23 - 1/2 kF13 + je11"`` (1-based indices).

    ``E_ab`` is skew, ``F_ab`` symmetric (a single diagonal entry when ``a == b``) and
    ``e_ab`` a single entry; an optional unit ``i``, ``j`` or ``k`` multiplies the term.
    """
    from .algebra import E, F, entry

    pos, out = 0, MatrixElement(sp, sp.zeros())
    expr = expr.strip()
    while pos < len(expr):
        m = _TERM.match(expr, pos)
        if not m or m.end() == pos:
            raise StructuralError(f"cannot parse matrix expression at {expr[pos:]!r}")
        sign, coef, unit, kind, a, b = m.groups()
        c = float(Fraction(coef)) if coef else 1.0
        c = -c if sign == "-" else c
        a, b = int(a), int(b)
        unit = unit or "1"
        if kind == "E":
            if unit != "1":
                raise StructuralError("units multiply F and e terms only")
            term = E(sp, a, b)
        elif kind == "F":
            term = F(sp, a, b, unit)
        else:
            term = entry(sp, a, b, unit)
        out = out + c * term
        pos = m.end()
    return out


# -- involutions ----------------------------------------------------------------------------

class InvolutionRecipe(enum.Enum):
    CONJUGATION = "CONJUGATION"
    AD_MATRIX = "AD_MATRIX"


@dataclass(frozen=True)
class InvolutionSpec:
    """``CONJUGATION`` negates imaginary parts; ``AD_MATRIX`` conjugates by a diagonal
    sign matrix (``signs``) or by a scalar quaternion unit (``unit``)."""

    recipe: InvolutionRecipe
    signs: tuple = ()
    unit: str = ""

    def apply(self, sp: MatrixSpace, flat: np.ndarray) -> np.ndarray:
        A = np.reshape(flat, flat.shape[:-1] + sp.shape)
        if self.recipe is InvolutionRecipe.CONJUGATION:
            out = A * np.array([1.0] + [-1.0] * (sp.components - 1))
        elif self.signs:
            d = np.asarray(self.signs, float)
            out = A * (d[:, None] * d[None, :])[..., None]
        else:
            # entrywise q -> u q u^{-1} for a unit imaginary quaternion u
            keep = np.ones(sp.components)
            idx = UNITS[self.unit]
            for c in range(1, sp.components):
                if c != idx:
                    keep[c] = -1.0
            out = A * keep
        return out.reshape(flat.shape)


def check_involution(sigma: InvolutionSpec, g: LieAlgebraModel, k: LieAlgebraModel, tol: float = 1e-9) -> dict:
    """Residuals for ``sigma^2 = id``, the automorphism property and ``Fix(sigma) = k``."""
    sp = g.space
    B = g.basis.basis
    S = sigma.apply(sp, B)
    sq = float(np.abs(sigma.apply(sp, S) - B).max())
    lhs = sigma.apply(sp, sp.bracket_flat(B[:, None, :], B[None, :, :]))
    rhs = sp.bracket_flat(S[:, None, :], S[None, :, :])
    auto = float(np.abs(lhs - rhs).max())
    inside = float(np.abs(S - B @ B.T @ S).max()) if B.size else 0.0
    fixed = span_rows(sp, np.vstack([(B + S) / 2]))
    fix_ok = fixed.dim == k.dim and k.basis.contains_subspace(fixed, 1e-7)
    return {"square": sq, "automorphism": auto, "preserves_g": inside, "fixed_is_k": fix_ok,
            "ok": sq < tol and auto < tol and inside < tol and fix_ok}


# -- specs -------------------------------------------------------------------------------------

def block(field_: Field, n: int, *blocks, generators: tuple = ()) -> EmbeddingSpec:
    return EmbeddingSpec.make("block", f"{field_.name}{n}", Recipe.BLOCK,
                              field=field_, n=n, blocks=tuple(blocks), generators=tuple(generators))


def jspec(n: int, part: str, layout: str, target_n: int | None = None, offset: int = 0) -> EmbeddingSpec:
    return EmbeddingSpec.make(f"{part}({n})", f"so({target_n or 2 * n})", Recipe.COMPLEX_STRUCTURE_J,
                              n=n, part=part, layout=layout, target_n=target_n or 2 * n, offset=offset)


def roots_spec(selector, torus: str = "full") -> EmbeddingSpec:
    return EmbeddingSpec.make(str(selector), "g2", Recipe.ROOT_SUBSET,
                              parent="g2", roots=selector, torus=torus)


def form_spec(form: str, target_n: int, offset: int = 0) -> EmbeddingSpec:
    return EmbeddingSpec.make(form, f"so({target_n})", Recipe.G2_FORM, form=form, target_n=target_n, offset=offset)


@dataclass(frozen=True)
class WorkedPair:
    """A commuting pair as matrix expressions, with the stated ``[X^m, Y^m]``."""

    X: str
    Y: str
    m_bracket: str | None = None
    m_part: str | None = None


@dataclass(frozen=True)
class ChainSpec:
    id: str
    expected: Expected
    reference: str
    h: tuple
    k: tuple
    g: tuple
    involution: InvolutionSpec | None = None
    l: tuple = ()
    vectors: WorkedPair | None = None
    notes: str = ""


@dataclass(frozen=True, eq=False)
class Chain:
    spec: ChainSpec
    h: LieAlgebraModel
    k: LieAlgebraModel
    g: LieAlgebraModel
    l: LieAlgebraModel | None = None

    @property
    def id(self) -> str:
        return self.spec.id

    @property
    def space(self) -> MatrixSpace:
        return self.g.space

    @property
    def dims(self) -> tuple:
        return self.h.dim, self.k.dim, self.g.dim

    def worked_pair(self) -> tuple | None:
        v = self.spec.vectors
        if v is None:
            return None
        return parse_matrix(v.X, self.space), parse_matrix(v.Y, self.space)

    def p_basis(self) -> Subspace:
        return orth_complement(self.h.basis, self.g.basis, tol=1e-7)

    def digest(self) -> str:
        return basis_digest(self.p_basis())


def basis_digest(S: Subspace) -> str:
    B = np.round(S.basis, 8) + 0.0  # adding 0.0 folds -0.0 into 0.0
    head = f"{S.space.field.name}:{S.space.n}:{S.dim}:".encode()
    return hashlib.sha256(head + np.ascontiguousarray(B, dtype="<f8").tobytes()).hexdigest()


def realize(name: str, parts: tuple, sp_hint: MatrixSpace | None = None) -> LieAlgebraModel:
    """Sum of the images of several embedding recipes, as one closed subalgebra."""
    if not parts:
        if sp_hint is None:
            raise StructuralError(f"{name}: empty recipe list needs an ambient space")
        return LieAlgebraModel.from_subspace(name, Subspace.zero(sp_hint))
    models = []
    for spec in parts:
        opts = spec.options
        if spec.recipe is Recipe.BLOCK and opts.get("generators"):
            sp = MatrixSpace(opts["field"], opts["n"])
            elems = []
            for kind, n, off in opts["blocks"]:
                elems += classical_elements(kind, n, sp, off)
            elems += [parse_matrix(e, sp) for e in opts["generators"]]
            models.append(LieAlgebraModel.from_elements(name, elems, sp))
        else:
            models.append(embed(spec))
    spaces = {m.space for m in models}
    if len(spaces) != 1:
        raise StructuralError(f"{name}: recipes live in different spaces {spaces}")
    S = sum_span(*[m.basis for m in models]) if len(models) > 1 else models[0].basis
    return LieAlgebraModel.from_subspace(name, S)


R, C, H = Field.REAL, Field.COMPLEX, Field.QUATERNION

_L41_5_X = "iF12 + E23 + iF13"
_L41_5_Y = "kF12 + jF23 - kF13"

CATALOG: tuple = (
    ChainSpec(
        "L4.1-1", Expected.FAILS, "T^3 < S(U(3)xU(1)) < SU(4)",
        h=(block(C, 4, generators=("iF11 - iF22", "iF22 - iF33", "iF33 - iF44")),),
        k=(block(C, 4, ("su", 3, 0), generators=("iF11 + iF22 + iF33 - 3iF44",)),),
        g=(block(C, 4, ("su", 4, 0)),),
        vectors=WorkedPair("E12 + E14", "E23 + E34", m_bracket="E13"),
    ),
    ChainSpec(
        "L4.1-2", Expected.FAILS, "U(2)xSO(2) < SO(6) < SO(7)",
        h=(jspec(2, "u", "halves", 7), block(R, 7, ("so", 2, 4))),
        k=(block(R, 7, ("so", 6, 0)),),
        g=(block(R, 7, ("so", 7, 0)),),
        vectors=WorkedPair("E15 - E17", "E25 + E27", m_bracket="-E12"),
    ),
    ChainSpec(
        "L4.1-2-t3", Expected.FAILS, "maximal torus variant: SO(2)^3 < SO(6) < SO(7)",
        h=(block(R, 7, generators=("E13", "E24", "E56")),),
        k=(block(R, 7, ("so", 6, 0)),),
        g=(block(R, 7, ("so", 7, 0)),),
    ),
    ChainSpec(
        "L4.1-3", Expected.FAILS, "U(2)xSO(2) < SO(5)xSO(2) < SO(7)",
        h=(jspec(2, "u", "halves", 7), block(R, 7, ("so", 2, 5))),
        k=(block(R, 7, ("so", 5, 0), ("so", 2, 5)),),
        g=(block(R, 7, ("so", 7, 0)),),
        vectors=WorkedPair("E15 + E16", "E25 - E26", m_bracket="-E12"),
    ),
    ChainSpec(
        "L4.1-4", Expected.FAILS, "U(1)^3 < U(3) < Sp(3)",
        h=(block(H, 3, ("t", 3, 0)),),
        k=(block(H, 3, ("u", 3, 0)),),
        g=(block(H, 3, ("sp", 3, 0)),),
    ),
    ChainSpec(
        "L4.1-5a", Expected.FAILS, "Sp(1)xU(1)xSp(1) < Sp(2)xSp(1) < Sp(3)",
        h=(block(H, 3, ("sp", 1, 0), ("t", 1, 1), ("sp", 1, 2)),),
        k=(block(H, 3, ("sp", 2, 0), ("sp", 1, 2)),),
        g=(block(H, 3, ("sp", 3, 0)),),
        vectors=WorkedPair(_L41_5_X, _L41_5_Y, m_bracket="-2jF11 - 2jF22", m_part="-2jF22"),
    ),
    ChainSpec(
        "L4.1-5b", Expected.FAILS, "Sp(1)xU(1)xU(1) < Sp(2)xU(1) < Sp(3)",
        h=(block(H, 3, ("sp", 1, 0), ("t", 1, 1), ("t", 1, 2)),),
        k=(block(H, 3, ("sp", 2, 0), ("t", 1, 2)),),
        g=(block(H, 3, ("sp", 3, 0)),),
        vectors=WorkedPair(_L41_5_X, _L41_5_Y, m_bracket="-2jF11 - 2jF22", m_part="-2jF22"),
    ),
    ChainSpec(
        "L4.1-6", Expected.FAILS, "T^2 < SU(3) < G2",
        h=(roots_spec(()),), k=(roots_spec("long"),), g=(form_spec("g2", 7),),
    ),
    ChainSpec(
        "L4.1-2b-so6", Expected.FAILS, "T^3 < U(3) < SO(6)",
        h=(block(R, 6, generators=("E12", "E34", "E56")),),
        k=(jspec(3, "u", "pairs"),),
        g=(block(R, 6, ("so", 6, 0)),),
    ),
    ChainSpec(
        "L4.1-2b-so7", Expected.FAILS, "T^3 < U(3) < SO(7)",
        h=(block(R, 7, generators=("E12", "E34", "E56")),),
        k=(jspec(3, "u", "pairs", 7),),
        g=(block(R, 7, ("so", 7, 0)),),
    ),
    ChainSpec(
        "C3.3-1-min", Expected.FAILS, "full-rank family 1, smallest member: {0} < SO(3) < SU(3)",
        h=(), k=(block(C, 3, generators=("E12", "E13", "E23")),),
        g=(block(C, 3, ("su", 3, 0)),),
        involution=InvolutionSpec(InvolutionRecipe.CONJUGATION),
        l=(block(C, 3, generators=("iF11 - iF22", "iF22 - iF33")),),
    ),
    ChainSpec(
        "C3.3-2-min", Expected.FAILS,
        "full-rank family 2, smallest member: SO(2) < SO(4)xSO(3) < SO(7)",
        h=(block(R, 7, generators=("E12",)),),
        k=(block(R, 7, ("so", 4, 0), ("so", 3, 4)),),
        g=(block(R, 7, ("so", 7, 0)),),
        involution=InvolutionSpec(InvolutionRecipe.AD_MATRIX, signs=(1, 1, 1, 1, -1, -1, -1)),
        l=(block(R, 7, generators=("E12", "E15", "E25", "E36", "E47")),),
    ),
    ChainSpec(
        "C3.3-3-min", Expected.FAILS, "full-rank family 3, smallest member: U(1)^3 < U(3) < Sp(3)",
        h=(block(H, 3, ("t", 3, 0)),),
        k=(block(H, 3, ("u", 3, 0)),),
        g=(block(H, 3, ("sp", 3, 0)),),
        involution=InvolutionSpec(InvolutionRecipe.AD_MATRIX, unit="i"),
        l=(block(H, 3, ("sp", 1, 0), ("sp", 1, 1), ("sp", 1, 2)),),
    ),
    ChainSpec(
        "C3.3-4-min", Expected.FAILS,
        "full-rank family 4, smallest member: {0} < SO(3)xSO(3) < SO(6)",
        h=(), k=(block(R, 6, ("so", 3, 0), ("so", 3, 3)),),
        g=(block(R, 6, ("so", 6, 0)),),
        involution=InvolutionSpec(InvolutionRecipe.AD_MATRIX, signs=(1, 1, 1, -1, -1, -1)),
        l=(block(R, 6, generators=("E14", "E25", "E36")),),
    ),
    ChainSpec(
        "T5.1-n2", Expected.HOLDS_PROVED, "SU(2) < SO(4) < SO(5)",
        h=(jspec(2, "su", "pairs", 5),), k=(block(R, 5, ("so", 4, 0)),), g=(block(R, 5, ("so", 5, 0)),),
    ),
    ChainSpec(
        "T5.1-n3", Expected.HOLDS_PROVED, "SU(3) < SO(6) < SO(7)",
        h=(jspec(3, "su", "pairs", 7),), k=(block(R, 7, ("so", 6, 0)),), g=(block(R, 7, ("so", 7, 0)),),
    ),
    ChainSpec(
        "ST-g2-so7-so8", Expected.HOLDS_PROVED, "G2 < Spin(7) < Spin(8)",
        h=(form_spec("g2", 8, 1),), k=(block(R, 8, ("so", 7, 1)),), g=(block(R, 8, ("so", 8, 0)),),
    ),
    ChainSpec(
        "ST-g2-so7-so9", Expected.HOLDS_PROVED, "G2 < Spin(7) < Spin(9)",
        h=(form_spec("g2", 9, 1),), k=(block(R, 9, ("so", 7, 1)),), g=(block(R, 9, ("so", 9, 0)),),
    ),
    ChainSpec(
        "ST-su2-so4-g2", Expected.HOLDS_PROVED, "SU(2) < SO(4) < G2",
        h=(roots_spec("one_long", "coroots"),), k=(roots_spec("long_orthogonal_short"),),
        g=(form_spec("g2", 7),),
        notes="su(2) taken as the sl2 of a long root, which lies in the long-root su(3)",
    ),
    ChainSpec(
        "T6.5-sp2", Expected.FAILS, "{0} < Sp(1)xSp(1) < Sp(2)",
        h=(), k=(block(H, 2, ("sp", 1, 0), ("sp", 1, 1)),), g=(block(H, 2, ("sp", 2, 0)),),
        vectors=WorkedPair("je11 + e12 + je12 - e21 + je21 + ie22 - ke22",
                             "-ie11 - ke11 + ie12 + ie21 + 1/2 ie22 + je22 - 1/2 ke22"),
    ),
    ChainSpec(
        "T6.5-A2-su3", Expected.FAILS, "A2 root configuration inside SU(3)",
        h=(block(C, 3, generators=("-2iF11 + iF22 + iF33",)),),
        k=(block(C, 3, generators=("E23", "iF23", "iF22 - iF33", "-2iF11 + iF22 + iF33")),),
        g=(block(C, 3, ("su", 3, 0)),),
        vectors=WorkedPair("E23 + E12 + E13", "iF23 + iF12 - iF13", m_bracket="2iF22 - 2iF33"),
    ),
    ChainSpec(
        "T6.5-B2a-so5", Expected.FAILS, "B2 root configuration, short root in m",
        h=(block(R, 5, ("so", 2, 3)),), k=(block(R, 5, ("so", 3, 0), ("so", 2, 3)),),
        g=(block(R, 5, ("so", 5, 0)),),
        vectors=WorkedPair("E12 - E24", "E13 + E34", m_bracket="-E23"),
    ),
    ChainSpec(
        "T6.5-B2b-so5", Expected.FAILS, "B2 root configuration, long roots in m",
        h=(), k=(block(R, 5, generators=("E23 + E45", "E24 - E35", "E25 + E34")),),
        g=(block(R, 5, ("so", 5, 0)),),
        vectors=WorkedPair("1/2 E25 + 1/2 E34 + E14 + 1/2 E23 - 1/2 E45",
                             "1/2 E23 + 1/2 E45 + E12 + 1/2 E25 - 1/2 E34",
                             m_bracket="-1/2 E24 + 1/2 E35"),
    ),
    ChainSpec(
        "CONJ-sp-n2", Expected.HOLDS_CONJECTURED, "Sp(1) < Sp(1)^2 < Sp(2)",
        h=(block(H, 2, ("sp", 1, 1)),), k=(block(H, 2, ("sp", 1, 0), ("sp", 1, 1)),),
        g=(block(H, 2, ("sp", 2, 0)),),
    ),
    ChainSpec(
        "CONJ-sp-n3", Expected.HOLDS_CONJECTURED, "Sp(1)^2 < Sp(1)^3 < Sp(3)",
        h=(block(H, 3, ("sp", 1, 1), ("sp", 1, 2)),),
        k=(block(H, 3, ("sp", 1, 0), ("sp", 1, 1), ("sp", 1, 2)),),
        g=(block(H, 3, ("sp", 3, 0)),),
    ),
    ChainSpec(
        "SYM-u2-so4-so5", Expected.SYMMETRIC_PAIR, "control: U(2) < SO(4) < SO(5)",
        h=(jspec(2, "u", "pairs", 5),), k=(block(R, 5, ("so", 4, 0)),), g=(block(R, 5, ("so", 5, 0)),),
    ),
    ChainSpec(
        "SYM-u3-so6-so7", Expected.SYMMETRIC_PAIR, "control: U(3) < SO(6) < SO(7)",
        h=(jspec(3, "u", "pairs", 7),), k=(block(R, 7, ("so", 6, 0)),), g=(block(R, 7, ("so", 7, 0)),),
    ),
    ChainSpec(
        "SYM-so3-so4-so5", Expected.SYMMETRIC_PAIR, "control: SO(3) < SO(4) < SO(5)",
        h=(block(R, 5, ("so", 3, 0)),), k=(block(R, 5, ("so", 4, 0)),), g=(block(R, 5, ("so", 5, 0)),),
    ),
    ChainSpec(
        "SYM-so4-so5-so6", Expected.SYMMETRIC_PAIR, "control: SO(4) < SO(5) < SO(6)",
        h=(block(R, 6, ("so", 4, 0)),), k=(block(R, 6, ("so", 5, 0)),), g=(block(R, 6, ("so", 6, 0)),),
    ),
    ChainSpec(
        "CTRL-fullrank-split", Expected.HOLDS_PROVED,
        "control for the per-factor full-rank test: T^2+T^2 < SU(3)+T^2 < SU(3)+SU(3)",
        h=(block(C, 6, generators=("iF11 - iF22", "iF22 - iF33", "iF44 - iF55", "iF55 - iF66")),),
        k=(block(C, 6, ("su", 3, 0), generators=("iF44 - iF55", "iF55 - iF66")),),
        g=(block(C, 6, ("su", 3, 0), ("su", 3, 3)),),
    ),
)

def list_catalog() -> list:
    return [(s.id, s.expected.value, s.reference) for s in CATALOG]


def get_spec(chain_id: str) -> ChainSpec:
    for s in CATALOG:
        if s.id == chain_id:
            return s
    raise UnknownChainError(chain_id)


def assemble(spec: ChainSpec) -> Chain:
    """Realize a spec and check the strict inclusions (and the involution, if any)."""
    try:
        g = realize("g", spec.g)
        k = realize("k", spec.k, g.space)
        h = realize("h", spec.h, g.space)
        l = realize("l", spec.l, g.space) if spec.l else None
    except StructuralError as exc:
        raise StructuralError(f"{spec.id}: {exc}") from exc
    _check_inclusions(spec.id, h, k, g)
    if spec.involution is not None:
        rep = check_involution(spec.involution, g, k)
        if not rep["ok"]:
            raise StructuralError(f"{spec.id}: involution check failed {rep}")
        if l is None or not g.contains_algebra(l, 1e-7):
            raise StructuralError(f"{spec.id}: involution chains need l inside g")
    return Chain(spec, h, k, g, l)


def _check_inclusions(cid: str, h, k, g):
    if not (g.contains_algebra(k, 1e-7) and k.contains_algebra(h, 1e-7)):
        raise StructuralError(f"{cid}: realized algebras are not nested")
    if not (h.dim < k.dim < g.dim):
        raise StructuralError(f"{cid}: inclusions are not strict, dims {h.dim}, {k.dim}, {g.dim}")


@lru_cache(maxsize=None)
def build_chain(chain_id: str) -> Chain:
    return assemble(get_spec(chain_id))
