"""Matrix arithmetic over the reals, complexes and quaternions.

Every matrix is stored as a real array of shape ``(n, n, c)`` where ``c`` is
the number of real components of the field (1, 2 or 4).  With this layout the
real trace form ``Re tr(A^H B)`` is the Euclidean dot product of the flattened
arrays, so subspace arithmetic is ordinary real linear algebra.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

TAU_STRUCT = 1e-9
TAU_EXACT = 1e-12
NULL_RCOND = 1e-8


class StructuralError(ValueError):
    """Raised when inputs live in incompatible spaces or violate a structural precondition."""


class Field(enum.Enum):
    REAL = 1
    COMPLEX = 2
    QUATERNION = 4

    @property
    def components(self) -> int:
        return self.value


def _mult_table(field: Field) -> np.ndarray:
    """Structure tensor ``T[a, b, c]`` with ``e_a e_b = sum_c T[a, b, c] e_c``."""
    c = field.components
    T = np.zeros((c, c, c))
    if field is Field.REAL:
        T[0, 0, 0] = 1.0
    elif field is Field.COMPLEX:
        T[0, 0, 0] = T[0, 1, 1] = T[1, 0, 1] = 1.0
        T[1, 1, 0] = -1.0
    else:
        # units 1, i, j, k with ij = k, jk = i, ki = j
        T[0, :, :] = np.eye(4)
        T[:, 0, :] = np.eye(4)
        for a in (1, 2, 3):
            T[a, a, 0] = -1.0
        for a, b, c_ in ((1, 2, 3), (2, 3, 1), (3, 1, 2)):
            T[a, b, c_] = 1.0
            T[b, a, c_] = -1.0
    return T


_TABLES = {f: _mult_table(f) for f in Field}
_CONJ = {f: np.array([1.0] + [-1.0] * (f.components - 1)) for f in Field}

UNITS = {"1": 0, "i": 1, "j": 2, "k": 3}


def quaternion_multiply(p: Sequence[float], q: Sequence[float]) -> np.ndarray:
    return np.einsum("abc,a,b->c", _TABLES[Field.QUATERNION], np.asarray(p, float), np.asarray(q, float))


def quaternion_conjugate(q: Sequence[float]) -> np.ndarray:
    return np.asarray(q, float) * _CONJ[Field.QUATERNION]


@dataclass(frozen=True)
class MatrixSpace:
    """All ``n x n`` matrices over one field, viewed as a real vector space."""

    field: Field
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise StructuralError(f"matrix size must be positive, got {self.n}")

    @property
    def components(self) -> int:
        return self.field.components

    @property
    def real_dim(self) -> int:
        return self.components * self.n * self.n

    @property
    def shape(self) -> tuple:
        return (self.n, self.n, self.components)

    def zeros(self) -> np.ndarray:
        return np.zeros(self.shape)

    def matmul(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        """Product of (batches of) matrices in component layout ``(..., n, n, c)``."""
        if self.field is Field.REAL:
            return (A[..., 0] @ B[..., 0])[..., None]
        T = _TABLES[self.field]
        return np.einsum("abc,...ija,...jkb->...ikc", T, A, B, optimize=True)

    def bracket(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        return self.matmul(A, B) - self.matmul(B, A)

    def adjoint(self, A: np.ndarray) -> np.ndarray:
        return np.swapaxes(A, -3, -2) * _CONJ[self.field]

    def bracket_flat(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Bracket of flattened matrices; broadcasts over leading axes."""
        A = np.reshape(u, u.shape[:-1] + self.shape)
        B = np.reshape(v, v.shape[:-1] + self.shape)
        C = self.bracket(A, B)
        return C.reshape(C.shape[:-3] + (self.real_dim,))

    def embed_into(self, A: np.ndarray, target: "MatrixSpace", offset: int = 0) -> np.ndarray:
        """Place ``A`` as a diagonal block of a larger space, lifting the field if needed."""
        if target.components < self.components or offset + self.n > target.n:
            raise StructuralError(f"cannot embed {self} into {target} at offset {offset}")
        out = np.zeros(A.shape[:-3] + target.shape)
        sl = slice(offset, offset + self.n)
        out[..., sl, sl, : self.components] = A
        return out


@dataclass(frozen=True, eq=False)
class MatrixElement:
    """An immutable square matrix over R, C or H."""

    space: MatrixSpace
    data: np.ndarray

    def __post_init__(self):
        data = np.array(self.data, dtype=float)
        if data.shape != self.space.shape:
            raise StructuralError(f"data of shape {data.shape} does not fit {self.space}")
        data.flags.writeable = False
        object.__setattr__(self, "data", data)

    @classmethod
    def from_flat(cls, space: MatrixSpace, vec: np.ndarray) -> "MatrixElement":
        return cls(space, np.reshape(vec, space.shape))

    @property
    def flat(self) -> np.ndarray:
        return self.data.reshape(-1)

    @property
    def field(self) -> Field:
        return self.space.field

    def _check(self, other: "MatrixElement"):
        if not isinstance(other, MatrixElement) or other.space != self.space:
            raise StructuralError(f"mismatched spaces: {self.space} vs {getattr(other, 'space', other)}")

    def __add__(self, other):
        self._check(other)
        return MatrixElement(self.space, self.data + other.data)

    def __sub__(self, other):
        self._check(other)
        return MatrixElement(self.space, self.data - other.data)

    def __neg__(self):
        return MatrixElement(self.space, -self.data)

    def __mul__(self, scalar):
        return MatrixElement(self.space, float(scalar) * self.data)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return MatrixElement(self.space, self.data / float(scalar))

    def adjoint(self) -> "MatrixElement":
        return MatrixElement(self.space, self.space.adjoint(self.data))

    def norm(self) -> float:
        return float(np.linalg.norm(self.flat))

    def is_skew_hermitian(self, tol: float = TAU_STRUCT) -> bool:
        return bool(np.max(np.abs(self.data + self.space.adjoint(self.data)), initial=0.0) < tol)

    def allclose(self, other: "MatrixElement", tol: float = TAU_STRUCT) -> bool:
        self._check(other)
        return bool(np.max(np.abs(self.data - other.data), initial=0.0) < tol)

    def to_complex(self) -> np.ndarray:
        """Complex ``n x n`` array (only for real or complex fields)."""
        if self.field is Field.QUATERNION:
            raise StructuralError("quaternion matrices have no complex form")
        z = self.data[..., 0].astype(complex)
        if self.field is Field.COMPLEX:
            z = z + 1j * self.data[..., 1]
        return z

    def __repr__(self):
        return f"MatrixElement({self.field.name}, n={self.space.n}, norm={self.norm():.6g})"


def bracket(A: MatrixElement, B: MatrixElement) -> MatrixElement:
    A._check(B)
    return MatrixElement(A.space, A.space.bracket(A.data, B.data))


def inner(A: MatrixElement, B: MatrixElement) -> float:
    """Real trace form ``Re tr(A^H B)``."""
    A._check(B)
    return float(A.flat @ B.flat)


# -- basis matrices E_ab, F_ab (1-based indices) ----------------------------

def space(field: Field | str, n: int) -> MatrixSpace:
    if isinstance(field, str):
        field = {"R": Field.REAL, "C": Field.COMPLEX, "H": Field.QUATERNION}[field]
    return MatrixSpace(field, n)


def entry(sp: MatrixSpace, a: int, b: int, unit: str = "1", value: float = 1.0) -> MatrixElement:
    """Matrix with ``value * unit`` at position ``(a, b)`` and zeros elsewhere."""
    idx = UNITS[unit]
    if idx >= sp.components:
        raise StructuralError(f"unit {unit!r} not available over {sp.field.name}")
    data = sp.zeros()
    data[a - 1, b - 1, idx] = value
    return MatrixElement(sp, data)


def E(sp: MatrixSpace, a: int, b: int) -> MatrixElement:
    """Skew-symmetric ``E_ab``: +1 at (a, b), -1 at (b, a)."""
    return entry(sp, a, b) - entry(sp, b, a)


def F(sp: MatrixSpace, a: int, b: int, unit: str = "i") -> MatrixElement:
    """``unit * F_ab`` where ``F_ab`` is symmetric with ones at (a, b) and (b, a).

    For ``a == b`` this is the single diagonal entry ``unit * e_aa``.
    """
    if a == b:
        return entry(sp, a, a, unit)
    return entry(sp, a, b, unit) + entry(sp, b, a, unit)


def quaternion_matrix(rows: Sequence[Sequence[Sequence[float]]]) -> MatrixElement:
    """Build a quaternion matrix from nested ``[[(r, i, j, k), ...], ...]`` entries."""
    arr = np.asarray(rows, dtype=float)
    return MatrixElement(MatrixSpace(Field.QUATERNION, arr.shape[0]), arr)


# -- subspaces ------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Subspace:
    """An orthonormal basis (rows of ``basis``) inside a matrix space."""

    space: MatrixSpace
    basis: np.ndarray

    def __post_init__(self):
        B = np.array(self.basis, dtype=float).reshape(-1, self.space.real_dim)
        B.flags.writeable = False
        object.__setattr__(self, "basis", B)

    @classmethod
    def zero(cls, sp: MatrixSpace) -> "Subspace":
        return cls(sp, np.zeros((0, sp.real_dim)))

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def elements(self) -> list:
        return [MatrixElement.from_flat(self.space, b) for b in self.basis]

    def coords(self, v: np.ndarray) -> np.ndarray:
        return self.basis @ _flat(v)

    def project(self, v) -> tuple:
        """Return ``(component, residual)`` as flat vectors."""
        v = _flat(v)
        comp = self.basis.T @ (self.basis @ v)
        return comp, v - comp

    def residual_norm(self, v) -> float:
        return float(np.linalg.norm(self.project(v)[1]))

    def contains(self, v, tol: float = TAU_STRUCT) -> bool:
        v = _flat(v)
        scale = max(1.0, float(np.linalg.norm(v)))
        return self.residual_norm(v) < tol * scale

    def contains_subspace(self, other: "Subspace", tol: float = TAU_STRUCT) -> bool:
        _same_space(self, other)
        if other.dim == 0:
            return True
        R = other.basis - (other.basis @ self.basis.T) @ self.basis
        return bool(np.max(np.linalg.norm(R, axis=1)) < tol)

    def orthonormality_error(self) -> float:
        if self.dim == 0:
            return 0.0
        G = self.basis @ self.basis.T
        return float(np.max(np.abs(G - np.eye(self.dim))))

    def __repr__(self):
        return f"Subspace({self.space.field.name}, n={self.space.n}, dim={self.dim})"


def kernel(M: np.ndarray, rcond: float = NULL_RCOND, atol: float = 1e-10) -> np.ndarray:
    """Orthonormal columns spanning the null space of ``M``.

    Singular values below ``max(rcond * s_max, atol)`` count as zero, so a matrix
    of pure rounding noise has a full null space.
    """
    M = np.atleast_2d(M)
    if M.size == 0:
        return np.eye(M.shape[1])
    U, s, Vt = np.linalg.svd(M, full_matrices=True)
    cut = max(rcond * (s[0] if s.size else 0.0), atol)
    r = int(np.sum(s > cut))
    return Vt[r:].T.copy()


def _flat(v) -> np.ndarray:
    if isinstance(v, MatrixElement):
        return v.flat
    return np.asarray(v, dtype=float).reshape(-1)


def _same_space(S: Subspace, T: Subspace):
    if S.space != T.space:
        raise StructuralError(f"subspaces live in different spaces: {S.space} vs {T.space}")


def orthonormal_span(vectors: Iterable, sp: MatrixSpace | None = None, tol: float = TAU_STRUCT) -> Subspace:
    """Modified Gram-Schmidt with one reorthogonalisation pass.

    Vectors whose residual after projection has norm below ``tol`` are dropped.
    """
    vectors = list(vectors)
    if sp is None:
        if not vectors or not isinstance(vectors[0], MatrixElement):
            raise StructuralError("ambient space required when no MatrixElement is given")
        sp = vectors[0].space
    basis: list = []
    for v in vectors:
        if isinstance(v, MatrixElement) and v.space != sp:
            raise StructuralError(f"vector in {v.space}, expected {sp}")
        w = _flat(v).copy()
        for _ in range(2):
            for b in basis:
                w -= (b @ w) * b
        nrm = np.linalg.norm(w)
        if nrm >= tol:
            basis.append(w / nrm)
    return Subspace(sp, np.array(basis).reshape(-1, sp.real_dim))


def span_rows(sp: MatrixSpace, rows: np.ndarray) -> Subspace:
    """Orthonormal basis for the row span of a matrix, via SVD."""
    rows = np.asarray(rows, float).reshape(-1, sp.real_dim)
    if rows.shape[0] == 0:
        return Subspace.zero(sp)
    U, s, Vt = np.linalg.svd(rows, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return Subspace.zero(sp)
    r = int(np.sum(s > NULL_RCOND * s[0]))
    return Subspace(sp, Vt[:r])


def project_onto(X, S: Subspace) -> tuple:
    """Split ``X`` into its component in ``S`` and the orthogonal residual."""
    if isinstance(X, MatrixElement):
        if X.space != S.space:
            raise StructuralError(f"{X.space} is not the ambient space of {S}")
        comp, res = S.project(X)
        return MatrixElement.from_flat(S.space, comp), MatrixElement.from_flat(S.space, res)
    return S.project(X)


def orth_complement(S: Subspace, W: Subspace, tol: float = TAU_STRUCT) -> Subspace:
    """Orthogonal complement of ``S`` inside ``W``."""
    _same_space(S, W)
    if not W.contains_subspace(S, tol):
        raise StructuralError(f"{S} is not contained in {W}")
    if S.dim == 0:
        return W
    C = S.basis @ W.basis.T
    N = kernel(C)
    if N.shape[1] != W.dim - S.dim:
        raise StructuralError(f"complement has dim {N.shape[1]}, expected {W.dim - S.dim}")
    return Subspace(W.space, N.T @ W.basis)


def intersect(S: Subspace, T: Subspace, tol: float = 1e-6) -> Subspace:
    """Intersection of two subspaces; a unit vector of ``S`` counts as inside ``T``
    when its residual against ``T`` is below ``tol``."""
    _same_space(S, T)
    if S.dim == 0 or T.dim == 0:
        return Subspace.zero(S.space)
    R = S.basis - (S.basis @ T.basis.T) @ T.basis
    w, V = np.linalg.eigh(R @ R.T)
    C = V[:, w < tol * tol].T
    if C.shape[0] == 0:
        return Subspace.zero(S.space)
    return orthonormal_span(C @ S.basis, S.space)


def sum_span(*subspaces: Subspace) -> Subspace:
    sp = subspaces[0].space
    for S in subspaces:
        _same_space(subspaces[0], S)
    return span_rows(sp, np.vstack([S.basis for S in subspaces]))
