"""Decomposition of a chain, certificate checking, construction, search and classification."""
from __future__ import annotations

import enum
import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.optimize import least_squares, minimize

from .algebra import (
    TAU_STRUCT,
    MatrixElement,
    MatrixSpace,
    StructuralError,
    Subspace,
    intersect,
    orth_complement,
)
from .catalog import Chain, basis_digest
from .lie import ConstructionError, LieAlgebraModel, is_regular_subalgebra, maximal_torus
from .roots import (
    A2,
    B2,
    RootDatum,
    algebra_type,
    frame_rotate,
    max_root_length,
    rank2_span_type,
    root_decomposition,
    simple_ideals,
    sl2_root_length,
)

TAU_ACCEPT = 1e-8
THETA_MIN = 1e-4
PENALTIES = (10.0, 1e3, 1e5)
BATCH = 8
RATIO_FLOOR = 1e-6
DIVERGENCE_CAP = 1e6


class CertificateRejected(ValueError):
    """Base class for rejected certificates."""


class StructuralRejection(CertificateRejected):
    """X or Y is not in p (or the input is degenerate)."""


class NumericRejection(CertificateRejected):
    """The pair does not commute to tolerance or its m-bracket is too small."""


# -- decomposition ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ChainDecomposition:
    """Orthonormal basis of g adapted to g = h + m + s, with structure constants.

    Coordinates of ``p`` list the ``m`` directions first, then ``s``.
    """

    chain: Chain
    h: Subspace
    m: Subspace
    s: Subspace
    structure: np.ndarray = field(repr=False)

    @property
    def space(self) -> MatrixSpace:
        return self.h.space

    @property
    def dims(self) -> tuple:
        return self.h.dim, self.m.dim, self.s.dim

    @cached_property
    def p(self) -> Subspace:
        return Subspace(self.space, np.vstack([self.m.basis, self.s.basis]))

    @cached_property
    def basis(self) -> np.ndarray:
        return np.vstack([self.h.basis, self.m.basis, self.s.basis])

    @property
    def dim_p(self) -> int:
        return self.m.dim + self.s.dim

    @cached_property
    def _pp(self) -> np.ndarray:
        d = self.h.dim
        return np.ascontiguousarray(self.structure[d:, d:, :])

    @cached_property
    def _mmm(self) -> np.ndarray:
        d, e = self.h.dim, self.h.dim + self.m.dim
        return np.ascontiguousarray(self.structure[d:e, d:e, d:e])

    @cached_property
    def digest(self) -> str:
        return basis_digest(self.p)

    def bracket(self, x, y) -> np.ndarray:
        """Coordinates over the adapted basis of g of ``[X, Y]`` for p-coordinates x, y."""
        return np.einsum("...i,...j,ijk->...k", x, y, self._pp, optimize=True)

    def m_bracket(self, x, y) -> np.ndarray:
        """m-coordinates of ``[X^m, Y^m]^m``."""
        dm = self.m.dim
        return np.einsum("...i,...j,ijk->...k", x[..., :dm], y[..., :dm], self._mmm, optimize=True)

    def p_coords(self, X) -> np.ndarray:
        return self.p.coords(X)

    def element(self, coords) -> MatrixElement:
        return MatrixElement.from_flat(self.space, np.asarray(coords) @ self.p.basis)

    def project(self, X, part: str) -> MatrixElement:
        S = {"h": self.h, "m": self.m, "s": self.s, "p": self.p}[part]
        comp, _ = S.project(X)
        return MatrixElement.from_flat(self.space, comp)


def decompose(chain: Chain) -> ChainDecomposition:
    h = chain.h.basis
    m = orth_complement(h, chain.k.basis, tol=1e-7)
    s = orth_complement(chain.k.basis, chain.g.basis, tol=1e-7)
    Q = np.vstack([h.basis, m.basis, s.basis])
    sp = chain.space
    c = sp.bracket_flat(Q[:, None, :], Q[None, :, :]) @ Q.T
    dec = ChainDecomposition(chain, h, m, s, c)
    dh, dm = h.dim, m.dim
    hm = np.abs(c[:dh, dh:dh + dm, :dh]).max(initial=0.0), np.abs(c[:dh, dh:dh + dm, dh + dm:]).max(initial=0.0)
    hs = np.abs(c[:dh, dh + dm:, :dh + dm]).max(initial=0.0)
    if max(*hm, hs) > 1e-7:
        raise StructuralError(f"{chain.id}: [h, m] or [h, s] leaves its summand")
    return dec


def metric_gt(dec: ChainDecomposition, t: float, X, Y) -> float:
    """``g_t(X, Y) = g0(X^m, Y^m) / (1 - t) + g0(X^s, Y^s)`` on p."""
    if t >= 1:
        raise ValueError("the deformation parameter must satisfy t < 1")
    x, y = dec.p_coords(X), dec.p_coords(Y)
    dm = dec.m.dim
    return float(x[:dm] @ y[:dm] / (1.0 - t) + x[dm:] @ y[dm:])


def is_symmetric_pair(k, h, tol: float = TAU_STRUCT) -> bool:
    """True iff ``[m, m]`` lies in ``h``, where ``m`` is the complement of h in k."""
    kb = k.basis if isinstance(k, LieAlgebraModel) else k
    hb = h.basis if isinstance(h, LieAlgebraModel) else h
    m = orth_complement(hb, kb, tol=1e-7)
    if m.dim < 2:
        return True
    B = m.basis
    br = m.space.bracket_flat(B[:, None, :], B[None, :, :])
    return bool(np.max(np.abs(br @ B.T)) < tol)


# -- certificates -------------------------------------------------------------------------------

class Origin(str, enum.Enum):
    PAPER = "PAPER"
    CONSTRUCTED = "CONSTRUCTED"
    SEARCHED = "SEARCHED"
    TRANSFERRED = "TRANSFERRED"


@dataclass(frozen=True, eq=False)
class Certificate:
    """A unit-normalized commuting pair in p with nonzero m-bracket."""

    chain_id: str
    x_coeffs: np.ndarray
    y_coeffs: np.ndarray
    X: MatrixElement
    Y: MatrixElement
    residual: float
    m_bracket_norm: float
    raw_residual: float
    raw_m_bracket_norm: float
    input_norms: tuple
    tau_accept: float = TAU_ACCEPT
    theta_min: float = THETA_MIN
    seed: int = 0
    origin: Origin = Origin.SEARCHED


def _as_flat(dec, X) -> np.ndarray:
    return X.flat if isinstance(X, MatrixElement) else np.asarray(X, float).reshape(-1)


def verify_certificate(dec: ChainDecomposition, X, Y, tau_accept: float = TAU_ACCEPT,
                       theta_min: float = THETA_MIN, seed: int = 0,
                       origin: Origin = Origin.SEARCHED) -> Certificate:
    """Normalize and check ``[X, Y] = 0`` and ``[X^m, Y^m]^m != 0``."""
    sp = dec.space
    fx, fy = _as_flat(dec, X), _as_flat(dec, Y)
    if fx.size != sp.real_dim or fy.size != sp.real_dim:
        raise StructuralRejection("pair does not live in the chain's matrix space")
    nx, ny = float(np.linalg.norm(fx)), float(np.linalg.norm(fy))
    if nx == 0 or ny == 0:
        raise StructuralRejection("zero vector")
    for name, f, n in (("X", fx, nx), ("Y", fy, ny)):
        if dec.p.residual_norm(f) > TAU_STRUCT * max(1.0, n):
            raise StructuralRejection(f"{name} is not in p")
    raw_b = sp.bracket_flat(fx, fy)
    xm, ym = dec.m.project(fx)[0], dec.m.project(fy)[0]
    raw_mb = dec.m.project(sp.bracket_flat(xm, ym))[0]
    x, y = dec.p_coords(fx) / nx, dec.p_coords(fy) / ny
    res = float(np.linalg.norm(dec.bracket(x, y)))
    mbr = float(np.linalg.norm(dec.m_bracket(x, y)))
    if res > tau_accept:
        raise NumericRejection(f"commutator norm {res:.3e} exceeds {tau_accept:.1e}")
    if mbr < theta_min:
        raise NumericRejection(f"m-bracket norm {mbr:.3e} below {theta_min:.1e}")
    return Certificate(dec.chain.id, x, y, dec.element(x), dec.element(y), res, mbr,
                       float(np.linalg.norm(raw_b)), float(np.linalg.norm(raw_mb)), (nx, ny),
                       tau_accept, theta_min, seed, origin)


def transfer_certificate(sub: ChainDecomposition, sup: ChainDecomposition, cert: Certificate) -> Certificate:
    """Re-express a certificate of a sub-chain (p' in p, m' in m) in the larger chain."""
    src, dst = sub.space, sup.space

    def lift(B):
        if src == dst:
            return B
        return src.embed_into(B.reshape((-1,) + src.shape), dst).reshape(B.shape[0], -1)

    p_sub, m_sub = Subspace(dst, lift(sub.p.basis)), Subspace(dst, lift(sub.m.basis))
    if not sup.m.contains_subspace(m_sub, 1e-9):
        raise StructuralError("m' is not contained in m")
    if not sup.p.contains_subspace(p_sub, 1e-9):
        raise StructuralError("p' is not contained in p")
    X = lift(cert.X.flat[None, :])[0]
    Y = lift(cert.Y.flat[None, :])[0]
    return verify_certificate(sup, X, Y, cert.tau_accept, cert.theta_min, cert.seed, Origin.TRANSFERRED)


# -- constructive full-rank algorithm ------------------------------------------------------------

def sigma_torus(chain: Chain, seed: int = 0) -> Subspace:
    """Maximal torus of g inside ``l`` and the (-1)-eigenspace ``s`` of the involution."""
    g = chain.g
    s = orth_complement(chain.k.basis, g.basis, tol=1e-7)
    ls = intersect(chain.l.basis, s, tol=1e-7)
    if ls.dim == 0:
        raise ConstructionError(f"{chain.id}: l meets s trivially")
    t = maximal_torus(g, seed, within=ls)
    if t.dim != g.rank or not s.contains_subspace(t, 1e-7):
        raise ConstructionError(f"{chain.id}: no maximal torus of g inside l and s")
    return t


def sigma_gauge(rd: RootDatum, k: Subspace) -> RootDatum:
    """Rotate every frame so that ``X_a`` lies in ``k`` (and hence ``Y_a`` in its complement)."""
    for a in range(rd.n_positive):
        P = np.vstack([rd.X[a], rd.Y[a]])
        Pk = P @ k.basis.T
        w, V = np.linalg.eigh(Pk @ Pk.T)
        c, s_ = V[:, -1]
        if abs(w[-1] - 1) > 1e-7 or abs(w[0]) > 1e-7:
            raise ConstructionError(f"root space {a} is not split by the involution")
        rd = frame_rotate(rd, a, float(np.arctan2(s_, c)))
        X = rd.X[a]
        lead = int(np.argmax(np.abs(X) > 1e-6 * np.abs(X).max()))
        if X[lead] < 0:
            rd = frame_rotate(rd, a, np.pi)
    return rd


def _choose_alpha_beta(rd: RootDatum, lam: int, mu: int, nu: int, plus: bool):
    kind = rank2_span_type(rd, lam, mu)
    L = np.linalg.norm(rd.signed, axis=1)
    if kind == A2:
        return (lam, mu) if not plus else (nu, mu)
    if kind != B2:
        return None
    orth_short = abs(rd.signed[lam] @ rd.signed[mu]) < 1e-8 * L.max() ** 2 and abs(L[lam] - L[mu]) < 1e-8 * L.max()
    if plus:
        if orth_short:
            return nu, mu
        return nu, (lam if L[lam] > L[mu] else mu)
    if orth_short:
        return lam, nu
    return (lam if L[lam] > L[mu] else mu), nu


def _admissible(rd: RootDatum, a: int, b: int) -> int | None:
    d = rd.index_of(rd.signed[a] - rd.signed[b])
    if d is None or not rd.is_positive(d):
        return None
    if rd.index_of(rd.signed[a] + rd.signed[b]) is not None:
        return None
    if rd.index_of(2 * rd.signed[a] - rd.signed[b]) is not None:
        return None
    return d


def _minimal_H(rd: RootDatum, a: int, b: int, q: float) -> np.ndarray:
    """Smallest torus element with ``b(H) (a(H) - b(H)) = q``, taking ``b(H) > 0``."""
    A = rd.signed[[a, b]]
    Qm = np.linalg.inv(A @ A.T)
    qa, qb, qc = Qm[0, 0], Qm[0, 1], Qm[1, 1]
    beta = np.sqrt(abs(q) * np.sqrt(qa / (qa + 2 * qb + qc)))
    alpha = beta + q / beta
    h = A.T @ Qm @ np.array([alpha, beta])
    return h @ rd.torus.basis


def fullrank_construct(dec: ChainDecomposition, rd: RootDatum | None = None, seed: int = 0) -> Certificate | None:
    """Explicit commuting pair for chains carrying an involution with ``t`` in ``s`` and ``l``.

    Returns ``None`` when the chain is a symmetric pair or lacks the required setting.
    """
    chain = dec.chain
    if is_symmetric_pair(chain.k, chain.h):
        return None
    if chain.spec.involution is None or chain.l is None:
        return None
    if rd is None:
        rd = root_decomposition(chain.g, sigma_torus(chain, seed), seed)
    rd = sigma_gauge(rd, chain.k.basis)
    sp = dec.space
    in_m = [dec.m.residual_norm(rd.X[a]) < 1e-7 for a in range(rd.n_positive)]
    in_h = [dec.h.residual_norm(rd.X[a]) < 1e-7 for a in range(rd.n_positive)]
    if not all(x or y for x, y in zip(in_m, in_h)):
        return None
    N = rd.N
    R_m = [a for a in range(rd.n_positive) if in_m[a]]
    for lam, mu in itertools.permutations(R_m, 2):
        if np.linalg.norm(dec.m.project(sp.bracket_flat(rd.X[lam], rd.X[mu]))[0]) < 1e-7:
            continue
        for plus in (True, False):
            nu = rd.index_of(rd.signed[lam] + rd.signed[mu] if plus else rd.signed[lam] - rd.signed[mu])
            if nu is None or not rd.is_positive(nu) or not in_m[nu]:
                continue
            ab = _choose_alpha_beta(rd, lam, mu, nu, plus)
            if ab is None:
                continue
            a, b = ab
            d = _admissible(rd, a, b)
            if d is None:
                continue
            n1 = N[a, rd.negate(b)]          # N_{a,-b}
            n2 = N[a, rd.negate(d)]          # N_{a,b-a}
            if abs(n1.imag) > 1e-7 or abs(n2.imag) > 1e-7 or abs(n2) < 1e-9:
                continue
            q = 0.25 * n1.real * n2.real
            if abs(q) < 1e-12:
                continue
            H = _minimal_H(rd, a, b, q)
            bH = rd.torus.coords(H) @ rd.signed[b]
            eta = 2.0 * bH / n2.real
            X = rd.X[a] + H
            Y = rd.X[b] + eta * rd.Y[d]
            if np.linalg.norm(sp.bracket_flat(X, Y)) > 1e-9:
                raise ConstructionError(f"{chain.id}: constructed pair does not commute")
            try:
                return verify_certificate(dec, X, Y, seed=seed, origin=Origin.CONSTRUCTED)
            except NumericRejection:
                continue
    return None


# -- numerical search ------------------------------------------------------------------------------

@dataclass(frozen=True)
class SearchOutcome:
    certificate: Certificate | None
    best_objective: float
    restarts_run: int
    objectives: tuple = ()


class _PenaltyProblem:
    """Residuals ``([X, Y], sqrt(mu) (|[X^m, Y^m]^m|^2 - 1))`` over ``(x, y)`` in p x p."""

    def __init__(self, dec: ChainDecomposition, mu: float):
        self.dec, self.w = dec, np.sqrt(mu)
        self.n, self.dm = dec.dim_p, dec.m.dim

    def split(self, z):
        return z[: self.n], z[self.n:]

    def fun(self, z):
        x, y = self.split(z)
        mb = self.dec.m_bracket(x, y)
        return np.concatenate([self.dec.bracket(x, y), [self.w * (mb @ mb - 1.0)]])

    def jac(self, z):
        x, y = self.split(z)
        pp, mmm, dm = self.dec._pp, self.dec._mmm, self.dm
        Jx = np.einsum("ijk,j->ki", pp, y)
        Jy = np.einsum("ijk,i->kj", pp, x)
        mb = self.dec.m_bracket(x, y)
        gx = np.zeros(self.n)
        gy = np.zeros(self.n)
        gx[:dm] = 2 * np.einsum("ijk,j,k->i", mmm, y[:dm], mb)
        gy[:dm] = 2 * np.einsum("ijk,i,k->j", mmm, x[:dm], mb)
        top = np.hstack([Jx, Jy])
        return np.vstack([top, self.w * np.concatenate([gx, gy])[None, :]])


def _start(dec: ChainDecomposition, rng) -> np.ndarray:
    x = rng.standard_normal(dec.dim_p)
    y = rng.standard_normal(dec.dim_p)
    x, y = x / np.linalg.norm(x), y / np.linalg.norm(y)
    mb = np.linalg.norm(dec.m_bracket(x, y))
    if mb > 1e-12:
        x, y = x / np.sqrt(mb), y / np.sqrt(mb)
    return np.concatenate([x, y])


def _polish(dec: ChainDecomposition, z: np.ndarray, iterations: int) -> np.ndarray:
    prob = _PenaltyProblem(dec, 1.0)
    sol = least_squares(prob.fun, z, jac=prob.jac, method="trf", xtol=1e-15, ftol=1e-15, gtol=1e-15,
                        max_nfev=max(100, iterations))
    return sol.x


def _restart(dec: ChainDecomposition, seed: int, index: int, iterations: int):
    rng = np.random.default_rng([seed, index])
    z = _start(dec, rng)
    obj = np.inf
    for mu in PENALTIES:
        prob = _PenaltyProblem(dec, mu)
        sol = least_squares(prob.fun, z, jac=prob.jac, method="trf", xtol=1e-14, ftol=1e-14,
                            gtol=1e-14, max_nfev=iterations)
        z = sol.x
        obj = float(2 * sol.cost)
    x, y = z[: dec.dim_p], z[dec.dim_p:]
    mb = np.linalg.norm(dec.m_bracket(x, y))
    cert = None
    if abs(mb * mb - 1.0) < 0.01:
        z = _polish(dec, z, iterations)
        x, y = z[: dec.dim_p], z[dec.dim_p:]
        try:
            cert = verify_certificate(dec, dec.element(x), dec.element(y), seed=seed, origin=Origin.SEARCHED)
        except CertificateRejected:
            cert = None
    return obj, cert


def search_counterexample_outcome(dec: ChainDecomposition, restarts: int = 200, iterations: int = 2000,
                                  seed: int = 0, threads: int | None = None) -> SearchOutcome:
    """Penalized least-squares search for a commuting pair with nonzero m-bracket.

    Restarts run in fixed batches; the search stops after the first batch that
    produced a certificate, so the outcome does not depend on ``threads``.
    """
    if is_symmetric_pair(dec.chain.k, dec.chain.h) or dec.m.dim < 2:
        return SearchOutcome(None, float("inf"), 0)
    results = []
    with ThreadPoolExecutor(max_workers=threads or 1) as pool:
        for start in range(0, restarts, BATCH):
            idx = list(range(start, min(start + BATCH, restarts)))
            batch = list(pool.map(lambda i: _restart(dec, seed, i, iterations), idx))
            results += batch
            if any(c is not None for _, c in batch):
                break
    found = [(c.residual, i, c) for i, (_, c) in enumerate(results) if c is not None]
    objs = tuple(o for o, _ in results)
    best = min(objs) if objs else float("inf")
    cert = min(found, key=lambda t: (t[0], t[1]))[2] if found else None
    return SearchOutcome(cert, best, len(results), objs)


def search_counterexample(dec, restarts: int = 200, iterations: int = 2000, seed: int = 0,
                          threads: int | None = None) -> Certificate | None:
    return search_counterexample_outcome(dec, restarts, iterations, seed, threads).certificate


# -- best constant -----------------------------------------------------------------------------------

@dataclass(frozen=True)
class ConstantEstimate:
    value: float
    divergent: bool
    ratio: float


def ratio_squared(dec: ChainDecomposition, x, y) -> np.ndarray:
    """``|[X^m, Y^m]^m|^2 / |[X, Y]|^2`` for (batches of) p-coordinates."""
    b = dec.bracket(x, y)
    mb = dec.m_bracket(x, y)
    return np.sum(mb * mb, axis=-1) / np.sum(b * b, axis=-1)


def _neg_ratio(z: np.ndarray, dec: ChainDecomposition):
    n = dec.dim_p
    u, w = z[:n], z[n:]
    nu, nw = np.linalg.norm(u), np.linalg.norm(w)
    x, y = u / nu, w / nw
    b = dec.bracket(x, y)
    mb = dec.m_bracket(x, y)
    den = b @ b + RATIO_FLOOR ** 2
    num = mb @ mb
    f = num / den
    pp, mmm, dm = dec._pp, dec._mmm, dec.m.dim
    gnum_x = np.zeros(n)
    gnum_y = np.zeros(n)
    gnum_x[:dm] = 2 * np.einsum("ijk,j,k->i", mmm, y[:dm], mb)
    gnum_y[:dm] = 2 * np.einsum("ijk,i,k->j", mmm, x[:dm], mb)
    gden_x = 2 * np.einsum("ijk,j,k->i", pp, y, b)
    gden_y = 2 * np.einsum("ijk,i,k->j", pp, x, b)
    gx = (gnum_x * den - num * gden_x) / den ** 2
    gy = (gnum_y * den - num * gden_y) / den ** 2
    gu = (gx - (gx @ x) * x) / nu
    gw = (gy - (gy @ y) * y) / nw
    return -f, -np.concatenate([gu, gw])


def estimate_constant(dec: ChainDecomposition, restarts: int = 20, iterations: int = 2000,
                      seed: int = 0) -> ConstantEstimate:
    """Best ratio ``|[X^m, Y^m]^m| / |[X, Y]|`` found over unit pairs (a lower bound for C)."""
    if is_symmetric_pair(dec.chain.k, dec.chain.h) or dec.m.dim < 2:
        return ConstantEstimate(0.0, False, 0.0)
    best, best_z = -np.inf, None
    n = dec.dim_p
    for i in range(restarts):
        rng = np.random.default_rng([seed, 10_000 + i])
        z0 = rng.standard_normal(2 * n)
        sol = minimize(_neg_ratio, z0, args=(dec,), jac=True, method="L-BFGS-B",
                       options={"maxiter": iterations, "gtol": 1e-12, "ftol": 1e-15})
        if -sol.fun > best:
            best, best_z = -sol.fun, sol.x
    x, y = best_z[:n] / np.linalg.norm(best_z[:n]), best_z[n:] / np.linalg.norm(best_z[n:])
    b = np.linalg.norm(dec.bracket(x, y))
    mb = np.linalg.norm(dec.m_bracket(x, y))
    if b < 1e-3 * mb:
        z = np.concatenate([x, y]) / np.sqrt(mb)
        z = _polish(dec, z, iterations)
        x2, y2 = z[:n] / np.linalg.norm(z[:n]), z[n:] / np.linalg.norm(z[n:])
        b2, mb2 = np.linalg.norm(dec.bracket(x2, y2)), np.linalg.norm(dec.m_bracket(x2, y2))
        if mb2 > THETA_MIN and mb2 / max(b2, 1e-300) > mb / max(b, 1e-300):
            b, mb = b2, mb2
    ratio = float(mb / b) if b > 0 else float("inf")
    if ratio > DIVERGENCE_CAP:
        return ConstantEstimate(DIVERGENCE_CAP, True, ratio)
    return ConstantEstimate(ratio, False, ratio)


# -- classification ---------------------------------------------------------------------------------------

class Tag(str, enum.Enum):
    SYMMETRIC_PAIR = "SYMMETRIC_PAIR"
    COUNTEREXAMPLE_FOUND = "COUNTEREXAMPLE_FOUND"
    HOLDS_BY_CLASSIFICATION = "HOLDS_BY_CLASSIFICATION"
    NO_COUNTEREXAMPLE_FOUND = "NO_COUNTEREXAMPLE_FOUND"


@dataclass(frozen=True)
class Verdict:
    tag: Tag
    certificate: Certificate | None = None
    taxonomy: tuple | None = None
    c_estimate: ConstantEstimate | None = None
    budget: tuple = ()
    notes: tuple = ()


def _rank(model_or_space, sp=None) -> int:
    if isinstance(model_or_space, Subspace):
        if model_or_space.dim == 0:
            return 0
        model_or_space = LieAlgebraModel.from_subspace("sub", model_or_space)
    return model_or_space.rank if model_or_space.dim else 0


def is_full_rank(chain: Chain) -> bool:
    return _rank(chain.h) == _rank(chain.k) == _rank(chain.g)


def fullrank_conditions(chain: Chain) -> list:
    """Per simple ideal of g: which of (symmetric, ideal inside k, ideal-part of k inside h) hold."""
    out = []
    for I, typ in simple_ideals(chain.g).ideals:
        ki = intersect(I, chain.k.basis, tol=1e-7)
        hi = intersect(I, chain.h.basis, tol=1e-7)
        inside_k = chain.k.basis.contains_subspace(I, 1e-7)
        k_in_h = chain.h.basis.contains_subspace(ki, 1e-7)
        sym = ki.dim == 0 or is_symmetric_pair(ki, hi)
        out.append({"type": typ, "symmetric": sym, "ideal_in_k": inside_k, "k_part_in_h": k_in_h})
    return out


def is_regular_chain(chain: Chain) -> bool:
    return is_regular_subalgebra(chain.g, chain.h) and is_regular_subalgebra(chain.g, chain.k)


def _model(name, S: Subspace):
    return LieAlgebraModel.from_subspace(name, S)


def _is_long_sl2(gi: LieAlgebraModel, I: Subspace) -> bool:
    return abs(sl2_root_length(gi, I) - max_root_length(gi)) < 1e-6 * max_root_length(gi)


def taxonomy_labels(chain: Chain) -> tuple:
    """Cases of the regular-chain classification matched by each simple ideal of g."""
    labels = []
    for I, typ in simple_ideals(chain.g).ideals:
        gi = _model("gi", I)
        ki = intersect(I, chain.k.basis, tol=1e-7)
        hi = intersect(I, chain.h.basis, tol=1e-7)
        ktype = algebra_type(_model("ki", ki)) if ki.dim else ((), 0)
        htype = algebra_type(_model("hi", hi)) if hi.dim else ((), 0)
        cases = []
        if chain.k.basis.contains_subspace(I, 1e-7):
            cases.append(1)
        else:
            if ki.dim == 0 or is_symmetric_pair(ki, hi):
                cases.append(2)
            r = gi.rank
            if typ in (f"B{r}", "B2") and r >= 2:
                dn = ("A1", "A1") if r == 2 else ("A3",) if r == 3 else (f"D{r}",)
                an = ("A1",) if r == 2 else (f"A{r - 1}",)
                if ktype == (tuple(sorted(dn)), 0) and htype == (an, 0):
                    cases.append(3)
            if typ in (f"C{r}", "B2", "A1") and ki.dim:
                kideals = simple_ideals(_model("ki", ki)).ideals
                outside = [J for J, _ in kideals if not chain.h.basis.contains_subspace(J, 1e-7)]
                if len(outside) == 1 and outside[0].dim == 3 and _is_long_sl2(gi, outside[0]):
                    cases.append(4)
            if typ == "G2" and ktype == (("A1", "A1"), 0) and htype == (("A1",), 0):
                if _is_long_sl2(gi, hi):
                    cases.append(5)
        labels.append(tuple(cases) if cases else ("NONE",))
    return tuple(labels)


_CASE_NOTES = {
    3: "matches the so(2n+1) > so(2n) > su(n) case, proved to satisfy the condition",
    4: "matches the sp(n) case; the condition is conjectured there, not proved",
    5: "matches the g2 > so(4) > su(2) case, which satisfies the condition",
}


def classify_chain(chain: Chain, restarts: int = 200, iterations: int = 2000, seed: int = 0,
                   threads: int | None = None) -> Verdict:
    budget = (restarts, iterations)
    dec = decompose(chain)
    if is_symmetric_pair(chain.k, chain.h):
        return Verdict(Tag.SYMMETRIC_PAIR, budget=budget, notes=("[m, m] lies in h",))
    notes = []
    if is_full_rank(chain):
        conds = fullrank_conditions(chain)
        if all(c["symmetric"] or c["ideal_in_k"] or c["k_part_in_h"] for c in conds):
            return Verdict(Tag.HOLDS_BY_CLASSIFICATION, budget=budget,
                           notes=("full rank; every simple factor is symmetric, inside k, or meets k inside h",))
        notes.append("full rank with a non-symmetric factor: a counterexample must exist")
    cert = fullrank_construct(dec, seed=seed)
    if cert is not None:
        return Verdict(Tag.COUNTEREXAMPLE_FOUND, cert, budget=budget,
                       notes=tuple(notes + ["constructed from the involution root frames"]))
    taxonomy = taxonomy_labels(chain) if is_regular_chain(chain) else None
    outcome = search_counterexample_outcome(dec, restarts, iterations, seed, threads)
    if outcome.certificate is not None:
        return Verdict(Tag.COUNTEREXAMPLE_FOUND, outcome.certificate, taxonomy, budget=budget,
                       notes=tuple(notes + [f"found by search after {outcome.restarts_run} restarts"]))
    for cases in taxonomy or ():
        notes += [_CASE_NOTES[c] for c in cases if c in _CASE_NOTES]
    est = estimate_constant(dec, seed=seed, iterations=iterations)
    notes.append(f"no counterexample within {outcome.restarts_run} restarts; this is evidence, not a proof")
    return Verdict(Tag.NO_COUNTEREXAMPLE_FOUND, None, taxonomy, est, budget, tuple(notes))
