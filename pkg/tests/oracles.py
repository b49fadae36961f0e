"""Reference computations that avoid the package's own arithmetic.

Quaternion matrices go through the 2n x 2n complex representation
``a + bi + (c + di)j  ->  [[a + bi, c + di], [-c + di, a - bi]]``, real and
complex matrices through numpy's complex dtype.
"""
import itertools
from collections import Counter

import numpy as np


def to_complex(data: np.ndarray) -> np.ndarray:
    """Complex matrix for a component-layout array of shape (n, n, c)."""
    c = data.shape[-1]
    if c == 1:
        return data[..., 0].astype(complex)
    if c == 2:
        return data[..., 0] + 1j * data[..., 1]
    z = data[..., 0] + 1j * data[..., 1]
    w = data[..., 2] + 1j * data[..., 3]
    return np.block([[z, w], [-w.conj(), z.conj()]])


def from_complex(M: np.ndarray, c: int) -> np.ndarray:
    if c == 1:
        return M.real[..., None]
    if c == 2:
        return np.stack([M.real, M.imag], axis=-1)
    n = M.shape[0] // 2
    z, w = M[:n, :n], M[:n, n:]
    return np.stack([z.real, z.imag, w.real, w.imag], axis=-1)


def bracket(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    a, b = to_complex(A), to_complex(B)
    return from_complex(a @ b - b @ a, A.shape[-1])


def quat_mul(p, q):
    """Hamilton product written out by hand, ij = k."""
    a1, b1, c1, d1 = p
    a2, b2, c2, d2 = q
    return np.array([
        a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
        a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
        a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
        a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
    ])


def complement_basis(sub: np.ndarray, big: np.ndarray) -> np.ndarray:
    """Orthonormal rows spanning ``big`` minus ``sub`` (both given as row spans), via QR."""
    P = np.eye(big.shape[1]) - sub.T @ np.linalg.pinv(sub.T) if sub.size else np.eye(big.shape[1])
    R = big @ P
    U, s, Vt = np.linalg.svd(R, full_matrices=False)
    return Vt[: int(np.sum(s > 1e-8 * max(s.max(), 1)))]


def brackets_close_in(shape, m_rows: np.ndarray, h_rows: np.ndarray, tol=1e-9) -> bool:
    """Brute force: every [m_i, m_j] lies in span(h)."""
    Ph = h_rows.T @ np.linalg.pinv(h_rows.T) if h_rows.size else np.zeros((m_rows.shape[1],) * 2)
    for u in m_rows:
        for v in m_rows:
            b = bracket(u.reshape(shape), v.reshape(shape)).reshape(-1)
            if np.linalg.norm(b - Ph @ b) > tol:
                return False
    return True


def count_positive_roots(basis: np.ndarray, shape, torus: np.ndarray, seed=0) -> int:
    """Distinct nonzero eigenvalues of ad(H) for a generic torus element, halved."""
    rng = np.random.default_rng(seed)
    H = (rng.standard_normal(torus.shape[0]) @ torus).reshape(shape)
    ad = np.array([np.linalg.lstsq(basis.T, bracket(H, b.reshape(shape)).reshape(-1), rcond=None)[0]
                   for b in basis]).T
    ev = np.linalg.eigvals(ad).imag
    nz = np.sort(ev[np.abs(ev) > 1e-6])
    distinct = 1 + int(np.sum(np.diff(nz) > 1e-6)) if nz.size else 0
    return distinct // 2


# abstract root systems in epsilon coordinates

def abstract(name):
    e = np.eye(4)
    if name == "su4":
        return [e[i] - e[j] for i in range(4) for j in range(4) if i != j]
    e = np.eye(3)
    pm = [s * e[i] + t * e[j] for i in range(3) for j in range(i + 1, 3) for s in (1, -1) for t in (1, -1)]
    if name == "so7":
        return pm + [s * e[i] for i in range(3) for s in (1, -1)]
    if name == "sp3":
        return pm + [2 * s * e[i] for i in range(3) for s in (1, -1)]
    if name == "g2":
        short = [e[i] - e[j] for i in range(3) for j in range(3) if i != j]
        long_ = [s * (2 * e[i] - e[(i + 1) % 3] - e[(i + 2) % 3]) for i in range(3) for s in (1, -1)]
        return short + long_
    raise KeyError(name)


def abstract_pair_types(name):
    R = [np.asarray(r, float) for r in abstract(name)]
    v = np.array([1.0, 1 / np.pi, 1 / np.pi ** 2, 1 / np.pi ** 3])[: len(R[0])]
    pos = [r for r in R if r @ v > 0]
    out = Counter()
    for a, b in itertools.combinations(pos, 2):
        if np.linalg.matrix_rank(np.vstack([a, b])) < 2:
            continue
        span = [r for r in R if any(np.allclose(r, p * a + q * b)
                                    for p in range(-3, 4) for q in range(-3, 4))]
        L = [np.linalg.norm(r) for r in span]
        ratio = max(L) / min(L)
        t = ("A2" if len(span) == 6 and np.isclose(ratio, 1) else
             "B2" if len(span) == 8 and np.isclose(ratio, np.sqrt(2)) else
             "G2" if len(span) == 12 and np.isclose(ratio, np.sqrt(3)) else "REDUCIBLE")
        out[t] += 1
    return out
