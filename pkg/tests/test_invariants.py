"""Randomized invariant suites; every check uses at least 1000 draws."""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from liechain.catalog import CATALOG, build_chain
from liechain.criterion import is_symmetric_pair, search_counterexample, transfer_certificate, verify_certificate
from liechain.lie import make_classical, make_g2
from liechain.roots import frame_relation_residual, root_decomposition

from conftest import dec_of

DRAWS = 1000
TOL = 1e-9


def _algebras():
    seen, out = set(), []
    for spec in CATALOG:
        ch = build_chain(spec.id)
        for name, alg in (("g", ch.g), ("k", ch.k), ("h", ch.h)):
            if alg is None or alg.dim == 0:
                continue
            key = (ch.space, alg.dim, round(float(np.abs(alg.basis.basis).sum()), 6))
            if key not in seen:
                seen.add(key)
                out.append(pytest.param(alg, id=f"{spec.id}:{name}"))
    return out


ALGEBRAS = _algebras()


def _draw(alg, rng, k):
    return rng.standard_normal((k, DRAWS, alg.dim)) @ alg.basis.basis


@pytest.mark.parametrize("alg", ALGEBRAS)
def test_jacobi(alg, rng):
    A, B, C = _draw(alg, rng, 3)
    br = alg.space.bracket_flat
    J = br(br(A, B), C) + br(br(B, C), A) + br(br(C, A), B)
    scale = np.linalg.norm(A, axis=1) * np.linalg.norm(B, axis=1) * np.linalg.norm(C, axis=1)
    assert np.max(np.linalg.norm(J, axis=1) / scale) < TOL


@pytest.mark.parametrize("alg", ALGEBRAS)
def test_ad_invariance_and_closure(alg, rng):
    A, B, C = _draw(alg, rng, 3)
    br = alg.space.bracket_flat
    lhs = np.sum(br(C, A) * B, axis=1) + np.sum(A * br(C, B), axis=1)
    scale = np.linalg.norm(A, axis=1) * np.linalg.norm(B, axis=1) * np.linalg.norm(C, axis=1)
    assert np.max(np.abs(lhs) / scale) < TOL
    AB = br(A, B)
    res = AB - (AB @ alg.basis.basis.T) @ alg.basis.basis
    assert np.max(np.linalg.norm(res, axis=1) / (np.linalg.norm(A, axis=1) * np.linalg.norm(B, axis=1))) < TOL


@pytest.mark.parametrize("cid", ["L4.1-1", "L4.1-5a", "T6.5-sp2", "ST-g2-so7-so9", "CONJ-sp-n3"])
def test_projection_identities(cid, rng):
    dec = dec_of(cid)
    V = rng.standard_normal((DRAWS, dec.space.real_dim))
    for S in (dec.h, dec.m, dec.s, dec.p):
        comp = V @ S.basis.T @ S.basis
        res = V - comp
        assert np.abs(np.sum(comp * res, axis=1)).max() < 1e-12 * np.sum(V * V, axis=1).max()
        np.testing.assert_allclose(comp @ S.basis.T @ S.basis, comp, atol=1e-12)
    P = V @ dec.p.basis.T @ dec.p.basis
    split = sum(P @ S.basis.T @ S.basis for S in (dec.m, dec.s))
    np.testing.assert_allclose(split, P, atol=1e-12)


_ROOT_ALGEBRAS = {"so5": lambda: make_classical("so", 5), "su3": lambda: make_classical("su", 3),
                  "su4": lambda: make_classical("su", 4), "so7": lambda: make_classical("so", 7),
                  "sp3": lambda: make_classical("sp", 3), "g2": make_g2}


@pytest.mark.parametrize("name", sorted(_ROOT_ALGEBRAS))
def test_frame_relations(name, rng):
    g = _ROOT_ALGEBRAS[name]()
    rd = root_decomposition(g, g.torus)
    worst = 0.0
    for _ in range(DRAWS):
        H = rng.standard_normal(rd.rank) @ rd.torus.basis
        worst = max(worst, frame_relation_residual(rd, H) / np.linalg.norm(H))
    assert worst < 1e-8


@pytest.mark.parametrize("cid", ["L4.1-1", "L4.1-5a", "T5.1-n3", "T6.5-B2b-so5"])
def test_rotation_trick(cid, rng):
    dec = dec_of(cid)
    x, y = rng.standard_normal((2, DRAWS, dec.dim_p))
    t = rng.uniform(0, 2 * np.pi, (DRAWS, 1))
    xr, yr = np.cos(t) * x + np.sin(t) * y, np.cos(t) * y - np.sin(t) * x
    scale = (np.linalg.norm(x, axis=1) * np.linalg.norm(y, axis=1))[:, None]
    assert np.abs((dec.bracket(xr, yr) - dec.bracket(x, y)) / scale).max() < TOL
    assert np.abs((dec.m_bracket(xr, yr) - dec.m_bracket(x, y)) / scale).max() < TOL


ODD_ORTHOGONAL = ["T5.1-n2", "T5.1-n3", "SYM-u2-so4-so5", "SYM-u3-so6-so7", "SYM-so3-so4-so5", "L4.1-2",
                  "L4.1-2-t3"]


@pytest.mark.parametrize("cid", ODD_ORTHOGONAL)
def test_s_brackets_have_rank_two(cid, rng):
    dec = dec_of(cid)
    sp = dec.space
    N = sp.n
    xs, ys = rng.standard_normal((2, DRAWS, dec.s.dim)) @ dec.s.basis
    B = sp.bracket_flat(xs, ys).reshape(DRAWS, N, N)
    X, Y = xs.reshape(DRAWS, N, N), ys.reshape(DRAWS, N, N)
    x, y = X[:, : N - 1, N - 1], Y[:, : N - 1, N - 1]
    S = np.einsum("da,db->dab", y, x) - np.einsum("da,db->dab", x, y)
    scale = (np.linalg.norm(x, axis=1) * np.linalg.norm(y, axis=1))[:, None, None]
    assert np.abs((B[:, : N - 1, : N - 1] - S) / scale).max() < TOL
    sv = np.linalg.svd(B, compute_uv=False)
    assert (sv[:, 2] / scale[:, 0, 0]).max() < TOL


@pytest.mark.parametrize("cid", [s.id for s in CATALOG if s.expected.value == "SYMMETRIC_PAIR"])
def test_symmetric_guard(cid, rng):
    dec = dec_of(cid)
    ch = dec.chain
    assert is_symmetric_pair(ch.k, ch.h)
    x, y = rng.standard_normal((2, DRAWS, dec.dim_p))
    assert np.linalg.norm(dec.m_bracket(x, y), axis=1).max() < TOL


def test_transfer_soundness(rng):
    """Certificates moved along a natural sub-chain keep both numbers exactly."""
    sub, sup = dec_of("L4.1-2b-so6"), dec_of("L4.1-2b-so7")
    base = search_counterexample(sub, restarts=8)
    hb = sub.h.basis
    sp = sub.space
    worst = 0.0
    for _ in range(DRAWS):
        # Ad(exp h) and a frame rotation both map certificates to certificates
        Hm = (rng.standard_normal(hb.shape[0]) @ hb).reshape(sp.n, sp.n)
        g = expm(Hm)
        t = rng.uniform(0, 2 * np.pi)
        X0 = g @ base.X.data[..., 0] @ g.T
        Y0 = g @ base.Y.data[..., 0] @ g.T
        X, Y = np.cos(t) * X0 + np.sin(t) * Y0, np.cos(t) * Y0 - np.sin(t) * X0
        c = verify_certificate(sub, X.reshape(-1), Y.reshape(-1))
        tc = transfer_certificate(sub, sup, c)
        worst = max(worst, abs(tc.residual - c.residual), abs(tc.m_bracket_norm - c.m_bracket_norm))
    assert worst < 1e-12


@settings(max_examples=200, deadline=None)
@given(st.floats(1e-3, 1e3), st.floats(1e-3, 1e3))
def test_scale_equivariance(a, b):
    dec = dec_of("L4.1-3")
    X, Y = dec.chain.worked_pair()
    c = verify_certificate(dec, a * X, b * Y)
    assert c.residual < 1e-12 and abs(c.m_bracket_norm - 0.25) < 1e-12  # |-E12| / (|X| |Y|) = 1 / 4
