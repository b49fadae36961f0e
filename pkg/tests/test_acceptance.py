"""Acceptance criteria 1-9, each at its stated tolerance and budget.

Each test records one PASS/FAIL line, printed in the terminal summary.
"""
import itertools
import time
from collections import Counter

import numpy as np

from liechain import cli
from liechain.algebra import space, sum_span
from liechain.catalog import parse_matrix
from liechain.criterion import (
    estimate_constant, fullrank_construct, is_symmetric_pair, ratio_squared,
    search_counterexample_outcome, verify_certificate,
)
from liechain.lie import LieAlgebraModel, direct_sum, make_classical, make_g2, unitary_in_so
from liechain.roots import rank2_span_type, root_decomposition, root_system_type

import oracles
import test_criterion
import test_invariants as inv
from conftest import dec_of, record

# stated [X^m, Y^m] (or its m-part) for each worked example, verbatim
STATED_BRACKETS = {
    "L4.1-1": ("full", "E13"),
    "L4.1-2": ("full", "-E12"),
    "L4.1-3": ("full", "-E12"),
    "L4.1-5a": ("m", "2jF22"),
    "L4.1-5b": ("m", "2jF22"),
    "T6.5-A2-su3": ("full", "2iF22 - 2iF33"),
    "T6.5-B2a-so5": ("full", "-E23"),
    "T6.5-B2b-so5": ("full", "-1/2 E24 + 1/2 E35"),
    "T6.5-sp2": (None, None),
}
# under the ij = k convention these come out with the opposite overall sign
SIGN_CONVENTION = {"L4.1-5a", "L4.1-5b"}


def test_criterion_1_worked_examples():
    decs = {cid: dec_of(cid) for cid in STATED_BRACKETS}
    t0 = time.perf_counter()
    problems, signs = [], {}
    for cid, (kind, stated) in STATED_BRACKETS.items():
        dec = decs[cid]
        sp = dec.space
        X, Y = dec.chain.worked_pair()
        c = verify_certificate(dec, X, Y)
        if c.raw_residual >= 1e-12:
            problems.append(f"{cid} residual {c.raw_residual:.1e}")
        if stated is None:
            continue
        full = sp.bracket(dec.project(X, "m").data, dec.project(Y, "m").data)
        got = full if kind == "full" else dec.project(full, "m").data
        want = parse_matrix(stated, sp).data
        if np.abs(got - want).max() < 1e-12:
            signs[cid] = "+"
        elif np.abs(got + want).max() < 1e-12:
            signs[cid] = "-"
        else:
            problems.append(f"{cid} bracket mismatch")
        xm, ym = dec.project(X, "m").data, dec.project(Y, "m").data
        if np.abs(oracles.bracket(xm, ym) - full).max() > 1e-12:
            problems.append(f"{cid} disagrees with the independent bracket")
    try:
        test_criterion.test_L41_5a_hand_oracle()
    except AssertionError as e:
        problems.append(f"5a hand oracle: {str(e).splitlines()[0]}")
    l411 = verify_certificate(decs["L4.1-1"], *decs["L4.1-1"].chain.worked_pair())
    if abs(l411.raw_m_bracket_norm - np.sqrt(2)) > 1e-12:
        problems.append("L4.1-1 norm")
    elapsed = time.perf_counter() - t0
    flipped = sorted(k for k, v in signs.items() if v == "-")
    if set(flipped) - SIGN_CONVENTION:
        problems.append(f"unexpected sign flips {sorted(set(flipped) - SIGN_CONVENTION)}")
    ok = not problems and elapsed < 1.0
    assert record(1, ok, f"{len(STATED_BRACKETS)} pairs, {elapsed:.3f}s, sign-flipped vs stated: {flipped or 'none'}"
                  + (f"; problems: {problems}" if problems else ""))


def _rows(x):
    return x.basis.basis if isinstance(x, LieAlgebraModel) else x.basis


def _sym_cases():
    R6, H3, C3 = space("R", 6), space("H", 3), space("C", 3)
    out = []
    for n in (2, 3):
        out.append((f"(so({2 * n}), u({n}))", make_classical("so", 2 * n), unitary_in_so(n), True))
    for n in (3, 4, 5):
        out.append((f"(so({n + 1}), so({n}))", make_classical("so", n + 1),
                    direct_sum("so", [("so", n, 0)], space("R", n + 1)), True))
    k = direct_sum("sp2+sp1", [("sp", 2, 0), ("sp", 1, 2)], H3)
    out.append(("(sp(2)+sp(1), u(2)+sp(1))", k, direct_sum("u2+sp1", [("u", 2, 0), ("sp", 1, 2)], H3), True))
    su3 = make_classical("su", 3)
    out.append(("(su(3), t2)", su3, su3.torus, False))
    u2 = unitary_in_so(2, space=R6).basis
    so2 = direct_sum("so2", [("so", 2, 4)], R6).basis
    out.append(("(so(6), u(2)+so(2))", make_classical("so", 6), sum_span(u2, so2), False))
    out.append(("(sp(2)+sp(1), sp(1)+u(1)+sp(1))", k,
                direct_sum("h", [("sp", 1, 0), ("t", 1, 1), ("sp", 1, 2)], H3), False))
    out.append(("(u(3), t3)", make_classical("u", 3), direct_sum("t3", [("t", 3, 0)], C3), False))
    return out


def test_criterion_2_symmetric_pairs():
    cases = _sym_cases()
    agree = 0
    for name, k, h, expected in cases:
        got = is_symmetric_pair(k, h)
        kr, hr = _rows(k), _rows(h)
        brute = oracles.brackets_close_in(k.space.shape, oracles.complement_basis(hr, kr), hr)
        agree += got == brute == expected
    ok = agree == len(cases)
    assert record(2, ok, f"{agree}/{len(cases)} pairs agree with the brute-force bracket oracle")


def test_criterion_3_fullrank_construction():
    ids = ["C3.3-1-min", "C3.3-2-min", "C3.3-3-min", "C3.3-4-min"]
    t0 = time.perf_counter()
    results = []
    for cid in ids:
        dec = dec_of(cid)
        a, b = fullrank_construct(dec), fullrank_construct(dec)
        results.append(a is not None and b is not None and a.raw_residual < 1e-9 and a.residual < 1e-9
                       and a.m_bracket_norm > 1e-3 and np.array_equal(a.x_coeffs, b.x_coeffs)
                       and np.array_equal(a.y_coeffs, b.y_coeffs))
    elapsed = time.perf_counter() - t0
    ok = all(results) and elapsed < 10
    assert record(3, ok, f"{sum(results)}/4 constructed and deterministic, {elapsed:.2f}s")


def test_criterion_4_search_on_failing_chains():
    ids = ["L4.1-1", "L4.1-2", "L4.1-3", "L4.1-4", "L4.1-5a", "L4.1-5b", "L4.1-6", "T6.5-sp2"]
    t0 = time.perf_counter()
    found = []
    for cid in ids:
        dec = dec_of(cid)
        out = search_counterexample_outcome(dec, restarts=200, iterations=2000, seed=0)
        c = out.certificate
        good = c is not None and verify_certificate(dec, c.X, c.Y).residual <= 1e-8
        found.append(good)
    elapsed = time.perf_counter() - t0
    ok = all(found) and elapsed < 300
    assert record(4, ok, f"{sum(found)}/{len(ids)} certificates, {elapsed:.1f}s")


def test_criterion_5_holding_chains():
    dec = dec_of("T5.1-n2")
    rng = np.random.default_rng(5)
    x, y = rng.standard_normal((2, 100_000, dec.dim_p))
    sampled = float(ratio_squared(dec, x, y).max())
    est = estimate_constant(dec, restarts=100, seed=0)
    optimized = est.value ** 2
    objs = {}
    for cid in ("T5.1-n2", "T5.1-n3"):
        out = search_counterexample_outcome(dec_of(cid), restarts=200, iterations=2000, seed=0)
        objs[cid] = (out.certificate, out.best_objective)
    ok = (sampled <= 2.001 and optimized <= 2.001 and not est.divergent
          and all(c is None and m >= 1e-4 for c, m in objs.values()))
    detail = (f"max ratio^2 sampled {sampled:.6f}, optimized {optimized:.6f}; "
              + ", ".join(f"{k}: {'NONE' if c is None else 'FOUND'} min objective {m:.6f}" for k, (c, m) in objs.items()))
    assert record(5, ok, detail)


_ROOT_EXPECT = {"so5": (4, "B2"), "su3": (3, "A2"), "su4": (6, "A3"), "so7": (9, "B3"), "sp3": (9, "C3"), "g2": (6, "G2")}


def _algebra(name):
    return make_g2() if name == "g2" else make_classical(name[:-1], int(name[-1]))


def test_criterion_6_root_machinery():
    bad = []
    data = {}
    for name, (count, typ) in _ROOT_EXPECT.items():
        g = _algebra(name)
        rd = root_decomposition(g, g.torus)
        data[name] = rd
        if rd.n_positive != count or root_system_type(rd) != typ:
            bad.append(f"{name}: {rd.n_positive} {root_system_type(rd)}")
    for name in ("so7", "sp3", "su4", "g2"):
        rd = data[name]
        got = Counter(rank2_span_type(rd, a, b) for a, b in itertools.combinations(range(rd.n_positive), 2))
        if got != oracles.abstract_pair_types(name):
            bad.append(f"{name} rank-2 types {dict(got)}")
    assert record(6, not bad, "counts, types and rank-2 span types exact" if not bad else str(bad))


def _params(marker_name, func):
    for mark in getattr(func, "pytestmark", []):
        if mark.name == "parametrize":
            return [p.values[0] if hasattr(p, "values") else p for p in mark.args[1]]
    return [None]


def test_criterion_7_invariant_suites():
    suites = [
        ("jacobi", inv.test_jacobi), ("ad-invariance", inv.test_ad_invariance_and_closure),
        ("frame relations", inv.test_frame_relations), ("rotation trick", inv.test_rotation_trick),
        ("projection", inv.test_projection_identities), ("rank<=2 s-brackets", inv.test_s_brackets_have_rank_two),
        ("transfer soundness", inv.test_transfer_soundness), ("symmetric guard", inv.test_symmetric_guard),
    ]
    failures, runs = [], 0
    try:
        inv.test_scale_equivariance()
    except AssertionError as e:
        failures.append(f"scale equivariance: {str(e).splitlines()[0]}")
    runs += 1
    for name, fn in suites:
        for p in _params(name, fn):
            rng = np.random.default_rng(777)
            try:
                fn(rng) if p is None else fn(p, rng)
            except AssertionError as e:
                failures.append(f"{name}[{p}]: {str(e).splitlines()[0]}")
            runs += 1
    ok = not failures
    assert record(7, ok, f"{runs} suite runs x {inv.DRAWS} draws, {len(failures)} failures"
                  + (f": {failures[:3]}" if failures else ""))


def test_criterion_8_conjecture_experiment():
    values, nones = {}, {}
    for cid in ("CONJ-sp-n2", "CONJ-sp-n3"):
        dec = dec_of(cid)
        out = search_counterexample_outcome(dec, restarts=200, iterations=2000, seed=0)
        nones[cid] = out.certificate is None
        values[cid] = [estimate_constant(dec, seed=s).value for s in range(5)]
    stable = {cid: (max(v) - min(v)) <= 0.1 * min(v) for cid, v in values.items()}
    ok = all(nones.values()) and all(stable.values())
    detail = "; ".join(f"{cid}: search {'NONE' if nones[cid] else 'FOUND'}, C estimates "
                       f"{[round(x, 6) for x in v]}" for cid, v in values.items())
    assert record(8, ok, detail + " (recorded, conjecture not asserted)")


def test_criterion_9_reproduction_suite(tmp_path):
    out = tmp_path / "report.md"
    t0 = time.perf_counter()
    code = cli.main(["report", "--suite", "paper", "--out", str(out), "--quiet"])
    text = out.read_text("utf-8")
    summary = text.strip().splitlines()[-1]
    assert record(9, code == 0, f"exit {code}, {summary} ({time.perf_counter() - t0:.0f}s)")
