"""Run catalog chains through the classifier and tabulate the outcome."""
from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass

from .catalog import CATALOG, Expected, build_chain
from .criterion import Tag, Verdict, classify_chain

# which computed verdicts are compatible with each expectation tag
CONSISTENT = {
    Expected.FAILS: {Tag.COUNTEREXAMPLE_FOUND},
    Expected.SYMMETRIC_PAIR: {Tag.SYMMETRIC_PAIR},
    Expected.HOLDS_PROVED: {Tag.HOLDS_BY_CLASSIFICATION, Tag.NO_COUNTEREXAMPLE_FOUND},
    Expected.HOLDS_CONJECTURED: {Tag.NO_COUNTEREXAMPLE_FOUND},
}


def is_consistent(expected: Expected | str, computed: Tag | str) -> bool:
    return Tag(computed) in CONSISTENT[Expected(expected)]


def format_taxonomy(taxonomy) -> str:
    if taxonomy is None:
        return "-"
    return ";".join(",".join(str(c) for c in cases) for cases in taxonomy)


@dataclass(frozen=True)
class ReportRow:
    chain_id: str
    expected: str
    computed: str
    taxonomy: str
    value_kind: str  # "residual", "C_estimate" or "-"
    value: float | None
    divergent: bool
    consistent: bool
    seconds: float

    @classmethod
    def from_verdict(cls, chain_id: str, expected: Expected, v: Verdict, seconds: float) -> "ReportRow":
        kind, value, div = "-", None, False
        if v.certificate is not None:
            kind, value = "residual", float(v.certificate.residual)
        elif v.c_estimate is not None:
            kind, value, div = "C_estimate", float(v.c_estimate.value), bool(v.c_estimate.divergent)
        return cls(chain_id, expected.value, v.tag.value, format_taxonomy(v.taxonomy), kind, value,
                   div, is_consistent(expected, v.tag), round(seconds, 3))


def run_suite(ids=None, restarts: int = 64, iterations: int = 2000, seed: int = 0,
              threads: int | None = None, overrides: dict | None = None, progress=None) -> list:
    """Classify each chain; ``overrides`` replaces expectation tags by id."""
    overrides = overrides or {}
    specs = [s for s in CATALOG if ids is None or s.id in ids]
    rows = []
    for spec in specs:
        t0 = time.perf_counter()
        v = classify_chain(build_chain(spec.id), restarts, iterations, seed, threads)
        expected = Expected(overrides.get(spec.id, spec.expected))
        row = ReportRow.from_verdict(spec.id, expected, v, time.perf_counter() - t0)
        rows.append(row)
        if progress:
            progress(row)
    return rows


def _fmt_value(r: ReportRow) -> str:
    if r.value is None:
        return "-"
    s = f"{r.value:.3e}" if r.value_kind == "residual" else f"{r.value:.4f}"
    return f"{r.value_kind}={s}" + (" (divergent)" if r.divergent else "")


def to_markdown(rows: list) -> str:
    head = "| chain | expected | computed | taxonomy | value | consistent | time (s) |\n"
    head += "|---|---|---|---|---|---|---|\n"
    body = "".join(
        f"| {r.chain_id} | {r.expected} | {r.computed} | {r.taxonomy} | {_fmt_value(r)} | "
        f"{'yes' if r.consistent else 'NO'} | {r.seconds:.2f} |\n" for r in rows)
    n_ok = sum(r.consistent for r in rows)
    return head + body + f"\n{n_ok}/{len(rows)} rows consistent.\n"


def to_json(rows: list) -> str:
    return json.dumps([asdict(r) for r in rows], indent=2) + "\n"
