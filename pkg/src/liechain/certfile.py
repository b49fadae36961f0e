"""On-disk certificate format.

A certificate file is a JSON object with a fixed key order.  Floats are
written with :func:`repr`, which is the shortest decimal string that parses
back to the same double, so a load/dump cycle is bit-exact.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .criterion import Certificate, ChainDecomposition, Origin, verify_certificate

SCHEMA_VERSION = 1
FIELDS = (
    "schema_version", "chain_id", "basis_digest", "X_coeffs", "Y_coeffs",
    "residual_commutator", "m_bracket_norm", "tolerances", "seed", "origin", "created_at",
)


class CertificateFormatError(ValueError):
    """The file is not a well-formed certificate."""


class DigestMismatch(ValueError):
    """The certificate was written against a differently built p-basis."""


@dataclass(frozen=True)
class CertificateFile:
    chain_id: str
    basis_digest: str
    X_coeffs: tuple
    Y_coeffs: tuple
    residual_commutator: float
    m_bracket_norm: float
    tau_accept: float
    theta_min: float
    seed: int
    origin: str
    created_at: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds"))
    schema_version: int = SCHEMA_VERSION

    @classmethod
    def from_certificate(cls, cert: Certificate, dec: ChainDecomposition, created_at: str | None = None):
        kw = {} if created_at is None else {"created_at": created_at}
        return cls(
            chain_id=cert.chain_id, basis_digest=dec.digest,
            X_coeffs=tuple(float(v) for v in cert.x_coeffs),
            Y_coeffs=tuple(float(v) for v in cert.y_coeffs),
            residual_commutator=float(cert.residual), m_bracket_norm=float(cert.m_bracket_norm),
            tau_accept=float(cert.tau_accept), theta_min=float(cert.theta_min),
            seed=int(cert.seed), origin=Origin(cert.origin).value, **kw,
        )

    def to_json(self) -> str:
        return dumps(self)

    def verify(self, dec: ChainDecomposition) -> Certificate:
        """Re-check the pair against a freshly built decomposition.

        Raises :class:`DigestMismatch` before any arithmetic if the bases differ,
        and the usual rejection errors if the pair no longer qualifies.
        """
        if dec.digest != self.basis_digest:
            raise DigestMismatch(
                f"basis digest {self.basis_digest[:12]}... does not match chain "
                f"{dec.chain.id} ({dec.digest[:12]}...)")
        x, y = np.array(self.X_coeffs), np.array(self.Y_coeffs)
        if x.size != dec.dim_p or y.size != dec.dim_p:
            raise DigestMismatch(f"expected {dec.dim_p} coefficients, got {x.size} and {y.size}")
        return verify_certificate(dec, dec.element(x), dec.element(y), self.tau_accept,
                                  self.theta_min, self.seed, Origin(self.origin))


def _num(v: float) -> str:
    v = float(v)
    if not np.isfinite(v):
        raise CertificateFormatError(f"non-finite number {v!r}")
    return repr(v)


def dumps(c: CertificateFile) -> str:
    """Serialize with fixed field order; one coefficient array per line."""
    def arr(vals):
        return "[" + ", ".join(_num(v) for v in vals) + "]"

    lines = [
        f'  "schema_version": {int(c.schema_version)}',
        f'  "chain_id": {json.dumps(c.chain_id)}',
        f'  "basis_digest": {json.dumps(c.basis_digest)}',
        f'  "X_coeffs": {arr(c.X_coeffs)}',
        f'  "Y_coeffs": {arr(c.Y_coeffs)}',
        f'  "residual_commutator": {_num(c.residual_commutator)}',
        f'  "m_bracket_norm": {_num(c.m_bracket_norm)}',
        f'  "tolerances": {{"tau_accept": {_num(c.tau_accept)}, "theta_min": {_num(c.theta_min)}}}',
        f'  "seed": {int(c.seed)}',
        f'  "origin": {json.dumps(c.origin)}',
        f'  "created_at": {json.dumps(c.created_at)}',
    ]
    return "{\n" + ",\n".join(lines) + "\n}\n"


def loads(text: str) -> CertificateFile:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as e:
        raise CertificateFormatError(f"not valid JSON: {e}") from None
    if not isinstance(d, dict):
        raise CertificateFormatError("top level must be an object")
    missing = [k for k in FIELDS if k not in d]
    if missing:
        raise CertificateFormatError(f"missing fields: {', '.join(missing)}")
    if d["schema_version"] != SCHEMA_VERSION:
        raise CertificateFormatError(f"unsupported schema_version {d['schema_version']!r}")
    try:
        tol = d["tolerances"]
        return CertificateFile(
            chain_id=str(d["chain_id"]), basis_digest=str(d["basis_digest"]),
            X_coeffs=tuple(float(v) for v in d["X_coeffs"]),
            Y_coeffs=tuple(float(v) for v in d["Y_coeffs"]),
            residual_commutator=float(d["residual_commutator"]),
            m_bracket_norm=float(d["m_bracket_norm"]),
            tau_accept=float(tol["tau_accept"]), theta_min=float(tol["theta_min"]),
            seed=int(d["seed"]), origin=Origin(d["origin"]).value, created_at=str(d["created_at"]),
        )
    except (TypeError, KeyError, ValueError) as e:
        raise CertificateFormatError(f"malformed field: {e}") from None


def write(path: str | Path, c: CertificateFile) -> None:
    Path(path).write_bytes(dumps(c).encode("utf-8"))


def read(path: str | Path) -> CertificateFile:
    return loads(Path(path).read_bytes().decode("utf-8"))
