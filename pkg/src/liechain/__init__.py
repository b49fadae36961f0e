"""Numerical toolkit for the Schwachhöfer–Tapp curvature criterion on chains h < k < g
of compact matrix Lie algebras."""
from .algebra import Field, MatrixElement, MatrixSpace, Subspace, StructuralError
from .catalog import Chain, Expected, build_chain, list_catalog
from .criterion import (
    Certificate, ChainDecomposition, Tag, Verdict, classify_chain, decompose,
    estimate_constant, fullrank_construct, is_symmetric_pair, metric_gt,
    search_counterexample, transfer_certificate, verify_certificate,
)
from .lie import LieAlgebraModel
from .roots import RootDatum, root_decomposition

__version__ = "0.1.0"

__all__ = [
    "Certificate", "Chain", "ChainDecomposition", "Expected", "Field", "LieAlgebraModel",
    "MatrixElement", "MatrixSpace", "RootDatum", "StructuralError", "Subspace", "Tag", "Verdict",
    "build_chain", "classify_chain", "decompose", "estimate_constant", "fullrank_construct",
    "is_symmetric_pair", "list_catalog", "metric_gt", "root_decomposition", "search_counterexample",
    "transfer_certificate", "verify_certificate",
]
