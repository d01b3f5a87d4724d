"""Fixed-parameter QBF solving in the number of existential variables.

The pipeline expands a prenex CNF into a tautology problem over copies of the
universal variables, recasts it as an independent-set problem on a
multipartite clause graph, shrinks each part with sunflowers and searches the
remaining graph.
"""

__version__ = "0.1.0"

from .clause_graph import ClauseGraph, build_cgis, extract_countermodel, is_independent
from .expansion import TautInstance, VarPool, eliminate_last_existential, expand_all
from .formats import (
    ParseDiagnostic,
    ParseError,
    dump_cgis,
    dump_qcsp,
    dump_taut,
    parse_cgis,
    parse_qcsp,
    parse_qdimacs,
    parse_taut,
    serialize_qdimacs,
)
from .formula import EXISTS, FORALL, CnfMatrix, FormulaError, QbfInstance, QuantPrefix, make_clause
from .kernel import PAPER, SAFE, KernelReport, Sunflower, find_sunflower, kernelize, size_bound, threshold
from .qcsp import BitCodec, Constraint, QcspInstance, QcspVariable, qcsp_oracle, qcsp_to_qbf
from .search import Budget, BudgetExceeded, Countermodel, Verdict, check_countermodel, oracle_eval, solve

__all__ = [name for name in dir() if not name.startswith("_")]
