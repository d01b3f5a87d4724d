"""Literals, clauses, CNF matrices and quantifier prefixes.

Literals are DIMACS-style signed integers: ``v`` is the positive literal of
variable ``v`` and ``-v`` its negation.  A clause is a tuple of literals in
canonical order (by variable, positive before negative) so that structural
equality is plain tuple equality.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

Clause = tuple[int, ...]

EXISTS = "e"
FORALL = "a"


class FormulaError(ValueError):
    """Raised when a clause, matrix or prefix violates its invariants."""


def lit_key(lit: int) -> tuple[int, bool]:
    return (abs(lit), lit < 0)


def make_clause(lits: Iterable[int]) -> Clause:
    """Validate and canonicalize a literal collection into a clause.

    Duplicate literals and complementary pairs are rejected, as is the
    literal 0.
    """
    lits = list(lits)
    seen: set[int] = set()
    for lit in lits:
        if not isinstance(lit, int) or lit == 0:
            raise FormulaError(f"invalid literal {lit!r}")
        if lit in seen:
            raise FormulaError(f"literal {lit} occurs twice")
        if -lit in seen:
            raise FormulaError(f"clause contains {abs(lit)} with both polarities")
        seen.add(lit)
    return tuple(sorted(lits, key=lit_key))


def clash(c1: Clause, c2: Clause) -> bool:
    """True iff the clauses contain a pair of opposite literals."""
    if len(c1) > len(c2):
        c1, c2 = c2, c1
    if not c1:
        return False
    other = set(c2)
    return any(-lit in other for lit in c1)


@dataclass(frozen=True)
class CnfMatrix:
    """An ordered set of clauses.

    The empty matrix is constant true; a matrix holding the empty clause is
    constant false.  Construct through :meth:`from_clauses` unless the clauses
    are already canonical and distinct.
    """

    clauses: tuple[Clause, ...] = ()
    width: int = field(init=False, compare=False, repr=False)
    has_empty_clause: bool = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        width = 0
        empty = False
        for c in self.clauses:
            n = len(c)
            if n > width:
                width = n
            elif n == 0:
                empty = True
        object.__setattr__(self, "width", width)
        object.__setattr__(self, "has_empty_clause", empty)

    @classmethod
    def from_clauses(cls, clauses: Iterable[Iterable[int]]) -> "CnfMatrix":
        """Canonicalize every clause and drop repeats, keeping first occurrence."""
        return cls(tuple(dict.fromkeys(make_clause(c) for c in clauses)))

    def __len__(self) -> int:
        return len(self.clauses)

    def __iter__(self) -> Iterator[Clause]:
        return iter(self.clauses)

    @property
    def is_true(self) -> bool:
        return not self.clauses

    @property
    def is_false(self) -> bool:
        return self.has_empty_clause

    def variables(self) -> set[int]:
        return {abs(lit) for c in self.clauses for lit in c}

    def size(self) -> int:
        """Total number of literal occurrences."""
        return sum(len(c) for c in self.clauses)

    def validate(self) -> None:
        seen = set()
        for c in self.clauses:
            if make_clause(c) != c:
                raise FormulaError(f"clause {c} is not canonical")
            if c in seen:
                raise FormulaError(f"clause {c} is repeated")
            seen.add(c)


def assign(m: CnfMatrix, v: int, b: bool) -> CnfMatrix:
    """Simplify ``m`` under ``v = b``.

    Clauses satisfied by the assignment are removed and the falsified literal
    is deleted from the rest.  Clauses that become equal are merged.
    """
    true_lit = v if b else -v
    false_lit = -true_lit
    out: dict[Clause, None] = {}
    for c in m.clauses:
        if true_lit in c:
            continue
        if false_lit in c:
            c = tuple(lit for lit in c if lit != false_lit)
        out[c] = None
    return CnfMatrix(tuple(out))


def evaluate(m: CnfMatrix, a: Mapping[int, bool]) -> bool:
    missing = m.variables() - a.keys()
    if missing:
        raise FormulaError(f"assignment leaves variables {sorted(missing)} unset")
    return all(any(a[lit] if lit > 0 else not a[-lit] for lit in c) for c in m.clauses)


@dataclass(frozen=True)
class QuantPrefix:
    """Quantifier prefix as ``(quantifier, variable)`` pairs in order."""

    entries: tuple[tuple[str, int], ...] = ()

    def __post_init__(self) -> None:
        seen = set()
        for q, v in self.entries:
            if q not in (EXISTS, FORALL):
                raise FormulaError(f"unknown quantifier {q!r}")
            if not isinstance(v, int) or v < 1:
                raise FormulaError(f"invalid variable {v!r}")
            if v in seen:
                raise FormulaError(f"variable {v} quantified twice")
            seen.add(v)

    @classmethod
    def of(cls, *blocks: tuple[str, Iterable[int]]) -> "QuantPrefix":
        """``QuantPrefix.of(("a", [1, 2]), ("e", [3]))``"""
        return cls(tuple((q, v) for q, vs in blocks for v in vs))

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def variables(self) -> list[int]:
        return [v for _, v in self.entries]

    def existentials(self) -> list[int]:
        return [v for q, v in self.entries if q == EXISTS]

    def universals(self) -> list[int]:
        return [v for q, v in self.entries if q == FORALL]

    def blocks(self) -> list[tuple[str, list[int]]]:
        """Maximal runs of equal quantifiers."""
        out: list[tuple[str, list[int]]] = []
        for q, v in self.entries:
            if out and out[-1][0] == q:
                out[-1][1].append(v)
            else:
                out.append((q, [v]))
        return out


@dataclass(frozen=True)
class QbfInstance:
    prefix: QuantPrefix
    matrix: CnfMatrix

    def __post_init__(self) -> None:
        free = self.matrix.variables() - set(self.prefix.variables())
        if free:
            raise FormulaError(f"free variables {sorted(free)} are not quantified")

    @classmethod
    def build(cls, blocks: Iterable[tuple[str, Iterable[int]]], clauses: Iterable[Iterable[int]]) -> "QbfInstance":
        return cls(QuantPrefix.of(*blocks), CnfMatrix.from_clauses(clauses))

    @property
    def k(self) -> int:
        return len(self.prefix.existentials())

    @property
    def d(self) -> int:
        return self.matrix.width

    @property
    def n(self) -> int:
        return len(self.prefix)

    def max_var(self) -> int:
        return max(self.prefix.variables(), default=0)
