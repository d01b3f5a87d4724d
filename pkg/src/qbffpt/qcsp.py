"""Quantified CSP over finite domains, compiled to QBF by binary value codes.

Each CSP variable gets ``w`` Boolean bits carrying its quantifier, where ``w``
is ``ceil(log2)`` of the largest domain.  A codec maps the ``2^w`` codewords
onto the variable's domain; codewords past the end of the domain all decode
to the first value.  A constraint becomes one blocking clause per code tuple
whose decoded value tuple is not in its table.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import ceil, log2
from typing import Hashable, Sequence

from .formula import EXISTS, FORALL, Clause, CnfMatrix, QbfInstance, QuantPrefix, lit_key

Bits = tuple[int, ...]


@dataclass(frozen=True)
class QcspVariable:
    name: str
    quantifier: str
    domain: tuple[Hashable, ...]


@dataclass(frozen=True)
class Constraint:
    scope: tuple[int, ...]
    table: frozenset[tuple]


@dataclass(frozen=True)
class QcspInstance:
    variables: tuple[QcspVariable, ...]
    constraints: tuple[Constraint, ...] = ()

    def __post_init__(self) -> None:
        names = set()
        for x in self.variables:
            if x.quantifier not in (EXISTS, FORALL):
                raise ValueError(f"variable {x.name}: unknown quantifier {x.quantifier!r}")
            if not x.domain:
                raise ValueError(f"variable {x.name} has an empty domain")
            if len(set(x.domain)) != len(x.domain):
                raise ValueError(f"variable {x.name} repeats a domain value")
            if x.name in names:
                raise ValueError(f"variable {x.name} declared twice")
            names.add(x.name)
        for c in self.constraints:
            for i in c.scope:
                if not 0 <= i < len(self.variables):
                    raise ValueError(f"constraint scope refers to unknown variable {i}")
            for row in c.table:
                if len(row) != len(c.scope):
                    raise ValueError(f"tuple {row} does not match arity {len(c.scope)}")
                for i, value in zip(c.scope, row):
                    if value not in self.variables[i].domain:
                        raise ValueError(f"value {value!r} outside the domain of {self.variables[i].name}")

    @property
    def k(self) -> int:
        return sum(1 for x in self.variables if x.quantifier == EXISTS)

    def max_arity(self) -> int:
        return max((len(c.scope) for c in self.constraints), default=0)

    def max_domain(self) -> int:
        return max((len(x.domain) for x in self.variables), default=1)


def code_width(size: int) -> int:
    return ceil(log2(size)) if size > 1 else 0


class BitCodec:
    """Surjection from ``{0,1}^width`` onto ``domain``.

    Codeword ``c`` (bits read most significant first) decodes to
    ``domain[c]`` when ``c < len(domain)`` and to the overflow value
    ``domain[0]`` otherwise.
    """

    def __init__(self, domain: Sequence[Hashable], width: int | None = None):
        self.domain = tuple(domain)
        if not self.domain:
            raise ValueError("empty domain")
        self.width = code_width(len(self.domain)) if width is None else width
        if 2**self.width < len(self.domain):
            raise ValueError(f"width {self.width} cannot cover {len(self.domain)} values")
        self.overflow = self.domain[0]

    def decode(self, bits: Bits) -> Hashable:
        c = 0
        for b in bits:
            c = 2 * c + b
        return self.domain[c] if c < len(self.domain) else self.overflow

    def encode(self, value: Hashable) -> Bits:
        c = self.domain.index(value)
        return tuple((c >> (self.width - 1 - j)) & 1 for j in range(self.width))

    def codewords(self) -> list[Bits]:
        return list(itertools.product((0, 1), repeat=self.width))

    def preimage(self, value: Hashable) -> list[Bits]:
        return [w for w in self.codewords() if self.decode(w) == value]

    def __repr__(self) -> str:
        return f"BitCodec({self.domain!r}, width={self.width})"


def encode_relation(
    table: frozenset[tuple] | set[tuple],
    codecs: Sequence[BitCodec],
    bit_vars: Sequence[Sequence[int]] | None = None,
) -> list[Clause]:
    """Clauses admitting exactly the code tuples that decode into ``table``.

    ``bit_vars[p]`` are the Boolean variables of scope position ``p``; by
    default positions are numbered consecutively from 1.  Positions that
    share variables (a repeated scope variable) skip inconsistent code tuples.
    """
    if bit_vars is None:
        bit_vars, nxt = [], 1
        for codec in codecs:
            bit_vars.append(list(range(nxt, nxt + codec.width)))
            nxt += codec.width
    if not table:
        return [()]
    clauses: dict[Clause, None] = {}
    for words in itertools.product(*(codec.codewords() for codec in codecs)):
        if tuple(codec.decode(w) for codec, w in zip(codecs, words)) in table:
            continue
        lits: set[int] = set()
        consistent = True
        for vars_, w in zip(bit_vars, words):
            for v, bit in zip(vars_, w):
                lit = -v if bit else v
                if -lit in lits:
                    consistent = False
                    break
                lits.add(lit)
            if not consistent:
                break
        if consistent:
            clauses[tuple(sorted(lits, key=lit_key))] = None
    return list(clauses)


def codecs_for(inst: QcspInstance) -> tuple[int, list[BitCodec], list[list[int]]]:
    """Common width, one codec per variable, and each variable's bit ids."""
    width = code_width(inst.max_domain())
    codecs = [BitCodec(x.domain, width) for x in inst.variables]
    bits = [list(range(i * width + 1, i * width + width + 1)) for i in range(len(inst.variables))]
    return width, codecs, bits


def qcsp_to_qbf(inst: QcspInstance) -> QbfInstance:
    _, codecs, bits = codecs_for(inst)
    entries = [(x.quantifier, b) for x, vs in zip(inst.variables, bits) for b in vs]
    clauses: dict[Clause, None] = {}
    for c in inst.constraints:
        for cl in encode_relation(c.table, [codecs[i] for i in c.scope], [bits[i] for i in c.scope]):
            clauses[cl] = None
    for x, codec, vs in zip(inst.variables, codecs, bits):
        unary = frozenset((v,) for v in x.domain)
        for cl in encode_relation(unary, [codec], [vs]):
            clauses[cl] = None
    return QbfInstance(QuantPrefix(tuple(entries)), CnfMatrix(tuple(clauses)))


def qcsp_oracle(inst: QcspInstance, cap: int = 10**6) -> bool:
    """Truth value by enumerating domain values in prefix order."""
    total = 1
    for x in inst.variables:
        total *= len(x.domain)
    if total > cap:
        raise ValueError(f"{total} assignments exceed the cap of {cap}")
    by_last: list[list[Constraint]] = [[] for _ in range(len(inst.variables) + 1)]
    for c in inst.constraints:
        # check each constraint as soon as its whole scope is assigned
        by_last[max(c.scope, default=-1) + 1].append(c)
    values: list[Hashable] = []

    def holds(depth: int) -> bool:
        return all(tuple(values[i] for i in c.scope) in c.table for c in by_last[depth])

    def rec(i: int) -> bool:
        if not holds(i):
            return False
        if i == len(inst.variables):
            return True
        x = inst.variables[i]
        for v in x.domain:
            values.append(v)
            r = rec(i + 1)
            values.pop()
            if x.quantifier == EXISTS and r:
                return True
            if x.quantifier == FORALL and not r:
                return False
        return x.quantifier == FORALL

    return rec(0)
