"""Existential quantifier elimination by expansion.

Each elimination removes the last existential ``x_i`` of the prefix, splits
every formula into its ``x_i = 0`` and ``x_i = 1`` cofactors, and gives the
two cofactors private copies of the universals quantified after ``x_i``.
After ``k`` steps the prefix is purely universal and the instance is true iff
the disjunction of the remaining formulas is a tautology.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

from .formula import EXISTS, FORALL, Clause, CnfMatrix, QbfInstance, QuantPrefix, lit_key

log = logging.getLogger(__name__)


class VarPool:
    """Allocates fresh variable ids and remembers where each copy came from.

    ``origin[v]`` is ``(original variable, tag)`` where ``tag`` holds one bit
    per eliminated existential that precedes the original variable, in prefix
    order.  Variables of the input map to themselves with an empty tag.
    """

    def __init__(self, start: int = 0):
        self.next_id = start
        self.origin: dict[int, tuple[int, str]] = {}

    def fresh(self, copy_of: int | None = None, bit: str = "") -> int:
        self.next_id += 1
        v = self.next_id
        if copy_of is not None:
            orig, tag = self.origin.get(copy_of, (copy_of, ""))
            self.origin[v] = (orig, bit + tag)
        return v

    def resolve(self, v: int) -> tuple[int, str]:
        return self.origin.get(v, (v, ""))


@dataclass(frozen=True)
class TautInstance:
    """Formulas over a common universe whose disjunction is tested for validity.

    ``provenance[i]`` is the bit-string of choices for the eliminated
    existentials (in prefix order) that produced ``formulas[i]``.
    """

    universe: tuple[int, ...]
    formulas: tuple[CnfMatrix, ...]
    provenance: tuple[str, ...] = ()
    d: int = 0
    existentials: tuple[int, ...] = ()
    origin: dict[int, tuple[int, str]] = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self) -> None:
        if not self.provenance:
            object.__setattr__(self, "provenance", ("",) * len(self.formulas))
        if len(self.provenance) != len(self.formulas):
            raise ValueError("provenance and formulas differ in length")
        if self.d == 0 and self.formulas:
            object.__setattr__(self, "d", max(f.width for f in self.formulas))

    @property
    def k(self) -> int:
        return len(self.existentials)

    def clause_count(self) -> int:
        return sum(len(f) for f in self.formulas)


def _cofactor(phi: CnfMatrix, var: int, b: bool, rename: dict[int, int]) -> CnfMatrix:
    # phi[var=b] followed by renaming of the trailing universals
    true_lit = var if b else -var
    false_lit = -true_lit
    out: dict[Clause, None] = {}
    get = rename.get
    for c in phi.clauses:
        if true_lit in c:
            continue
        lits = [get(lit, lit) for lit in c if lit != false_lit]
        if len(lits) > 1:
            lits.sort(key=lit_key)
        out[tuple(lits)] = None
    return CnfMatrix(tuple(out))


def _copy_trailing(prefix: QuantPrefix, pool: VarPool):
    entries = prefix.entries
    i = max((j for j, (q, _) in enumerate(entries) if q == EXISTS), default=None)
    if i is None:
        raise ValueError("prefix has no existential quantifier")
    var = entries[i][1]
    trailing = [v for _, v in entries[i + 1 :]]
    renames = []
    new_entries = list(entries[:i])
    for b in (0, 1):
        rename = {}
        for v in trailing:
            c = pool.fresh(copy_of=v, bit=str(b))
            rename[v] = c
            rename[-v] = -c
            new_entries.append((FORALL, c))
        renames.append(rename)
    return var, QuantPrefix(tuple(new_entries)), renames


def eliminate_last_existential(
    prefix: QuantPrefix, formulas: Sequence[CnfMatrix], pool: VarPool | None = None
) -> tuple[QuantPrefix, list[CnfMatrix]]:
    """One expansion step, without pruning.

    Returns the new prefix and ``[phi[x=0]^0, phi[x=1]^1 for phi in formulas]``.
    """
    if not formulas:
        raise ValueError("formula list is empty")
    if pool is None:
        pool = VarPool(max(prefix.variables(), default=0))
    var, new_prefix, renames = _copy_trailing(prefix, pool)
    out = []
    for phi in formulas:
        for b in (0, 1):
            out.append(_cofactor(phi, var, bool(b), renames[b]))
    _check_step(prefix, new_prefix, formulas, out)
    return new_prefix, out


def _check_step(prefix, new_prefix, before, after) -> None:
    assert len(new_prefix) <= 2 * len(prefix)
    assert len(after) <= 2 * len(before)
    assert len(new_prefix.existentials()) == len(prefix.existentials()) - 1
    if before:
        largest = max(len(f) for f in before)
        assert all(len(f) <= largest for f in after)


def expand_all(inst: QbfInstance, prune: bool = True, pool: VarPool | None = None) -> TautInstance:
    """Eliminate every existential, last first.

    With ``prune`` a constant-true formula ends the expansion (the result is a
    single empty formula, a trivial tautology) and constant-false formulas are
    dropped; an empty formula list then means the QBF is false.
    """
    if pool is None:
        pool = VarPool(inst.max_var())
    prefix = inst.prefix
    existentials = tuple(prefix.existentials())
    d = inst.d
    tagged: list[tuple[str, CnfMatrix]] = [("", inst.matrix)]

    if prune:
        tagged, verdict = _prune(tagged)
        if verdict is not None:
            return _constant(prefix, verdict, d, existentials, pool)

    while tagged and any(q == EXISTS for q, _ in prefix.entries):
        var, new_prefix, renames = _copy_trailing(prefix, pool)
        nxt = []
        for tag, phi in tagged:
            for b in (0, 1):
                nxt.append((str(b) + tag, _cofactor(phi, var, bool(b), renames[b])))
        _check_step(prefix, new_prefix, [f for _, f in tagged], [f for _, f in nxt])
        prefix = new_prefix
        tagged = nxt
        if prune:
            tagged, verdict = _prune(tagged)
            if verdict is not None:
                return _constant(prefix, verdict, d, existentials, pool)
        log.debug("eliminated x%d: %d formulas, %d variables", var, len(tagged), len(prefix))

    if any(q == EXISTS for q, _ in prefix.entries):
        # every branch pruned as false before all existentials were eliminated
        return _constant(prefix, False, d, existentials, pool)

    tagged.sort(key=lambda t: t[0])
    return TautInstance(
        universe=tuple(sorted(prefix.variables())),
        formulas=tuple(f for _, f in tagged),
        provenance=tuple(t for t, _ in tagged),
        d=d,
        existentials=existentials,
        origin=pool.origin,
    )


def _prune(tagged):
    kept = []
    for tag, phi in tagged:
        if phi.is_true:
            return [], True
        if not phi.is_false:
            kept.append((tag, phi))
    return kept, (False if not kept else None)


def _constant(prefix, verdict, d, existentials, pool) -> TautInstance:
    universe = tuple(sorted(v for q, v in prefix.entries if q == FORALL))
    formulas = (CnfMatrix(),) if verdict else ()
    return TautInstance(universe, formulas, ("",) * len(formulas), d, existentials, pool.origin)
