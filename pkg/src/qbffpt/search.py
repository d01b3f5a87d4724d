"""Deciding QBF instances: semantic oracle, XP search and the kernel pipeline."""

from __future__ import annotations

import itertools
import logging
import time
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .clause_graph import ClauseGraph, Selection, build_cgis, extract_countermodel
from .expansion import TautInstance, VarPool, expand_all
from .formula import EXISTS, CnfMatrix, QbfInstance, assign, evaluate
from .kernel import SAFE, kernelize

log = logging.getLogger(__name__)

METHODS = ("fpt", "xp", "oracle", "auto")
ORACLE_MAX_VARS = 20


class BudgetExceeded(RuntimeError):
    """A resource cap was hit before the instance was decided."""

    def __init__(self, which: str, detail: str = ""):
        super().__init__(f"budget {which} exceeded" + (f": {detail}" if detail else ""))
        self.which = which


@dataclass(frozen=True)
class Budget:
    max_parts: int | None = None
    max_clauses: int | None = None
    max_seconds: float | None = None

    def __post_init__(self) -> None:
        for name in ("max_parts", "max_clauses", "max_seconds"):
            value = getattr(self, name)
            if value is not None and value <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class Countermodel:
    """A universal strategy refuting the instance.

    ``table[x][tag]`` is the value of universal ``x`` when the existentials
    quantified before ``x`` take the values spelled by ``tag`` (prefix
    order).  Missing entries are false.  For a prefix with all universals in
    front every tag is empty and the strategy is a plain assignment.
    """

    existentials: tuple[int, ...]
    preceding: Mapping[int, tuple[int, ...]]
    table: Mapping[int, Mapping[str, bool]]

    def universal_values(self, existential_values: Mapping[int, bool]) -> dict[int, bool]:
        out = {}
        for x, before in self.preceding.items():
            tag = "".join("1" if existential_values[e] else "0" for e in before)
            out[x] = bool(self.table.get(x, {}).get(tag, False))
        return out

    def as_assignment(self) -> dict[int, bool] | None:
        """The witness as a single universal assignment, if it is one."""
        if any(self.preceding.values()):
            return None
        return self.universal_values({})

    @classmethod
    def from_assignment(
        cls, inst: QbfInstance, alpha: Mapping[int, bool], origin: Mapping[int, tuple[int, str]]
    ) -> "Countermodel":
        preceding: dict[int, tuple[int, ...]] = {}
        seen: list[int] = []
        for q, v in inst.prefix.entries:
            if q == EXISTS:
                seen.append(v)
            else:
                preceding[v] = tuple(seen)
        table: dict[int, dict[str, bool]] = {}
        for v, value in alpha.items():
            orig, tag = origin.get(v, (v, ""))
            if orig in preceding:
                table.setdefault(orig, {})[tag] = value
        return cls(tuple(inst.prefix.existentials()), preceding, table)


def check_countermodel(inst: QbfInstance, cm: Countermodel) -> bool:
    """Brute force: under the strategy, no existential assignment satisfies the matrix."""
    ex = list(cm.existentials)
    for bits in itertools.product((False, True), repeat=len(ex)):
        beta = dict(zip(ex, bits))
        alpha = {**cm.universal_values(beta), **beta}
        if evaluate(inst.matrix, alpha):
            return False
    return True


@dataclass
class Verdict:
    answer: bool
    method: str
    witness: Countermodel | None = None
    stats: dict[str, object] = field(default_factory=dict)


def _oracle(entries: Sequence[tuple[str, int]], pos: int, m: CnfMatrix) -> bool:
    if m.is_true:
        return True
    if m.is_false:
        return False
    if pos == len(entries):
        return m.is_true
    q, v = entries[pos]
    first = _oracle(entries, pos + 1, assign(m, v, False))
    if q == EXISTS:
        return first or _oracle(entries, pos + 1, assign(m, v, True))
    return first and _oracle(entries, pos + 1, assign(m, v, True))


def oracle_eval(inst: QbfInstance) -> bool:
    """Truth value by the recursive definition, branching on every variable in order."""
    return _oracle(inst.prefix.entries, 0, inst.matrix)


def cgis_brute_force(g: ClauseGraph, deadline: float | None = None) -> Selection | None:
    """Lexicographically least independent selection, or None.

    Parts are searched smallest first; candidate sets are bitsets pruned by
    forward checking after every choice.  The returned selection is in the
    graph's part order.
    """
    K = g.K
    if K == 0:
        return ()
    parts = g.parts
    if any(not p for p in parts):
        return None
    order = sorted(range(K), key=lambda i: (len(parts[i]), i))
    # lit_masks[q][lit]: vertices of part order[q] whose label contains lit
    lit_masks = []
    for i in order:
        masks: dict[int, int] = {}
        for v, label in enumerate(parts[i]):
            for lit in label:
                masks[lit] = masks.get(lit, 0) | (1 << v)
        lit_masks.append(masks)
    full = [(1 << len(parts[i])) - 1 for i in order]
    chosen = [0] * K
    nodes = 0

    def dfs(p: int, doms: list[int]) -> bool:
        nonlocal nodes
        if p == K:
            return True
        i = order[p]
        dom = doms[p]
        while dom:
            low = dom & -dom
            dom ^= low
            v = low.bit_length() - 1
            nodes += 1
            if deadline is not None and nodes % 1024 == 0 and time.monotonic() > deadline:
                raise BudgetExceeded("time", "during clause-graph search")
            negs = [-lit for lit in parts[i][v]]
            new = doms[: p + 1]
            ok = True
            for q in range(p + 1, K):
                masks = lit_masks[q]
                blocked = 0
                for nl in negs:
                    blocked |= masks.get(nl, 0)
                dq = doms[q] & ~blocked
                if not dq:
                    ok = False
                    break
                new.append(dq)
            if not ok:
                continue
            chosen[i] = v
            if dfs(p + 1, new):
                return True
        return False

    if dfs(0, full):
        return tuple(chosen)
    return None


def _expansion_budget(inst: QbfInstance, budget: Budget | None) -> None:
    if budget is None:
        return
    if budget.max_parts is not None and 2**inst.k > budget.max_parts:
        raise BudgetExceeded("parts", f"2^{inst.k} parts requested, cap {budget.max_parts}")


def decide_taut(
    inst: QbfInstance,
    t: TautInstance,
    use_kernel: bool,
    kernel_mode: str = SAFE,
    jobs: int = 1,
    deadline: float | None = None,
    stats: dict | None = None,
) -> tuple[bool, Countermodel | None]:
    stats = {} if stats is None else stats
    t0 = time.perf_counter()
    g = build_cgis(t)
    stats["parts"] = g.K
    stats["part_sizes"] = ",".join(map(str, g.part_sizes()))
    stats["time_reduce"] = time.perf_counter() - t0
    if use_kernel:
        t0 = time.perf_counter()
        g, report = kernelize(g, kernel_mode, jobs=jobs)
        stats.update(report.kv())
        stats["time_kernel"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    sel = cgis_brute_force(g, deadline)
    stats["time_search"] = time.perf_counter() - t0
    if sel is None:
        return True, None
    alpha = extract_countermodel(g, sel)
    return False, Countermodel.from_assignment(inst, alpha, t.origin)


def solve(
    inst: QbfInstance,
    method: str = "auto",
    kernel_mode: str = SAFE,
    prune: bool = True,
    budget: Budget | None = None,
    jobs: int = 1,
) -> Verdict:
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    if method == "auto":
        method = "oracle" if inst.n <= ORACLE_MAX_VARS else "fpt"
    stats: dict[str, object] = {"method": method, "n": inst.n, "k": inst.k, "d": inst.d, "m": len(inst.matrix)}
    started = time.perf_counter()
    deadline = None
    if budget is not None and budget.max_seconds is not None:
        deadline = time.monotonic() + budget.max_seconds

    if method == "oracle":
        answer = oracle_eval(inst)
        stats["time_total"] = time.perf_counter() - started
        return Verdict(answer, method, None, stats)

    _expansion_budget(inst, budget)
    t0 = time.perf_counter()
    t = expand_all(inst, prune=prune, pool=VarPool(inst.max_var()))
    stats["time_expand"] = time.perf_counter() - t0
    stats["formulas"] = len(t.formulas)
    stats["expanded_clauses"] = t.clause_count()
    if budget is not None and budget.max_clauses is not None and t.clause_count() > budget.max_clauses:
        raise BudgetExceeded("clauses", f"{t.clause_count()} clauses after expansion, cap {budget.max_clauses}")
    answer, witness = decide_taut(inst, t, method == "fpt", kernel_mode, jobs, deadline, stats)
    stats["time_total"] = time.perf_counter() - started
    log.info("solved by %s: %s", method, answer)
    return Verdict(answer, method, witness, stats)
