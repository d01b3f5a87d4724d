"""Sunflower kernelization of clause graphs.

If the labels of one part contain a sunflower with at least ``s`` members, a
member vertex can be deleted without changing whether an independent
selection exists: any other part's chosen label clashes with at most ``d``
petals, so some surviving member is always free.  Repeating this until no
sunflower of size ``s`` is found bounds every part by ``d! (s-1)^d``.
"""

from __future__ import annotations

import logging
from collections import Counter, defaultdict
from itertools import chain
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import factorial
from typing import Hashable, Iterable, Sequence

from .clause_graph import ClauseGraph
from .formula import lit_key

log = logging.getLogger(__name__)

PAPER = "paper"
SAFE = "safe"


@dataclass(frozen=True)
class Sunflower:
    core: frozenset
    members: tuple[int, ...]

    def petal(self, label: Iterable[Hashable]) -> frozenset:
        return frozenset(label) - self.core

    def __len__(self) -> int:
        return len(self.members)


def _elem_key(e):
    return lit_key(e) if isinstance(e, int) else (0, False, e)


def _search(idx: Sequence[int], sets: Sequence[frozenset], a: int, b: int):
    if len(idx) < a:
        return None
    used: set = set()
    chosen = []
    for i, S in zip(idx, sets):
        if used.isdisjoint(S):
            chosen.append(i)
            used.update(S)
    if len(chosen) >= a:
        return frozenset(), chosen
    if b <= 1:
        # distinct singletons are pairwise disjoint, so the greedy pass was exhaustive
        return None
    freq = Counter(chain.from_iterable(sets))
    # The most frequent element is the classical choice and is guaranteed to
    # succeed above the Erdos-Rado threshold; the others are tried only when
    # it fails, which can still find sunflowers below the threshold.
    candidates = sorted((e for e, c in freq.items() if c >= a), key=lambda e: (-freq[e], _elem_key(e)))
    for e in candidates:
        sub_idx = []
        sub_sets = []
        for i, S in zip(idx, sets):
            if e in S:
                sub_idx.append(i)
                sub_sets.append(S - {e})
        found = _search(sub_idx, sub_sets, a, b - 1)
        if found is not None:
            return found[0] | {e}, found[1]
    return None


def _check_sunflower(sf: Sunflower, sets: Sequence[frozenset]) -> None:
    if len(sf.members) < 2:
        raise AssertionError("sunflower with fewer than two members")
    members = [sets[i] for i in sf.members]
    core = sf.core
    if core:
        if not all(core <= S for S in members):
            raise AssertionError("a member does not contain the core")
        members = [S - core for S in members]
    # pairwise intersections equal the core iff the petals are disjoint
    if len(frozenset().union(*members)) != sum(map(len, members)):
        raise AssertionError("petals are not pairwise disjoint")


def find_sunflower(family: Sequence[Iterable[Hashable]], a: int) -> Sunflower | None:
    """Find a sunflower with at least ``a`` members in a uniform set family.

    ``family`` must hold distinct sets of one common size ``b``.  A sunflower
    is guaranteed when ``len(family) > b! (a-1)^b``.  Members are indices
    into ``family``, ascending.
    """
    if a < 2:
        raise ValueError("sunflower size must be at least 2")
    sets = [frozenset(f) for f in family]
    if not sets:
        return None
    b = len(sets[0])
    if any(len(S) != b for S in sets):
        raise ValueError("family members differ in size")
    found = _search(range(len(sets)), sets, a, b)
    if found is None:
        return None
    sf = Sunflower(frozenset(found[0]), tuple(sorted(found[1])))
    _check_sunflower(sf, sets)
    return sf


def threshold(K: int, d: int, mode: str = SAFE) -> int:
    """Minimum sunflower size that licenses a deletion."""
    if mode == PAPER:
        return max(K - 1, 0) * d + 2
    if mode == SAFE:
        return 2 * max(K - 1, 0) * d + 2
    raise ValueError(f"unknown kernel mode {mode!r}")


def size_bound(d: int, s: int) -> int:
    """Erdos-Rado threshold d! (s-1)^d; kernel parts never exceed it."""
    return factorial(d) * (s - 1) ** d


def _search_through(new: frozenset, sets: Sequence[frozenset], a: int, b: int):
    """``_search(sets + [new])`` when ``_search(sets)`` is known to fail.

    Appending ``new`` last leaves the greedy pass over ``sets`` unchanged, and
    a link not containing ``new`` is the same family that already failed, so
    only branches through elements of ``new`` can succeed.  Returns the core
    and the positions in ``sets`` of the members other than ``new``.
    """
    if len(sets) + 1 < a:
        return None
    used: set = set()
    chosen = []
    for j, S in enumerate(sets):
        if used.isdisjoint(S):
            chosen.append(j)
            used.update(S)
    if len(chosen) + 1 >= a and used.isdisjoint(new):
        return frozenset(), chosen
    if b <= 1:
        return None
    links = {e: [j for j, S in enumerate(sets) if e in S] for e in new}
    candidates = sorted((e for e in new if len(links[e]) + 1 >= a), key=lambda e: (-len(links[e]), _elem_key(e)))
    for e in candidates:
        found = _search_through(new - {e}, [sets[j] - {e} for j in links[e]], a, b - 1)
        if found is not None:
            return found[0] | {e}, [links[e][j] for j in found[1]]
    return None


def _reduce_labels(labels: Sequence[tuple], s: int) -> tuple[list[int], int, int]:
    """Indices surviving exhaustive sunflower deletion, plus counters.

    Labels are inserted from the highest index down and the kept family is
    searched in insertion order.  A sunflower appearing on insertion always
    contains the newcomer, which is then its smallest-index member and is
    deleted.  Every deletion is thus a legal step of the one-at-a-time rule
    on the whole family, the kept family never holds a sunflower the search
    can find, and the work per label does not depend on the part size.
    """
    sets = [frozenset(c) for c in labels]
    b = len(sets[0]) if sets else 0
    kept: list[int] = []
    kept_sets: list[frozenset] = []
    # top level of _search_through, maintained incrementally since the kept
    # family only grows at the end: greedy disjoint pass and element links
    used: set = set()
    chosen: list[int] = []
    where: dict = defaultdict(list)
    n_deleted = 0
    for new in range(len(sets) - 1, -1, -1):
        S = sets[new]
        found = None
        if len(kept) + 1 >= s:
            if len(chosen) + 1 >= s and used.isdisjoint(S):
                # chosen is pairwise disjoint with union ``used`` (checked as it
                # grows), so chosen plus the newcomer is a sunflower with empty core
                n_deleted += 1
                continue
            if b > 1:
                cands = sorted((e for e in S if len(where[e]) + 1 >= s), key=lambda e: (-len(where[e]), _elem_key(e)))
                for e in cands:
                    link = where[e]
                    sub = _search_through(S - {e}, [kept_sets[j] - {e} for j in link], s, b - 1)
                    if sub is not None:
                        found = (sub[0] | {e}, [link[j] for j in sub[1]])
                        break
        if found is None:
            pos = len(kept)
            kept.append(new)
            kept_sets.append(S)
            for e in S:
                where[e].append(pos)
            if used.isdisjoint(S):
                chosen.append(pos)
                used.update(S)
                if len(used) != len(chosen) * b:
                    raise AssertionError("greedy petals are not pairwise disjoint")
            continue
        sf = Sunflower(frozenset(found[0]), tuple(sorted([new] + [kept[j] for j in found[1]])))
        _check_sunflower(sf, sets)
        n_deleted += 1
    # every deletion here came from its own sunflower
    return sorted(kept), n_deleted, n_deleted


def reduce_part(g: ClauseGraph, i: int, s: int) -> ClauseGraph:
    if s < 2:
        raise ValueError("threshold must be at least 2")
    if not 0 <= i < g.K:
        raise IndexError(f"part {i} out of range")
    kept, _, _ = _reduce_labels(g.parts[i], s)
    parts = list(g.parts)
    parts[i] = tuple(g.parts[i][j] for j in kept)
    return g.with_parts(parts)


@dataclass
class KernelReport:
    mode: str
    s: int
    bound: int
    before: list[int] = field(default_factory=list)
    after: list[int] = field(default_factory=list)
    sunflowers: list[int] = field(default_factory=list)
    deleted: list[int] = field(default_factory=list)

    @property
    def per_paper(self) -> bool:
        return self.mode == PAPER

    @property
    def certified(self) -> bool:
        """Every part is strictly below ``d! (s-1)^d``."""
        return all(n < self.bound for n in self.after)

    def kv(self) -> dict[str, object]:
        return {
            "kernel_mode": self.mode + (" (per-paper)" if self.per_paper else ""),
            "kernel_s": self.s,
            "kernel_bound": self.bound,
            "kernel_before": ",".join(map(str, self.before)),
            "kernel_after": ",".join(map(str, self.after)),
            "kernel_sunflowers": sum(self.sunflowers),
            "kernel_deleted": sum(self.deleted),
            "kernel_certified": int(self.certified),
        }


def _reduce_job(args):
    labels, s = args
    return _reduce_labels(labels, s)


def kernelize(g: ClauseGraph, mode: str = SAFE, jobs: int = 1) -> tuple[ClauseGraph, KernelReport]:
    s = threshold(g.K, g.d, mode)
    report = KernelReport(mode=mode, s=s, bound=size_bound(g.d, s))
    work = [(part, s) for part in g.parts]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_reduce_job, work))
    else:
        results = [_reduce_job(w) for w in work]
    parts = []
    for part, (kept, n_sf, n_del) in zip(g.parts, results):
        parts.append(tuple(part[j] for j in kept))
        report.before.append(len(part))
        report.after.append(len(kept))
        report.sunflowers.append(n_sf)
        report.deleted.append(n_del)
    log.debug("kernel s=%d bound=%d sizes %s -> %s", s, report.bound, report.before, report.after)
    return g.with_parts(parts), report
