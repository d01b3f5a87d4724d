"""Text formats: QDIMACS, and versioned dumps for TAUT, CGIS, QCSP and graphs.

QDIMACS grammar accepted by :func:`parse_qdimacs`::

    file      := comment* header (comment | quant)* (comment | clause)*
    comment   := "c" <anything> EOL
    header    := "p" "cnf" <nvars> <nclauses> EOL
    quant     := ("a" | "e") <var>+ "0" EOL
    clause    := <lit>* "0"          (may span lines; 1 <= |lit| <= nvars)

Every variable in a clause must be quantified.  A clause with a repeated
literal or with both polarities of a variable is rejected; a repeated clause
is dropped with a warning, as is a clause count that differs from the header.

Dump formats start with ``format <name> <version>``; see the README for the
line grammar of each.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .clause_graph import ClauseGraph
from .expansion import TautInstance
from .forge import MultipartiteGraph
from .formula import EXISTS, FORALL, Clause, CnfMatrix, FormulaError, QbfInstance, QuantPrefix, make_clause
from .qcsp import Constraint, QcspInstance, QcspVariable

FORMAT_VERSION = 1


@dataclass(frozen=True)
class ParseDiagnostic:
    line: int
    column: int
    message: str
    severity: str = "error"

    def __str__(self) -> str:
        return f"line {self.line}, column {self.column}: {self.severity}: {self.message}"


class ParseError(ValueError):
    def __init__(self, diagnostic: ParseDiagnostic):
        super().__init__(str(diagnostic))
        self.diagnostic = diagnostic


def _fail(line: int, column: int, message: str):
    raise ParseError(ParseDiagnostic(line, column, message))


def _decode(text: str | bytes) -> str:
    if isinstance(text, bytes):
        try:
            return text.decode("utf-8")
        except UnicodeDecodeError as exc:
            prefix = text[: exc.start]
            _fail(prefix.count(b"\n") + 1, exc.start - prefix.rfind(b"\n"), "input is not valid UTF-8")
    return text


def _tokens(line: str) -> list[tuple[int, str]]:
    """Tokens of a line with their 1-based columns."""
    out = []
    col = 0
    for tok in line.split():
        col = line.index(tok, col)
        out.append((col + 1, tok))
        col += len(tok)
    return out


def _int(tok: str, lineno: int, col: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        _fail(lineno, col, f"expected {what}, got {tok!r}")


def parse_qdimacs(text: str | bytes, warnings: list[ParseDiagnostic] | None = None) -> QbfInstance:
    """Parse QDIMACS; warnings are appended to ``warnings`` when given."""
    text = _decode(text)
    warn = warnings if warnings is not None else []
    header: tuple[int, int] | None = None
    entries: list[tuple[str, int]] = []
    quantified: set[int] = set()
    clauses: dict[Clause, None] = {}
    current: list[int] = []
    current_start = (0, 0)
    n_read = 0
    lineno = 0

    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = _tokens(raw)
        if not toks:
            continue
        col, first = toks[0]
        if first.startswith("c"):
            continue
        if header is None:
            if first != "p":
                _fail(lineno, col, "expected header 'p cnf <vars> <clauses>'")
            if len(toks) != 4 or toks[1][1] != "cnf":
                _fail(lineno, col, "malformed header, expected 'p cnf <vars> <clauses>'")
            nv = _int(toks[2][1], lineno, toks[2][0], "variable count")
            nc = _int(toks[3][1], lineno, toks[3][0], "clause count")
            if nv < 0 or nc < 0:
                _fail(lineno, col, "negative count in header")
            header = (nv, nc)
            continue
        if first == "p":
            _fail(lineno, col, "second header line")
        if first in ("a", "e"):
            if n_read or current:
                _fail(lineno, col, "quantifier line after the first clause")
            if toks[-1][1] != "0":
                _fail(lineno, toks[-1][0], "quantifier line must end with 0")
            for c, tok in toks[1:-1]:
                v = _int(tok, lineno, c, "variable")
                if v < 1 or v > header[0]:
                    _fail(lineno, c, f"variable {v} out of range 1..{header[0]}")
                if v in quantified:
                    _fail(lineno, c, f"variable {v} quantified twice")
                quantified.add(v)
                entries.append((EXISTS if first == "e" else FORALL, v))
            continue
        for c, tok in toks:
            lit = _int(tok, lineno, c, "literal")
            if not current:
                current_start = (lineno, c)
            if lit == 0:
                try:
                    clause = make_clause(current)
                except FormulaError as exc:
                    _fail(*current_start, str(exc))
                n_read += 1
                if clause in clauses:
                    warn.append(ParseDiagnostic(*current_start, f"duplicate clause {clause} dropped", "warning"))
                else:
                    clauses[clause] = None
                current = []
                continue
            if abs(lit) > header[0]:
                _fail(lineno, c, f"literal {lit} out of range 1..{header[0]}")
            if abs(lit) not in quantified:
                _fail(lineno, c, f"variable {abs(lit)} is not quantified")
            current.append(lit)
            if len(current) == 1:
                current_start = (lineno, c)

    if header is None:
        _fail(max(lineno, 1), 1, "missing header 'p cnf <vars> <clauses>'")
    if current:
        _fail(*current_start, "clause not terminated by 0")
    if n_read != header[1]:
        warn.append(ParseDiagnostic(1, 1, f"header announces {header[1]} clauses, found {n_read}", "warning"))
    return QbfInstance(QuantPrefix(tuple(entries)), CnfMatrix(tuple(clauses)))


def _clause_line(c: Clause) -> str:
    return " ".join([*map(str, c), "0"])


def serialize_qdimacs(inst: QbfInstance, comments: Iterable[str] = ()) -> str:
    """Canonical QDIMACS: quantifiers merged into maximal blocks."""
    nvars = max([inst.max_var(), *(abs(lit) for c in inst.matrix for lit in c)], default=0)
    lines = [f"c {c}" if c else "c" for c in comments]
    lines.append(f"p cnf {nvars} {len(inst.matrix)}")
    for q, vs in inst.prefix.blocks():
        lines.append(" ".join([q, *map(str, vs), "0"]))
    lines.extend(_clause_line(c) for c in inst.matrix)
    return "\n".join(lines) + "\n"


# -- versioned dump formats --------------------------------------------------


def _lines(text: str | bytes):
    for lineno, raw in enumerate(_decode(text).splitlines(), start=1):
        toks = _tokens(raw)
        if toks and toks[0][1] != "c":
            yield lineno, toks


def _check_format(lines, name: str, required: bool = True):
    """Consume an optional/required ``format`` line; return the remaining iterator."""
    lines = iter(lines)
    first = next(lines, None)
    if first is None:
        if required:
            _fail(1, 1, f"empty input, expected 'format {name} {FORMAT_VERSION}'")
        return iter(())
    lineno, toks = first
    if toks[0][1] != "format":
        if required:
            _fail(lineno, toks[0][0], f"expected 'format {name} {FORMAT_VERSION}'")
        return _chain(first, lines)
    if len(toks) != 3 or toks[1][1] != name or toks[2][1] != str(FORMAT_VERSION):
        _fail(lineno, toks[0][0], f"unsupported format line, expected 'format {name} {FORMAT_VERSION}'")
    return lines


def _chain(first, rest):
    yield first
    yield from rest


def _clause_from(toks, lineno: int) -> Clause:
    if toks[-1][1] != "0":
        _fail(lineno, toks[-1][0], "clause must end with 0")
    lits = []
    for c, tok in toks[:-1]:
        lit = _int(tok, lineno, c, "literal")
        if lit == 0:
            _fail(lineno, c, "0 inside a clause")
        lits.append(lit)
    try:
        return make_clause(lits)
    except FormulaError as exc:
        _fail(lineno, toks[0][0], str(exc))


def _ints(toks, lineno: int, what: str) -> list[int]:
    return [_int(t, lineno, c, what) for c, t in toks]


def dump_taut(t: TautInstance) -> str:
    lines = [f"format taut {FORMAT_VERSION}", f"d {t.d}"]
    lines.append(" ".join(["universe", *map(str, t.universe)]))
    lines.append(" ".join(["existentials", *map(str, t.existentials)]))
    for v in sorted(t.origin):
        orig, tag = t.origin[v]
        lines.append(f"copy {v} {orig} {tag or '-'}")
    for tag, f in zip(t.provenance, t.formulas):
        lines.append(f"formula {tag or '-'}")
        lines.extend(_clause_line(c) for c in f)
    return "\n".join(lines) + "\n"


def parse_taut(text: str | bytes) -> TautInstance:
    d = 0
    universe: list[int] = []
    existentials: list[int] = []
    origin: dict[int, tuple[int, str]] = {}
    formulas: list[list[Clause]] = []
    tags: list[str] = []
    for lineno, toks in _check_format(_lines(text), "taut"):
        key = toks[0][1]
        if key == "d":
            d = _int(toks[1][1], lineno, toks[1][0], "width") if len(toks) == 2 else _fail(lineno, 1, "bad d line")
        elif key == "universe":
            universe = _ints(toks[1:], lineno, "variable")
        elif key == "existentials":
            existentials = _ints(toks[1:], lineno, "variable")
        elif key == "copy":
            if len(toks) != 4:
                _fail(lineno, 1, "expected 'copy <var> <origin> <tag>'")
            v, orig = _ints(toks[1:3], lineno, "variable")
            origin[v] = (orig, "" if toks[3][1] == "-" else toks[3][1])
        elif key == "formula":
            formulas.append([])
            tags.append("" if len(toks) < 2 or toks[1][1] == "-" else toks[1][1])
        else:
            if not formulas:
                _fail(lineno, toks[0][0], "clause before the first 'formula' line")
            clause = _clause_from(toks, lineno)
            if d and len(clause) > d:
                _fail(lineno, toks[0][0], f"clause wider than d={d}")
            if clause in formulas[-1]:
                _fail(lineno, toks[0][0], "clause repeated within a formula")
            formulas[-1].append(clause)
    known = set(universe)
    for f in formulas:
        for c in f:
            for lit in c:
                if abs(lit) not in known:
                    _fail(1, 1, f"variable {abs(lit)} is not in the universe")
    return TautInstance(
        tuple(universe),
        tuple(CnfMatrix(tuple(f)) for f in formulas),
        tuple(tags),
        d,
        tuple(existentials),
        origin,
    )


def dump_cgis(g: ClauseGraph) -> str:
    lines = [f"format cgis {FORMAT_VERSION}", f"d {g.d}"]
    lines.append(" ".join(["universe", *map(str, g.universe)]))
    lines.append(" ".join(["pads", *map(str, g.pads)]))
    for i, (tag, part) in enumerate(zip(g.provenance, g.parts), start=1):
        lines.append(f"part {i}" + (f" {tag}" if tag else ""))
        lines.extend(_clause_line(c) for c in part)
    return "\n".join(lines) + "\n"


def parse_cgis(text: str | bytes) -> ClauseGraph:
    d = None
    universe: list[int] | None = None
    pads: list[int] = []
    parts: list[list[Clause]] = []
    tags: list[str] = []
    for lineno, toks in _check_format(_lines(text), "cgis"):
        key = toks[0][1]
        if key == "d":
            if len(toks) != 2:
                _fail(lineno, 1, "expected 'd <width>'")
            d = _int(toks[1][1], lineno, toks[1][0], "width")
        elif key == "universe":
            universe = _ints(toks[1:], lineno, "variable")
        elif key == "pads":
            pads = _ints(toks[1:], lineno, "variable")
        elif key == "part":
            if len(toks) < 2 or _int(toks[1][1], lineno, toks[1][0], "part number") != len(parts) + 1:
                _fail(lineno, toks[0][0], f"expected 'part {len(parts) + 1}'")
            parts.append([])
            tags.append(toks[2][1] if len(toks) > 2 else "")
        else:
            if not parts:
                _fail(lineno, toks[0][0], "vertex before the first 'part' line")
            clause = _clause_from(toks, lineno)
            if d is None:
                d = len(clause)
            if len(clause) != d:
                _fail(lineno, toks[0][0], f"label has {len(clause)} literals, expected exactly {d}")
            if clause in parts[-1]:
                _fail(lineno, toks[0][0], f"label {clause} repeated in part {len(parts)}")
            parts[-1].append(clause)
    if universe is None:
        universe = sorted({abs(lit) for p in parts for c in p for lit in c} | set(pads))
    known = set(universe)
    for p in parts:
        for c in p:
            if any(abs(lit) not in known for lit in c):
                _fail(1, 1, f"label {c} uses a variable outside the universe")
    if any(tags) and not all(tags):
        _fail(1, 1, "either every part or no part carries a provenance tag")
    return ClauseGraph(tuple(universe), tuple(tuple(p) for p in parts), d or 0, tuple(pads), tuple(tags) if any(tags) else ())


def dump_qcsp(inst: QcspInstance) -> str:
    lines = [f"format qcsp {FORMAT_VERSION}", f"qcsp {len(inst.variables)}"]
    for x in inst.variables:
        lines.append(" ".join(["var", x.name, x.quantifier, *map(str, x.domain)]))
    for c in inst.constraints:
        lines.append(" ".join(["rel", str(len(c.scope)), *(inst.variables[i].name for i in c.scope)]))
        for row in sorted(c.table, key=lambda r: [str(v) for v in r]):
            lines.append(" ".join(map(str, row)) if row else "()")
        lines.append("end")
    return "\n".join(lines) + "\n"


def parse_qcsp(text: str | bytes) -> QcspInstance:
    """Parse the QCSP text format; domain values are kept as strings."""
    lines = _check_format(_lines(text), "qcsp", required=False)
    declared = None
    variables: list[QcspVariable] = []
    index: dict[str, int] = {}
    constraints: list[Constraint] = []
    block: tuple[list[int], set[tuple]] | None = None
    block_line = 0
    for lineno, toks in lines:
        key = toks[0][1]
        if block is not None:
            if key == "end":
                constraints.append(Constraint(tuple(block[0]), frozenset(block[1])))
                block = None
                continue
            row = () if [t for _, t in toks] == ["()"] else tuple(t for _, t in toks)
            scope = block[0]
            if len(row) != len(scope):
                _fail(lineno, toks[0][0], f"tuple has {len(row)} values, relation arity is {len(scope)}")
            for (c, _), i, value in zip(toks, scope, row):
                if value not in variables[i].domain:
                    _fail(lineno, c, f"value {value!r} outside the domain of {variables[i].name}")
            block[1].add(row)
        elif key == "qcsp":
            if declared is not None or len(toks) != 2:
                _fail(lineno, toks[0][0], "expected a single 'qcsp <nvars>' header")
            declared = _int(toks[1][1], lineno, toks[1][0], "variable count")
        elif key == "var":
            if declared is None:
                _fail(lineno, toks[0][0], "'var' before the 'qcsp' header")
            if len(toks) < 4:
                _fail(lineno, toks[0][0], "expected 'var <name> <a|e> <values...>'")
            name, quant = toks[1][1], toks[2][1]
            if quant not in (EXISTS, FORALL):
                _fail(lineno, toks[2][0], f"quantifier must be 'a' or 'e', got {quant!r}")
            if name in index:
                _fail(lineno, toks[1][0], f"variable {name} declared twice")
            domain = tuple(t for _, t in toks[3:])
            if len(set(domain)) != len(domain):
                _fail(lineno, toks[3][0], f"variable {name} repeats a domain value")
            index[name] = len(variables)
            variables.append(QcspVariable(name, quant, domain))
        elif key == "rel":
            if len(toks) < 2:
                _fail(lineno, toks[0][0], "expected 'rel <arity> <scope...>'")
            arity = _int(toks[1][1], lineno, toks[1][0], "arity")
            names = toks[2:]
            if arity != len(names):
                _fail(lineno, toks[0][0], f"arity {arity} but {len(names)} scope variables")
            scope = []
            for c, name in names:
                if name not in index:
                    _fail(lineno, c, f"unknown variable {name}")
                scope.append(index[name])
            block = (scope, set())
            block_line = lineno
        else:
            _fail(lineno, toks[0][0], f"unexpected {key!r}")
    if block is not None:
        _fail(block_line, 1, "relation block not closed by 'end'")
    if declared is None:
        _fail(1, 1, "missing 'qcsp <nvars>' header")
    if declared != len(variables):
        _fail(1, 1, f"header declares {declared} variables, found {len(variables)}")
    return QcspInstance(tuple(variables), tuple(constraints))


def _vertex_name(v) -> str:
    return "_".join(map(str, v)) if isinstance(v, tuple) else str(v)


def dump_multipartite(g: MultipartiteGraph) -> str:
    lines = [f"format graph {FORMAT_VERSION}"]
    for i, part in enumerate(g.parts, start=1):
        lines.append(" ".join([f"part {i}:", *map(_vertex_name, part)]))
    for e in sorted(sorted(map(_vertex_name, e)) for e in g.edges):
        lines.append(f"edge {e[0]} {e[1]}")
    return "\n".join(lines) + "\n"


def parse_graph(text: str | bytes) -> tuple[list[list[str]], list[str], list[tuple[str, str]]]:
    """Parts (possibly none), plain vertex list and edges of the edge-list format.

    Lines are ``part <i>: v...``, ``vertices v...`` and ``edge u v``.
    """
    parts: list[list[str]] = []
    plain: list[str] = []
    edges: list[tuple[str, str]] = []
    for lineno, toks in _check_format(_lines(text), "graph", required=False):
        key = toks[0][1]
        if key == "part":
            if len(toks) < 2 or not toks[1][1].endswith(":"):
                _fail(lineno, toks[0][0], "expected 'part <i>: <vertices>'")
            num = _int(toks[1][1][:-1], lineno, toks[1][0], "part number")
            if num != len(parts) + 1:
                _fail(lineno, toks[1][0], f"expected part {len(parts) + 1}")
            parts.append([t for _, t in toks[2:]])
        elif key == "vertices":
            plain.extend(t for _, t in toks[1:])
        elif key == "edge":
            if len(toks) != 3:
                _fail(lineno, toks[0][0], "expected 'edge <u> <v>'")
            edges.append((toks[1][1], toks[2][1]))
        else:
            _fail(lineno, toks[0][0], f"unexpected {key!r}")
    return parts, plain, edges


def parse_multipartite(text: str | bytes) -> MultipartiteGraph:
    parts, plain, edges = parse_graph(text)
    if plain:
        _fail(1, 1, "'vertices' line in a multipartite graph; use 'part' lines")
    try:
        return MultipartiteGraph.build(parts, edges)
    except ValueError as exc:
        _fail(1, 1, str(exc))
