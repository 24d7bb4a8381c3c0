"""First-order source mutations that look small but can change behavior.

Sites are located on the AST and mapped back to byte offsets in the
UTF-8 encoded source, so applying a mutation is a single splice. One
mutation per mutant; enumeration order is document order, then operator
code, so generation is deterministic.

Operators:
    AOR  arithmetic operator replacement   (+ -> -, *; - -> +; * -> /; / -> *; % -> *)
    AOD  arithmetic operator deletion      (a + b -> a; -x -> x)
    ROR  relational operator replacement   (< <-> >=, > <-> <=, == <-> !=)
    COD  conditional operator deletion     (not x -> x)
    LOR  logical operator replacement      (and <-> or)
    ZIL  zero iteration loop               (for x in it: -> for x in []:)
    CRP  constant replacement              (n -> n+1, "s" -> "", True <-> False)
    BCR  break/continue replacement
    EXS  statement deletion                (simple statement -> pass)
    SIR  slice index removal               (a[1:n] -> a[:n], a[1:])
"""

from __future__ import annotations

import ast
import re
from dataclasses import dataclass

from semdiff.errors import ParseError, StaleSiteError
from semdiff.model import VariantRecord

OPERATORS = ("AOR", "AOD", "ROR", "COD", "LOR", "ZIL", "CRP", "BCR", "EXS", "SIR")

AOR_TARGETS = {
    ast.Add: ("+", ["-", "*"]),
    ast.Sub: ("-", ["+"]),
    ast.Mult: ("*", ["/"]),
    ast.Div: ("/", ["*"]),
    ast.Mod: ("%", ["*"]),
}

ROR_TARGETS = {
    ast.Lt: ("<", ">="),
    ast.GtE: (">=", "<"),
    ast.Gt: (">", "<="),
    ast.LtE: ("<=", ">"),
    ast.Eq: ("==", "!="),
    ast.NotEq: ("!=", "=="),
}

SIMPLE_STATEMENTS = (
    ast.Assign,
    ast.AugAssign,
    ast.AnnAssign,
    ast.Expr,
    ast.Return,
    ast.Raise,
    ast.Assert,
)


@dataclass(frozen=True)
class MutationSite:
    operator: str
    start: int
    end: int
    original_fragment: str
    replacement_fragment: str

    def provenance(self) -> dict:
        return {
            "operator": self.operator,
            "start": self.start,
            "end": self.end,
            "original": self.original_fragment,
            "replacement": self.replacement_fragment,
        }


class _Source:
    """Byte-offset bookkeeping for one parsed source text."""

    def __init__(self, code: str):
        self.text = code
        self.data = code.encode("utf-8")
        self.line_starts = [0]
        for i, byte in enumerate(self.data):
            if byte == 0x0A:
                self.line_starts.append(i + 1)
        try:
            self.tree = ast.parse(code)
        except SyntaxError as e:
            raise ParseError(str(e)) from e
        self.parents: dict[ast.AST, ast.AST] = {}
        for node in ast.walk(self.tree):
            for child in ast.iter_child_nodes(node):
                self.parents[child] = node

    def span(self, node: ast.AST) -> tuple[int, int]:
        # ast col offsets are already utf-8 byte offsets within the line
        start = self.line_starts[node.lineno - 1] + node.col_offset
        end = self.line_starts[node.end_lineno - 1] + node.end_col_offset
        return start, end

    def segment(self, node: ast.AST) -> str:
        start, end = self.span(node)
        return self.data[start:end].decode("utf-8")

    def under_fstring(self, node: ast.AST) -> bool:
        while node in self.parents:
            node = self.parents[node]
            if isinstance(node, ast.JoinedStr):
                return True
        return False


def _token_site(src: _Source, op: str, lo: int, hi: int, token: str, replacement: str,
                word: bool = False) -> MutationSite | None:
    """Locate a unique operator token between two operand spans.

    Ambiguity (comments repeating the token in the gap) skips the site
    rather than guessing.
    """
    gap = src.data[lo:hi].decode("utf-8")
    if word:
        matches = [m for m in re.finditer(rf"\b{re.escape(token)}\b", gap)]
        positions = [(m.start(), m.end()) for m in matches]
    else:
        positions = []
        i = gap.find(token)
        while i != -1:
            positions.append((i, i + len(token)))
            i = gap.find(token, i + 1)
    if len(positions) != 1:
        return None
    s, e = positions[0]
    start = lo + len(gap[:s].encode("utf-8"))
    end = lo + len(gap[:e].encode("utf-8"))
    return MutationSite(op, start, end, token, replacement)


def _node_site(src: _Source, op: str, node: ast.AST, replacement: str) -> MutationSite:
    start, end = src.span(node)
    return MutationSite(op, start, end, src.segment(node), replacement)


def _only_statement(src: _Source, stmt: ast.stmt) -> bool:
    parent = src.parents.get(stmt)
    if parent is None:
        return False
    for field in ("body", "orelse", "finalbody"):
        block = getattr(parent, field, None)
        if isinstance(block, list) and stmt in block:
            return len(block) == 1
    return False


def _sites_for_node(src: _Source, node: ast.AST, enabled: set[str]) -> list[MutationSite]:
    sites: list[MutationSite] = []

    if isinstance(node, ast.BinOp) and type(node.op) in AOR_TARGETS:
        symbol, targets = AOR_TARGETS[type(node.op)]
        lo = src.span(node.left)[1]
        hi = src.span(node.right)[0]
        if "AOR" in enabled:
            for target in targets:
                site = _token_site(src, "AOR", lo, hi, symbol, target)
                if site:
                    sites.append(site)
        if "AOD" in enabled:
            sites.append(_node_site(src, "AOD", node, src.segment(node.left)))

    if isinstance(node, ast.AugAssign) and type(node.op) in AOR_TARGETS and "AOR" in enabled:
        symbol, targets = AOR_TARGETS[type(node.op)]
        lo = src.span(node.target)[1]
        hi = src.span(node.value)[0]
        for target in targets:
            site = _token_site(src, "AOR", lo, hi, symbol + "=", target + "=")
            if site:
                sites.append(site)

    if isinstance(node, ast.UnaryOp):
        if isinstance(node.op, (ast.USub, ast.UAdd)) and "AOD" in enabled:
            sites.append(_node_site(src, "AOD", node, src.segment(node.operand)))
        if isinstance(node.op, ast.Not) and "COD" in enabled:
            sites.append(_node_site(src, "COD", node, src.segment(node.operand)))

    if isinstance(node, ast.Compare) and "ROR" in enabled:
        operands = [node.left] + list(node.comparators)
        for i, op in enumerate(node.ops):
            if type(op) not in ROR_TARGETS:
                continue
            symbol, target = ROR_TARGETS[type(op)]
            lo = src.span(operands[i])[1]
            hi = src.span(operands[i + 1])[0]
            site = _token_site(src, "ROR", lo, hi, symbol, target)
            if site:
                sites.append(site)

    if isinstance(node, ast.BoolOp) and "LOR" in enabled:
        symbol = "and" if isinstance(node.op, ast.And) else "or"
        target = "or" if symbol == "and" else "and"
        for left, right in zip(node.values, node.values[1:]):
            lo = src.span(left)[1]
            hi = src.span(right)[0]
            site = _token_site(src, "LOR", lo, hi, symbol, target, word=True)
            if site:
                sites.append(site)

    if isinstance(node, ast.For) and "ZIL" in enabled:
        sites.append(_node_site(src, "ZIL", node.iter, "[]"))

    if isinstance(node, ast.Constant) and "CRP" in enabled and not src.under_fstring(node):
        value = node.value
        if value is True:
            sites.append(_node_site(src, "CRP", node, "False"))
        elif value is False:
            sites.append(_node_site(src, "CRP", node, "True"))
        elif isinstance(value, int) and not isinstance(value, bool):
            sites.append(_node_site(src, "CRP", node, str(value + 1)))
        elif isinstance(value, str) and value:
            sites.append(_node_site(src, "CRP", node, '""'))

    if isinstance(node, ast.Break) and "BCR" in enabled:
        sites.append(_node_site(src, "BCR", node, "continue"))
    if isinstance(node, ast.Continue) and "BCR" in enabled:
        sites.append(_node_site(src, "BCR", node, "break"))

    if isinstance(node, SIMPLE_STATEMENTS) and "EXS" in enabled:
        if not (isinstance(node, ast.Return) and _only_statement(src, node)):
            sites.append(_node_site(src, "EXS", node, "pass"))

    if isinstance(node, ast.Slice) and "SIR" in enabled:
        lower = src.segment(node.lower) if node.lower else ""
        upper = src.segment(node.upper) if node.upper else ""
        step = src.segment(node.step) if node.step else None
        tail = f":{step}" if step is not None else ""
        if node.lower is not None:
            sites.append(_node_site(src, "SIR", node, f":{upper}{tail}"))
        if node.upper is not None:
            sites.append(_node_site(src, "SIR", node, f"{lower}:{tail}"))
        if node.step is not None:
            sites.append(_node_site(src, "SIR", node, f"{lower}:{upper}"))

    return sites


def enumerate_sites(code: str, operators: set[str] | None = None) -> list[MutationSite]:
    """Every applicable (operator, location) pair in deterministic order."""
    enabled = set(OPERATORS) if operators is None else set(operators)
    unknown = enabled - set(OPERATORS)
    if unknown:
        raise ValueError(f"unknown operators: {sorted(unknown)}")
    src = _Source(code)
    sites: list[MutationSite] = []
    for node in ast.walk(src.tree):
        if not hasattr(node, "lineno"):
            continue
        sites.extend(_sites_for_node(src, node, enabled))
    sites.sort(key=lambda s: (s.start, s.operator, s.replacement_fragment, s.end))
    return sites


def apply_mutation(code: str, site: MutationSite) -> str:
    """Splice the site's replacement into the source; result must differ."""
    data = code.encode("utf-8")
    if data[site.start : site.end].decode("utf-8", errors="replace") != site.original_fragment:
        raise StaleSiteError(
            f"{site.operator} site at {site.start}:{site.end} no longer matches"
        )
    mutated = (
        data[: site.start]
        + site.replacement_fragment.encode("utf-8")
        + data[site.end :]
    ).decode("utf-8")
    if mutated == code:
        raise StaleSiteError(f"{site.operator} site produced an identical text")
    return mutated


def generate_mutants(
    code: str,
    max_mutants: int,
    operators: set[str] | None = None,
    task_id: str = "",
) -> list[VariantRecord]:
    """Apply every site, keep parseable non-identical mutants, dedupe by
    text, and truncate to max_mutants in enumeration order."""
    if max_mutants < 1:
        raise ValueError("max_mutants must be >= 1")
    records: list[VariantRecord] = []
    seen = {code}
    for site in enumerate_sites(code, operators):
        try:
            mutated = apply_mutation(code, site)
        except StaleSiteError:
            continue
        if mutated in seen:
            continue
        try:
            ast.parse(mutated)
        except SyntaxError:
            continue
        seen.add(mutated)
        records.append(
            VariantRecord(
                variant_id=f"{task_id or 'code'}-mut-{len(records):04d}-{site.operator}",
                task_id=task_id,
                variant_code=mutated,
                variant_kind="mutated",
                provenance=site.provenance(),
                parses_ok=True,
            )
        )
        if len(records) >= max_mutants:
            break
    return records
