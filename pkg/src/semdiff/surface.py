"""Textual and structural similarity for Python code pairs.

``edit_similarity`` is 1 - Levenshtein/max-length over raw characters
(line endings normalized to \\n first). ``ast_similarity`` is
1 - TED/(|T1|+|T2|) over kind-labeled syntax trees: node labels are the
syntactic category only, so identifier and literal text never affect the
score. ``surface_sim`` averages the two.
"""

from __future__ import annotations

import ast
from dataclasses import dataclass, field

import numpy as np

from semdiff import _kernels
from semdiff.errors import ParseError, TreeTooLargeError

DEFAULT_NODE_CAP = 5000


@dataclass
class TreeNode:
    """Ordered, kind-labeled syntax tree node."""

    kind: str
    children: list["TreeNode"] = field(default_factory=list)

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children)


def _normalize_newlines(text: str) -> str:
    return text.replace("\r\n", "\n").replace("\r", "\n")


def edit_similarity(c1: str, c2: str) -> float:
    """1 - ED(c1,c2)/max(|c1|,|c2|); 1.0 when both texts are empty."""
    c1 = _normalize_newlines(c1)
    c2 = _normalize_newlines(c2)
    longest = max(len(c1), len(c2))
    if longest == 0:
        return 1.0
    a = np.frombuffer(c1.encode("utf-32-le"), dtype=np.uint32)
    b = np.frombuffer(c2.encode("utf-32-le"), dtype=np.uint32)
    return 1.0 - _kernels.levenshtein(np.ascontiguousarray(a), np.ascontiguousarray(b)) / longest


def parse_tree(code: str, side: str | None = None) -> TreeNode:
    """Parse Python source into a kind-labeled tree.

    Expression-context markers (Load/Store/Del) are dropped: they mirror
    the parent position and would only pad node counts.
    """
    try:
        module = ast.parse(code)
    except SyntaxError as e:
        raise ParseError(str(e), side=side) from e

    def build(node: ast.AST) -> TreeNode:
        children = [
            build(child)
            for child in ast.iter_child_nodes(node)
            if not isinstance(child, ast.expr_context)
        ]
        return TreeNode(type(node).__name__, children)

    return build(module)


def _postorder_arrays(root: TreeNode, max_nodes: int):
    """Flatten to (labels, leftmost-leaf-descendants, keyroots) postorder
    arrays with labels interned to ints (intern table shared per call pair
    via the ``intern`` dict)."""
    order: list[TreeNode] = []
    lmld: list[int] = []

    def visit(node: TreeNode) -> int:
        first_leaf = -1
        for child in node.children:
            leaf = visit(child)
            if first_leaf == -1:
                first_leaf = leaf
        index = len(order)
        if first_leaf == -1:
            first_leaf = index
        order.append(node)
        lmld.append(first_leaf)
        if index + 1 > max_nodes:
            raise TreeTooLargeError(
                f"tree exceeds node cap of {max_nodes} nodes"
            )
        return first_leaf

    visit(root)
    last_with_lmld: dict[int, int] = {}
    for i, leaf in enumerate(lmld):
        last_with_lmld[leaf] = i
    keyroots = sorted(last_with_lmld.values())
    return order, np.asarray(lmld, dtype=np.int64), np.asarray(keyroots, dtype=np.int64)


def tree_distance(t1: TreeNode, t2: TreeNode, max_nodes: int = DEFAULT_NODE_CAP) -> int:
    """Ordered tree edit distance with unit insert/delete/relabel costs."""
    order1, lmld1, kr1 = _postorder_arrays(t1, max_nodes)
    order2, lmld2, kr2 = _postorder_arrays(t2, max_nodes)
    intern: dict[str, int] = {}
    labels1 = np.asarray([intern.setdefault(n.kind, len(intern)) for n in order1], dtype=np.int64)
    labels2 = np.asarray([intern.setdefault(n.kind, len(intern)) for n in order2], dtype=np.int64)
    return _kernels.tree_edit_distance(labels1, lmld1, kr1, labels2, lmld2, kr2)


def ast_similarity(c1: str, c2: str, max_nodes: int = DEFAULT_NODE_CAP) -> float:
    """1 - TED(T1,T2)/(|T1|+|T2|) over the kind-labeled trees."""
    t1 = parse_tree(c1, side="left")
    t2 = parse_tree(c2, side="right")
    n1 = t1.size()
    n2 = t2.size()
    distance = tree_distance(t1, t2, max_nodes=max_nodes)
    return 1.0 - distance / (n1 + n2)


def surface_sim(
    c1: str,
    c2: str,
    weights: tuple[float, float] = (0.5, 0.5),
    max_nodes: int = DEFAULT_NODE_CAP,
) -> float:
    """Weighted mean of edit and AST similarity (default unweighted)."""
    w_edit, w_ast = weights
    if w_edit < 0 or w_ast < 0 or abs(w_edit + w_ast - 1.0) > 1e-9:
        raise ValueError("weights must be non-negative and sum to 1")
    return w_edit * edit_similarity(c1, c2) + w_ast * ast_similarity(c1, c2, max_nodes=max_nodes)
