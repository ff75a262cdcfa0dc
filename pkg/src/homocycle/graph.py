"""Weighted multigraphs, their oriented double, and integer homology labels.

Symbols are numbered 0-based internally: symbol ``2*i`` traverses edge ``i``
in its declared direction (``ends[0] -> ends[1]``) and ``2*i + 1`` is its
reverse.  In 1-based terms the forward symbol is odd and the reverse even.
"""

from __future__ import annotations

import hashlib
import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Sequence

import numpy as np

from .errors import GraphFormatError, InadmissibleGraphError
from .lengths import ExactLength


@dataclass(frozen=True)
class Edge:
    id: Hashable
    ends: tuple
    length: ExactLength

    @property
    def is_loop(self) -> bool:
        return self.ends[0] == self.ends[1]


@dataclass(frozen=True)
class MultiGraph:
    vertices: tuple
    edges: tuple
    source_hash: str | None = field(default=None, compare=False)

    def __post_init__(self):
        seen = set()
        for v in self.vertices:
            if v in seen:
                raise GraphFormatError(f"duplicate vertex id {v!r}")
            seen.add(v)
        ids = set()
        for e in self.edges:
            if e.id in ids:
                raise GraphFormatError(f"duplicate edge id {e.id!r}")
            ids.add(e.id)
            for v in e.ends:
                if v not in seen:
                    raise GraphFormatError(f"edge {e.id!r}: dangling endpoint {v!r}")
            if e.length.sign() <= 0:
                raise GraphFormatError(f"edge {e.id!r}: non-positive length")

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def m(self) -> int:
        return len(self.edges)

    def vertex_index(self) -> dict:
        return {v: i for i, v in enumerate(self.vertices)}

    def with_lengths(self, lengths: Sequence) -> "MultiGraph":
        if len(lengths) != self.m:
            raise ValueError("one length per edge required")
        edges = tuple(Edge(e.id, e.ends, ExactLength.parse(l)) for e, l in zip(self.edges, lengths))
        return MultiGraph(self.vertices, edges)

    def to_document(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "edges": [
                {"id": e.id, "ends": list(e.ends), "length": e.length.to_json()}
                for e in self.edges
            ],
        }


def _reject_constant(name):
    raise GraphFormatError(f"non-finite number {name} in graph document")


def parse_graph(text: str | bytes) -> MultiGraph:
    """Parse a JSON graph document.

    Numbers are read as exact rationals, so ``1.1`` is 11/10 rather than the
    nearest binary float.
    """
    raw = text.encode() if isinstance(text, str) else text
    try:
        doc = json.loads(raw, parse_float=Fraction, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"malformed graph document: {exc}") from None
    if not isinstance(doc, dict) or "vertices" not in doc or "edges" not in doc:
        raise GraphFormatError("graph document needs 'vertices' and 'edges'")
    vertices = doc["vertices"]
    if not isinstance(vertices, list) or not vertices:
        raise GraphFormatError("'vertices' must be a non-empty list")
    for v in vertices:
        if isinstance(v, (dict, list)):
            raise GraphFormatError(f"vertex id must be a scalar, got {v!r}")
    edges = []
    for k, item in enumerate(doc["edges"]):
        if not isinstance(item, dict):
            raise GraphFormatError(f"edge #{k} is not an object")
        if "length" not in item:
            raise GraphFormatError(f"edge #{k}: missing length")
        ends = item.get("ends")
        if not isinstance(ends, list) or len(ends) != 2:
            raise GraphFormatError(f"edge #{k}: 'ends' must list two vertices")
        try:
            length = ExactLength.parse(item["length"])
        except (TypeError, ValueError, ZeroDivisionError) as exc:
            raise GraphFormatError(f"edge #{k}: bad length ({exc})") from None
        edges.append(Edge(item.get("id", f"e{k + 1}"), tuple(ends), length))
    return MultiGraph(tuple(vertices), tuple(edges), hashlib.sha256(raw).hexdigest())


def load_graph(path) -> MultiGraph:
    try:
        with open(path, "rb") as fh:
            return parse_graph(fh.read())
    except OSError as exc:
        raise GraphFormatError(f"cannot read {path}: {exc}") from None


@dataclass(frozen=True)
class ValidationReport:
    connected: bool
    bipartite: bool
    b: int
    components: int


def validate_graph(g: MultiGraph) -> ValidationReport:
    index = g.vertex_index()
    adj = [[] for _ in range(g.n)]
    for e in g.edges:
        a, c = index[e.ends[0]], index[e.ends[1]]
        adj[a].append(c)
        adj[c].append(a)
    color = [-1] * g.n
    bipartite = True
    components = 0
    for start in range(g.n):
        if color[start] >= 0:
            continue
        components += 1
        color[start] = 0
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if color[y] < 0:
                    color[y] = 1 - color[x]
                    queue.append(y)
                elif color[y] == color[x]:
                    bipartite = False  # also catches loops
    return ValidationReport(components == 1, bipartite, g.m - g.n + components, components)


def require_admissible(g: MultiGraph, need_homology: bool = True) -> ValidationReport:
    report = validate_graph(g)
    if not report.connected:
        raise InadmissibleGraphError(
            "disconnected graph: the transition matrix is not irreducible"
        )
    if report.bipartite:
        raise InadmissibleGraphError(
            "bipartite: the transition matrix is periodic; "
            "passing to the square of the shift is not supported"
        )
    if need_homology and report.b == 0:
        raise InadmissibleGraphError("trivial homology: the graph is a tree")
    return report


@dataclass(frozen=True)
class SymbolTable:
    initial: np.ndarray
    terminal: np.ndarray
    reverse: np.ndarray
    edge: np.ndarray
    lengths: tuple  # ExactLength per symbol
    n_vertices: int

    @property
    def size(self) -> int:
        return len(self.initial)

    @property
    def length_float(self) -> np.ndarray:
        return np.array([float(l) for l in self.lengths])

    def out_symbols(self, vertex: int) -> list[int]:
        return [s for s in range(self.size) if self.initial[s] == vertex]

    def is_closed_walk(self, word: Sequence[int]) -> bool:
        if not word:
            return False
        steps = zip(word, list(word[1:]) + [word[0]])
        return all(self.terminal[a] == self.initial[b] for a, b in steps)


def oriented_double(g: MultiGraph) -> SymbolTable:
    index = g.vertex_index()
    size = 2 * g.m
    initial = np.empty(size, dtype=int)
    terminal = np.empty(size, dtype=int)
    reverse = np.empty(size, dtype=int)
    edge = np.empty(size, dtype=int)
    lengths = []
    for i, e in enumerate(g.edges):
        a, c = index[e.ends[0]], index[e.ends[1]]
        initial[2 * i], terminal[2 * i] = a, c
        initial[2 * i + 1], terminal[2 * i + 1] = c, a
        reverse[2 * i], reverse[2 * i + 1] = 2 * i + 1, 2 * i
        edge[2 * i] = edge[2 * i + 1] = i
        lengths += [e.length, e.length]
    for arr in (initial, terminal, reverse, edge):
        arr.setflags(write=False)
    return SymbolTable(initial, terminal, reverse, edge, tuple(lengths), g.n)


@dataclass(frozen=True)
class HomologyLabeling:
    """Integer cocycle on symbols; ``f[s]`` is the class vector of symbol ``s``.

    Non-tree edge number ``k`` (in input order) carries the unit vector
    ``e_k`` on its forward symbol, so classes are coordinates with respect
    to the fundamental cycles of the spanning tree.
    """

    b: int
    tree: frozenset
    non_tree: tuple
    f: np.ndarray
    parent: tuple  # (parent vertex, symbol from parent) per vertex, root has None

    def walk_class(self, word: Iterable[int]) -> tuple:
        total = np.zeros(self.b, dtype=np.int64)
        for s in word:
            total += self.f[s]
        return tuple(int(x) for x in total)


def _bfs_tree(g: MultiGraph, st: SymbolTable) -> set:
    adj = [[] for _ in range(g.n)]
    for s in range(st.size):
        adj[st.initial[s]].append(s)  # symbols are in input edge order
    seen = [False] * g.n
    seen[0] = True
    tree = set()
    queue = deque([0])
    while queue:
        x = queue.popleft()
        for s in adj[x]:
            y = st.terminal[s]
            if not seen[y]:
                seen[y] = True
                tree.add(int(st.edge[s]))
                queue.append(y)
    return tree


def homology_labeling(
    g: MultiGraph, st: SymbolTable, tree_edges: Iterable[int] | None = None
) -> HomologyLabeling:
    """Label symbols by a spanning tree (BFS from the first vertex by default).

    ``tree_edges`` may name another spanning tree by edge index.
    """
    report = validate_graph(g)
    if not report.connected:
        raise InadmissibleGraphError("disconnected graph: no homology labeling")
    if report.b == 0:
        raise InadmissibleGraphError("trivial homology: the graph is a tree")
    if tree_edges is None:
        tree = _bfs_tree(g, st)
    else:
        tree = {int(i) for i in tree_edges}
        if len(tree) != g.n - 1 or any(g.edges[i].is_loop for i in tree):
            raise ValueError("tree_edges is not a spanning tree")
    # orient the tree from vertex 0
    adj = [[] for _ in range(g.n)]
    for s in range(st.size):
        if int(st.edge[s]) in tree:
            adj[st.initial[s]].append(s)
    parent: list = [None] * g.n
    seen = [False] * g.n
    seen[0] = True
    queue = deque([0])
    while queue:
        x = queue.popleft()
        for s in adj[x]:
            y = st.terminal[s]
            if not seen[y]:
                seen[y] = True
                parent[y] = (int(x), int(s))
                queue.append(y)
    if not all(seen):
        raise ValueError("tree_edges is not a spanning tree")
    non_tree = tuple(i for i in range(g.m) if i not in tree)
    b = len(non_tree)
    f = np.zeros((st.size, b), dtype=np.int64)
    for k, i in enumerate(non_tree):
        f[2 * i, k] = 1
        f[2 * i + 1, k] = -1
    f.setflags(write=False)
    return HomologyLabeling(b, frozenset(tree), non_tree, f, tuple(parent))


def _path_to_root(hl: HomologyLabeling, v: int) -> list[int]:
    """Symbols walking from the root down to ``v``."""
    path = []
    while hl.parent[v] is not None:
        u, s = hl.parent[v]
        path.append(s)
        v = u
    return path[::-1]


def fundamental_cycle(st: SymbolTable, hl: HomologyLabeling, k: int) -> list[int]:
    """Closed walk: non-tree edge ``k`` forward, then back through the tree via the root."""
    s = 2 * hl.non_tree[k]
    a, c = int(st.initial[s]), int(st.terminal[s])
    down_to_a = _path_to_root(hl, a)
    down_to_c = _path_to_root(hl, c)
    up_from_c = [int(st.reverse[x]) for x in reversed(down_to_c)]
    return [s] + up_from_c + down_to_a


def change_of_basis(st: SymbolTable, hl_from: HomologyLabeling, hl_to: HomologyLabeling) -> np.ndarray:
    """Integer matrix ``U`` with ``class_to(w) = U @ class_from(w)`` for every closed walk."""
    cols = [hl_to.walk_class(fundamental_cycle(st, hl_from, k)) for k in range(hl_from.b)]
    return np.array(cols, dtype=np.int64).T.reshape(hl_to.b, hl_from.b)
