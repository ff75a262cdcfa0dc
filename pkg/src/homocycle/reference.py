"""Reference graphs with closed-form results."""

from __future__ import annotations

from typing import Sequence

from .graph import Edge, MultiGraph
from .lengths import ExactLength


def _edges(spec, lengths):
    return tuple(
        Edge(eid, ends, ExactLength.parse(l)) for (eid, ends), l in zip(spec, lengths)
    )


def rose(lengths: Sequence) -> MultiGraph:
    """One vertex with ``k`` loops."""
    spec = [(f"e{i + 1}", ("v", "v")) for i in range(len(lengths))]
    return MultiGraph(("v",), _edges(spec, lengths))


def figure_one(lengths: Sequence = (1, 1, 1, 1)) -> MultiGraph:
    """Loop at X plus the triangle X-Y-Z; its 8x8 transition matrix is a known fixture."""
    spec = [("e1", ("X", "X")), ("e2", ("X", "Y")), ("e3", ("Y", "Z")), ("e4", ("Z", "X"))]
    return MultiGraph(("X", "Y", "Z"), _edges(spec, lengths))


def two_loop(lengths: Sequence = (1, 1, 1)) -> MultiGraph:
    """Loop ``e1`` at v1 and two parallel edges v1-v2.

    ``e3`` is declared v2 -> v1 so that the symbol order matches the
    standard 6x6 transition matrix of this graph.
    """
    spec = [("e1", ("v1", "v1")), ("e2", ("v1", "v2")), ("e3", ("v2", "v1"))]
    return MultiGraph(("v1", "v2"), _edges(spec, lengths))


def is_rose(g: MultiGraph) -> bool:
    return g.n == 1 and g.m >= 1


def is_two_loop(g: MultiGraph) -> bool:
    """Same topology and symbol order as :func:`two_loop`."""
    if g.n != 2 or g.m != 3:
        return False
    v1, v2 = g.vertices
    e1, e2, e3 = (e.ends for e in g.edges)
    return e1 == (v1, v1) and e2 == (v1, v2) and e3 == (v2, v1)


FIGURE_ONE_MATRIX = (
    (1, 1, 1, 0, 0, 0, 0, 1),
    (1, 1, 1, 0, 0, 0, 0, 1),
    (0, 0, 0, 1, 1, 0, 0, 0),
    (1, 1, 1, 0, 0, 0, 0, 1),
    (0, 0, 0, 0, 0, 1, 1, 0),
    (0, 0, 0, 1, 1, 0, 0, 0),
    (1, 1, 1, 0, 0, 0, 0, 1),
    (0, 0, 0, 0, 0, 1, 1, 0),
)

TWO_LOOP_MATRIX = (
    (1, 1, 1, 0, 0, 1),
    (1, 1, 1, 0, 0, 1),
    (0, 0, 0, 1, 1, 0),
    (1, 1, 1, 0, 0, 1),
    (1, 1, 1, 0, 0, 1),
    (0, 0, 0, 1, 1, 0),
)
