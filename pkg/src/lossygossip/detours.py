"""Labelled weighted graphs with detours, realising zero-diagonal nonnegative matrices."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

from .trop import INF, TropMatrix, kleene_star, scalar, format_scalar


class DetourError(ValueError):
    pass


@dataclass(frozen=True)
class DetourGraph:
    """Undirected weighted graph, a labelling of [n] into its vertices, and detour walks.

    ``labels[i]`` is the vertex carrying label ``i`` (0-based); each detour is
    ``(i, j, walk)`` with ``walk`` a vertex sequence from ``labels[i]`` to
    ``labels[j]`` along edges.
    """

    vertices: tuple
    edges: tuple  # (u, v, weight)
    labels: tuple
    detours: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple((u, v, scalar(w)) for u, v, w in self.edges))
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "detours", tuple((i, j, tuple(p)) for i, j, p in self.detours))
        vs = set(self.vertices)
        for u, v, w in self.edges:
            if u not in vs or v not in vs:
                raise DetourError(f"edge {u}-{v} has an unknown endpoint")
            if w < 0:
                raise DetourError("edge weights must be nonnegative")
        if any(x not in vs for x in self.labels):
            raise DetourError("label points to an unknown vertex")
        seen = set()
        for i, j, p in self.detours:
            if i == j:
                raise DetourError("a detour joins distinct labels")
            if (i, j) in seen:
                raise DetourError(f"more than one detour for ({i + 1},{j + 1})")
            seen.add((i, j))
            if not p or p[0] != self.labels[i] or p[-1] != self.labels[j]:
                raise DetourError(f"detour ({i + 1},{j + 1}) has wrong endpoints")

    @property
    def n(self) -> int:
        return len(self.labels)

    def _weights(self) -> dict:
        w: dict = {}
        for u, v, x in self.edges:
            for key in ((u, v), (v, u)):
                w[key] = min(w.get(key, INF), x)
        return w

    def walk_weight(self, walk) -> object:
        w = self._weights()
        total = 0
        for u, v in zip(walk, walk[1:]):
            if (u, v) not in w:
                raise DetourError(f"{u}-{v} is not an edge")
            total = total + w[(u, v)]
        return scalar(total)

    def distances(self) -> TropMatrix:
        """Shortest path weights between labelled vertices."""
        idx = {v: t for t, v in enumerate(self.vertices)}
        m = len(self.vertices)
        rows = [[0 if a == b else INF for b in range(m)] for a in range(m)]
        for (u, v), x in self._weights().items():
            a, b = idx[u], idx[v]
            if a != b:
                rows[a][b] = min(rows[a][b], x)
        star = kleene_star(TropMatrix(rows))
        return TropMatrix([[star[idx[p], idx[q]] for q in self.labels] for p in self.labels])

    def to_json(self) -> dict:
        return {
            "vertices": [str(v) for v in self.vertices],
            "edges": [[str(u), str(v), format_scalar(w)] for u, v, w in self.edges],
            "labels": {str(i + 1): str(v) for i, v in enumerate(self.labels)},
            "detours": [{"from": i + 1, "to": j + 1, "walk": [str(x) for x in p]}
                        for i, j, p in self.detours],
        }

    @classmethod
    def from_json(cls, d: dict) -> "DetourGraph":
        labels = [d["labels"][str(i + 1)] for i in range(len(d["labels"]))]
        return cls(tuple(d["vertices"]), tuple((u, v, w) for u, v, w in d["edges"]), tuple(labels),
                   tuple((x["from"] - 1, x["to"] - 1, tuple(x["walk"])) for x in d.get("detours", ())))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def realize(g: DetourGraph, strict: bool = True) -> TropMatrix:
    """Entry (i, j) is the detour weight if one exists, else the shortest path weight.

    With ``strict`` every detour must be strictly longer than the shortest
    path; ``strict=False`` admits the degenerate closure points.
    """
    dist = g.distances()
    rows = [list(r) for r in dist.entries]
    for i, j, p in g.detours:
        w = g.walk_weight(p)
        if w < dist[i, j] or (strict and w == dist[i, j]):
            raise DetourError(f"detour ({i + 1},{j + 1}) is not longer than a shortest path")
        rows[i][j] = w
    return TropMatrix(rows)


def transpose_detours(g: DetourGraph) -> DetourGraph:
    return replace(g, detours=tuple((j, i, tuple(reversed(p))) for i, j, p in g.detours))


def kleene_compatible(g: DetourGraph, strict: bool = True) -> bool:
    """Forgetting the detours realises the Kleene star of the realised matrix."""
    return replace(g, detours=()).distances() == kleene_star(realize(g, strict))


# -- fixtures -----------------------------------------------------------------

def single_detour_path(a, b) -> DetourGraph:
    """Path 1 - v - 2 of weights a, b with the detour 1, v, 1, v, 2."""
    return DetourGraph(("1", "v", "2"), (("1", "v", a), ("v", "2", b)), ("1", "2"),
                       ((0, 1, ("1", "v", "1", "v", "2")),))


def c10_graph(a, b, c, d, e, f) -> DetourGraph:
    """Path 1-2-3-4 (weights a, d, f) with pendant edges b, c, e at 1, 2, 3 and four detours."""
    vs = ("1", "2", "3", "4", "pb", "pc", "pe")
    edges = (("1", "2", a), ("2", "3", d), ("3", "4", f),
             ("1", "pb", b), ("2", "pc", c), ("3", "pe", e))
    detours = (
        (0, 3, ("1", "pb", "1", "2", "3", "pe", "3", "4")),
        (1, 3, ("2", "pc", "2", "3", "pe", "3", "4")),
        (3, 0, ("4", "3", "pe", "3", "2", "1")),
        (3, 1, ("4", "3", "pe", "3", "2")),
    )
    return DetourGraph(vs, edges, ("1", "2", "3", "4"), detours)


def c10_matrix(a, b, c, d, e, f) -> TropMatrix:
    return TropMatrix([
        [0, a, a + d, a + 2 * b + d + 2 * e + f],
        [a, 0, d, 2 * c + d + 2 * e + f],
        [a + d, d, 0, f],
        [f + 2 * e + d + a, f + 2 * e + d, f, 0],
    ])
