"""Graph model for loop integrands: validation, cycle bases, momentum routing.

Edges are directed (source -> target) and stored sorted by id; that order
fixes the edge-variable order a1..aN used by every downstream module. All
kinematic data is kept as exact rationals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .algebra import as_fraction
from .errors import StructuralError, ValidationError

__all__ = [
    "FourVector",
    "Edge",
    "Graph",
    "CycleBasis",
    "MomentumRouting",
    "loop_number",
    "cycle_basis",
    "route_momenta",
    "incidence_matrix",
]


class FourVector(NamedTuple):
    """Euclidean 4-vector with exact rational components; q(x) = sum x_i^2."""

    x1: Fraction
    x2: Fraction
    x3: Fraction
    x4: Fraction

    @classmethod
    def make(cls, components) -> "FourVector":
        comps = list(components)
        if len(comps) != 4:
            raise ValidationError(f"a 4-vector needs 4 components, got {len(comps)}")
        return cls(*(as_fraction(c) for c in comps))

    @classmethod
    def zero(cls) -> "FourVector":
        z = Fraction(0)
        return cls(z, z, z, z)

    def __add__(self, other):
        return FourVector(*(a + b for a, b in zip(self, other)))

    def __radd__(self, other):
        if other == 0:
            return self
        return NotImplemented

    def __sub__(self, other):
        return FourVector(*(a - b for a, b in zip(self, other)))

    def __neg__(self):
        return FourVector(*(-a for a in self))

    def scaled(self, c) -> "FourVector":
        c = as_fraction(c)
        return FourVector(*(a * c for a in self))

    def dot(self, other) -> Fraction:
        return sum((a * b for a, b in zip(self, other)), Fraction(0))

    def norm2(self) -> Fraction:
        return self.dot(self)

    def is_zero(self) -> bool:
        return not any(self)

    def floats(self) -> np.ndarray:
        return np.array([float(a) for a in self])


class Edge(NamedTuple):
    """Directed edge with a strictly positive mass (energy units)."""

    id: int
    source: object
    target: object
    mass: Fraction


@dataclass(frozen=True, eq=False)
class Graph:
    """Connected simple graph with per-edge masses and conserved external momenta.

    No self-loops and no parallel edges; external momenta hang off vertices
    and must sum to the zero 4-vector.
    """

    vertices: tuple
    edges: tuple
    external_momenta: dict

    def __post_init__(self):
        verts = tuple(self.vertices)
        if len(verts) < 2:
            raise StructuralError("need at least two vertices")
        if len(set(verts)) != len(verts):
            raise StructuralError("duplicate vertex ids")
        vset = set(verts)

        edges = []
        for raw in self.edges:
            eid, src, dst, mass = raw
            edges.append(Edge(int(eid), src, dst, as_fraction(mass)))
        edges.sort(key=lambda e: e.id)
        if not edges:
            raise StructuralError("need at least one edge")
        ids = [e.id for e in edges]
        if len(set(ids)) != len(ids):
            raise StructuralError("duplicate edge ids")
        endpoint_pairs = set()
        for e in edges:
            if e.source not in vset or e.target not in vset:
                raise StructuralError(f"edge {e.id} touches an unknown vertex")
            if e.source == e.target:
                raise StructuralError(f"edge {e.id} is a self-loop")
            pair = frozenset((e.source, e.target))
            if pair in endpoint_pairs:
                raise StructuralError(f"edge {e.id} duplicates an existing edge")
            endpoint_pairs.add(pair)
            if e.mass <= 0:
                raise ValidationError(f"edge {e.id} needs a strictly positive mass")

        momenta = {}
        for v, q in dict(self.external_momenta or {}).items():
            if v not in vset:
                raise ValidationError(f"external momentum attached to unknown vertex {v!r}")
            momenta[v] = q if isinstance(q, FourVector) else FourVector.make(q)
        total = sum(momenta.values(), FourVector.zero())
        if not total.is_zero():
            raise ValidationError("external momenta must sum to zero")

        adjacency = {v: [] for v in verts}
        for e in edges:
            adjacency[e.source].append(e.target)
            adjacency[e.target].append(e.source)
        seen = {verts[0]}
        stack = [verts[0]]
        while stack:
            v = stack.pop()
            for w in adjacency[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if seen != vset:
            raise StructuralError("graph must be connected")

        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", tuple(edges))
        object.__setattr__(self, "external_momenta", momenta)
        object.__setattr__(self, "_index", {e.id: i for i, e in enumerate(edges)})

    @classmethod
    def build(cls, vertices, edges, external_momenta=None) -> "Graph":
        return cls(tuple(vertices), tuple(edges), dict(external_momenta or {}))

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def momentum(self, v) -> FourVector:
        return self.external_momenta.get(v, FourVector.zero())

    def index_of(self, edge_id) -> int:
        try:
            return self._index[edge_id]
        except KeyError:
            raise StructuralError(f"no edge with id {edge_id!r}") from None

    def edge(self, edge_id) -> Edge:
        return self.edges[self.index_of(edge_id)]

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.vertices == other.vertices
            and self.edges == other.edges
            and self.external_momenta == other.external_momenta
        )


def loop_number(g: Graph) -> int:
    """First Betti number E - V + 1 (graphs are validated connected)."""
    return g.n_edges - g.n_vertices + 1


def _find(parent, v):
    while parent[v] != v:
        parent[v] = parent[parent[v]]
        v = parent[v]
    return v


def _spanning_tree_indices(g: Graph) -> list:
    """Greedy lowest-id spanning tree; deterministic for a given graph."""
    parent = {v: v for v in g.vertices}
    tree = []
    for idx, e in enumerate(g.edges):
        rs, rt = _find(parent, e.source), _find(parent, e.target)
        if rs != rt:
            parent[rs] = rt
            tree.append(idx)
    return tree


@dataclass(frozen=True)
class CycleBasis:
    """Rows are independent circulations with entries in {-1, 0, +1};
    column e holds the coefficient of edge e on each basis loop."""

    loops: tuple

    @property
    def n(self) -> int:
        return len(self.loops)

    def column(self, e: int) -> tuple:
        return tuple(row[e] for row in self.loops)

    def to_numpy(self, dtype=float) -> np.ndarray:
        n = len(self.loops)
        cols = len(self.loops[0]) if n else 0
        return np.array([list(r) for r in self.loops], dtype=dtype).reshape(n, cols)


def cycle_basis(g: Graph) -> CycleBasis:
    """Fundamental cycles of the lowest-id spanning tree, one per extra edge.

    Each non-tree edge e closes exactly one cycle: coefficient +1 on e, and
    +/-1 on the tree path from target(e) back to source(e) according to
    whether the path traverses a tree edge along or against its direction.
    """
    tree = set(_spanning_tree_indices(g))
    adjacency = {v: [] for v in g.vertices}
    for idx in tree:
        e = g.edges[idx]
        adjacency[e.source].append((e.target, idx, 1))
        adjacency[e.target].append((e.source, idx, -1))

    def tree_path(a, b):
        # edge steps (index, direction) walking a -> b inside the tree
        prev = {a: None}
        queue = [a]
        while queue:
            v = queue.pop(0)
            if v == b:
                break
            for w, idx, direction in adjacency[v]:
                if w not in prev:
                    prev[w] = (v, idx, direction)
                    queue.append(w)
        steps = []
        v = b
        while prev[v] is not None:
            pv, idx, direction = prev[v]
            steps.append((idx, direction))
            v = pv
        steps.reverse()
        return steps

    rows = []
    for idx, e in enumerate(g.edges):
        if idx in tree:
            continue
        row = [0] * g.n_edges
        row[idx] = 1
        for step_idx, direction in tree_path(e.target, e.source):
            row[step_idx] += direction
        rows.append(tuple(row))
    return CycleBasis(tuple(rows))


@dataclass(frozen=True)
class MomentumRouting:
    """External shift 4-vector per edge id; zero on every non-tree edge."""

    shifts: dict

    def of(self, edge_id) -> FourVector:
        return self.shifts[edge_id]


def route_momenta(g: Graph) -> MomentumRouting:
    """Shifts supported on the lowest-id spanning tree.

    Removing a tree edge splits the tree in two; the edge carries the total
    external momentum entering its source-side component, flowing
    source -> target. Per-vertex balance is re-checked exactly.
    """
    tree = _spanning_tree_indices(g)
    tree_set = set(tree)
    adjacency = {v: [] for v in g.vertices}
    for idx in tree:
        e = g.edges[idx]
        adjacency[e.source].append((e.target, idx))
        adjacency[e.target].append((e.source, idx))

    shifts = {}
    for idx, e in enumerate(g.edges):
        if idx not in tree_set:
            shifts[e.id] = FourVector.zero()
            continue
        seen = {e.source}
        stack = [e.source]
        while stack:
            v = stack.pop()
            for w, j in adjacency[v]:
                if j == idx or w in seen:
                    continue
                seen.add(w)
                stack.append(w)
        shifts[e.id] = sum((g.momentum(v) for v in seen), FourVector.zero())

    routing = MomentumRouting(shifts)
    _check_flow(g, routing)
    return routing


def _check_flow(g: Graph, routing: MomentumRouting) -> None:
    for v in g.vertices:
        balance = FourVector.zero()
        for e in g.edges:
            s = routing.of(e.id)
            if e.source == v:
                balance = balance + s
            if e.target == v:
                balance = balance - s
        if balance != g.momentum(v):
            raise ValidationError(f"momentum balance failed at vertex {v!r}")


def incidence_matrix(g: Graph) -> list:
    """Signed incidence rows, one per vertex: +1 at outgoing, -1 at incoming."""
    rows = []
    for v in g.vertices:
        row = []
        for e in g.edges:
            val = 0
            if e.source == v:
                val += 1
            if e.target == v:
                val -= 1
            row.append(val)
        rows.append(row)
    return rows
