"""Shared helpers: random rational kinematics, random graphs, random forms."""

import random
from fractions import Fraction

import numpy as np

from twistamp import FourVector, Graph


def random_fraction(rnd: random.Random, lo=-4, hi=4, max_den=4, nonzero=False) -> Fraction:
    while True:
        f = Fraction(rnd.randint(lo, hi), rnd.randint(1, max_den))
        if f or not nonzero:
            return f


def random_positive_fraction(rnd: random.Random, hi=4, max_den=3) -> Fraction:
    return Fraction(rnd.randint(1, hi), rnd.randint(1, max_den))


def random_momenta(rnd: random.Random, vertices) -> dict:
    """Random rational external momenta that conserve exactly."""
    vertices = list(vertices)
    momenta = {}
    running = FourVector.zero()
    for v in vertices[:-1]:
        q = FourVector.make([random_fraction(rnd) for _ in range(4)])
        momenta[v] = q
        running = running + q
    momenta[vertices[-1]] = -running
    return momenta


def with_random_kinematics(factory, rnd: random.Random) -> Graph:
    """Rebuild a catalog topology with random masses and conserving momenta."""
    skeleton = factory()
    masses = tuple(random_positive_fraction(rnd) for _ in skeleton.edges)
    momenta = random_momenta(rnd, skeleton.vertices)
    return factory(masses=masses, momenta=momenta)


def random_connected_graph(rnd: random.Random, max_edges=8) -> Graph:
    """Random simple connected graph with at least one loop and <= max_edges edges."""
    while True:
        n_verts = rnd.randint(3, 6)
        vertices = list(range(1, n_verts + 1))
        edges = set()
        for v in vertices[1:]:
            u = rnd.randint(1, v - 1)
            edges.add((u, v))
        possible = [
            (u, v)
            for i, u in enumerate(vertices)
            for v in vertices[i + 1 :]
            if (u, v) not in edges
        ]
        rnd.shuffle(possible)
        extra = rnd.randint(1, max(1, max_edges - len(edges)))
        for pair in possible[:extra]:
            if len(edges) >= max_edges:
                break
            edges.add(pair)
        if len(edges) > max_edges or len(edges) <= len(vertices) - 1:
            continue
        edge_list = [
            (i + 1, u, v, random_positive_fraction(rnd))
            for i, (u, v) in enumerate(sorted(edges))
        ]
        return Graph.build(vertices, edge_list)


def random_antisymmetric(rng: np.random.Generator, dim: int) -> np.ndarray:
    m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return m - m.T
