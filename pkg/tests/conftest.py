import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import qanneal as qa

# Frozen 4x2 fixture: n=8, D=4, min_cut=4, bosonic relevant gap ~1.36 at s~0.86.
FIXTURE_SEED_4X2 = 3


@pytest.fixture(scope="session")
def instance_4x2():
    graph = qa.gen_regular_graph(8, 3, seed=FIXTURE_SEED_4X2)
    return qa.ProblemInstance(graph=graph, rows=2, cols=4)


@pytest.fixture(scope="session")
def solution_4x2(instance_4x2):
    return qa.solve_partition_bruteforce(instance_4x2.graph)


def prism_graph():
    """Triangles {1,2,3}, {4,5,6} joined by rungs (1,4), (2,5), (3,6)."""
    edges = ((1, 2), (1, 3), (1, 4), (2, 3), (2, 5), (3, 6), (4, 5), (4, 6), (5, 6))
    return qa.Graph(n=6, degree=3, seed=0, edges=edges)


def k33_graph():
    """Complete bipartite K_{3,3} on parts {1,2,3} and {4,5,6}."""
    edges = tuple((u, v) for u in (1, 2, 3) for v in (4, 5, 6))
    return qa.Graph(n=6, degree=3, seed=0, edges=edges)


def k4_graph():
    edges = ((1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4))
    return qa.Graph(n=4, degree=3, seed=0, edges=edges)
