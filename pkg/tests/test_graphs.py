import json

import numpy as np
import pytest

import qanneal as qa
from qanneal.errors import GraphGenerationError
from qanneal.graphs import cut_sizes, instance_from_dict, instance_to_dict

from conftest import k4_graph, k33_graph, prism_graph
from oracles import brute_force_balanced_mincut


def test_n4_degree3_is_k4():
    g = qa.gen_regular_graph(4, 3, seed=999)
    assert g.edges == k4_graph().edges


def test_parity_violation_rejected():
    with pytest.raises(ValueError):
        qa.gen_regular_graph(5, 3, seed=1)


def test_n_not_above_degree_rejected():
    with pytest.raises(ValueError):
        qa.gen_regular_graph(3, 3, seed=1)


def test_generated_graph_invariants():
    g = qa.gen_regular_graph(12, 3, seed=7)
    assert len(g.edges) == 18
    degree = {}
    for u, v in g.edges:
        assert 1 <= u < v <= 12
        degree[u] = degree.get(u, 0) + 1
        degree[v] = degree.get(v, 0) + 1
    assert all(degree[i] == 3 for i in range(1, 13))


def test_generation_deterministic():
    a = qa.gen_regular_graph(12, 3, seed=123)
    b = qa.gen_regular_graph(12, 3, seed=123)
    assert a == b
    c = qa.gen_regular_graph(12, 3, seed=124)
    assert c.edges != a.edges


def test_graph_constructor_validates():
    with pytest.raises(ValueError):
        qa.Graph(n=4, degree=3, seed=0, edges=((1, 2), (1, 2), (3, 4)))
    with pytest.raises(ValueError):
        qa.Graph(n=4, degree=3, seed=0, edges=((2, 1),))


def test_cut_size_examples():
    k4 = k4_graph()
    assert qa.cut_size(k4, 0b0011) == 4
    assert qa.cut_size(k4, "0011") == 4
    assert qa.cut_size(k4, 0) == 0
    prism = prism_graph()
    assert qa.cut_size(prism, "000111") == 3
    assert qa.cut_size(prism, 0b000111) == 3


def test_cut_size_validates_length():
    with pytest.raises(ValueError):
        qa.cut_size(k4_graph(), "00111")
    with pytest.raises(ValueError):
        qa.cut_size(k4_graph(), 1 << 5)


def test_cut_complement_symmetry():
    rng = np.random.default_rng(5)
    g = qa.gen_regular_graph(10, 3, seed=3)
    full = (1 << 10) - 1
    for _ in range(50):
        b = int(rng.integers(0, 1 << 10))
        assert qa.cut_size(g, b) == qa.cut_size(g, b ^ full)


def test_bruteforce_k4():
    sol = qa.solve_partition_bruteforce(k4_graph())
    assert sol.min_cut == 4
    assert sol.degeneracy == 6


def test_bruteforce_prism():
    sol = qa.solve_partition_bruteforce(prism_graph())
    assert sol.min_cut == 3
    assert sol.degeneracy == 2
    assert set(sol.solutions) == {0b000111, 0b111000}


def test_bruteforce_k33():
    sol = qa.solve_partition_bruteforce(k33_graph())
    assert sol.min_cut == 5
    assert sol.degeneracy == 18


def test_bruteforce_matches_independent_enumeration():
    for seed in range(4):
        g = qa.gen_regular_graph(10, 3, seed=seed)
        sol = qa.solve_partition_bruteforce(g)
        cut, configs = brute_force_balanced_mincut(g.edges, g.n)
        assert sol.min_cut == cut
        assert list(sol.solutions) == configs


def test_bruteforce_rejects_odd_vertex_count():
    five_cycle = qa.Graph(
        n=5, degree=2, seed=0, edges=((1, 2), (1, 5), (2, 3), (3, 4), (4, 5))
    )
    with pytest.raises(ValueError):
        qa.solve_partition_bruteforce(five_cycle)


def test_bruteforce_four_cycle():
    square = qa.Graph(n=4, degree=2, seed=0, edges=((1, 2), (1, 4), (2, 3), (3, 4)))
    sol = qa.solve_partition_bruteforce(square)
    assert sol.min_cut == 2
    assert sol.degeneracy == 4  # the two adjacent-pair splits and their complements


def test_degeneracy_even_and_cut_bounds():
    for seed in range(30):
        g = qa.gen_regular_graph(12, 3, seed=seed)
        sol = qa.solve_partition_bruteforce(g)
        assert sol.degeneracy % 2 == 0
        assert 0 <= sol.min_cut <= len(g.edges)
        assert all(bin(b).count("1") == 6 for b in sol.solutions)
        assert all(qa.cut_size(g, b) == sol.min_cut for b in sol.solutions)


def test_cut_sizes_vectorized_matches_scalar():
    g = qa.gen_regular_graph(8, 3, seed=2)
    states = np.arange(256, dtype=np.uint64)
    vec = cut_sizes(g, states)
    for b in range(0, 256, 17):
        assert vec[b] == qa.cut_size(g, b)


def test_instance_roundtrip(tmp_path):
    g = qa.gen_regular_graph(8, 3, seed=11)
    inst = qa.ProblemInstance(graph=g, rows=2, cols=4)
    path = tmp_path / "inst.json"
    qa.save_instance(inst, path)
    loaded = qa.load_instance(path)
    assert loaded == inst
    payload = json.loads(path.read_text())
    assert payload["version"] == 1
    assert payload["rows"] == 2 and payload["cols"] == 4
    assert payload["edges"] == sorted(payload["edges"])


def test_instance_file_byte_identical(tmp_path):
    g = qa.gen_regular_graph(8, 3, seed=11)
    inst = qa.ProblemInstance(graph=g, rows=2, cols=4)
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    qa.save_instance(inst, p1)
    qa.save_instance(qa.ProblemInstance(graph=qa.gen_regular_graph(8, 3, seed=11), rows=2, cols=4), p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_instance_rejects_bad_geometry():
    g = qa.gen_regular_graph(8, 3, seed=11)
    with pytest.raises(ValueError):
        qa.ProblemInstance(graph=g, rows=3, cols=3)


def test_instance_dict_version_check():
    g = qa.gen_regular_graph(8, 3, seed=11)
    payload = instance_to_dict(qa.ProblemInstance(graph=g, rows=2, cols=4))
    payload["version"] = 99
    with pytest.raises(ValueError):
        instance_from_dict(payload)
