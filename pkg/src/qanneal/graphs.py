"""Random regular problem instances, the cut cost, and the exhaustive oracle."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .basis import build_sector_basis, parse_state
from .errors import GraphGenerationError

INSTANCE_FORMAT_VERSION = 1


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph with a fixed vertex degree, 1-based vertex ids."""

    n: int
    degree: int
    seed: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        deg = [0] * (self.n + 1)
        seen = set()
        for u, v in self.edges:
            if not (1 <= u < v <= self.n):
                raise ValueError(f"bad edge ({u}, {v}) on {self.n} vertices")
            if (u, v) in seen:
                raise ValueError(f"duplicate edge ({u}, {v})")
            seen.add((u, v))
            deg[u] += 1
            deg[v] += 1
        bad = [i for i in range(1, self.n + 1) if deg[i] != self.degree]
        if bad:
            raise ValueError(f"vertices {bad} do not have degree {self.degree}")


@dataclass(frozen=True)
class PartitionSolution:
    """Global minimum of the balanced-partition cost and its full solution set."""

    min_cut: int
    solutions: tuple[int, ...]

    @property
    def degeneracy(self) -> int:
        return len(self.solutions)


@dataclass(frozen=True)
class ProblemInstance:
    """A problem graph together with the lattice geometry it is annealed on."""

    graph: Graph
    rows: int
    cols: int

    def __post_init__(self):
        if self.rows * self.cols != self.graph.n:
            raise ValueError(
                f"lattice {self.rows}x{self.cols} cannot host {self.graph.n} vertices"
            )

    @property
    def n(self) -> int:
        return self.graph.n


def gen_regular_graph(
    n: int, degree: int, seed: int, max_attempts: int = 10_000
) -> Graph:
    """Sample a simple `degree`-regular graph by configuration-model stub pairing.

    Any self-loop or duplicate edge triggers a full restart; deterministic for
    a fixed seed. Raises ValueError on a handshake violation (n*degree odd) or
    n <= degree, GraphGenerationError after `max_attempts` failed pairings.
    """
    if (n * degree) % 2 != 0:
        raise ValueError(f"n*degree = {n * degree} is odd; no such graph exists")
    if n <= degree:
        raise ValueError(f"need n > degree, got n={n}, degree={degree}")
    rng = np.random.default_rng(int(seed))
    base = np.repeat(np.arange(1, n + 1), degree)
    for _ in range(max_attempts):
        stubs = base.copy()
        rng.shuffle(stubs)
        edges = set()
        ok = True
        for a, b in stubs.reshape(-1, 2):
            u, v = (int(a), int(b)) if a < b else (int(b), int(a))
            if u == v or (u, v) in edges:
                ok = False
                break
            edges.add((u, v))
        if ok:
            return Graph(n=n, degree=degree, seed=int(seed), edges=tuple(sorted(edges)))
    raise GraphGenerationError(
        f"no simple {degree}-regular pairing on {n} vertices after {max_attempts} attempts"
    )


def _as_config_int(n: int, config) -> int:
    if isinstance(config, str):
        bits = config.strip().lstrip("|").rstrip("⟩>")
        if len(bits) != n:
            raise ValueError(f"config {config!r} has length {len(bits)}, expected {n}")
        return parse_state(bits)
    b = int(config)
    if b >> n:
        raise ValueError(f"config {b:#x} does not fit on {n} sites")
    return b


def cut_size(graph: Graph, config) -> int:
    """Number of edges whose endpoints carry different bits.

    `config` is a state integer (bit i-1 = vertex i) or a bitstring with the
    vertex-1 bit leftmost.
    """
    b = _as_config_int(graph.n, config)
    cut = 0
    for u, v in graph.edges:
        cut += ((b >> (u - 1)) ^ (b >> (v - 1))) & 1
    return cut


def cut_sizes(graph: Graph, states: np.ndarray) -> np.ndarray:
    """Vectorized :func:`cut_size` over an array of state integers."""
    s = states.astype(np.uint64)
    total = np.zeros(s.shape, dtype=np.int64)
    one = np.uint64(1)
    for u, v in graph.edges:
        total += (((s >> np.uint64(u - 1)) ^ (s >> np.uint64(v - 1))) & one).astype(
            np.int64
        )
    return total


def solve_partition_bruteforce(graph: Graph) -> PartitionSolution:
    """Exhaustively scan all balanced configurations for the minimum cut.

    Enumeration runs in the sector basis order, so solution positions agree
    with the diagonal Hamiltonian index contract.
    """
    if graph.n % 2 != 0:
        raise ValueError(f"vertex count {graph.n} is odd; no balanced partition")
    basis = build_sector_basis(graph.n, graph.n // 2)
    cuts = cut_sizes(graph, basis.states)
    best = int(cuts.min())
    solutions = tuple(int(s) for s in basis.states[cuts == best])
    return PartitionSolution(min_cut=best, solutions=solutions)


def save_instance(instance: ProblemInstance, path) -> None:
    """Write the instance JSON file (sorted 1-based edges, schema version 1)."""
    payload = instance_to_dict(instance)
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def instance_to_dict(instance: ProblemInstance) -> dict:
    g = instance.graph
    return {
        "version": INSTANCE_FORMAT_VERSION,
        "n": g.n,
        "rows": instance.rows,
        "cols": instance.cols,
        "degree": g.degree,
        "seed": g.seed,
        "edges": [[u, v] for u, v in sorted(g.edges)],
    }


def instance_from_dict(payload: dict) -> ProblemInstance:
    version = payload.get("version")
    if version != INSTANCE_FORMAT_VERSION:
        raise ValueError(f"unsupported instance format version {version!r}")
    graph = Graph(
        n=int(payload["n"]),
        degree=int(payload["degree"]),
        seed=int(payload["seed"]),
        edges=tuple(sorted((int(u), int(v)) for u, v in payload["edges"])),
    )
    return ProblemInstance(
        graph=graph, rows=int(payload["rows"]), cols=int(payload["cols"])
    )


def load_instance(path) -> ProblemInstance:
    return instance_from_dict(json.loads(Path(path).read_text()))
