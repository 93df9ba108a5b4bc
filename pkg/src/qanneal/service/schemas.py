"""Pydantic request/response models for the HTTP service and the CLI client."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from ..graphs import Graph, ProblemInstance

AnnealerKind = Literal["fermion", "boson", "ising"]


class InstancePayload(BaseModel):
    """Wire form of a problem instance; mirrors the instance JSON file schema."""

    version: int = 1
    n: int
    rows: int
    cols: int
    degree: int = 3
    seed: int
    edges: list[tuple[int, int]]

    @classmethod
    def from_instance(cls, inst: ProblemInstance) -> "InstancePayload":
        return cls(
            version=1,
            n=inst.n,
            rows=inst.rows,
            cols=inst.cols,
            degree=inst.graph.degree,
            seed=inst.graph.seed,
            edges=[tuple(e) for e in sorted(inst.graph.edges)],
        )

    def to_instance(self) -> ProblemInstance:
        graph = Graph(
            n=self.n,
            degree=self.degree,
            seed=self.seed,
            edges=tuple(sorted((int(u), int(v)) for u, v in self.edges)),
        )
        return ProblemInstance(graph=graph, rows=self.rows, cols=self.cols)


class GenerateRequest(BaseModel):
    rows: int
    cols: int
    count: int = 1
    seed: int = 0
    degree: int = 3


class GenerateResponse(BaseModel):
    ids: list[str]
    instances: list[InstancePayload]


class SolveRequest(BaseModel):
    instance: InstancePayload


class SolveResponse(BaseModel):
    min_cut: int
    degeneracy: int
    solutions: list[str]  # bitstrings, site-1 bit leftmost


class AnnealRequest(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    instance: InstancePayload
    annealer: AnnealerKind
    total_time: float = 50.0
    steps: Optional[int] = None
    lam: float = Field(default=3.0, alias="lambda")
    alpha: float = 1.0
    samples: int = 201
    include_trace: bool = False


class DynamicsTracePayload(BaseModel):
    """Sampled observables; null marks a channel not recorded at that instant."""

    t: list[float]
    s: list[float]
    p_s: list[Optional[float]]
    p_g: list[Optional[float]]
    d_eff: list[Optional[float]]
    q: list[Optional[float]]
    norm_error: list[float]


class AnnealResponse(BaseModel):
    annealer: AnnealerKind
    total_time: float
    steps: int
    p_s_final: float
    min_cut: int
    degeneracy: int
    trace: Optional[DynamicsTracePayload] = None


class SpectrumRequest(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    instance: InstancePayload
    annealer: AnnealerKind
    levels: int = 12
    grid: int = 101
    lam: float = Field(default=3.0, alias="lambda")
    alpha: float = 1.0
    glass: bool = False
    susceptibility: bool = False


class SpectrumResponse(BaseModel):
    annealer: AnnealerKind
    s_grid: list[float]
    levels: list[list[float]]
    relevant_gap: float
    argmin_s: float
    degeneracy: int
    q_gs: Optional[list[float]] = None
    q_low12: Optional[list[float]] = None
    susceptibility: Optional[list[Optional[float]]] = None


class RecordPayload(BaseModel):
    instance_id: str
    annealer: str
    n: int
    D: int
    min_cut: int
    P_s_final: float
    relevant_gap: Optional[float] = None
    runtime_seconds: float = 0.0
    status: str = "ok"


class AggregateRequest(BaseModel):
    records: list[RecordPayload]


class DegeneracyRow(BaseModel):
    D: int
    count: int
    means: dict[str, float]
    counts: dict[str, int]


class AggregateResponse(BaseModel):
    annealers: list[str]
    rows: list[DegeneracyRow]
    histogram: dict[int, int]


class CompareRequest(BaseModel):
    records: list[RecordPayload]
    pair: str = "boson:fermion"


class CompareResponse(BaseModel):
    annealer_a: str
    annealer_b: str
    n_paired: int
    n_unpaired: int
    wins_a: int
    wins_b: int
    ties: int
    win_rate_a: Optional[float] = None
    win_rate_b: Optional[float] = None
    scatter: list[dict]
