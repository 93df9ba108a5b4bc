"""Sweep orchestration: instance generation, per-annealer runs, aggregation."""

from __future__ import annotations

import csv
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dynamics import (
    DEFAULT_SAMPLES,
    DEFAULT_TOTAL_TIME,
    AnnealSchedule,
    ObserverSpec,
    evolve,
    export_dynamics_csv,
    success_probability,
)
from .errors import QannealError
from .graphs import (
    ProblemInstance,
    gen_regular_graph,
    load_instance,
    save_instance,
    solve_partition_bruteforce,
)
from .hamiltonian import DEFAULT_ALPHA, DEFAULT_LAMBDA, build_parts
from .spectral import (
    DEFAULT_LEVELS,
    DEFAULT_TRACE_GRID,
    export_trace_csv,
    glass_order,
    glass_order_lowk,
    relevant_gap,
    spectral_trace,
    susceptibility_curve,
)

ALL_TASKS = ("anneal", "spectrum", "susceptibility", "glass", "dynamics-trace")

RECORD_FIELDS = (
    "instance_id",
    "annealer",
    "n",
    "D",
    "min_cut",
    "P_s_final",
    "relevant_gap",
    "runtime_seconds",
    "status",
)


@dataclass(frozen=True)
class SweepConfig:
    """Parameters of one reproducible sweep over random instances."""

    rows: int
    cols: int
    instance_count: int
    seed: int
    out_dir: str
    annealers: tuple[str, ...] = ("fermion", "boson", "ising")
    total_time: float = DEFAULT_TOTAL_TIME
    lam: float = DEFAULT_LAMBDA
    alpha: float = DEFAULT_ALPHA
    steps: int | None = None
    trace_grid: int = DEFAULT_TRACE_GRID
    levels: int = DEFAULT_LEVELS
    samples: int = DEFAULT_SAMPLES
    tasks: tuple[str, ...] = ("anneal",)
    degree: int = 3
    workers: int = 1

    def __post_init__(self):
        if (self.rows * self.cols) % 2 != 0:
            raise ValueError("lattice site count must be even for half filling")
        if self.instance_count < 1:
            raise ValueError("instance_count must be >= 1")
        for a in self.annealers:
            if a not in ("fermion", "boson", "ising"):
                raise ValueError(f"unknown annealer {a!r}")
        for t in self.tasks:
            if t not in ALL_TASKS:
                raise ValueError(f"unknown task {t!r}")


@dataclass(frozen=True)
class ResultRecord:
    """One (instance, annealer) outcome row."""

    instance_id: str
    annealer: str
    n: int
    D: int
    min_cut: int
    P_s_final: float
    relevant_gap: float | None = None
    runtime_seconds: float = 0.0
    status: str = "ok"


def instance_seed(sweep_seed: int, index: int) -> int:
    """Counter-split child seed; independent of the total instance count."""
    ss = np.random.SeedSequence(sweep_seed, spawn_key=(index,))
    return int(ss.generate_state(1, np.uint64)[0])


def instance_id(n: int, sweep_seed: int, index: int) -> str:
    return f"{n}_{sweep_seed}_{index}"


def generate_instances(config: SweepConfig) -> list[tuple[str, ProblemInstance]]:
    """Deterministic instance stream for a sweep seed."""
    n = config.rows * config.cols
    out = []
    for idx in range(config.instance_count):
        graph = gen_regular_graph(n, config.degree, instance_seed(config.seed, idx))
        inst = ProblemInstance(graph=graph, rows=config.rows, cols=config.cols)
        out.append((instance_id(n, config.seed, idx), inst))
    return out


def run_single(
    inst: ProblemInstance,
    annealer: str,
    config: SweepConfig,
    inst_id: str,
    trace_dir: Path | None = None,
) -> ResultRecord:
    """Run the configured tasks for one (instance, annealer) pair."""
    t_start = time.perf_counter()
    solution = solve_partition_bruteforce(inst.graph)
    parts = build_parts(inst, annealer, lam=config.lam, alpha=config.alpha)
    p_s_final = float("nan")
    gap_value = None

    if "anneal" in config.tasks or "dynamics-trace" in config.tasks:
        schedule = AnnealSchedule(total_time=config.total_time)
        want_trace = "dynamics-trace" in config.tasks
        observers = ObserverSpec(
            n_samples=config.samples if want_trace else 2,
            success=solution,
            ground_probability=want_trace,
            effective_dim=want_trace,
            glass=want_trace,
        )
        trace = evolve(parts, schedule, steps=config.steps, observers=observers)
        p_s_final = success_probability(trace.final_state, solution, parts.basis)
        if want_trace and trace_dir is not None:
            export_dynamics_csv(trace, trace_dir / f"{inst_id}_{annealer}_dynamics.csv")

    if {"spectrum", "susceptibility", "glass"} & set(config.tasks):
        s_grid = np.linspace(0.0, 1.0, config.trace_grid)
        keep = "glass" in config.tasks
        trace = spectral_trace(
            parts,
            s_grid,
            k=config.levels,
            degeneracy_hint=solution.degeneracy,
            keep_vectors=keep,
        )
        if solution.degeneracy < trace.k:
            gap_value = relevant_gap(trace, solution.degeneracy).relevant_gap
        # else: every sector state is a ground state; no level outside the
        # ground subspace exists and the relevant gap stays unset
        q_gs = q_lowk = susc = None
        if keep:
            q_gs = np.array(
                [glass_order(trace.vectors[t][:, 0], parts.basis) for t in range(s_grid.size)]
            )
            q_lowk = glass_order_lowk(trace, min(config.levels, trace.k))
        if "susceptibility" in config.tasks:
            susc = susceptibility_curve(parts, s_grid)
        if trace_dir is not None:
            export_trace_csv(
                trace,
                trace_dir / f"{inst_id}_{annealer}_spectrum.csv",
                q_gs=q_gs,
                q_lowk=q_lowk,
                susceptibility=susc,
            )

    return ResultRecord(
        instance_id=inst_id,
        annealer=annealer,
        n=inst.n,
        D=solution.degeneracy,
        min_cut=solution.min_cut,
        P_s_final=p_s_final,
        relevant_gap=gap_value,
        runtime_seconds=time.perf_counter() - t_start,
    )


def _worker(args) -> ResultRecord:
    instance_path, annealer, config, inst_id, trace_dir = args
    inst = load_instance(instance_path)
    try:
        return run_single(
            inst, annealer, config, inst_id,
            trace_dir=Path(trace_dir) if trace_dir else None,
        )
    except QannealError as exc:
        solution = solve_partition_bruteforce(inst.graph)
        return ResultRecord(
            instance_id=inst_id,
            annealer=annealer,
            n=inst.n,
            D=solution.degeneracy,
            min_cut=solution.min_cut,
            P_s_final=float("nan"),
            status=f"error: {exc}",
        )


def run_sweep(config: SweepConfig) -> list[ResultRecord]:
    """Generate instances, run every requested (instance, annealer) task, persist.

    Deterministic for a fixed config seed; completed records found in the
    output directory are not recomputed.
    """
    out_dir = Path(config.out_dir)
    inst_dir = out_dir / "instances"
    trace_dir = out_dir / "traces"
    inst_dir.mkdir(parents=True, exist_ok=True)
    need_traces = bool({"spectrum", "susceptibility", "glass", "dynamics-trace"} & set(config.tasks))
    if need_traces:
        trace_dir.mkdir(parents=True, exist_ok=True)

    instances = generate_instances(config)
    for inst_id_, inst in instances:
        path = inst_dir / f"{inst_id_}.json"
        if not path.exists():
            save_instance(inst, path)

    records_path = out_dir / "records.csv"
    done: dict[tuple[str, str], ResultRecord] = {}
    if records_path.exists():
        for rec in load_records(records_path):
            if rec.status == "ok":
                done[(rec.instance_id, rec.annealer)] = rec

    pending = []
    for inst_id_, inst in instances:
        for annealer in config.annealers:
            if (inst_id_, annealer) not in done:
                pending.append(
                    (
                        str(inst_dir / f"{inst_id_}.json"),
                        annealer,
                        config,
                        inst_id_,
                        str(trace_dir) if need_traces else None,
                    )
                )

    fresh: list[ResultRecord]
    if config.workers > 1 and len(pending) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            fresh = list(pool.map(_worker, pending))
    else:
        fresh = [_worker(args) for args in pending]

    by_key = {(r.instance_id, r.annealer): r for r in fresh}
    by_key.update({k: v for k, v in done.items()})
    order = {
        (inst_id_, annealer): (i, j)
        for i, (inst_id_, _) in enumerate(instances)
        for j, annealer in enumerate(config.annealers)
    }
    records = sorted(by_key.values(), key=lambda r: order[(r.instance_id, r.annealer)])
    save_records(records, records_path)
    return records


def save_records(records: list[ResultRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RECORD_FIELDS)
        for r in records:
            writer.writerow(
                [
                    r.instance_id,
                    r.annealer,
                    r.n,
                    r.D,
                    r.min_cut,
                    f"{r.P_s_final:.17g}",
                    "" if r.relevant_gap is None else f"{r.relevant_gap:.17g}",
                    f"{r.runtime_seconds:.6g}",
                    r.status,
                ]
            )


def load_records(path) -> list[ResultRecord]:
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out.append(
                ResultRecord(
                    instance_id=row["instance_id"],
                    annealer=row["annealer"],
                    n=int(row["n"]),
                    D=int(row["D"]),
                    min_cut=int(row["min_cut"]),
                    P_s_final=float(row["P_s_final"]),
                    relevant_gap=float(row["relevant_gap"]) if row["relevant_gap"] else None,
                    runtime_seconds=float(row["runtime_seconds"] or 0.0),
                    status=row.get("status", "ok"),
                )
            )
    return out


@dataclass
class DegeneracyTable:
    """Per-degeneracy mean success probabilities and the instance histogram."""

    annealers: tuple[str, ...]
    rows: list[dict]
    histogram: dict[int, int]


def aggregate_by_degeneracy(records: list[ResultRecord]) -> DegeneracyTable:
    """Group records by solution degeneracy, averaging P_s per annealer."""
    if not records:
        raise ValueError("no records to aggregate")
    annealers = tuple(sorted({r.annealer for r in records}))
    groups: dict[int, dict[str, list[float]]] = {}
    inst_degeneracy: dict[str, int] = {}
    for r in records:
        if r.status != "ok":
            continue
        groups.setdefault(r.D, {}).setdefault(r.annealer, []).append(r.P_s_final)
        inst_degeneracy[r.instance_id] = r.D
    histogram: dict[int, int] = {}
    for d in inst_degeneracy.values():
        histogram[d] = histogram.get(d, 0) + 1
    rows = []
    for d in sorted(groups):
        row: dict = {"D": d, "count": histogram.get(d, 0)}
        for a in annealers:
            vals = groups[d].get(a, [])
            row[f"mean_P_s_{a}"] = float(np.mean(vals)) if vals else float("nan")
            row[f"count_{a}"] = len(vals)
        rows.append(row)
    return DegeneracyTable(annealers=annealers, rows=rows, histogram=histogram)


@dataclass
class ComparisonReport:
    """Pairwise win rates between two annealers on shared instances."""

    annealer_a: str
    annealer_b: str
    n_paired: int
    n_unpaired: int
    wins_a: int
    wins_b: int
    ties: int
    scatter: list[dict]

    @property
    def win_rate_a(self) -> float:
        return self.wins_a / self.n_paired if self.n_paired else float("nan")

    @property
    def win_rate_b(self) -> float:
        return self.wins_b / self.n_paired if self.n_paired else float("nan")


def compare_annealers(
    records: list[ResultRecord], pair: tuple[str, str]
) -> ComparisonReport:
    """Fraction of instances where P_s(a) strictly beats P_s(b), and the scatter."""
    a, b = pair
    by_inst: dict[str, dict[str, ResultRecord]] = {}
    for r in records:
        if r.status == "ok":
            by_inst.setdefault(r.instance_id, {})[r.annealer] = r
    wins_a = wins_b = ties = 0
    scatter = []
    unpaired = 0
    for inst_id_, recs in sorted(by_inst.items()):
        if a not in recs or b not in recs:
            unpaired += 1
            continue
        pa, pb = recs[a].P_s_final, recs[b].P_s_final
        if pa > pb:
            wins_a += 1
        elif pb > pa:
            wins_b += 1
        else:
            ties += 1
        scatter.append(
            {"instance_id": inst_id_, "D": recs[a].D, f"P_s_{a}": pa, f"P_s_{b}": pb}
        )
    return ComparisonReport(
        annealer_a=a,
        annealer_b=b,
        n_paired=len(scatter),
        n_unpaired=unpaired,
        wins_a=wins_a,
        wins_b=wins_b,
        ties=ties,
        scatter=scatter,
    )


def parse_sweep_config(path) -> SweepConfig:
    """Read the flat key=value sweep description file."""
    raw: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, value = line.split("=", 1)
        raw[key.strip()] = value.strip()

    def take(key, conv, default):
        return conv(raw.pop(key)) if key in raw else default

    def tuple_field(key, default):
        if key not in raw:
            return default
        return tuple(x.strip() for x in raw.pop(key).split(",") if x.strip())

    if "rows" not in raw or "cols" not in raw:
        raise ValueError("sweep config requires rows and cols")
    config = SweepConfig(
        rows=take("rows", int, None),
        cols=take("cols", int, None),
        instance_count=take("count", int, 1),
        seed=take("seed", int, 0),
        out_dir=take("out", str, "sweep_out"),
        annealers=tuple_field("annealers", ("fermion", "boson", "ising")),
        total_time=take("time", float, DEFAULT_TOTAL_TIME),
        lam=take("lambda", float, DEFAULT_LAMBDA),
        alpha=take("alpha", float, DEFAULT_ALPHA),
        steps=take("steps", int, None),
        trace_grid=take("grid", int, DEFAULT_TRACE_GRID),
        levels=take("levels", int, DEFAULT_LEVELS),
        samples=take("samples", int, DEFAULT_SAMPLES),
        tasks=tuple_field("tasks", ("anneal",)),
        degree=take("degree", int, 3),
        workers=take("workers", int, 1),
    )
    if raw:
        raise ValueError(f"unknown config keys: {sorted(raw)}")
    return config
