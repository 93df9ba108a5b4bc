"""Request handlers shared by the FastAPI routes and the in-process CLI client."""

from __future__ import annotations

import math

import numpy as np

from ..basis import format_state
from ..dynamics import (
    AnnealSchedule,
    ObserverSpec,
    default_steps,
    evolve,
    success_probability,
)
from ..experiment import (
    ResultRecord,
    SweepConfig,
    aggregate_by_degeneracy,
    compare_annealers,
    generate_instances,
)
from ..graphs import solve_partition_bruteforce
from ..hamiltonian import build_parts
from ..spectral import (
    glass_order,
    glass_order_lowk,
    relevant_gap,
    spectral_trace,
    susceptibility_curve,
)
from . import schemas


def _clean(values) -> list:
    """Floats for the wire; NaN becomes null."""
    return [None if math.isnan(v) else float(v) for v in values]


def handle_generate(req: schemas.GenerateRequest) -> schemas.GenerateResponse:
    config = SweepConfig(
        rows=req.rows,
        cols=req.cols,
        instance_count=req.count,
        seed=req.seed,
        out_dir=".",
        degree=req.degree,
    )
    ids, payloads = [], []
    for inst_id, inst in generate_instances(config):
        ids.append(inst_id)
        payloads.append(schemas.InstancePayload.from_instance(inst))
    return schemas.GenerateResponse(ids=ids, instances=payloads)


def handle_solve(req: schemas.SolveRequest) -> schemas.SolveResponse:
    inst = req.instance.to_instance()
    solution = solve_partition_bruteforce(inst.graph)
    labels = [format_state(b, inst.n).strip("|⟩") for b in solution.solutions]
    return schemas.SolveResponse(
        min_cut=solution.min_cut,
        degeneracy=solution.degeneracy,
        solutions=labels,
    )


def handle_anneal(req: schemas.AnnealRequest) -> schemas.AnnealResponse:
    inst = req.instance.to_instance()
    solution = solve_partition_bruteforce(inst.graph)
    parts = build_parts(inst, req.annealer, lam=req.lam, alpha=req.alpha)
    schedule = AnnealSchedule(total_time=req.total_time)
    steps = req.steps if req.steps is not None else default_steps(req.total_time)
    observers = ObserverSpec(
        n_samples=req.samples if req.include_trace else 2,
        success=solution,
        ground_probability=req.include_trace,
        effective_dim=req.include_trace,
        glass=req.include_trace,
    )
    trace = evolve(parts, schedule, steps=steps, observers=observers)
    payload = None
    if req.include_trace:
        payload = schemas.DynamicsTracePayload(
            t=_clean(trace.times),
            s=_clean(trace.s_values),
            p_s=_clean(trace.p_s),
            p_g=_clean(trace.p_g),
            d_eff=_clean(trace.d_eff),
            q=_clean(trace.q),
            norm_error=_clean(trace.norm_error),
        )
    return schemas.AnnealResponse(
        annealer=req.annealer,
        total_time=req.total_time,
        steps=steps,
        p_s_final=success_probability(trace.final_state, solution, parts.basis),
        min_cut=solution.min_cut,
        degeneracy=solution.degeneracy,
        trace=payload,
    )


def handle_spectrum(req: schemas.SpectrumRequest) -> schemas.SpectrumResponse:
    inst = req.instance.to_instance()
    solution = solve_partition_bruteforce(inst.graph)
    parts = build_parts(inst, req.annealer, lam=req.lam, alpha=req.alpha)
    s_grid = np.linspace(0.0, 1.0, req.grid)
    trace = spectral_trace(
        parts,
        s_grid,
        k=req.levels,
        degeneracy_hint=solution.degeneracy,
        keep_vectors=req.glass,
    )
    report = relevant_gap(trace, solution.degeneracy)
    q_gs = q_lowk = susc = None
    if req.glass:
        q_gs = [glass_order(V[:, 0], parts.basis) for V in trace.vectors]
        q_lowk = _clean(glass_order_lowk(trace, min(req.levels, trace.k)))
    if req.susceptibility:
        susc = _clean(susceptibility_curve(parts, s_grid))
    return schemas.SpectrumResponse(
        annealer=req.annealer,
        s_grid=_clean(s_grid),
        levels=[_clean(row) for row in trace.levels],
        relevant_gap=report.relevant_gap,
        argmin_s=report.argmin_s,
        degeneracy=solution.degeneracy,
        q_gs=q_gs,
        q_low12=q_lowk,
        susceptibility=susc,
    )


def _records_from_payload(payloads: list[schemas.RecordPayload]) -> list[ResultRecord]:
    return [ResultRecord(**p.model_dump()) for p in payloads]


def handle_aggregate(req: schemas.AggregateRequest) -> schemas.AggregateResponse:
    table = aggregate_by_degeneracy(_records_from_payload(req.records))
    rows = []
    for row in table.rows:
        means = {a: row[f"mean_P_s_{a}"] for a in table.annealers}
        counts = {a: row[f"count_{a}"] for a in table.annealers}
        means = {a: v for a, v in means.items() if not math.isnan(v)}
        rows.append(
            schemas.DegeneracyRow(
                D=row["D"], count=row["count"], means=means, counts=counts
            )
        )
    return schemas.AggregateResponse(
        annealers=list(table.annealers), rows=rows, histogram=table.histogram
    )


def handle_compare(req: schemas.CompareRequest) -> schemas.CompareResponse:
    a, _, b = req.pair.partition(":")
    if not a or not b:
        raise ValueError(f"pair must look like 'boson:fermion', got {req.pair!r}")
    report = compare_annealers(_records_from_payload(req.records), (a, b))
    return schemas.CompareResponse(
        annealer_a=report.annealer_a,
        annealer_b=report.annealer_b,
        n_paired=report.n_paired,
        n_unpaired=report.n_unpaired,
        wins_a=report.wins_a,
        wins_b=report.wins_b,
        ties=report.ties,
        win_rate_a=report.win_rate_a if report.n_paired else None,
        win_rate_b=report.win_rate_b if report.n_paired else None,
        scatter=report.scatter,
    )
