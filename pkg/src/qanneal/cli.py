"""Command-line client: marshals arguments into service requests and writes files.

Every subcommand runs the shared request handlers in process by default;
pass --server URL to dispatch the same payloads to a running service instead.
Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import pydantic

from .errors import QannealError
from .experiment import load_records, parse_sweep_config, run_sweep
from .graphs import instance_to_dict, load_instance
from .service import handlers, schemas

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_IO = 3


class _UsageExit(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageExit(message)


def _dispatch(server: str | None, path: str, request, response_cls):
    if server is None:
        handler = {
            "/graphs/generate": handlers.handle_generate,
            "/partition/solve": handlers.handle_solve,
            "/anneal": handlers.handle_anneal,
            "/spectrum": handlers.handle_spectrum,
            "/records/aggregate": handlers.handle_aggregate,
            "/records/compare": handlers.handle_compare,
        }[path]
        return handler(request)
    import httpx

    resp = httpx.post(
        server.rstrip("/") + path,
        json=request.model_dump(mode="json", by_alias=True),
        timeout=None,
    )
    if resp.status_code >= 500:
        raise QannealError(resp.json().get("detail", resp.text))
    if resp.status_code >= 400:
        raise ValueError(resp.json().get("detail", resp.text))
    return response_cls.model_validate(resp.json())


def _load_payload(path) -> schemas.InstancePayload:
    inst = load_instance(path)
    return schemas.InstancePayload.from_instance(inst)


def _records_payload(path) -> list[schemas.RecordPayload]:
    records = load_records(path)
    return [schemas.RecordPayload(**r.__dict__) for r in records]


def cmd_gen(args) -> int:
    req = schemas.GenerateRequest(
        rows=args.rows, cols=args.cols, count=args.count, seed=args.seed
    )
    resp = _dispatch(args.server, "/graphs/generate", req, schemas.GenerateResponse)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for inst_id, payload in zip(resp.ids, resp.instances):
        path = out / f"{inst_id}.json"
        path.write_text(
            json.dumps(instance_to_dict(payload.to_instance()), indent=2) + "\n"
        )
        print(path)
    return EXIT_OK


def cmd_solve(args) -> int:
    req = schemas.SolveRequest(instance=_load_payload(args.instance))
    resp = _dispatch(args.server, "/partition/solve", req, schemas.SolveResponse)
    print(f"min_cut: {resp.min_cut}")
    print(f"D: {resp.degeneracy}")
    print("solutions:")
    for bits in resp.solutions:
        print(f"  {bits}")
    return EXIT_OK


def cmd_anneal(args) -> int:
    req = schemas.AnnealRequest(
        instance=_load_payload(args.instance),
        annealer=args.annealer,
        total_time=args.total_time,
        steps=args.steps,
        lam=args.lam,
        alpha=args.alpha,
        samples=args.samples,
        include_trace=args.trace is not None,
    )
    resp = _dispatch(args.server, "/anneal", req, schemas.AnnealResponse)
    if args.trace is not None:
        tr = resp.trace
        with open(args.trace, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "s", "P_s", "P_g", "D_eff", "q", "norm_error"])
            for i in range(len(tr.t)):
                writer.writerow(
                    [
                        f"{tr.t[i]:.10g}",
                        f"{tr.s[i]:.10g}",
                        _num(tr.p_s[i]),
                        _num(tr.p_g[i]),
                        _num(tr.d_eff[i]),
                        _num(tr.q[i]),
                        f"{tr.norm_error[i]:.3e}",
                    ]
                )
    summary = {
        "instance_id": Path(args.instance).stem,
        "annealer": resp.annealer,
        "T": resp.total_time,
        "steps": resp.steps,
        "P_s_final": resp.p_s_final,
        "D": resp.degeneracy,
        "min_cut": resp.min_cut,
    }
    print(json.dumps(summary))
    return EXIT_OK


def _num(v) -> str:
    return "nan" if v is None else f"{v:.17g}"


def cmd_spectrum(args) -> int:
    req = schemas.SpectrumRequest(
        instance=_load_payload(args.instance),
        annealer=args.annealer,
        levels=args.levels,
        grid=args.grid,
        lam=args.lam,
        alpha=args.alpha,
        glass=args.glass,
        susceptibility=args.susceptibility,
    )
    resp = _dispatch(args.server, "/spectrum", req, schemas.SpectrumResponse)
    header = ["s"] + [f"E_{j}" for j in range(len(resp.levels[0]))]
    extras = []
    for name, col in (
        ("q_gs", resp.q_gs),
        ("q_low12", resp.q_low12),
        ("S", resp.susceptibility),
    ):
        if col is not None:
            header.append(name)
            extras.append(col)
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i, s in enumerate(resp.s_grid):
            row = [f"{s:.10g}"] + [f"{e:.17g}" for e in resp.levels[i]]
            row += [_num(col[i]) for col in extras]
            writer.writerow(row)
    print(
        json.dumps(
            {
                "annealer": resp.annealer,
                "relevant_gap": resp.relevant_gap,
                "argmin_s": resp.argmin_s,
                "D": resp.degeneracy,
                "out": str(args.out),
            }
        )
    )
    return EXIT_OK


def cmd_sweep(args) -> int:
    config = parse_sweep_config(args.config)
    records = run_sweep(config)
    ok = sum(1 for r in records if r.status == "ok")
    print(f"wrote {len(records)} records ({ok} ok) to {Path(config.out_dir) / 'records.csv'}")
    return EXIT_OK


def cmd_aggregate(args) -> int:
    if not args.by_degeneracy:
        raise _UsageExit("aggregate currently requires --by-degeneracy")
    req = schemas.AggregateRequest(records=_records_payload(args.records))
    resp = _dispatch(args.server, "/records/aggregate", req, schemas.AggregateResponse)
    annealers = resp.annealers
    print(",".join(["D", "count"] + [f"mean_P_s_{a}" for a in annealers]))
    for row in resp.rows:
        means = [f"{row.means[a]:.6g}" if a in row.means else "" for a in annealers]
        print(",".join([str(row.D), str(row.count)] + means))
    hist = " ".join(f"{d}:{c}" for d, c in sorted(resp.histogram.items()))
    print(f"# histogram {hist}")
    return EXIT_OK


def cmd_compare(args) -> int:
    req = schemas.CompareRequest(records=_records_payload(args.records), pair=args.pair)
    resp = _dispatch(args.server, "/records/compare", req, schemas.CompareResponse)
    print(
        json.dumps(
            {
                "pair": f"{resp.annealer_a}:{resp.annealer_b}",
                "n_paired": resp.n_paired,
                "n_unpaired": resp.n_unpaired,
                f"wins_{resp.annealer_a}": resp.wins_a,
                f"wins_{resp.annealer_b}": resp.wins_b,
                "ties": resp.ties,
                f"win_rate_{resp.annealer_a}": resp.win_rate_a,
                f"win_rate_{resp.annealer_b}": resp.win_rate_b,
            }
        )
    )
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("qanneal.service.app:app", host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="qanneal", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_server(p):
        p.add_argument("--server", default=None, help="base URL of a running service")

    p = sub.add_parser("gen", help="generate random regular problem instances")
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--cols", type=int, required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    add_server(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="brute-force the balanced minimum cut")
    p.add_argument("--instance", required=True)
    add_server(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("anneal", help="run one annealing evolution")
    p.add_argument("--instance", required=True)
    p.add_argument("--annealer", required=True, choices=["fermion", "boson", "ising"])
    p.add_argument("--time", dest="total_time", type=float, default=50.0)
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--lambda", dest="lam", type=float, default=3.0)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--samples", type=int, default=201)
    p.add_argument("--trace", default=None, help="write the dynamics CSV here")
    add_server(p)
    p.set_defaults(func=cmd_anneal)

    p = sub.add_parser("spectrum", help="lowest levels along the schedule")
    p.add_argument("--instance", required=True)
    p.add_argument("--annealer", required=True, choices=["fermion", "boson", "ising"])
    p.add_argument("--levels", type=int, default=12)
    p.add_argument("--grid", type=int, default=101)
    p.add_argument("--lambda", dest="lam", type=float, default=3.0)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--glass", action="store_true", help="add glass-order columns")
    p.add_argument(
        "--susceptibility", action="store_true", help="add the susceptibility column"
    )
    p.add_argument("--out", required=True)
    add_server(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("sweep", help="run a batch sweep from a key=value config file")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("aggregate", help="aggregate sweep records")
    p.add_argument("--records", required=True)
    p.add_argument("--by-degeneracy", action="store_true")
    add_server(p)
    p.set_defaults(func=cmd_aggregate)

    p = sub.add_parser("compare", help="pairwise annealer comparison")
    p.add_argument("--records", required=True)
    p.add_argument("--pair", default="boson:fermion")
    add_server(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageExit as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, json.JSONDecodeError) as exc:
        # JSONDecodeError subclasses ValueError, so unreadable files match here first
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except QannealError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, pydantic.ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
