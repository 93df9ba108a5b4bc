import csv
import json

import pytest

import qanneal as qa
from qanneal.cli import EXIT_IO, EXIT_OK, EXIT_USAGE, main


def gen_instance(tmp_path, rows=2, cols=4, seed=3):
    rc = main(
        [
            "gen",
            "--rows", str(rows),
            "--cols", str(cols),
            "--count", "1",
            "--seed", str(seed),
            "--out", str(tmp_path),
        ]
    )
    assert rc == EXIT_OK
    return tmp_path / f"{rows * cols}_{seed}_0.json"


def test_gen_writes_instances(tmp_path, capsys):
    path = gen_instance(tmp_path)
    assert path.exists()
    payload = json.loads(path.read_text())
    assert payload["version"] == 1
    assert payload["n"] == 8
    out = capsys.readouterr().out
    assert str(path) in out


def test_solve_prints_solution(tmp_path, capsys):
    graph_path = gen_instance(tmp_path, rows=2, cols=2, seed=5)
    rc = main(["solve", "--instance", str(graph_path)])
    assert rc == EXIT_OK
    out = capsys.readouterr().out
    assert "min_cut: 4" in out
    assert "D: 6" in out
    assert "0011" in out


def test_anneal_writes_trace_and_summary(tmp_path, capsys):
    inst = gen_instance(tmp_path)
    capsys.readouterr()
    trace_path = tmp_path / "dyn.csv"
    rc = main(
        [
            "anneal",
            "--instance", str(inst),
            "--annealer", "boson",
            "--time", "5",
            "--steps", "50",
            "--lambda", "3",
            "--alpha", "1",
            "--samples", "6",
            "--trace", str(trace_path),
        ]
    )
    assert rc == EXIT_OK
    summary = json.loads(capsys.readouterr().out)
    assert summary["annealer"] == "boson"
    assert summary["steps"] == 50
    assert summary["D"] % 2 == 0
    assert 0.0 <= summary["P_s_final"] <= 1.0
    with open(trace_path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "s", "P_s", "P_g", "D_eff", "q", "norm_error"]
    assert len(rows) == 7


def test_spectrum_writes_csv(tmp_path, capsys):
    inst = gen_instance(tmp_path)
    capsys.readouterr()
    out_path = tmp_path / "spec.csv"
    rc = main(
        [
            "spectrum",
            "--instance", str(inst),
            "--annealer", "fermion",
            "--levels", "6",
            "--grid", "11",
            "--out", str(out_path),
        ]
    )
    assert rc == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["relevant_gap"] > 0
    with open(out_path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0][0] == "s"
    assert len(rows) == 12


def test_sweep_and_aggregate_and_compare(tmp_path, capsys):
    cfg = tmp_path / "sweep.cfg"
    out_dir = tmp_path / "out"
    cfg.write_text(
        f"rows=2\ncols=2\ncount=2\nseed=4\nannealers=fermion,boson\n"
        f"time=5\nsteps=40\ntasks=anneal\nout={out_dir}\n"
    )
    rc = main(["sweep", "--config", str(cfg)])
    assert rc == EXIT_OK
    records = out_dir / "records.csv"
    assert records.exists()
    capsys.readouterr()

    rc = main(["aggregate", "--records", str(records), "--by-degeneracy"])
    assert rc == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("D,count")
    assert "# histogram" in out

    rc = main(["compare", "--records", str(records), "--pair", "boson:fermion"])
    assert rc == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["n_paired"] == 2


def test_usage_errors_exit_1(tmp_path, capsys):
    assert main(["anneal", "--instance", "x.json"]) == EXIT_USAGE  # missing --annealer
    capsys.readouterr()
    inst = gen_instance(tmp_path)
    rc = main(["anneal", "--instance", str(inst), "--annealer", "waffle"])
    assert rc == EXIT_USAGE
    capsys.readouterr()
    rc = main(["aggregate", "--records", "nope.csv"])
    assert rc == EXIT_USAGE  # missing --by-degeneracy


def test_missing_file_exits_3(capsys):
    rc = main(["solve", "--instance", "/nonexistent/inst.json"])
    assert rc == EXIT_IO


def test_corrupt_instance_exits_3(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    rc = main(["solve", "--instance", str(bad)])
    assert rc == EXIT_IO


def test_cli_against_live_server(tmp_path, capsys):
    import threading
    import time

    import uvicorn

    from qanneal.service.app import app

    config = uvicorn.Config(app, host="127.0.0.1", port=8731, log_level="error")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.time() + 15
    import httpx

    while time.time() < deadline:
        try:
            if httpx.get("http://127.0.0.1:8731/health", timeout=1).status_code == 200:
                break
        except httpx.HTTPError:
            time.sleep(0.1)
    else:
        pytest.fail("service did not come up")

    try:
        inst = gen_instance(tmp_path, rows=2, cols=2, seed=5)
        capsys.readouterr()
        rc = main(
            ["solve", "--instance", str(inst), "--server", "http://127.0.0.1:8731"]
        )
        assert rc == EXIT_OK
        assert "min_cut: 4" in capsys.readouterr().out
    finally:
        server.should_exit = True
        thread.join(timeout=10)
