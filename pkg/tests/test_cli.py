"""Command-line interface: file flows, exit codes, CSV determinism."""

import os
import subprocess
import sys

from permsync import read_problem, read_solution
from permsync.bench import AGG_HEADER, RAW_HEADER
from permsync.cli import main


def run_cli(args):
    return main(list(args))


def test_generate_writes_summary_and_file(tmp_path, capsys):
    out = tmp_path / "a.psync"
    code = run_cli(["generate", "--model", "lac", "--n", "30", "--m", "4",
                    "--p", "1.0", "--nc", "3", "--mc", "10", "--seed", "7",
                    "--out", str(out)])
    assert code == 0
    msg = capsys.readouterr().out
    assert "n=30 m=4" in msg
    inst = read_problem(out)
    assert len(inst.bad_edges) <= 30  # union bound n_c * m_c


def test_generate_uniform_q0_no_bad(tmp_path):
    out = tmp_path / "a.psync"
    assert run_cli(["generate", "--model", "uniform", "--n", "10", "--m", "3",
                    "--q", "0", "--seed", "1", "--out", str(out)]) == 0
    assert read_problem(out).bad_edges == frozenset()


def test_generate_deterministic(tmp_path):
    a, b = tmp_path / "a.psync", tmp_path / "b.psync"
    args = ["generate", "--model", "uniform", "--n", "12", "--m", "4",
            "--q", "0.5", "--seed", "3"]
    run_cli(args + ["--out", str(a)])
    run_cli(args + ["--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_solve_prints_zero_error_on_noiseless(tmp_path, capsys):
    prob = tmp_path / "p.psync"
    sol = tmp_path / "s.psync"
    run_cli(["generate", "--model", "uniform", "--n", "10", "--m", "3",
             "--q", "0", "--seed", "2", "--out", str(prob)])
    capsys.readouterr()
    assert run_cli(["solve", "--in", str(prob), "--algo", "spectral",
                    "--out", str(sol)]) == 0
    out = capsys.readouterr().out
    assert "error 0.000000" in out
    est = read_solution(sol)
    assert len(est) == 10


def test_solve_irgcl_on_lac_exact(tmp_path, capsys):
    prob = tmp_path / "p.psync"
    sol = tmp_path / "s.psync"
    run_cli(["generate", "--model", "lac", "--n", "40", "--m", "5", "--p", "1.0",
             "--nc", "2", "--mc", "20", "--seed", "5", "--out", str(prob)])
    capsys.readouterr()
    assert run_cli(["solve", "--in", str(prob), "--algo", "irgcl-p",
                    "--out", str(sol)]) == 0
    assert "error 0.000000" in capsys.readouterr().out


def test_solve_cemp_init_writes_affinity_csv(tmp_path):
    prob = tmp_path / "p.psync"
    aff = tmp_path / "aff.csv"
    run_cli(["generate", "--model", "uniform", "--n", "8", "--m", "3",
             "--q", "0.2", "--seed", "4", "--out", str(prob)])
    assert run_cli(["solve", "--in", str(prob), "--algo", "cemp-init",
                    "--out", str(aff)]) == 0
    lines = aff.read_text().splitlines()
    assert lines[0] == "i,j,affinity"
    assert len(lines) == 1 + read_problem(prob).meas.num_edges


def test_solve_unreadable_file_fails(tmp_path):
    assert run_cli(["solve", "--in", str(tmp_path / "nope.psync"),
                    "--algo", "ppm", "--out", str(tmp_path / "s.psync")]) == 1


def test_usage_error_exit_code():
    proc = subprocess.run(
        [sys.executable, "-m", "permsync", "solve", "--algo", "bogus"],
        capture_output=True)
    assert proc.returncode == 64


def test_invalid_model_flags_usage_error(tmp_path):
    # uniform needs q
    code = run_cli(["generate", "--model", "uniform", "--n", "10", "--m", "3",
                    "--seed", "1", "--out", str(tmp_path / "x.psync")])
    assert code == 64


def bench_args(tmp_path, tag):
    raw = tmp_path / f"raw_{tag}.csv"
    agg = tmp_path / f"agg_{tag}.csv"
    return raw, agg, [
        "benchmark", "--model", "uniform", "--n", "16", "--m", "4",
        "--q", "0.3", "--algos", "spectral,ppm", "--sweep", "q",
        "--values", "0.2,0.5", "--trials", "3", "--seed", "11",
        "--out", str(raw), "--aggregate-out", str(agg)]


def test_benchmark_schema_and_row_count(tmp_path):
    raw, agg, args = bench_args(tmp_path, "a")
    assert run_cli(args) == 0
    lines = raw.read_text().splitlines()
    assert lines[0] == RAW_HEADER
    assert len(lines) == 1 + 2 * 2 * 3  # algos x sweep values x trials
    agg_lines = agg.read_text().splitlines()
    assert agg_lines[0] == AGG_HEADER
    assert len(agg_lines) == 1 + 2 * 2
    # rows sorted by (algo, sweep value, trial)
    keys = [tuple(l.split(",")[1:5]) for l in lines[1:]]
    parsed = [(k[0], float(k[2]), int(k[3])) for k in keys]
    assert parsed == sorted(parsed)


def test_benchmark_byte_determinism_serial_and_parallel(tmp_path):
    raw1, agg1, args1 = bench_args(tmp_path, "s1")
    raw2, agg2, args2 = bench_args(tmp_path, "s2")
    env_serial = dict(os.environ, PERMSYNC_THREADS="1")
    env_par = dict(os.environ, PERMSYNC_THREADS="2")
    r1 = subprocess.run([sys.executable, "-m", "permsync"] + args1,
                        env=env_serial, capture_output=True)
    r2 = subprocess.run([sys.executable, "-m", "permsync"] + args2,
                        env=env_par, capture_output=True)
    assert r1.returncode == 0 and r2.returncode == 0
    assert raw1.read_bytes() == raw2.read_bytes()
    assert agg1.read_bytes() == agg2.read_bytes()


def test_benchmark_aggregate_zero_for_exact_algo(tmp_path):
    raw = tmp_path / "raw.csv"
    agg = tmp_path / "agg.csv"
    assert run_cli(["benchmark", "--model", "lac", "--n", "30", "--m", "4",
                    "--p", "1.0", "--nc", "1", "--mc", "10",
                    "--algos", "irgcl-s", "--sweep", "nc", "--values", "1",
                    "--trials", "3", "--seed", "13",
                    "--out", str(raw), "--aggregate-out", str(agg)]) == 0
    line = agg.read_text().splitlines()[1]
    model, algo, param, value, trials, mean, std = line.split(",")
    assert (model, algo, param, value, trials) == ("lac", "irgcl-s", "nc", "1", "3")
    assert float(mean) == 0.0 and float(std) == 0.0


def test_benchmark_rejects_foreign_sweep_parameter(tmp_path):
    code = run_cli(["benchmark", "--model", "uniform", "--n", "10", "--m", "3",
                    "--q", "0.3", "--algos", "spectral", "--sweep", "nc",
                    "--values", "1", "--trials", "1", "--seed", "1",
                    "--out", str(tmp_path / "r.csv"),
                    "--aggregate-out", str(tmp_path / "a.csv")])
    assert code == 64


def test_verify_hungarian_suite(capsys):
    assert run_cli(["verify", "--suite", "hungarian", "--seed", "1"]) == 0
    assert "PASS" in capsys.readouterr().out


def test_verify_prop42(capsys):
    assert run_cli(["verify", "--suite", "prop42", "--seed", "1"]) == 0
    assert "PASS" in capsys.readouterr().out


def test_verify_invariants(capsys):
    assert run_cli(["verify", "--suite", "invariants", "--seed", "0"]) == 0


def test_verify_ppm_failure_small(capsys):
    assert run_cli(["verify", "--suite", "ppm-failure", "--seed", "2",
                    "--n", "150", "--trials", "4"]) == 0
    assert "PASS" in capsys.readouterr().out


def test_verify_prop31(capsys):
    assert run_cli(["verify", "--suite", "prop31", "--seed", "2"]) == 0
    assert "PASS" in capsys.readouterr().out


def test_verify_ppm_failure_vacuous_exit_code(capsys):
    # parameter inequality violated: 2 eps sqrt(2m) + (1 - 2 eps) eps0 >= 1
    code = run_cli(["verify", "--suite", "ppm-failure", "--seed", "1",
                    "--n", "60", "--trials", "2", "--eps", "0.4"])
    assert code == 2
    assert "VACUOUS" in capsys.readouterr().out


def test_solve_truth_free_file_prints_no_error_line(tmp_path, capsys):
    import permsync

    prob = tmp_path / "p.psync"
    sol = tmp_path / "s.psync"
    inst = permsync.generate_instance(
        permsync.ModelConfig("uniform", n=8, m=3, p=1.0, q=0.2),
        permsync.SeededRng(6))
    stripped = permsync.ProblemInstance(inst.graph, inst.meas, None, None)
    permsync.write_problem(prob, stripped)
    assert run_cli(["solve", "--in", str(prob), "--algo", "ppm",
                    "--out", str(sol)]) == 0
    out = capsys.readouterr().out
    assert "error" not in out
    assert len(permsync.read_solution(sol)) == 8


def test_verify_thm52_small(capsys):
    code = run_cli(["verify", "--suite", "thm52", "--seed", "1", "--n", "60",
                    "--trials", "3"])
    out = capsys.readouterr().out
    assert code == 0
    assert "condition:" in out and "PASS" in out
