"""Plot script tests: the rendered series must equal the CSV exactly."""

import subprocess
import sys

import pytest

from plot_benchmark import FigureSpec, figure_series, load_series, main, render

HEADER = "model,algo,sweep_param,sweep_value,trials,mean_error,std_error"


def write_csv(path, rows):
    path.write_text("\n".join([HEADER] + rows) + "\n")


def test_single_point_single_algo(tmp_path):
    csv = tmp_path / "agg.csv"
    write_csv(csv, ["uniform,spectral,q,0.5,3,0.25,0.1"])
    fig = render(FigureSpec(str(csv), "q", str(tmp_path / "fig.png")))
    series = figure_series(fig)
    assert series == {"spectral": ([0.5], [0.25])}
    assert (tmp_path / "fig.png").exists()


def test_missing_or_wrong_columns_rejected(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(ValueError, match="header"):
        load_series(str(bad), "q")
    empty = tmp_path / "empty.csv"
    empty.write_text(HEADER + "\n")
    with pytest.raises(ValueError, match="no data"):
        load_series(str(empty), "q")
    wrong_param = tmp_path / "wrong.csv"
    write_csv(wrong_param, ["uniform,spectral,q,0.5,3,0.25,0.1"])
    with pytest.raises(ValueError, match="x-axis"):
        load_series(str(wrong_param), "nc")


def test_uniform_fixture_spectral_above_reweighted(tmp_path):
    # shape of the high-corruption regime: the eigenvector baseline sits far
    # above the reweighted solver at q >= 0.8
    csv = tmp_path / "agg.csv"
    write_csv(csv, [
        "uniform,irgcl-s,q,0.7,20,0.0,0.0",
        "uniform,irgcl-s,q,0.8,20,0.0,0.0",
        "uniform,spectral,q,0.7,20,0.61,0.21",
        "uniform,spectral,q,0.8,20,1.06,0.11",
    ])
    fig = render(FigureSpec(str(csv), "q", str(tmp_path / "fig.svg"), log_y=False))
    series = figure_series(fig)
    xs, irgcl = series["irgcl-s"]
    _, spectral = series["spectral"]
    assert xs == [0.7, 0.8]
    assert spectral[xs.index(0.8)] > irgcl[xs.index(0.8)]


def lac_aggregate_via_cli(tmp_path):
    """Real aggregate from the benchmark CLI on a small adversarial grid."""
    raw = tmp_path / "raw.csv"
    agg = tmp_path / "agg.csv"
    args = [sys.executable, "-m", "permsync", "benchmark",
            "--model", "lac", "--n", "50", "--m", "6", "--p", "1.0",
            "--nc", "1", "--mc", "25", "--algos", "irgcl-s,irgcl-p,ppm",
            "--sweep", "nc", "--values", "1,2,3", "--trials", "3",
            "--seed", "42", "--out", str(raw), "--aggregate-out", str(agg)]
    proc = subprocess.run(args, capture_output=True)
    assert proc.returncode == 0, proc.stderr.decode()
    return agg


def test_lac_aggregate_series_match_csv_exactly(tmp_path):
    agg = lac_aggregate_via_cli(tmp_path)
    spec = FigureSpec(str(agg), "nc", str(tmp_path / "lac.png"),
                      title="adversarial corruption")
    fig = render(spec)
    plotted = figure_series(fig)
    expected = load_series(str(agg), "nc")
    assert set(plotted) == set(expected)
    for algo, (xs, means, _stds) in expected.items():
        assert plotted[algo] == (xs, means)
    # the reweighted solvers recover exactly: their series are identically zero
    for algo in ("irgcl-s", "irgcl-p"):
        assert plotted[algo][1] == [0.0, 0.0, 0.0]


def test_render_deterministic_series(tmp_path):
    csv = tmp_path / "agg.csv"
    write_csv(csv, [
        "lbc,ppm,nc,1,20,0.5,0.2",
        "lbc,ppm,nc,2,20,0.75,0.25",
        "lbc,irgcl-p,nc,1,20,0.0,0.0",
        "lbc,irgcl-p,nc,2,20,0.01,0.005",
    ])
    a = figure_series(render(FigureSpec(str(csv), "nc", str(tmp_path / "a.png"))))
    b = figure_series(render(FigureSpec(str(csv), "nc", str(tmp_path / "b.png"))))
    assert a == b


def test_cli_entry_point(tmp_path):
    csv = tmp_path / "agg.csv"
    write_csv(csv, ["uniform,ppm,q,0.5,3,0.1,0.05"])
    out = tmp_path / "fig.png"
    assert main(["--input", str(csv), "--x", "q", "--out", str(out)]) == 0
    assert out.exists()
    assert main(["--input", str(csv), "--x", "nc", "--out", str(out)]) == 1
