import json
import subprocess
import sys

import pytest

from graphband import cli
from graphband.graph import laplacian, load_edge_list, write_edge_list, write_signal
from graphband.instances import random_connected_graph
from graphband.localsets import read_partition
from graphband.spectral import eigendecompose, generate_bandlimited


@pytest.fixture
def gfile(tmp_path):
    path = tmp_path / "g.edges"
    write_edge_list(random_connected_graph(40, 2, extra_edge_prob=0.05), path)
    return path


def test_partition_one_hop(tmp_path, gfile, capsys):
    out = tmp_path / "p.csv"
    assert cli.main(["partition", "--graph", str(gfile), "--method", "one-hop", "--out", str(out)]) == 0
    stats = json.loads(capsys.readouterr().out)
    assert stats["Q_tilde_max"] <= 1
    assert read_partition(out, 40).n_vertices == 40


def test_partition_voronoi_and_errors(tmp_path, gfile):
    out = tmp_path / "p.csv"
    s_out = tmp_path / "s.txt"
    argv = ["partition", "--graph", str(gfile), "--method", "voronoi", "--out", str(out)]
    assert cli.main(argv + ["--k", "8", "--seed", "3", "--sampling-out", str(s_out)]) == 0
    assert len(s_out.read_text().split()) == 8
    assert cli.main(argv + ["--samples", str(s_out)]) == 0
    assert cli.main(argv) == 2


def test_reconstruct_and_certify(tmp_path, gfile):
    g = load_edge_list(gfile)
    p_out = tmp_path / "p.csv"
    cli.main(["partition", "--graph", str(gfile), "--method", "one-hop", "--out", str(p_out)])
    p = read_partition(p_out, 40)
    omega = 0.2
    truth = generate_bandlimited(eigendecompose(laplacian(g)).band(omega), 0)
    members = p.sampling_set.members
    (tmp_path / "samples.csv").write_text(
        "vertex,value\n" + "".join(f"{v},{float(truth[v])!r}\n" for v in members[::-1]))
    write_signal(tmp_path / "truth.csv", truth)
    rc = cli.main(["reconstruct", "--graph", str(gfile), "--method", "ipr", "--partition", str(p_out),
                   "--samples", str(tmp_path / "samples.csv"), "--omega", str(omega),
                   "--truth", str(tmp_path / "truth.csv"), "--out", str(tmp_path / "r.json"),
                   "--signal-out", str(tmp_path / "f.csv")])
    assert rc == 0
    rep = json.loads((tmp_path / "r.json").read_text())
    assert rep["termination"] == "converged"
    assert rep["errors"][-1] <= 1e-8
    assert len(rep["errors"]) == rep["iterations"] + 1
    rc = cli.main(["certify", "--graph", str(gfile), "--partition", str(p_out), "--omega", str(omega),
                   "--frame", "weighted", "--out", str(tmp_path / "c.json")])
    assert rc == 0
    cert = json.loads((tmp_path / "c.json").read_text())
    assert cert["satisfied"] and cert["hypothesis_holds"]
    assert cert["contraction_norm"] <= cert["gamma"] + 1e-9


def test_bad_graph_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.edges"
    bad.write_text("0 1\n1 oops\n")
    assert cli.main(["spectrum", "--graph", str(bad), "--out", str(tmp_path / "s.csv")]) == 2
    assert "bad.edges:2:" in capsys.readouterr().err


def test_spectrum(tmp_path, gfile):
    assert cli.main(["spectrum", "--graph", str(gfile), "--out", str(tmp_path / "s.csv")]) == 0
    rows = (tmp_path / "s.csv").read_text().splitlines()[1:]
    assert len(rows) == 40
    vals = [float(r.split(",")[1]) for r in rows]
    assert vals == sorted(vals) and vals[0] == 0.0


def test_experiment_subprocess(tmp_path, gfile):
    cfg = tmp_path / "e.cfg"
    cfg.write_text(f"experiment = convergence\ngraph = {gfile}\nmax_iterations = 20\nomegas = 0.2\n")
    res = subprocess.run([sys.executable, "-m", "graphband.cli", "experiment", "--config", str(cfg),
                          "--out", str(tmp_path / "o")], capture_output=True, text=True, check=True)
    assert "convergence.csv (21 rows)" in res.stdout
    assert (tmp_path / "o" / "manifest.json").exists()
