import pytest

from xeblab import parse_circuit, parse_samples, read_distribution
from xeblab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_gen_writes_parseable_deterministic_file(tmp_path, capsys):
    path = tmp_path / "c.circ"
    code, _, _ = run(capsys, "gen", "--n", "4", "--depth", "8", "--seed", "7", "--out", str(path))
    assert code == 0
    first = path.read_bytes()
    c = parse_circuit(first.decode())
    assert c.n == 4 and c.seed == 7
    code, _, _ = run(capsys, "gen", "--n", "4", "--depth", "8", "--seed", "7", "--out", str(path))
    assert code == 0
    assert path.read_bytes() == first


def test_gen_grid_topology(tmp_path, capsys):
    path = tmp_path / "g.circ"
    code, _, _ = run(
        capsys, "gen", "--n", "6", "--depth", "4", "--topology", "grid",
        "--rows", "2", "--cols", "3", "--seed", "1", "--out", str(path),
    )
    assert code == 0
    assert parse_circuit(path.read_text()).n == 6


def test_gen_usage_errors(tmp_path, capsys):
    code, _, err = run(capsys, "gen", "--n", "0", "--depth", "2", "--out", str(tmp_path / "x"))
    assert code == 2
    code, _, err = run(
        capsys, "gen", "--n", "6", "--depth", "2", "--topology", "grid",
        "--rows", "2", "--cols", "4", "--out", str(tmp_path / "x"),
    )
    assert code == 2
    code, _, _ = run(capsys, "gen", "--n", "4")  # missing --out
    assert code == 2
    code, _, _ = run(capsys, "bogus-command")
    assert code == 2


def test_simulate_exports_binary(tmp_path, capsys):
    circ = tmp_path / "c.circ"
    out = tmp_path / "dist.bin"
    run(capsys, "gen", "--n", "5", "--depth", "6", "--seed", "3", "--out", str(circ))
    code, _, _ = run(capsys, "simulate", "--circuit", str(circ), "--out", str(out))
    assert code == 0
    dist = read_distribution(out)
    assert dist.n == 5
    assert dist.probs.sum() == pytest.approx(1.0, abs=1e-9)


def test_simulate_resource_cap(tmp_path, capsys):
    circ = tmp_path / "c.circ"
    run(capsys, "gen", "--n", "5", "--depth", "2", "--seed", "3", "--out", str(circ))
    code, _, err = run(
        capsys, "simulate", "--circuit", str(circ), "--max-qubits", "4",
        "--out", str(tmp_path / "d.bin"),
    )
    assert code == 4
    assert "MiB" in err


def test_simulate_missing_file(tmp_path, capsys):
    code, _, err = run(capsys, "simulate", "--circuit", str(tmp_path / "no.circ"), "--out", "-")
    assert code == 3


def test_sample_and_xeb_pipeline(tmp_path, capsys):
    circ = tmp_path / "c.circ"
    samples = tmp_path / "s.txt"
    run(capsys, "gen", "--n", "10", "--depth", "20", "--topology", "grid",
        "--rows", "2", "--cols", "5", "--seed", "11", "--out", str(circ))
    code, _, _ = run(
        capsys, "sample", "--sampler", "ideal", "--circuit", str(circ),
        "--k", "500", "--seed", "4", "--out", str(samples),
    )
    assert code == 0
    s = parse_samples(samples.read_text())
    assert s.k == 500 and s.distinct

    code, out, _ = run(capsys, "xeb", "--circuit", str(circ), "--samples", str(samples), "--b", "1.4")
    assert code == 0
    assert "xhog_pass=1" in out

    # uniform samples at the same threshold fail with exit 1
    run(capsys, "sample", "--sampler", "uniform", "--n", "10", "--k", "500",
        "--seed", "4", "--out", str(samples))
    code, out, _ = run(capsys, "xeb", "--circuit", str(circ), "--samples", str(samples), "--b", "1.4")
    assert code == 1
    assert "xhog_pass=0" in out


def test_xeb_csv_format(tmp_path, capsys):
    circ = tmp_path / "c.circ"
    samples = tmp_path / "s.txt"
    run(capsys, "gen", "--n", "4", "--depth", "4", "--seed", "2", "--out", str(circ))
    run(capsys, "sample", "--sampler", "topk", "--circuit", str(circ), "--k", "8",
        "--out", str(samples))
    code, out, _ = run(
        capsys, "xeb", "--circuit", str(circ), "--samples", str(samples),
        "--b", "1.1", "--format", "csv", "--seed", "2",
    )
    lines = out.splitlines()
    assert lines[0] == "n,k,score,b_implied,threshold_b,xhog_pass,fidelity_estimate,seed"
    assert lines[1].endswith(",2")


def test_xeb_dimension_mismatch_is_usage_error(tmp_path, capsys):
    circ = tmp_path / "c.circ"
    samples = tmp_path / "s.txt"
    run(capsys, "gen", "--n", "4", "--depth", "2", "--seed", "2", "--out", str(circ))
    run(capsys, "sample", "--sampler", "uniform", "--n", "5", "--k", "10",
        "--seed", "0", "--out", str(samples))
    code, _, err = run(capsys, "xeb", "--circuit", str(circ), "--samples", str(samples), "--b", "1.5")
    assert code == 2
    assert "n=" in err


def test_sample_file_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    for path in (a, b):
        run(capsys, "sample", "--sampler", "uniform", "--n", "8", "--k", "100",
            "--seed", "5", "--out", str(path))
    assert a.read_bytes() == b.read_bytes()


def test_sample_depolarizing_requires_circuit(capsys):
    code, _, err = run(capsys, "sample", "--sampler", "depolarizing", "--k", "5", "--out", "-")
    assert code == 2


def test_reduce_trivial_estimator(tmp_path, capsys):
    out = tmp_path / "trials.csv"
    code, text, _ = run(
        capsys, "reduce", "--estimator", "trivial", "--n", "4", "--depth", "2",
        "--trials", "50", "--seed", "3", "--out", str(out),
    )
    assert code == 0
    assert "scaled_gain=0.0" in text
    lines = out.read_text().splitlines()
    assert lines[0] == "seed,p0,p,X"
    assert len(lines) == 51
    assert all(line.endswith(",0.0") for line in lines[1:])


def test_reduce_deterministic_output(tmp_path, capsys):
    args = ("reduce", "--estimator", "paths", "--paths", "8", "--n", "4",
            "--depth", "3", "--trials", "40", "--seed", "9")
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    _, text_a, _ = run(capsys, *args, "--out", str(a))
    _, text_b, _ = run(capsys, *args, "--out", str(b))
    assert a.read_bytes() == b.read_bytes()
    assert text_a == text_b


def test_reduce_topk_beats_bound(capsys):
    code, text, _ = run(
        capsys, "reduce", "--estimator", "reduction-topk", "--n", "8", "--depth", "10",
        "--topology", "grid", "--rows", "2", "--cols", "4",
        "--b", "1.5", "--s", "1.0", "--trials", "1500", "--seed", "1",
    )
    assert code == 0
    fields = dict(
        line.split("=", 1) for line in text.strip().splitlines() if "=" in line
    )
    assert float(fields["scaled_gain"]) > 1.0  # guaranteed floor at s=1 is 1.0
    assert float(fields["solver_success_rate"]) == 1.0


def test_analyze_kl(capsys):
    code, out, _ = run(capsys, "analyze", "kl", "--b", "1.0")
    assert code == 0
    assert float(dict(l.split("=", 1) for l in out.strip().splitlines())["kl"]) < 1e-12

    code, out, _ = run(capsys, "analyze", "kl", "--b", "1.2", "--k", "25")
    fields = dict(l.split("=", 1) for l in out.strip().splitlines())
    assert abs(float(fields["kl"]) - 0.02) < 2 * 0.2**3
    assert float(fields["tv_bound"]) == pytest.approx(0.5, abs=1e-9)

    code, _, err = run(capsys, "analyze", "kl", "--b", "2.5")
    assert code == 2


def test_analyze_pt(tmp_path, capsys):
    code, out, _ = run(
        capsys, "analyze", "pt", "--n", "6", "--depth", "14", "--topology", "grid",
        "--rows", "2", "--cols", "3", "--circuits", "100", "--seed", "2",
    )
    assert code == 0
    assert "pass=1" in out
    code, out, _ = run(
        capsys, "analyze", "pt", "--n", "6", "--depth", "0", "--circuits", "5",
        "--seed", "2",
    )
    assert code == 1
    assert "pass=0" in out


def test_analyze_pt_dump(tmp_path, capsys):
    dump = tmp_path / "pooled.txt"
    code, out, _ = run(
        capsys, "analyze", "pt", "--n", "5", "--depth", "6", "--circuits", "4",
        "--seed", "2", "--dump-probs", str(dump),
    )
    assert code in (0, 1)
    values = [float(v) for v in dump.read_text().split()]
    assert len(values) == 4 * 32


def test_analyze_moments(capsys):
    code, out, _ = run(
        capsys, "analyze", "moments", "--n", "6", "--depth", "12", "--topology", "grid",
        "--rows", "2", "--cols", "3", "--phi", "0.5", "--circuits", "20",
        "--samples-per-circuit", "500", "--seed", "3",
    )
    assert code == 0
    fields = dict(l.split("=", 1) for l in out.strip().splitlines())
    assert float(fields["mean_expected"]) == 1.5
    assert abs(float(fields["mean_scaled"]) - 1.5) < 4 * float(fields["mean_se"])


def test_analyze_distinguish(capsys):
    code, out, _ = run(
        capsys, "analyze", "distinguish", "--b", "1.5", "--k", "60", "--trials", "200",
        "--n", "8", "--depth", "16", "--seed", "4",
    )
    assert code == 0
    assert float(out.split("=", 1)[1]) > 0.5


def test_threads_flag_accepted(tmp_path, capsys):
    code, text, _ = run(
        capsys, "--threads", "2", "reduce", "--estimator", "trivial", "--n", "4",
        "--depth", "2", "--trials", "40", "--seed", "3",
    )
    assert code == 0
    assert "scaled_gain=0.0" in text
