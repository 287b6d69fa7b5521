import json
import subprocess
import sys

import pytest

from fhsoftedge import __version__
from fhsoftedge.cli import RunConfig, build_parser, config_from_args, main, run


def _run(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def _rows(text):
    lines = [l for l in text.splitlines() if not l.startswith("#")]
    header = lines[0].split(",")
    return header, [dict(zip(header, l.split(","))) for l in lines[1:]]


def test_recurrence_hermite(capsys):
    code, out, _ = _run(["recurrence", "--alpha", "0", "--omega-re", "1", "--n", "10"], capsys)
    assert code == 0
    _, rows = _rows(out)
    assert len(rows) == 10 and all(abs(float(r["a_k"])) < 1e-14 for r in rows)


def test_recurrence_generalized_hermite(capsys):
    _, out, _ = _run(["recurrence", "--alpha", "0.7", "--mu", "0", "--omega-re", "1", "--n", "6"], capsys)
    _, rows = _rows(out)
    b2 = [float(r["b2_k"]) for r in rows]
    for k in range(1, 6):
        assert b2[k] == pytest.approx(k / 2 if k % 2 == 0 else (k + 1.4) / 2, rel=1e-13)


def test_validation_exit_code(capsys):
    code, _, err = _run(["recurrence", "--alpha", "-0.6", "--n", "3"], capsys)
    assert code == 2
    msg = json.loads(err)
    assert msg["error"] == "ValidationError" and "-1/2" in msg["message"]


def test_sigma_trivial_and_tail(capsys):
    _, out, _ = _run(["sigma", "--alpha", "0", "--omega-re", "1", "--n-grid", "7"], capsys)
    _, rows = _rows(out)
    assert all(float(r["sigma"]) == 0 for r in rows)
    _, out, _ = _run(["sigma", "--alpha", "0.25", "--omega-re", "0", "--s-min", "-10", "--n-grid", "3"], capsys)
    _, rows = _rows(out)
    assert float(rows[0]["sigma"]) == pytest.approx(25, abs=1e-3)


def test_p34_plus_tail(capsys):
    _, out, _ = _run(["p34", "--alpha", "1", "--omega-re", "1", "--s-min", "90", "--s-max", "100",
                      "--n-grid", "3"], capsys)
    _, rows = _rows(out)
    assert float(rows[-1]["u"]) == pytest.approx(0.1 * (1 - 1e-3), rel=1e-5)


def test_kernel_airy_row(capsys):
    from fhsoftedge.kernel import airy_kernel

    _, out, _ = _run(["kernel", "--alpha", "0", "--omega-re", "1", "--s", "0", "--points", "1,2"], capsys)
    _, rows = _rows(out)
    r = [r for r in rows if r["v1"] == "1.0" and r["v2"] == "2.0"][0]
    assert float(r["K"]) == pytest.approx(float(airy_kernel(1.0, 2.0)), rel=1e-9)


def test_cdf_two_routes(capsys):
    _, a, _ = _run(["cdf", "--alpha", "0", "--omega-re", "0", "--s", "0"], capsys)
    _, b, _ = _run(["cdf", "--alpha", "0", "--omega-re", "0", "--s", "0", "--route", "pii"], capsys)
    fa = float(_rows(a)[1][0]["F"])
    fb = float(_rows(b)[1][0]["F"])
    assert abs(fa - fb) < 1e-6


def test_converge_recurrence_decreasing(capsys):
    _, out, _ = _run(["converge", "--target", "recurrence", "--alpha", "0", "--omega-re", "0.5",
                      "--n", "16,64,256", "--format", "json"], capsys)
    obj = json.loads(out)
    cols = obj["columns"]
    for q in ("a_n", "b_n"):
        err = [r[cols.index("error")] for r in obj["rows"] if r[0] == q]
        assert err[0] > err[1] > err[2]
    assert obj["version"] == __version__ and obj["config"]["subcommand"] == "converge"


def test_complex_columns_and_label(capsys):
    _, out, _ = _run(["cdf", "--route", "finite", "--s=0", "--n", "8", "--alpha", "0.2",
                      "--omega-re", "0.5", "--omega-im", "0.2"], capsys)
    header, rows = _rows(out)
    assert "F_re" in header and "F_im" in header
    assert rows[0]["label"] == "non-probabilistic"


def test_config_round_trip():
    ns = build_parser().parse_args(["converge", "--target", "kernel", "--n", "16,32", "--s=-1,0",
                                    "--omega-re", "0.5", "--omega-im", "-0.1"])
    cfg = config_from_args(ns)
    again = RunConfig.from_json(cfg.to_json())
    assert again == cfg and again.to_json() == cfg.to_json()
    assert cfg.omega == complex(0.5, -0.1)


def test_deterministic_output_and_env_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("FHSOFTEDGE_OUTPUT_DIR", str(tmp_path))
    assert main(["sigma", "--alpha", "0.5", "--omega-re", "0.5", "--n-grid", "9"]) == 0
    first = (tmp_path / "sigma.csv").read_bytes()
    assert main(["sigma", "--alpha", "0.5", "--omega-re", "0.5", "--n-grid", "9"]) == 0
    assert (tmp_path / "sigma.csv").read_bytes() == first
    assert b"# config:" in first and __version__.encode() in first


def test_workers_give_same_rows():
    ns = build_parser().parse_args(["cdf", "--route", "finite", "--s=-1,0,1", "--n", "12", "--omega-re", "0.5"])
    cfg = config_from_args(ns)
    serial = run(cfg)
    cfg.workers = 2
    assert run(cfg) == serial.replace('"workers": 1', '"workers": 2')


def test_console_entry_point_version():
    out = subprocess.run([sys.executable, "-m", "fhsoftedge.cli", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and __version__ in out.stdout
