import csv

import pytest

from wgl import cli
from wgl.checks import CheckReport
from wgl.cli import (
    EXIT_FAILED, EXIT_OK, EXIT_REFUSED, EXIT_USAGE, ConfigError, ResultTable, emit_svg_plot, format_csv,
    main, parse_config, read_csv, run, write_csv,
)
from wgl.growth import SWEEP_HEADER


def test_parse_minimal_sweep():
    cfg = parse_config("command = sweep\nphase = cos1d\n")
    assert cfg.command == "sweep" and cfg.target == "cos1d"
    assert cfg.params == {} and cfg.sweep == {}


def test_parse_lambda_list_sorted():
    cfg = parse_config("command = sweep\nphase = cos1d\n[sweep]\nlambda = [32, 8, 16]\n")
    assert cfg.sweep["lambda"] == [8, 16, 32]
    cfg = parse_config("command = boxdim\ncurve = weierstrass_graph\n[covering]\nepsilons = [0.25, 0.5, 0.125, 0.0625]\n")
    assert cfg.covering["epsilons"] == [0.5, 0.25, 0.125, 0.0625]


def test_parse_errors_carry_line_numbers():
    text = "command = sweep\nphase = cos1d\n[sweep]\ntol = -1\nbogus = 3\n[nowhere]\n"
    with pytest.raises(ConfigError) as exc:
        parse_config(text)
    lines = [n for n, _ in exc.value.errors]
    assert lines == [4, 5, 6]
    assert "line 4" in str(exc.value)


@pytest.mark.parametrize("text", [
    "phase = cos1d\n",
    "command = fly\n",
    "command = sweep\nphase = nope\n",
    "command = sweep\nphase = cos1d\ncurve = cos\n",
    "command = norm\ncurve = cos\n",
    "command = sweep\nphase = cos1d\n[phase]\nwidth = 3\n",
    "command = sweep\nphase = cos1d\n[sweep]\nlambda = [1, 1]\n",
    "command = sweep\nphase = cos1d\ncommand = norm\n",
    "command = report\n",
    "command = sweep\nphase = cos1d\njunk line\n",
])
def test_parse_rejections(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_number_formatting_round_trips():
    t = ResultTable(("x", "flag", "n"), [(1 / 3, True, 7)], ["p"])
    text = format_csv(t)
    assert "0.33333333333333331,true,7" in text
    assert float("0.33333333333333331") == 1 / 3


def test_empty_rows_give_header_and_provenance():
    t = ResultTable(SWEEP_HEADER, [], ["wgl test", "status: complete"])
    assert format_csv(t) == "# wgl test\n# status: complete\nphase,lambda,a_norm,converged,predicted_count,seconds\n"
    with pytest.raises(ValueError):
        ResultTable(("a", "b"), [(1,)], [])


def test_csv_round_trip(tmp_path):
    t = ResultTable(("a", "b"), [(1.5, "x")], ["status: incomplete"], complete=False)
    path = tmp_path / "t.csv"
    write_csv(t, path)
    back = read_csv(path)
    assert back.header == ("a", "b") and back.rows == [("1.5", "x")] and not back.complete


def test_norm_lambda_zero():
    table = run(parse_config("command = norm\nphase = cos1d\n[sweep]\nlambda = 0\n"))
    assert len(table.rows) == 1
    assert table.rows[0][2] == pytest.approx(1.0, abs=1e-15) and table.rows[0][3] is True
    assert table.complete


def test_sweep_table_has_fit_row():
    text = "command = sweep\nphase = cos_abs2d\n[sweep]\nlambda = [8, 16, 32, 64]\n[covering]\nsamples = 10000\n"
    table = run(parse_config(text))
    assert table.header == SWEEP_HEADER
    assert [r[1] for r in table.rows[:-1]] == [8, 16, 32, 64]
    assert table.rows[-1][0] == "fit" and table.rows[-1][3] in ("consistent", "inconsistent", "inconclusive")
    assert any(line.startswith("note: verdict") for line in table.provenance)
    assert all(r[-1] == "" for r in table.rows)


def test_sweep_without_curve_has_na_verdict():
    table = run(parse_config("command = sweep\nphase = pwlin1d\n[sweep]\nlambda = [8, 16, 32, 64]\n"))
    assert table.rows[-1][:1] == ("fit",) and table.rows[-1][3] == "n/a"


def test_boxdim_and_curve_tables():
    table = run(parse_config("command = boxdim\ncurve = cos\n[covering]\nsamples = 20000\n"))
    assert table.header == ("epsilon", "count") and len(table.rows) == 8
    assert any("dimension fit" in line for line in table.provenance)
    stats = dict(run(parse_config("command = curve\ncurve = circle\n[covering]\nsamples = 1000\n")).rows)
    assert stats["k"] == 1 and stats["m"] == 2 and stats["sup_norm"] <= stats["sup_norm_bound"] + 1e-12


def test_resource_failure_marks_table_incomplete():
    cfg = parse_config("command = sweep\nphase = cos_abs2d\n[sweep]\nlambda = [8, 16]\n")
    from dataclasses import replace
    table = run(replace(cfg, mem_gib=1e-6))
    assert not table.complete and "status: incomplete" in table.provenance


def test_provenance_is_deterministic():
    cfg = parse_config("command = norm\nphase = cos1d\n[sweep]\nlambda = [1, 2]\n")
    assert format_csv(run(cfg)) == format_csv(run(cfg))


def sweep_table():
    rows = [("p", 8, 2.0, True, 4, ""), ("p", 16, 4.0, True, 8, ""), ("fit", "", 1.0, "consistent", 1.0, "")]
    return ResultTable(SWEEP_HEADER, rows, [])


def test_svg_two_series_and_legend():
    svg = emit_svg_plot(sweep_table(), x="lambda", ys=["a_norm", "predicted_count"])
    assert svg.count("<polyline") == 2 and "slope 1.000" in svg
    assert svg == emit_svg_plot(sweep_table(), x="lambda", ys=["a_norm", "predicted_count"])


def test_svg_single_point_is_marker():
    t = ResultTable(("lambda", "a_norm"), [(8, 2.0)], [])
    svg = emit_svg_plot(t)
    assert "<circle" in svg and "<polyline" not in svg


def test_svg_skips_nonpositive_on_log_axes():
    t = ResultTable(("lambda", "a", "b"), [(1, 1.0, 0.0), (2, 2.0, 1.0)], [])
    with pytest.warns(UserWarning, match="skipped"):
        svg = emit_svg_plot(t)
    assert "b: skipped" in svg and svg.count("<polyline") == 1
    with pytest.raises(ValueError):
        emit_svg_plot(t, axes="polar")


def test_main_exit_codes(monkeypatch, tmp_path, capsys):
    ok = [CheckReport.from_margin("a", 1.0)]
    monkeypatch.setattr(cli, "run_all", lambda: ok)
    assert main(["check"]) == EXIT_OK
    monkeypatch.setattr(cli, "run_all", lambda: [CheckReport.from_margin("a", -1.0)])
    assert main(["check"]) == EXIT_FAILED
    monkeypatch.setattr(cli, "run_all", lambda: ok + [CheckReport.refusal("b", "no")])
    assert main(["check"]) == EXIT_REFUSED
    bad = tmp_path / "bad.cfg"
    bad.write_text("phase = cos1d\n[sweep]\ntol = -1\n")
    assert main(["sweep", "--config", str(bad)]) == EXIT_USAGE
    assert ":3:" in capsys.readouterr().err
    assert main(["norm"]) == EXIT_USAGE
    assert main(["check", "--workers", "0"]) == EXIT_USAGE
    mismatch = tmp_path / "m.cfg"
    mismatch.write_text("command = norm\nphase = cos1d\n")
    assert main(["sweep", "--config", str(mismatch)]) == EXIT_USAGE


def test_main_writes_csv_and_plot(tmp_path):
    cfg = tmp_path / "n.cfg"
    cfg.write_text("phase = cos1d\n[sweep]\nlambda = [1, 2, 4]\n")
    out = tmp_path / "n.csv"
    assert main(["norm", "--config", str(cfg), "--out", str(out), "--plot"]) == EXIT_OK
    rows = [r for r in csv.reader(l for l in open(out) if not l.startswith("#"))]
    assert rows[0][:3] == ["phase", "lambda", "a_norm"] and len(rows) == 4
    assert (tmp_path / "n.svg").read_text().startswith("<svg")
    rep = tmp_path / "r.cfg"
    rep.write_text(f"[output]\ninput = {out}\n")
    out2 = tmp_path / "r.csv"
    assert main(["report", "--config", str(rep), "--out", str(out2)]) == EXIT_OK
    assert [r for r in csv.reader(l for l in open(out2) if not l.startswith("#"))] == rows
