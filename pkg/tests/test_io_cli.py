import json
import math

import pytest

from tightleak import cli
from tightleak.io import (
    CSV_COLUMNS,
    ConfigError,
    RunConfig,
    config_from_dict,
    load_config,
    read_csv,
    read_json,
    write_csv,
    write_json,
)
from tightleak.keyrate import finite_rate, sweep
from tightleak.ldpc.crs import deserialize_crs
from tightleak.plan import code_plan, nearest_regular_code
from tightleak.protocol import ChannelParams, Detection, Direction, ProtocolConfig, loss_db_to_tau


# -- config ----------------------------------------------------------------------

def test_defaults_are_the_common_operating_point():
    run = config_from_dict({})
    assert run == RunConfig()
    assert run.xi == 0.01 and run.N == 200_000 and run.loss_db == 0.02
    assert run.protocol.eta_d == 0.8 and run.protocol.u_el == 0.01 and run.protocol.d == 4


def test_config_overrides(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"detection": "het", "direction": "rr", "d": 6, "V": 12,
                                "n_ratio": 0.7, "N": 100000, "p_ec": 0.4}))
    run = load_config(path)
    assert run.protocol.detection is Detection.HETERODYNE
    assert run.protocol.direction is Direction.RR
    assert (run.protocol.d, run.V, run.n_ratio, run.N, run.protocol.p_ec) == (6, 12.0, 0.7, 100000, 0.4)


@pytest.mark.parametrize("raw", [
    {"bogus": 1}, {"d": 0}, {"N": 2.5}, {"N": 1}, {"V": -1}, {"n_ratio": 1.0},
    {"xi": -0.1}, {"detection": "both"}, {"p_ec": 0},
])
def test_bad_configs(raw):
    with pytest.raises(ConfigError):
        config_from_dict(raw)


def test_unreadable_and_malformed_configs(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "nope.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError, match="line 1"):
        load_config(bad)
    arr = tmp_path / "arr.json"
    arr.write_text("[1, 2]")
    with pytest.raises(ConfigError):
        load_config(arr)


# -- record output ---------------------------------------------------------------

def _points():
    cfg = ProtocolConfig()
    out = []
    for db, V in [(0.02, 15.0), (0.5, 3.3333333333333335), (6.0, 15.0)]:
        ch = ChannelParams(loss_db_to_tau(db), 0.01, V)
        out.append(finite_rate(cfg, ch, 200_000, 150_001, loss_db=db))
    return out


def test_csv_round_trip(tmp_path):
    pts = _points()
    path = tmp_path / "r.csv"
    write_csv(pts, path, "loss_db")
    header = path.read_text().splitlines()[0].split(",")
    assert header[: 1 + len(CSV_COLUMNS)] == ["loss_db", *CSV_COLUMNS]
    back = read_csv(path)
    assert back == pts


def test_csv_round_trip_with_nan_fields(tmp_path):
    # a point with no feasible code carries NaN code diagnostics
    cfg = ProtocolConfig(d=1)
    p = finite_rate(cfg, ChannelParams(0.01, 0.05, 0.5), 1000, 900)
    path = tmp_path / "nan.csv"
    write_csv([p], path, "N")
    (q,) = read_csv(path)
    for name in p.field_names():
        a, b = getattr(p, name), getattr(q, name)
        assert (a == b) or (isinstance(a, float) and math.isnan(a) and math.isnan(b))


def test_json_round_trip(tmp_path):
    pts = _points()
    path = tmp_path / "r.json"
    write_json(pts, path)
    assert read_json(path) == pts
    json.loads(path.read_text())  # strict JSON, no NaN tokens


# -- code plan -------------------------------------------------------------------

def test_nearest_regular_code():
    assert nearest_regular_code(0.78) == (2, 9, pytest.approx(7 / 9))
    assert nearest_regular_code(0.7949) == (2, 10, pytest.approx(0.8))
    assert nearest_regular_code(0.5) == (2, 4, 0.5)
    # exactly halfway between d_c = 5 and d_c = 6 goes to the smaller row weight
    mid = (0.6 + 2 / 3) / 2
    assert nearest_regular_code(mid)[1] == 5


def test_code_plan_reports_storage():
    rep = code_plan(RunConfig(V=15.0, n_ratio=0.8))
    assert rep["feasible"]
    assert rep["R_synd_star"] + rep["R_code_star"] == pytest.approx(1.0)
    assert rep["d_c"] in (8, 9) and rep["d_v"] == 2
    assert rep["m_sparse_star_MB"] == pytest.approx(rep["m_sparse_star_bits"] / 8e6)
    assert rep["H_k_given_y"] < rep["H_k"]


def test_code_plan_infeasible():
    run = RunConfig(protocol=ProtocolConfig(d=1), V=0.5, n_ratio=0.9, N=1000, loss_db=20.0)
    rep = code_plan(run)
    assert rep["feasible"] is False and "reason" in rep


def test_code_plan_toward_perfect_correlation():
    cfg = ProtocolConfig(eta_d=1.0, u_el=0.0, d=2)
    rates = [code_plan(RunConfig(protocol=cfg, xi=0.0, loss_db=0.0, V=V, n_ratio=0.9,
                                 N=10**9))["R_code_star"] for V in (10.0, 1e3, 1e5)]
    assert rates[0] < rates[1] < rates[2] and rates[2] > 0.9


# -- command line ----------------------------------------------------------------

def test_parse_helpers():
    assert cli.parse_range("0:0.1:0.3") == [0.0, 0.1, 0.2, 0.3]
    assert cli.parse_range("1:1:1") == [1.0]
    assert cli.parse_list("100000,2e5") == [100000, 200000]
    for bad in ("0:0:1", "1:0.1:0", "a:b:c"):
        with pytest.raises(cli.UsageError):
            cli.parse_range(bad)
    with pytest.raises(cli.UsageError):
        cli.parse_list("1.5")


def test_cli_rate_vs_loss_is_deterministic(tmp_path, capsys):
    args = ["rate-vs-loss", "--db", "0:0.5:1", "--out", str(tmp_path / "a")]
    assert cli.run(args) == 0
    assert cli.run(["rate-vs-loss", "--db", "0:0.5:1", "--out", str(tmp_path / "b")]) == 0
    a = (tmp_path / "a" / "rate_vs_loss.csv").read_bytes()
    assert a == (tmp_path / "b" / "rate_vs_loss.csv").read_bytes()
    recs = read_csv(tmp_path / "a" / "rate_vs_loss.csv")
    assert [r.loss_db for r in recs] == [0.0, 0.5, 1.0]
    assert recs[0].R > recs[1].R > 0


def test_cli_infeasible_sweep(tmp_path):
    assert cli.run(["rate-vs-loss", "--db", "5:1:6", "--out", str(tmp_path)]) == 1


def test_cli_blocksize_json(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"V": 15, "n_ratio": 0.8}))
    code = cli.run(["rate-vs-blocksize", "--config", str(cfg), "--bigN", "100000,200000",
                    "--format", "json", "--out", str(tmp_path)])
    assert code == 0
    recs = read_json(tmp_path / "rate_vs_blocksize.json")
    assert [r.N for r in recs] == [100000, 200000] and recs[1].R > recs[0].R


def test_cli_flags_switch_protocol(tmp_path):
    assert cli.run(["rate-vs-loss", "--db", "0:1:0", "--rr", "--heterodyne",
                    "--out", str(tmp_path)]) == 0
    (rec,) = read_csv(tmp_path / "rate_vs_loss.csv")
    het_rr = _optimized_point("het", "rr")
    assert rec.R == pytest.approx(het_rr.R, rel=1e-12)


def _optimized_point(det, dirn):
    cfg = ProtocolConfig(detection=det, direction=dirn)
    return sweep(cfg, "loss_db", [0.0], xi=0.01)[0]


def test_cli_gen_parity(tmp_path, capsys):
    out = tmp_path / "h.crs"
    code = cli.run(["gen-parity", "--hn", "6760", "--d", "4", "--dv", "2", "--dc", "9",
                    "--seed", "7", "--rcode-star", "0.78", "-o", str(out)])
    assert code == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["hn"] == 6759 and rep["truncated"] is True
    assert rep["serialized_bytes"] == out.stat().st_size
    assert 1.0 <= rep["size_over_prediction"] <= 1.3
    h = deserialize_crs(out)
    assert h.n_cols == 6759 and h.d_c == 9 and h.seed == 7
    again = tmp_path / "h2.crs"
    cli.run(["gen-parity", "--hn", "6760", "--d", "4", "--dc", "9", "--seed", "7", "-o", str(again)])
    assert again.read_bytes() == out.read_bytes()


def test_cli_storage_report_reads_file(tmp_path, capsys):
    out = tmp_path / "h.crs"
    cli.run(["gen-parity", "--hn", "900", "--d", "4", "--dc", "9", "-o", str(out)])
    capsys.readouterr()
    assert cli.run(["storage-report", "--crs", str(out)]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["serialized_bytes"] == out.stat().st_size and rep["r"] == 200
    bad = tmp_path / "bad.crs"
    bad.write_bytes(b"nonsense")
    assert cli.run(["storage-report", "--crs", str(bad)]) == 2


def test_cli_code_plan(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"V": 15, "n_ratio": 0.8}))
    assert cli.run(["code-plan", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "code_plan.json").read_text())
    assert rep["feasible"] and rep["d_v"] == 2
    cfg.write_text(json.dumps({"V": 0.5, "n_ratio": 0.9, "N": 1000, "loss_db": 20, "d": 1}))
    assert cli.run(["code-plan", "--config", str(cfg)]) == 1


@pytest.mark.parametrize("argv", [
    ["rate-vs-loss", "--db", "nonsense"],
    ["rate-vs-loss", "--config", "/does/not/exist.json"],
    ["gen-parity", "--hn", "100", "--d", "4", "--dv", "9", "--dc", "9"],
    ["gen-parity", "--hn", "100", "--d", "12", "--dc", "9"],
    ["gen-parity", "--hn", "5", "--d", "4", "--dc", "9"],
    ["gen-parity", "--hn", "90", "--d", "4", "--dc", "9", "--seed", "-1"],
    ["no-such-command"],
    [],
])
def test_cli_usage_errors(argv, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert cli.run(argv) == 2


def test_cli_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert cli.run(["rate-vs-loss", "--db", "0:1:0", "--out", str(blocker / "sub")]) == 2


def test_cli_selftest(capsys):
    assert cli.run(["selftest"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines and all(line.startswith("PASS") for line in lines)


def test_cli_help_exits_cleanly():
    assert cli.run(["--help"]) == 0
