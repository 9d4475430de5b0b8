import csv
import json

import pytest
from hypothesis import given, strategies as st

from lamperti_ou.cli import EXIT_CONFIG, EXIT_FAIL, EXIT_PASS, main
from lamperti_ou.config import parse_config
from lamperti_ou.errors import ConfigError

POISSON = "[model]\nfamily = CompoundPoissonDrift\nrate = 1\njump_law = constant\njump_param = 1\n"
DRIFT = "[model]\nfamily = DeterministicDrift\ndrift = 1\n"
STABLE = "[model]\nfamily = StableSubordinator\nalpha = 0.5\n"


def _run(tmp_path, text, command, *extra, name="run.ini"):
    cfg = tmp_path / name
    cfg.write_text(text)
    out = tmp_path / f"out_{command}_{len(list(tmp_path.iterdir()))}"
    code = main([command, "--config", str(cfg), "--out", str(out), "--quiet", *extra])
    return code, out


def test_parse_defaults_and_echo():
    cfg = parse_config(POISSON + "[experiment]\nname = stationarity\nt_list = 1, 5\nn_reps = 1e4\nseed = 7\n", "verify")
    assert cfg.params == {"t_list": (1.0, 5.0), "n_reps": 10_000}
    assert cfg.seed == 7
    echo = cfg.echo()
    assert echo["model"]["family"] == "CompoundPoissonDrift"
    assert echo["experiment"]["rel_tol"] == 1e-8


@pytest.mark.parametrize(
    "text, match",
    [
        ("[experiment]\nname = patie\n", "model"),
        ("[model]\ndrift = 1\n[experiment]\nname = patie\n", "'family'"),
        (DRIFT + "[experiment]\nname = patie\nbogus = 1\n", "'bogus'"),
        (DRIFT + "[experiment]\nname = nope\n", "unknown experiment"),
        (DRIFT + "[experiment]\nn_paths = 1\n", "'name'"),
        (DRIFT + "[experiment]\nname = patie\nn_paths = many\n", "n_paths"),
        (DRIFT + "[experiment]\nname = patie\nseed = -1\n", "seed"),
        (DRIFT + "[other]\nx = 1\n", "unknown section"),
        (DRIFT + "[experiment]\nname = patie\nrel_tol = 0.5\n", "rel_tol"),
    ],
)
def test_parse_errors(text, match):
    with pytest.raises(ConfigError, match=match):
        parse_config(text, "verify")


def test_seed_keeps_64_bits():
    cfg = parse_config(DRIFT + "[experiment]\nname = patie\nseed = 18446744073709551615\n", "verify")
    assert cfg.seed == 2**64 - 1


@given(seed=st.integers(0, 2**64 - 1), n=st.integers(1, 10**6), t=st.floats(0.01, 1e4))
def test_config_round_trip(seed, n, t):
    text = DRIFT + f"[experiment]\nname = stationarity\nseed = {seed}\nn_reps = {n}\nt_list = {t!r}\n"
    cfg = parse_config(text, "verify")
    assert (cfg.seed, cfg.params["n_reps"], cfg.params["t_list"]) == (seed, n, (t,))


def test_simulate_U_constant(tmp_path):
    code, out = _run(tmp_path, DRIFT + "[experiment]\nkind = U\nhorizon = 5\nn_points = 6\nn_reps = 2\n", "simulate")
    assert code == EXIT_PASS
    rows = list(csv.reader((out / "trajectory_0000.csv").open()))
    assert rows[0] == ["t", "value"]
    assert [float(v) for _, v in rows[1:]] == [1.0] * 6
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["files"] == ["manifest.json", "trajectory_0000.csv", "trajectory_0001.csv"]


@pytest.mark.parametrize("kind", ["X", "V", "U-stationary"])
def test_simulate_kinds(tmp_path, kind):
    code, out = _run(tmp_path, POISSON + f"[experiment]\nkind = {kind}\nhorizon = 3\nn_points = 4\n", "simulate")
    assert code == EXIT_PASS
    values = [float(r[1]) for r in list(csv.reader((out / "trajectory_0000.csv").open()))[1:]]
    assert len(values) == 4 and all(v > 0 for v in values)


def test_simulate_rerun_byte_identical(tmp_path):
    text = POISSON + "[experiment]\nkind = X\nhorizon = 20\nn_points = 50\nn_reps = 3\nseed = 11\n"
    cfg = tmp_path / "run.ini"
    cfg.write_text(text)
    out = tmp_path / "out"
    names = ("trajectory_0000.csv", "trajectory_0002.csv", "manifest.json")
    main(["simulate", "--config", str(cfg), "--out", str(out), "--quiet"])
    first = [(out / n).read_bytes() for n in names]
    main(["simulate", "--config", str(cfg), "--out", str(out), "--quiet", "--threads", "3"])
    assert [(out / n).read_bytes() for n in names] == first


def test_missing_family_exit_2(tmp_path, capsys):
    code, _ = _run(tmp_path, "[model]\ndrift = 1\n", "simulate")
    assert code == EXIT_CONFIG
    assert "'family'" in capsys.readouterr().err


def test_missing_config_file(tmp_path):
    assert main(["oracle", "--config", str(tmp_path / "none.ini"), "--quiet"]) == EXIT_CONFIG


def test_oracle_rows(tmp_path):
    code, out = _run(tmp_path, POISSON + "[experiment]\nn_max = 3\n", "oracle")
    assert code == EXIT_PASS
    rows = list(csv.reader((out / "oracle.csv").open()))
    assert rows[0] == ["model", "quantity", "n", "value"]
    assert rows[1][1:3] == ["moment", "1"]
    assert abs(float(rows[1][3]) - 1.581977) < 1e-6
    assert rows[-1][1:] == ["mean_inverse_hat_I", "", "1.0"]


def test_oracle_drift_and_stable(tmp_path):
    _, out = _run(tmp_path, "[model]\nfamily = DeterministicDrift\ndrift = 2\n", "oracle")
    rows = list(csv.reader((out / "oracle.csv").open()))[1:]
    assert [float(r[3]) for r in rows[:10]] == [2.0**-n for n in range(1, 11)]
    _, out = _run(tmp_path, STABLE, "oracle")
    assert list(csv.reader((out / "oracle.csv").open()))[-1][3] == "infinite"


def test_oracle_non_subordinator_exit_2(tmp_path):
    code, _ = _run(tmp_path, "[model]\nfamily = BrownianDrift\nsigma = 1\ndrift = 1\n", "oracle")
    assert code == EXIT_CONFIG


def test_verify_pass_and_fail(tmp_path):
    code, out = _run(tmp_path, POISSON + "[experiment]\nname = patie\nn_paths = 20\n", "verify")
    assert code == EXIT_PASS
    report = json.loads((out / "report.json").read_text())
    assert report["verdict"] == "pass"
    assert (out / "report.csv").read_text().startswith("experiment,model,stat,field,value,verdict")
    code, out = _run(tmp_path, POISSON + "[experiment]\nname = darling-kac\nn_reps = 10\n", "verify")
    assert code == EXIT_FAIL
    assert json.loads((out / "report.json").read_text())["verdict"] == "fail"


def test_verify_reps_override(tmp_path):
    code, out = _run(tmp_path, POISSON + "[experiment]\nname = patie\n", "verify", "--reps", "7")
    assert json.loads((out / "report.json").read_text())["params"]["n_paths"] == 7


def test_verify_stationarity_poisson(tmp_path):
    code, _ = _run(tmp_path, POISSON + "[experiment]\nname = stationarity\n", "verify", "--threads", "4")
    assert code == EXIT_PASS


def test_seed_flag_overrides(tmp_path):
    text = POISSON + "[experiment]\nname = patie\nn_paths = 5\nseed = 1\n"
    _, out = _run(tmp_path, text, "verify", "--seed", "99")
    assert json.loads((out / "report.json").read_text())["seed"] == 99
    code, _ = _run(tmp_path, text, "verify", "--seed", str(2**64))
    assert code == EXIT_CONFIG
