import csv
import io
import json
from pathlib import Path

import numpy as np
import pytest

from vexpdo.cli import EXIT_ACCEPTANCE, EXIT_CONFIG, EXIT_NUMERIC, EXIT_OK, main
from vexpdo.config import build_exponent, build_function, build_grid, build_symbol, parse_config
from vexpdo.errors import ConfigError
from vexpdo.grid import SampledFunction
from vexpdo.maximal import hl_maximal
from vexpdo.oracles import exhaustive_maximal

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def write(tmp_path, text, name="exp.ini"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def run(capsys, *argv):
    status = main(list(argv))
    out = capsys.readouterr()
    return status, out.out, out.err


def test_parse_defaults():
    cfg = parse_config("[grid]\nN = 64\n")
    g = build_grid(cfg)
    assert (g.dim, g.L, g.N) == (1, 10.0, 64)
    assert cfg.seed == 42
    assert build_exponent(cfg, g).is_constant


def test_unknown_section():
    with pytest.raises(ConfigError) as info:
        parse_config("[gird]\nN = 8\n")
    assert info.value.field == "gird"


def test_bad_number_names_field():
    with pytest.raises(ConfigError) as info:
        build_grid(parse_config("[grid]\nN = many\n"))
    assert info.value.field == "grid.N"


def test_affine_exponent():
    cfg = parse_config("[exponent]\nname = affine\nbase = log_holder_decay\nscale = 2\nshift = -1\n")
    g = build_grid(cfg)
    p = build_exponent(cfg, g)
    np.testing.assert_allclose(p.values, -1 + 2 * (2 + 1 / np.log(np.e + np.abs(g.axis))))


def test_random_function_is_seeded():
    cfg = parse_config("[experiment]\nseed = 3\n[function]\nname = random\n")
    g = build_grid(cfg)
    np.testing.assert_array_equal(build_function(cfg, g).values, build_function(cfg, g).values)


def test_composite_symbol():
    cfg = parse_config("[symbol]\nname = product\nleft = so_log_sine\nright = bracket_normalized\n")
    a = build_symbol(cfg, 1)
    x, xi = (np.array([2.0]),), (np.array([1.0]),)
    assert a(x, xi)[0] == pytest.approx(np.sin(np.log(np.sqrt(5))) * (1 + 1j) / 2)


def test_norm_json_and_csv(capsys):
    status, out, _ = run(capsys, "norm", "--config", str(CONFIGS / "norm.ini"))
    assert status == EXIT_OK
    rep = json.loads(out)
    assert rep["norm"]["value"] > 0 and rep["norm"]["iterations"] > 0
    status, out, _ = run(capsys, "norm", "--config", str(CONFIGS / "norm.ini"), "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["value", "iterations", "modular_at_value"] and len(rows) == 2
    assert float(rows[1][0]) == pytest.approx(rep["norm"]["value"])


def test_unknown_exponent_exit_2(tmp_path, capsys):
    path = write(tmp_path, "[exponent]\nname = bogus\n")
    status, _, err = run(capsys, "norm", "--config", path)
    assert status == EXIT_CONFIG and "[exponent] name" in err


def test_missing_config_exit_2(capsys):
    assert run(capsys, "norm")[0] == EXIT_CONFIG


def test_check_exponent_sweep(capsys):
    status, out, _ = run(capsys, "check-exponent", "--config", str(CONFIGS / "check_exponent.ini"))
    assert status == EXIT_OK
    reports = {r["condition"]: r for r in json.loads(out)["reports"]}
    consts = reports["log_holder_infinity_sweep"]["details"]["constants"]
    assert consts[0] < consts[1] < consts[2] and not reports["log_holder_infinity_sweep"]["holds"]
    assert reports["mstar"]["holds"]


def test_check_exponent_constant(tmp_path, capsys):
    path = write(tmp_path, "[exponent]\nname = constant\nvalue = 2\n[operation]\n"
                           "checks = bounds log_holder_local log_holder_infinity nekvinda\n")
    status, out, _ = run(capsys, "check-exponent", "--config", path)
    assert status == EXIT_OK
    for r in json.loads(out)["reports"]:
        assert r["holds"] and r["best_constant"] == 0.0


def test_check_exponent_infeasible_mstar(tmp_path, capsys):
    path = write(tmp_path, "[exponent]\nname = loglog_sine\n[operation]\nchecks = mstar\np0 = 1.1\ntheta = 0.9\n")
    status, out, err = run(capsys, "check-exponent", "--config", path)
    assert status == EXIT_NUMERIC
    assert json.loads(out)["reports"][0]["node"] == [0]
    assert "node (0,)" in err


def test_apply_identity(tmp_path, capsys):
    path = write(tmp_path, "[function]\nname = bump\nwidth = 2\n[symbol]\nname = one\n")
    status, out, _ = run(capsys, "apply", "--config", path)
    assert status == EXIT_OK and json.loads(out)["max_abs_deviation_from_input"] <= 1e-10


def test_apply_maximal_matches_oracle(tmp_path, capsys):
    path = write(tmp_path, "[grid]\nN = 32\n[function]\nname = indicator\nlo = 0\nhi = 1\n[operation]\noperator = M\n")
    status, out, _ = run(capsys, "apply", "--config", path)
    cfg = parse_config(Path(path).read_text())
    ref = exhaustive_maximal(build_function(cfg, build_grid(cfg)))
    np.testing.assert_allclose(json.loads(out)["values"]["real"], ref, atol=1e-12)


def test_apply_sharp_of_constant(tmp_path, capsys):
    path = write(tmp_path, "[function]\nname = constant\nvalue = 3\n[operation]\noperator = Msharp\n")
    status, out, _ = run(capsys, "apply", "--config", path, "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert status == EXIT_OK and all(float(r["real"]) == 0.0 for r in rows)


def test_apply_with_exponent(capsys):
    status, out, _ = run(capsys, "apply", "--config", str(CONFIGS / "apply.ini"))
    rep = json.loads(out)
    assert status == EXIT_OK and rep["lp_output"] > 0


def test_fredholm_one_with_default_probes(tmp_path, capsys):
    path = write(tmp_path, "[exponent]\nname = constant\nvalue = 2\n[symbol]\nname = one\n")
    out_path = tmp_path / "rep.json"
    status, _, _ = run(capsys, "fredholm", "--config", path, "--out", str(out_path))
    rep = json.loads(out_path.read_text())
    assert status == EXIT_OK and rep["verdict"] == "Fredholm-consistent"
    assert "defaults applied" in rep["notes"][0]
    assert out_path.with_suffix(".csv").read_text().startswith("side,family,index,description,ratio")


def test_fredholm_nonelliptic_exit_3(tmp_path, capsys):
    path = write(tmp_path, "[symbol]\nname = nonelliptic_demo\n")
    status, out, _ = run(capsys, "fredholm", "--config", path)
    assert status == EXIT_NUMERIC and json.loads(out)["verdict"] == "elliptic-fail"


def test_json_round_trip(capsys):
    _, out, _ = run(capsys, "fredholm", "--config", str(CONFIGS / "fredholm.ini"))
    assert json.dumps(json.loads(out), indent=2, sort_keys=True) + "\n" == out


def test_commands_are_deterministic(capsys):
    first = run(capsys, "apply", "--config", str(CONFIGS / "apply.ini"))
    assert run(capsys, "apply", "--config", str(CONFIGS / "apply.ini")) == first


def test_verify_only_modular(capsys):
    status, out, _ = run(capsys, "verify", "--only", "modular")
    lines = out.strip().splitlines()
    assert status == EXIT_OK and len(lines) == 4
    assert all(line.startswith("[PASS]") for line in lines)


def test_verify_tight_tolerance_fails(capsys):
    status, _, err = run(capsys, "verify", "--only", "modular", "--tolerance", "1e-16")
    assert status == EXIT_ACCEPTANCE and "criterion 1" in err


def test_verify_tolerance_from_config(tmp_path, capsys):
    path = write(tmp_path, "[tolerances]\noverride = 1e-16\n")
    assert run(capsys, "verify", "--config", path, "--only", "modular")[0] == EXIT_ACCEPTANCE


def test_verify_unknown_module(capsys):
    assert run(capsys, "verify", "--only", "nothing")[0] == EXIT_CONFIG
