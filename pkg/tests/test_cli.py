import json

import pytest

from rthpower import io
from rthpower.cli import main
from rthpower.reference import data_path

PLATFORM = str(data_path("myriad1.toml"))
UNITS = str(data_path("myriad1", "unit_suite_model.csv"))
SUITE = str(data_path("myriad1", "intensity_suite_i025.csv"))


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_fit_units_split(capsys, tmp_path):
    out = tmp_path / "u.toml"
    code, text, _ = run(capsys, "fit-units", UNITS, "-o", out, "--train-cores", "1,2", "--format", "json")
    assert code == 0
    payload = json.loads(text)
    assert payload["p_sta"] == pytest.approx(62.125)
    assert payload["validation_max_abs_pe"] < 1e-9
    assert io.read_platform(out).profile.ops["VAUMUL"] == pytest.approx(52.6)


def test_fit_units_underdetermined(capsys, tmp_path):
    code, _, err = run(capsys, "fit-units", UNITS, "-o", tmp_path / "u.toml", "--train-cores", "1")
    assert code == 4 and "2 distinct core counts" in err


def test_fit_intensity_updates_in_place(capsys, tmp_path):
    plat = tmp_path / "p.toml"
    run(capsys, "fit-units", UNITS, "-o", plat)
    code, text, _ = run(capsys, "fit-intensity", plat, SUITE, "--format", "json")
    assert code == 0
    (point,) = json.loads(text)["points"]
    assert point["intensity"] == 0.25
    pf = io.read_platform(plat)
    assert pf.grid.intensities == (0.25,)
    assert pf.residuals[0.25] == pytest.approx(point["residual_rms_mw"])


def test_fit_intensity_missing_rows(capsys, tmp_path):
    code, _, err = run(capsys, "fit-intensity", PLATFORM, SUITE, "--intensity", "2", "-o", tmp_path / "x.toml")
    assert code == 4 and "no records" in err


def test_predict(capsys):
    code, text, _ = run(capsys, "predict", PLATFORM, "--intensity", "0.25", "--cores", "8", "--format", "json")
    assert code == 0
    payload = json.loads(text)
    assert payload["power_mw"] == pytest.approx(payload["raw_power_mw"] * payload["beta"])
    code, text, _ = run(capsys, "predict", PLATFORM, "--intensity", "0.25", "--cores", "8", "--beta", "1")
    assert text.startswith(f"{payload['raw_power_mw']:.6f} mW")


@pytest.mark.parametrize(
    "argv, code",
    [
        (["--intensity", "0.25", "--cores", "9"], 6),
        (["--intensity", "0", "--cores", "2"], 5),
        (["--intensity", "1", "--cores", "2", "--mix", "FPU"], 7),
    ],
)
def test_predict_errors(capsys, argv, code):
    assert run(capsys, "predict", PLATFORM, *argv)[0] == code


def test_predict_without_grid(capsys, tmp_path):
    plat = tmp_path / "p.toml"
    run(capsys, "fit-units", UNITS, "-o", plat)
    code, _, err = run(capsys, "predict", plat, "--intensity", "1", "--cores", "2")
    assert code == 9 and "fit-intensity" in err


def test_decide(capsys):
    code, text, _ = run(capsys, "decide", PLATFORM, data_path("apps", "micro_60.toml"))
    assert code == 0 and "do not use RTH" in text
    code, text, _ = run(capsys, "decide", PLATFORM, data_path("apps", "spmv_128.toml"), "--format", "json")
    payload = json.loads(text)
    assert payload["use_rth"] and payload["energy_saving"] == pytest.approx(0.5928)


def test_decide_missing_metadata(capsys, tmp_path):
    meta = tmp_path / "m.toml"
    meta.write_text("name = 'x'\nintensity = 1.0\nmix = ['SAUXOR']\n")
    assert run(capsys, "decide", PLATFORM, meta)[0] == 8
    meta.write_text("name = 'x'\nintensity = {coefficient = 0.125, exponent = 1.0}\nparallel_fraction = 0.9\n")
    assert run(capsys, "decide", PLATFORM, meta)[0] == 8
    code, text, _ = run(capsys, "decide", PLATFORM, meta, "--size", "64")
    assert code == 0 and "amdahl" in text


def test_validate_self_consistency(capsys):
    code, text, _ = run(capsys, "validate", PLATFORM, UNITS, "--threshold", "0.1", "--format", "json")
    payload = json.loads(text)
    assert code == 0 and payload["pass"] and payload["max_abs_pe"] <= 1e-3
    assert len(payload["group_max_abs_pe"]) == 26


def test_validate_threshold(capsys):
    code, text, _ = run(capsys, "validate", PLATFORM, SUITE, "--threshold", "1")
    assert code == 1 and "FAIL" in text
    code, text, _ = run(capsys, "validate", PLATFORM, SUITE, "--threshold", "7")
    assert code == 0 and "PASS" in text


def test_parse_error_exit(capsys, tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("x,y\n1,2\n")
    code, _, err = run(capsys, "validate", PLATFORM, bad, "--threshold", "1")
    assert code == 3 and "expected header" in err


def test_usage_error(capsys):
    with pytest.raises(SystemExit) as info:
        main(["predict"])
    assert info.value.code == 2


def test_validate_perturbed_data(capsys, tmp_path):
    recs = io.read_measurements(UNITS)
    scaled = tmp_path / "up.csv"
    io.write_measurements(scaled, [type(r)(r.benchmark, r.intensity, r.cores, 1.1 * r.power) for r in recs])
    code, text, _ = run(capsys, "validate", PLATFORM, scaled, "--threshold", "5", "--format", "json")
    payload = json.loads(text)
    assert code == 1 and not payload["pass"]
    # measured is 10% above the model: (1.1 - 1) / 1.1
    assert all(s["pe"] == pytest.approx(1 / 11) for s in payload["samples"])


def test_validate_empty_file(capsys, tmp_path):
    empty = tmp_path / "e.csv"
    empty.write_text("")
    assert run(capsys, "validate", PLATFORM, empty, "--threshold", "1")[0] == 3
