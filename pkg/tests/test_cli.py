import csv
import io
import json
import subprocess
import sys

import pytest

from asymsob.cli import main, run_config_from_dict, ConfigError
from asymsob.presets import load_preset, preset_names

SQUARE = {"type": "polytopeV", "dim": 2, "vertices": [[1, 1], [-1, 1], [-1, -1], [1, -1]]}
INTERVAL = {"type": "polytopeV", "dim": 1, "vertices": [[-1], [2]]}


@pytest.fixture
def body_files(tmp_path):
    sq = tmp_path / "square.json"
    sq.write_text(json.dumps(SQUARE), encoding="utf-8")
    iv = tmp_path / "interval_-1_2.json"
    iv.write_text(json.dumps(INTERVAL), encoding="utf-8")
    return sq, iv


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_body_eval(body_files, capsys):
    code, out, _ = run(["body", "eval", "--body", str(body_files[0]), "--x", "2,1"], capsys)
    assert code == 0 and json.loads(out) == {"gauge": 2}


def test_body_moment_norm(body_files, capsys):
    code, out, _ = run(["body", "moment-norm", "--body", str(body_files[1]), "--p", "1", "--sign", "plus", "--v", "1"], capsys)
    assert code == 0 and json.loads(out)["norm"] == pytest.approx(4.0, abs=1e-14)


def test_body_moment_norm_mc(capsys):
    code, out, _ = run(["body", "moment-norm", "--body", json.dumps(SQUARE), "--p", "1.5", "--v", "1,0", "--method", "mc", "--seed", "3", "--samples", "20000"], capsys)
    d = json.loads(out)
    assert code == 0 and d["method"] == "mc" and d["std_error"] > 0


def test_body_moment_norm_needs_mc_without_exact_path(capsys):
    code, _, err = run(["body", "moment-norm", "--body", json.dumps(SQUARE), "--p", "1.5", "--v", "1,0"], capsys)
    assert code == 2 and "--method" in err


def test_body_inline_json_and_polar(capsys):
    code, out, _ = run(["body", "polar", "--body", json.dumps(SQUARE)], capsys)
    d = json.loads(out)["polar"]
    assert code == 0 and d["type"] == "polytopeH" and len(d["offsets"]) == 4


def test_malformed_json_reports_byte_offset(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"type": "ball", "dim": 2,, }', encoding="utf-8")
    code, _, err = run(["body", "eval", "--body", str(bad), "--x", "1,0"], capsys)
    assert code == 2 and "byte offset 26" in err


def test_byte_offset_counts_utf8_bytes(capsys):
    # the two-byte character before the error shifts the byte offset by one
    code, _, err = run(["body", "eval", "--body", '{"type": "é" x}', "--x", "1,0"], capsys)
    assert code == 2 and "byte offset 14" in err


@pytest.mark.parametrize(
    "body,field",
    [
        ({"type": "ball", "dim": 2, "center": [0, 0], "radius": 1, "extra": 0}, "extra"),
        ({"type": "ball", "dim": 2, "center": [0, 0]}, "radius"),
        ({"type": "cube", "dim": 2}, "type"),
    ],
)
def test_invalid_body_names_field(body, field, capsys):
    code, _, err = run(["body", "eval", "--body", json.dumps(body), "--x", "1,0"], capsys)
    assert code == 2 and field in err


def test_dimension_mismatch_is_config_error(capsys):
    code, _, err = run(["body", "eval", "--body", json.dumps(SQUARE), "--x", "1,0,0"], capsys)
    assert code == 2 and "--x" in err


def test_missing_file(capsys):
    code, _, err = run(["body", "eval", "--body", "/nonexistent/k.json", "--x", "1,0"], capsys)
    assert code == 2 and "cannot read" in err


def test_verify_zero_preset(tmp_path, capsys):
    js, cs = tmp_path / "r.json", tmp_path / "r.csv"
    code, out, _ = run(["verify", "--preset", "zero", "--json", str(js), "--csv", str(cs)], capsys)
    assert code == 0 and "verdict=pass" in out
    d = json.loads(js.read_text(encoding="utf-8"))
    assert d["limit"] == 0.0 and d["rhs"] == 0.0
    rows = list(csv.reader(io.StringIO(cs.read_text(encoding="utf-8"))))
    assert all(float(r[2]) == 0.0 for r in rows[1:])
    assert all(r[6] == d["config_digest"] and r[7] == d["version"] for r in rows[1:])


def test_verify_proposition_preset(capsys):
    code, out, _ = run(["verify", "--preset", "prop1d-hat-p1"], capsys)
    d = json.loads(out[out.index("{"):])
    assert code == 0 and d["relative_error"] <= 0.02


def test_verify_failure_exit_code(capsys):
    code, out, _ = run(["verify", "--preset", "prop1d-hat-p2", "--tolerance", "1e-9"], capsys)
    assert code == 1 and "verdict=fail" in out


def test_verify_config_errors(tmp_path, capsys):
    assert run(["verify", "--preset", "nope"], capsys)[0] == 2
    assert run(["verify"], capsys)[0] == 2
    cfg = load_preset("thm-1d-asym")
    cfg["colour"] = "red"
    code, _, err = run(["verify", "--config", json.dumps(cfg)], capsys)
    assert code == 2 and "colour" in err
    cfg = load_preset("thm-1d-asym")
    cfg["budgets"] = {"samplez": 3}
    code, _, err = run(["verify", "--config", json.dumps(cfg)], capsys)
    assert code == 2 and "samplez" in err


def test_verify_custom_config_file(tmp_path, capsys):
    cfg = load_preset("thm-1d-asym")
    cfg["sign"] = "minus"
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg), encoding="utf-8")
    code, out, _ = run(["verify", "--config", str(path), "--json", str(tmp_path / "o.json")], capsys)
    d = json.loads((tmp_path / "o.json").read_text(encoding="utf-8"))
    assert code == 0 and d["config"]["sign"] == "minus" and d["rhs"] == pytest.approx(5.0)


def test_verify_svg(tmp_path, capsys):
    svg = tmp_path / "plot.svg"
    code, _, _ = run(["verify", "--preset", "prop1d-hat-p2", "--svg", str(svg), "--csv", str(tmp_path / "x.csv")], capsys)
    text = svg.read_text(encoding="utf-8")
    assert code == 0
    assert text.startswith("<?xml") and 'version="1.1"' in text and text.count("<circle") == 5
    assert "config_digest=" in text
    import xml.dom.minidom

    xml.dom.minidom.parseString(text)


def test_zero_svg_has_no_points(tmp_path, capsys):
    svg = tmp_path / "z.svg"
    run(["verify", "--preset", "zero", "--svg", str(svg), "--csv", str(tmp_path / "z.csv")], capsys)
    assert "<circle" not in svg.read_text(encoding="utf-8")


def test_threads_env_fallback(monkeypatch, tmp_path, capsys):
    monkeypatch.setenv("ASL_THREADS", "zero")
    assert run(["verify", "--preset", "zero"], capsys)[0] == 2
    monkeypatch.setenv("ASL_THREADS", "2")
    assert run(["verify", "--preset", "zero", "--csv", str(tmp_path / "a.csv")], capsys)[0] == 0


def test_selftest_all(capsys):
    code, out, _ = run(["selftest"], capsys)
    assert code == 0
    for name in ("gauge-homogeneity", "moment-sign-split", "sphere-moment-crosscheck", "mollifier-identity"):
        assert name in out
    line = next(l for l in out.splitlines() if l.startswith("sphere-moment-crosscheck"))
    assert "candidate_a=" in line and "candidate_b=" in line and "matched=a" in line


def test_selftest_filter(capsys):
    code, out, _ = run(["selftest", "--filter", "moment"], capsys)
    names = [l.split()[0] for l in out.splitlines()[:-1]]
    assert code == 0 and names and all("moment" in n for n in names)
    assert run(["selftest", "--filter", "zzz"], capsys)[0] == 2


def test_presets_are_valid_configs():
    names = preset_names()
    for required in ("prop1d-hat-p1", "prop1d-hat-p2", "thm-1d-asym", "thm-2d-triangle-p2", "thm-2d-disk-bbm", "remark-duality", "scaling-law", "zero"):
        assert required in names
    for name in names:
        run_config_from_dict(load_preset(name))


def test_run_config_strictness():
    with pytest.raises(ConfigError, match="kind"):
        run_config_from_dict({"kind": "guess", "function": {}, "p": 2})
    with pytest.raises(ConfigError, match="'p'"):
        run_config_from_dict({"kind": "theorem", "function": {"name": "bump", "dim": 2}, "body": SQUARE, "p": 0.5})
    with pytest.raises(ConfigError, match="seed"):
        run_config_from_dict({"kind": "theorem", "function": {"name": "bump", "dim": 2}, "body": SQUARE, "p": 2, "method": "mc"})
    with pytest.raises(ConfigError, match="'s'"):
        run_config_from_dict({"kind": "theorem", "function": {"name": "bump", "dim": 2}, "body": SQUARE, "p": 2, "s": [0.9, 1.0, 0.5]})


def test_console_script_entry_point():
    out = subprocess.run([sys.executable, "-m", "asymsob.cli", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.startswith("asymsob ")


def test_argparse_errors_exit_two():
    out = subprocess.run([sys.executable, "-m", "asymsob.cli", "body", "spin"], capture_output=True, text=True)
    assert out.returncode == 2
