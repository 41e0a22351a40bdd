import csv
import io
import json
import os
import xml.etree.ElementTree as ET

import pytest

from ruledform.cli import CSV_COLUMNS, EXIT_FAIL, EXIT_OK, EXIT_USAGE, main, parse_grid, ConfigError


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_families_listing(capsys):
    code, out, _ = run(["families"], capsys)
    assert code == EXIT_OK
    names = [ln for ln in out.splitlines() if ln and not ln.startswith(" ")]
    assert len(names) == 5
    assert "0 < a < pi/2" in out
    assert "(1/r) csch 2a" in out
    assert "outside CH2" in out


def test_verify_reference_family(capsys, tmp_path):
    out = tmp_path / "r.json"
    code, table, _ = run(["verify", "--family", "ch2-equidistant", "--a", "0", "--r", "1",
                          "--seed", "7", "--out", str(out)], capsys)
    assert code == EXIT_OK
    report = json.loads(out.read_text())
    assert report["failed"] == 0 and report["seed"] == 7
    assert "shape_prime" in table


def test_verify_json_to_stdout(capsys):
    code, out, err = run(["verify", "--family", "ch2-horocycle", "--seed", "1"], capsys)
    assert code == EXIT_OK
    assert json.loads(out)["suite"] == "ch2-horocycle"
    assert "PASS" in err or "pass" in err


def test_verify_out_of_range(capsys):
    code, _, err = run(["verify", "--family", "ch2-circle", "--a", "0"], capsys)
    assert code == EXIT_USAGE and "error" in err


def test_verify_zero_tolerance(capsys):
    code, _, _ = run(["verify", "--tol-fd", "0"], capsys)
    assert code == EXIT_FAIL


def test_unknown_family(capsys):
    assert run(["verify", "--family", "sphere"], capsys)[0] == EXIT_USAGE


def test_usage_error_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["bogus"])
    assert exc.value.code == EXIT_USAGE


def test_config_file_and_override(capsys, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"family": {"kind": "cp2-circle", "a": 0.4}, "seed": 3,
                               "grid": [1, 2, 3]}))
    code, out, _ = run(["sample", "--config", str(cfg)], capsys)
    assert code == EXIT_OK
    assert len(out.strip().splitlines()) == 1 + 6
    code, out, _ = run(["sample", "--config", str(cfg), "--grid", "2x2x2"], capsys)
    assert len(out.strip().splitlines()) == 1 + 8


@pytest.mark.parametrize("body", ['{"family": 3}', '{"nope": 1}', '[1, 2]', '{',
                                  '{"box": {"w_abs": [2, 1]}}', '{"fd": {"scheme": "x"}}',
                                  '{"tolerances": {"fd": -1}}', '{"r": -1}'])
def test_bad_config(capsys, tmp_path, body):
    cfg = tmp_path / "run.json"
    cfg.write_text(body)
    assert run(["verify", "--config", str(cfg)], capsys)[0] == EXIT_USAGE


def test_missing_config(capsys, tmp_path):
    assert run(["verify", "--config", str(tmp_path / "none.json")], capsys)[0] == EXIT_USAGE


def _csv(text):
    return list(csv.reader(io.StringIO(text)))


def test_sample_csv_layout(capsys):
    code, out, _ = run(["sample", "--family", "ch2-circle", "--grid", "2x3x4"], capsys)
    assert code == EXIT_OK
    assert "\r" not in out
    rows = _csv(out)
    assert rows[0] == CSV_COLUMNS
    assert len(rows) - 1 == 2 * 3 * 4
    # full double precision
    assert any(len(v.replace("-", "").replace(".", "").split("e")[0]) >= 15 for v in rows[1])


def test_sample_spine_row(capsys):
    _, out, _ = run(["sample", "--family", "cp2-circle", "--grid", "1x2x3"], capsys)
    rows = [dict(zip(CSV_COLUMNS, map(float, r))) for r in _csv(out)[1:]]
    spine = [r for r in rows if r["w_re"] == 0 and r["w_im"] == 0]
    assert spine
    for r in spine:
        assert r["beta_abs"] == 0 and r["sigma"] == 1


def test_sample_bisector_symmetric(capsys):
    _, out, _ = run(["sample", "--family", "ch2-equidistant", "--a", "0", "--grid", "3x3x5"], capsys)
    for r in _csv(out)[1:]:
        d = dict(zip(CSV_COLUMNS, map(float, r)))
        assert d["kappa_plus"] == pytest.approx(-d["kappa_minus"], abs=1e-15)


def test_sample_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        assert run(["sample", "--family", "ch2-exterior-circle", "--seed", "4", "--out", str(p)],
                   capsys)[0] == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_verify_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        run(["verify", "--family", "cp2-circle", "--seed", "9", "--out", str(p)], capsys)
    assert a.read_bytes() == b.read_bytes()


def test_unwritable_path(capsys, tmp_path):
    missing = tmp_path / "no" / "such" / "x.csv"
    assert run(["sample", "--out", str(missing)], capsys)[0] == EXIT_USAGE
    assert run(["sample", "--out", str(tmp_path)], capsys)[0] == EXIT_USAGE


def test_box_outside_domain(capsys, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"family": {"kind": "ch2-circle", "a": 0.3},
                               "box": {"w_abs": [0.1, 1.5]}}))
    assert run(["sample", "--config", str(cfg)], capsys)[0] == EXIT_USAGE
    assert run(["plot", "--config", str(cfg)], capsys)[0] == EXIT_USAGE


@pytest.mark.parametrize("grid", ["0x3", "3x0x1", "abc", "1x2x3x4"])
def test_bad_grid(capsys, grid):
    assert run(["sample", "--grid", grid], capsys)[0] == EXIT_USAGE
    assert run(["plot", "--grid", grid], capsys)[0] == EXIT_USAGE


def test_parse_grid():
    assert parse_grid("4x5") == (4, 5)
    with pytest.raises(ConfigError, match="empty grid"):
        parse_grid("0")


def _polyline_points(root, idx):
    ns = {"s": "http://www.w3.org/2000/svg"}
    lines = root.findall(".//s:polyline", ns)
    pts = lines[idx].get("points").split()
    return [tuple(map(float, p.split(","))) for p in pts]


def test_plot_svg(capsys, tmp_path):
    out = tmp_path / "p.svg"
    code, _, _ = run(["plot", "--family", "ch2-equidistant", "--a", "0", "--grid", "50",
                      "--out", str(out)], capsys)
    assert code == EXIT_OK
    text = out.read_text()
    root = ET.fromstring(text)
    assert root.tag.endswith("svg") and root.get("version") == "1.1"
    assert "href" not in text and "<image" not in text
    # kappa+ and kappa- mirror about the zero line
    kp, km, zero = (_polyline_points(root, k) for k in range(3))
    for (x1, y1), (x2, y2), (_, y0) in zip(kp, km, zero):
        assert x1 == x2 and abs((y1 - y0) + (y2 - y0)) <= 0.02


def test_plot_ratio_flat(capsys, tmp_path):
    out = tmp_path / "p.svg"
    assert run(["plot", "--family", "ch2-circle", "--out", str(out)], capsys)[0] == EXIT_OK
    root = ET.fromstring(out.read_text())
    ratio = _polyline_points(root, 3)
    ys = {y for _, y in ratio}
    assert len(ratio) == 200 and len(ys) == 1


def test_plot_deterministic(capsys):
    a = run(["plot", "--family", "cp2-circle", "--grid", "40"], capsys)[1]
    b = run(["plot", "--family", "cp2-circle", "--grid", "40"], capsys)[1]
    assert a == b and a.startswith("<?xml")
