import json
import subprocess
import sys

import numpy as np
import pytest

from geotransit import jsonio
from geotransit.cli import Config, main, verify_suite
from geotransit.scenarios import torus_rep
from geotransit.svg import PANEL, PANEL_PX, panel_extents, render, render_report_json


def run(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


# ---------------------------------------------------------------- json

def test_json_floats_round_trip():
    vals = [0.1, 1 / 3, -2.5e-17, 6.687403049764226, 1e300]
    text = jsonio.dumps({"v": vals})
    assert jsonio.loads(text)["v"] == vals
    assert jsonio.loads(jsonio.dumps({"x": float("nan")}))["x"] is None
    assert jsonio.dumps({"b": np.float64(0.5), "i": np.int64(3)}) == jsonio.dumps({"b": 0.5, "i": 3})


# ---------------------------------------------------------------- svg

def test_svg_torus_panels():
    rows = [(t, torus_rep(t)) for t in (-1e-2, -1e-3, 0.0, 1e-3, 1e-2)]
    svg = render(rows)
    assert svg.startswith("<svg") and svg.count('<g id="panel-') == 5
    assert f'width="{5 * PANEL_PX}"' in svg and f'viewBox="0 0 {5 * PANEL} {PANEL}"' in svg
    assert render(rows) == svg


def test_svg_empty_grid_has_axes():
    svg = render([])
    assert svg.count('<g id="panel-') == 1
    assert svg.count("<line") == 2 and "<polygon" not in svg


def test_svg_hp_panel_stretches_vertically():
    ext = panel_extents(render([(1e-1, torus_rep(1e-1)), (0.0, torus_rep(0.0))]))
    (w1, h1), (w0, h0) = ext
    assert h0 > 0 and w0 > 0
    assert h0 / w0 > h1 / w1


def test_render_report_json_rejects_garbage():
    from geotransit.errors import ContractError
    with pytest.raises(ContractError):
        render_report_json({"rows": [{"t": 0.0}]})
    with pytest.raises(ContractError):
        render_report_json(3)


# ---------------------------------------------------------------- cli

def test_config_validation():
    with pytest.raises(ValueError):
        Config(tol=0.0)
    with pytest.raises(ValueError):
        Config(dim=4)


@pytest.mark.parametrize("dim", [2, 3])
def test_verify_suite_passes(dim):
    rep = verify_suite(Config(dim=dim))
    assert rep["passed"], [c for c in rep["checks"] if not c["passed"]]


def test_verify_exit_codes(capsys, tmp_path):
    code, out, _ = run(["verify"], capsys)
    assert code == 0 and json.loads(out)["passed"]
    code, out, _ = run(["--tol", "1e-30", "verify"], capsys)
    assert code == 1 and not json.loads(out)["passed"]
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run(["--config", str(bad), "verify"], capsys)
    assert code == 2 and "error" in err
    bad.write_text(json.dumps({"tol": 1e-9, "colour": "red"}))
    assert run(["--config", str(bad), "verify"], capsys)[0] == 2
    good = tmp_path / "good.json"
    good.write_text(json.dumps({"tol": 1e-9, "seed": 3}))
    assert run(["--config", str(good), "verify"], capsys)[0] == 0


def test_malformed_arguments(capsys):
    assert run(["frobnicate"], capsys)[0] == 2
    assert run(["torus", "--t-steps", "0"], capsys)[0] == 2
    assert run(["torus", "--t-min", "1", "--t-max", "0"], capsys)[0] == 2
    assert run(["build-2mm", "--m", "five"], capsys)[0] == 2
    assert run(["--dim", "7", "verify"], capsys)[0] == 2


def test_scenario_errors_exit_one(capsys):
    code, _, err = run(["build-2mm", "--m", "4"], capsys)
    assert code == 1 and "RightAngleImpossible" in err
    code, _, err = run(["borromean", "--la", "0.5", "--lb", "0.5"], capsys)
    assert code == 1 and "NoParabolicAngle" in err
    code, _, err = run(["torus", "--t-min", "0.001", "--t-max", "0.01"], capsys)
    assert code == 1 and "ContractError" in err


def test_build_2mm_command(capsys):
    code, out, _ = run(["build-2mm", "--m", "5", "--theta-dot", "1"], capsys)
    doc = json.loads(out)
    assert code == 0
    assert doc["construction"]["phi"] == pytest.approx(-6.6873, abs=5e-4)
    assert [r["classification"] for r in doc["rows"]] == ["AdS", "HP", "Hyperbolic"]


def test_borromean_command(capsys):
    code, out, _ = run(["borromean", "--branch", "T"], capsys)
    assert code == 0 and json.loads(out)["borromean"]["x"] == 0.0


def test_torus_and_plot_byte_identical(tmp_path, capsys):
    paths = []
    for k in range(2):
        j, s = tmp_path / f"t{k}.json", tmp_path / f"t{k}.svg"
        assert main(["--out", str(j), "torus", "--svg", str(s)]) == 0
        paths.append((j.read_bytes(), s.read_bytes()))
    assert paths[0] == paths[1]
    doc = json.loads(paths[0][0])
    assert len(doc["rows"]) == 5
    svg_out = tmp_path / "plot.svg"
    assert main(["plot", str(tmp_path / "t0.json"), "--output", str(svg_out)]) == 0
    assert svg_out.read_bytes() == paths[0][1]
    assert panel_extents(svg_out.read_text())[0][0] > 0
    notes = tmp_path / "notes.json"
    notes.write_text(json.dumps({"hello": 1}))
    assert main(["plot", str(notes)]) == 2
    assert main(["plot", str(tmp_path / "missing.json")]) == 2
    capsys.readouterr()


def test_console_script_entry():
    out = subprocess.run([sys.executable, "-m", "geotransit.cli", "borromean", "--branch", "R"],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert json.loads(out.stdout)["borromean"]["branch"] == "R"
