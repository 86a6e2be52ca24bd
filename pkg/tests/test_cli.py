import json

import numpy as np
import pytest

from gsqglab.cli import main
from gsqglab.curves import curve_to_json

from conftest import circle


@pytest.fixture
def circle_files(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    a.write_text(curve_to_json(circle(1.0, 256)))
    b.write_text(curve_to_json(circle(2.0, 256)))
    return str(a), str(b)


def test_distance_subcommand(circle_files, capsys):
    a, b = circle_files
    assert main(["distance", a, b, "--metric", "hausdorff"]) == 0
    out = float(capsys.readouterr().out.strip())
    assert abs(out - 1.0) <= 1e-4


def test_distance_all_metrics(circle_files, capsys):
    a, b = circle_files
    for metric in ("frechet", "hausdorff", "delta", "D"):
        assert main(["distance", a, b, "--metric", metric]) == 0
        float(capsys.readouterr().out.strip())


def test_align_subcommand(circle_files, capsys, tmp_path):
    a, _ = circle_files
    b2 = tmp_path / "b2.json"
    b2.write_text(curve_to_json(circle(1.01, 256)))
    assert main(["align", a, str(b2)]) == 0
    obj = json.loads(capsys.readouterr().out)
    assert obj["residual"] <= 1e-8
    assert len(obj["phi"]) == 256


def test_check_subcommand(tmp_path, capsys):
    report = tmp_path / "report.json"
    assert main(["check", "--seed", "0", "--trials", "5", "--json", str(report)]) == 0
    out = capsys.readouterr().out
    assert "ALL PASS" in out
    obj = json.loads(report.read_text())
    assert obj["all_passed"] is True
    assert len(obj["checks"]) >= 11


def test_run_subcommand(tmp_path, capsys):
    cfgfile = tmp_path / "circle.toml"
    cfgfile.write_text(
        "\n".join(
            [
                "alpha = 0.16666666666666666",
                "epsilon = 0.15",
                "N = 64",
                "t_end = 0.05",
                "output_every = 2",
                "[[patches]]",
                'kind = "circle"',
                "radius = 1.0",
                "strength = 1.0",
            ]
        )
    )
    out = tmp_path / "outdir"
    assert main(["run", str(cfgfile), "--out", str(out)]) == 0
    csv = (out / "diagnostics.csv").read_text().splitlines()
    assert csv[0].startswith("t,Q,W,L,")
    # area column constant to 1e-3 relative
    import csv as _csv

    rows = list(_csv.DictReader((out / "diagnostics.csv").open()))
    areas = [float(r["area_0"]) for r in rows]
    assert abs(areas[-1] - areas[0]) <= 1e-3 * areas[0]


def test_run_byte_identical(tmp_path):
    cfgfile = tmp_path / "c.toml"
    cfgfile.write_text(
        "\n".join(
            [
                "epsilon = 0.2",
                "N = 64",
                "t_end = 0.02",
                "output_every = 1",
                "[[patches]]",
                'kind = "circle"',
                "radius = 1.0",
                "strength = 1.0",
            ]
        )
    )
    outs = []
    for name in ("o1", "o2"):
        out = tmp_path / name
        assert main(["run", str(cfgfile), "--out", str(out)]) == 0
        outs.append((out / "diagnostics.csv").read_bytes())
    assert outs[0] == outs[1]


def test_bad_config_exit_code(tmp_path, capsys):
    cfgfile = tmp_path / "bad.toml"
    cfgfile.write_text("nonsense_key = 3\n[[patches]]\nkind='circle'\nstrength=1.0\n")
    assert main(["run", str(cfgfile)]) == 64
    assert main(["run", str(tmp_path / "missing.toml")]) == 64


def test_refine_epsilon_subcommand(tmp_path, capsys):
    cfgfile = tmp_path / "two.toml"
    cfgfile.write_text(
        "\n".join(
            [
                "epsilon = 0.2",
                "N = 64",
                "t_end = 0.05",
                "output_every = 5",
                "[[patches]]",
                'kind = "circle"',
                "radius = 1.0",
                "center = [-1.2, 0.0]",
                "strength = 1.0",
                "[[patches]]",
                'kind = "circle"',
                "radius = 1.0",
                "center = [1.2, 0.0]",
                "strength = 1.0",
            ]
        )
    )
    assert main(["refine-epsilon", str(cfgfile)]) == 0
    out = capsys.readouterr().out
    assert "frechet_gap" in out
