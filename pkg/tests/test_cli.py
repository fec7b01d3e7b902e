import csv
import math

import pytest

from corrqfi.cli import main, parse_angle


def test_parse_angle_literals():
    assert parse_angle("pi/8") == pytest.approx(math.pi / 8)
    assert parse_angle("0.5") == 0.5
    assert parse_angle("2*pi") == pytest.approx(2 * math.pi)
    assert parse_angle("pi/2-pi/3") == pytest.approx(math.pi / 6)
    assert parse_angle("-pi/4") == pytest.approx(-math.pi / 4)
    assert parse_angle("(pi+1)/2") == pytest.approx((math.pi + 1) / 2)
    assert parse_angle("3×pi÷4") == pytest.approx(3 * math.pi / 4)
    assert parse_angle("1e-3") == pytest.approx(1e-3)


def test_parse_angle_rejects_garbage():
    for bad in ("pie", "1 +", "(pi", "pi pi", "2**3"):
        with pytest.raises(ValueError):
            parse_angle(bad)


def test_point_command(capsys):
    code = main(
        [
            "point",
            "--channel", "phaseflip",
            "--theta", "pi/8",
            "--phi", "pi/6",
            "--p", "0.4",
            "--mu", "0.9",
            "--param", "theta",
            "--method", "both",
        ]
    )
    out = capsys.readouterr().out
    assert code == 0
    lines = [l for l in out.splitlines() if "qfi=4" in l]
    assert len(lines) == 2
    assert "|sld - closed|" in out


def test_point_requires_channel(capsys):
    code = main(["point", "--param", "theta"])
    assert code == 2
    assert "channel" in capsys.readouterr().err


def test_sweep_and_heatmap_commands(tmp_path, capsys):
    out_csv = tmp_path / "out.csv"
    code = main(
        [
            "sweep",
            "--channel", "phaseflip",
            "--grid-p", "0:1:3",
            "--grid-mu", "0:1:3",
            "--param", "phi",
            "--method", "sld",
            "--jobs", "1",
            "--out", str(out_csv),
        ]
    )
    assert code == 0
    with open(out_csv, newline="") as fh:
        rows = list(csv.reader(fh))
    assert len(rows) == 1 + 9
    out_map = tmp_path / "map.txt"
    code = main(["heatmap", "--csv", str(out_csv), "--out", str(out_map)])
    assert code == 0
    assert out_map.read_text().startswith("#")


def test_config_file_with_flag_override(tmp_path, capsys):
    config = tmp_path / "run.conf"
    config.write_text(
        "channel = phaseflip\n"
        "theta = pi/8\n"
        "phi = pi/6\n"
        "p = 0.4\n"
        "mu = 0.0   # overridden by the flag below\n"
        "param = theta\n"
        "method = sld\n"
    )
    code = main(["point", "--config", str(config), "--mu", "0.9"])
    out = capsys.readouterr().out
    assert code == 0
    assert "mu=0.9" in out
    assert "qfi=4" in out


def test_config_rejects_unknown_keys(tmp_path, capsys):
    config = tmp_path / "bad.conf"
    config.write_text("volume = 11\n")
    code = main(["point", "--config", str(config), "--channel", "bitflip"])
    assert code == 2
    assert "unknown config keys" in capsys.readouterr().err


def test_check_command(capsys):
    code = main(["check", "--samples", "25", "--seed", "3", "--tol", "1e-6"])
    out = capsys.readouterr().out
    assert code == 0
    assert "PASS" in out


def test_check_command_fails_at_zero_tol(capsys):
    code = main(["check", "--samples", "10", "--seed", "3", "--tol", "0"])
    assert code == 1
    assert "FAIL" in capsys.readouterr().out


def test_estimate_command(capsys):
    code = main(
        [
            "estimate",
            "--channel", "phaseflip",
            "--p", "0.3",
            "--mu", "0.5",
            "--param", "phi",
            "--shots", "400",
            "--trials", "3",
            "--seed", "9",
        ]
    )
    out = capsys.readouterr().out
    assert code == 0
    assert "empirical var" in out
    assert "bound 1/(M*F)" in out


def test_estimate_rejects_two_params(capsys):
    code = main(
        ["estimate", "--channel", "phaseflip", "--param", "theta,phi", "--trials", "2"]
    )
    assert code == 2
    assert "exactly one" in capsys.readouterr().err


def test_figure_command(tmp_path, capsys):
    code = main(["figure", "--which", "3", "--points", "4", "--out", str(tmp_path)])
    out = capsys.readouterr().out
    assert code == 0
    assert (tmp_path / "fig3.csv").exists()
    assert (tmp_path / "fig3_heatmap.txt").exists()


def test_bad_flag_value(capsys):
    code = main(["point", "--channel", "sideways"])
    assert code == 2
    assert "error" in capsys.readouterr().err
