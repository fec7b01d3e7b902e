import csv

import numpy as np
import pytest

from corrqfi.channels import ChannelKind, ChannelSpec
from corrqfi.probes import Param, ProbeFamily, ProbeSpec
from corrqfi.sweep import (
    CSV_HEADER,
    Method,
    SweepConfig,
    SweepRecord,
    cross_check,
    evaluate_point,
    figure,
    render_heatmap,
    run_point,
    run_sweep,
    write_csv,
)

SEED = 20250810


def phi_plus(theta=np.pi / 8, phi=np.pi / 6):
    return ProbeSpec(ProbeFamily.PHI_PLUS, theta, phi)


def small_config(tmp_path, kind=ChannelKind.PHASE_FLIP, method=Method.BOTH, count=3):
    return SweepConfig(
        probe=phi_plus(),
        kind=kind,
        p_grid=(0.0, 1.0, count),
        mu_grid=(0.0, 1.0, count),
        method=method,
        out=str(tmp_path / "sweep.csv"),
    )


def test_point_phase_flip_theta():
    records = run_point(
        phi_plus(), ChannelSpec(ChannelKind.PHASE_FLIP, 0.4, 0.9), (Param.THETA,), Method.BOTH
    )
    assert len(records) == 2
    for rec in records:
        assert rec.qfi == pytest.approx(4.0, abs=1e-9)


def test_point_noiseless_theta():
    for kind in ChannelKind:
        records = run_point(phi_plus(), ChannelSpec(kind, 0.0, 0.0), (Param.THETA,), Method.SLD)
        assert records[0].qfi == pytest.approx(4.0, abs=1e-9)


def test_point_critical_depolarizing_phi():
    records = run_point(
        phi_plus(), ChannelSpec(ChannelKind.DEPOLARIZING, 0.75, 0.0), (Param.PHI,), Method.BOTH
    )
    # closed route falls back to the numeric value at the degenerate point
    for rec in records:
        assert rec.qfi == pytest.approx(0.0, abs=1e-9)


def test_closed_method_rejected_for_ewl():
    probe = ProbeSpec(ProbeFamily.EWL, 0.3, 0.4, n_qubits=3)
    with pytest.raises(ValueError, match="method=sld"):
        evaluate_point(probe, ChannelSpec(ChannelKind.BIT_FLIP, 0.2, 0.2), Param.THETA, Method.CLOSED)


def test_default_method_resolution():
    ewl = ProbeSpec(ProbeFamily.EWL, 0.3, 0.4, n_qubits=2)
    records = run_point(ewl, ChannelSpec(ChannelKind.BIT_FLIP, 0.2, 0.2), (Param.THETA,))
    assert [r.method for r in records] == ["sld"]
    records = run_point(phi_plus(), ChannelSpec(ChannelKind.BIT_FLIP, 0.2, 0.2), (Param.THETA,))
    assert [r.method for r in records] == ["sld", "closed"]


def test_sweep_row_count_and_order(tmp_path):
    config = small_config(tmp_path)
    records = run_sweep(config, jobs=1)
    # count x count points, 2 params, 2 methods
    assert len(records) == 3 * 3 * 2 * 2
    keys = [(r.p, r.mu, r.param, r.method) for r in records]
    expected = [
        (p, mu, param, method)
        for p in (0.0, 0.5, 1.0)
        for mu in (0.0, 0.5, 1.0)
        for param in ("theta", "phi")
        for method in ("sld", "closed")
    ]
    assert keys == expected


def test_sweep_csv_deterministic(tmp_path):
    config_a = small_config(tmp_path)
    run_sweep(config_a, jobs=1)
    first = (tmp_path / "sweep.csv").read_bytes()
    run_sweep(config_a, jobs=1)
    second = (tmp_path / "sweep.csv").read_bytes()
    assert first == second


def test_sweep_parallel_matches_serial(tmp_path):
    serial = small_config(tmp_path)
    run_sweep(serial, jobs=1)
    first = (tmp_path / "sweep.csv").read_bytes()
    run_sweep(serial, jobs=2)
    second = (tmp_path / "sweep.csv").read_bytes()
    assert first == second


def test_csv_header_schema(tmp_path):
    config = small_config(tmp_path)
    run_sweep(config, jobs=1)
    with open(tmp_path / "sweep.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == list(CSV_HEADER)
    assert len(rows) == 1 + 36
    # 17 significant digits round-trip
    value = float(rows[1][-1])
    assert format(value, ".17g") == rows[1][-1]


def test_sweep_qfi_within_sanity_bounds(tmp_path):
    records = run_sweep(small_config(tmp_path, kind=ChannelKind.DEPOLARIZING), jobs=1)
    for rec in records:
        assert -1e-10 <= rec.qfi <= 4.0 * rec.n


def test_record_rejects_insane_qfi():
    with pytest.raises(ValueError):
        SweepRecord(
            channel="phaseflip", family="phi+", n=2, r=1.0, theta=0.1, phi=0.2,
            p=0.1, mu=0.1, param="theta", method="sld", qfi=9.0,
        )


def test_sweep_config_validation():
    with pytest.raises(ValueError):
        SweepConfig(
            probe=phi_plus(), kind=ChannelKind.BIT_FLIP,
            p_grid=(0.0, 1.0, 1), mu_grid=(0.0, 1.0, 3),
        )
    with pytest.raises(ValueError):
        SweepConfig(
            probe=phi_plus(), kind=ChannelKind.BIT_FLIP,
            p_grid=(0.0, 1.2, 3), mu_grid=(0.0, 1.0, 3),
        )


def test_cross_check_passes_and_reports():
    report = cross_check(60, seed=SEED, tol=1e-6)
    assert report.passed
    assert report.max_closed_dev <= 1e-7
    assert report.max_fd_rel <= 1e-5
    assert "PASS" in report.format()


def test_cross_check_impossible_tolerance_fails():
    report = cross_check(20, seed=SEED, tol=0.0)
    assert not report.passed
    assert "FAIL" in report.format()


def test_cross_check_deterministic():
    a = cross_check(30, seed=7).format()
    b = cross_check(30, seed=7).format()
    assert a == b


def test_figure3_theta_column_constant_four(tmp_path):
    csv_path, _ = figure(3, tmp_path, points=5)
    with open(csv_path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    theta_rows = [r for r in rows if r["param"] == "theta"]
    assert theta_rows
    for row in theta_rows:
        assert float(row["qfi"]) == pytest.approx(4.0, abs=1e-9)


def test_figure1_minimum_at_critical_point(tmp_path):
    csv_path, _ = figure(1, tmp_path, points=21)
    with open(csv_path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    phi6 = format(np.pi / 6, ".17g")
    for param in ("theta", "phi"):
        series = sorted(
            (float(r["p"]), float(r["qfi"]))
            for r in rows
            if r["param"] == param and float(r["mu"]) == 0.0 and r["phi"] == phi6
        )
        ps = [p for p, _ in series]
        qs = [q for _, q in series]
        assert ps[int(np.argmin(qs))] == pytest.approx(0.75)


def test_figure2_p_reflection_symmetry(tmp_path):
    csv_path, _ = figure(2, tmp_path, points=11)
    with open(csv_path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    table = {}
    for r in rows:
        key = (r["phi"], r["param"], round(float(r["p"]), 12), round(float(r["mu"]), 12))
        table[key] = float(r["qfi"])
    for (phi, param, p, mu), value in table.items():
        mirrored = table[(phi, param, round(1.0 - p, 12), mu)]
        assert value == pytest.approx(mirrored, abs=1e-9)


def test_figure4_structure(tmp_path):
    csv_path, map_path = figure(4, tmp_path, points=3)
    with open(csv_path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert {r["channel"] for r in rows} == {"depolarizing", "bitflip", "phaseflip"}
    assert {r["n"] for r in rows} == {"2", "3", "4", "5"}
    assert {r["family"] for r in rows} == {"ewl"}
    assert {r["r"] for r in rows} == {format(0.9, ".17g")}
    assert map_path.exists()


def test_figure_rejects_unknown_number(tmp_path):
    with pytest.raises(ValueError):
        figure(5, tmp_path)


_SHADE_MARKER = "# rows: mu descending; cols: p ascending"


def _split_heatmap(text):
    """Collect (data_lines, shade_rows) per section of a rendered heatmap."""
    parsed = []
    data, shades, in_shades = [], [], False
    for line in text.splitlines():
        if line.startswith("# channel="):
            if data or shades:
                parsed.append((data, shades))
            data, shades, in_shades = [], [], False
        elif line == _SHADE_MARKER:
            in_shades = True
        elif in_shades:
            if line:
                shades.append(line)
        elif line and not line.startswith("#"):
            data.append(line)
    if data or shades:
        parsed.append((data, shades))
    return parsed


def test_heatmap_constant_column_single_shade(tmp_path):
    path = tmp_path / "const.csv"
    records = [
        SweepRecord("phaseflip", "phi+", 2, 1.0, 0.1, 0.2, p, mu, "theta", "sld", 4.0)
        for p in (0.0, 0.5, 1.0)
        for mu in (0.0, 1.0)
    ]
    write_csv(records, path)
    [(_, shades)] = _split_heatmap(render_heatmap(path))
    assert shades == [" " * 3, " " * 3]


def test_heatmap_scaling_extremes(tmp_path):
    path = tmp_path / "toy.csv"
    values = iter(range(9))
    records = [
        SweepRecord("phaseflip", "phi+", 2, 1.0, 0.1, 0.2, p, mu, "theta", "sld",
                    float(next(values)) / 4.0)
        for p in (0.0, 0.5, 1.0)
        for mu in (0.0, 0.5, 1.0)
    ]
    write_csv(records, path)
    [(_, shades)] = _split_heatmap(render_heatmap(path))
    assert len(shades) == 3
    # row order is mu descending: max value sits top-right, min bottom-left
    assert shades[0][-1] == "@"
    assert shades[-1][0] == " "


def test_heatmap_gnuplot_blocks(tmp_path):
    config = small_config(tmp_path, method=Method.SLD)
    run_sweep(config, jobs=1)
    text = render_heatmap(tmp_path / "sweep.csv")
    sections = _split_heatmap(text)
    assert len(sections) == 2  # one per param
    for data, shades in sections:
        assert len(data) == 9  # 3x3 grid of "p mu qfi" triples
        assert all(len(l.split()) == 3 for l in data)
        assert len(shades) == 3


def test_heatmap_rejects_non_rectangular(tmp_path):
    path = tmp_path / "ragged.csv"
    records = [
        SweepRecord("phaseflip", "phi+", 2, 1.0, 0.1, 0.2, 0.0, 0.0, "theta", "sld", 4.0),
        SweepRecord("phaseflip", "phi+", 2, 1.0, 0.1, 0.2, 0.5, 1.0, "theta", "sld", 4.0),
        SweepRecord("phaseflip", "phi+", 2, 1.0, 0.1, 0.2, 1.0, 0.5, "theta", "sld", 4.0),
    ]
    write_csv(records, path)
    with pytest.raises(ValueError):
        render_heatmap(path)
