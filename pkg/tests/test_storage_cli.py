import json
import math

import jsonschema
import numpy as np
import pytest

from catenarylab import PowerParams, SolverConfig, classify, integrate
from catenarylab.cli import EXIT_IO, EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE, main
from catenarylab.storage import (
    CSV_COLUMNS,
    read_report_json,
    read_trajectory_csv,
    report_from_dict,
    report_to_dict,
    validate_report,
    write_report_json,
    write_trajectory_csv,
)


@pytest.fixture(scope="module")
def periodic_traj():
    return integrate(PowerParams(1.0), 0.25, SolverConfig(span=9.0))


@pytest.fixture(scope="module")
def outer_report():
    return classify(PowerParams(1.0), 2.0)


def test_csv_roundtrip_bit_exact(periodic_traj, tmp_path):
    path = tmp_path / "traj.csv"
    write_trajectory_csv(periodic_traj, path)
    cols = read_trajectory_csv(path)
    assert tuple(cols) == CSV_COLUMNS
    np.testing.assert_array_equal(cols["s"], periodic_traj.s)
    np.testing.assert_array_equal(cols["r"], periodic_traj.r)
    np.testing.assert_array_equal(cols["dr"], periodic_traj.dr)
    # derived columns recompute to the identical doubles
    from catenarylab import momentum, second_derivative, curvature

    ddr = second_derivative(periodic_traj.params, periodic_traj.r, periodic_traj.dr)
    np.testing.assert_array_equal(cols["kappa"], curvature(periodic_traj.r, periodic_traj.dr, ddr))
    np.testing.assert_array_equal(
        cols["J"], momentum(periodic_traj.params, periodic_traj.r, periodic_traj.dr)
    )


def test_csv_has_header_and_lf_endings(periodic_traj, tmp_path):
    path = tmp_path / "traj.csv"
    write_trajectory_csv(periodic_traj, path)
    raw = path.read_bytes()
    assert raw.startswith(b"s,r,dr,kappa,J,x,y\n")
    assert b"\r" not in raw


def test_csv_header_enforced(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(ValueError):
        read_trajectory_csv(path)


def test_report_roundtrip(outer_report, tmp_path):
    path = tmp_path / "report.json"
    write_report_json(outer_report, path)
    back = read_report_json(path)
    assert back.regime is outer_report.regime
    assert back.alpha == outer_report.alpha
    assert back.blowup_angle == outer_report.blowup_angle
    assert back.conservation_drift == outer_report.conservation_drift


def test_report_absent_fields_are_omitted(outer_report):
    data = report_to_dict(outer_report)
    assert "period" not in data and "orthogonality_defect" not in data
    assert None not in data.values()


def test_report_schema_rejects_unknown_fields(outer_report):
    data = report_to_dict(outer_report)
    data["extra"] = 1
    with pytest.raises(jsonschema.ValidationError):
        validate_report(data)
    with pytest.raises(jsonschema.ValidationError):
        report_from_dict({"alpha": 1.0})


def test_cli_solve_writes_files(tmp_path):
    rc = main([
        "solve", "--alpha", "1", "--r0", "0.25", "--span", "12.6",
        "--out", str(tmp_path),
    ])
    assert rc == EXIT_OK
    csv_path = tmp_path / "catenary_a1_r0.25.csv"
    assert csv_path.exists()
    assert (tmp_path / "catenary_a1_r0.25.json").exists()
    svg = (tmp_path / "catenary_a1_curve.svg").read_text()
    assert svg.lstrip().startswith("<?xml")
    assert 'gid="unit-circle"' in svg or 'id="unit-circle"' in svg
    assert "<image" not in svg and 'href="http' not in svg
    assert (tmp_path / "catenary_a1_radius.svg").exists()


def test_cli_solve_pair_for_inversion_figure(tmp_path):
    rc = main([
        "solve", "--alpha", "-2", "--r0", "2,0.5", "--out", str(tmp_path),
    ])
    assert rc == EXIT_OK
    assert (tmp_path / "catenary_a-2_r2.csv").exists()
    assert (tmp_path / "catenary_a-2_r0.5.csv").exists()


def test_cli_classify_report(tmp_path, capsys):
    out = tmp_path / "report.json"
    rc = main(["classify", "--alpha", "1", "--r0", "2", "--out", str(out)])
    assert rc == EXIT_OK
    data = json.loads(out.read_text())
    assert data["regime"] == "OuterAsymptotic"
    assert data["blowup_angle"] < math.pi / 2.0


def test_cli_classify_stdout(capsys):
    rc = main(["classify", "--alpha", "1", "--r0", "0.5"])
    assert rc == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data["regime"] == "ConstantCircle"


def test_cli_phase_portrait(tmp_path):
    out = tmp_path / "phase.svg"
    rc = main(["phase", "--alpha", "-0.5", "--out", str(out)])
    assert rc == EXIT_OK
    assert out.read_text().lstrip().startswith("<?xml")


def test_cli_sweep_table_and_json(tmp_path, capsys):
    out = tmp_path / "sweep.json"
    rc = main(["sweep", "--alpha", "1", "--r0", "0.25,2", "--out", str(out)])
    assert rc == EXIT_OK
    table = capsys.readouterr().out
    assert "PeriodicInner" in table and "OuterAsymptotic" in table
    payload = json.loads(out.read_text())
    assert len(payload) == 2
    for item in payload:
        validate_report(item)


def test_cli_sweep_parallel(tmp_path):
    out = tmp_path / "sweep.json"
    rc = main(["sweep", "--alpha", "1", "--r0", "0.3,0.7", "--jobs", "2",
               "--out", str(out)])
    assert rc == EXIT_OK
    assert len(json.loads(out.read_text())) == 2


def test_cli_usage_errors(capsys):
    assert main(["solve", "--alpha", "0", "--r0", "0.5"]) == EXIT_USAGE
    err = json.loads(capsys.readouterr().err)
    assert "alpha" in err["error"]
    assert main(["check", "--suite", "bogus"]) == EXIT_USAGE
    capsys.readouterr()
    assert main(["solve", "--r0", "0.5"]) == EXIT_USAGE  # missing --alpha


def test_cli_io_error(tmp_path, capsys):
    rc = main(["classify", "--alpha", "1", "--r0", "2",
               "--out", str(tmp_path / "missing" / "r.json")])
    assert rc == EXIT_IO
    err = json.loads(capsys.readouterr().err)
    assert err["exit_code"] == EXIT_IO


def test_cli_config_file_flags_override(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({
        "alpha": 1.0, "r0": "0.5", "span": 7.0, "out": str(tmp_path), "svg": False,
    }))
    rc = main(["--config", str(cfg), "solve"])
    assert rc == EXIT_OK
    capsys.readouterr()
    prov = json.loads((tmp_path / "catenary_a1_r0.5.json").read_text())
    assert prov["solver"]["span"] == 7.0
    # explicit flag wins over the file value
    rc = main(["--config", str(cfg), "solve", "--r0", "0.25"])
    assert rc == EXIT_OK
    capsys.readouterr()
    assert (tmp_path / "catenary_a1_r0.25.json").exists()


def test_cli_config_rejects_unknown_keys(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"alpha": 1.0, "zeta": 3}))
    assert main(["--config", str(cfg), "classify", "--r0", "0.5"]) == EXIT_USAGE


def test_cli_check_selected_suites(capsys):
    rc = main(["check", "--suite", "equilibrium,g-polynomial"])
    assert rc == EXIT_OK
    out = capsys.readouterr().out
    assert out.count("PASS") == 2
