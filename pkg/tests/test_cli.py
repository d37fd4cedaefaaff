"""CLI contract: subcommands, formats, config layering, exit codes."""
import json
import math

import numpy as np
import pytest

from quasiweb.cli import main


def run(argv):
    return main(argv)


# ---------------------------------------------------------------------------
# cells
# ---------------------------------------------------------------------------

def test_cells_reports_first_boundary(tmp_path):
    out = tmp_path / "cells.json"
    assert run(["cells", "--mu", "4", "--hbar0", "0.12", "--nmax", "600",
                "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    first = data["cells"][0]
    assert first["m_lo"] == 0
    assert 230 <= first["n_hi"] <= 240
    assert first["r_hi"] == pytest.approx(
        math.sqrt(2 * first["n_hi"] * 0.12), rel=1e-12)
    assert not first["truncated"]
    assert data["cells"][-1]["truncated"]
    assert (tmp_path / "cells.json.meta.json").exists()


def test_cells_truncated_basis_flagged(tmp_path):
    out = tmp_path / "cells.json"
    assert run(["cells", "--nmax", "100", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert len(data["cells"]) == 1
    assert data["cells"][0]["truncated"]
    assert "warning" in data


def test_invalid_physics_is_config_error():
    assert run(["cells", "--hbar0", "-1"]) == 2
    assert run(["qe", "--mu", "0"]) == 2


# ---------------------------------------------------------------------------
# qe
# ---------------------------------------------------------------------------

def test_qe_spectrum_summary(tmp_path):
    out = tmp_path / "qe.json"
    assert run(["qe", "--cell", "1", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    energies = np.array(data["energies"])
    assert energies.size == 60
    assert np.max(np.abs(np.sort(energies) + np.sort(energies)[::-1])) < 1e-12
    ga = data["gaussian_ansatz"]
    assert ga["r_e"] == pytest.approx(5.3176, abs=1e-3)
    assert abs(ga["a_e_discrete"] - ga["a_e_bessel"]) / ga["a_e_bessel"] < 0.1
    assert ga["overlap_upper"] > 0.95
    assert data["edge_spacing"]["rel_std"] < 0.1
    assert data["config"]["eps"] == 0.002


def test_qe_zero_drive_is_numeric_failure(tmp_path):
    assert run(["qe", "--eps", "0", "--out", str(tmp_path / "x.json")]) == 1


def test_qe_missing_cell_is_config_error(tmp_path):
    assert run(["qe", "--cell", "99", "--out", str(tmp_path / "x.json")]) == 2


# ---------------------------------------------------------------------------
# husimi
# ---------------------------------------------------------------------------

def test_husimi_json_embeds_maxima_and_symmetry(tmp_path):
    out = tmp_path / "f.json"
    assert run(["husimi", "--state", "upper", "--nr", "120", "--nphi", "96",
                "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    fld = data["fields"]["upper"]
    assert len(fld["maxima"]) == 4
    assert fld["symmetry_error"]["4"] < 1e-12
    assert fld["symmetry_error"]["3"] > 1.0


def test_husimi_csv_and_pgm(tmp_path):
    csv = tmp_path / "f.csv"
    assert run(["husimi", "--state", "upper", "--nr", "60", "--nphi", "48",
                "--format", "csv", "--out", str(csv)]) == 0
    lines = csv.read_text().splitlines()
    assert lines[0].startswith("# config:")
    assert lines[1] == "r,phi,value"
    assert len(lines) == 2 + 60 * 48

    pgm = tmp_path / "f.pgm"
    assert run(["husimi", "--state", "upper", "--nr", "60", "--nphi", "48",
                "--format", "pgm", "--out", str(pgm)]) == 0
    head = pgm.read_text().splitlines()
    assert head[0] == "P2"
    assert head[1] == "256 256"
    assert head[2] == "65535"


def test_husimi_state_all_writes_both(tmp_path):
    out = tmp_path / "f.csv"
    assert run(["husimi", "--state", "all", "--nr", "40", "--nphi", "48",
                "--format", "csv", "--out", str(out)]) == 0
    assert (tmp_path / "f.upper.csv").exists()
    assert (tmp_path / "f.lower.csv").exists()


def test_husimi_csv_requires_out():
    assert run(["husimi", "--format", "csv"]) == 2


# ---------------------------------------------------------------------------
# classical
# ---------------------------------------------------------------------------

def test_classical_csv_layout(tmp_path):
    out = tmp_path / "sec.csv"
    assert run(["classical", "--periods", "50", "--nr", "4", "--nphi", "8",
                "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# config:")
    assert lines[1] == "orbit_id,s,X,P"
    assert len(lines) == 2 + 4 * 8 * 51
    first = lines[2].split(",")
    assert first[0] == "0" and first[1] == "0"


def test_classical_ic_file(tmp_path):
    ic = tmp_path / "ic.csv"
    ic.write_text("X,P\n4.5,0.0\n5.0,0.5\n")
    out = tmp_path / "sec.json"
    assert run(["classical", "--periods", "20", "--ic-file", str(ic),
                "--format", "json", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert len(data["orbits"]) == 2
    assert data["orbits"][0]["X"][0] == 4.5


def test_classical_bad_ic_file(tmp_path):
    ic = tmp_path / "ic.csv"
    ic.write_text("not-a-number\n")
    assert run(["classical", "--ic-file", str(ic)]) == 2


# ---------------------------------------------------------------------------
# config file layering and determinism
# ---------------------------------------------------------------------------

def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("mu=2\neps=0.01\nnmax=400\n")
    out = tmp_path / "cells.json"
    assert run(["cells", "--config", str(cfg), "--eps", "0.002",
                "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["config"]["mu"] == 2
    assert data["config"]["eps"] == 0.002  # flag wins
    assert data["config"]["nmax"] == 400


def test_unknown_config_key_rejected(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("bogus=1\n")
    assert run(["cells", "--config", str(cfg)]) == 2


def test_identical_config_gives_identical_bytes(tmp_path):
    a = tmp_path / "a" / "out.json"
    b = tmp_path / "b" / "out.json"
    a.parent.mkdir()
    b.parent.mkdir()
    # same logical config: emit to the same relative name, compare bytes
    import os
    cwd = os.getcwd()
    try:
        os.chdir(a.parent)
        assert run(["qe", "--out", "out.json"]) == 0
        os.chdir(b.parent)
        assert run(["qe", "--out", "out.json"]) == 0
    finally:
        os.chdir(cwd)
    assert a.read_bytes() == b.read_bytes()


def test_sidecar_holds_timestamp_outside_payload(tmp_path):
    out = tmp_path / "qe.json"
    assert run(["qe", "--out", str(out)]) == 0
    payload = out.read_text()
    assert "written_at" not in payload
    meta = json.loads((tmp_path / "qe.json.meta.json").read_text())
    assert "written_at" in meta
