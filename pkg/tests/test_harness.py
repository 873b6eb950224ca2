import csv
import json

import numpy as np
import pytest
from click.testing import CliRunner

from rarelab.cli import main
from rarelab.harness import ExperimentConfigError, RunManifest, parse_config
from rarelab.wave_profiles import CharacteristicMap, smooth_w

CONSTANT = """\
name = "const"

[flux]
kind = "burgers"

[viscosity]
kind = "regularized_power"
p = 0.5

[far_field]
u_minus = 0.0
u_plus = 0.0

[initial]
kind = "constant_plus_bump"
amplitude = 1.0

[grid]
cells = 200
x_left = -20.0
x_right = 20.0
{grid_extra}

[time]
t_end = {t_end}
{time_extra}
"""

BURGERS_RUN = """\
name = "burgers-small"

[flux]
kind = "burgers"

[viscosity]
kind = "regularized_power"
p = 0.5

[far_field]
u_minus = -1.0
u_plus = 1.0

[initial]
kind = "profile_plus_bump"
profile = "smoothed"
q = 1.0
amplitude = 0.5

[grid]
cells = 1000
margin = 20.0
boundary = "profile"

[time]
t_end = {t_end}
snapshots = 16

[checks]
lines = [{{ key = "rarefaction/dx/Lq+1", q = 1 }}]
"""

DIFFUSION_RUN = """\
name = "diffusion-small"

[flux]
kind = "zero"

[viscosity]
kind = "regularized_power"
p = 0.5

[far_field]
u_minus = 0.0
u_plus = 0.0

[initial]
kind = "constant_plus_bump"
amplitude = 1.0

[grid]
cells = 400
x_left = -60.0
x_right = 60.0

[time]
t_end = 60.0
snapshots = 16

[checks]
lines = ["diffusion/dt/L2"]
"""


@pytest.fixture
def run(tmp_path, monkeypatch):
    monkeypatch.setenv("RARELAB_OUTPUT_ROOT", str(tmp_path / "out"))
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")
    runner = CliRunner()

    def invoke(*args):
        return runner.invoke(main, [str(a) for a in args], catch_exceptions=False)

    return invoke


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


def read_profile(path):
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    return {k: np.array([float(r[k]) for r in rows]) for k in rows[0]}


# --- profile ---------------------------------------------------------------------

def test_profile_rarefaction_value(run, tmp_path):
    res = run("profile", "--kind", "rarefaction", "--flux", "burgers", "--um", -1, "--up", 1, "--t", 2)
    assert res.exit_code == 0
    cols = read_profile(res.output.strip())
    i = np.argmin(np.abs(cols["x"] - 1.0))
    assert cols["x"][i] == 1.0
    assert cols["u"][i] == pytest.approx(0.5, abs=1e-14)
    assert (tmp_path / "out" / "profiles" / "rarefaction_t2.000000.svg").exists()


def test_profile_smoothed_initial_data(run):
    res = run("profile", "--kind", "smoothed", "--q", 1, "--t", 0)
    assert res.exit_code == 0
    cols = read_profile(res.output.strip())
    w0 = smooth_w(CharacteristicMap(1.0, -1.0, 1.0), 0.0, cols["x"])
    assert np.max(np.abs(cols["u"] - w0)) <= 1e-14


def test_profile_contact_midpoint(run):
    res = run("profile", "--kind", "contact", "--um", 0, "--up", 2, "--mu", 1, "--t", 1)
    assert res.exit_code == 0
    cols = read_profile(res.output.strip())
    assert cols["u"][cols["x"] == 0.0][0] == pytest.approx(1.0, abs=1e-14)


def test_profile_bad_spec_is_usage_error(run):
    assert run("profile", "--kind", "smoothed", "--q", 0.3).exit_code == 2
    assert run("profile", "--kind", "rarefaction", "--um", 1, "--up", -1).exit_code == 2


# --- solve -----------------------------------------------------------------------

def test_solve_constant_t_end_zero(run, tmp_path):
    cfg = write(tmp_path, "c.toml", CONSTANT.format(t_end=0.0, grid_extra="", time_extra=""))
    res = run("solve", cfg)
    assert res.exit_code == 0, res.output
    m = RunManifest.read(tmp_path / "out" / "const")
    assert len(m.snapshots) == 1
    assert (tmp_path / "out" / "const" / "norms.csv").exists()


def test_solve_malformed_config_reports_line(run, tmp_path):
    text = CONSTANT.format(t_end=1.0, grid_extra="", time_extra="").replace("p = 0.5", "p = -0.5")
    res = run("solve", write(tmp_path, "bad.toml", text))
    assert res.exit_code == 2
    assert "bad.toml:8:" in res.output


def test_solve_syntax_error_reports_line(run, tmp_path):
    text = CONSTANT.format(t_end=1.0, grid_extra="", time_extra="").replace("cells = 200", "cells = = 200")
    res = run("solve", write(tmp_path, "bad.toml", text))
    assert res.exit_code == 2
    assert "bad.toml:19:" in res.output


def test_unknown_key_rejected_with_line():
    text = CONSTANT.format(t_end=1.0, grid_extra="celz = 3", time_extra="")
    with pytest.raises(ExperimentConfigError) as exc:
        parse_config(text)
    assert exc.value.line == 22


def test_missing_config_is_usage_error(run, tmp_path):
    assert run("solve", tmp_path / "nope.toml").exit_code == 2


def test_solve_forced_blowup(run, tmp_path):
    cfg = write(tmp_path, "b.toml", CONSTANT.format(t_end=50.0, grid_extra="dt_override = 5.0", time_extra=""))
    res = run("solve", cfg)
    assert res.exit_code == 3
    assert "blowup" in res.output


def test_heat_oracle_manifest(run, tmp_path):
    res = run("solve", "configs/heat_oracle.toml")
    assert res.exit_code == 0, res.output
    m = RunManifest.read(tmp_path / "out" / "heat-oracle")
    assert m.oracle_max_error is not None and 0 < m.oracle_max_error <= 1e-3
    assert m.monitor["relative_mass_defect"] <= 1e-10


def test_solve_is_byte_reproducible(run, tmp_path):
    cfg = write(tmp_path, "c.toml", CONSTANT.format(t_end=5.0, grid_extra="", time_extra="snapshots = 6"))
    d = tmp_path / "out" / "const"
    assert run("solve", cfg).exit_code == 0
    first = {p.relative_to(d): p.read_bytes() for p in sorted(d.rglob("*")) if p.is_file()}
    assert run("solve", cfg).exit_code == 0
    second = {p.relative_to(d): p.read_bytes() for p in sorted(d.rglob("*")) if p.is_file()}
    assert first == second


def test_config_hash_depends_only_on_text():
    text = CONSTANT.format(t_end=1.0, grid_extra="", time_extra="")
    assert parse_config(text).config_hash == parse_config(text, "elsewhere.toml").config_hash
    assert parse_config(text).config_hash != parse_config(text + "\n").config_hash


# --- decay -----------------------------------------------------------------------

def test_decay_burgers_derivative_line(run, tmp_path):
    cfg = write(tmp_path, "r.toml", BURGERS_RUN.format(t_end=100.0))
    res = run("decay", cfg)
    assert res.exit_code == 0, res.output
    header = res.output.splitlines()[0].split()
    assert header == ["norm", "fitted", "theoretical", "verdict"]
    report = json.loads((tmp_path / "out" / "burgers-small" / "reports" / "rarefaction_dx_L2.json").read_text())
    assert report["theoretical_exponent"] == -0.5
    assert (tmp_path / "out" / "burgers-small" / "norms.svg").exists()


def test_decay_time_derivative_zero_flux(run, tmp_path):
    res = run("decay", write(tmp_path, "d.toml", DIFFUSION_RUN))
    assert res.exit_code == 0, res.output
    report = json.loads((tmp_path / "out" / "diffusion-small" / "reports" / "diffusion_dt_L2.json").read_text())
    assert report["theoretical_exponent"] == -0.75
    m = RunManifest.read(tmp_path / "out" / "diffusion-small")
    assert list(m.verdicts) == ["diffusion/dt/L2"]


def test_decay_reuses_snapshots_deterministically(run, tmp_path):
    cfg = write(tmp_path, "d.toml", DIFFUSION_RUN)
    d = tmp_path / "out" / "diffusion-small"
    first = run("decay", cfg)
    reports = (d / "reports" / "diffusion_dt_L2.json").read_bytes()
    svg = (d / "norms.svg").read_bytes()
    second = run("decay", cfg)
    assert first.output == second.output
    assert (d / "reports" / "diffusion_dt_L2.json").read_bytes() == reports
    assert (d / "norms.svg").read_bytes() == svg


def test_decay_insufficient_span(run, tmp_path):
    cfg = write(tmp_path, "r.toml", BURGERS_RUN.format(t_end=3.0))
    assert run("decay", cfg).exit_code == 4


def test_decay_planted_series(run, tmp_path):
    t = np.geomspace(1, 1000, 40)
    lines = ["t,planted"] + [f"{ti!r},{(1 + ti) ** -0.5!r}" for ti in t.tolist()]
    series = write(tmp_path, "s.csv", "\n".join(lines) + "\n")
    res = run("decay", "--series", series, "--theoretical", -0.5)
    assert res.exit_code == 0
    row = res.output.splitlines()[1].split()
    assert row[0] == "planted"
    assert abs(float(row[1]) + 0.5) <= 0.01
    assert row[3] == "pass"


def test_decay_short_series(run, tmp_path):
    series = write(tmp_path, "s.csv", "t,a\n1,1\n2,0.5\n3,0.3\n")
    assert run("decay", "--series", series).exit_code == 4


def test_decay_garbage_series(run, tmp_path):
    series = write(tmp_path, "s.csv", "t,a\n1,x\n")
    assert run("decay", "--series", series).exit_code == 2


def test_decay_needs_exactly_one_source(run, tmp_path):
    assert run("decay").exit_code == 2


# --- verify ----------------------------------------------------------------------

def test_verify_default_passes(run):
    res = run("verify")
    assert res.exit_code == 0
    speed_rows = [ln for ln in res.output.splitlines() if ln.startswith("  ") and "r=" not in ln]
    assert {"bounds", "fan-convergence"} <= {ln.split()[0] for ln in speed_rows}
    assert all(ln.split()[1] == "pass" for ln in speed_rows)


def test_verify_rejects_small_q(run):
    res = run("verify", "--q", 0.4)
    assert res.exit_code == 2
    assert "1/2" in res.output


def test_verify_r_sweep_rows(run):
    res = run("verify", "--r-sweep")
    assert res.exit_code == 0
    rows = [ln.split()[0] for ln in res.output.splitlines() if ln.strip().startswith("r=")]
    assert rows == ["r=1", "r=2", "r=4", "r=inf"]


def test_version(run):
    res = run("--version")
    assert res.exit_code == 0 and "0.1.0" in res.output


def test_module_entry_point():
    import subprocess
    import sys
    out = subprocess.run([sys.executable, "-m", "rarelab", "--help"], capture_output=True, text=True)
    assert out.returncode == 0 and all(c in out.stdout for c in ("profile", "solve", "decay", "verify"))
