import json
import math

import pytest
from click.testing import CliRunner

from qlrep.cli import main

REPRESENT = """
kind = "represent"

[contextual_data]
p_a = [0.5, 0.5]
p_b = [0.7165063509461096, 0.2834936490538904]
transition = [[0.75, 0.25], [0.25, 0.75]]

[outputs]
report = "rep.json"
"""

EVOLVE = """
kind = "evolve"
seed = 3
h = 1.0

[contextual_data]
p_a = [0.5, 0.5]
p_b = [0.7165063509461096, 0.2834936490538904]
transition = [[0.75, 0.25], [0.25, 0.75]]

[law]
family = "constant"
E = 1.0

[grid]
t0 = 0.0
t1 = 1.0
dt = 0.01

[outputs]
csv = "evolve.csv"
report = "evolve.json"
"""

ODE = """
kind = "ode"

[law]
family = "constant"
c = -1.0

[grid]
t0 = 0.0
t1 = 2.0
dt = 0.001

[ode]
theta0 = 0.7

[outputs]
csv = "ode.csv"
"""

HYPERBOLIC = """
kind = "represent"

[contextual_data]
p_a = [0.5, 0.5]
p_b = [0.001, 0.999]
transition = [[0.9, 0.1], [0.8, 0.2]]

[outputs]
report = "h.json"
"""

BOUNDARY = """
kind = "represent"

[contextual_data]
p_a = [0.5, 0.5]
p_b = [0.9330127018922193, 0.06698729810778069]
transition = [[0.75, 0.25], [0.25, 0.75]]

[outputs]
report = "b.json"
"""


def invoke(*args):
    return CliRunner().invoke(main, list(args))


def write(tmp_path, text, name="scn.toml"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


class TestRunCommand:
    def test_represent_roundtrip(self, tmp_path):
        res = invoke("run", write(tmp_path, REPRESENT), "--out-dir", str(tmp_path))
        assert res.exit_code == 0, res.output
        stdout_report = json.loads(res.output)
        file_report = json.loads((tmp_path / "rep.json").read_text())
        assert stdout_report["results"] == file_report["results"]
        meta = file_report["meta"]
        assert meta["tool"] == "qlrep"
        assert meta["kind"] == "represent"
        assert meta["seed"] == 0 and meta["h"] == 1.0
        assert meta["tolerance_profile"] == "default"
        assert "timestamp" in meta and "timestamp" not in json.dumps(file_report["results"])
        entry = file_report["results"]["contexts"][0]
        assert entry["classification"] == "trigonometric"
        assert entry["orthonormal"] is True

    def test_evolve_csv_shape(self, tmp_path):
        res = invoke("run", write(tmp_path, EVOLVE), "--out-dir", str(tmp_path))
        assert res.exit_code == 0, res.output
        lines = (tmp_path / "evolve.csv").read_text().splitlines()
        assert lines[0] == "t,theta,lambda,xi,pB1,pB2,pA1,pA2"
        assert len(lines) == 102
        first = lines[1].split(",")
        assert float(first[0]) == 0.0
        assert abs(float(first[1]) - math.pi / 3.0) <= 1e-12
        assert float(first[3]) == 0.0

    def test_ode_csv_shape(self, tmp_path):
        res = invoke("run", write(tmp_path, ODE), "--out-dir", str(tmp_path))
        assert res.exit_code == 0, res.output
        lines = (tmp_path / "ode.csv").read_text().splitlines()
        assert lines[0] == "t,theta,lambda,method"
        methods = {line.rsplit(",", 1)[1] for line in lines[1:]}
        assert methods == {"theta-integration", "direct-EABB"}

    def test_same_seed_byte_identical_csv(self, tmp_path):
        scn = write(tmp_path, EVOLVE)
        invoke("run", scn, "--out-dir", str(tmp_path))
        first = (tmp_path / "evolve.csv").read_bytes()
        invoke("run", scn, "--out-dir", str(tmp_path))
        assert (tmp_path / "evolve.csv").read_bytes() == first

    def test_h_override_rescales_energy(self, tmp_path):
        scn = write(tmp_path, EVOLVE)
        res = invoke("run", scn, "--out-dir", str(tmp_path), "--h", "2.0")
        assert res.exit_code == 0, res.output
        report = json.loads((tmp_path / "evolve.json").read_text())
        assert report["meta"]["h"] == 2.0
        # E fixed by the scenario; rate becomes -E/h = -0.5, extraction recovers E
        assert abs(report["results"]["extracted_energy"] - 1.0) <= 1e-9

    def test_seed_override_recorded(self, tmp_path):
        scn = write(tmp_path, EVOLVE)
        res = invoke("run", scn, "--out-dir", str(tmp_path), "--seed", "99")
        report = json.loads((tmp_path / "evolve.json").read_text())
        assert report["meta"]["seed"] == 99


class TestExitCodes:
    def test_unusable_input_is_2(self, tmp_path):
        res = invoke("run", write(tmp_path, "kind = nonsense"))
        assert res.exit_code == 2
        assert "error:" in res.stderr

    def test_missing_file_is_2(self, tmp_path):
        res = invoke("run", str(tmp_path / "none.toml"))
        assert res.exit_code == 2

    def test_out_of_domain_is_3(self, tmp_path):
        res = invoke("run", write(tmp_path, HYPERBOLIC), "--out-dir", str(tmp_path))
        assert res.exit_code == 3
        assert "hyperbolic" in res.stderr

    def test_io_failure_is_4(self, tmp_path):
        (tmp_path / "sub").write_text("file, not a directory")
        blocked = REPRESENT.replace('report = "rep.json"', 'report = "sub/rep.json"')
        res = invoke("run", write(tmp_path, blocked), "--out-dir", str(tmp_path))
        assert res.exit_code == 4

    def test_strict_profile_rejects_boundary(self, tmp_path):
        scn = write(tmp_path, BOUNDARY)
        relaxed = invoke("run", scn, "--out-dir", str(tmp_path))
        assert relaxed.exit_code == 0, relaxed.output
        strict = invoke("run", scn, "--out-dir", str(tmp_path),
                        "--tolerance-profile", "strict")
        assert strict.exit_code == 3

    def test_ode_kind_needs_plain_rate_family(self, tmp_path):
        text = """
kind = "ode"

[law]
[[law.contexts]]
label = "u"
family = "constant"
c = 1.0

[[law.contexts]]
label = "v"
family = "constant"
c = 2.0

[grid]
t0 = 0.0
t1 = 1.0
dt = 0.01
"""
        res = invoke("run", write(tmp_path, text), "--out-dir", str(tmp_path))
        assert res.exit_code == 2
