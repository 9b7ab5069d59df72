import io
import json
import subprocess
import sys

import jsonschema
import pytest

from vertexlab.cli import run
from vertexlab.schemas import SCHEMAS

COMMANDS = [
    "fgl verify --builtin multiplicative --order 12",
    "fgl verify --builtin additive --ring Z/5 --order 6",
    "fgl inverse --builtin multiplicative --order 6",
    "fgl from-log --log 0,1,0,0,0,1 --order 6",
    "hs check-iterative --translation multiplicative --carrier-degree 8",
    "hs check-f-derivation --translation additive --fgl multiplicative --carrier-degree 8",
    "hs check-assoc --translation multiplicative --carrier-degree 8 --depth 5",
    "hs conjecture34 --translation additive --fgl multiplicative --carrier-degree 6 --n-max 4",
    "mf eisenstein --weight 2 --terms 3",
    "mf eta --power -1 --terms 6",
    "mf j --terms 3",
    "mf serre --form E4 --terms 6",
    "mf eval --form j --terms 30",
    "mlde indicial --order 2 --kappa -11/3600",
    "mlde solve --order 2 --kappa -11/3600 --exponent -1/60 --terms 10 --json",
    "mlde residual --order 2 --kappa -11/3600 --exponent -1/60 --terms 6 --coefficients 1,1",
    "mlde scan --order 2 --dmax 24 --terms 20",
    "mlde scan --order 3 --point -1/48,1/24 --terms 12",
    "pierce analyze --ring Z/12",
    "pierce analyze --ring Z/2xZ/9",
    "pierce sweep --max 30",
    "theta genus1 --lattice E8 --terms 4",
    "theta genus1 --lattice Z --terms 4",
    "theta genus2 --lattice A1 --bounds 1,1",
    "theta character --lattice A1 --terms 6",
    "theta compare --lattice E8_plus_E8 --other D16plus --terms 3",
]


def call(cmd, *extra):
    out, err = io.StringIO(), io.StringIO()
    code = run(cmd.split() + list(extra), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def documents(text):
    text = text.strip()
    if not text:
        return []
    if text.startswith("{\n"):
        return [json.loads(text)]
    return [json.loads(line) for line in text.splitlines()]


@pytest.mark.parametrize("cmd", COMMANDS)
def test_output_validates_and_is_deterministic(cmd):
    code, out, err = call(cmd)
    assert code == 0, err
    schema = SCHEMAS[" ".join(cmd.split()[:2])]
    for doc in documents(out):
        jsonschema.validate(doc, schema)
    code2, out2, _ = call(cmd)
    assert code2 == 0 and out2 == out


def test_every_subcommand_has_a_schema():
    covered = {" ".join(c.split()[:2]) for c in COMMANDS}
    assert covered == set(SCHEMAS)


class TestExamples:
    def test_fgl_verify(self):
        code, out, _ = call("fgl verify --builtin multiplicative --order 12")
        assert code == 0 and json.loads(out)["verdict"] is True

    def test_mlde_solve(self):
        code, out, _ = call("mlde solve --order 2 --kappa -11/3600 --exponent -1/60 --terms 10 --json")
        doc = json.loads(out)
        assert code == 0
        assert doc["coefficients"] == ["1", "1", "1", "1", "2", "2", "3", "3", "4", "5", "6"]

    def test_pierce_z12(self):
        code, out, _ = call("pierce analyze --ring Z/12")
        doc = json.loads(out)
        assert code == 0
        assert (doc["local"], doc["vnr"], doc["exchange"], doc["monk_agree"]) == (False, False, True, True)

    def test_failed_check_exits_zero(self):
        code, out, _ = call("hs check-iterative --translation multiplicative --carrier-degree 6")
        assert code == 0 and json.loads(out)["verdict"] is False

    def test_scan_csv(self):
        code, out, _ = call("mlde scan --order 2 --point -1/24 --terms 10 --csv")
        lines = out.splitlines()
        assert code == 0 and lines[0] == "c,h_list,first_20_coeffs_of_vacuum"
        assert lines[1].startswith("1,0 1/4,1 3 4 7 13")

    def test_genus2_csv(self):
        code, out, _ = call("theta genus2 --lattice A1 --csv")
        assert code == 0 and "1,1,2,2" in out.splitlines()

    def test_mutation_flag(self):
        code, out, _ = call("hs check-f-derivation --translation additive --carrier-degree 8 --mutate 2:1,1")
        assert code == 0 and json.loads(out)["verdict"] is False


class TestExitCodes:
    def test_usage_errors(self):
        assert call("nonsense")[0] == 2
        assert call("fgl")[0] == 2
        assert call("mf eisenstein --weight 5")[0] == 2
        assert call("mlde solve --kappa 1/2/3 --exponent 0")[0] == 2
        assert call("fgl verify --ring Q/7")[0] == 2
        assert call("fgl from-log")[0] == 2

    def test_computation_errors(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text(json.dumps({"rank": 2, "gram": [[1, 2], [2, 1]]}))
        code, _, err = call(f"theta genus1 --lattice-file {p}")
        assert code == 1 and "positive definite" in err
        assert call("mlde solve --kappa -11/3600 --exponent 1/60")[0] == 1
        assert call("fgl from-log --log 0,2,1")[0] == 1
        assert call(f"pierce analyze --table {tmp_path / 'missing.json'}")[0] == 1

    def test_subprocess_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "vertexlab", "mf", "j", "--terms", "1"],
                              capture_output=True, text=True)
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["coefficients"] == ["1", "744", "196884"]
        proc = subprocess.run([sys.executable, "-m", "vertexlab", "bogus"], capture_output=True, text=True)
        assert proc.returncode == 2


def test_manifest(tmp_path):
    path = tmp_path / "manifest.json"
    code, out, _ = call("mf eta --power 24 --terms 4", "--manifest", str(path))
    assert code == 0
    m = json.loads(path.read_text())
    assert set(m) == {"argv", "config", "version", "elapsed_seconds", "output_sha256"}
    import hashlib
    assert m["output_sha256"] == hashlib.sha256(out.encode()).hexdigest()
    # replaying the recorded argv reproduces the digest
    replay = io.StringIO()
    assert run([a for a in m["argv"] if a not in ("--manifest", str(path))], stdout=replay) == 0
    assert hashlib.sha256(replay.getvalue().encode()).hexdigest() == m["output_sha256"]


def test_config_overrides_flags(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"terms": 2, "kappa": "-5/576"}))
    code, out, _ = call(f"mlde solve --kappa -11/3600 --exponent -1/24 --terms 9 --config {cfg}")
    assert code == 0
    assert json.loads(out)["coefficients"] == ["1", "3", "4"]
    cfg.write_text(json.dumps({"no_such_option": 1}))
    assert call(f"mf j --config {cfg}")[0] == 2


def test_seed_does_not_change_values():
    base = call("hs check-assoc --translation multiplicative --carrier-degree 8 --seed 0")[1]
    assert call("hs check-assoc --translation multiplicative --carrier-degree 8 --seed 7")[1] == base
    assert call("pierce analyze --ring Z/30 --seed 3")[1] == call("pierce analyze --ring Z/30")[1]


def test_parallel_scan_output_is_canonical():
    a = call("mlde scan --order 2 --dmax 30 --terms 20 --jobs 1")[1]
    b = call("mlde scan --order 2 --dmax 30 --terms 20 --jobs 3")[1]
    assert a == b
