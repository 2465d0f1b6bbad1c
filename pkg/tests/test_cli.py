import csv
import json

import numpy as np
import pytest

from dephasing.cli import main
from dephasing.model import (
    DephasingModel,
    EnsembleSpec,
    Family,
    mixed_qutrit_example,
    random_instance,
    save_model,
    validate,
)


@pytest.fixture
def entangled_path(tmp_path):
    path = tmp_path / "fixture.json"
    save_model(mixed_qutrit_example(), path)
    return str(path)


@pytest.fixture
def separable_path(tmp_path):
    spec = EnsembleSpec(seed=13, count=1, n=3, m=3, family=Family.COMMUTING)
    path = tmp_path / "commuting.json"
    save_model(validate(random_instance(spec, 0)), path)
    return str(path)


class TestCheck:
    def test_separable_exit_code(self, separable_path):
        assert main(["check", "--model", separable_path, "--t", "1.0"]) == 0

    def test_entangled_exit_code(self, entangled_path):
        assert main(["check", "--model", entangled_path, "--t", "1.0"]) == 3

    def test_json_format(self, entangled_path, capsys):
        code = main(["check", "--model", entangled_path, "--t", "1.0",
                     "--format", "json"])
        assert code == 3
        doc = json.loads(capsys.readouterr().out)
        assert doc["verdict"] == "entangled"
        assert doc["witnesses"] == ["cross[2,1]"]
        assert doc["pt"]["min_eigenvalue"] == pytest.approx(-1 / 6)
        assert doc["pt"]["negativity"] == pytest.approx(1 / 3)
        assert len(doc["pt"]["eigenvalues"]) == 6

    def test_text_format(self, entangled_path, capsys):
        main(["check", "--model", entangled_path, "--t", "1.0"])
        out = capsys.readouterr().out
        assert "verdict  = entangled" in out
        assert "failed conditions: cross[2,1]" in out

    def test_loose_tolerance_flips_verdict(self, entangled_path):
        code = main(["check", "--model", entangled_path, "--t", "1.0",
                     "--tol-comm", "10.0"])
        assert code == 0

    def test_missing_file(self, tmp_path, capsys):
        code = main(["check", "--model", str(tmp_path / "nope.json")])
        assert code == 1
        assert "error:" in capsys.readouterr().err

    def test_malformed_json(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        assert main(["check", "--model", str(path)]) == 1
        assert capsys.readouterr().err

    def test_invalid_model_reports_path(self, tmp_path, capsys):
        m = mixed_qutrit_example()
        broken = DephasingModel(n=3, m=2, c=m.c, r0=m.r0 * 0.5, w=m.w)
        path = tmp_path / "invalid.json"
        save_model(broken, path)
        assert main(["check", "--model", str(path)]) == 1
        doc = json.loads(capsys.readouterr().err)
        assert any(e["path"] == "r0" for e in doc["errors"])


class TestSweep:
    def test_csv_header_and_rows(self, entangled_path, tmp_path):
        out = tmp_path / "sweep.csv"
        code = main(["sweep", "--model", entangled_path, "--t-start", "0.0",
                     "--t-end", "2.0", "--steps", "5", "--out", str(out)])
        assert code == 0
        with open(out, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["t", "max_qubit_like_norm", "max_cross_norm",
                           "min_pt_eig", "negativity", "verdict"]
        assert len(rows) == 6
        assert [r[-1] for r in rows[1:]] == ["entangled"] * 5  # snapshot model
        ts = [float(r[0]) for r in rows[1:]]
        assert np.allclose(ts, np.linspace(0.0, 2.0, 5))

    def test_hamiltonian_model_starts_separable(self, tmp_path):
        spec = EnsembleSpec(seed=5, count=1, n=3, m=2, family=Family.GENERIC)
        path = tmp_path / "generic.json"
        save_model(validate(random_instance(spec, 0)), path)
        out = tmp_path / "sweep.csv"
        main(["sweep", "--model", str(path), "--t-start", "0.0",
              "--t-end", "1.0", "--steps", "3", "--out", str(out)])
        with open(out, newline="") as fh:
            rows = list(csv.reader(fh))[1:]
        assert rows[0][-1] == "separable"
        assert float(rows[0][4]) < 1e-12

    def test_deterministic_output(self, entangled_path, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (a, b):
            main(["sweep", "--model", entangled_path, "--t-start", "0.0",
                  "--t-end", "1.0", "--steps", "4", "--out", str(out)])
        assert a.read_bytes() == b.read_bytes()

    def test_rejects_bad_grid(self, entangled_path, tmp_path, capsys):
        out = str(tmp_path / "x.csv")
        assert main(["sweep", "--model", entangled_path, "--t-start", "1.0",
                     "--t-end", "0.0", "--steps", "3", "--out", out]) == 1
        assert main(["sweep", "--model", entangled_path, "--t-start", "0.0",
                     "--t-end", "1.0", "--steps", "1", "--out", out]) == 1
        capsys.readouterr()


class TestExample:
    def test_self_check_passes(self, capsys):
        assert main(["example"]) == 0
        out = capsys.readouterr().out
        assert "self-check passed" in out
        assert "verdict: entangled" in out
        assert "PT eigenvalues:" in out

    def test_prints_scaled_matrices(self, capsys):
        main(["example"])
        out = capsys.readouterr().out
        assert "joint state sigma (times 6):" in out
        assert "partial transpose over the environment (times 6):" in out


class TestRandom:
    def test_writes_models_and_summary(self, tmp_path, capsys):
        out = tmp_path / "ensemble"
        code = main(["random", "--seed", "9", "--count", "3", "--n", "3",
                     "--m", "2", "--family", "generic", "--out", str(out)])
        assert code == 0
        files = sorted(p.name for p in out.glob("model_*.json"))
        assert files == ["model_0000.json", "model_0001.json",
                         "model_0002.json"]
        with open(out / "summary.csv", newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0][0] == "index"
        assert len(rows) == 4
        capsys.readouterr()

    def test_byte_identical_reruns(self, tmp_path, capsys):
        outs = []
        for name in ("a", "b"):
            out = tmp_path / name
            main(["random", "--seed", "11", "--count", "2", "--family",
                  "commuting", "--out", str(out)])
            outs.append(out)
        for fname in ("model_0000.json", "model_0001.json", "summary.csv"):
            assert (outs[0] / fname).read_bytes() == (outs[1] / fname).read_bytes()
        capsys.readouterr()

    def test_generated_models_load_back(self, tmp_path, capsys):
        out = tmp_path / "ensemble"
        main(["random", "--seed", "2", "--count", "1", "--family", "mixed",
              "--out", str(out)])
        assert main(["check", "--model", str(out / "model_0000.json"),
                     "--t", "0.0"]) == 0
        capsys.readouterr()
