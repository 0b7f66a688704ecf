import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from lpball.cli import main, parse_grid, parse_law
from lpball.distributions import Dirac0, Exponential, Gamma
from lpball.errors import ConfigError
from lpball.specfun import clt_variance

SMALL = {"kind": "clt", "params": {"p": 2.0, "q": 1.0}, "n_grid": [1024], "samples_per_n": 20_000, "seed": 3,
         "label": "small"}


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def no_env(monkeypatch):
    monkeypatch.delenv("LPBALL_OUTPUT_DIR", raising=False)


@pytest.fixture
def config(tmp_path):
    def write(doc, name="c.json"):
        path = tmp_path / name
        path.write_text(json.dumps(doc))
        return str(path)
    return write


class TestParsers:
    def test_grid(self):
        np.testing.assert_allclose(parse_grid("0:1:5"), [0, 0.25, 0.5, 0.75, 1])
        assert parse_grid("2.5").tolist() == [2.5]
        assert parse_grid("1:1:1").tolist() == [1.0]

    @pytest.mark.parametrize("bad", ["", "a:b:c", "0:1", "0:1:0", "0:1:1"])
    def test_bad_grid(self, bad):
        with pytest.raises(ConfigError):
            parse_grid(bad)

    def test_law(self):
        assert parse_law("Dirac0") == Dirac0()
        assert parse_law("Exponential:2") == Exponential(2.0)
        assert parse_law("Gamma:3:0.5") == Gamma(3.0, 0.5)
        for bad in ("Poisson", "Exponential", "Gamma:1", "Exponential:x"):
            with pytest.raises(ConfigError):
                parse_law(bad)


@pytest.mark.usefixtures("no_env")
class TestCommands:
    def test_constants(self, capsys):
        code, out, _ = run(capsys, "constants", "--p", "2", "--q", "1")
        assert code == 0
        header, values = rows(out)
        assert header[:4] == ["p", "q", "m_p", "clt_variance"]
        rec = dict(zip(header, map(float, values)))
        assert rec["clt_variance"] == pytest.approx(clt_variance(2.0, 1.0), rel=1e-15)
        assert rec["proj_variance_random"] == pytest.approx(rec["proj_variance_det"], abs=1e-12)

    def test_rate_grid(self, capsys):
        code, out, _ = run(capsys, "rate", "--kind", "ldp_qgtp", "--p", "1", "--q", "2", "--grid", "0:3:100")
        assert code == 0
        table = rows(out)
        assert table[0] == ["x", "rate", "speed_kind"] and len(table) == 101
        assert {r[2] for r in table[1:]} == {"n^(p/q)"}
        below = [r for r in table[1:] if float(r[0]) < 1.0]
        assert below and all(r[1] == "inf" for r in below)
        assert all(float(r[1]) >= 0 for r in table[1:])

    def test_rate_peq_with_law(self, capsys):
        code, out, _ = run(capsys, "rate", "--kind", "ldp_peq", "--p", "2", "--q", "2", "--law", "Exponential:0.5",
                           "--grid", "0.5")
        assert code == 0
        assert float(rows(out)[1][1]) == pytest.approx(math.log(2.0), rel=1e-9)

    def test_conjugate(self, capsys):
        code, out, _ = run(capsys, "conjugate", "--p", "2", "--q", "1", "--s1", "0.5:1:2", "--s2", "0.8")
        assert code == 0
        table = rows(out)
        assert table[0] == ["s1", "s2", "value", "t1", "t2", "converged"] and len(table) == 3
        assert all(float(r[2]) >= 0 for r in table[1:])

    def test_sample_norms_and_coords(self, capsys):
        code, out, _ = run(capsys, "sample", "--p", "1.5", "--n", "4", "--count", "20")
        assert code == 0
        table = rows(out)
        assert len(table) == 21
        assert all(abs(float(r[1]) - 1.0) < 1e-12 for r in table[1:])
        code, out2, _ = run(capsys, "sample", "--p", "1.5", "--n", "4", "--count", "5", "--coords",
                            "--law", "Exponential:1", "--seed", "7")
        table = rows(out2)
        assert table[0] == ["draw_index", "x1", "x2", "x3", "x4"]
        assert all(sum(abs(float(v)) ** 1.5 for v in r[1:]) < 1 for r in table[1:])

    def test_sample_is_seeded(self, capsys):
        a = run(capsys, "sample", "--p", "2", "--n", "3", "--q", "1", "--seed", "5")[1]
        b = run(capsys, "sample", "--p", "2", "--n", "3", "--q", "1", "--seed", "5")[1]
        assert a == b

    def test_output_dir_from_env(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv("LPBALL_OUTPUT_DIR", str(tmp_path / "out"))
        code, out, _ = run(capsys, "constants", "--p", "1", "--q", "2")
        assert code == 0 and out == ""
        assert (tmp_path / "out" / "constants.csv").read_text().startswith("p,q,")


@pytest.mark.usefixtures("no_env")
class TestErrors:
    @pytest.mark.parametrize(
        "argv",
        [
            ["constants", "--p", "-1", "--q", "1"],
            ["rate", "--kind", "ldp_qltp", "--p", "2", "--q", "1", "--law", "Gamma:2", "--grid", "0.5"],
            ["sample", "--p", "2", "--n", "0"],
            ["nonsense"],
            ["constants", "--p", "2"],
        ],
    )
    def test_config_errors_exit_one(self, capsys, argv):
        code, _, err = run(capsys, *argv)
        assert code == 1
        assert err.startswith("lpball-error tag=")
        assert len(err.strip().splitlines()) == 1

    def test_missing_config(self, capsys, tmp_path):
        code, _, err = run(capsys, "verify", "--config", str(tmp_path / "none.json"))
        assert code == 1 and "tag=" in err


@pytest.mark.usefixtures("no_env")
class TestVerify:
    def test_pass_writes_both_files(self, capsys, config, tmp_path):
        out = tmp_path / "o"
        code, stdout, _ = run(capsys, "verify", "--config", config(SMALL), "--output-dir", str(out))
        assert code == 0
        assert stdout.startswith("PASS small:")
        assert (out / "small.csv").read_text().splitlines()[0] == "n,statistic,empirical,target,stderr,verdict"
        doc = json.loads((out / "small.json").read_text())
        assert doc["passed"] is True and doc["config"]["seed"] == 3

    def test_failing_verdict_exits_three(self, capsys, config, tmp_path):
        # the LDP estimate at n = 1 cannot match the limiting rate
        bad = {"kind": "ldp", "params": {"p": 1.0, "q": 1.0}, "law": {"variant": "Exponential", "rate": 1.0},
               "n_grid": [1, 2], "samples_per_n": 1000, "thresholds": [0.2], "label": "bad",
               "tolerances": {"tail_slope": 0.001}}
        code, stdout, _ = run(capsys, "verify", "--config", config(bad), "--output-dir", str(tmp_path))
        assert code == 3
        assert "FAIL" in stdout
        assert json.loads((tmp_path / "bad.json").read_text())["passed"] is False

    def test_bad_config_leaves_no_files(self, capsys, config, tmp_path):
        out = tmp_path / "o"
        code, _, err = run(capsys, "verify", "--config", config({**SMALL, "samples_per_n": 10}), "--output-dir",
                           str(out))
        assert code == 1 and "samples_per_n" in err
        assert not out.exists() or not any(out.iterdir())

    def test_seed_override(self, capsys, config, tmp_path):
        run(capsys, "verify", "--config", config(SMALL), "--output-dir", str(tmp_path), "--seed", "99")
        assert json.loads((tmp_path / "small.json").read_text())["config"]["seed"] == 99

    def test_threads_do_not_change_bytes(self, capsys, config, tmp_path):
        doc = {**SMALL, "kind": "mdp", "n_grid": [64, 256], "thresholds": [0.5, 1.0], "samples_per_n": 20_000}
        path = config(doc)
        outputs = []
        for threads in (1, 3):
            d = tmp_path / f"t{threads}"
            run(capsys, "verify", "--config", path, "--output-dir", str(d), "--threads", str(threads))
            outputs.append(((d / "small.csv").read_bytes(), (d / "small.json").read_bytes()))
        assert outputs[0] == outputs[1]


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "lpball.cli", "constants", "--p", "2", "--q", "1"],
                          capture_output=True, text=True, cwd=tmp_path, env={"PATH": "/usr/bin:/bin"})
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.startswith("p,q,m_p")
