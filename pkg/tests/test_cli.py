import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from conftest import band_limited_field
from qdisp.cli import run
from qdisp.dispersion import DispersionModel
from qdisp.gaussian import CoherentPacket, evolve_packet
from qdisp.grid import EntropyTrajectory, GridSpec, load_field, save_field, spectral_propagate
from qdisp.partition import PartitionClass, classify


def parse_csv(text):
    lines = text.splitlines()
    assert lines[0].startswith("# config: ")
    config = json.loads(lines[0][len("# config: "):])
    rows = list(csv.reader(io.StringIO("\n".join(lines[1:]))))
    return config, rows[0], rows[1:]


def run_capture(capsys, argv):
    code = run(argv)
    out, err = capsys.readouterr()
    return code, out, err


class TestEvolve:
    def test_schrodinger_trajectory(self, capsys):
        code, out, _ = run_capture(capsys, ["evolve", "--model", "schrodinger", "--mass", "1",
                                            "--sigma", "1", "--k0", "0", "--t-end", "5",
                                            "--dt", "0.5"])
        assert code == 0
        config, header, rows = parse_csv(out)
        assert header == ["t", "det_sigma_t", "entropy_nats", "center0"]
        assert len(rows) == 11
        entropy = np.array([float(r[2]) for r in rows])
        assert np.all(np.diff(entropy) > 0)
        assert config["sigma"] == 1.0 and config["model"] == "schrodinger"

    def test_dirac_3d(self, capsys, tmp_path):
        out = tmp_path / "e.csv"
        code = run(["evolve", "--model", "dirac", "--mass", "2", "--sigma", "0.5", "--d", "3",
                    "--k0", "1,0,0", "--t-end", "1", "--dt", "0.25", "--out", str(out)])
        assert code == 0
        _, header, rows = parse_csv(out.read_text())
        assert header[-3:] == ["center0", "center1", "center2"] and len(rows) == 5

    def test_invalid_width(self, capsys):
        code, _, err = run_capture(capsys, ["evolve", "--sigma", "-1", "--t-end", "1", "--dt", "1"])
        assert code == 2 and "configuration error" in err

    def test_degenerate_input(self, capsys):
        code, _, err = run_capture(capsys, ["evolve", "--model", "dirac", "--mass", "0",
                                            "--sigma", "1", "--t-end", "1", "--dt", "1"])
        assert code == 3 and "DegenerateInput" in err


class TestClassify:
    def write(self, path, values):
        path.write_text("# trajectory\nt,S\n" + "".join(f"{i},{v}\n" for i, v in enumerate(values)))

    def test_constant(self, capsys, tmp_path):
        path = tmp_path / "constant.csv"
        self.write(path, [1.0, 1.0, 1.0, 1.0])
        code, out, _ = run_capture(capsys, ["classify", "--traj", str(path)])
        assert code == 0
        assert out.splitlines() == ["C", "signs: 000"]

    def test_oscillating_signs(self, capsys, tmp_path):
        path = tmp_path / "t.csv"
        self.write(path, [1.0, 2.0, 2.0, 1.0])
        code, out, _ = run_capture(capsys, ["classify", "--traj", str(path), "--tol", "1e-8"])
        assert out.splitlines() == ["I", "signs: +0-"]

    def test_too_few_samples(self, capsys, tmp_path):
        path = tmp_path / "t.csv"
        self.write(path, [1.0, 2.0])
        code, _, _ = run_capture(capsys, ["classify", "--traj", str(path)])
        assert code == 2

    def test_missing_file(self, capsys, tmp_path):
        code, _, _ = run_capture(capsys, ["classify", "--traj", str(tmp_path / "nope.csv")])
        assert code == 2


class TestDispersionCommands:
    def test_dispersion(self, capsys):
        code, out, _ = run_capture(capsys, ["dispersion", "--model", "dirac", "--k", "1,0,0"])
        assert code == 0
        _, header, rows = parse_csv(out)
        values = dict(zip(header, map(float, rows[0])))
        assert values["omega"] == pytest.approx(np.sqrt(2), rel=1e-15)
        assert values["lambda1"] == pytest.approx(2 ** -1.5, rel=1e-15)

    def test_dirac_check_random(self, capsys):
        code, out, _ = run_capture(capsys, ["dirac-check", "--random", "20", "--seed", "3"])
        assert code == 0
        _, header, rows = parse_csv(out)
        arr = np.array(rows, dtype=float)
        assert arr.shape == (20, len(header))
        assert np.all(arr[:, header.index("gram_error")] < 1e-10)
        assert np.all(arr[:, header.index("det_rel_error")] < 1e-10)

    def test_argparse_error_exit_code(self, capsys):
        assert run(["dispersion"]) == 2
        assert run(["nonsense"]) == 2


class TestPropagate:
    def test_round_trip(self, tmp_path, capsys):
        spec = GridSpec.from_bounds(-30, 30, 512)
        model = DispersionModel.schrodinger(1.0)
        f = evolve_packet(CoherentPacket.isotropic(1.0, 0.0, 2.0), model, 0.0).sample(spec)
        save_field(f, tmp_path / "in.bin")
        code = run(["propagate", "--t", "2", "--in", str(tmp_path / "in.bin"),
                    "--out", str(tmp_path / "out.bin"), "--density-csv", str(tmp_path / "d.csv")])
        assert code == 0
        g = load_field(tmp_path / "out.bin")
        assert np.array_equal(g.amplitude, spectral_propagate(f, model, 2.0).amplitude)
        assert (tmp_path / "d.csv").exists()

    def test_alias_risk_exit_code(self, tmp_path, capsys, rng):
        f = band_limited_field(rng, GridSpec.from_bounds(-1, 1, 64), fraction=1.01)
        save_field(f, tmp_path / "in.bin")
        code, _, err = run_capture(capsys, ["propagate", "--t", "1", "--in", str(tmp_path / "in.bin"),
                                            "--out", str(tmp_path / "o.bin")])
        assert code == 3 and "AliasRisk" in err


class TestScenarioCommands:
    def test_collide(self, tmp_path, capsys):
        scenario = tmp_path / "s.txt"
        scenario.write_text("sigma = 4\nk = 0.8\nvg = 1\nhessian = 0.5\nx1 = -12\nx2 = 12\n"
                            "grid_n = 200\ngrid_min = -60\ngrid_max = 60\nt_end = 6\ndt = 2\n"
                            "snapshots = 2\n")
        code, out, _ = run_capture(capsys, ["collide", "--scenario", str(scenario),
                                            "--out", str(tmp_path / "o")])
        assert code == 0 and out.startswith("collide: fermion")
        config, header, rows = parse_csv((tmp_path / "o" / "collide.csv").read_text())
        assert header == ["t", "S_fermion", "S_boson", "C_fermion", "C_boson"]
        assert len(rows) == 4 and config["x1"] == -12.0
        assert (tmp_path / "o" / "collide.svg").read_text().startswith("<svg")
        assert (tmp_path / "o" / "collide_t2_boson.svg").exists()

    def test_collide_unknown_key(self, tmp_path, capsys):
        scenario = tmp_path / "s.txt"
        scenario.write_text("speed = 3\n")
        code, _, err = run_capture(capsys, ["collide", "--scenario", str(scenario)])
        assert code == 2 and "speed" in err

    def test_sweep(self, tmp_path, capsys):
        scenario = tmp_path / "s.txt"
        scenario.write_text("grid_n = 300\nseparations = 0:100:50\n")
        code = run(["sweep", "--scenario", str(scenario), "--out", str(tmp_path), "--no-svg"])
        assert code == 0
        _, header, rows = parse_csv((tmp_path / "sweep.csv").read_text())
        assert header == ["x", "S_fermion", "S_boson"] and len(rows) == 3
        assert not (tmp_path / "sweep.svg").exists()


class TestFigures:
    def test_figure_4a_quarter(self, tmp_path, capsys):
        code, out, err = run_capture(capsys, ["figures", "--which", "4a", "--preset", "quarter",
                                            "--out", str(tmp_path)])
        assert code == 0
        config, header, rows = parse_csv((tmp_path / "fig4a.csv").read_text())
        assert config["preset"] == "quarter" and config["vg"] == 2.0
        arr = np.array(rows, dtype=float)
        for col in ("S_fermion", "S_boson"):
            traj = EntropyTrajectory(arr[:, 0], arr[:, header.index(col)])
            assert classify(traj) is PartitionClass.M
        assert "fig4a: fermion M, boson M" in out
        assert "warning: packet width 3.0 is below three grid spacings" in err

    def test_figure_3_quarter(self, tmp_path, capsys):
        assert run(["figures", "--which", "3", "--preset", "quarter", "--out", str(tmp_path)]) == 0
        names = sorted(p.name for p in tmp_path.iterdir())
        assert "fig3.csv" in names and "fig3_t70_fermion.svg" in names
        _, header, rows = parse_csv((tmp_path / "fig3.csv").read_text())
        assert header == ["t", "stats", "x", "marginal_density"] and len(rows) == 3 * 2 * 450

    def test_byte_identical_across_runs_and_threads(self, tmp_path, capsys, monkeypatch):
        outputs = []
        for threads in ("1", "1", "3"):
            monkeypatch.setenv("QDISP_THREADS", threads)
            out = tmp_path / threads / str(len(outputs))
            assert run(["figures", "--which", "4b", "--preset", "quarter", "--out", str(out)]) == 0
            outputs.append((out / "fig4b.csv").read_bytes())
        assert outputs[0] == outputs[1] == outputs[2]

    def test_bad_thread_count(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("QDISP_THREADS", "many")
        assert run(["figures", "--which", "4a", "--preset", "quarter", "--out", str(tmp_path)]) == 2


def test_module_entry_point(tmp_path):
    done = subprocess.run([sys.executable, "-m", "qdisp", "dispersion", "--k", "2"],
                          capture_output=True, text=True, check=False)
    assert done.returncode == 0
    assert done.stdout.splitlines()[-1].split(",")[1] == "2.0"
