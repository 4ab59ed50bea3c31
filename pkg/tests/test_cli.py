import csv
import json
import math

import numpy as np
from numpy.testing import assert_allclose

from cornerscatter.cli import main


def run(tmp_path, *argv):
    return main([*argv, "--workdir", str(tmp_path)])


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


# ------------------------------------------------------------------ spectrum

def test_sector_spectrum(tmp_path):
    assert run(tmp_path, "spectrum", "--geometry", "sector", "--omega", "pi/2",
               "--lambda-max", "6.5") == 0
    vals = [float(r["value"]) for r in rows(tmp_path / "exponents.csv") if float(r["value"]) > 0]
    assert_allclose(vals, [2, 4, 6], rtol=1e-12)
    man = json.loads((tmp_path / "spectrum.manifest.json").read_text())
    assert man["subcommand"] == "spectrum" and man["summary"]["exit_code"] == 0
    assert len(man["outputs"]) == 1


def test_cone_spectrum_axial(tmp_path):
    assert run(tmp_path, "spectrum", "--geometry", "cone", "--omega", "pi/2", "--orders", "0",
               "--lambda-max", "5.5", "--out", "cone.csv") == 0
    vals = [float(r["value"]) for r in rows(tmp_path / "cone.csv") if float(r["value"]) > 0]
    assert_allclose(vals, [1, 3, 5], atol=1e-9)
    assert all(r["certified"] == "1" for r in rows(tmp_path / "cone.csv"))


def test_degrees_flag(tmp_path):
    assert run(tmp_path, "spectrum", "--geometry", "sector", "--omega", "90", "--degrees") == 0
    vals = [float(r["value"]) for r in rows(tmp_path / "exponents.csv") if float(r["value"]) > 0]
    assert_allclose(vals, [2, 4, 6], rtol=1e-12)


def test_flat_sector_is_rejected(tmp_path, capsys):
    assert run(tmp_path, "spectrum", "--geometry", "sector", "--omega", "pi") == 2
    assert "omega = pi" in capsys.readouterr().err


def test_bad_arguments(tmp_path):
    assert run(tmp_path, "spectrum", "--geometry", "torus", "--omega", "1") == 2
    assert main(["spectrum", "--geometry", "sector", "--omega", "1",
                 "--workdir", str(tmp_path / "missing")]) == 2


# --------------------------------------------------------------- cauchy-null

def test_cauchy_null_trivial(tmp_path):
    assert run(tmp_path, "cauchy-null", "--geometry", "sector", "--omega", "pi/3",
               "--max-degree", "8") == 0
    doc = json.loads((tmp_path / "cauchy_null.json").read_text())
    assert doc["schema"].endswith("/1")
    assert [d["dimension"] for d in doc["degrees"]] == [0] * 7


def test_cauchy_null_half_plane(tmp_path):
    assert run(tmp_path, "cauchy-null", "--geometry", "sector", "--omega", "pi",
               "--max-degree", "2") == 0
    doc = json.loads((tmp_path / "cauchy_null.json").read_text())
    assert doc["degrees"][0]["degree"] == 2 and doc["degrees"][0]["dimension"] == 1


def test_cauchy_null_inconclusive(tmp_path):
    assert run(tmp_path, "cauchy-null", "--geometry", "sector", "--omega", "pi/3",
               "--max-degree", "6", "--min-degree", "6", "--precision-bits", "8",
               "--no-exact") == 3


# -------------------------------------------------------------------- expand

def test_expand_plane_wave(tmp_path, capsys):
    (tmp_path / "seeds.json").write_text(json.dumps(
        {"dimension": 2, "k": 6, "max_degree": 8, "plane_wave": {"angle": 0.4}}))
    assert run(tmp_path, "expand", "seeds.json", "--radii", "0.05,0.1", "--json") == 0
    out = json.loads(capsys.readouterr().out)
    assert out["schema"] == "cornerscatter.cli/expand/1"
    assert abs(out["slope"] - 7) <= 0.3


def test_expand_exact_seeds(tmp_path):
    (tmp_path / "seeds.json").write_text(json.dumps(
        {"dimension": 2, "k": "3/2", "max_degree": 5,
         "seeds": [{"n": 2, "sign": "+", "value": "1/3"}, {"n": 3, "sign": "-", "value": "2"}]}))
    assert run(tmp_path, "expand", "seeds.json") == 0
    doc = json.loads((tmp_path / "expansion.json").read_text())
    assert [t["harmonic"] for t in doc["lowest_terms"]] == [True, True]


def test_expand_bad_seeds(tmp_path):
    (tmp_path / "seeds.json").write_text("{not json")
    assert run(tmp_path, "expand", "seeds.json") == 2
    assert run(tmp_path, "expand", "absent.json") == 2
    (tmp_path / "s2.json").write_text(json.dumps({"dimension": 2}))
    assert run(tmp_path, "expand", "s2.json") == 2


# ------------------------------------------------------------ scatter, sweep

def test_zero_scene(tmp_path, scene_dir):
    assert run(tmp_path, "scatter", str(scene_dir / "zero.scene")) == 0
    data = np.loadtxt(tmp_path / "zero_farfield.csv", delimiter=",", skiprows=1)
    assert data.shape == (256, 3)
    assert np.all(data[:, 1:] == 0)


def test_missing_scene(tmp_path):
    assert run(tmp_path, "scatter", "nowhere.scene") == 2
    man = json.loads((tmp_path / "scatter.manifest.json").read_text())
    assert man["summary"]["exit_code"] == 2 and "not found" in man["summary"]["error"]


def test_malformed_scene(tmp_path):
    (tmp_path / "bad.scene").write_text("[scene]\nn = 32\n")
    assert run(tmp_path, "scatter", "bad.scene") == 2


def test_resolution_guard(tmp_path, scene_dir):
    assert run(tmp_path, "scatter", str(scene_dir / "square.scene"), "--n", "8") == 5


def test_forced_scatter_writes_snapshot(tmp_path, scene_dir, capsys):
    assert run(tmp_path, "scatter", str(scene_dir / "square.scene"), "--n", "32", "--k", "2",
               "--force", "--json") == 0
    out = json.loads(capsys.readouterr().out)
    assert out["schema"] == "cornerscatter.cli/scatter/1" and out["farfield_norm"] > 0
    assert (tmp_path / "square_field.bin").read_bytes()[:8] == b"CSFIELD\0"


def test_scatter_is_deterministic(tmp_path, scene_dir):
    outputs = []
    for name in ("a", "b"):
        d = tmp_path / name
        d.mkdir()
        assert run(d, "scatter", str(scene_dir / "square.scene"), "--n", "64", "--k", "3") == 0
        outputs.append([(d / f).read_bytes() for f in ("square_farfield.csv", "square_field.bin")])
    assert outputs[0] == outputs[1]


def test_square_vs_disk_demo(tmp_path, scene_dir, capsys):
    assert run(tmp_path, "sweep", str(scene_dir / "square_vs_disk.scene"), "--json") == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["square"]["flagged"] == []
    assert summary["disk"]["flagged"] == [6.7684]
    table = rows(tmp_path / "square_vs_disk.csv")
    assert len(table) == 21
    disk = np.array([float(r["norm_disk"]) for r in table])
    square = np.array([float(r["norm_square"]) for r in table])
    dip = int(np.argmin(disk))
    assert_allclose(float(table[dip]["k"]), 6.7684, atol=1e-12)
    assert disk[dip] < 1e-2 * square.min()
    # baseline from the first certified run of the bundled scene
    assert_allclose(disk[dip], 0.007192088005083063, rtol=1e-6)
    assert_allclose(square.min(), 0.8842307842852299, rtol=1e-6)
    assert all(r["flag_square"] == "0" for r in table)


def test_sweep_needs_range(tmp_path, scene_dir):
    assert run(tmp_path, "sweep", str(scene_dir / "zero.scene")) == 2


def test_every_subcommand_has_json_schema(tmp_path, capsys, scene_dir):
    calls = [["spectrum", "--geometry", "sector", "--omega", "2*pi/3"],
             ["cauchy-null", "--geometry", "cone", "--omega", "pi/3", "--max-degree", "3"],
             ["scatter", str(scene_dir / "zero.scene")]]
    for argv in calls:
        capsys.readouterr()
        assert run(tmp_path, *argv, "--json") == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["schema"] == f"cornerscatter.cli/{argv[0]}/1" and doc["exit_code"] == 0
    assert math.isfinite(doc["farfield_norm"])
