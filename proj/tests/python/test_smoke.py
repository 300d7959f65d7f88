import json
import math

import numpy as np
import pytest

import demacc


def test_version():
    assert demacc.__version__ == "0.1.0"


def test_published_aggregates():
    assert abs(demacc.rmse_from_moments(2.84, 3.78, 42) - 4.69) < 0.015
    t = demacc.f_test(88.63, 3, 2450.496, 493)
    assert abs(t["f"] - 5.944) < 0.001
    assert 0.0005 <= t["p"] <= 0.0015
    assert abs(demacc.two_tailed_p(1.454) - 0.146) < 0.001


def test_summary_and_fences():
    s = demacc.summarize([1.0, -1.0, 3.0])
    assert s["n"] == 3
    assert s["mean"] == pytest.approx(1.0)
    assert s["rmse"] == pytest.approx(math.sqrt(11 / 3))
    f = demacc.tukey_fences([1, 2, 3, 4])
    assert f["q1"] == pytest.approx(1.75)
    assert f["q3"] == pytest.approx(3.25)


def test_grid_roundtrip(tmp_path):
    values = np.arange(12, dtype=float).reshape(3, 4)
    g = demacc.Grid(values, xll=10, yll=20, cellsize=2)
    path = str(tmp_path / "g.asc")
    g.write(path)
    back = demacc.read_grid(path)
    assert back == g
    np.testing.assert_array_equal(back.to_numpy(), values)
    assert back.sample(10.5, 25.5) == 0.0


def test_slope_aspect_plane():
    plane = demacc.make_plane(1.0, 0.0, 0.0, ncols=6, nrows=6)
    slope, aspect = demacc.slope_aspect(plane)
    assert slope.to_numpy()[2, 2] == pytest.approx(45.0)
    assert aspect.to_numpy()[2, 2] == pytest.approx(270.0)


def test_moran_checkerboard():
    xs, ys, vs = [], [], []
    for r in range(6):
        for c in range(6):
            xs.append(c)
            ys.append(r)
            vs.append(1.0 if (r + c) % 2 else -1.0)
    res = demacc.moran(xs, ys, vs, scheme="fixed_band", threshold=1.0, permutations=199, seed=3)
    assert res["i"] == pytest.approx(-1.0)
    assert res["expected"] == pytest.approx(-1 / 35)
    assert res["pseudo_p"] <= 0.01


def test_errors_map_to_python():
    with pytest.raises(demacc.DegenerateError):
        demacc.summarize([1.0])
    with pytest.raises(demacc.ConfigError):
        demacc.moran([0, 1], [0, 0], [1, 2], scheme="knn")
    with pytest.raises(demacc.Error):
        demacc.read_grid("/nonexistent.asc")


def test_assess_closure(tmp_path):
    dem = demacc.make_plane(0.05, 0.02, 100.0, ncols=20, nrows=20, cellsize=10)
    dem.write(str(tmp_path / "dem.asc"))
    rows = ["id,x,y,h"]
    k = 0
    for r in range(0, 20, 3):
        for c in range(0, 20, 3):
            x, y = 5 + 10 * c, 5 + 10 * r
            k += 1
            rows.append(f"P{k},{x},{y},{dem.sample(x, y)!r}")
    (tmp_path / "gcps.csv").write_text("\n".join(rows) + "\n")
    report = demacc.assess(
        {"input.dem": tmp_path / "dem.asc", "input.gcps": tmp_path / "gcps.csv"},
        out_dir=str(tmp_path / "out"),
    )
    assert report["stats"]["total"]["rmse"] == 0.0
    assert report["stats"]["total"]["n"] == k
    on_disk = json.loads((tmp_path / "out" / "report.json").read_text())
    assert on_disk == report
    with pytest.raises(demacc.ConfigError):
        demacc.assess({"input.dem": "x", "input.gcps": "y", "extract.method": "cubic"})
