import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given

from oscrhp import FileFormatError, JumpSpec, OscSeries, RationalSeries, eval_osc, eval_series, io, solve
from strategies import osc_series, series


@given(series(max_index=30, max_terms=10))
def test_series_roundtrip_is_exact(s):
    back = io.series_from_dict(json.loads(json.dumps(io.series_to_dict(s))))
    assert back == s


@given(osc_series())
def test_osc_roundtrip_is_exact(s):
    back = io.series_from_dict(json.loads(json.dumps(io.series_to_dict(s))), oscillatory=True)
    assert back == s


def test_writer_sorts_and_reader_accepts_any_order(tmp_path):
    s = RationalSeries({3: 1.0, -2: 2j, 1: -0.5})
    path = tmp_path / "s.json"
    io.write_series(s, path)
    data = json.loads(path.read_text())
    assert [t["j"] for t in data["terms"]] == [-2, 1, 3]
    data["terms"].reverse()
    path.write_text(json.dumps(data))
    x = np.linspace(-3, 3, 11)
    assert np.array_equal(eval_series(io.read_series(path), x), eval_series(s, x))


def test_frequency_field():
    s = OscSeries.term(-1, Fraction(3, 4), 0.2)
    d = io.series_to_dict(s)
    assert d["terms"][0]["alpha"] == [3, 4]
    assert io.series_from_dict(d) == s


@pytest.mark.parametrize("bad", [
    {"terms": [{"j": 0, "re": 1, "im": 0}]},
    {"terms": [{"j": 1.5, "re": 1, "im": 0}]},
    {"terms": [{"j": 1, "im": 0}]},
    {"beta": -1, "terms": []},
    {"terms": [{"j": 1, "re": 1, "alpha": [1, 0]}]},
    {"beta": 1.0},
])
def test_malformed_files_rejected(bad):
    with pytest.raises(FileFormatError):
        io.series_from_dict(bad)


def test_invalid_json(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    with pytest.raises(FileFormatError):
        io.read_series(p)


def test_matrix_roundtrip(tmp_path):
    u = solve(JumpSpec("nls", rho=RationalSeries({-1: 0.45}), x=1), "mp").u
    p = tmp_path / "u.json"
    io.write_matrix(u, p)
    back = io.read_matrix(p)
    x = np.linspace(-5, 5, 7)
    assert np.array_equal(back(x), u(x))


def test_jump_spec_files(tmp_path):
    io.write_series(RationalSeries({-1: 0.45}), tmp_path / "rho.json")
    (tmp_path / "spec.json").write_text(json.dumps(
        {"kind": "nls", "rho_file": "rho.json", "x": -1, "t": 0, "precondition": "ldu"}))
    spec, pre = io.read_jump_spec(tmp_path / "spec.json")
    assert spec.kind == "nls" and spec.x == -1 and pre == "ldu"
    assert eval_osc(spec.rho, 0.0) == pytest.approx(-0.9)
    (tmp_path / "bad.json").write_text(json.dumps({"kind": "nls", "x": 0}))
    with pytest.raises(FileFormatError):
        io.read_jump_spec(tmp_path / "bad.json")
    (tmp_path / "sech.json").write_text(json.dumps({"kind": "scalar-sech", "precondition": "fredholm"}))
    spec, pre = io.read_jump_spec(tmp_path / "sech.json", n=100)
    assert spec.n == 100 and pre == "fredholm"


def test_csv_roundtrip_precision(tmp_path):
    vals = [0.1 + 0.2, 1 / 3, -2.5e-300, 12345678.123456789]
    p = tmp_path / "t.csv"
    io.write_csv(p, ["i", "v"], [(np.int64(i), np.float64(v)) for i, v in enumerate(vals)])
    header, rows = io.read_csv(p)
    assert header == ["i", "v"]
    assert [float(r[1]) for r in rows] == vals
    assert [r[0] for r in rows] == ["0", "1", "2", "3"]
