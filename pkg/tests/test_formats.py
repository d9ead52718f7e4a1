import json

import numpy as np
import pytest

from phasestat.core import GridSpec
from phasestat.formats import (SchemaError, load_state, load_symbol, state_to_json, symbol_to_json,
                               write_csv, write_json)
from phasestat.states import coherent_state, coherent_superposition, projector, trace

DOC = {"hbar": 1.0, "grid": {"n": 64, "L": 8.0},
       "terms": [{"c": [0.6, 0], "ket": {"Z": [[0.5, 0.5], [-0.7, 0.2]]},
                  "bra": {"Z": [[0.5, 0.5], [-0.7, 0.2]]}},
                 {"c": [0.4, 0], "ket": {"Z": [[0, 0.3], [0.1, 0]]},
                  "bra": {"Z": [[0, 0.3], [0.1, 0]]}}]}


def test_load_state():
    rho = load_state(DOC)
    assert rho.particles == 2 and rho.rank == 2
    assert abs(trace(rho) - 1) < 1e-7


def test_state_round_trip(tmp_path):
    g = GridSpec(64, 8.0, 1.0, 2)
    psi = coherent_superposition([1, 1], [[0.5 + 0.5j, -0.7 + 0.2j], [-0.7 + 0.2j, 0.5 + 0.5j]], g)
    rho = projector(psi)
    path = tmp_path / "s.json"
    write_json(state_to_json(rho), path)
    back = load_state(path)
    X = np.array([[0.2, -0.4], [1.0, 0.3]])
    assert np.allclose(back.kernel(X, X[::-1]), rho.kernel(X, X[::-1]), atol=1e-15)


def test_symbol_round_trip():
    doc = {"hbar": 0.5, "terms": [{"c": [1, 0], "Z0": [[0.1, -0.2]], "alpha": 2.0}]}
    h = load_symbol(doc)
    assert h.particles == 1 and h.hbar == 0.5
    assert symbol_to_json(h) == {"hbar": 0.5, "terms": [{"c": [1.0, 0.0], "Z0": [[0.1, -0.2]],
                                                         "alpha": 2.0}]}


@pytest.mark.parametrize("mutate, where", [
    (lambda d: d.pop("hbar"), "hbar"),
    (lambda d: d.__setitem__("terms", []), "state.terms"),
    (lambda d: d["terms"][0].__setitem__("c", [1]), "state.terms[0].c"),
    (lambda d: d["terms"][1]["ket"].__setitem__("Z", [[0, 0]]), "state.terms[1]"),
    (lambda d: d["grid"].__setitem__("n", 60), "state.grid"),
    (lambda d: d["terms"][0]["bra"].__setitem__("Z", [[0, "x"], [0, 0]]), "state.terms[0].bra.Z[0][1]"),
])
def test_schema_errors(mutate, where):
    doc = json.loads(json.dumps(DOC))
    mutate(doc)
    with pytest.raises(SchemaError, match=where.replace("[", r"\[").replace("]", r"\]")):
        load_state(doc)


def test_bad_json_reports_line(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"hbar": 1,\n "grid": }')
    with pytest.raises(SchemaError, match="line 2"):
        load_state(p)


def test_csv_layout(tmp_path):
    p = tmp_path / "f.csv"
    q = np.array([0.0, 0.5])
    vals = np.array([[1.0, 2.0], [3.0, 0.1 + 0.2]])
    write_csv(p, ["q1", "p1"], [q, q], vals)
    lines = p.read_text().splitlines()
    assert lines[0] == "q1,p1,w"
    assert lines[1] == "0.0,0.0,1.0"
    assert lines[4] == "0.5,0.5," + repr(0.1 + 0.2)


def test_csv_imaginary_column(tmp_path):
    p = tmp_path / "f.csv"
    write_csv(p, ["q", "p"], [np.arange(2.0), np.arange(2.0)], np.array([[1, 1j], [0, 0]]))
    assert p.read_text().splitlines()[0] == "q,p,w,w_im"


def test_write_json_rejects_nan(tmp_path):
    with pytest.raises(ValueError):
        write_json({"x": float("nan")}, tmp_path / "x.json")
