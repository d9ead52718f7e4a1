import numpy as np

from phasestat import corpus
from phasestat.core import GridSpec
from phasestat.states import apply_exchange, trace


def test_corpus_shape():
    g = GridSpec(64, 8.0, 1.0, 2)
    states = corpus.states(g)
    assert [s.name for s in states] == ["coherent_product", "coherent_diagonal", "mixture_rank3",
                                        "bosonic_pair", "fermionic_pair"]
    for s in states:
        assert abs(trace(s.rho) - 1) < 1e-7
    assert len(corpus.symbols()) == 3 and len(corpus.relative_symbols()) == 3


def test_corpus_statistics_labels():
    g = GridSpec(64, 8.0, 1.0, 2)
    X = np.array([[0.3, -0.2], [1.0, 0.4]])
    Y = np.array([[-0.5, 0.1], [0.2, 0.9]])
    for s in corpus.states(g):
        if s.statistics == "none":
            continue
        sign = 1 if s.statistics == "bosonic" else -1
        K = s.rho.kernel(X, Y)
        assert np.allclose(apply_exchange(s.rho, "V").kernel(X, Y), sign * K, atol=1e-14)


def test_symbols_have_unit_trace():
    for hb in (1.0, 0.5):
        for h in corpus.symbols(hb).values():
            assert abs(h.trace_value() - 1) < 1e-14


def test_describe_is_plain_data():
    import json
    d = corpus.describe(GridSpec())
    json.dumps(d)
    assert d["version"] == corpus.CORPUS_VERSION
