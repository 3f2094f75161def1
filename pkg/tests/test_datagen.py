import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ldpids.datagen import GeneratorSpec, gen_binary_streams, gen_probability_sequence, generate, load_stream_csv
from ldpids.errors import EmptyFile, InvalidParams, MalformedRow, UnknownLabel


def test_log_curve():
    p = gen_probability_sequence(GeneratorSpec("Log", 5000, 10))
    assert p[-1] == pytest.approx(0.25, abs=1e-6)
    # t=0 is not in the sequence; extrapolate the closed form
    assert 0.25 / (1 + math.exp(0)) == 0.125
    assert p[0] == pytest.approx(0.25 / (1 + math.exp(-0.01)))


def test_sin_period():
    p = gen_probability_sequence(GeneratorSpec("sin", 2000, 10))
    period = 2 * math.pi / 0.01
    t = 100
    assert p[t - 1] == pytest.approx(0.05 * math.sin(0.01 * t) + 0.075)
    assert p[t - 1 + 628] == pytest.approx(p[t - 1], abs=0.05 * 0.01 * abs(period - 628) + 1e-9)


def test_lns_zero_noise_and_clamp():
    p = gen_probability_sequence(GeneratorSpec("LNS", 50, 10, {"sqrt_q": 0.0}))
    assert np.all(p == 0.05)
    wild = gen_probability_sequence(GeneratorSpec("LNS", 2000, 10, {"sqrt_q": 0.3}, seed=2))
    assert wild.min() >= 0 and wild.max() <= 1


def test_spec_validation():
    with pytest.raises(InvalidParams):
        GeneratorSpec("Wave", 10, 10)
    with pytest.raises(InvalidParams):
        GeneratorSpec("Log", 10, 10, {"h": 1.0})
    with pytest.raises(InvalidParams):
        gen_binary_streams([0.5, 1.2], 10)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=1, max_size=20), st.integers(1, 300), st.integers(0, 1000))
def test_binary_column_counts(p, N, seed):
    s = gen_binary_streams(p, N, seed)
    k = np.round(np.asarray(p) * N).astype(int)
    assert np.array_equal(s.values.sum(axis=1), k)
    h = s.true_histograms()
    assert np.allclose(h[:, 1], k / N) and np.allclose(h[:, 0], 1 - k / N)


def test_binary_extremes_and_rerandomized():
    s = gen_binary_streams([0.0, 1.0, 0.5, 0.5], 1000, 3)
    assert s.values[0].sum() == 0 and s.values[1].sum() == 1000
    assert not np.array_equal(s.values[2], s.values[3])


def test_generate_deterministic():
    spec = GeneratorSpec("LNS", 30, 200, seed=11)
    assert np.array_equal(generate(spec).values, generate(spec).values)
    assert not np.array_equal(generate(spec).values, generate(GeneratorSpec("LNS", 30, 200, seed=12)).values)


def _write(tmp_path, text, name="s.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def test_csv_small_fixture_and_forward_fill(tmp_path):
    path = _write(tmp_path, "user_id,timestamp,value\nb,1,x\na,1,y\na,2,x\nb,3,y\na,3,y\n")
    s = load_stream_csv(path, ["x", "y"])
    assert s.user_ids == ("a", "b")
    assert s.values.T.tolist() == [[1, 0, 1], [0, 0, 1]]


def test_csv_order_independent(tmp_path):
    rows = ["u1,1,0", "u2,1,1", "u1,2,1", "u2,2,1", "u3,1,0", "u3,3,1"]
    a = load_stream_csv(_write(tmp_path, "user_id,timestamp,value\n" + "\n".join(rows), "a.csv"), 2)
    b = load_stream_csv(_write(tmp_path, "user_id,timestamp,value\n" + "\n".join(rows[::-1]), "b.csv"), 2)
    assert np.array_equal(a.values, b.values) and a.user_ids == b.user_ids


def test_csv_drops_late_users(tmp_path):
    s = load_stream_csv(_write(tmp_path, "user_id,timestamp,value\na,1,0\nb,2,1\n"), 2)
    assert s.user_ids == ("a",) and s.T == 2


@pytest.mark.parametrize("text,exc", [
    ("", EmptyFile),
    ("user_id,timestamp,value\n", EmptyFile),
    ("id,t,v\na,1,0\n", MalformedRow),
    ("user_id,timestamp,value\na,1\n", MalformedRow),
    ("user_id,timestamp,value\na,x,0\n", MalformedRow),
    ("user_id,timestamp,value\na,1,0\na,1,1\n", MalformedRow),
    ("user_id,timestamp,value\na,1,7\n", UnknownLabel),
])
def test_csv_errors(tmp_path, text, exc):
    with pytest.raises(exc):
        load_stream_csv(_write(tmp_path, text), 2)
