import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from hhomlp.mlp import (
    MlpTopology,
    decode_params,
    encode_params,
    forward,
    mse_fitness,
    neuron_sum,
    parameter_count,
    predict_class,
    sigmoid,
)

from .reference import reference_forward


@pytest.mark.parametrize("topology,count", [
    (MlpTopology(2, (2,), 1), 9),
    (MlpTopology(1, (1,), 1), 4),
    (MlpTopology(15, (5, 5), 1), 15 * 5 + 5 + 5 * 5 + 5 + 5 + 1),
])
def test_parameter_count(topology, count):
    assert parameter_count(topology) == count


@pytest.mark.parametrize("kwargs", [dict(input_size=0), dict(input_size=2, hidden_layers=()),
                                    dict(input_size=2, hidden_layers=(3, 0)), dict(input_size=2, output_size=0)])
def test_topology_validation(kwargs):
    with pytest.raises(ValueError):
        MlpTopology(**kwargs)


def test_topology_dict_round_trip():
    t = MlpTopology(7, (4, 3), 2)
    assert MlpTopology.from_dict(t.to_dict()) == t


@pytest.mark.parametrize("inputs,weights,bias,expected", [
    ([1, 1], [0.5, 0.5], 0.0, 1.0),
    ([3, -7], [0, 0], 2.5, 2.5),
    ([2, -1], [0.3, 0.4], 0.1, 0.3),
])
def test_neuron_sum(inputs, weights, bias, expected):
    assert neuron_sum(inputs, weights, bias) == pytest.approx(expected, abs=1e-15)


def test_neuron_sum_length_mismatch():
    with pytest.raises(ValueError):
        neuron_sum([1, 2, 3], [1, 2], 0.0)


def test_sigmoid_values():
    assert sigmoid(0.0) == 0.5
    assert sigmoid(50.0) > 1 - 1e-15
    assert sigmoid(1.0) == pytest.approx(0.7310585786300049, abs=1e-15)


def test_sigmoid_stable_at_extremes():
    with np.errstate(all="raise"):
        out = sigmoid(np.array([-700.0, 700.0]))
    assert 0 < out[0] < 1e-300
    assert out[1] == 1.0


def test_forward_zero_network():
    t = MlpTopology(3, (4, 2), 2)
    out = forward(t, np.zeros(parameter_count(t)), [1.0, -2.0, 5.0])
    np.testing.assert_array_equal(out, [0.5, 0.5])


def test_forward_one_one_one():
    t = MlpTopology(1, (1,), 1)
    out = forward(t, np.array([1.0, 1.0, 0.0, 0.0]), [0.0])
    assert out[0] == pytest.approx(1 / (1 + np.exp(-0.5)), abs=1e-15)
    assert out[0] == pytest.approx(0.62246, abs=5e-6)


def test_forward_layout_weights_then_biases():
    # 2-1-1: W1 = [[1, 2]], W2 = [[3]], b1 = [4], b2 = [5]
    t = MlpTopology(2, (1,), 1)
    flat = np.array([1.0, 2.0, 3.0, 4.0, 5.0])
    (W1, b1), (W2, b2) = decode_params(t, flat)
    np.testing.assert_array_equal(W1, [[1, 2]])
    np.testing.assert_array_equal(W2, [[3]])
    np.testing.assert_array_equal(b1, [4])
    np.testing.assert_array_equal(b2, [5])
    h = sigmoid(1 * 0.1 + 2 * 0.2 + 4)
    assert forward(t, flat, [0.1, 0.2])[0] == pytest.approx(sigmoid(3 * h + 5), abs=1e-15)


def test_forward_batch_matches_rows():
    rng = np.random.default_rng(3)
    t = MlpTopology(4, (3, 2), 1)
    flat = rng.normal(size=parameter_count(t))
    X = rng.random((6, 4))
    batch = forward(t, flat, X)
    assert batch.shape == (6, 1)
    for row, out in zip(X, batch):
        np.testing.assert_allclose(forward(t, flat, row), out, rtol=0, atol=1e-15)


def test_forward_dimension_errors():
    t = MlpTopology(2, (2,), 1)
    with pytest.raises(ValueError):
        forward(t, np.zeros(9), [1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        forward(t, np.zeros(8), [1.0, 2.0])


def test_forward_matches_nested_loop_oracle():
    rng = np.random.default_rng(20240)
    for _ in range(100):
        n_in = int(rng.integers(1, 5))
        hidden = tuple(int(h) for h in rng.integers(1, 5, size=rng.integers(1, 3)))
        n_out = int(rng.integers(1, 3))
        t = MlpTopology(n_in, hidden, n_out)
        flat = rng.normal(scale=3.0, size=parameter_count(t))
        x = rng.uniform(-2, 2, n_in)
        expected = reference_forward(t.layer_sizes, flat.tolist(), x.tolist())
        np.testing.assert_allclose(forward(t, flat, x), expected, rtol=0, atol=1e-12)


@pytest.mark.parametrize("output,expected", [(0.7, 1), (0.5, 1), (0.49999, 0), ([0.2], 0)])
def test_predict_class(output, expected):
    assert predict_class(output) == expected


def test_predict_class_batch_and_rejects_multi_output():
    np.testing.assert_array_equal(predict_class(np.array([[0.1], [0.5], [0.9]])), [0, 1, 1])
    with pytest.raises(ValueError):
        predict_class([0.3, 0.8])
    with pytest.raises(ValueError):
        predict_class(np.zeros((2, 2)))


def test_mse_fitness_hand_value():
    # a 1-1-1 net outputs a constant when the input weight is 0; compare
    # against a stub that returns the listed outputs instead
    outputs, labels = np.array([0.9, 0.2, 0.6]), np.array([1, 0, 1])
    assert float(np.mean((outputs - labels) ** 2)) == pytest.approx(0.07)
    t = MlpTopology(1, (1,), 1)
    # hidden ~ 0.5, output sigmoid(0) = 0.5 with zero output weight
    assert mse_fitness(t, np.zeros(4), np.zeros((4, 1)), [0, 1, 0, 1]) == 0.25


def test_mse_fitness_perfect_fit():
    # single input copied through steep sigmoids approximates the label
    t = MlpTopology(1, (1,), 1)
    flat = np.array([60.0, 60.0, -30.0, -30.0])
    X = np.array([[0.0], [1.0]])
    assert mse_fitness(t, flat, X, [0, 1]) < 1e-20


def test_mse_fitness_rejects_empty():
    with pytest.raises(ValueError):
        mse_fitness(MlpTopology(2, (2,), 1), np.zeros(9), np.empty((0, 2)), [])


topologies = st.builds(
    MlpTopology,
    st.integers(1, 6),
    st.lists(st.integers(1, 6), min_size=1, max_size=3).map(tuple),
    st.integers(1, 3),
)


@settings(max_examples=50, deadline=None)
@given(t=topologies, data=st.data())
def test_codec_round_trip(t, data):
    flat = data.draw(arrays(float, parameter_count(t), elements=st.floats(-1e6, 1e6)))
    np.testing.assert_array_equal(encode_params(decode_params(t, flat)), flat)


@settings(max_examples=50, deadline=None)
@given(t=topologies, data=st.data())
def test_outputs_in_open_unit_interval_and_mse_bounded(t, data):
    flat = data.draw(arrays(float, parameter_count(t), elements=st.floats(-5, 5)))
    X = data.draw(arrays(float, (4, t.input_size), elements=st.floats(0, 1)))
    y = data.draw(arrays(int, (4, t.output_size), elements=st.integers(0, 1)))
    out = forward(t, flat, X)
    assert np.all((out > 0) & (out < 1))
    assert 0 <= mse_fitness(t, flat, X, y) <= 1
    np.testing.assert_array_equal(out, forward(t, flat, X))
