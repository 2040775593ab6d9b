import numpy as np
import pytest

from arffbias.data import Dataset
from arffbias.network import FourierFeatureNetwork, mse
from arffbias.sgd import (SGDTrainer, sgd_train, batch_loss, batch_gradients, DivergenceError,
                          validate_sgd_settings)


def _loss_of(params, shapes, inputs, targets, lam):
    K, d = shapes
    net = FourierFeatureNetwork(params[:K * d].reshape(K, d), params[K * d:K * d + K],
                                params[K * d + K:])
    return batch_loss(net, inputs, targets, lam)


def test_gradients_match_finite_differences():
    rng = np.random.default_rng(0)
    h = 1e-5
    for _ in range(100):
        K = int(rng.integers(1, 9))
        d = int(rng.integers(1, 4))
        B = int(rng.integers(1, 17))
        lam = float(rng.choice([0.0, 0.05]))
        net = FourierFeatureNetwork(rng.standard_normal((K, d)), rng.standard_normal(K),
                                    rng.uniform(0, 2 * np.pi, K))
        X = rng.standard_normal((B, d))
        y = rng.standard_normal(B)
        gW, ga, gb = batch_gradients(net, X, y, lam)
        analytic = np.concatenate((gW.reshape(-1), ga, gb))
        params = np.concatenate((net.frequencies.reshape(-1), net.amplitudes, net.biases))
        numeric = np.zeros_like(params)
        for i in range(params.size):
            step = np.zeros_like(params)
            step[i] = h
            numeric[i] = (_loss_of(params + step, (K, d), X, y, lam) -
                          _loss_of(params - step, (K, d), X, y, lam)) / (2 * h)
        err = np.linalg.norm(analytic - numeric)
        assert err <= 1e-5 * max(np.linalg.norm(numeric), 1e-3)


def test_gradient_shapes(rng):
    net = FourierFeatureNetwork(rng.standard_normal((4, 3)), np.ones(4), np.zeros(4))
    gW, ga, gb = batch_gradients(net, rng.standard_normal((5, 3)), np.zeros(5), 0.0)
    assert gW.shape == (4, 3)
    assert ga.shape == (4,)
    assert gb.shape == (4,)
    with pytest.raises(ValueError):
        batch_gradients(net, np.zeros((0, 3)), np.zeros(0), 0.0)


def test_sgd_reduces_loss(regression_data):
    train, validation, _ = regression_data
    trainer = SGDTrainer(train, validation, 16, {"epochs": 30, "learning_rate": 0.02,
                                                 "batch_size": 16, "seed": 1})
    initial = trainer.initial_loss
    _, trace = trainer.run()
    assert trace.train_loss[-1] < initial
    assert all(np.isnan(trace.acceptance_rate))


def test_sgd_is_deterministic(regression_data):
    train, validation, _ = regression_data
    settings = {"epochs": 3, "learning_rate": 0.01, "seed": 4}
    net1, trace1 = sgd_train(train, validation, 8, settings)
    net2, trace2 = sgd_train(train, validation, 8, settings)
    assert np.array_equal(net1.frequencies, net2.frequencies)
    assert np.array_equal(net1.biases, net2.biases)
    assert trace1 == trace2


def test_last_batch_may_be_short(regression_data):
    train, validation, _ = regression_data
    assert len(train) % 32 != 0
    _, trace = sgd_train(train, validation, 4, {"epochs": 1, "batch_size": 32})
    assert len(trace) == 1


def test_huge_learning_rate_diverges(regression_data):
    train, validation, _ = regression_data
    with pytest.raises(DivergenceError):
        sgd_train(train, validation, 16, {"epochs": 20, "learning_rate": 1e4, "batch_size": 4})


def test_batch_larger_than_training_set(regression_data):
    train, validation, _ = regression_data
    with pytest.raises(ValueError):
        SGDTrainer(train, validation, 4, {"batch_size": len(train) + 1})


def test_settings_validation_lists_every_field():
    with pytest.raises(ValueError) as err:
        validate_sgd_settings({"batch_size": 0, "learning_rate": 0.0})
    assert "batch_size" in str(err.value)
    assert "learning_rate" in str(err.value)


def test_vanishing_learning_rate_leaves_parameters(regression_data):
    train = regression_data[0]
    trainer = SGDTrainer(train, None, 8, {"epochs": 1, "learning_rate": 1e-30, "seed": 2})
    before = trainer.network.copy()
    net, _ = trainer.run()
    assert np.allclose(net.frequencies, before.frequencies, rtol=0, atol=1e-12)
    assert np.allclose(net.amplitudes, before.amplitudes, rtol=0, atol=1e-12)
    assert np.allclose(net.biases, before.biases, rtol=0, atol=1e-12)


def test_small_step_does_not_increase_batch_loss(regression_data):
    train = regression_data[0]
    rng = np.random.default_rng(3)
    lr = 1e-6
    for _ in range(50):
        net = FourierFeatureNetwork(rng.standard_normal((16, 1)), rng.standard_normal(16),
                                    rng.uniform(0, 2 * np.pi, 16))
        ib = rng.choice(len(train), size=32, replace=False)
        X, y = train.inputs[ib], train.target(0)[ib]
        gW, ga, gb = batch_gradients(net, X, y, 0.0)
        stepped = FourierFeatureNetwork(net.frequencies - lr * gW, net.amplitudes - lr * ga,
                                        net.biases - lr * gb)
        assert batch_loss(stepped, X, y, 0.0) <= batch_loss(net, X, y, 0.0)


def test_sgd_beats_constant_predictor_on_identity():
    x = np.random.default_rng(4).standard_normal((200, 1))
    data = Dataset(x, x[:, 0])
    net, _ = sgd_train(data, None, 8, {"epochs": 500, "learning_rate": 0.01, "seed": 5})
    assert mse(net, x, x[:, 0]) < np.var(x[:, 0])
