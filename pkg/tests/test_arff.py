import numpy as np
import pytest

from arffbias import arff
from arffbias.arff import (ARFFTrainer, arff_train, arff_settings, validate_arff_settings,
                           acceptance_probability, acceptance_mask, metropolis_step)
from arffbias.data import Dataset
from arffbias.network import init_network, design_matrix, mse
from arffbias.solver import fit_amplitudes, training_loss


def test_acceptance_half_for_ratio_half():
    rng = np.random.default_rng(0)
    n = 100000
    accept = acceptance_mask(np.ones(n), 2 * np.ones(n), 1.0, rng)
    assert abs(accept.mean() - 0.5) < 0.01


def test_exponent_zero_accepts_everything():
    rng = np.random.default_rng(1)
    new = rng.random(100000)
    old = 1 + rng.random(100000)
    assert acceptance_mask(new, old, 0.0, rng).mean() == 1.0


def test_zero_old_amplitude_always_accepts():
    prob = acceptance_probability([0.0, 1e-300, 3.0], [0.0, 0.0, 0.0], 5.0)
    assert np.all(prob == 1.0)


def test_larger_amplitude_always_accepted():
    prob = acceptance_probability([2.0, -3.0], [1.0, 1.5], 1.0)
    assert np.all(prob == 1.0)


def test_large_exponent_does_not_overflow():
    with np.errstate(over="raise", invalid="raise"):
        prob = acceptance_probability([2.0, 0.5, 1.0], [1.0, 1.0, 1.0], 3 * 784 - 2)
    assert prob[0] == 1.0
    assert 0.0 <= prob[1] < 1e-300
    assert prob[2] == 1.0


def test_settings_validation_lists_every_field():
    with pytest.raises(ValueError) as err:
        validate_arff_settings({"epochs": 0, "proposal_width": -1.0, "lam": -0.5})
    msg = str(err.value)
    for field in ("epochs", "proposal_width", "lam"):
        assert field in msg
    with pytest.raises(ValueError):
        validate_arff_settings({"bogus": 1})
    assert validate_arff_settings({})["exponent"] is None


def test_metropolis_step_exponent_zero_moves_every_node(rng, regression_data):
    train = regression_data[0]
    net = init_network(6, 1, rng)
    net = net.with_amplitudes(fit_amplitudes(design_matrix(net, train.inputs),
                                             train.target(0), 0.05))
    settings = {**arff_settings(), "exponent": 0.0}
    new, rate = metropolis_step(net, train.inputs, train.target(0), settings, rng)
    assert rate == 1.0
    assert np.all(new.frequencies != net.frequencies)
    # amplitudes are the least-squares solution for the new nodes
    expected = fit_amplitudes(design_matrix(new, train.inputs), train.target(0), 0.05)
    assert np.allclose(new.amplitudes, expected)


def test_rejected_nodes_keep_frequency_and_bias(rng, regression_data):
    train = regression_data[0]
    net = init_network(16, 1, rng)
    net = net.with_amplitudes(fit_amplitudes(design_matrix(net, train.inputs),
                                             train.target(0), 0.05))
    settings = {**arff_settings(), "exponent": 50.0}
    new, rate = metropolis_step(net, train.inputs, train.target(0), settings, rng)
    kept = np.all(new.frequencies == net.frequencies, axis=1)
    assert np.array_equal(new.biases[kept], net.biases[kept])
    assert rate == pytest.approx(1 - kept.mean())


def test_training_is_deterministic(regression_data):
    train, validation, _ = regression_data
    settings = {"epochs": 5, "seed": 7}
    net1, trace1 = arff_train(train, validation, 8, settings)
    net2, trace2 = arff_train(train, validation, 8, settings)
    assert np.array_equal(net1.frequencies, net2.frequencies)
    assert np.array_equal(net1.amplitudes, net2.amplitudes)
    assert trace1 == trace2
    net3, _ = arff_train(train, validation, 8, {"epochs": 5, "seed": 8})
    assert not np.array_equal(net1.frequencies, net3.frequencies)


def test_trace_records_every_epoch(regression_data):
    train, validation, _ = regression_data
    epochs = []
    _, trace = arff_train(train, validation, 8, {"epochs": 4},
                          callback=lambda epoch, net, trace: epochs.append(epoch))
    assert epochs == [1, 2, 3, 4]
    assert len(trace) == 4
    assert all(0 <= r <= 1 for r in trace.acceptance_rate)
    assert all(np.isfinite(trace.val_loss))


def test_arff_learns_a_single_frequency():
    rng = np.random.default_rng(2)
    x = rng.standard_normal((300, 1))
    data = Dataset(x, np.cos(3 * x[:, 0]))
    trainer = ARFFTrainer(data, None, 8, {"epochs": 60, "proposal_width": 0.5, "lam": 1e-3,
                                          "seed": 3})
    initial = training_loss(trainer.problem(trainer.network), trainer.network.amplitudes)
    net, trace = trainer.run()
    assert trace.train_loss[-1] < 0.5 * initial
    assert np.isnan(trace.val_loss[-1])


def test_invalid_trainer_arguments(regression_data):
    train, validation, _ = regression_data
    with pytest.raises(ValueError):
        ARFFTrainer(train, validation, 0)
    with pytest.raises(ValueError):
        ARFFTrainer(train.subset(np.arange(0)), validation, 4)


def test_arff_fits_cos5x():
    rng = np.random.default_rng(5)
    x = rng.standard_normal((500, 1))
    data = Dataset(x, np.cos(5 * x[:, 0]))
    net, _ = arff_train(data, None, 64, {"epochs": 200, "proposal_width": 0.5,
                                         "exponent": 1.0, "lam": 1e-3, "seed": 0})
    assert mse(net, x, data.target(0)) < 1e-2


def test_late_losses_do_not_exceed_first_epoch(regression_data):
    train, validation, _ = regression_data
    _, trace = arff_train(train, validation, 16, {"epochs": 50, "seed": 1})
    losses = np.asarray(trace.train_loss)
    assert np.all(np.isfinite(losses))
    assert losses[-5:].mean() <= losses[0]


def test_zero_width_proposals_keep_frequencies(regression_data):
    train = regression_data[0]
    trainer = ARFFTrainer(train, None, 12, {"epochs": 1, "proposal_width": 1e-12, "seed": 4})
    initial = trainer.network.copy()
    net, _ = trainer.run()
    assert np.allclose(net.frequencies, initial.frequencies, rtol=0, atol=1e-9)
    # accepted nodes carry fresh phases, amplitudes are re-solved for the returned nodes
    expected = fit_amplitudes(design_matrix(net, train.inputs), train.target(0), 0.05)
    assert np.allclose(net.amplitudes, expected, rtol=1e-10, atol=1e-12)


def test_one_epoch_builds_two_design_matrices(regression_data, monkeypatch):
    train = regression_data[0]
    trainer = ARFFTrainer(train, None, 8, {"epochs": 3, "seed": 2})
    calls = []

    def counting(net, inputs):
        calls.append(inputs.shape[0])
        return design_matrix(net, inputs)
    monkeypatch.setattr(arff, "design_matrix", counting)
    trainer.step()
    assert calls == [len(train), len(train)]
    recomputed = training_loss(trainer.problem(trainer.network), trainer.network.amplitudes)
    assert trainer.trace.train_loss[-1] == pytest.approx(recomputed, rel=1e-12)
