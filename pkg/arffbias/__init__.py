"""
arffbias: adaptive random Fourier features (Metropolis) vs SGD for two-layer cosine
networks, with a spectral-bias estimator and MNIST noise attacks
"""
from arffbias.network import FourierFeatureNetwork, forward, predict, design_matrix, mse
from arffbias.solver import solve_amplitudes, fit_amplitudes, SingularSystemError
from arffbias.arff import ARFFTrainer, arff_train, arff_settings
from arffbias.sgd import SGDTrainer, sgd_train, sgd_settings, batch_gradients, DivergenceError
from arffbias.spectral import (spectral_bias, weighted_spectrum, frequency_grid, cutoff_frequency,
                               sine_integral, target_function, UndefinedCutoffError)
from arffbias.data import (Dataset, generate_synthetic, normalize, split, load_mnist,
                           load_mnist_idx, noise_attack, AttackSpec, IdxFormatError)
from arffbias.classify import OneVsRestEnsemble, accuracy, train_ensemble
from arffbias.io import save_network, load_network, emit_plot_data
