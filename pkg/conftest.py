import os
import struct
from pathlib import Path
import numpy as np
import pytest

from arffbias.data import Dataset, generate_synthetic, normalize, split, MNIST_FILES


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: desk-scale reproductions (minutes)")


def write_idx(path, magic, array):
    """ IDX file with a big-endian header and uint8 data """
    array = np.asarray(array, dtype=np.uint8)
    with open(path, "wb") as f:
        f.write(struct.pack(">I", magic))
        f.write(struct.pack(f">{array.ndim}I", *array.shape))
        f.write(array.tobytes())
    return str(path)


@pytest.fixture()
def rng():
    return np.random.default_rng(0)


@pytest.fixture()
def regression_data():
    """ small normalized Si-target train / validation / test sets """
    dataset = generate_synthetic(200, a=0.1, seed=1)
    train, validation, test = split(dataset, (7, 2, 1), seed=2)
    (train, validation, test), stats = normalize(train, validation, test)
    return train, validation, test


@pytest.fixture()
def digit_data():
    """ separable 10-class toy problem: class c lights up coordinate c """
    rng = np.random.default_rng(3)
    labels = np.repeat(np.arange(10), 12)
    inputs = 0.05 * rng.standard_normal((labels.size, 12))
    inputs[np.arange(labels.size), labels] += 1.0
    targets = np.zeros((labels.size, 10))
    targets[np.arange(labels.size), labels] = 1.0
    return Dataset(inputs, targets, labels)


@pytest.fixture()
def idx_dir(tmp_path):
    """ a directory with tiny IDX files named like the official MNIST files """
    rng = np.random.default_rng(4)
    sizes = {"train": 30, "test": 10}
    for part, n in sizes.items():
        images = rng.integers(0, 256, size=(n, 4, 4))
        labels = np.arange(n) % 10
        write_idx(tmp_path / MNIST_FILES[f"{part}_images"], 0x803, images)
        write_idx(tmp_path / MNIST_FILES[f"{part}_labels"], 0x801, labels)
    return tmp_path


@pytest.fixture()
def mnist_dir():
    directory = os.environ.get("ARFFBIAS_MNIST_DIR", "")
    if not directory or not Path(directory).is_dir():
        pytest.skip("set ARFFBIAS_MNIST_DIR to the official MNIST IDX files")
    return directory
