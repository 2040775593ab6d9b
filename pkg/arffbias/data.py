"""
datasets: the synthetic Si-target regression data, MNIST IDX files,
normalization, 7:2:1 splitting and the additive noise attack
"""
import os
import gzip
import struct
import warnings
import numpy as np

from .io import write_csv
from .spectral import target_function
from .utils import default_rng, split_indices

IDX_IMAGE_MAGIC = 0x00000803
IDX_LABEL_MAGIC = 0x00000801
STD_FLOOR = 1e-8
N_CLASSES = 10

MNIST_FILES = {
    "train_images": "train-images-idx3-ubyte",
    "train_labels": "train-labels-idx1-ubyte",
    "test_images": "t10k-images-idx3-ubyte",
    "test_labels": "t10k-labels-idx1-ubyte",
}


class IdxFormatError(ValueError):
    """ file does not follow the IDX layout """


class BadMagicError(IdxFormatError):
    pass


class TruncatedIdxError(IdxFormatError):
    pass


class CountMismatchError(IdxFormatError):
    pass


class NormalizationStats:
    """ mean / std of the training inputs (and regression targets), std floored at 1e-8 """

    def __init__(self, mean, std, target_mean=None, target_std=None):
        self.mean = np.asarray(mean, dtype=np.float64)
        self.std = np.maximum(np.asarray(std, dtype=np.float64), STD_FLOOR)
        self.target_mean = target_mean
        self.target_std = target_std
        if target_std is not None:
            self.target_std = np.maximum(np.asarray(target_std, dtype=np.float64), STD_FLOOR)

    def apply(self, dataset):
        inputs = (dataset.inputs - self.mean) / self.std
        targets = dataset.targets
        if self.target_mean is not None:
            targets = (targets - self.target_mean) / self.target_std
        return Dataset(inputs, targets, dataset.labels, normalized=True, stats=self)


class Dataset:
    """inputs with scalar or one-hot targets

    Parameters
    -----------
    inputs : array, shape (N, d)
    targets : array, shape (N, C) or (N,)
        C=1 for regression, C=10 one-hot for classification
    labels : array, shape (N,) (optional)
        integer class labels in [0, 9]
    normalized : bool (optional, default False)
        True once normalization statistics have been applied
    stats : NormalizationStats (optional)
        statistics that were applied
    """

    def __init__(self, inputs, targets, labels=None, normalized=False, stats=None):
        inputs = np.asarray(inputs, dtype=np.float64)
        if inputs.ndim == 1:
            inputs = inputs[:, np.newaxis]
        targets = np.asarray(targets, dtype=np.float64)
        if targets.ndim == 1:
            targets = targets[:, np.newaxis]
        if inputs.ndim != 2 or targets.ndim != 2 or inputs.shape[0] != targets.shape[0]:
            raise ValueError(f"inputs {inputs.shape} and targets {targets.shape} "
                             "must be matrices with the same number of rows")
        if labels is not None:
            labels = np.asarray(labels).astype(np.int64).reshape(-1)
            if labels.shape[0] != inputs.shape[0]:
                raise ValueError("labels must have one entry per sample")
            if labels.size and (labels.min() < 0 or labels.max() >= N_CLASSES):
                raise ValueError("labels must lie in [0, 9]")
        self.inputs = inputs
        self.targets = targets
        self.labels = labels
        self.normalized = normalized
        self.stats = stats

    def __len__(self):
        return self.inputs.shape[0]

    @property
    def n_dims(self):
        return self.inputs.shape[1]

    @property
    def n_outputs(self):
        return self.targets.shape[1]

    def target(self, column=0):
        """ target column as an (N,) vector """
        return self.targets[:, column]

    def subset(self, inds):
        labels = self.labels[inds] if self.labels is not None else None
        return Dataset(self.inputs[inds], self.targets[inds], labels,
                       normalized=self.normalized, stats=self.stats)

    def __repr__(self):
        return f"Dataset(N={len(self)}, d={self.n_dims}, C={self.n_outputs})"


def one_hot(labels, n_classes=N_CLASSES):
    labels = np.asarray(labels, dtype=np.int64)
    targets = np.zeros((labels.shape[0], n_classes))
    targets[np.arange(labels.shape[0]), labels] = 1.0
    return targets


def generate_synthetic(n, a=1e-2, seed=0):
    """ n inputs x ~ N(0, 1) with targets f(x) = exp(-x^2/2) Si(x/a) """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    x = default_rng(seed).standard_normal((n, 1))
    return Dataset(x, target_function(x[:, 0], a))


def normalize(train, *others, standardize_targets=None):
    """ standardize with the statistics of train only

    inputs are always standardized; targets only for regression data (no labels)
    unless standardize_targets says otherwise. zero-variance features get
    std 1e-8 (with a warning), so their normalized column is all zeros

    Returns
    -------
    datasets : list of Dataset
        train first, then others, all normalized
    stats : NormalizationStats
    """
    for ds in (train,) + others:
        if ds.normalized:
            raise ValueError("dataset is already normalized, refusing to normalize twice")
    if len(train) < 1:
        raise ValueError("training set is empty")
    if standardize_targets is None:
        standardize_targets = train.labels is None
    mean = train.inputs.mean(axis=0)
    std = train.inputs.std(axis=0)
    if np.any(std < STD_FLOOR):
        warnings.warn(f"{(std < STD_FLOOR).sum()} input features have zero variance, "
                      f"std floored at {STD_FLOOR}")
    target_mean, target_std = None, None
    if standardize_targets:
        target_mean = train.targets.mean(axis=0)
        target_std = train.targets.std(axis=0)
    stats = NormalizationStats(mean, std, target_mean, target_std)
    return [stats.apply(ds) for ds in (train,) + others], stats


def split(dataset, ratios=(7, 2, 1), seed=0):
    """ seeded shuffle then contiguous split into (train, validation, test) """
    if len(dataset) < 10:
        raise ValueError(f"need at least 10 samples to split, got {len(dataset)}")
    return tuple(dataset.subset(inds) for inds in split_indices(len(dataset), ratios, seed))


def _open(path):
    return gzip.open(path, "rb") if str(path).endswith(".gz") else open(path, "rb")


def _read_idx(path, magic, n_dims):
    with _open(path) as f:
        raw = f.read()
    header_len = 4 * (1 + n_dims)
    if len(raw) < header_len:
        raise TruncatedIdxError(f"{path}: header truncated ({len(raw)} bytes)")
    found = struct.unpack(">I", raw[:4])[0]
    if found != magic:
        raise BadMagicError(f"{path}: magic number 0x{found:08x}, expected 0x{magic:08x}")
    dims = struct.unpack(f">{n_dims}I", raw[4:header_len])
    size = int(np.prod(dims))
    if len(raw) - header_len < size:
        raise TruncatedIdxError(f"{path}: expected {size} data bytes, "
                                f"found {len(raw) - header_len}")
    data = np.frombuffer(raw, dtype=np.uint8, count=size, offset=header_len)
    return data.reshape(dims)


def load_mnist_idx(images_path, labels_path):
    """ one IDX image file + label file as a Dataset

    images are flattened row-major to d = rows * cols and scaled to [0, 1];
    targets are one-hot vectors of the labels
    """
    images = _read_idx(images_path, IDX_IMAGE_MAGIC, 3)
    labels = _read_idx(labels_path, IDX_LABEL_MAGIC, 1)
    if images.shape[0] != labels.shape[0]:
        raise CountMismatchError(f"{images.shape[0]} images in {images_path} but "
                                 f"{labels.shape[0]} labels in {labels_path}")
    if labels.size and labels.max() >= N_CLASSES:
        raise IdxFormatError(f"{labels_path}: label {labels.max()} outside [0, 9]")
    inputs = images.reshape(images.shape[0], -1).astype(np.float64) / 255.0
    return Dataset(inputs, one_hot(labels), labels)


def _find(directory, name):
    for candidate in (name, name + ".gz"):
        path = os.path.join(directory, candidate)
        if os.path.exists(path):
            return path
    raise FileNotFoundError(f"no {name}[.gz] in {directory}")


def concatenate(datasets):
    labels = None
    if all(ds.labels is not None for ds in datasets):
        labels = np.concatenate([ds.labels for ds in datasets])
    return Dataset(np.concatenate([ds.inputs for ds in datasets]),
                   np.concatenate([ds.targets for ds in datasets]), labels)


def load_mnist(directory, subset=None, seed=0, verbose=False):
    """ standard MNIST train + test files merged into one 70,000-sample Dataset

    subset : int (optional)
        keep a seeded random subsample of this many images
    """
    paths = {key: _find(directory, name) for key, name in MNIST_FILES.items()}
    dataset = concatenate([load_mnist_idx(paths["train_images"], paths["train_labels"]),
                           load_mnist_idx(paths["test_images"], paths["test_labels"])])
    if verbose:
        print(f"MNIST loaded: {len(dataset)} images of dimension {dataset.n_dims}")
    if subset is not None and subset < len(dataset):
        inds = np.sort(default_rng(seed).choice(len(dataset), size=subset, replace=False))
        dataset = dataset.subset(inds)
    return dataset


class AttackSpec:
    """additive Gaussian noise on n_pixel random coordinates of every sample

    Parameters
    -----------
    n_pixel : int
        number of perturbed coordinates per sample, in [0, d]
    sigma : float
        standard deviation of the noise, >= 0
    seed : int
        seed of the masks and noise
    """

    def __init__(self, n_pixel, sigma, seed=0):
        if int(n_pixel) != n_pixel or n_pixel < 0:
            raise ValueError(f"n_pixel must be an integer >= 0, got {n_pixel}")
        if not np.isfinite(sigma) or sigma < 0:
            raise ValueError(f"sigma must be >= 0, got {sigma}")
        self.n_pixel = int(n_pixel)
        self.sigma = float(sigma)
        self.seed = seed

    def __repr__(self):
        return f"AttackSpec(n_pixel={self.n_pixel}, sigma={self.sigma}, seed={self.seed})"


def attack_masks(n_samples, n_dims, n_pixel, rng):
    """ (n_samples, n_pixel) coordinate indices, drawn without replacement per row """
    if n_pixel > n_dims:
        raise ValueError(f"n_pixel={n_pixel} exceeds input dimension {n_dims}")
    if n_pixel == n_dims:
        return np.tile(np.arange(n_dims), (n_samples, 1))
    return np.argsort(rng.random((n_samples, n_dims)), axis=1)[:, :n_pixel]


def noise_attack(dataset, spec):
    """ x + delta * r with a fresh n_pixel mask delta and r ~ N(0, sigma^2 I) per sample

    values are not clipped; targets and labels are unchanged; deterministic given spec.seed
    """
    N, d = dataset.inputs.shape
    if spec.n_pixel > d:
        raise ValueError(f"n_pixel={spec.n_pixel} exceeds input dimension {d}")
    inputs = dataset.inputs.copy()
    if spec.n_pixel > 0 and spec.sigma > 0 and N > 0:
        rng = default_rng(spec.seed)
        cols = attack_masks(N, d, spec.n_pixel, rng)
        rows = np.arange(N)[:, np.newaxis]
        inputs[rows, cols] += spec.sigma * rng.standard_normal((N, spec.n_pixel))
    return Dataset(inputs, dataset.targets, dataset.labels,
                   normalized=dataset.normalized, stats=dataset.stats)


def write_dataset_csv(dataset, filename):
    """ header x0..x{d-1}, y0..y{C-1}[, label], one sample per row """
    header = ([f"x{i}" for i in range(dataset.n_dims)] +
              [f"y{i}" for i in range(dataset.n_outputs)])
    if dataset.labels is not None:
        header.append("label")
    rows = []
    for n in range(len(dataset)):
        row = [float(v) for v in dataset.inputs[n]] + [float(v) for v in dataset.targets[n]]
        if dataset.labels is not None:
            row.append(int(dataset.labels[n]))
        rows.append(row)
    write_csv(filename, header, rows)
