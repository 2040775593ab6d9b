"""
seeding and index helpers shared by the trainers, datasets and experiments
"""
import numpy as np

STREAM_TAGS = {"arff": 0, "sgd": 1, "data": 2, "split": 3, "attack": 4, "attack_validation": 5}


def seed_sequence(master_seed, *keys):
    """ independent seed stream for (master_seed, *keys)

    keys are non-negative integers or stream names (STREAM_TAGS); the stream
    depends only on the keys given, so adding a new key (e.g. digit 10) never
    reshuffles the streams of existing keys
    """
    spawn_key = []
    for key in keys:
        if isinstance(key, str):
            if key not in STREAM_TAGS:
                raise ValueError(f"unknown seed stream {key!r}")
            key = STREAM_TAGS[key]
        key = int(key)
        if key < 0:
            raise ValueError("seed keys must be non-negative")
        spawn_key.append(key)
    return np.random.SeedSequence(entropy=int(master_seed) % 2**64,
                                  spawn_key=tuple(spawn_key))


def derive_seed(master_seed, *keys):
    """ 64-bit integer seed derived from (master_seed, *keys) """
    return int(seed_sequence(master_seed, *keys).generate_state(1, np.uint64)[0])


def default_rng(seed):
    """ numpy Generator from an int seed or a SeedSequence """
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.default_rng(seed)
    return np.random.default_rng(int(seed) % 2**64)


def split_sizes(n, ratios=(7, 2, 1)):
    """ floor sizes for each ratio except the last, which takes the remainder

    integer arithmetic, so n=70000 with (7,2,1) gives exactly 49000/14000/7000
    """
    ratios = [int(r) for r in ratios]
    if len(ratios) < 2 or min(ratios) < 0 or sum(ratios) == 0:
        raise ValueError(f"invalid split ratios {ratios}")
    total = sum(ratios)
    sizes = [n * r // total for r in ratios[:-1]]
    sizes.append(n - sum(sizes))
    return sizes


def split_indices(n, ratios=(7, 2, 1), seed=0):
    """ seeded shuffle of range(n) cut into contiguous pieces

    Parameters
    ----------
    n : int
        number of samples
    ratios : tuple of int (optional, default (7, 2, 1))
        relative sizes of the pieces
    seed : int (optional, default 0)
        seed of the shuffle

    Returns
    --------
    inds : list of 1D int arrays
        one array per ratio, disjoint, together a permutation of range(n)
    """
    sizes = split_sizes(n, ratios)
    iperm = default_rng(seed).permutation(n)
    bounds = np.cumsum([0] + sizes)
    return [iperm[bounds[i]:bounds[i + 1]] for i in range(len(sizes))]


def batch_slices(n, batch_size):
    """ contiguous [start, stop) slices covering range(n); the last may be short """
    return [slice(i, min(i + batch_size, n)) for i in range(0, n, batch_size)]
