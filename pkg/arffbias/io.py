"""
model snapshots (ARFFNET1), CSV tables and whitespace-delimited plot data
"""
import os
import csv
import glob
import hashlib
import numpy as np
from natsort import natsorted

from .network import FourierFeatureNetwork

SNAPSHOT_MAGIC = b"ARFFNET1"
SNAPSHOT_EXT = ".arffnet"
INCOMPLETE = "INCOMPLETE"


class SnapshotError(ValueError):
    """ snapshot file is not a valid ARFFNET1 model """


def _checksum(payload):
    return hashlib.blake2b(payload, digest_size=8).digest()


def network_to_bytes(net):
    """ ARFFNET1 | "K d\\n" | frequencies, amplitudes, biases as <f8 | 8-byte checksum """
    header = SNAPSHOT_MAGIC + f"{net.n_nodes} {net.n_dims}\n".encode("ascii")
    body = np.concatenate((net.frequencies.reshape(-1), net.amplitudes,
                           net.biases)).astype("<f8").tobytes()
    payload = header + body
    return payload + _checksum(payload)


def network_from_bytes(raw):
    if not raw.startswith(SNAPSHOT_MAGIC):
        raise SnapshotError("missing ARFFNET1 magic")
    end = raw.find(b"\n", len(SNAPSHOT_MAGIC))
    if end < 0:
        raise SnapshotError("missing K d header line")
    try:
        n_nodes, n_dims = (int(v) for v in raw[len(SNAPSHOT_MAGIC):end].split())
    except ValueError as err:
        raise SnapshotError(f"bad header {raw[len(SNAPSHOT_MAGIC):end]!r}") from err
    n_values = n_nodes * n_dims + 2 * n_nodes
    body_end = end + 1 + 8 * n_values
    if len(raw) != body_end + 8:
        raise SnapshotError(f"expected {body_end + 8} bytes for K={n_nodes}, d={n_dims}, "
                            f"found {len(raw)}")
    if _checksum(raw[:body_end]) != raw[body_end:]:
        raise SnapshotError("checksum mismatch")
    values = np.frombuffer(raw, dtype="<f8", count=n_values, offset=end + 1)
    frequencies = values[:n_nodes * n_dims].reshape(n_nodes, n_dims)
    amplitudes = values[n_nodes * n_dims:n_nodes * (n_dims + 1)]
    biases = values[n_nodes * (n_dims + 1):]
    return FourierFeatureNetwork(frequencies, amplitudes, biases)


def save_network(net, filename):
    _write_bytes(filename, network_to_bytes(net))


def load_network(filename):
    try:
        with open(filename, "rb") as f:
            raw = f.read()
    except OSError as err:
        raise OSError(f"could not read snapshot {filename}: {err}") from err
    try:
        return network_from_bytes(raw)
    except SnapshotError as err:
        raise SnapshotError(f"{filename}: {err}") from err


def save_ensemble(networks, directory, prefix="digit"):
    """ one snapshot per network: directory/digit0.arffnet, ... """
    os.makedirs(directory, exist_ok=True)
    paths = []
    for i, net in enumerate(networks):
        path = os.path.join(directory, f"{prefix}{i}{SNAPSHOT_EXT}")
        save_network(net, path)
        paths.append(path)
    return paths


def load_ensemble(directory, prefix="digit"):
    """ every directory/<prefix><i>.arffnet in natural order of i """
    paths = list_snapshots(directory, prefix)
    if not paths:
        raise FileNotFoundError(f"no {prefix}*{SNAPSHOT_EXT} snapshots in {directory}")
    return [load_network(path) for path in paths]


def list_snapshots(directory, prefix=""):
    """ snapshot paths sorted naturally (epoch2 before epoch10) """
    return natsorted(glob.glob(os.path.join(directory, f"{prefix}*{SNAPSHOT_EXT}")))


def _write_bytes(filename, raw):
    try:
        dirname = os.path.dirname(filename)
        if dirname:
            os.makedirs(dirname, exist_ok=True)
        with open(filename, "wb") as f:
            f.write(raw)
    except OSError as err:
        raise OSError(f"could not write {filename}: {err}") from err


def write_csv(filename, header, rows, incomplete=False):
    """ RFC-4180 CSV with a header row; floats written with repr, "\\n" line ends

    incomplete=True appends an INCOMPLETE sentinel row
    """
    try:
        dirname = os.path.dirname(filename)
        if dirname:
            os.makedirs(dirname, exist_ok=True)
        with open(filename, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
            if incomplete:
                writer.writerow([INCOMPLETE] + [""] * (len(header) - 1))
    except OSError as err:
        raise OSError(f"could not write {filename}: {err}") from err


def read_csv(filename):
    """ (header, rows) with every cell as a string """
    with open(filename, newline="", encoding="utf-8") as f:
        rows = list(csv.reader(f))
    return rows[0], rows[1:]


def write_trace_csv(filename, trace):
    write_csv(filename, ["epoch", "train_loss", "val_loss", "acceptance_rate"], trace.rows())


def write_predictions_csv(filename, labels, scores):
    """ sample_index, true_label, predicted_label, score_0 .. score_9 """
    scores = np.asarray(scores, dtype=np.float64)
    predicted = scores.argmax(axis=1)
    header = (["sample_index", "true_label", "predicted_label"] +
              [f"score_{i}" for i in range(scores.shape[1])])
    rows = [[n, int(labels[n]), int(predicted[n])] + [float(s) for s in scores[n]]
            for n in range(scores.shape[0])]
    write_csv(filename, header, rows)


def emit_plot_data(series, out_dir):
    """ one whitespace-delimited data file per curve plus a manifest

    Parameters
    ----------
    series : dict
        "name": str, "xlabel": str, "ylabel": str,
        "curves": dict mapping label -> (x, y)
    out_dir : str
        output directory

    Returns
    -------
    manifest : str
        path of <name>_manifest.txt, whose lines are "file<TAB>label" after
        "# xlabel" and "# ylabel" comment lines
    """
    if not series.get("curves"):
        raise ValueError("series has no curves")
    name = series["name"]
    manifest = os.path.join(out_dir, f"{name}_manifest.txt")
    lines = [f"# name\t{name}", f"# xlabel\t{series.get('xlabel', 'x')}",
             f"# ylabel\t{series.get('ylabel', 'y')}"]
    try:
        os.makedirs(out_dir, exist_ok=True)
        for label, (x, y) in series["curves"].items():
            fname = f"{name}_{_slug(label)}.dat"
            path = os.path.join(out_dir, fname)
            try:
                np.savetxt(path, np.column_stack((np.asarray(x, dtype=np.float64),
                                                  np.asarray(y, dtype=np.float64))),
                           fmt="%.17g", header=f"{series.get('xlabel', 'x')} {label}")
            except OSError as err:
                raise OSError(f"could not write {path}: {err}") from err
            lines.append(f"{fname}\t{label}")
        with open(manifest, "w", encoding="utf-8") as f:
            f.write("\n".join(lines) + "\n")
    except OSError as err:
        if str(out_dir) in str(err):
            raise
        raise OSError(f"could not write plot data to {out_dir}: {err}") from err
    return manifest


def load_plot_data(manifest):
    """ inverse of emit_plot_data """
    series = {"curves": {}}
    out_dir = os.path.dirname(manifest)
    with open(manifest, encoding="utf-8") as f:
        for line in f.read().splitlines():
            key, value = line.split("\t", 1)
            if key.startswith("# "):
                series[key[2:]] = value
            else:
                xy = np.loadtxt(os.path.join(out_dir, key), ndmin=2)
                series["curves"][value] = (xy[:, 0], xy[:, 1])
    return series


def _slug(label):
    return "".join(c if c.isalnum() or c in "-_." else "_" for c in str(label))
