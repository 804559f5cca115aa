"""Small fully connected network, written out by hand.

Five layers counting input and output (9-32-16-8-4 by default), rectifier
hidden activations, softmax output, cross-entropy loss, plain mini-batch
gradient descent. Everything is float64 numpy and seeded, so training is
bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ContractError, DomainError, FormatError

DEFAULT_LAYER_SIZES = (9, 32, 16, 8, 4)


@dataclass
class MlpModel:
    layer_sizes: tuple[int, ...]
    weights: list[np.ndarray]  # weights[k]: (layer_sizes[k], layer_sizes[k+1])
    biases: list[np.ndarray]

    def __post_init__(self):
        sizes = self.layer_sizes
        if len(sizes) < 2:
            raise ContractError("need at least input and output layers")
        for k, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.shape != (sizes[k], sizes[k + 1]) or b.shape != (sizes[k + 1],):
                raise ContractError(f"layer {k} parameter shapes do not match layer sizes")

    @property
    def n_inputs(self) -> int:
        return self.layer_sizes[0]

    @property
    def n_classes(self) -> int:
        return self.layer_sizes[-1]


def init_model(
    layer_sizes: Sequence[int] = DEFAULT_LAYER_SIZES,
    rng: np.random.Generator | None = None,
) -> MlpModel:
    """He-scaled random init (zeros if rng is None, handy for symmetry tests)."""
    sizes = tuple(int(s) for s in layer_sizes)
    weights, biases = [], []
    for n_in, n_out in zip(sizes, sizes[1:]):
        if rng is None:
            weights.append(np.zeros((n_in, n_out)))
        else:
            weights.append(rng.normal(0.0, np.sqrt(2.0 / n_in), size=(n_in, n_out)))
        biases.append(np.zeros(n_out))
    return MlpModel(layer_sizes=sizes, weights=weights, biases=biases)


def _softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def forward(x: np.ndarray | Sequence[float], model: MlpModel) -> np.ndarray:
    """Class probabilities for one input (n,) or a batch (m, n)."""
    a = np.asarray(x, dtype=float)
    single = a.ndim == 1
    if single:
        a = a[None, :]
    if a.ndim != 2 or a.shape[1] != model.n_inputs:
        raise ContractError(f"input must have {model.n_inputs} features")
    if not np.all(np.isfinite(a)):
        raise DomainError("inputs must be finite")
    for k, (w, b) in enumerate(zip(model.weights, model.biases)):
        a = a @ w + b
        if k < len(model.weights) - 1:
            a = np.maximum(a, 0.0)
    probs = _softmax(a)
    return probs[0] if single else probs


def loss_and_grads(
    model: MlpModel, x: np.ndarray, labels: np.ndarray
) -> tuple[float, list[np.ndarray], list[np.ndarray]]:
    """Mean cross-entropy and its gradients w.r.t. every weight and bias."""
    x = np.asarray(x, dtype=float)
    labels = np.asarray(labels, dtype=int)
    m = x.shape[0]
    activations = [x]
    a = x
    for k, (w, b) in enumerate(zip(model.weights, model.biases)):
        z = a @ w + b
        a = np.maximum(z, 0.0) if k < len(model.weights) - 1 else z
        activations.append(a)
    probs = _softmax(activations[-1])
    # clip far below any reachable probability so the loss stays finite while
    # its gradient remains exactly the softmax cross-entropy one
    picked = np.clip(probs[np.arange(m), labels], 1e-300, None)
    loss = float(-np.mean(np.log(picked)))

    delta = probs.copy()
    delta[np.arange(m), labels] -= 1.0
    delta /= m
    grads_w: list[np.ndarray] = [None] * len(model.weights)  # type: ignore[list-item]
    grads_b: list[np.ndarray] = [None] * len(model.biases)  # type: ignore[list-item]
    for k in range(len(model.weights) - 1, -1, -1):
        grads_w[k] = activations[k].T @ delta
        grads_b[k] = delta.sum(axis=0)
        if k > 0:
            delta = (delta @ model.weights[k].T) * (activations[k] > 0)
    return loss, grads_w, grads_b


def accuracy(model: MlpModel, x: np.ndarray, labels: np.ndarray) -> float:
    pred = np.argmax(forward(x, model), axis=1)
    return float(np.mean(pred == np.asarray(labels)))


def macro_recall(model: MlpModel, x: np.ndarray, labels: np.ndarray) -> float:
    """Unweighted mean of per-class recall."""
    labels = np.asarray(labels)
    pred = np.argmax(forward(x, model), axis=1)
    recalls = []
    for c in range(model.n_classes):
        mask = labels == c
        if mask.any():
            recalls.append(float(np.mean(pred[mask] == c)))
    return float(np.mean(recalls))


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.1
    epochs: int = 150
    batch_size: int = 32
    seed: int = 0


@dataclass
class EpochStats:
    epoch: int
    loss: float
    train_accuracy: float
    train_recall: float
    val_accuracy: float | None = None
    val_recall: float | None = None


def train(
    x: np.ndarray,
    labels: np.ndarray,
    hyper: TrainConfig | None = None,
    layer_sizes: Sequence[int] = DEFAULT_LAYER_SIZES,
    val: tuple[np.ndarray, np.ndarray] | None = None,
) -> tuple[MlpModel, list[EpochStats]]:
    """Mini-batch gradient descent; returns the model and per-epoch curve."""
    hyper = hyper or TrainConfig()
    x = np.asarray(x, dtype=float)
    labels = np.asarray(labels, dtype=int)
    if x.shape[0] == 0:
        raise DomainError("training set is empty")
    if labels.min() < 0 or labels.max() >= layer_sizes[-1]:
        raise DomainError("labels outside the output range")
    rng = np.random.default_rng(hyper.seed)
    model = init_model(layer_sizes, rng)
    n = x.shape[0]
    history: list[EpochStats] = []
    for epoch in range(hyper.epochs):
        order = rng.permutation(n)
        losses = []
        for start in range(0, n, hyper.batch_size):
            idx = order[start:start + hyper.batch_size]
            loss, gw, gb = loss_and_grads(model, x[idx], labels[idx])
            losses.append(loss)
            for k in range(len(model.weights)):
                model.weights[k] -= hyper.learning_rate * gw[k]
                model.biases[k] -= hyper.learning_rate * gb[k]
        stats = EpochStats(
            epoch=epoch,
            loss=float(np.mean(losses)),
            train_accuracy=accuracy(model, x, labels),
            train_recall=macro_recall(model, x, labels),
        )
        if val is not None:
            stats.val_accuracy = accuracy(model, val[0], val[1])
            stats.val_recall = macro_recall(model, val[0], val[1])
        history.append(stats)
    return model, history


def save_model(model: MlpModel, path: str | Path) -> None:
    """Flat text format: layer sizes header, then row-major weights and biases."""
    with open(path, "w") as fh:
        fh.write(" ".join(str(s) for s in model.layer_sizes) + "\n")
        for w, b in zip(model.weights, model.biases):
            for row in w:
                fh.write(" ".join(repr(float(v)) for v in row) + "\n")
            fh.write(" ".join(repr(float(v)) for v in b) + "\n")


def load_model(path: str | Path) -> MlpModel:
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise FormatError("empty model file")
    try:
        sizes = tuple(int(t) for t in lines[0].split())
        weights, biases = [], []
        row = 1
        for n_in, n_out in zip(sizes, sizes[1:]):
            w = np.array([[float(v) for v in lines[row + i].split()] for i in range(n_in)])
            row += n_in
            b = np.array([float(v) for v in lines[row].split()])
            row += 1
            weights.append(w.reshape(n_in, n_out))
            biases.append(b)
    except (ValueError, IndexError) as exc:
        raise FormatError(f"malformed model file {path}") from exc
    return MlpModel(layer_sizes=sizes, weights=weights, biases=biases)
