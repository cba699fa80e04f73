"""Momentum-SGD training with the halving learning-rate schedule."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .encoding import indices_to_onehot
from .model import ConvNetModel, build_model, forward, loss_and_backward


class InsufficientData(ValueError):
    """Training needs at least two outcome classes."""


@dataclass(frozen=True)
class TrainCfg:
    minibatch: int = 128
    momentum: float = 0.9
    initial_lr: float = 0.01
    lr_halvings: int = 10
    epochs_per_halving: int = 3
    epochs: int = 30  # the full decay horizon; lower for quick runs
    seed: int = 0


def learning_rate(epoch: int, cfg: TrainCfg = TrainCfg()) -> float:
    """initial_lr halved every epochs_per_halving epochs, at most lr_halvings times."""
    halvings = min(epoch // cfg.epochs_per_halving, cfg.lr_halvings)
    return cfg.initial_lr * 2.0 ** (-halvings)


class MomentumSGD:
    """v <- mu*v - lr*grad; w <- w + v."""

    def __init__(self, params: list[tuple[str, np.ndarray]], momentum: float):
        self.params = params
        self.momentum = momentum
        self.velocity = {name: np.zeros_like(arr) for name, arr in params}

    def step(self, grads: dict[str, np.ndarray], lr: float) -> None:
        for name, arr in self.params:
            v = self.velocity[name]
            v *= self.momentum
            v -= lr * grads[name]
            arr += v


def train(
    dataset: list[tuple[np.ndarray, str]] | None = None,
    variant: str = "small",
    cfg: TrainCfg = TrainCfg(),
    records: list | None = None,
    model: ConvNetModel | None = None,
    val_fraction: float = 0.0,
) -> tuple[ConvNetModel, list[dict]]:
    """Train a model; deterministic given (seed, data, config).

    ``dataset`` is a list of (char-index row, label); alternatively pass raw
    ``records`` (labels taken from outcomes) with an optional prebuilt model.
    Returns the trained model and one structured metrics record per epoch.
    """
    if dataset is None:
        if not records:
            raise InsufficientData("no training data")
        probe = model or build_model(variant, labels=sorted({r.outcome.code for r in records}))
        idx = probe.encode_records(records)
        dataset = [(idx[i], records[i].outcome.code) for i in range(len(records))]
        model = probe

    labels = sorted({label for _, label in dataset})
    if len(labels) < 2:
        raise InsufficientData("need at least 2 outcome classes")
    if model is None:
        if "Right" not in labels:
            labels.append("Right")
        model = build_model(variant, labels=sorted(labels))

    rng = np.random.default_rng(cfg.seed)
    model.init_weights(rng)
    optimizer = MomentumSGD(model.parameters(), cfg.momentum)

    idx_rows = np.stack([row for row, _ in dataset])
    y_labels = [label for _, label in dataset]
    n = len(dataset)
    n_val = int(round(n * val_fraction))
    order0 = rng.permutation(n)
    val_ids = order0[:n_val]
    train_ids = order0[n_val:]
    m = len(model.alphabet)

    metrics: list[dict] = []
    for epoch in range(cfg.epochs):
        lr = learning_rate(epoch, cfg)
        order = train_ids[rng.permutation(len(train_ids))]
        total_loss = 0.0
        total_correct = 0
        for start in range(0, len(order), cfg.minibatch):
            batch_ids = order[start : start + cfg.minibatch]
            x = indices_to_onehot(idx_rows[batch_ids], m)
            batch_labels = [y_labels[i] for i in batch_ids]
            loss, grads, probs = loss_and_backward(model, x, batch_labels, mode="train", rng=rng)
            optimizer.step(grads, lr)
            total_loss += loss * len(batch_ids)
            # accuracy measured on the train-mode forward (dropout active)
            want = np.array([model.label_index(lb) for lb in batch_labels])
            total_correct += int((np.argmax(probs, axis=1) == want).sum())
        record = {
            "epoch": epoch,
            "lr": lr,
            "train_loss": total_loss / max(len(order), 1),
            "train_accuracy": total_correct / max(len(order), 1),
        }
        if n_val:
            record["val_accuracy"] = _accuracy(model, idx_rows[val_ids], [y_labels[i] for i in val_ids])
        metrics.append(record)
    return model, metrics


def _accuracy(model: ConvNetModel, idx_rows: np.ndarray, labels: list[str], batch: int = 256) -> float:
    correct = 0
    m = len(model.alphabet)
    for start in range(0, len(labels), batch):
        x = indices_to_onehot(idx_rows[start : start + batch], m)
        _, probs = forward(model, x, mode="eval")
        pred = np.argmax(probs, axis=1)
        want = [model.label_index(lb) for lb in labels[start : start + batch]]
        correct += int((pred == want).sum())
    return correct / max(len(labels), 1)
