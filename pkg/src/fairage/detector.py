"""Reference binary detector over frame feature vectors: a logistic model or
small ReLU MLP trained with Adam on BCE-with-logits, with AUC-based early
stopping. Training is single-threaded and bit-reproducible for a fixed seed.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from fairage.errors import MissingInputError, SingleClassError, ValidationError
from fairage.evaluation import auc
from fairage.rng import stream

AUC_IMPROVEMENT_EPS = 1e-6


@dataclass(frozen=True)
class HyperParams:
    learning_rate: float = 0.001
    weight_decay: float = 1e-6
    batch_size: int = 32
    max_epochs: int = 20
    patience: int = 3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    hidden_layers: tuple[int, ...] = ()
    seed: int = 0
    decoupled_weight_decay: bool = True

    def __post_init__(self):
        if self.learning_rate <= 0 or self.weight_decay < 0 or self.epsilon <= 0:
            raise ValidationError("learning rate and epsilon must be positive, weight decay non-negative")
        if self.batch_size < 1 or self.max_epochs < 1 or self.patience < 1:
            raise ValidationError("batch size, max epochs, and patience must be positive")
        if self.patience > self.max_epochs:
            raise ValidationError("patience cannot exceed max epochs")
        if not (0.0 < self.beta1 < 1.0 and 0.0 < self.beta2 < 1.0):
            raise ValidationError("betas must lie in (0,1)")
        if any(h < 1 for h in self.hidden_layers):
            raise ValidationError("hidden layer widths must be positive")


DEFAULT_HP = HyperParams()

Params = list[tuple[np.ndarray, np.ndarray]]


def bce_with_logits(z, y) -> float:
    """Numerically stable binary cross-entropy from raw logits; the mean
    over all elements when given arrays."""
    z = np.asarray(z, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    loss = np.maximum(z, 0.0) - z * y + np.log1p(np.exp(-np.abs(z)))
    return float(np.mean(loss))


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def init_params(feature_dim: int, hidden_layers: tuple[int, ...], seed: int) -> Params:
    """Weights uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)] from the seeded
    stream, biases zero."""
    if feature_dim < 1:
        raise ValidationError(f"feature dimension must be positive, got {feature_dim}")
    rng = stream(seed, "detector.init")
    dims = [feature_dim, *hidden_layers, 1]
    params: Params = []
    for fan_in, fan_out in zip(dims, dims[1:]):
        bound = 1.0 / math.sqrt(fan_in)
        flat = [rng.uniform(-bound, bound) for _ in range(fan_in * fan_out)]
        w = np.array(flat, dtype=np.float64).reshape(fan_in, fan_out)
        params.append((w, np.zeros(fan_out, dtype=np.float64)))
    return params


def forward_logits(params: Params, x: np.ndarray) -> np.ndarray:
    a = x
    for w, b in params[:-1]:
        a = np.maximum(a @ w + b, 0.0)
    w, b = params[-1]
    return (a @ w + b)[:, 0]


def loss_and_grads(params: Params, x: np.ndarray, y: np.ndarray) -> tuple[float, Params]:
    """Mean BCE-with-logits loss over the batch and its analytic gradient
    with respect to every parameter."""
    activations = [x]
    pre: list[np.ndarray] = []
    a = x
    for w, b in params[:-1]:
        z = a @ w + b
        pre.append(z)
        a = np.maximum(z, 0.0)
        activations.append(a)
    w_out, b_out = params[-1]
    logits = (a @ w_out + b_out)[:, 0]
    loss = bce_with_logits(logits, y)

    n = x.shape[0]
    delta = ((_sigmoid(logits) - y) / n)[:, None]
    grads: list[tuple[np.ndarray, np.ndarray] | None] = [None] * len(params)
    grads[-1] = (activations[-1].T @ delta, delta.sum(axis=0))
    upstream = delta @ w_out.T
    for i in range(len(params) - 2, -1, -1):
        upstream = upstream * (pre[i] > 0.0)
        grads[i] = (activations[i].T @ upstream, upstream.sum(axis=0))
        if i > 0:
            upstream = upstream @ params[i][0].T
    return loss, [g for g in grads if g is not None]


@dataclass(frozen=True)
class AdamState:
    m: Params
    v: Params
    t: int = 0


def init_adam(params: Params) -> AdamState:
    def zeros(p: Params) -> Params:
        return [(np.zeros_like(w), np.zeros_like(b)) for w, b in p]

    return AdamState(zeros(params), zeros(params), 0)


def adam_step(params: Params, grads: Params, state: AdamState, hp: HyperParams) -> tuple[Params, AdamState]:
    """One Adam update with bias correction; weight decay is decoupled
    (multiplicative shrink before the delta) unless hp says otherwise."""
    for gw, gb in grads:
        if not (np.all(np.isfinite(gw)) and np.all(np.isfinite(gb))):
            raise ValidationError("non-finite gradient; aborting optimization")
    t = state.t + 1
    lr, beta1, beta2, eps = hp.learning_rate, hp.beta1, hp.beta2, hp.epsilon
    bias1 = 1.0 - beta1**t
    bias2 = 1.0 - beta2**t

    new_params: Params = []
    new_m: Params = []
    new_v: Params = []
    for (w, b), (gw, gb), (mw, mb), (vw, vb) in zip(params, grads, state.m, state.v):
        if hp.decoupled_weight_decay:
            w = w * (1.0 - lr * hp.weight_decay)
            b = b * (1.0 - lr * hp.weight_decay)
        else:
            gw = gw + hp.weight_decay * w
            gb = gb + hp.weight_decay * b
        mw = beta1 * mw + (1.0 - beta1) * gw
        mb = beta1 * mb + (1.0 - beta1) * gb
        vw = beta2 * vw + (1.0 - beta2) * gw * gw
        vb = beta2 * vb + (1.0 - beta2) * gb * gb
        w = w - lr * (mw / bias1) / (np.sqrt(vw / bias2) + eps)
        b = b - lr * (mb / bias1) / (np.sqrt(vb / bias2) + eps)
        new_params.append((w, b))
        new_m.append((mw, mb))
        new_v.append((vw, vb))
    return new_params, AdamState(new_m, new_v, t)


@dataclass(frozen=True)
class EpochStats:
    epoch: int
    train_loss: float
    val_auc: float


@dataclass(frozen=True)
class TrainedModel:
    params: Params
    hp: HyperParams
    feature_dim: int
    history: tuple[EpochStats, ...]
    stopped_epoch: int
    best_epoch: int
    best_val_auc: float


def _check_features(x, y, name: str) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if x.ndim != 2 or x.shape[0] == 0:
        raise ValidationError(f"{name} features must be a non-empty 2-D array")
    if y.shape != (x.shape[0],):
        raise ValidationError(f"{name} labels must match the feature row count")
    if not np.all(np.isfinite(x)):
        raise ValidationError(f"{name} features must be finite")
    if not np.all((y == 0) | (y == 1)):
        raise ValidationError(f"{name} labels must be 0 or 1")
    return x, y


def train(train_x, train_y, val_x, val_y, hp: HyperParams = DEFAULT_HP) -> TrainedModel:
    """Mini-batch Adam on BCE-with-logits with per-epoch validation AUC and
    early stopping once the AUC fails to improve for `patience` consecutive
    epochs. Returns the weights from the best-AUC epoch."""
    train_x, train_y = _check_features(train_x, train_y, "train")
    val_x, val_y = _check_features(val_x, val_y, "validation")
    if train_x.shape[1] != val_x.shape[1]:
        raise ValidationError("train and validation feature dimensions differ")
    if len(set(val_y.tolist())) < 2:
        raise SingleClassError("validation set must contain both classes")

    n = train_x.shape[0]
    params = init_params(train_x.shape[1], hp.hidden_layers, hp.seed)
    adam = init_adam(params)
    shuffle_rng = stream(hp.seed, "detector.shuffle")

    best_params = [(w.copy(), b.copy()) for w, b in params]
    best_auc = -math.inf
    best_epoch = 0
    epochs_without_improvement = 0
    history: list[EpochStats] = []
    stopped_epoch = 0

    for epoch in range(1, hp.max_epochs + 1):
        order = list(range(n))
        shuffle_rng.shuffle(order)
        loss_sum = 0.0
        for start in range(0, n, hp.batch_size):
            batch = order[start : start + hp.batch_size]
            loss, grads = loss_and_grads(params, train_x[batch], train_y[batch])
            params, adam = adam_step(params, grads, adam, hp)
            loss_sum += loss * len(batch)
        val_auc = auc(forward_logits(params, val_x), val_y)
        history.append(EpochStats(epoch, loss_sum / n, val_auc))
        stopped_epoch = epoch
        if val_auc > best_auc + AUC_IMPROVEMENT_EPS:
            best_auc = val_auc
            best_epoch = epoch
            best_params = [(w.copy(), b.copy()) for w, b in params]
            epochs_without_improvement = 0
        else:
            epochs_without_improvement += 1
            if epochs_without_improvement >= hp.patience:
                break

    return TrainedModel(
        params=best_params,
        hp=hp,
        feature_dim=train_x.shape[1],
        history=tuple(history),
        stopped_epoch=stopped_epoch,
        best_epoch=best_epoch,
        best_val_auc=best_auc,
    )


def predict(model: TrainedModel, features) -> np.ndarray:
    """Raw logits, higher meaning more fake."""
    x = np.asarray(features, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != model.feature_dim:
        raise ValidationError(
            f"features must have shape (n, {model.feature_dim}), got {x.shape}"
        )
    return forward_logits(model.params, x)


MODEL_MAGIC = "fairage-model"
MODEL_VERSION = "1"


def save_model(model: TrainedModel, path: str | Path) -> None:
    hp = model.hp
    lines = [
        f"{MODEL_MAGIC} {MODEL_VERSION}",
        f"feature_dim {model.feature_dim}",
        "hidden " + (",".join(str(h) for h in hp.hidden_layers) if hp.hidden_layers else "-"),
        f"learning_rate {hp.learning_rate!r}",
        f"weight_decay {hp.weight_decay!r}",
        f"batch_size {hp.batch_size}",
        f"max_epochs {hp.max_epochs}",
        f"patience {hp.patience}",
        f"beta1 {hp.beta1!r}",
        f"beta2 {hp.beta2!r}",
        f"epsilon {hp.epsilon!r}",
        f"seed {hp.seed}",
        f"decoupled_weight_decay {1 if hp.decoupled_weight_decay else 0}",
        f"stopped_epoch {model.stopped_epoch}",
        f"best_epoch {model.best_epoch}",
        f"best_val_auc {model.best_val_auc!r}",
        f"layers {len(model.params)}",
    ]
    for w, b in model.params:
        lines.append(f"layer {w.shape[0]} {w.shape[1]}")
        for row in w:
            lines.append(" ".join(repr(float(v)) for v in row))
        lines.append(" ".join(repr(float(v)) for v in b))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def load_model(path: str | Path) -> TrainedModel:
    p = Path(path)
    if not p.is_file():
        raise MissingInputError(f"input file not found: {p}")
    lines = p.read_text(encoding="utf-8").splitlines()
    pos = 0

    def next_line() -> str:
        nonlocal pos
        if pos >= len(lines):
            raise ValidationError(f"{p}: truncated model file")
        line = lines[pos]
        pos += 1
        return line

    def keyed(key: str) -> str:
        line = next_line()
        head, _, value = line.partition(" ")
        if head != key:
            raise ValidationError(f"{p}: expected {key!r}, got {head!r}")
        return value

    magic = next_line()
    if magic != f"{MODEL_MAGIC} {MODEL_VERSION}":
        raise ValidationError(f"{p}: not a model file (header {magic!r})")
    try:
        feature_dim = int(keyed("feature_dim"))
        hidden_tok = keyed("hidden")
        hidden = () if hidden_tok == "-" else tuple(int(t) for t in hidden_tok.split(","))
        hp = HyperParams(
            learning_rate=float(keyed("learning_rate")),
            weight_decay=float(keyed("weight_decay")),
            batch_size=int(keyed("batch_size")),
            max_epochs=int(keyed("max_epochs")),
            patience=int(keyed("patience")),
            beta1=float(keyed("beta1")),
            beta2=float(keyed("beta2")),
            epsilon=float(keyed("epsilon")),
            seed=int(keyed("seed")),
            decoupled_weight_decay=keyed("decoupled_weight_decay") == "1",
            hidden_layers=hidden,
        )
        stopped_epoch = int(keyed("stopped_epoch"))
        best_epoch = int(keyed("best_epoch"))
        best_val_auc = float(keyed("best_val_auc"))
        n_layers = int(keyed("layers"))
        params: Params = []
        for _ in range(n_layers):
            shape_tok = keyed("layer").split()
            fan_in, fan_out = int(shape_tok[0]), int(shape_tok[1])
            rows = []
            for _ in range(fan_in):
                row = [float(t) for t in next_line().split()]
                if len(row) != fan_out:
                    raise ValidationError(f"{p}: weight row width mismatch")
                rows.append(row)
            bias = [float(t) for t in next_line().split()]
            if len(bias) != fan_out:
                raise ValidationError(f"{p}: bias width mismatch")
            params.append((np.array(rows, dtype=np.float64), np.array(bias, dtype=np.float64)))
    except ValueError:
        raise ValidationError(f"{p}: unparseable model file") from None
    return TrainedModel(
        params=params,
        hp=hp,
        feature_dim=feature_dim,
        history=(),
        stopped_epoch=stopped_epoch,
        best_epoch=best_epoch,
        best_val_auc=best_val_auc,
    )


HISTORY_HEADER = ["epoch", "train_loss", "val_auc"]


def write_history(model: TrainedModel, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(HISTORY_HEADER)
        for stats in model.history:
            writer.writerow([str(stats.epoch), repr(stats.train_loss), repr(stats.val_auc)])
