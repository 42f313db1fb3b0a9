"""Sequence encoder plus fusion head for the stage-1 hybrid model.

Two interchangeable backends implement the same contract:

* ``bidirectional-recurrent`` — a single-layer bidirectional LSTM over the
  length-4 AOD history, torch-based, the default.
* ``linear-autoregressive`` — a linear projection of the same 4 values,
  trained with a hand-rolled Adam loop; numpy only, no deep-learning
  dependency.

Either way the encoder output vector is concatenated with the (already
standardized) static-branch prediction, in that order with the static
value last, and passed through a small dense head ending in one unit.
Inputs are standardized by the caller; outputs are raw AOD estimates,
clamping happens a level up.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Sequence

import numpy as np

from ..errors import FittingError, NotFittedError

BACKEND_KINDS = ("bidirectional-recurrent", "linear-autoregressive")
NONLINEARITIES = ("rectifier", "identity")

StateDict = Dict[str, np.ndarray]


@dataclass(frozen=True)
class FusionConfig:
    hidden_dim: int = 32
    head_dims: tuple[int, ...] = (16, 1)
    nonlinearity: str = "rectifier"
    epochs: int = 50
    batch_size: int = 32
    learning_rate: float = 1e-3
    seed: int = 42

    def __post_init__(self):
        if self.hidden_dim < 1:
            raise ValueError(f"hidden_dim must be >= 1, got {self.hidden_dim}")
        if not self.head_dims or self.head_dims[-1] != 1:
            raise ValueError(f"head_dims must end in 1, got {self.head_dims}")
        if any(d < 1 for d in self.head_dims):
            raise ValueError(f"head_dims must be positive, got {self.head_dims}")
        if self.nonlinearity not in NONLINEARITIES:
            raise ValueError(f"unknown nonlinearity {self.nonlinearity!r}")
        if self.epochs < 0 or self.batch_size < 1 or self.learning_rate <= 0:
            raise ValueError("bad training config")

    def to_dict(self) -> dict:
        return {
            "hidden_dim": self.hidden_dim,
            "head_dims": list(self.head_dims),
            "nonlinearity": self.nonlinearity,
            "epochs": self.epochs,
            "batch_size": self.batch_size,
            "learning_rate": self.learning_rate,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FusionConfig":
        return cls(
            hidden_dim=int(data["hidden_dim"]),
            head_dims=tuple(int(d) for d in data["head_dims"]),
            nonlinearity=str(data["nonlinearity"]),
            epochs=int(data["epochs"]),
            batch_size=int(data["batch_size"]),
            learning_rate=float(data["learning_rate"]),
            seed=int(data["seed"]),
        )


@dataclass(frozen=True)
class Standardizer:
    """Per-column mean/std transform fitted on training data.

    Covers the five fusion inputs: the 4 sequence features plus the
    static-branch prediction. Zero-variance columns keep std 1 so the
    transform stays invertible.
    """

    mean: np.ndarray
    std: np.ndarray

    @classmethod
    def fit(cls, X: np.ndarray) -> "Standardizer":
        X = np.asarray(X, dtype=float)
        std = X.std(axis=0)
        std = np.where(std == 0, 1.0, std)
        return cls(mean=X.mean(axis=0), std=std)

    @classmethod
    def identity(cls, n_columns: int) -> "Standardizer":
        return cls(mean=np.zeros(n_columns), std=np.ones(n_columns))

    def transform(self, X: np.ndarray) -> np.ndarray:
        return (np.asarray(X, dtype=float) - self.mean) / self.std

    def to_dict(self) -> dict:
        return {"mean": self.mean.tolist(), "std": self.std.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "Standardizer":
        return cls(mean=np.asarray(data["mean"], dtype=float),
                   std=np.asarray(data["std"], dtype=float))


def _validate_fusion_inputs(seq: np.ndarray, static_pred: np.ndarray):
    if seq.ndim != 2 or seq.shape[1] != 4:
        raise ValueError(f"sequence input must be (n, 4), got {seq.shape}")
    if static_pred.shape != (seq.shape[0],):
        raise ValueError(
            f"static input must be ({seq.shape[0]},), got {static_pred.shape}"
        )


class _LinearAutoregressiveBackend:
    """Linear encoder + dense head with manual backprop and Adam."""

    def __init__(self, config: FusionConfig):
        self.config = config
        rng = np.random.default_rng(config.seed)
        self.params: StateDict = {}
        self._init_layer(rng, "enc", 4, config.hidden_dim)
        dims = (config.hidden_dim + 1,) + config.head_dims
        for i, (d_in, d_out) in enumerate(zip(dims, dims[1:])):
            self._init_layer(rng, f"head.{i}", d_in, d_out)
        self._n_head = len(config.head_dims)

    def _init_layer(self, rng, name: str, d_in: int, d_out: int):
        limit = np.sqrt(6.0 / (d_in + d_out))
        self.params[f"{name}.weight"] = rng.uniform(-limit, limit, size=(d_out, d_in))
        self.params[f"{name}.bias"] = np.zeros(d_out)

    def _activate(self, a: np.ndarray) -> np.ndarray:
        if self.config.nonlinearity == "rectifier":
            return np.maximum(a, 0.0)
        return a

    def _activate_grad(self, a: np.ndarray) -> np.ndarray:
        if self.config.nonlinearity == "rectifier":
            return (a > 0).astype(float)
        return np.ones_like(a)

    def _forward(self, seq: np.ndarray, static_pred: np.ndarray):
        p = self.params
        enc = seq @ p["enc.weight"].T + p["enc.bias"]
        z = np.concatenate([enc, static_pred[:, None]], axis=1)
        cache = {"seq": seq, "z0": z, "pre": []}
        for i in range(self._n_head):
            a = z @ p[f"head.{i}.weight"].T + p[f"head.{i}.bias"]
            cache["pre"].append(a)
            z = self._activate(a) if i < self._n_head - 1 else a
            if i < self._n_head - 1:
                cache[f"z{i + 1}"] = z
        return z[:, 0], cache

    def predict_raw(self, seq: np.ndarray, static_pred: np.ndarray) -> np.ndarray:
        out, _ = self._forward(seq, static_pred)
        return out

    def loss_and_gradients(self, seq: np.ndarray, static_pred: np.ndarray,
                           y: np.ndarray) -> tuple[float, StateDict]:
        """Full-batch MSE loss and its gradient for every parameter."""
        p = self.params
        out, cache = self._forward(seq, static_pred)
        n = len(y)
        loss = float(np.mean((out - y) ** 2))
        grads: StateDict = {}

        d_a = (2.0 / n) * (out - y)[:, None]
        for i in range(self._n_head - 1, -1, -1):
            z_in = cache["z0"] if i == 0 else cache[f"z{i}"]
            grads[f"head.{i}.weight"] = d_a.T @ z_in
            grads[f"head.{i}.bias"] = d_a.sum(axis=0)
            d_z = d_a @ p[f"head.{i}.weight"]
            if i > 0:
                d_a = d_z * self._activate_grad(cache["pre"][i - 1])
        d_enc = d_z[:, :-1]  # last column is the static input, not a parameter
        grads["enc.weight"] = d_enc.T @ cache["seq"]
        grads["enc.bias"] = d_enc.sum(axis=0)
        return loss, grads

    def fit(self, seq: np.ndarray, static_pred: np.ndarray,
            y: np.ndarray) -> list[float]:
        cfg = self.config
        rng = np.random.default_rng(cfg.seed + 1)
        m = {k: np.zeros_like(v) for k, v in self.params.items()}
        v = {k: np.zeros_like(p) for k, p in self.params.items()}
        beta1, beta2, eps = 0.9, 0.999, 1e-8
        step = 0
        n = len(y)

        history = []
        for _ in range(cfg.epochs):
            order = rng.permutation(n)
            epoch_se = 0.0
            for start in range(0, n, cfg.batch_size):
                idx = order[start:start + cfg.batch_size]
                loss, grads = self.loss_and_gradients(seq[idx], static_pred[idx], y[idx])
                epoch_se += loss * len(idx)
                step += 1
                for key, grad in grads.items():
                    m[key] = beta1 * m[key] + (1 - beta1) * grad
                    v[key] = beta2 * v[key] + (1 - beta2) * grad ** 2
                    m_hat = m[key] / (1 - beta1 ** step)
                    v_hat = v[key] / (1 - beta2 ** step)
                    self.params[key] -= cfg.learning_rate * m_hat / (np.sqrt(v_hat) + eps)
            history.append(epoch_se / n)
            if not np.isfinite(history[-1]):
                raise FittingError(f"non-finite training loss at epoch {len(history)}")
        return history

    def get_state(self) -> StateDict:
        return {k: v.copy() for k, v in self.params.items()}

    def load_state(self, state: StateDict):
        for key, expected in self.params.items():
            if key not in state:
                raise KeyError(f"missing parameter {key}")
            arr = np.asarray(state[key], dtype=float)
            if arr.shape != expected.shape:
                raise ValueError(f"{key}: expected shape {expected.shape}, got {arr.shape}")
            self.params[key] = arr.copy()


class _RecurrentBackend:
    """Bidirectional LSTM encoder + dense head, torch-based."""

    def __init__(self, config: FusionConfig):
        torch, nn = self._torch()
        self.config = config
        torch.manual_seed(config.seed)

        class _Net(nn.Module):
            def __init__(self, hidden_dim: int, head_dims: Sequence[int], nonlinearity: str):
                super().__init__()
                self.lstm = nn.LSTM(input_size=1, hidden_size=hidden_dim,
                                    batch_first=True, bidirectional=True)
                dims = (2 * hidden_dim + 1,) + tuple(head_dims)
                self.head = nn.ModuleList(
                    nn.Linear(d_in, d_out) for d_in, d_out in zip(dims, dims[1:])
                )
                self.nonlinearity = nonlinearity

            def forward(self, seq, static_pred):
                _, (h_n, _) = self.lstm(seq.unsqueeze(-1))
                enc = torch.cat([h_n[0], h_n[1]], dim=1)
                z = torch.cat([enc, static_pred.unsqueeze(1)], dim=1)
                for i, layer in enumerate(self.head):
                    z = layer(z)
                    if i < len(self.head) - 1 and self.nonlinearity == "rectifier":
                        z = torch.relu(z)
                return z[:, 0]

        self.net = _Net(config.hidden_dim, config.head_dims, config.nonlinearity)

    @staticmethod
    def _torch():
        try:
            import torch
            from torch import nn
        except ImportError as exc:
            raise ImportError(
                "torch is required for the bidirectional-recurrent encoder; "
                "install it or use kind='linear-autoregressive'"
            ) from exc
        return torch, nn

    def predict_raw(self, seq: np.ndarray, static_pred: np.ndarray) -> np.ndarray:
        torch, _ = self._torch()
        self.net.eval()
        with torch.no_grad():
            out = self.net(torch.as_tensor(seq, dtype=torch.float64),
                           torch.as_tensor(static_pred, dtype=torch.float64))
        return out.numpy()

    def fit(self, seq: np.ndarray, static_pred: np.ndarray,
            y: np.ndarray) -> list[float]:
        torch, _ = self._torch()
        cfg = self.config
        # single-threaded keeps reductions ordered, so loss curves replay exactly
        torch.set_num_threads(1)
        self.net = self.net.double()
        self.net.train()
        seq_t = torch.as_tensor(seq, dtype=torch.float64)
        static_t = torch.as_tensor(static_pred, dtype=torch.float64)
        y_t = torch.as_tensor(y, dtype=torch.float64)
        optimizer = torch.optim.Adam(self.net.parameters(), lr=cfg.learning_rate)
        loss_fn = torch.nn.MSELoss()
        shuffler = torch.Generator().manual_seed(cfg.seed + 1)
        n = len(y)

        history = []
        for _ in range(cfg.epochs):
            order = torch.randperm(n, generator=shuffler)
            epoch_se = 0.0
            for start in range(0, n, cfg.batch_size):
                idx = order[start:start + cfg.batch_size]
                optimizer.zero_grad()
                loss = loss_fn(self.net(seq_t[idx], static_t[idx]), y_t[idx])
                loss.backward()
                optimizer.step()
                epoch_se += loss.item() * len(idx)
            history.append(epoch_se / n)
            if not np.isfinite(history[-1]):
                raise FittingError(f"non-finite training loss at epoch {len(history)}")
        return history

    def get_state(self) -> StateDict:
        return {k: v.detach().double().numpy().copy()
                for k, v in self.net.state_dict().items()}

    def load_state(self, state: StateDict):
        torch, _ = self._torch()
        self.net = self.net.double()
        tensors = {}
        for key, value in self.net.state_dict().items():
            if key not in state:
                raise KeyError(f"missing parameter {key}")
            arr = np.asarray(state[key], dtype=float)
            if arr.shape != tuple(value.shape):
                raise ValueError(f"{key}: expected shape {tuple(value.shape)}, got {arr.shape}")
            tensors[key] = torch.as_tensor(arr, dtype=torch.float64)
        self.net.load_state_dict(tensors)


_BACKENDS = {
    "bidirectional-recurrent": _RecurrentBackend,
    "linear-autoregressive": _LinearAutoregressiveBackend,
}


@dataclass
class FusionCore:
    """Encoder + head pair behind a backend-independent fit/predict API."""

    kind: str = "bidirectional-recurrent"
    config: FusionConfig = field(default_factory=FusionConfig)
    loss_history: list = field(default_factory=list)

    def __post_init__(self):
        if self.kind not in BACKEND_KINDS:
            raise ValueError(f"unknown encoder kind {self.kind!r}; known: {BACKEND_KINDS}")
        self._backend = _BACKENDS[self.kind](self.config)
        self._fitted = False

    @property
    def fitted(self) -> bool:
        return self._fitted

    def fit(self, seq_std: np.ndarray, static_std: np.ndarray,
            y: np.ndarray) -> "FusionCore":
        seq_std = np.asarray(seq_std, dtype=float)
        static_std = np.asarray(static_std, dtype=float)
        y = np.asarray(y, dtype=float)
        _validate_fusion_inputs(seq_std, static_std)
        if y.shape != static_std.shape:
            raise ValueError(f"target must be ({len(static_std)},), got {y.shape}")
        if not (np.isfinite(seq_std).all() and np.isfinite(static_std).all()
                and np.isfinite(y).all()):
            raise FittingError("non-finite values in fusion training data")

        self.loss_history = self._backend.fit(seq_std, static_std, y)
        if len(self.loss_history) >= 2 and self.loss_history[-1] > self.loss_history[0]:
            raise FittingError(
                f"training diverged: loss {self.loss_history[0]:.6g} -> "
                f"{self.loss_history[-1]:.6g}"
            )
        self._fitted = True
        return self

    def predict_raw(self, seq_std: np.ndarray, static_std: np.ndarray) -> np.ndarray:
        if not self._fitted:
            raise NotFittedError("fusion core used before fit")
        seq_std = np.asarray(seq_std, dtype=float)
        static_std = np.asarray(static_std, dtype=float)
        _validate_fusion_inputs(seq_std, static_std)
        return np.asarray(self._backend.predict_raw(seq_std, static_std), dtype=float)

    def get_state(self) -> StateDict:
        return self._backend.get_state()

    @classmethod
    def from_state(cls, kind: str, config: FusionConfig, state: StateDict,
                   loss_history: Sequence[float] = ()) -> "FusionCore":
        core = cls(kind=kind, config=config)
        core._backend.load_state(state)
        core.loss_history = list(loss_history)
        core._fitted = True
        return core

    # test access: gradient checking is only meaningful for the numpy backend
    def loss_and_gradients(self, seq_std, static_std, y):
        if self.kind != "linear-autoregressive":
            raise NotImplementedError("gradients exposed only for the numpy backend")
        return self._backend.loss_and_gradients(
            np.asarray(seq_std, dtype=float),
            np.asarray(static_std, dtype=float),
            np.asarray(y, dtype=float),
        )
