"""Extreme learning machine: a single-hidden-layer network with random,
fixed hidden parameters and output weights fitted by least squares."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

import numpy as np
from scipy.special import expit

from .numerics import ContractError, as_matrix, pseudoinverse

ACTIVATIONS = {
    "sigmoid": expit,
    "tanh": np.tanh,
    "hardlim": lambda z: (z >= 0.0).astype(float),
}


@dataclass(frozen=True)
class ElmConfig:
    hidden_count: int = 50
    activation: str = "sigmoid"
    input_weight_range: tuple[float, float] = (-1.0, 1.0)
    bias_range: tuple[float, float] = (0.0, 1.0)
    seed: int = 0

    def __post_init__(self):
        if self.hidden_count < 1:
            raise ContractError("hidden_count must be >= 1")
        if self.activation not in ACTIVATIONS:
            raise ContractError(f"unknown activation {self.activation!r}")
        for name in ("input_weight_range", "bias_range"):
            lo, hi = getattr(self, name)
            if not lo < hi:
                raise ContractError(f"{name}: lower bound must be < upper bound")


@dataclass(frozen=True, eq=False)
class ElmModel:
    """A trained network.

    ``input_weights`` is L x d (one row per hidden node), ``biases`` has
    length L and ``output_weights`` is L x m.
    """

    input_weights: np.ndarray
    biases: np.ndarray
    output_weights: np.ndarray
    activation: str = "sigmoid"
    seed: int | None = None

    def __post_init__(self):
        w = as_matrix(self.input_weights, "input_weights")
        b = np.asarray(self.biases, dtype=float).ravel()
        beta = as_matrix(self.output_weights, "output_weights")
        if b.shape[0] != w.shape[0] or beta.shape[0] != w.shape[0]:
            raise ContractError(
                f"inconsistent shapes: weights {w.shape}, biases {b.shape}, "
                f"output weights {beta.shape}"
            )
        if not np.all(np.isfinite(b)):
            raise ContractError("biases contain NaN or Inf")
        if self.activation not in ACTIVATIONS:
            raise ContractError(f"unknown activation {self.activation!r}")
        object.__setattr__(self, "input_weights", w)
        object.__setattr__(self, "biases", b)
        object.__setattr__(self, "output_weights", beta)

    @property
    def hidden_count(self) -> int:
        return self.input_weights.shape[0]

    @property
    def input_dim(self) -> int:
        return self.input_weights.shape[1]

    @property
    def output_dim(self) -> int:
        return self.output_weights.shape[1]

    def with_output_weights(self, beta) -> "ElmModel":
        return ElmModel(self.input_weights, self.biases, beta, self.activation, self.seed)

    def to_dict(self) -> dict[str, Any]:
        return {
            "activation": self.activation,
            "seed": self.seed,
            "hidden_count": self.hidden_count,
            "input_dim": self.input_dim,
            "output_dim": self.output_dim,
            "input_weights": self.input_weights.tolist(),
            "biases": self.biases.tolist(),
            "output_weights": self.output_weights.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "ElmModel":
        return cls(
            input_weights=np.array(d["input_weights"], dtype=float).reshape(
                d["hidden_count"], d["input_dim"]
            ),
            biases=np.array(d["biases"], dtype=float),
            output_weights=np.array(d["output_weights"], dtype=float).reshape(
                d["hidden_count"], d["output_dim"]
            ),
            activation=d["activation"],
            seed=d.get("seed"),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "ElmModel":
        return cls.from_dict(json.loads(text))


def _check_inputs(model: ElmModel, x) -> np.ndarray:
    x = as_matrix(x, "x")
    if x.shape[1] != model.input_dim:
        raise ContractError(
            f"x has {x.shape[1]} columns but the model expects {model.input_dim}"
        )
    return x


def elm_hidden_matrix(model: ElmModel, x) -> np.ndarray:
    """Hidden-layer output matrix H (N x L) for additive sigmoid-type nodes."""
    x = _check_inputs(model, x)
    return ACTIVATIONS[model.activation](x @ model.input_weights.T + model.biases)


def elm_train(x, t, cfg: ElmConfig = ElmConfig()) -> ElmModel:
    x = as_matrix(x, "x")
    t = as_matrix(t, "t")
    if x.shape[0] != t.shape[0]:
        raise ContractError(f"x has {x.shape[0]} rows but t has {t.shape[0]}")
    rng = np.random.default_rng(cfg.seed)
    d = x.shape[1]
    w = rng.uniform(*cfg.input_weight_range, size=(cfg.hidden_count, d))
    b = rng.uniform(*cfg.bias_range, size=cfg.hidden_count)
    untrained = ElmModel(w, b, np.zeros((cfg.hidden_count, t.shape[1])), cfg.activation, cfg.seed)
    h = elm_hidden_matrix(untrained, x)
    return untrained.with_output_weights(pseudoinverse(h) @ t)


def elm_predict(model: ElmModel, x) -> np.ndarray:
    return elm_hidden_matrix(model, x) @ model.output_weights
