"""LARSEN-ELM: LARS variable filtering, bagged ELM members and GASEN
member selection. With ``lars_enabled=False`` the same code path gives the
GASEN-ELM ablation."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace
from typing import Any

import numpy as np

from .elm import ElmConfig, ElmModel, elm_predict, elm_train
from .gasen import GaConfig, GasenResult, gasen_select
from .mrsr import VariableSelection, select_variables
from .numerics import ContractError, as_matrix


@dataclass(frozen=True)
class LarsenConfig:
    n_members: int = 20
    lam: float = 0.05
    elm: ElmConfig = field(default_factory=ElmConfig)
    ga: GaConfig = field(default_factory=GaConfig)
    lars_enabled: bool = True
    val_fraction: float = 0.25
    scorer: str = "elm"
    seed: int = 0

    def __post_init__(self):
        if self.n_members < 1:
            raise ContractError("n_members must be >= 1")
        if not 0.0 < self.lam < 1.0:
            raise ContractError("lambda must lie in (0, 1)")

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["elm"]["input_weight_range"] = list(self.elm.input_weight_range)
        d["elm"]["bias_range"] = list(self.elm.bias_range)
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "LarsenConfig":
        d = dict(d)
        elm = dict(d.pop("elm"))
        elm["input_weight_range"] = tuple(elm["input_weight_range"])
        elm["bias_range"] = tuple(elm["bias_range"])
        return cls(elm=ElmConfig(**elm), ga=GaConfig(**d.pop("ga")), **d)


@dataclass(frozen=True, eq=False)
class EnsembleModel:
    selection: VariableSelection
    members: list[ElmModel]
    bag_indices: list[np.ndarray]
    selected: list[int]
    config: LarsenConfig
    input_dim: int
    gasen: GasenResult | None = field(default=None, repr=False)

    def __post_init__(self):
        if not self.selected or not set(self.selected) <= set(range(len(self.members))):
            raise ContractError(f"invalid selected set {self.selected}")
        for m in self.members:
            if m.input_dim != len(self.selection.kept):
                raise ContractError("member input_dim does not match the kept columns")

    def to_dict(self) -> dict[str, Any]:
        return {
            "input_dim": self.input_dim,
            "config": self.config.to_dict(),
            "selection": self.selection.to_dict(),
            "selected": list(self.selected),
            "bag_indices": [b.tolist() for b in self.bag_indices],
            "members": [m.to_dict() for m in self.members],
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "EnsembleModel":
        return cls(
            selection=VariableSelection.from_dict(d["selection"]),
            members=[ElmModel.from_dict(m) for m in d["members"]],
            bag_indices=[np.array(b, dtype=int) for b in d["bag_indices"]],
            selected=list(d["selected"]),
            config=LarsenConfig.from_dict(d["config"]),
            input_dim=d["input_dim"],
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "EnsembleModel":
        return cls.from_dict(json.loads(text))


def bag_sample(n_rows: int, rng: np.random.Generator) -> np.ndarray:
    """Bootstrap: ``n_rows`` indices drawn uniformly with replacement."""
    if n_rows < 1:
        raise ContractError("n_rows must be >= 1")
    return rng.integers(0, n_rows, size=n_rows)


def out_of_bag(n_rows: int, bag: np.ndarray) -> np.ndarray:
    return np.setdiff1d(np.arange(n_rows), bag)


def _seeds(master: int, n: int) -> list[int]:
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(master).spawn(n)]


def larsen_fit(x, y, cfg: LarsenConfig = LarsenConfig()) -> EnsembleModel:
    x = as_matrix(x, "x")
    y = as_matrix(y, "y")
    if y.shape[1] != 1:
        raise ContractError("larsen_fit expects a single target column")
    if x.shape[0] != y.shape[0]:
        raise ContractError(f"x has {x.shape[0]} rows but y has {y.shape[0]}")
    n, d = x.shape
    lars_seed, bag_seed, ga_seed, *member_seeds = _seeds(cfg.seed, 3 + cfg.n_members)

    if cfg.lars_enabled:
        selection = select_variables(
            x, y, cfg.val_fraction, seed=lars_seed, scorer=cfg.scorer,
            elm=replace(cfg.elm, seed=lars_seed),
        )
        if not selection.kept:
            raise ContractError("variable selection kept no columns")
    else:
        selection = VariableSelection.identity(d)
    xk = x[:, selection.kept]

    bag_rng = np.random.default_rng(bag_seed)
    members, bags = [], []
    for s in member_seeds:
        bag = bag_sample(n, bag_rng)
        members.append(elm_train(xk[bag], y[bag], replace(cfg.elm, seed=s)))
        bags.append(bag)

    result = gasen_select(members, xk, y, cfg.lam, replace(cfg.ga, seed=ga_seed))
    return EnsembleModel(selection, members, bags, result.selected, cfg, d, result)


def larsen_predict(model: EnsembleModel, x) -> np.ndarray:
    x = as_matrix(x, "x")
    if x.shape[1] != model.input_dim:
        raise ContractError(f"x has {x.shape[1]} columns, model expects {model.input_dim}")
    xk = x[:, model.selection.kept]
    return np.mean([elm_predict(model.members[i], xk) for i in model.selected], axis=0)
