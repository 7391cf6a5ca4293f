"""Multiresponse sparse regression (MRSR) and its single-target special case,
least angle regression (LARS).

The path ranks regressors by the order in which they join the active set.
``select_variables`` then picks how many of the top-ranked regressors to
keep by validation MSE along the path.
"""

from __future__ import annotations

import itertools
import json
import logging
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from .elm import ElmConfig, elm_predict, elm_train
from .numerics import ContractError, as_matrix, pseudoinverse

log = logging.getLogger(__name__)

TIE_RTOL = 1e-10
DENOM_ATOL = 1e-12


@dataclass(frozen=True)
class LarsStep:
    gamma: float
    weights: np.ndarray  # m x p, standardized coordinates
    c_max: float
    active: tuple[int, ...]


@dataclass(frozen=True)
class LarsPath:
    entry_order: list[int]
    steps: list[LarsStep]
    n_regressors: int
    n_targets: int
    excluded: list[int] = field(default_factory=list)
    x_mean: np.ndarray | None = None
    x_scale: np.ndarray | None = None
    t_mean: np.ndarray | None = None

    def predict(self, x, step: int) -> np.ndarray:
        """Evaluate ``X W^k`` for the path iterate after ``step``, mapped back
        to the caller's coordinates."""
        x = as_matrix(x, "x")
        z = (x - self.x_mean) / self.x_scale
        return z @ self.steps[step].weights + self.t_mean


@dataclass(frozen=True)
class VariableSelection:
    ranked: list[int]
    kept: list[int]
    k_star: int
    val_mse_curve: list[float]  # index k-1; inf where k is skipped by a tie
    excluded: list[int] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "ranked": list(self.ranked),
            "kept": list(self.kept),
            "k_star": self.k_star,
            "val_mse_curve": [None if not np.isfinite(v) else v for v in self.val_mse_curve],
            "excluded": list(self.excluded),
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "VariableSelection":
        return cls(
            ranked=list(d["ranked"]),
            kept=list(d["kept"]),
            k_star=d["k_star"],
            val_mse_curve=[np.inf if v is None else v for v in d["val_mse_curve"]],
            excluded=list(d.get("excluded", [])),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def identity(cls, d: int) -> "VariableSelection":
        """Keep every column; used when the LARS filter is switched off."""
        return cls(ranked=list(range(d)), kept=list(range(d)), k_star=d, val_mse_curve=[])


def cumulative_correlation(residual, x) -> np.ndarray:
    """``c_j = sum_i |r_i . x_j|`` -- the L1 norm over targets of each
    regressor's correlation with the residuals."""
    r = as_matrix(residual, "residual")
    x = as_matrix(x, "x")
    if r.shape[0] != x.shape[0]:
        raise ContractError(f"residual has {r.shape[0]} rows but x has {x.shape[0]}")
    return np.abs(x.T @ r).sum(axis=1)


def _sign_vectors(p: int) -> np.ndarray:
    return np.array(list(itertools.product((1.0, -1.0), repeat=p)))


def lars_step_size(c_max: float, a, b, inactive) -> tuple[float, list[int]]:
    """Smallest admissible step toward the OLS estimate at which an inactive
    regressor's cumulative correlation catches up with the active ones.

    ``a`` and ``b`` are p x |inactive| with column ``j`` holding
    ``(T - Y)^T x_j`` and ``(Ybar - Y)^T x_j`` for ``inactive[j]``.
    Returns ``(gamma, entering)``; ``(1.0, [])`` when nothing is inactive.
    """
    inactive = list(inactive)
    if not inactive:
        return 1.0, []
    a = np.asarray(a, dtype=float).reshape(-1, len(inactive))
    b = np.asarray(b, dtype=float).reshape(-1, len(inactive))
    if a.shape != b.shape:
        raise ContractError(f"a {a.shape} and b {b.shape} differ in shape")
    signs = _sign_vectors(a.shape[0])
    num = c_max + signs @ a
    den = c_max + signs @ b
    with np.errstate(divide="ignore", invalid="ignore"):
        cand = num / den
    ok = (np.abs(den) >= DENOM_ATOL) & (cand >= -1e-12) & (cand <= 1.0 + 1e-12)
    cand = np.where(ok, np.clip(cand, 0.0, 1.0), np.inf)
    per_j = cand.min(axis=0)
    gamma = float(per_j.min())
    if not np.isfinite(gamma):
        return 1.0, []
    hit = np.isclose(per_j, gamma, rtol=TIE_RTOL, atol=1e-14)
    return gamma, [inactive[j] for j in np.flatnonzero(hit)]


def _standardize(x: np.ndarray, t: np.ndarray):
    x_mean = x.mean(axis=0)
    x_scale = x.std(axis=0)
    t_mean = t.mean(axis=0)
    excluded = [int(j) for j in np.flatnonzero(x_scale <= 1e-12 * (1.0 + np.abs(x_mean)))]
    x_scale = np.where(x_scale <= 1e-12 * (1.0 + np.abs(x_mean)), 1.0, x_scale)
    z = (x - x_mean) / x_scale
    z[:, excluded] = 0.0
    return z, t - t_mean, x_mean, x_scale, t_mean, excluded


def mrsr_path(x, t) -> LarsPath:
    """Full MRSR path; centers ``t`` and ``x`` and scales ``x`` columns to
    unit standard deviation before running.

    Constant columns are left out of the ranking and listed in
    ``LarsPath.excluded``.
    """
    x = as_matrix(x, "x")
    t = as_matrix(t, "t")
    if x.shape[0] != t.shape[0]:
        raise ContractError(f"x has {x.shape[0]} rows but t has {t.shape[0]}")
    n, m = x.shape
    p = t.shape[1]
    z, tc, x_mean, x_scale, t_mean, excluded = _standardize(x, t)
    if excluded:
        log.warning("mrsr_path: constant columns %s excluded from ranking", excluded)
    candidates = [j for j in range(m) if j not in excluded]

    y = np.zeros((n, p))
    w = np.zeros((m, p))
    steps: list[LarsStep] = []
    order: list[int] = []
    if not candidates:
        return LarsPath(order, steps, m, p, excluded, x_mean, x_scale, t_mean)

    c = cumulative_correlation(tc, z[:, candidates])
    c_max = float(c.max())
    if c_max <= 0.0:
        entering = list(candidates)
    else:
        entering = [candidates[j] for j in np.flatnonzero(c >= c_max * (1.0 - TIE_RTOL))]

    while entering:
        order.extend(sorted(entering))
        active = list(order)
        inactive = [j for j in candidates if j not in active]

        x_a = z[:, active]
        w_bar_a = pseudoinverse(x_a) @ tc
        y_bar = x_a @ w_bar_a
        r = tc - y
        c_max = float(cumulative_correlation(r, x_a).max())

        if c_max <= 0.0:
            # residual already orthogonal to everything left; finish at OLS
            gamma, entering = 1.0, list(inactive)
        else:
            a = r.T @ z[:, inactive] if inactive else np.zeros((p, 0))
            b = (y_bar - y).T @ z[:, inactive] if inactive else np.zeros((p, 0))
            gamma, entering = lars_step_size(c_max, a, b, inactive)
            if inactive and not entering:
                # no admissible crossing in [0, 1]: the remainder only enters
                # after the active OLS fit is reached
                remaining_c = cumulative_correlation(tc - y_bar, z[:, inactive])
                entering = [inactive[int(np.argmax(remaining_c))]]

        w_bar = np.zeros((m, p))
        w_bar[active] = w_bar_a
        y = y + gamma * (y_bar - y)
        w = (1.0 - gamma) * w + gamma * w_bar
        steps.append(LarsStep(gamma, w.copy(), c_max, tuple(active)))

    return LarsPath(order, steps, m, p, excluded, x_mean, x_scale, t_mean)


def _prefix_scores_path(path: LarsPath, x_val, t_val, n_ranked: int) -> list[float]:
    curve = [np.inf] * n_ranked
    for i, step in enumerate(path.steps):
        k = len(step.active)
        err = float(np.mean((path.predict(x_val, i) - t_val) ** 2))
        curve[k - 1] = min(curve[k - 1], err)
    return curve


def _prefix_scores_elm(ranked, x_fit, t_fit, x_val, t_val, elm: ElmConfig, repeats: int) -> list[float]:
    mu = x_fit.mean(axis=0)
    sd = x_fit.std(axis=0)
    sd = np.where(sd > 0.0, sd, 1.0)
    z_fit = (x_fit - mu) / sd
    z_val = (x_val - mu) / sd
    curve = []
    for k in range(1, len(ranked) + 1):
        cols = ranked[:k]
        errs = []
        for r in range(repeats):
            model = elm_train(z_fit[:, cols], t_fit, replace(elm, seed=elm.seed + r))
            errs.append(np.mean((elm_predict(model, z_val[:, cols]) - t_val) ** 2))
        curve.append(float(np.mean(errs)))
    return curve


def select_variables(
    x,
    t,
    val_fraction: float = 0.25,
    seed: int = 0,
    scorer: str = "elm",
    elm: ElmConfig = ElmConfig(),
    repeats: int = 3,
) -> VariableSelection:
    """Rank columns with ``mrsr_path`` on a fit split and keep the prefix with
    the lowest validation MSE (ties go to the shorter prefix).

    ``scorer="elm"`` scores each prefix by an ELM refitted on those columns
    (mean over ``repeats`` hidden-layer draws). ``scorer="path"`` scores the
    linear path iterate ``X W^k`` instead; it is cheaper but cannot tell a
    nonlinear signal from an irrelevant column.
    """
    x = as_matrix(x, "x")
    t = as_matrix(t, "t")
    if not 0.0 < val_fraction < 1.0:
        raise ContractError("val_fraction must lie in (0, 1)")
    if scorer not in ("elm", "path"):
        raise ContractError(f"unknown scorer {scorer!r}")
    n, m = x.shape
    if x.shape[0] != t.shape[0]:
        raise ContractError(f"x has {n} rows but t has {t.shape[0]}")
    n_val = int(round(n * val_fraction))
    if n_val < 1 or n - n_val < 2:
        raise ContractError(f"{n} rows are too few for a fit/validation split")

    perm = np.random.default_rng(seed).permutation(n)
    val, fit = perm[:n_val], perm[n_val:]
    path = mrsr_path(x[fit], t[fit])
    ranked = list(path.entry_order)
    if not ranked:
        raise ContractError("no usable (non-constant) columns to select from")

    if scorer == "path":
        curve = _prefix_scores_path(path, x[val], t[val], len(ranked))
    else:
        curve = _prefix_scores_elm(ranked, x[fit], t[fit], x[val], t[val], elm, repeats)
    k_star = int(np.argmin(curve)) + 1
    return VariableSelection(ranked, ranked[:k_star], k_star, curve, list(path.excluded))
