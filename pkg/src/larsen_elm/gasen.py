"""Genetic-algorithm selective ensemble (GASEN).

A real-coded GA evolves one weight per ensemble member. Fitness is the
inverse of the weighted ensemble's validation error, expressed through the
member error-correlation matrix ``C`` as ``w^T C w``. After evolution the
winning vector is normalized and members whose weight exceeds a threshold
are kept; the final ensemble averages them without weights.
"""

from __future__ import annotations

import io
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .elm import elm_predict
from .numerics import ContractError, as_matrix, pseudoinverse

ILL_CONDITIONED = 1e12


class IllConditionedWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class GaConfig:
    population: int = 20
    generations: int = 100
    crossover_fraction: float = 0.8
    mutation_rate: float = 0.05
    elitism: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.population < 2:
            raise ContractError("population must be >= 2")
        if self.generations < 1:
            raise ContractError("generations must be >= 1")
        if not 0.0 < self.crossover_fraction < 1.0:
            raise ContractError("crossover_fraction must lie in (0, 1)")
        if not 0.0 < self.mutation_rate < 1.0:
            raise ContractError("mutation_rate must lie in (0, 1)")
        if not 0 <= self.elitism < self.population:
            raise ContractError("elitism must be in [0, population)")


@dataclass(frozen=True)
class GaResult:
    best: np.ndarray  # raw genes of the best individual ever seen
    best_fitness: float
    trace: list[float]  # best-so-far fitness, generation 0 first

    def trace_csv(self) -> str:
        buf = io.StringIO()
        buf.write("generation,best_fitness\n")
        for g, f in enumerate(self.trace):
            buf.write(f"{g},{f!r}\n")
        return buf.getvalue()


@dataclass(frozen=True)
class ClosedFormWeights:
    weights: np.ndarray
    condition: float

    @property
    def ill_conditioned(self) -> bool:
        return not self.condition < ILL_CONDITIONED


@dataclass(frozen=True)
class GasenResult:
    selected: list[int]
    weights: np.ndarray  # normalized GA winner
    correlation: np.ndarray
    ga: GaResult = field(repr=False)


def normalize_weights(w) -> np.ndarray:
    w = np.asarray(w, dtype=float).ravel()
    total = w.sum()
    if not total > 0.0:
        raise ContractError("cannot normalize a weight vector whose sum is not positive")
    return w / total


def correlation_matrix(predictions, targets) -> np.ndarray:
    """Empirical member error correlation ``C_ij = mean((f_i - y)(f_j - y))``.

    ``predictions`` is either a sequence of per-member column vectors or an
    n_rows x n_members matrix.
    """
    y = as_matrix(targets, "targets")
    if y.shape[1] != 1:
        raise ContractError("targets must be a single column")
    if isinstance(predictions, np.ndarray) and predictions.ndim == 2:
        f = as_matrix(predictions, "predictions")
    else:
        cols = [as_matrix(p, f"prediction {i}") for i, p in enumerate(predictions)]
        for i, col in enumerate(cols):
            if col.shape != y.shape:
                raise ContractError(
                    f"member {i} predictions have shape {col.shape}, targets {y.shape}"
                )
        f = np.hstack(cols)
    if f.shape[0] != y.shape[0]:
        raise ContractError(f"predictions have {f.shape[0]} rows, targets {y.shape[0]}")
    e = f - y
    c = e.T @ e / e.shape[0]
    return (c + c.T) / 2.0


def ensemble_error(w, c) -> float:
    w = np.asarray(w, dtype=float).ravel()
    c = np.asarray(c, dtype=float)
    if c.shape != (w.size, w.size):
        raise ContractError(f"weights of length {w.size} do not match C of shape {c.shape}")
    return float(w @ c @ w)


def optimal_weights_closed_form(c) -> ClosedFormWeights:
    """Unconstrained minimizer of ``w^T C w`` subject to ``sum(w) = 1``:
    row sums of ``C^-1`` over its grand sum.

    Only meaningful for small, well-conditioned ``C``; used to check the GA.
    """
    c = as_matrix(c, "C")
    if c.shape[0] != c.shape[1]:
        raise ContractError(f"C must be square, got {c.shape}")
    cond = float(np.linalg.cond(c))
    if not cond < ILL_CONDITIONED:
        warnings.warn(
            f"correlation matrix is ill-conditioned (cond={cond:.3g})",
            IllConditionedWarning,
            stacklevel=2,
        )
    c_inv = pseudoinverse(c)
    return ClosedFormWeights(c_inv.sum(axis=1) / c_inv.sum(), cond)


def _roulette(rng: np.random.Generator, fit: np.ndarray, k: int) -> np.ndarray:
    total = fit.sum()
    if not np.isfinite(total) or total <= 0.0:
        return rng.integers(0, fit.size, size=k)
    return rng.choice(fit.size, size=k, p=fit / total)


def ga_evolve(
    fitness: Callable[[np.ndarray], float],
    n_members: int,
    cfg: GaConfig = GaConfig(),
) -> GaResult:
    """Maximize ``fitness`` over genes in [0, 1]^n_members.

    Each generation keeps ``cfg.elitism`` best individuals unchanged, draws
    the rest of the survivors by fitness-proportional selection, fills
    ``crossover_fraction`` of the population with arithmetic-crossover
    offspring of roulette-selected parents, and resamples each non-elite
    gene with probability ``mutation_rate``.
    """
    if n_members < 1:
        raise ContractError("n_members must be >= 1")
    rng = np.random.default_rng(cfg.seed)
    p = cfg.population
    n_cross = int(round(cfg.crossover_fraction * p))
    n_cross = min(n_cross, p - cfg.elitism)
    n_keep = p - cfg.elitism - n_cross

    def repair(pop):
        dead = ~(pop.sum(axis=1) > 0.0)
        while dead.any():
            pop[dead] = rng.uniform(size=(int(dead.sum()), n_members))
            dead = ~(pop.sum(axis=1) > 0.0)
        return pop

    def evaluate(pop):
        return np.array([float(fitness(ind)) for ind in pop])

    pop = repair(rng.uniform(size=(p, n_members)))
    fit = evaluate(pop)
    i = int(np.argmax(fit))
    best, best_fit = pop[i].copy(), float(fit[i])
    trace = [best_fit]

    for _ in range(cfg.generations):
        elite = pop[np.argsort(-fit, kind="stable")[: cfg.elitism]]
        kept = pop[_roulette(rng, fit, n_keep)]
        parents = pop[_roulette(rng, fit, 2 * ((n_cross + 1) // 2))].reshape(-1, 2, n_members)
        alpha = rng.uniform(size=(parents.shape[0], 1))
        u, v = parents[:, 0], parents[:, 1]
        children = np.vstack([alpha * u + (1 - alpha) * v, (1 - alpha) * u + alpha * v])[:n_cross]

        offspring = np.vstack([kept, children])
        mask = rng.uniform(size=offspring.shape) < cfg.mutation_rate
        offspring = np.where(mask, rng.uniform(size=offspring.shape), offspring)
        pop = repair(np.vstack([elite, offspring]))
        fit = evaluate(pop)

        i = int(np.argmax(fit))
        if fit[i] > best_fit:
            best, best_fit = pop[i].copy(), float(fit[i])
        trace.append(best_fit)

    return GaResult(best, best_fit, trace)


def gasen_fitness(c: np.ndarray) -> Callable[[np.ndarray], float]:
    tiny = np.finfo(float).tiny

    def fitness(w):
        return 1.0 / max(ensemble_error(normalize_weights(w), c), tiny)

    return fitness


def gasen_select_predictions(
    predictions, targets, lam: float = 0.05, cfg: GaConfig = GaConfig()
) -> GasenResult:
    """GASEN on precomputed member predictions (n_rows x n_members)."""
    if not 0.0 < lam < 1.0:
        raise ContractError("threshold lambda must lie in (0, 1)")
    c = correlation_matrix(predictions, targets)
    n = c.shape[0]
    if n == 1:
        ga = GaResult(np.ones(1), gasen_fitness(c)(np.ones(1)), [])
        return GasenResult([0], np.ones(1), c, ga)
    ga = ga_evolve(gasen_fitness(c), n, cfg)
    w = normalize_weights(ga.best)
    selected = [int(i) for i in np.flatnonzero(w > lam)]
    if not selected:
        selected = [int(np.argmax(w))]
    return GasenResult(selected, w, c, ga)


def gasen_select(
    members: Sequence, validation_x, validation_y, lam: float = 0.05, cfg: GaConfig = GaConfig()
) -> GasenResult:
    """Select ensemble members; ``members`` are trained ``ElmModel`` objects."""
    if not members:
        raise ContractError("gasen_select needs at least one member")
    y = as_matrix(validation_y, "validation_y")
    preds = np.hstack([elm_predict(m, validation_x) for m in members])
    return gasen_select_predictions(preds, y, lam, cfg)
