"""Continuous-domain Harris Hawks Optimizer.

The optimizer minimizes a scalar objective over a box.  Each iteration
evaluates the whole swarm in hawk-index order, promotes the best hawk to
prey, then moves every hawk with one of five rules chosen by the escaping
energy ``E`` and the escape draw ``r``:

* ``|E| >= 1``: perching, :func:`exploration_move`
* ``r >= 0.5`` and ``|E| >= 0.5``: :func:`soft_besiege`
* ``r >= 0.5`` and ``|E| < 0.5``: :func:`hard_besiege`
* ``r < 0.5`` and ``|E| >= 0.5``: :func:`soft_besiege_dives`
* ``r < 0.5`` and ``|E| < 0.5``: :func:`hard_besiege_dives`

Every produced position is clipped to the box.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

__all__ = [
    "Bounds",
    "SwarmConfig",
    "Hawk",
    "SwarmState",
    "OptimizeResult",
    "initialize_swarm",
    "prey_energy",
    "mean_position",
    "exploration_move",
    "soft_besiege",
    "hard_besiege",
    "levy_sigma",
    "levy_step",
    "levy_flight",
    "soft_besiege_dives",
    "hard_besiege_dives",
    "select_move",
    "optimize",
]

Objective = Callable[[np.ndarray], float]

_MAX_SEED = 2**64


@dataclass(frozen=True)
class Bounds:
    """Per-dimension box ``[lower, upper]``."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.atleast_1d(np.asarray(self.lower, dtype=float)).copy()
        upper = np.atleast_1d(np.asarray(self.upper, dtype=float)).copy()
        if lower.ndim != 1 or lower.shape != upper.shape:
            raise ValueError(
                f"lower and upper must be 1-d of equal length, got {lower.shape} and {upper.shape}"
            )
        if lower.size == 0:
            raise ValueError("bounds need at least one dimension")
        if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
            raise ValueError("bounds must be finite")
        if np.any(lower >= upper):
            bad = np.flatnonzero(lower >= upper).tolist()
            raise ValueError(f"lower must be strictly below upper; violated in dims {bad}")
        lower.flags.writeable = False
        upper.flags.writeable = False
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def uniform(cls, low: float, high: float, dim: int) -> "Bounds":
        if dim < 1:
            raise ValueError(f"dim must be >= 1, got {dim}")
        return cls(np.full(dim, float(low)), np.full(dim, float(high)))

    @property
    def dim(self) -> int:
        return self.lower.size

    def clip(self, x: np.ndarray) -> np.ndarray:
        return np.clip(x, self.lower, self.upper)

    def contains(self, x: np.ndarray) -> bool:
        x = np.asarray(x)
        return bool(np.all(x >= self.lower) and np.all(x <= self.upper))


@dataclass(frozen=True)
class SwarmConfig:
    """Run parameters: swarm size ``N``, iteration budget ``T`` and seed."""

    population_size: int = 10
    max_iterations: int = 30
    seed: int = 0
    levy_beta: float = 1.5

    def __post_init__(self):
        if int(self.population_size) != self.population_size or self.population_size < 2:
            raise ValueError(f"population_size must be an integer >= 2, got {self.population_size}")
        if int(self.max_iterations) != self.max_iterations or self.max_iterations < 1:
            raise ValueError(f"max_iterations must be an integer >= 1, got {self.max_iterations}")
        if int(self.seed) != self.seed or not 0 <= self.seed < _MAX_SEED:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if not 0 < self.levy_beta <= 2:
            raise ValueError(f"levy_beta must lie in (0, 2], got {self.levy_beta}")


@dataclass
class Hawk:
    position: np.ndarray
    fitness: float | None = None


@dataclass
class SwarmState:
    """Mutable state of one optimization run.

    ``positions`` is an ``(N, dim)`` array, one row per hawk; ``fitness``
    holds the matching objective values (``nan`` until evaluated).
    """

    positions: np.ndarray
    fitness: np.ndarray
    prey: Hawk
    rng: np.random.Generator
    iteration: int = 0
    _mean: np.ndarray | None = field(default=None, repr=False)

    @property
    def hawks(self) -> list[Hawk]:
        return [Hawk(p.copy(), None if np.isnan(f) else float(f))
                for p, f in zip(self.positions, self.fitness)]

    @property
    def mean(self) -> np.ndarray:
        if self._mean is None:
            self._mean = mean_position(self.positions)
        return self._mean

    def set_positions(self, positions: np.ndarray) -> None:
        self.positions = positions
        self.fitness = np.full(len(positions), np.nan)
        self._mean = None


class OptimizeResult(NamedTuple):
    best_position: np.ndarray
    best_fitness: float
    history: list[float]


def initialize_swarm(config: SwarmConfig, bounds: Bounds, dim: int) -> SwarmState:
    """Draw ``N`` hawks uniformly inside ``bounds``."""
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    if dim != bounds.dim:
        raise ValueError(f"dim={dim} does not match bounds dimensionality {bounds.dim}")
    rng = np.random.default_rng(config.seed)
    unit = rng.random((config.population_size, dim))
    positions = bounds.lower + unit * (bounds.upper - bounds.lower)
    positions = bounds.clip(positions)
    return SwarmState(
        positions=positions,
        fitness=np.full(config.population_size, np.nan),
        prey=Hawk(positions[0].copy(), None),
        rng=rng,
    )


def prey_energy(e0: float, iteration: int, max_iterations: int) -> float:
    """Escaping energy ``2 * e0 * (1 - iteration / max_iterations)``."""
    if not 0 <= iteration <= max_iterations:
        raise ValueError(f"iteration {iteration} outside [0, {max_iterations}]")
    return 2.0 * e0 * (1.0 - iteration / max_iterations)


def mean_position(hawks: Sequence[Hawk] | np.ndarray) -> np.ndarray:
    if isinstance(hawks, np.ndarray):
        positions = np.atleast_2d(hawks)
    else:
        positions = np.array([h.position for h in hawks], dtype=float)
    if positions.size == 0 or len(positions) == 0:
        raise ValueError("cannot average an empty swarm")
    return positions.mean(axis=0)


def exploration_move(position: np.ndarray, state: SwarmState, bounds: Bounds) -> np.ndarray:
    """Perching step used while ``|E| >= 1``.

    With ``q >= 0.5`` the hawk perches relative to a random swarm member
    (which may be itself); otherwise it perches at a random site between
    the prey and the swarm mean.
    """
    rng = state.rng
    q = rng.random()
    if q >= 0.5:
        other = state.positions[rng.integers(len(state.positions))]
        r1, r2 = rng.random(), rng.random()
        new = other - r1 * np.abs(other - 2.0 * r2 * position)
    else:
        r3, r4 = rng.random(), rng.random()
        new = (state.prey.position - state.mean) - r3 * (
            bounds.lower + r4 * (bounds.upper - bounds.lower)
        )
    return bounds.clip(new)


def soft_besiege(position: np.ndarray, prey: np.ndarray, energy: float, jump: float) -> np.ndarray:
    delta = prey - position
    return delta - energy * np.abs(jump * prey - position)


def hard_besiege(position: np.ndarray, prey: np.ndarray, energy: float) -> np.ndarray:
    return prey - energy * (prey - position)


def levy_sigma(beta: float = 1.5) -> float:
    """Mantegna scale for the numerator draw of a Lévy step."""
    num = math.gamma(1.0 + beta) * math.sin(math.pi * beta / 2.0)
    den = math.gamma((1.0 + beta) / 2.0) * beta * 2.0 ** ((beta - 1.0) / 2.0)
    return (num / den) ** (1.0 / beta)


def levy_step(u: np.ndarray, v: np.ndarray, beta: float = 1.5) -> np.ndarray:
    """``0.01 * u * sigma / |v| ** (1 / beta)`` for given normal draws."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return 0.01 * u * levy_sigma(beta) / np.abs(v) ** (1.0 / beta)


def levy_flight(dim: int, beta: float, rng: np.random.Generator) -> np.ndarray:
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    if not 0 < beta <= 2:
        raise ValueError(f"beta must lie in (0, 2], got {beta}")
    u = rng.standard_normal(dim)
    v = rng.standard_normal(dim)
    return levy_step(u, v, beta)


def _dive(anchor, position, fitness, state, energy, jump, objective, bounds, beta):
    prey = state.prey.position
    y = bounds.clip(prey - energy * np.abs(jump * prey - anchor))
    size = state.rng.random(len(y))
    z = bounds.clip(y + size * levy_flight(len(y), beta, state.rng))
    if _evaluate(objective, y) < fitness:
        return y
    if _evaluate(objective, z) < fitness:
        return z
    return position


def soft_besiege_dives(
    position: np.ndarray,
    fitness: float,
    state: SwarmState,
    energy: float,
    jump: float,
    objective: Objective,
    bounds: Bounds,
    beta: float = 1.5,
) -> np.ndarray:
    """Soft besiege with progressive rapid dives.

    Tries ``Y`` then the Lévy-perturbed ``Z``; the first one that beats the
    hawk's current ``fitness`` wins, otherwise the hawk stays put.
    """
    return _dive(position, position, fitness, state, energy, jump, objective, bounds, beta)


def hard_besiege_dives(
    position: np.ndarray,
    fitness: float,
    state: SwarmState,
    energy: float,
    jump: float,
    objective: Objective,
    bounds: Bounds,
    beta: float = 1.5,
) -> np.ndarray:
    """Like :func:`soft_besiege_dives` but ``Y`` is built from the swarm mean."""
    return _dive(state.mean, position, fitness, state, energy, jump, objective, bounds, beta)


def select_move(energy: float, r: float | None = None) -> str:
    """Name of the move taken for escaping energy ``energy`` and escape draw ``r``."""
    e = abs(energy)
    if e >= 1:
        return "exploration"
    if r is None:
        raise ValueError("r is required when |energy| < 1")
    if r >= 0.5:
        return "soft_besiege" if e >= 0.5 else "hard_besiege"
    return "soft_besiege_dives" if e >= 0.5 else "hard_besiege_dives"


def _evaluate(objective: Objective, x: np.ndarray) -> float:
    value = float(objective(x))
    if math.isnan(value):
        raise ValueError("objective returned NaN")
    return value


def _evaluate_swarm(state: SwarmState, objective: Objective) -> None:
    state.fitness = np.array([_evaluate(objective, p) for p in state.positions])
    best = int(np.argmin(state.fitness))
    # strict improvement only: the incumbent wins ties
    if state.prey.fitness is None or state.fitness[best] < state.prey.fitness:
        state.prey = Hawk(state.positions[best].copy(), float(state.fitness[best]))


def optimize(objective: Objective, config: SwarmConfig, bounds: Bounds) -> OptimizeResult:
    """Minimize ``objective`` over ``bounds``.

    Returns the best position found, its fitness and the best-so-far
    fitness after the evaluation phase of every iteration (length ``T``).
    """
    obj_dim = getattr(objective, "dim", None)
    if obj_dim is not None and obj_dim != bounds.dim:
        raise ValueError(f"objective dim {obj_dim} does not match bounds dim {bounds.dim}")

    state = initialize_swarm(config, bounds, bounds.dim)
    rng = state.rng
    T = config.max_iterations
    history: list[float] = []

    for t in range(T):
        state.iteration = t
        _evaluate_swarm(state, objective)
        history.append(state.prey.fitness)

        new_positions = state.positions.copy()
        for i, (position, fitness) in enumerate(zip(state.positions, state.fitness)):
            e0 = 2.0 * rng.random() - 1.0
            jump = 2.0 * (1.0 - rng.random())
            energy = prey_energy(e0, t, T)
            if abs(energy) >= 1:
                new_positions[i] = exploration_move(position, state, bounds)
                continue
            move = select_move(energy, rng.random())
            if move == "soft_besiege":
                new = soft_besiege(position, state.prey.position, energy, jump)
            elif move == "hard_besiege":
                new = hard_besiege(position, state.prey.position, energy)
            elif move == "soft_besiege_dives":
                new = soft_besiege_dives(position, fitness, state, energy, jump,
                                         objective, bounds, config.levy_beta)
            else:
                new = hard_besiege_dives(position, fitness, state, energy, jump,
                                         objective, bounds, config.levy_beta)
            new_positions[i] = bounds.clip(new)
        state.set_positions(new_positions)

    return OptimizeResult(state.prey.position.copy(), float(state.prey.fitness), history)
