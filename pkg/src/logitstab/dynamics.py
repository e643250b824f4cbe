"""Finite-noise machinery: logit choice, revision processes, the exact
transition matrix, its stationary distribution, and a seeded simulator.

Utilities are exact rationals; this module is the only place where floats
appear (the chain at finite beta is inherently transcendental).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import EmptyStrategySet, InvalidParams, ReducibleChain, SolveFailure
from .games import Game, GameTable

DEFAULT_BETA_LADDER = (4.0, 8.0, 16.0, 32.0, 64.0)
DEFAULT_SLOPE_TOL = 1e-3


@dataclass(frozen=True)
class RevisionProcess:
    """Distribution q over revising player subsets.

    kind "asynchronous": singletons, uniform 1/n each.
    kind "independent": q(J) = p^|J| (1-p)^(n-|J|), every subset feasible.
    kind "custom": explicit (subset, probability) support.
    """

    kind: str
    p: Optional[Fraction] = None
    support: Optional[tuple[tuple[frozenset, Fraction], ...]] = None

    @classmethod
    def asynchronous(cls) -> "RevisionProcess":
        return cls(kind="asynchronous")

    @classmethod
    def independent(cls, p: Fraction = Fraction(1, 2)) -> "RevisionProcess":
        p = Fraction(p)
        if not 0 < p < 1:
            raise InvalidParams("independent learning needs p in (0, 1)")
        return cls(kind="independent", p=p)

    @classmethod
    def custom(cls, pairs: Iterable[tuple[Iterable[int], Fraction]]) -> "RevisionProcess":
        support = tuple((frozenset(players), Fraction(q)) for players, q in pairs)
        total = sum((q for _, q in support), Fraction(0))
        if total != 1:
            raise InvalidParams(f"custom revision probabilities sum to {total}, not 1")
        if any(q <= 0 for _, q in support):
            raise InvalidParams("custom revision support must have positive probabilities")
        return cls(kind="custom", support=support)

    def is_feasible(self, movers: frozenset) -> bool:
        """Is some subset with q(J) > 0 a superset of the deviating players?"""
        if self.kind == "independent":
            return True
        if self.kind == "asynchronous":
            return len(movers) <= 1
        return any(movers <= J for J, _ in self.support)

    def feasible_supersets(self, movers: frozenset) -> list[frozenset]:
        """Candidate subsets for the waste minimization (supersets of movers).

        Under independent learning every extra member contributes a
        nonnegative regret term, so the deviation set itself suffices.
        """
        if self.kind == "independent":
            return [movers]
        if self.kind == "asynchronous":
            return [movers] if len(movers) == 1 else []
        return [J for J, _ in self.support if movers <= J]


def parse_revision(name: str, p: Fraction = Fraction(1, 2)) -> RevisionProcess:
    name = name.lower()
    if name in ("independent", "ind"):
        return RevisionProcess.independent(p)
    if name in ("asynchronous", "async"):
        return RevisionProcess.asynchronous()
    raise InvalidParams(f"unknown revision process {name!r}")


@dataclass(frozen=True)
class DynamicsConfig:
    beta: float
    revision: RevisionProcess

    def __post_init__(self):
        if not np.isfinite(self.beta) or self.beta < 0:
            raise InvalidParams("beta must be a finite nonnegative float")


def logit_choice(utilities: Sequence[Fraction], beta: float) -> np.ndarray:
    """Softmax of beta * u, computed in the log domain with a max shift."""
    if len(utilities) == 0:
        raise EmptyStrategySet("logit choice over an empty strategy set")
    x = beta * np.array([float(u) for u in utilities])
    x -= x.max()
    w = np.exp(x)
    return w / w.sum()


def _logit_tables(table: GameTable, beta: float) -> list[list[np.ndarray]]:
    """probs[sid][i] = logit distribution of player i's next strategy at state sid."""
    game = table.game
    probs = []
    for sid in range(game.n_states):
        prof = game.unpack(sid)
        row = []
        for i in range(game.n_players):
            base = sid - prof[i] * game.strides[i]
            utils = [
                table.U[base + a * game.strides[i]][i] for a in range(game.strategy_counts[i])
            ]
            row.append(logit_choice(utils, beta))
        probs.append(row)
    return probs


@dataclass
class TransitionMatrix:
    P: np.ndarray
    beta: float
    revision: RevisionProcess


def transition_matrix(game: Game, config: DynamicsConfig, table: GameTable | None = None) -> TransitionMatrix:
    """Dense row-stochastic chain over state ids."""
    game.check_cap()
    table = table or GameTable(game)
    probs = _logit_tables(table, config.beta)
    ns, n = game.n_states, game.n_players
    rev = config.revision
    P = np.zeros((ns, ns))
    if rev.kind == "independent":
        p = float(rev.p)
        for sid in range(ns):
            prof = game.unpack(sid)
            row = np.ones(1)
            for i in range(n):
                a = p * probs[sid][i]
                a[prof[i]] += 1.0 - p
                row = np.kron(a, row)  # player i is a slower-varying digit than i-1
            P[sid] = row
    elif rev.kind == "asynchronous":
        for sid in range(ns):
            prof = game.unpack(sid)
            for i in range(n):
                base = sid - prof[i] * game.strides[i]
                for a, q in enumerate(probs[sid][i]):
                    P[sid, base + a * game.strides[i]] += q / n
    elif rev.kind == "custom":
        for sid in range(ns):
            prof = game.unpack(sid)
            for J, q in rev.support:
                row = np.ones(1)
                for i in range(n):
                    if i in J:
                        a = probs[sid][i]
                    else:
                        a = np.zeros(game.strategy_counts[i])
                        a[prof[i]] = 1.0
                    row = np.kron(a, row)
                P[sid] += float(q) * row
    else:
        raise InvalidParams(f"unknown revision kind {rev.kind!r}")
    assert np.allclose(P.sum(axis=1), 1.0, atol=1e-12)
    return TransitionMatrix(P=P, beta=config.beta, revision=rev)


@dataclass
class StationaryDistribution:
    probabilities: np.ndarray
    residual: float


def stationary_distribution(matrix: TransitionMatrix | np.ndarray) -> StationaryDistribution:
    """Solve mu P = mu, sum mu = 1 by dense GTH state elimination.

    GTH uses only additions and multiplications of nonnegative numbers, so
    tiny stationary masses (down to e^{-beta W} at large beta) keep full
    relative accuracy where a plain linear solve drowns them in roundoff.
    The chain must be irreducible (strong connectivity of the
    positive-entry graph).
    """
    P = matrix.P if isinstance(matrix, TransitionMatrix) else np.asarray(matrix)
    ns = P.shape[0]
    n_comp, _ = connected_components(csr_matrix(P > 0), directed=True, connection="strong")
    if n_comp != 1:
        raise ReducibleChain(f"positive-entry graph has {n_comp} strongly connected components")
    A = P.astype(float).copy()
    exit_mass = np.ones(ns)
    for k in range(ns - 1, 0, -1):
        s = A[k, :k].sum()
        if s <= 0.0:
            raise SolveFailure(f"GTH elimination stalled at state {k}")
        exit_mass[k] = s
        A[:k, :k] += np.outer(A[:k, k], A[k, :k]) / s
    mu = np.zeros(ns)
    mu[0] = 1.0
    for k in range(1, ns):
        mu[k] = (mu[:k] @ A[:k, k]) / exit_mass[k]
    mu /= mu.sum()
    residual = float(np.max(np.abs(mu @ P - mu)))
    if residual > 1e-9:
        raise SolveFailure(f"stationary residual {residual:.3e} exceeds 1e-9")
    return StationaryDistribution(probabilities=mu, residual=residual)


@dataclass
class StableEstimate:
    persisting: set[int]
    vanishing: set[int]
    slopes: np.ndarray
    log_mu: np.ndarray  # rows: ladder points, cols: states (diagnostics)


def numeric_stable_estimate(
    game: Game,
    revision: RevisionProcess,
    beta_ladder: Sequence[float] = DEFAULT_BETA_LADDER,
    slope_tol: float = DEFAULT_SLOPE_TOL,
    table: GameTable | None = None,
) -> StableEstimate:
    """Classify states by the asymptotic slope of log mu^beta(s) in beta.

    The reported slope is the finite difference across the top rung of the
    ladder, where persisting states have already converged; earlier rungs
    are kept for diagnostics.
    """
    betas = [float(b) for b in beta_ladder]
    if len(betas) < 3 or any(b2 <= b1 for b1, b2 in zip(betas, betas[1:])):
        raise InvalidParams("beta ladder must be strictly increasing with >= 3 points")
    table = table or GameTable(game)
    rows = []
    for beta in betas:
        mu = stationary_distribution(transition_matrix(game, DynamicsConfig(beta, revision), table))
        rows.append(np.log(np.clip(mu.probabilities, 1e-300, None)))
    log_mu = np.array(rows)
    slopes = (log_mu[-1] - log_mu[-2]) / (betas[-1] - betas[-2])
    # A state whose mass has underflowed to the clip floor at the top rung
    # shows a flat (zero) slope; it is vanishing, not persisting.
    floored = log_mu[-1] <= np.log(1e-290)
    persisting = {
        s for s in range(game.n_states) if slopes[s] >= -slope_tol and not floored[s]
    }
    vanishing = set(range(game.n_states)) - persisting
    return StableEstimate(persisting=persisting, vanishing=vanishing, slopes=slopes, log_mu=log_mu)


@dataclass
class SimulationResult:
    occupancy: np.ndarray  # visit counts per state id, post-step
    final_state: int
    transitions: int  # steps on which the state changed
    steps: int

    def frequencies(self) -> np.ndarray:
        return self.occupancy / self.occupancy.sum()


def simulate(
    game: Game,
    config: DynamicsConfig,
    steps: int,
    seed: int,
    initial_state: int = 0,
    table: GameTable | None = None,
) -> SimulationResult:
    """Seeded trajectory: sample J from q, movers sample simultaneously from
    the logit rule against the pre-step profile.
    """
    if steps < 1:
        raise InvalidParams("steps must be >= 1")
    game.check_cap()
    table = table or GameTable(game)
    probs = _logit_tables(table, config.beta)
    ns, n = game.n_states, game.n_players
    strides = game.strides
    # cumulative per (state, player) for inverse-cdf sampling
    cum = [[np.cumsum(probs[sid][i]) for i in range(n)] for sid in range(ns)]
    rev = config.revision
    rng = np.random.default_rng(seed)
    if rev.kind == "custom":
        support = list(rev.support)
        cdf = np.cumsum([float(q) for _, q in support])

    state = initial_state
    profile = list(game.unpack(state))
    occupancy = np.zeros(ns, dtype=np.int64)
    transitions = 0
    chunk = 4096
    done = 0
    while done < steps:
        todo = min(chunk, steps - done)
        if rev.kind == "independent":
            mover_draws = rng.random((todo, n)) < float(rev.p)
        elif rev.kind == "asynchronous":
            single = rng.integers(0, n, size=todo)
        else:
            subset_draws = np.searchsorted(cdf, rng.random(todo))
        strat_draws = rng.random((todo, n))
        for k in range(todo):
            if rev.kind == "independent":
                movers = np.flatnonzero(mover_draws[k])
            elif rev.kind == "asynchronous":
                movers = (single[k],)
            else:
                movers = support[subset_draws[k]][0]
            new_state = state
            for j in movers:
                a = int(np.searchsorted(cum[state][j], strat_draws[k, j]))
                new_state += (a - profile[j]) * strides[j]
            if new_state != state:
                transitions += 1
                state = new_state
                profile = list(game.unpack(state))
            occupancy[state] += 1
        done += todo
    return SimulationResult(occupancy=occupancy, final_state=state, transitions=transitions, steps=steps)
