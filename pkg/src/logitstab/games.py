"""Finite games with exact rational utilities.

A :class:`Game` stores utility/cost oracles over pure strategy profiles.
Profiles are tuples of strategy indices; they pack bijectively into an
integer state id via little-endian mixed-radix encoding (player 0 is the
fastest-varying coordinate), which fixes the enumeration order used in
every report.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from math import prod
from typing import Callable, Iterator, Optional, Sequence

from .errors import MissingPotential, StateSpaceTooLarge

DEFAULT_STATE_CAP = 2**20

Profile = tuple[int, ...]


def state_cap() -> int:
    """Current state-space cap; override via STABILITY_STATE_CAP."""
    raw = os.environ.get("STABILITY_STATE_CAP")
    return int(raw) if raw else DEFAULT_STATE_CAP


@dataclass(frozen=True)
class PotentialSpec:
    """Weighted potential: u_i(s) - u_i(s') = (phi(s') - phi(s)) * weights[i]."""

    phi: Callable[[Profile], Fraction]
    weights: tuple[Fraction, ...]


@dataclass(frozen=True)
class Game:
    n_players: int
    strategy_counts: tuple[int, ...]
    utility: Callable[[int, Profile], Fraction]
    social_cost: Callable[[Profile], Fraction]
    potential: Optional[PotentialSpec] = None
    labels: Optional[tuple[tuple[str, ...], ...]] = None
    class_signature: Optional[Callable[[Profile], object]] = None
    name: str = ""
    source_spec: Optional[dict] = field(default=None, compare=False)

    def __post_init__(self):
        if self.n_players != len(self.strategy_counts):
            raise ValueError("strategy_counts must list one size per player")
        if any(c < 1 for c in self.strategy_counts):
            raise ValueError("every player needs at least one strategy")

    @property
    def n_states(self) -> int:
        return prod(self.strategy_counts)

    @property
    def strides(self) -> tuple[int, ...]:
        out, acc = [], 1
        for c in self.strategy_counts:
            out.append(acc)
            acc *= c
        return tuple(out)

    def pack(self, profile: Profile) -> int:
        sid = 0
        for s, stride in zip(profile, self.strides):
            sid += s * stride
        return sid

    def unpack(self, sid: int) -> Profile:
        out = []
        for c in self.strategy_counts:
            out.append(sid % c)
            sid //= c
        return tuple(out)

    def check_cap(self) -> None:
        cap = state_cap()
        if self.n_states > cap:
            raise StateSpaceTooLarge(self.n_states, cap)


def enumerate_states(game: Game) -> Iterator[Profile]:
    """Yield every profile exactly once, in state-id order."""
    game.check_cap()
    for sid in range(game.n_states):
        yield game.unpack(sid)


@dataclass(frozen=True)
class Violation:
    profile: Profile
    player: int
    deviation: int


class GameTable:
    """Exact utility tables over the full state space.

    Everything downstream (waste graphs, Nash sets, transition matrices)
    reads from here; oracles are called once per (state, player).
    """

    def __init__(self, game: Game):
        game.check_cap()
        self.game = game
        n, ns = game.n_players, game.n_states
        strides = game.strides
        # U[sid][i] = u_i at state sid
        self.U: list[list[Fraction]] = [
            [game.utility(i, game.unpack(sid)) for i in range(n)] for sid in range(ns)
        ]
        self.maxU: list[list[Fraction]] = [[None] * n for _ in range(ns)]
        self.br: list[list[tuple[int, ...]]] = [[None] * n for _ in range(ns)]
        for sid in range(ns):
            prof = game.unpack(sid)
            for i in range(n):
                base = sid - prof[i] * strides[i]
                vals = [self.U[base + a * strides[i]][i] for a in range(game.strategy_counts[i])]
                best = max(vals)
                self.maxU[sid][i] = best
                self.br[sid][i] = tuple(a for a, v in enumerate(vals) if v == best)
        self.cost: list[Fraction] = [game.social_cost(game.unpack(sid)) for sid in range(ns)]

    def utility_of_move(self, sid: int, player: int, new_strategy: int) -> Fraction:
        """u_player(new_strategy, s_{-player}) with s the state with id sid."""
        cur = self.game.unpack(sid)[player]
        return self.U[sid + (new_strategy - cur) * self.game.strides[player]][player]


def best_responses(game: Game, profile: Profile, player: int) -> set[int]:
    """Argmax set of u_player(., s_{-player}); exact rational comparisons."""
    vals = []
    prof = list(profile)
    for a in range(game.strategy_counts[player]):
        prof[player] = a
        vals.append(game.utility(player, tuple(prof)))
    best = max(vals)
    return {a for a, v in enumerate(vals) if v == best}


def nash_set(game: Game, table: GameTable | None = None) -> tuple[set[int], set[int]]:
    """Return (Nash state ids, strict Nash state ids)."""
    table = table or GameTable(game)
    nash, strict = set(), set()
    for sid in range(game.n_states):
        prof = game.unpack(sid)
        ok = all(prof[i] in table.br[sid][i] for i in range(game.n_players))
        if ok:
            nash.add(sid)
            if all(len(table.br[sid][i]) == 1 for i in range(game.n_players)):
                strict.add(sid)
    return nash, strict


def check_weighted_potential(game: Game, table: GameTable | None = None) -> Violation | None:
    """Verify u_i(s) - u_i(s') = (phi(s') - phi(s)) * w_i for all single deviations.

    Returns None when the identity holds everywhere, else one witness.
    """
    if game.potential is None:
        raise MissingPotential("game carries no potential")
    table = table or GameTable(game)
    phi, weights = game.potential.phi, game.potential.weights
    phis = [phi(game.unpack(sid)) for sid in range(game.n_states)]
    strides = game.strides
    for sid in range(game.n_states):
        prof = game.unpack(sid)
        for i in range(game.n_players):
            for a in range(game.strategy_counts[i]):
                if a == prof[i]:
                    continue
                sid2 = sid + (a - prof[i]) * strides[i]
                lhs = table.U[sid][i] - table.U[sid2][i]
                rhs = (phis[sid2] - phis[sid]) * weights[i]
                if lhs != rhs:
                    return Violation(profile=prof, player=i, deviation=a)
    return None


def social_cost(game: Game, profile: Profile) -> Fraction:
    return game.social_cost(profile)


def optimum_cost(game: Game, table: GameTable | None = None) -> tuple[Fraction, set[int]]:
    """Exact minimum social cost and the full argmin set."""
    game.check_cap()
    if table is not None:
        costs = table.cost
    else:
        costs = [game.social_cost(p) for p in enumerate_states(game)]
    best = min(costs)
    return best, {sid for sid, c in enumerate(costs) if c == best}
