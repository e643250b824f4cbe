"""Estimator-style front ends.

Analyses are exposed as fit-shaped objects so they compose with standard
tooling (get_params/set_params, cloning). `fit` takes a Game rather than
an array; fitted results live in trailing-underscore attributes.
"""

from __future__ import annotations

from fractions import Fraction

from sklearn.base import BaseEstimator

from .dynamics import (
    DynamicsConfig,
    RevisionProcess,
    numeric_stable_estimate,
    parse_revision,
    simulate,
    stationary_distribution,
    transition_matrix,
)
from .games import Game, GameTable, nash_set, optimum_cost
from .metrics import metric_report
from .stability import basin_report, stochastic_potentials, waste_graph


def _revision(spec, p) -> RevisionProcess:
    if isinstance(spec, RevisionProcess):
        return spec
    return parse_revision(spec, Fraction(p))


class StabilityAnalyzer(BaseEstimator):
    """Zero-noise analysis of one game under one revision process.

    Parameters
    ----------
    revision : "independent" | "asynchronous" | RevisionProcess
    p : rational string or Fraction, revising probability for independent
        learning (any value in (0,1) yields the same stable set).
    """

    def __init__(self, revision="independent", p="1/2"):
        self.revision = revision
        self.p = p

    def fit(self, game: Game, y=None):
        rev = _revision(self.revision, self.p)
        self.game_ = game
        self.table_ = GameTable(game)
        self.waste_graph_ = waste_graph(game, rev, self.table_)
        self.potentials_ = stochastic_potentials(game, rev, self.table_, self.waste_graph_)
        self.stable_ = self.potentials_.argmin
        self.nash_, self.strict_nash_ = nash_set(game, self.table_)
        self.optimum_, self.optimum_states_ = optimum_cost(game, self.table_)
        return self

    def basin(self, state: int):
        return basin_report(self.waste_graph_, state)

    def report(self):
        return metric_report(self.game_, self.table_, p=Fraction(self.p))


class LogitDynamics(BaseEstimator):
    """Finite-noise chain of one game: transition matrix, stationary
    distribution, seeded trajectories, and the zero-noise numeric estimate."""

    def __init__(self, beta=1.0, revision="independent", p="1/2"):
        self.beta = beta
        self.revision = revision
        self.p = p

    def fit(self, game: Game, y=None):
        rev = _revision(self.revision, self.p)
        self.game_ = game
        self.table_ = GameTable(game)
        self.config_ = DynamicsConfig(float(self.beta), rev)
        self.transition_matrix_ = transition_matrix(game, self.config_, self.table_)
        self.stationary_ = stationary_distribution(self.transition_matrix_)
        return self

    def sample(self, steps: int, seed: int, initial_state: int = 0):
        return simulate(self.game_, self.config_, steps, seed, initial_state, self.table_)

    def stable_estimate(self, beta_ladder=None, slope_tol=1e-3):
        rev = _revision(self.revision, self.p)
        kwargs = {"slope_tol": slope_tol, "table": self.table_}
        if beta_ladder is not None:
            kwargs["beta_ladder"] = beta_ladder
        return numeric_stable_estimate(self.game_, rev, **kwargs)
