"""The six-quantity equilibrium-quality report.

Worst/best costs are taken over: all Nash equilibria (classical), the
potential minimizers (single-revisor dynamics), and the stochastically
stable states under independent learning. All ratios are exact rationals;
a zero optimum yields a None marker instead of a division error.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .dynamics import RevisionProcess
from .errors import InvalidParams
from .games import Game, GameTable, nash_set, optimum_cost
from .stability import StochasticPotentialTable, stochastic_potentials, waste_graph
from .zoo import format_rational, make_lb_pos_instance, make_lb_unit_instance


def _ratio(worst: Fraction, optimum: Fraction) -> Optional[Fraction]:
    if optimum == 0:
        return None
    return worst / optimum


def _fmt(value) -> Optional[str]:
    return None if value is None else format_rational(value)


@dataclass
class MetricReport:
    optimum: Fraction
    poa: Optional[Fraction]
    pos: Optional[Fraction]
    logit_poa: Optional[Fraction]
    logit_pos: Optional[Fraction]
    ind_logit_poa: Optional[Fraction]
    ind_logit_pos: Optional[Fraction]
    nash: set[int]
    strict_nash: set[int]
    potential_minimizers: Optional[set[int]]
    stable_independent: set[int]
    stable_asynchronous: set[int]
    contains_non_nash_stable: bool

    def to_json_dict(self) -> dict:
        out = {
            "optimum": _fmt(self.optimum),
            "poa": _fmt(self.poa),
            "pos": _fmt(self.pos),
            "logit_poa": _fmt(self.logit_poa),
            "logit_pos": _fmt(self.logit_pos),
            "ind_logit_poa": _fmt(self.ind_logit_poa),
            "ind_logit_pos": _fmt(self.ind_logit_pos),
            "nash": sorted(self.nash),
            "strict_nash": sorted(self.strict_nash),
            "potential_minimizers": sorted(self.potential_minimizers)
            if self.potential_minimizers is not None
            else None,
            "stable_independent": sorted(self.stable_independent),
            "stable_asynchronous": sorted(self.stable_asynchronous),
            "contains_non_nash_stable": self.contains_non_nash_stable,
        }
        for key in ("poa", "pos", "logit_poa", "logit_pos", "ind_logit_poa", "ind_logit_pos"):
            value = getattr(self, key)
            out["approx_" + key] = float(value) if value is not None else None
        out["approx_optimum"] = float(self.optimum)
        return out


def metric_report(
    game: Game,
    table: GameTable | None = None,
    p: Fraction = Fraction(1, 2),
) -> MetricReport:
    table = table or GameTable(game)
    optimum, _ = optimum_cost(game, table)
    nash, strict = nash_set(game, table)
    stable_ind = stochastic_potentials(game, RevisionProcess.independent(p), table).argmin
    stable_async = stochastic_potentials(game, RevisionProcess.asynchronous(), table).argmin

    def over(states):
        if not states:
            return None, None
        costs = [table.cost[s] for s in states]
        return _ratio(max(costs), optimum), _ratio(min(costs), optimum)

    poa, pos = over(nash)
    minimizers = None
    logit_poa = logit_pos = None
    if game.potential is not None:
        phis = [game.potential.phi(game.unpack(sid)) for sid in range(game.n_states)]
        low = min(phis)
        minimizers = {sid for sid, v in enumerate(phis) if v == low}
        logit_poa, logit_pos = over(minimizers)
    ind_poa, ind_pos = over(stable_ind)
    return MetricReport(
        optimum=optimum,
        poa=poa,
        pos=pos,
        logit_poa=logit_poa,
        logit_pos=logit_pos,
        ind_logit_poa=ind_poa,
        ind_logit_pos=ind_pos,
        nash=nash,
        strict_nash=strict,
        potential_minimizers=minimizers,
        stable_independent=stable_ind,
        stable_asynchronous=stable_async,
        contains_non_nash_stable=not stable_ind <= nash,
    )


@dataclass
class Table1Check:
    m: int
    l: int
    unit_ind_logit_poa: Fraction
    unit_reference: Fraction  # m - 1/l
    pos_ind_logit_pos: Fraction
    pos_reference: Fraction  # 2 (1 - 1/(m+1)), the l -> infinity limit
    classical_poa_witness: Optional[Fraction]
    classical_reference: Fraction

    def to_json_dict(self) -> dict:
        return {
            "m": self.m,
            "l": self.l,
            "unit_ind_logit_poa": _fmt(self.unit_ind_logit_poa),
            "unit_reference_m_minus_1_over_l": _fmt(self.unit_reference),
            "pos_ind_logit_pos": _fmt(self.pos_ind_logit_pos),
            "pos_reference_limit": _fmt(self.pos_reference),
            "classical_poa_witness": _fmt(self.classical_poa_witness),
            "classical_reference": _fmt(self.classical_reference),
        }


def table1_check(m: int, l: int, p: Fraction = Fraction(1, 2)) -> Table1Check:
    """Desk-scale comparison of the load-balancing bounds at fixed (m, l).

    The classical PoA witness {2, 2, 1, 1} is specific to two machines;
    for larger m only the reference formula is reported.
    """
    if m < 2 or l < 1:
        raise InvalidParams("need m >= 2 and l >= 1")
    unit = metric_report(make_lb_unit_instance(m, l), p=p)
    pos_inst = metric_report(make_lb_pos_instance(m, l), p=p)
    witness = None
    if m == 2:
        from .zoo import make_load_balancing

        witness = metric_report(make_load_balancing(2, [2, 2, 1, 1]), p=p).poa
    return Table1Check(
        m=m,
        l=l,
        unit_ind_logit_poa=unit.ind_logit_poa,
        unit_reference=Fraction(m) - Fraction(1, l),
        pos_ind_logit_pos=pos_inst.ind_logit_pos,
        pos_reference=2 * (1 - Fraction(1, m + 1)),
        classical_poa_witness=witness,
        classical_reference=2 * (1 - Fraction(1, m + 1)),
    )


def classify_states(
    game: Game,
    table: GameTable | None = None,
    potentials_independent: StochasticPotentialTable | None = None,
    potentials_asynchronous: StochasticPotentialTable | None = None,
    p: Fraction = Fraction(1, 2),
) -> list[dict]:
    """One record per state id: cost, W under both revisions, Nash flag,
    potential value and the class signature used for reporting."""
    table = table or GameTable(game)
    nash, _ = nash_set(game, table)
    pot_ind = potentials_independent or stochastic_potentials(
        game, RevisionProcess.independent(p), table
    )
    pot_async = potentials_asynchronous or stochastic_potentials(
        game, RevisionProcess.asynchronous(), table
    )
    records = []
    for sid in range(game.n_states):
        prof = game.unpack(sid)
        records.append(
            {
                "state_id": sid,
                "class": str(game.class_signature(prof)) if game.class_signature else str(prof),
                "cost": format_rational(table.cost[sid]),
                "W_indep": format_rational(pot_ind.W[sid]),
                "W_async": format_rational(pot_async.W[sid]),
                "is_nash": sid in nash,
                "phi": format_rational(game.potential.phi(prof)) if game.potential else "",
            }
        )
    return records


def write_states_csv(records: list[dict], path) -> None:
    fields = ["state_id", "class", "cost", "W_indep", "W_async", "is_nash", "phi"]
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        writer.writerows(records)
