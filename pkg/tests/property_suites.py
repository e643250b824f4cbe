"""Randomized property suites, shared by the granular tests and the
acceptance gate. Each suite returns the number of cases it checked and
raises AssertionError on the first counterexample."""

import random
from fractions import Fraction
from math import prod

import numpy as np

import logitstab as L
from logitstab.dynamics import (
    DynamicsConfig,
    RevisionProcess,
    simulate,
    stationary_distribution,
    transition_matrix,
)
from logitstab.errors import Unreachable
from logitstab.games import GameTable, best_responses, check_weighted_potential, nash_set
from logitstab.stability import (
    WasteGraph,
    brute_force_arborescence,
    deviation_set,
    min_in_arborescence,
    stochastic_potentials,
    waste,
    waste_for_subset,
)


def random_normal_form(rng, max_players=3, max_strategies=3):
    n = rng.randint(2, max_players)
    counts = [rng.randint(2, max_strategies) for _ in range(n)]
    n_states = prod(counts)
    utilities = [
        [Fraction(rng.randint(-8, 8)) for _ in range(n)] for _ in range(n_states)
    ]
    return L.make_normal_form(counts, utilities)


def random_potential_game(rng):
    """u_i = -w_i * phi + h_i(opponent profile): an exact weighted
    potential game with random phi, weights and dummy terms."""
    n = rng.randint(2, 3)
    counts = [rng.randint(2, 3) for _ in range(n)]
    n_states = prod(counts)
    strides = []
    acc = 1
    for c in counts:
        strides.append(acc)
        acc *= c

    def unpack(sid):
        return tuple((sid // strides[i]) % counts[i] for i in range(n))

    phi = [Fraction(rng.randint(-5, 5)) for _ in range(n_states)]
    weights = [Fraction(rng.choice([1, 2, 3]), rng.choice([1, 2])) for _ in range(n)]
    h = [{} for _ in range(n)]
    utilities = []
    for sid in range(n_states):
        prof = unpack(sid)
        row = []
        for i in range(n):
            opp = prof[:i] + prof[i + 1:]
            if opp not in h[i]:
                h[i][opp] = Fraction(rng.randint(-4, 4))
            row.append(-weights[i] * phi[sid] + h[i][opp])
        utilities.append(row)
    return L.make_normal_form(
        counts, utilities, potential_values=phi, potential_weights=weights
    )


def random_load_balancing(rng):
    machines = rng.randint(2, 3)
    jobs = [
        Fraction(rng.randint(1, 6), rng.choice([1, 2, 3]))
        for _ in range(rng.randint(1, 4))
    ]
    return L.make_load_balancing(machines, jobs)


def random_network_design(rng):
    k = rng.randint(3, 4)
    nodes = [f"v{i}" for i in range(k)]
    terminal = nodes[-1]
    edges = [
        (nodes[i], nodes[i + 1], Fraction(rng.randint(1, 5), rng.choice([1, 2])))
        for i in range(k - 1)
    ]
    for _ in range(rng.randint(0, 3)):
        u, v = rng.sample(nodes, 2)
        edges.append((u, v, Fraction(rng.randint(1, 5))))
    players = [rng.choice(nodes[:-1]) for _ in range(rng.randint(1, 2))]
    return L.make_network_design(nodes, edges, players, terminal)


def suite_waste_sign_and_zero(cases=200, seed=101):
    """Waste is nonnegative; it is zero exactly when every deviating player
    moves to a best response against the pre-move profile."""
    rng = random.Random(seed)
    revisions = [RevisionProcess.independent(Fraction(1, 2)), RevisionProcess.asynchronous()]
    done = 0
    while done < cases:
        game = random_normal_form(rng)
        table = GameTable(game)
        s, s2 = rng.randrange(game.n_states), rng.randrange(game.n_states)
        if s == s2:
            continue
        movers = deviation_set(game, s, s2)
        prof, p2 = game.unpack(s), game.unpack(s2)
        all_br = all(p2[j] in best_responses(game, prof, j) for j in movers)
        for rev in revisions:
            w = waste(table, rev, s, s2)
            if w is None:
                assert rev.kind == "asynchronous" and len(movers) > 1
                continue
            assert w >= 0
            assert (w == 0) == all_br
        done += 1
    return done


def suite_superset_monotonicity(cases=200, seed=202):
    """Enlarging the revising subset never decreases the waste W^(J)."""
    rng = random.Random(seed)
    done = 0
    while done < cases:
        game = random_normal_form(rng, max_players=4, max_strategies=3)
        table = GameTable(game)
        s, s2 = rng.randrange(game.n_states), rng.randrange(game.n_states)
        if s == s2:
            continue
        movers = deviation_set(game, s, s2)
        others = [j for j in range(game.n_players) if j not in movers]
        rng.shuffle(others)
        mid = set(movers) | set(others[: len(others) // 2])
        big = set(movers) | set(others)
        w_small = waste_for_subset(table, s, s2, movers)
        w_mid = waste_for_subset(table, s, s2, mid)
        w_big = waste_for_subset(table, s, s2, big)
        assert w_small <= w_mid <= w_big
        done += 1
    return done


def suite_arborescence_oracle(cases=200, seed=303):
    """Chu-Liu matches exhaustive in-tree enumeration on graphs up to 5 nodes."""
    rng = random.Random(seed)
    done = 0
    while done < cases:
        n = rng.randint(2, 5)
        entries = [
            [
                Fraction(rng.randint(0, 9), rng.choice([1, 2, 3]))
                if u != v and rng.random() < 0.75
                else None
                for v in range(n)
            ]
            for u in range(n)
        ]
        wg = WasteGraph(n, entries)
        root = rng.randrange(n)
        try:
            expected = brute_force_arborescence(wg, root)
        except Unreachable:
            try:
                min_in_arborescence(wg, root)
                raise AssertionError("found an arborescence the oracle ruled out")
            except Unreachable:
                done += 1
                continue
        arb = min_in_arborescence(wg, root)
        assert arb.total_waste == expected
        total = sum((wg[c, p] for c, p in arb.parent.items()), Fraction(0))
        assert total == expected
        done += 1
    return done


def suite_stable_meets_nash(cases=200, seed=404):
    """On weighted potential games some stochastically stable state is Nash."""
    rng = random.Random(seed)
    revisions = [RevisionProcess.independent(Fraction(1, 2)), RevisionProcess.asynchronous()]
    for _ in range(cases):
        game = random_potential_game(rng)
        table = GameTable(game)
        assert check_weighted_potential(game, table) is None
        nash, _ = nash_set(game, table)
        for rev in revisions:
            stable = stochastic_potentials(game, rev, table).argmin
            assert stable & nash
    return cases


def suite_family_potentials(cases=200, seed=505):
    """Both instance families carry an exact weighted potential."""
    rng = random.Random(seed)
    for i in range(cases):
        game = random_load_balancing(rng) if i % 2 == 0 else random_network_design(rng)
        assert check_weighted_potential(game) is None
    return cases


def suite_simulator_tv(cases=16, steps=10**6, seed=606):
    """Occupancy of a long seeded trajectory tracks the stationary law."""
    rng = random.Random(seed)
    games = [
        L.make_triangle(),
        L.make_lb_unit_instance(2, 2),
        L.make_parallel_links([Fraction(1), Fraction(2)], 3),
    ]
    for case in range(cases):
        game = rng.choice(games)
        beta = rng.uniform(0.5, 1.5)
        rev = (
            RevisionProcess.independent(Fraction(1, 2))
            if rng.random() < 0.5
            else RevisionProcess.asynchronous()
        )
        config = DynamicsConfig(beta, rev)
        table = GameTable(game)
        result = simulate(game, config, steps, seed=rng.randrange(10**9), table=table)
        mu = stationary_distribution(transition_matrix(game, config, table))
        tv = 0.5 * float(np.abs(result.frequencies() - mu.probabilities).sum())
        assert tv < 0.05, f"case {case}: tv={tv:.4f}"
    return cases
