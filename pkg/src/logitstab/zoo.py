"""Instance constructors and the JSON game format.

Families:
  * load balancing on identical machines (cost = makespan),
  * broadcast network design with Shapley (equal) cost sharing,
  * parallel links as a special case of network design,
  * the two-player triangle network from the figure, reconstructed with
    edge costs (2, 2, 1) -- the unique simple assignment reproducing the
    stated optimum 3, worst Nash 4 and cost(s0) = 5,
  * explicit normal-form games loaded from a file.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from typing import Sequence

from .errors import DisconnectedPlayer, InvalidParams, ParseError, SchemaError, TooManyPaths
from .games import Game, PotentialSpec, Profile

DEFAULT_PATH_CAP = 64

_RATIONAL_RE = re.compile(r"^-?\d+(/\d+)?$")


def parse_rational(text) -> Fraction:
    """Parse "p/q" or integer strings; decimals are rejected on purpose."""
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str) or not _RATIONAL_RE.match(text.strip()):
        raise ParseError(f"not a rational literal: {text!r}")
    try:
        return Fraction(text.strip())
    except ZeroDivisionError:
        raise ParseError(f"zero denominator: {text!r}") from None


def format_rational(value: Fraction) -> str:
    value = Fraction(value)
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def harmonic(n: int) -> Fraction:
    return sum((Fraction(1, k) for k in range(1, n + 1)), Fraction(0))


# ---------------------------------------------------------------------------
# load balancing


def make_load_balancing(machines: int, job_weights: Sequence[Fraction], name: str = "load_balancing") -> Game:
    """Players pick a machine; utility = -(load of own machine); cost = makespan.

    Carries the quadratic potential phi(s) = sum of squared loads with
    weights w_i = 1 / (2 * weight_i).
    """
    if machines < 1:
        raise InvalidParams("need at least one machine")
    weights = tuple(Fraction(w) for w in job_weights)
    if not weights or any(w <= 0 for w in weights):
        raise InvalidParams("job weights must be positive")
    n = len(weights)

    def loads(profile: Profile) -> list[Fraction]:
        out = [Fraction(0)] * machines
        for j, m in enumerate(profile):
            out[m] += weights[j]
        return out

    def utility(i: int, profile: Profile) -> Fraction:
        return -loads(profile)[profile[i]]

    def social(profile: Profile) -> Fraction:
        return max(loads(profile))

    def phi(profile: Profile) -> Fraction:
        return sum(l * l for l in loads(profile))

    def signature(profile: Profile):
        # class of a state: multiset of per-machine weight multisets
        per_machine = [[] for _ in range(machines)]
        for j, m in enumerate(profile):
            per_machine[m].append(weights[j])
        return tuple(sorted(tuple(sorted(ws, reverse=True)) for ws in per_machine))

    spec = {
        "type": "load_balancing",
        "machines": machines,
        "jobs": [format_rational(w) for w in weights],
    }
    return Game(
        n_players=n,
        strategy_counts=(machines,) * n,
        utility=utility,
        social_cost=social,
        potential=PotentialSpec(phi=phi, weights=tuple(Fraction(1, 2) / w for w in weights)),
        labels=tuple(tuple(f"machine{m}" for m in range(machines)) for _ in range(n)),
        class_signature=signature,
        name=name,
        source_spec=spec,
    )


def make_lb_unit_instance(m: int, l: int) -> Game:
    """m machines and l*m - 1 unit jobs; optimum makespan is l."""
    if m < 2 or l < 1:
        raise InvalidParams("need m >= 2 and l >= 1")
    return make_load_balancing(m, [Fraction(1)] * (l * m - 1), name=f"lb-unit(m={m},l={l})")


def lb_pos_jobs(m: int, l: int) -> list[Fraction]:
    delta_big = Fraction(m, m + 1)
    delta_small = delta_big / (l * m)
    return (
        [delta_big - delta_small] * 2
        + [delta_big] * (m - 2)
        + [delta_small] * (l * m)
    )


def make_lb_pos_instance(m: int, l: int) -> Game:
    """The near-optimal-Nash family: jobs {D-d, D-d, D x(m-2), d x(lm)}."""
    if m < 2 or l < 1:
        raise InvalidParams("need m >= 2 and l >= 1")
    return make_load_balancing(m, lb_pos_jobs(m, l), name=f"lb-pos(m={m},l={l})")


# ---------------------------------------------------------------------------
# broadcast network design


def _enumerate_simple_paths(nodes, edges, source, terminal, cap):
    """All simple paths source -> terminal as tuples of edge indices (DFS, input order)."""
    adjacency = {v: [] for v in nodes}
    for idx, (u, v, _) in enumerate(edges):
        adjacency[u].append((idx, v))
        adjacency[v].append((idx, u))
    paths = []

    def dfs(node, visited, trail):
        if node == terminal:
            paths.append(tuple(trail))
            if len(paths) > cap:
                raise TooManyPaths(f"more than {cap} simple paths from {source!r}")
            return
        for idx, nxt in adjacency[node]:
            if nxt in visited:
                continue
            visited.add(nxt)
            trail.append(idx)
            dfs(nxt, visited, trail)
            trail.pop()
            visited.discard(nxt)

    dfs(source, {source}, [])
    return paths


def make_network_design(
    nodes: Sequence[str],
    edges: Sequence[tuple[str, str, Fraction]],
    player_sources: Sequence[str],
    terminal: str,
    path_cap: int = DEFAULT_PATH_CAP,
    name: str = "network_design",
) -> Game:
    """Each player routes from her source to the terminal; edge costs are
    split equally among users. Rosenthal potential attached with w_i = 1.
    """
    nodes = list(nodes)
    edge_list = [(u, v, Fraction(c)) for u, v, c in edges]
    if any(c <= 0 for _, _, c in edge_list):
        raise InvalidParams("edge costs must be positive")
    unknown = {u for u, v, _ in edge_list} | {v for u, v, _ in edge_list} | set(player_sources) | {terminal}
    unknown -= set(nodes)
    if unknown:
        raise InvalidParams(f"undeclared nodes: {sorted(unknown)}")

    strategy_sets = []
    for src in player_sources:
        paths = _enumerate_simple_paths(nodes, edge_list, src, terminal, path_cap)
        if not paths:
            raise DisconnectedPlayer(f"no path from {src!r} to {terminal!r}")
        strategy_sets.append(paths)
    n = len(strategy_sets)
    costs = [c for _, _, c in edge_list]

    def usage(profile: Profile) -> dict[int, int]:
        counts: dict[int, int] = {}
        for i, choice in enumerate(profile):
            for e in strategy_sets[i][choice]:
                counts[e] = counts.get(e, 0) + 1
        return counts

    def utility(i: int, profile: Profile) -> Fraction:
        counts = usage(profile)
        return -sum((costs[e] / counts[e] for e in strategy_sets[i][profile[i]]), Fraction(0))

    def social(profile: Profile) -> Fraction:
        return sum((costs[e] for e in usage(profile)), Fraction(0))

    def phi(profile: Profile) -> Fraction:
        return sum((costs[e] * harmonic(k) for e, k in usage(profile).items()), Fraction(0))

    def signature(profile: Profile):
        return tuple(sorted(usage(profile).items()))

    def path_label(player: int, choice: int) -> str:
        trail, node = [], player_sources[player]
        for e in strategy_sets[player][choice]:
            u, v, _ = edge_list[e]
            node = v if node == u else u
            trail.append(node)
        return "->".join([player_sources[player]] + trail)

    spec = {
        "type": "network_design",
        "nodes": nodes,
        "edges": [[u, v, format_rational(c)] for u, v, c in edge_list],
        "players": list(player_sources),
        "terminal": terminal,
    }
    return Game(
        n_players=n,
        strategy_counts=tuple(len(p) for p in strategy_sets),
        utility=utility,
        social_cost=social,
        potential=PotentialSpec(phi=phi, weights=(Fraction(1),) * n),
        labels=tuple(
            tuple(path_label(i, a) for a in range(len(strategy_sets[i]))) for i in range(n)
        ),
        class_signature=signature,
        name=name,
        source_spec=spec,
    )


def make_parallel_links(link_costs: Sequence[Fraction], n_players: int) -> Game:
    """All players at one source, m parallel links to the terminal."""
    costs = [Fraction(c) for c in link_costs]
    if not costs or any(c <= 0 for c in costs):
        raise InvalidParams("link costs must be positive")
    if sorted(costs) != costs:
        raise InvalidParams("link costs must be nondecreasing")
    if n_players < 1:
        raise InvalidParams("need at least one player")
    game = make_network_design(
        nodes=["s", "t"],
        edges=[("s", "t", c) for c in costs],
        player_sources=["s"] * n_players,
        terminal="t",
        name=f"parallel({','.join(format_rational(c) for c in costs)};n={n_players})",
    )
    spec = {
        "type": "parallel_links",
        "costs": [format_rational(c) for c in costs],
        "players": n_players,
    }
    object.__setattr__(game, "source_spec", spec)
    return game


def make_triangle() -> Game:
    """Two sources s1, s2 and terminal t; edges (s1,t)=2, (s2,t)=2, (s1,s2)=1.

    State ids under little-endian packing: s2=(D,D) -> 0, s1=(I,D) -> 1,
    s3=(D,I) -> 2, s0=(I,I) -> 3 with D the direct strategy (index 0).
    """
    game = make_network_design(
        nodes=["s1", "s2", "t"],
        edges=[("s1", "t", Fraction(2)), ("s2", "t", Fraction(2)), ("s1", "s2", Fraction(1))],
        player_sources=["s1", "s2"],
        terminal="t",
        name="triangle",
    )
    # constructor self-test: the reconstruction must reproduce the known numbers
    assert game.social_cost((1, 1)) == 5
    assert game.social_cost((1, 0)) == 3 and game.social_cost((0, 1)) == 3
    assert game.social_cost((0, 0)) == 4
    return game


# state names used in triangle reports
TRIANGLE_STATE_NAMES = {0: "s2", 1: "s1", 2: "s3", 3: "s0"}


# ---------------------------------------------------------------------------
# normal form + file loading


def make_normal_form(
    strategy_counts: Sequence[int],
    utilities: Sequence[Sequence[Fraction]],
    social_costs: Sequence[Fraction] | None = None,
    potential_values: Sequence[Fraction] | None = None,
    potential_weights: Sequence[Fraction] | None = None,
    name: str = "normal_form",
) -> Game:
    """Explicit game: utilities indexed by state id, then player.

    When social costs are omitted they default to -(sum of utilities).
    """
    counts = tuple(int(c) for c in strategy_counts)
    n_states = 1
    for c in counts:
        n_states *= c
    table = [tuple(Fraction(u) for u in row) for row in utilities]
    if len(table) != n_states or any(len(row) != len(counts) for row in table):
        raise SchemaError("utilities must have one row per state id and one column per player")
    if social_costs is not None:
        costs = [Fraction(c) for c in social_costs]
        if len(costs) != n_states:
            raise SchemaError("social_costs must have one entry per state id")
    else:
        costs = [-sum(row) for row in table]

    strides, acc = [], 1
    for c in counts:
        strides.append(acc)
        acc *= c

    def pack(profile: Profile) -> int:
        return sum(s * st for s, st in zip(profile, strides))

    potential = None
    if potential_values is not None:
        values = [Fraction(v) for v in potential_values]
        if len(values) != n_states:
            raise SchemaError("potential values must have one entry per state id")
        weights = (
            tuple(Fraction(w) for w in potential_weights)
            if potential_weights is not None
            else (Fraction(1),) * len(counts)
        )
        potential = PotentialSpec(phi=lambda p: values[pack(p)], weights=weights)

    spec = {
        "type": "normal_form",
        "strategy_counts": list(counts),
        "utilities": [[format_rational(u) for u in row] for row in table],
    }
    if social_costs is not None:
        spec["social_costs"] = [format_rational(c) for c in costs]
    if potential_values is not None:
        spec["potential"] = {
            "values": [format_rational(v) for v in potential_values],
            "weights": [format_rational(w) for w in potential.weights],
        }
    return Game(
        n_players=len(counts),
        strategy_counts=counts,
        utility=lambda i, p: table[pack(p)][i],
        social_cost=lambda p: costs[pack(p)],
        potential=potential,
        name=name,
        source_spec=spec,
    )


def game_from_dict(data: dict) -> Game:
    if not isinstance(data, dict) or "type" not in data:
        raise SchemaError("top-level object with a 'type' field required")
    kind = data["type"]
    try:
        if kind == "load_balancing":
            return make_load_balancing(int(data["machines"]), [parse_rational(j) for j in data["jobs"]])
        if kind == "parallel_links":
            return make_parallel_links([parse_rational(c) for c in data["costs"]], int(data["players"]))
        if kind == "network_design":
            return make_network_design(
                nodes=data["nodes"],
                edges=[(u, v, parse_rational(c)) for u, v, c in data["edges"]],
                player_sources=data["players"],
                terminal=data["terminal"],
            )
        if kind == "normal_form":
            pot = data.get("potential") or {}
            return make_normal_form(
                data["strategy_counts"],
                [[parse_rational(u) for u in row] for row in data["utilities"]],
                social_costs=(
                    [parse_rational(c) for c in data["social_costs"]]
                    if "social_costs" in data
                    else None
                ),
                potential_values=(
                    [parse_rational(v) for v in pot["values"]] if pot else None
                ),
                potential_weights=(
                    [parse_rational(w) for w in pot["weights"]] if pot.get("weights") else None
                ),
            )
    except KeyError as exc:
        raise SchemaError(f"missing field {exc.args[0]!r} for game type {kind!r}") from exc
    raise SchemaError(f"unknown game type {kind!r}")


def load_game_from_file(path) -> Game:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    except OSError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    return game_from_dict(data)


def game_to_json(game: Game) -> dict:
    if game.source_spec is None:
        raise InvalidParams("game was not built from a serializable spec")
    return game.source_spec
