"""Zero-noise analysis: transition wastes, minimum in-arborescences,
stochastic potentials, zero-waste basins and the radius-coradius test.

All quantities here are exact rationals. An infeasible transition is
represented by ``None`` in the waste graph (it is not an error).
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import InternalInconsistency, TooLarge, Unreachable
from .games import Game, GameTable
from .dynamics import RevisionProcess

#: distinct marker for an infinite radius (basin covers the whole space)
INFINITE = "infinite"


def waste_for_subset(table: GameTable, s: int, s2: int, subset) -> Fraction:
    """W^(J): total best-response regret of the players in J, each evaluated
    against the old profile s_{-j}."""
    game = table.game
    p2 = game.unpack(s2)
    total = Fraction(0)
    for j in subset:
        total += table.maxU[s][j] - table.utility_of_move(s, j, p2[j])
    return total


def deviation_set(game: Game, s: int, s2: int) -> frozenset:
    p1, p2 = game.unpack(s), game.unpack(s2)
    return frozenset(j for j in range(game.n_players) if p1[j] != p2[j])


def waste(
    table: GameTable, revision: RevisionProcess, s: int, s2: int
) -> Optional[Fraction]:
    """Minimum waste of the transition s -> s2, or None when infeasible."""
    if s == s2:
        raise ValueError("waste is defined for distinct states")
    movers = deviation_set(table.game, s, s2)
    candidates = revision.feasible_supersets(movers)
    if not candidates:
        return None
    return min(waste_for_subset(table, s, s2, J) for J in candidates)


class WasteGraph:
    """Dense |S| x |S| matrix of exact wastes; None marks infeasible edges."""

    def __init__(self, n_states: int, entries: list[list[Optional[Fraction]]]):
        self.n_states = n_states
        self.entries = entries

    def __getitem__(self, key) -> Optional[Fraction]:
        s, s2 = key
        return self.entries[s][s2]

    def zero_edges(self) -> list[list[int]]:
        return [
            [v for v, w in enumerate(row) if w == 0]
            for row in self.entries
        ]

    def feasible_out_edges(self, s: int) -> list[tuple[int, Fraction]]:
        return [(v, w) for v, w in enumerate(self.entries[s]) if w is not None and v != s]


def waste_graph(game: Game, revision: RevisionProcess, table: GameTable | None = None) -> WasteGraph:
    """All pairwise wastes. Under independent learning the minimizing subset
    is the deviation set itself, so each entry is a direct regret sum."""
    game.check_cap()
    table = table or GameTable(game)
    ns, n = game.n_states, game.n_players
    strides, counts = game.strides, game.strategy_counts
    entries: list[list[Optional[Fraction]]] = [[None] * ns for _ in range(ns)]
    if revision.kind == "independent":
        # regret[s][j][a] = maxU_j(s) - u_j(a, s_{-j})
        for s in range(ns):
            prof = game.unpack(s)
            regret = [
                [
                    table.maxU[s][j] - table.U[s - (prof[j] - a) * strides[j]][j]
                    for a in range(counts[j])
                ]
                for j in range(n)
            ]
            row = entries[s]
            for s2 in range(ns):
                if s2 == s:
                    continue
                p2 = game.unpack(s2)
                total = Fraction(0)
                for j in range(n):
                    if p2[j] != prof[j]:
                        total += regret[j][p2[j]]
                row[s2] = total
    else:
        if revision.kind == "asynchronous":
            for s in range(ns):
                prof = game.unpack(s)
                for j in range(n):
                    base = s - prof[j] * strides[j]
                    for a in range(counts[j]):
                        if a == prof[j]:
                            continue
                        entries[s][base + a * strides[j]] = (
                            table.maxU[s][j] - table.U[base + a * strides[j]][j]
                        )
        else:
            for s in range(ns):
                for s2 in range(ns):
                    if s2 != s:
                        entries[s][s2] = waste(table, revision, s, s2)
    return WasteGraph(ns, entries)


# ---------------------------------------------------------------------------
# minimum in-arborescence (Chu-Liu/Edmonds on the reversed graph)


@dataclass
class Arborescence:
    root: int
    parent: dict[int, int]  # every non-root state -> head of its out-edge
    total_waste: Fraction


class _Edge:
    __slots__ = ("u", "v", "w", "base", "enters")

    def __init__(self, u, v, w, base=None, enters=None):
        self.u, self.v, self.w = u, v, w
        self.base = base  # edge one contraction level down, None at level 0
        self.enters = enters  # cycle node this edge entered, for supernode edges


def _min_out_arborescence(nodes: list[int], edges: list[_Edge], root: int) -> list[_Edge]:
    """Chosen level-0 edges of a minimum out-arborescence rooted at root."""
    best: dict[int, _Edge] = {}
    for e in edges:
        if e.v == root:
            continue
        cur = best.get(e.v)
        if cur is None or e.w < cur.w:
            best[e.v] = e
    for v in nodes:
        if v != root and v not in best:
            raise Unreachable(v)

    # look for a cycle among the selected parent pointers
    color = {v: 0 for v in nodes}  # 0 fresh, 1 on current walk, 2 settled
    cycle = None
    for start in nodes:
        if color[start] or start == root:
            continue
        path, x = [], start
        while x != root and color[x] == 0:
            color[x] = 1
            path.append(x)
            x = best[x].u
        if x != root and color[x] == 1:
            cycle = path[path.index(x):]
        for y in path:
            color[y] = 2
        if cycle:
            break
    if cycle is None:
        return [best[v] for v in nodes if v != root]

    # contract the cycle into a fresh supernode, adjust entering weights,
    # solve the smaller problem, then expand
    super_node = max(nodes) + 1
    in_cycle = set(cycle)
    new_edges = []
    for e in edges:
        u = super_node if e.u in in_cycle else e.u
        v = super_node if e.v in in_cycle else e.v
        if u == v:
            continue
        if v == super_node:
            new_edges.append(_Edge(u, v, e.w - best[e.v].w, base=e, enters=e.v))
        else:
            new_edges.append(_Edge(u, v, e.w, base=e))
    new_nodes = [v for v in nodes if v not in in_cycle] + [super_node]
    chosen = _min_out_arborescence(new_nodes, new_edges, root)

    out, entry = [], None
    for e in chosen:
        out.append(e.base)
        if e.v == super_node:
            entry = e.enters
    for v in cycle:
        if v != entry:
            out.append(best[v])
    return out


def min_in_arborescence(wg: WasteGraph, root: int) -> Arborescence:
    """Exact minimum-waste spanning tree of feasible edges converging to root.

    Computed as a minimum out-arborescence of the edge-reversed graph using
    the standard cycle-contraction algorithm.
    """
    if wg.n_states == 1:
        return Arborescence(root=root, parent={}, total_waste=Fraction(0))
    nodes = list(range(wg.n_states))
    edges = []
    for u in range(wg.n_states):
        for v, w in wg.feasible_out_edges(u):
            # reversed orientation: in-tree edge u->v becomes v->u
            edges.append(_Edge(v, u, w))
    chosen = _min_out_arborescence(nodes, edges, root)
    parent = {}
    total = Fraction(0)
    for e in chosen:
        parent[e.v] = e.u  # undo the reversal
        total += wg.entries[e.v][e.u]
    return Arborescence(root=root, parent=parent, total_waste=total)


def brute_force_arborescence(wg: WasteGraph, root: int) -> Fraction:
    """Independent oracle: exhaustive minimum over all in-trees (|S| <= 8)."""
    ns = wg.n_states
    if ns > 8:
        raise TooLarge("brute force oracle is capped at 8 states")
    others = [v for v in range(ns) if v != root]
    best = None
    choices = [wg.feasible_out_edges(v) for v in others]
    if any(not c for c in choices):
        raise Unreachable(others[[bool(c) for c in choices].index(False)])

    def rec(idx, parent, total):
        nonlocal best
        if best is not None and total >= best:
            return
        if idx == len(others):
            # check every node reaches root
            for v in others:
                seen = set()
                x = v
                while x != root:
                    if x in seen or x not in parent:
                        return
                    seen.add(x)
                    x = parent[x]
            best = total
            return
        v = others[idx]
        for tgt, w in choices[idx]:
            parent[v] = tgt
            rec(idx + 1, parent, total + w)
        del parent[v]

    rec(0, {}, Fraction(0))
    if best is None:
        raise Unreachable(root)
    return best


# ---------------------------------------------------------------------------
# stochastic potentials


@dataclass
class StochasticPotentialTable:
    W: list[Fraction]
    argmin: set[int]
    witness: Optional[dict[int, Arborescence]] = None

    def to_json_dict(self) -> dict:
        from .zoo import format_rational

        return {
            "stochastic_potential": {str(s): format_rational(w) for s, w in enumerate(self.W)},
            "stable": sorted(self.argmin),
        }


def _zero_sccs(wg: WasteGraph) -> tuple[list[int], int]:
    """Strongly connected components of the zero-waste digraph."""
    import numpy as np
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import connected_components

    n = wg.n_states
    rows, cols = [], []
    for u, outs in enumerate(wg.zero_edges()):
        for v in outs:
            rows.append(u)
            cols.append(v)
    mat = csr_matrix((np.ones(len(rows), dtype=bool), (rows, cols)), shape=(n, n))
    n_comp, labels = connected_components(mat, directed=True, connection="strong")
    return labels.tolist(), n_comp


def stochastic_potentials(
    game: Game,
    revision: RevisionProcess,
    table: GameTable | None = None,
    wg: WasteGraph | None = None,
    witness: bool = False,
) -> StochasticPotentialTable:
    """W(s) for every state via per-root minimum in-arborescences.

    States in the same zero-waste strongly connected component share W(s),
    so the arborescence runs on the zero-SCC quotient graph (each quotient
    edge carries the minimum waste over its state pairs). This is exact:
    within a component every state is reachable from every other at zero
    waste, and any quotient in-tree lifts to a spanning in-tree of equal
    total waste.
    """
    table = table or GameTable(game)
    wg = wg or waste_graph(game, revision, table)
    ns = wg.n_states
    comp, n_comp = _zero_sccs(wg)
    if n_comp == 1:
        W = [Fraction(0)] * ns
        result = StochasticPotentialTable(W=W, argmin=set(range(ns)))
    else:
        qw: dict[tuple[int, int], Fraction] = {}
        for u in range(ns):
            cu = comp[u]
            row = wg.entries[u]
            for v in range(ns):
                w = row[v]
                if w is None or comp[v] == cu:
                    continue
                key = (cu, comp[v])
                if key not in qw or w < qw[key]:
                    qw[key] = w
        # scale to integers: exactness kept, comparisons much cheaper
        from math import lcm

        denom = lcm(*(w.denominator for w in qw.values())) if qw else 1
        quotient = WasteGraph(
            n_comp,
            [
                [
                    int(qw[(a, b)] * denom) if (a, b) in qw else None
                    for b in range(n_comp)
                ]
                for a in range(n_comp)
            ],
        )
        qW = [
            Fraction(min_in_arborescence(quotient, c).total_waste, denom)
            for c in range(n_comp)
        ]
        W = [qW[comp[s]] for s in range(ns)]
        low = min(W)
        result = StochasticPotentialTable(W=W, argmin={s for s, w in enumerate(W) if w == low})
    if witness:
        result.witness = {s: min_in_arborescence(wg, s) for s in range(ns)}
    return result


# ---------------------------------------------------------------------------
# basins, radius, coradius


def zero_waste_closure(wg: WasteGraph, s: int) -> set[int]:
    """B(s): states reachable from s along zero-waste edges."""
    adj = wg.zero_edges()
    seen = {s}
    frontier = [s]
    while frontier:
        v = frontier.pop()
        for u in adj[v]:
            if u not in seen:
                seen.add(u)
                frontier.append(u)
    return seen


def attracting_basin(wg: WasteGraph, s: int) -> set[int]:
    """States with a zero-waste path into s (the set attracted to s).

    This is the basin the radius-coradius argument quantifies over; the
    forward closure is exposed separately as zero_waste_closure.
    """
    radj: list[list[int]] = [[] for _ in range(wg.n_states)]
    for u, outs in enumerate(wg.zero_edges()):
        for v in outs:
            radj[v].append(u)
    seen = {s}
    frontier = [s]
    while frontier:
        v = frontier.pop()
        for u in radj[v]:
            if u not in seen:
                seen.add(u)
                frontier.append(u)
    return seen


def limit_set(wg: WasteGraph, s: int) -> set[int]:
    """L(s): the mutually zero-waste reachable core around s."""
    return zero_waste_closure(wg, s) & attracting_basin(wg, s)


def waste_distances(wg: WasteGraph, source: int) -> list[Optional[Fraction]]:
    """Exact shortest waste-path distances from source (Dijkstra; weights >= 0)."""
    dist: list[Optional[Fraction]] = [None] * wg.n_states
    dist[source] = Fraction(0)
    heap = [(Fraction(0), source)]
    while heap:
        d, v = heapq.heappop(heap)
        if d > dist[v]:
            continue
        for u, w in wg.feasible_out_edges(v):
            nd = d + w
            if dist[u] is None or nd < dist[u]:
                dist[u] = nd
                heapq.heappush(heap, (nd, u))
    return dist


def radius(wg: WasteGraph, s: int, basin: set[int] | None = None):
    """Minimum waste of a path from s to a state outside its basin.

    Returns the INFINITE marker when the basin is the whole space.
    """
    basin = basin if basin is not None else attracting_basin(wg, s)
    outside = [v for v in range(wg.n_states) if v not in basin]
    if not outside:
        return INFINITE
    dist = waste_distances(wg, s)
    vals = [dist[v] for v in outside if dist[v] is not None]
    return min(vals) if vals else INFINITE


def coradius(wg: WasteGraph, s: int, basin: set[int] | None = None) -> Fraction:
    """Max over states outside the basin of the min waste path into s."""
    basin = basin if basin is not None else attracting_basin(wg, s)
    outside = [v for v in range(wg.n_states) if v not in basin]
    if not outside:
        return Fraction(0)
    worst = Fraction(0)
    for v in outside:
        dist = waste_distances(wg, v)
        if dist[s] is None:
            raise Unreachable(v)
        worst = max(worst, dist[s])
    return worst


@dataclass
class BasinReport:
    state: int
    B: set[int]  # forward zero-waste closure
    basin: set[int]  # attracted set used by the radius-coradius test
    L: set[int]
    R: object  # Fraction or INFINITE
    CR: Fraction

    def to_json_dict(self) -> dict:
        from .zoo import format_rational

        return {
            "state": self.state,
            "zero_waste_closure": sorted(self.B),
            "attracting_basin": sorted(self.basin),
            "limit_set": sorted(self.L),
            "radius": self.R if self.R == INFINITE else format_rational(self.R),
            "coradius": format_rational(self.CR),
        }


def basin_report(wg: WasteGraph, s: int) -> BasinReport:
    basin = attracting_basin(wg, s)
    return BasinReport(
        state=s,
        B=zero_waste_closure(wg, s),
        basin=basin,
        L=limit_set(wg, s),
        R=radius(wg, s, basin),
        CR=coradius(wg, s, basin),
    )


@dataclass
class RadiusCoradiusResult:
    applicable: bool
    stable: Optional[set[int]]
    report: BasinReport


def radius_coradius_check(
    game: Game,
    revision: RevisionProcess,
    s: int,
    table: GameTable | None = None,
    wg: WasteGraph | None = None,
    potentials: StochasticPotentialTable | None = None,
) -> RadiusCoradiusResult:
    """Apply the R(s) > CR(s) sufficient condition and cross-validate.

    An infinite radius (basin = everything) is treated as vacuously
    applicable with stable set L(s). When applicable, any mismatch with the
    arborescence argmin is an internal error, never a tolerated outcome.
    """
    table = table or GameTable(game)
    wg = wg or waste_graph(game, revision, table)
    report = basin_report(wg, s)
    applicable = report.R == INFINITE or report.R > report.CR
    if not applicable:
        return RadiusCoradiusResult(applicable=False, stable=None, report=report)
    potentials = potentials or stochastic_potentials(game, revision, table, wg)
    if report.L != potentials.argmin:
        raise InternalInconsistency(
            f"radius-coradius stable set {sorted(report.L)} disagrees with "
            f"stochastic-potential argmin {sorted(potentials.argmin)}"
        )
    return RadiusCoradiusResult(applicable=True, stable=report.L, report=report)
