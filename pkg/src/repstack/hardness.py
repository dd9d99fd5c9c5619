"""Hardness instance generators and desk-scale audits.

`reduce_graph` turns a graph into the three-player game whose first-player
value separates graphs with a balanced vertex cover (cover of size at most
half the vertices) from graphs without one.  The audits check the two
constructive halves at desk scale: cover-derived strategies pin Player 3's
best reply to exactly 1, and a simplex-grid sweep lower-bounds how much more
Player 3 can always grab when no balanced cover exists.

`coloring_leader_gpa` builds the companion two-player instance in which a
follower best response encodes a minimum graph coloring, so computing best
responses to arbitrary (even simple) leader strategies embeds graph coloring.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .core import (
    BimatrixGame,
    InputError,
    MixedStrategy,
    format_rational,
    stable_json,
    validate_game,
)
from .gpa import GamePlayingAlgorithm, History


class GraphTooSmall(InputError):
    """The reduction needs at least 3 vertices (it divides by n - 2)."""


class InvalidCover(InputError):
    """The supplied vertex set is not a usable balanced vertex cover."""


class DimensionMismatch(InputError):
    """A mixed strategy does not match the game's strategy count."""


class BudgetExceeded(RuntimeError):
    """An exhaustive search was asked to exceed its configured budget."""


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph; vertices are 1..n, edges unordered pairs."""

    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise InputError("graph needs at least one vertex")
        seen = set()
        for u, v in self.edges:
            if not (1 <= u <= self.n and 1 <= v <= self.n):
                raise InputError(f"edge ({u}, {v}) references a missing vertex")
            if u == v:
                raise InputError(f"self-loop at vertex {u}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise InputError(f"duplicate edge ({u}, {v})")
            seen.add(key)

    @property
    def m(self) -> int:
        return len(self.edges)

    def covers(self, vertices: Sequence[int]) -> bool:
        chosen = set(vertices)
        return all(u in chosen or v in chosen for u, v in self.edges)


def graph_from_text(text: str) -> Graph:
    """Parse the edge-list format: header "n m", then one "u v" line per edge."""
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if not lines:
        raise InputError("empty graph file")
    header = lines[0].split()
    if len(header) != 2:
        raise InputError('graph header must be "n m"')
    try:
        n, m = int(header[0]), int(header[1])
    except ValueError as exc:
        raise InputError(f"invalid graph header {lines[0]!r}") from exc
    if len(lines) - 1 != m:
        raise InputError(f"header declares {m} edges but file has {len(lines) - 1}")
    edges = []
    for i, line in enumerate(lines[1:], start=2):
        parts = line.split()
        if len(parts) != 2:
            raise InputError(f'line {i}: expected "u v"')
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except ValueError as exc:
            raise InputError(f"line {i}: invalid edge {line!r}") from exc
    return Graph(n, tuple(edges))


def graph_to_text(graph: Graph) -> str:
    lines = [f"{graph.n} {graph.m}"]
    lines.extend(f"{u} {v}" for u, v in graph.edges)
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ThreePlayerGame:
    """Payoff tensors of the reduction instance.

    Players 1 and 2 each pick a vertex (n strategies); Player 3's strategies
    are indexed so that index 0 is the safe action t0, indices 1..n are the
    vertex actions, and indices n+1..n+m are the edge actions in input order.
    Payoff accessors take 1-based vertices for players 1 and 2 and the
    0-based index above for Player 3.
    """

    graph: Graph
    mu1: tuple[tuple[tuple[Fraction, ...], ...], ...]
    mu2: tuple[tuple[tuple[Fraction, ...], ...], ...]
    mu3: tuple[tuple[tuple[Fraction, ...], ...], ...]

    @property
    def strategy_counts(self) -> tuple[int, int, int]:
        n, m = self.graph.n, self.graph.m
        return (n, n, m + n + 1)

    def p3_label(self, index: int) -> str:
        n = self.graph.n
        if index == 0:
            return "t0"
        if 1 <= index <= n:
            return f"tv{index}"
        u, v = self.graph.edges[index - n - 1]
        return f"te{u}-{v}"

    def payoff1(self, r: int, s: int, t: int) -> Fraction:
        return self.mu1[r - 1][s - 1][t]

    def payoff2(self, r: int, s: int, t: int) -> Fraction:
        return self.mu2[r - 1][s - 1][t]

    def payoff3(self, r: int, s: int, t: int) -> Fraction:
        return self.mu3[r - 1][s - 1][t]

    def to_json(self) -> str:
        n, _, k = self.strategy_counts
        return stable_json(
            {
                "strategy_counts": list(self.strategy_counts),
                "p3_actions": [self.p3_label(t) for t in range(k)],
                "mu1": _tensor_json(self.mu1),
                "mu2": _tensor_json(self.mu2),
                "mu3": _tensor_json(self.mu3),
            }
        )


def _tensor_json(tensor: tuple[tuple[tuple[Fraction, ...], ...], ...]) -> list:
    return [[[format_rational(v) for v in cell] for cell in row] for row in tensor]


def reduce_graph(graph: Graph) -> ThreePlayerGame:
    """Build the three-player instance from a graph.

    Players 1 and 2 are paid 1 exactly when Player 3 plays the safe action
    t0 and 0 otherwise.  Player 3 gets 1 from t0; a vertex action t_v pays
    n/(n-2) unless it collides with either chosen vertex; an edge action t_e
    pays n/(n-2) unless Player 1's vertex is an endpoint of e.
    """
    n = graph.n
    if n < 3:
        raise GraphTooSmall(f"reduction needs n >= 3, got n = {n}")
    bonus = Fraction(n, n - 2)
    k = graph.m + n + 1
    mu1 = []
    mu2 = []
    mu3 = []
    for r in range(1, n + 1):
        row1, row2, row3 = [], [], []
        for s in range(1, n + 1):
            cell3 = [Fraction(1)]  # index 0: t0
            for v in range(1, n + 1):
                cell3.append(Fraction(0) if v in (r, s) else bonus)
            for u, w in graph.edges:
                cell3.append(Fraction(0) if r in (u, w) else bonus)
            row3.append(tuple(cell3))
            common = tuple([Fraction(1)] + [Fraction(0)] * (k - 1))
            row1.append(common)
            row2.append(common)
        mu1.append(tuple(row1))
        mu2.append(tuple(row2))
        mu3.append(tuple(row3))
    return ThreePlayerGame(graph, tuple(mu1), tuple(mu2), tuple(mu3))


def balanced_vertex_cover(graph: Graph, max_n: int = 20) -> tuple[int, ...] | None:
    """Exhaustively search for a vertex cover of size at most floor(n/2).

    Returns the first cover in (size, lexicographic) order, or None when no
    balanced cover exists.
    """
    if graph.n > max_n:
        raise BudgetExceeded(
            f"exhaustive cover search limited to n <= {max_n}, got n = {graph.n}"
        )
    vertices = range(1, graph.n + 1)
    for size in range(0, graph.n // 2 + 1):
        for subset in itertools.combinations(vertices, size):
            if graph.covers(subset):
                return subset
    return None


def cover_strategies(
    graph: Graph, cover: Sequence[int]
) -> tuple[MixedStrategy, MixedStrategy]:
    """Uniform strategies on a balanced cover and on its complement.

    Covers smaller than floor(n/2) are padded with the lowest-index
    non-cover vertices, which preserves the cover property.
    """
    chosen = sorted(set(cover))
    if len(chosen) != len(cover):
        raise InvalidCover("cover contains duplicate vertices")
    if any(not 1 <= v <= graph.n for v in chosen):
        raise InvalidCover("cover references a missing vertex")
    if not graph.covers(chosen):
        raise InvalidCover("the given set does not cover every edge")
    half = graph.n // 2
    if len(chosen) > half:
        raise InvalidCover(f"cover has {len(chosen)} vertices; at most {half} allowed")
    padded = set(chosen)
    for v in range(1, graph.n + 1):
        if len(padded) == half:
            break
        padded.add(v)
    complement = [v for v in range(1, graph.n + 1) if v not in padded]
    p1 = MixedStrategy(
        tuple(
            Fraction(1, len(padded)) if v in padded else Fraction(0)
            for v in range(1, graph.n + 1)
        )
    )
    p2 = MixedStrategy(
        tuple(
            Fraction(1, len(complement)) if v in complement else Fraction(0)
            for v in range(1, graph.n + 1)
        )
    )
    return p1, p2


def player3_audit(
    game3: ThreePlayerGame, p1: MixedStrategy, p2: MixedStrategy
) -> tuple[int, Fraction]:
    """Player 3's exact best reply to independent mixed strategies.

    Returns (action index, value); among equal-value actions the lowest index
    wins, so the safe action t0 (index 0) is preferred when it ties.
    """
    n, _, k = game3.strategy_counts
    if len(p1) != n or len(p2) != n:
        raise DimensionMismatch(
            f"strategies must range over {n} vertices, got {len(p1)} and {len(p2)}"
        )
    best_index = 0
    best_value: Fraction | None = None
    for t in range(k):
        total = Fraction(0)
        for r in range(1, n + 1):
            wr = p1.probability(r)
            if wr == 0:
                continue
            for s in range(1, n + 1):
                ws = p2.probability(s)
                if ws == 0:
                    continue
                total += wr * ws * game3.payoff3(r, s, t)
        if best_value is None or total > best_value:
            best_value = total
            best_index = t
    assert best_value is not None
    return best_index, best_value


def _grid_points(n: int, resolution: int) -> Iterator[tuple[int, ...]]:
    """All ways to write `resolution` as an ordered sum of n nonnegative ints."""
    if n == 1:
        yield (resolution,)
        return
    for head in range(resolution + 1):
        for tail in _grid_points(n - 1, resolution - head):
            yield (head,) + tail


def grid_audit_player3(
    game3: ThreePlayerGame, resolution: int, budget: int = 50_000_000
) -> Fraction:
    """Minimize Player 3's best-reply value over a simplex grid.

    Both players' strategies range over all weight vectors in multiples of
    1/resolution.  The result is an empirical floor: it certifies the bound
    at grid points only, not over the whole simplex.
    """
    if resolution < 1:
        raise InputError("resolution must be at least 1")
    n, _, k = game3.strategy_counts
    points = math.comb(resolution + n - 1, n - 1)
    if points * points * k > budget:
        raise BudgetExceeded(
            f"grid audit needs {points * points * k} evaluations, budget is {budget}"
        )
    grid = [point for point in _grid_points(n, resolution)]
    res = Fraction(resolution)
    worst: Fraction | None = None
    for q2 in grid:
        # For fixed p2, precompute each action's payoff vector against p1 rows.
        contracted: list[list[Fraction]] = []
        for t in range(k):
            row_values = []
            for r in range(1, n + 1):
                total = Fraction(0)
                for s in range(1, n + 1):
                    if q2[s - 1]:
                        total += Fraction(q2[s - 1]) * game3.payoff3(r, s, t)
                row_values.append(total / res)
            contracted.append(row_values)
        for q1 in grid:
            best: Fraction | None = None
            for t in range(k):
                row_values = contracted[t]
                total = Fraction(0)
                for r in range(n):
                    if q1[r]:
                        total += Fraction(q1[r]) * row_values[r]
                total /= res
                if best is None or total > best:
                    best = total
            assert best is not None
            if worst is None or best < worst:
                worst = best
    assert worst is not None
    return worst


class ColoringLeaderGPA(GamePlayingAlgorithm):
    """Leader whose final-round mixing scores the follower's implied coloring.

    Rounds 1..T-1 play action 1.  At round T the follower's earlier columns
    are read as colors of vertices 1..T-1; the score g is the number of
    distinct colors used if they form a valid partial coloring, and n if the
    coloring is invalid or the follower ever played column n early.  The
    leader then plays action n with probability 1 - g/n and action 1
    otherwise, so the follower's value is maximized by encoding a minimum
    coloring.
    """

    kind = "coloring"
    randomness = "per_round"

    def __init__(self, graph: Graph):
        if graph.n < 2:
            raise InputError("coloring construction needs at least 2 vertices")
        super().__init__(graph.n)
        self.graph = graph
        self.horizon = graph.n

    def coloring_score(self, history: History) -> int:
        n = self.graph.n
        colors: dict[int, int] = {}
        for vertex, pair in enumerate(history, start=1):
            if pair.col == n:
                return n
            colors[vertex] = pair.col
        for u, v in self.graph.edges:
            if u in colors and v in colors and colors[u] == colors[v]:
                return n
        return len(set(colors.values()))

    def round_strategy(self, history: History) -> MixedStrategy:
        t = len(history) + 1
        if t > self.horizon:
            raise InputError("history extends beyond the horizon")
        if t < self.horizon:
            return MixedStrategy.pure(1, self.n_actions)
        score = self.coloring_score(history)
        n = self.n_actions
        p_top = 1 - Fraction(score, n)
        weights = [Fraction(0)] * n
        weights[0] = Fraction(score, n)
        weights[n - 1] += p_top
        return MixedStrategy(tuple(weights))


def coloring_leader_gpa(graph: Graph) -> tuple[ColoringLeaderGPA, BimatrixGame]:
    """The coloring leader plus its companion game (play for T = n rounds).

    The follower is paid 1 only on the joint action (n, n); the leader's
    payoffs are identically zero (they play no role in the construction).
    """
    n = graph.n
    zero = [[0] * n for _ in range(n)]
    m2 = [[0] * n for _ in range(n)]
    m2[n - 1][n - 1] = 1
    game = validate_game(zero, m2)
    return ColoringLeaderGPA(graph), game
