"""Hardness generators and audits: reduction, covers, grids, coloring."""

from __future__ import annotations

import itertools
from fractions import Fraction

import pytest

from repstack import (
    BudgetExceeded,
    DimensionMismatch,
    Graph,
    GraphTooSmall,
    InvalidCover,
    MixedStrategy,
    balanced_vertex_cover,
    best_response,
    coloring_leader_gpa,
    cover_strategies,
    graph_from_text,
    graph_to_text,
    grid_audit_player3,
    player3_audit,
    reduce_graph,
)
from repstack.core import InputError

F = Fraction

CYCLE4 = Graph(4, ((1, 2), (2, 3), (3, 4), (4, 1)))
K4 = Graph(4, ((1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)))
TRIANGLE = Graph(3, ((1, 2), (2, 3), (1, 3)))
PATH3 = Graph(3, ((1, 2), (2, 3)))
EDGELESS = Graph(4, ())


def test_graph_validation() -> None:
    with pytest.raises(InputError):
        Graph(3, ((1, 1),))
    with pytest.raises(InputError):
        Graph(3, ((1, 4),))
    with pytest.raises(InputError):
        Graph(3, ((1, 2), (2, 1)))


def test_graph_text_round_trip() -> None:
    text = graph_to_text(CYCLE4)
    assert graph_from_text(text) == CYCLE4
    with pytest.raises(InputError):
        graph_from_text("4 2\n1 2\n")  # declares 2 edges, has 1


def test_reduce_graph_shapes_and_values() -> None:
    game3 = reduce_graph(CYCLE4)
    assert game3.strategy_counts == (4, 4, 9)
    # Vertex action not colliding with either player's vertex pays n/(n-2).
    assert game3.payoff3(1, 2, 3) == F(4, 2)
    # Players 1 and 2 are paid only under the safe action t0.
    for r in range(1, 5):
        for s in range(1, 5):
            assert game3.payoff1(r, s, 0) == 1
            assert game3.payoff2(r, s, 0) == 1
            for t in range(1, 9):
                assert game3.payoff1(r, s, t) == 0
    assert game3.payoff3(1, 1, 0) == 1


def test_reduce_graph_collision_rule() -> None:
    game3 = reduce_graph(CYCLE4)
    n = CYCLE4.n
    for v in range(1, n + 1):
        for w in range(1, n + 1):
            assert game3.payoff3(v, w, v) == 0
            assert game3.payoff3(v, w, w) == 0


def test_reduce_graph_edge_rule_ignores_second_player() -> None:
    game3 = reduce_graph(CYCLE4)
    n = CYCLE4.n
    for index, (u, w) in enumerate(CYCLE4.edges):
        t = n + 1 + index
        for r in range(1, n + 1):
            expected = F(0) if r in (u, w) else F(4, 2)
            for s in range(1, n + 1):
                assert game3.payoff3(r, s, t) == expected


def test_reduce_graph_triangle_entries() -> None:
    game3 = reduce_graph(TRIANGLE)
    values = {
        game3.payoff3(r, s, t)
        for r in range(1, 4)
        for s in range(1, 4)
        for t in range(game3.strategy_counts[2])
    }
    assert values == {F(0), F(1), F(3)}


def test_reduce_graph_too_small() -> None:
    with pytest.raises(GraphTooSmall):
        reduce_graph(Graph(2, ((1, 2),)))


def test_balanced_vertex_cover_examples() -> None:
    assert balanced_vertex_cover(CYCLE4) == (1, 3)
    assert balanced_vertex_cover(K4) is None
    assert balanced_vertex_cover(EDGELESS) == ()


def test_balanced_vertex_cover_budget() -> None:
    with pytest.raises(BudgetExceeded):
        balanced_vertex_cover(Graph(25, ()), max_n=20)


def _bitmask_balanced_cover(graph: Graph) -> bool:
    """Independent re-implementation: scan all subsets as bitmasks."""
    best = None
    for mask in range(1 << graph.n):
        if all(
            mask & (1 << (u - 1)) or mask & (1 << (v - 1)) for u, v in graph.edges
        ):
            size = bin(mask).count("1")
            best = size if best is None else min(best, size)
    return best is not None and best <= graph.n // 2


@pytest.mark.parametrize("n,edge_prob_percent", [(4, 40), (5, 50), (6, 60), (7, 35)])
def test_balanced_vertex_cover_agrees_with_bitmask(n: int, edge_prob_percent: int) -> None:
    import random

    rng = random.Random(n * 100 + edge_prob_percent)
    for _ in range(10):
        edges = tuple(
            (u, v)
            for u, v in itertools.combinations(range(1, n + 1), 2)
            if rng.randint(1, 100) <= edge_prob_percent
        )
        graph = Graph(n, edges)
        assert (balanced_vertex_cover(graph) is not None) == _bitmask_balanced_cover(
            graph
        )


def test_cover_strategies_cycle4() -> None:
    p1, p2 = cover_strategies(CYCLE4, (1, 3))
    assert p1.weights == (F(1, 2), F(0), F(1, 2), F(0))
    assert p2.weights == (F(0), F(1, 2), F(0), F(1, 2))


def test_cover_strategies_pads_small_covers() -> None:
    p1, p2 = cover_strategies(EDGELESS, ())
    assert p1.weights == (F(1, 2), F(1, 2), F(0), F(0))
    assert p2.weights == (F(0), F(0), F(1, 2), F(1, 2))
    assert all(w in (F(0), F(1, 2)) for w in p1.weights)


def test_cover_strategies_odd_vertex_count() -> None:
    graph = Graph(5, ((1, 2),))
    p1, p2 = cover_strategies(graph, (1,))
    assert p1.weights == (F(1, 2), F(1, 2), F(0), F(0), F(0))
    assert p2.weights == (F(0), F(0), F(1, 3), F(1, 3), F(1, 3))


def test_cover_strategies_rejects_non_cover() -> None:
    with pytest.raises(InvalidCover):
        cover_strategies(CYCLE4, (1, 2))  # misses edge (3, 4)
    with pytest.raises(InvalidCover):
        cover_strategies(CYCLE4, (1, 2, 3))  # too large for n/2 = 2


def test_player3_audit_on_cover_point() -> None:
    game3 = reduce_graph(CYCLE4)
    p1, p2 = cover_strategies(CYCLE4, (1, 3))
    action, value = player3_audit(game3, p1, p2)
    assert value == 1
    assert action == 0 and game3.p3_label(action) == "t0"


def test_player3_audit_point_masses() -> None:
    game3 = reduce_graph(CYCLE4)
    point = MixedStrategy.pure(1, 4)
    action, value = player3_audit(game3, point, point)
    assert value == F(4, 2)
    assert game3.p3_label(action).startswith("tv")


def test_player3_audit_edge_actions_ignore_second_player() -> None:
    game3 = reduce_graph(CYCLE4)
    p1 = MixedStrategy.pure(1, 4)
    values = []
    for p2_vertex in range(1, 5):
        p2 = MixedStrategy.pure(p2_vertex, 4)
        edge_values = [
            sum(
                p1.probability(r) * p2.probability(s) * game3.payoff3(r, s, t)
                for r in range(1, 5)
                for s in range(1, 5)
            )
            for t in range(5, 9)
        ]
        values.append(edge_values)
    assert all(v == values[0] for v in values)


def test_player3_audit_dimension_mismatch() -> None:
    game3 = reduce_graph(CYCLE4)
    with pytest.raises(DimensionMismatch):
        player3_audit(game3, MixedStrategy.pure(1, 3), MixedStrategy.pure(1, 4))


def test_grid_audit_resolution_one_is_pure() -> None:
    game3 = reduce_graph(TRIANGLE)
    worst = grid_audit_player3(game3, 1)
    # Independent computation: min over pure pairs of max over actions.
    expected = min(
        max(
            game3.payoff3(r, s, t) for t in range(game3.strategy_counts[2])
        )
        for r in range(1, 4)
        for s in range(1, 4)
    )
    assert worst == expected


def test_grid_audit_refines_monotonically() -> None:
    game3 = reduce_graph(TRIANGLE)
    coarse = grid_audit_player3(game3, 2)
    fine = grid_audit_player3(game3, 4)
    assert fine <= coarse


def test_grid_audit_contains_cover_point() -> None:
    game3 = reduce_graph(CYCLE4)
    worst = grid_audit_player3(game3, 2)
    assert worst <= 1  # the balanced-cover strategies sit on this grid


def test_grid_audit_matches_exhaustive_audit() -> None:
    game3 = reduce_graph(TRIANGLE)
    resolution = 2
    grid = [
        MixedStrategy((F(a, 2), F(b, 2), F(c, 2)))
        for a in range(3)
        for b in range(3 - a)
        for c in [2 - a - b]
    ]
    expected = min(
        player3_audit(game3, p1, p2)[1] for p1 in grid for p2 in grid
    )
    assert grid_audit_player3(game3, resolution) == expected


def test_grid_audit_budget() -> None:
    game3 = reduce_graph(K4)
    with pytest.raises(BudgetExceeded):
        grid_audit_player3(game3, 8, budget=100)


def test_grid_audit_k4_exceeds_threshold() -> None:
    game3 = reduce_graph(K4)
    worst = grid_audit_player3(game3, 8)
    assert worst > 1 + F(1, (4 - 2) * 4 ** (5 - 1))
    assert worst == F(9, 8)


def test_coloring_leader_on_path_graph() -> None:
    from repstack import ActionPair

    leader, game = coloring_leader_gpa(PATH3)
    assert game.rows == game.cols == 3
    assert game.m2[2][2] == 1
    result = best_response(leader, game, 3)
    # A path on three vertices is 2-colorable on its first two vertices, so
    # the follower secures leader-mix probability (1 - 2/3) on the last round.
    assert result.follower_value == F(1, 3)
    history = ()
    cols = []
    for t in range(3):
        cols.append(result.follower_policy[history])
        if t < 2:  # rounds before the last: leader plays pure action 1
            (row,) = leader.round_strategy(history).support()
            history = history + (ActionPair(row, cols[-1]),)
    assert len(set(cols[:2])) == 2  # the two colored vertices differ
    assert cols[2] == 3  # final round plays the top action


def test_coloring_leader_score_rules() -> None:
    from repstack import ActionPair

    leader, _ = coloring_leader_gpa(PATH3)
    # Playing the top action early counts as an invalid encoding.
    early_top = (ActionPair(1, 3), ActionPair(1, 1))
    assert leader.coloring_score(early_top) == 3
    strategy = leader.round_strategy(early_top)
    assert strategy.probability(3) == 0
    assert strategy.probability(1) == 1
    # An invalid coloring (same color across an edge) also scores n.
    invalid = (ActionPair(1, 1), ActionPair(1, 1))
    assert leader.coloring_score(invalid) == 3
    valid = (ActionPair(1, 1), ActionPair(1, 2))
    assert leader.coloring_score(valid) == 2
    strategy = leader.round_strategy(valid)
    assert strategy.probability(3) == F(1, 3)
    assert strategy.probability(1) == F(2, 3)


def test_three_player_game_json_is_stable() -> None:
    game3 = reduce_graph(CYCLE4)
    assert game3.to_json() == reduce_graph(CYCLE4).to_json()
    assert '"strategy_counts":[4,4,9]' in game3.to_json()
