"""Digraph type, text format, field encodings, and graph reductions."""

import random

import pytest

from fnfdso.errors import (
    EdgeAbsent,
    EdgeAlreadyPresent,
    GraphError,
    ScriptError,
    WeightOutOfRange,
)
from fnfdso.field import Field, sample_prime
from fnfdso.graphenc import (
    Digraph,
    apply_edge_change,
    expand_weights,
    format_edge_list,
    parse_edge_list,
    random_digraph,
    replace_in_edges,
    replace_out_edges,
    sample_encoding,
    split_vertices,
)
from fnfdso.matrix import mat_mul

from reference import ref_bfs_dists, ref_dijkstra_dists


# --- Digraph ----------------------------------------------------------------


def test_digraph_basics():
    g = Digraph(3)
    g.add_edge(0, 1)
    g.add_edge(1, 2)
    assert g.has_edge(0, 1) and not g.has_edge(1, 0)
    assert g.out_targets(1) == {2}
    assert g.in_sources(1) == {0}
    assert g.sorted_edges() == [(0, 1), (1, 2)]
    g.remove_edge(0, 1)
    assert not g.has_edge(0, 1)


def test_digraph_rejects_self_loops_and_duplicates():
    g = Digraph(3)
    with pytest.raises(GraphError):
        g.add_edge(1, 1)
    g.add_edge(0, 2)
    with pytest.raises(EdgeAlreadyPresent):
        g.add_edge(0, 2)
    with pytest.raises(EdgeAbsent):
        g.remove_edge(2, 0)
    with pytest.raises(GraphError):
        g.add_edge(0, 3)
    with pytest.raises(GraphError):
        g.add_edge(-1, 0)


def test_digraph_weight_bounds():
    g = Digraph(3, weight_bound=4)
    g.add_edge(0, 1, 4)
    assert g.weight(0, 1) == 4
    with pytest.raises(WeightOutOfRange):
        g.add_edge(1, 2, 5)
    with pytest.raises(WeightOutOfRange):
        g.add_edge(1, 2, 0)
    unweighted = Digraph(2)
    assert unweighted.weight_bound == 1
    with pytest.raises(WeightOutOfRange):
        unweighted.add_edge(0, 1, 2)


def test_digraph_copy_is_independent():
    g = Digraph(3, weight_bound=2)
    g.add_edge(0, 1, 2)
    h = g.copy()
    h.add_edge(1, 2, 1)
    assert not g.has_edge(1, 2)
    assert g.weights == {(0, 1): 2}
    assert h == h.copy()
    assert g != h


def test_random_digraph_extremes_and_determinism():
    empty = random_digraph(5, 0.0, 1, random.Random(1))
    assert not empty.edges
    full = random_digraph(5, 1.0, 1, random.Random(1))
    assert len(full.edges) == 5 * 4
    a = random_digraph(9, 0.4, 3, random.Random(7))
    b = random_digraph(9, 0.4, 3, random.Random(7))
    assert a == b


# --- text format ------------------------------------------------------------


def test_format_known_unweighted():
    g = Digraph(2)
    g.add_edge(0, 1)
    assert format_edge_list(g) == "2 1\n1 2\n"


def test_format_known_weighted():
    g = Digraph(3, weight_bound=5)
    g.add_edge(2, 0, 3)
    g.add_edge(0, 1, 1)
    assert format_edge_list(g) == "3 2 5\n1 2 1\n3 1 3\n"


def test_parse_known():
    g = parse_edge_list("2 1\n1 2\n")
    assert g.n == 2 and g.edges == {(0, 1)} and g.weight_bound == 1
    w = parse_edge_list("3 1 4\n3 1 2\n")
    assert w.weight_bound == 4 and w.weight(2, 0) == 2


def test_round_trip_is_byte_identical():
    rng = random.Random(42)
    for bound in (1, 3):
        for _ in range(10):
            g = random_digraph(rng.randint(1, 12), rng.random(), bound, rng)
            text = format_edge_list(g)
            back = parse_edge_list(text)
            assert back == g
            assert format_edge_list(back) == text


@pytest.mark.parametrize(
    "text,lineno",
    [
        ("", 1),
        ("2\n", 1),
        ("2 1 2 9\n1 2 1\n", 1),
        ("x 1\n1 2\n", 1),
        ("0 0\n", 1),
        ("2 1\n1 2 1\n", 2),
        ("2 1 3\n1 2\n", 2),
        ("2 1\n1 3\n", 2),
        ("2 1\n0 1\n", 2),
        ("2 1\n1 1\n", 2),
        ("2 2\n1 2\n1 2\n", 3),
        ("2 2\n1 2\n", 2),
        ("2 0\n1 2\n", 2),
        ("2 1 2\n1 2 3\n", 2),
    ],
)
def test_parse_errors_carry_line_numbers(text, lineno):
    with pytest.raises(ScriptError) as info:
        parse_edge_list(text)
    assert info.value.lineno == lineno


# --- encodings --------------------------------------------------------------


FIELD = Field(1_000_003)


def test_encoding_support_and_values():
    rng = random.Random(3)
    g = random_digraph(7, 0.35, 1, rng)
    enc = sample_encoding(g, FIELD, rng)
    p = FIELD.p
    for u in range(7):
        for v in range(7):
            entry = enc.matrix.data[u][v]
            if u == v or g.has_edge(u, v):
                assert entry == enc.x[(u, v)] * enc.y[v] % p
                assert entry != 0
            else:
                assert entry == 0
    assert all(val != 0 for val in enc.x.values())
    assert all(val != 0 for val in enc.y.values())


def test_encoding_deterministic_per_seed():
    g = random_digraph(6, 0.4, 1, random.Random(11))
    a = sample_encoding(g, FIELD, random.Random(5))
    b = sample_encoding(g, FIELD, random.Random(5))
    assert a.matrix.data == b.matrix.data and a.x == b.x and a.y == b.y


def min_power_dists(enc, horizon):
    """min k in [0, horizon] with (A^k)_{u,v} != 0, None if all zero."""
    n = enc.graph.n
    dists = [[None] * n for _ in range(n)]
    for v in range(n):
        dists[v][v] = 0
    power = enc.matrix
    for k in range(1, horizon + 1):
        for u in range(n):
            for v in range(n):
                if dists[u][v] is None and power.data[u][v] != 0:
                    dists[u][v] = k
        if k < horizon:
            power = mat_mul(power, enc.matrix)
    return dists


def test_min_nonzero_power_matches_bfs_distance():
    # The scalars are fresh per position, so nonzero pattern == reachability
    # within k steps holds with high probability; a 20-bit-plus prime keeps
    # the failure chance negligible at these sizes.
    rng = random.Random(2024)
    field = Field(sample_prime(12, 1, rng))
    for _ in range(20):
        n = rng.randint(2, 12)
        g = random_digraph(n, rng.choice([0.15, 0.35, 0.7]), 1, rng)
        enc = sample_encoding(g, field, rng)
        got = min_power_dists(enc, n - 1)
        for u in range(n):
            want = ref_bfs_dists(n, g.edges, u)
            for v in range(n):
                if want[v] is not None and want[v] <= n - 1:
                    assert got[u][v] == want[v]
                else:
                    assert got[u][v] is None


def test_edge_change_insert_and_delete():
    rng = random.Random(9)
    g = Digraph(4)
    g.add_edge(0, 1)
    enc = sample_encoding(g, FIELD, rng)
    u, v, val = apply_edge_change(enc, 1, 2, "insert", rng)
    assert (u, v) == (1, 2) and val != 0
    assert enc.matrix.data[1][2] == val == enc.x[(1, 2)] * enc.y[2] % FIELD.p
    assert g.has_edge(1, 2)
    u, v, val = apply_edge_change(enc, 1, 2, "delete", rng)
    assert val == 0 and enc.matrix.data[1][2] == 0
    assert not g.has_edge(1, 2) and (1, 2) not in enc.x


def test_edge_change_errors():
    rng = random.Random(9)
    g = Digraph(3)
    g.add_edge(0, 1)
    enc = sample_encoding(g, FIELD, rng)
    with pytest.raises(EdgeAlreadyPresent):
        apply_edge_change(enc, 0, 1, "insert", rng)
    with pytest.raises(EdgeAbsent):
        apply_edge_change(enc, 1, 0, "delete", rng)
    with pytest.raises(GraphError):
        apply_edge_change(enc, 2, 2, "insert", rng)
    with pytest.raises(ValueError):
        apply_edge_change(enc, 1, 2, "toggle", rng)
    weighted = sample_encoding(Digraph(3, weight_bound=2), FIELD, rng)
    with pytest.raises(GraphError):
        apply_edge_change(weighted, 0, 1, "insert", rng)


def test_replace_out_edges_consistency():
    rng = random.Random(31)
    g = random_digraph(6, 0.5, 1, rng)
    enc = sample_encoding(g, FIELD, rng)
    diag = enc.matrix.data[2][2]
    old_row, new_row = replace_out_edges(enc, 2, {0, 4}, rng)
    assert g.out_targets(2) == {0, 4}
    assert old_row[2] == diag
    assert enc.matrix.row(2) == new_row
    assert new_row[2] == diag
    for t in range(6):
        if t in {0, 4}:
            assert new_row[t] == enc.x[(2, t)] * enc.y[t] % FIELD.p != 0
        elif t != 2:
            assert new_row[t] == 0 and (2, t) not in enc.x
    with pytest.raises(GraphError):
        replace_out_edges(enc, 2, {2}, rng)
    with pytest.raises(GraphError):
        replace_out_edges(enc, 2, {6}, rng)


def test_replace_in_edges_consistency():
    rng = random.Random(32)
    g = random_digraph(6, 0.5, 1, rng)
    enc = sample_encoding(g, FIELD, rng)
    diag = enc.matrix.data[3][3]
    old_col, new_col = replace_in_edges(enc, 3, {1, 5}, rng)
    assert g.in_sources(3) == {1, 5}
    assert enc.matrix.col(3) == new_col
    assert new_col[3] == diag
    for s in range(6):
        if s in {1, 5}:
            assert new_col[s] == enc.x[(s, 3)] * enc.y[3] % FIELD.p != 0
        elif s != 3:
            assert new_col[s] == 0 and (s, 3) not in enc.x
    assert old_col[3] == diag


# --- reductions -------------------------------------------------------------


def test_expand_weights_tiny_example():
    g = Digraph(2, weight_bound=2)
    g.add_edge(0, 1, 2)
    out, exp = expand_weights(g)
    assert out.n == 4
    # chains 0_2 -> 0_1 and 1_2 -> 1_1, plus the edge entering two up
    assert out.edges == {(1, 0), (3, 2), (0, 3)}
    assert exp.vertex(0) == 0 and exp.vertex(1) == 2
    assert exp.edge(0, 1, 2) == (0, 3)


def test_expand_weights_preserves_distances():
    rng = random.Random(77)
    for _ in range(12):
        n = rng.randint(2, 8)
        bound = rng.randint(1, 3)
        g = random_digraph(n, 0.4, bound, rng)
        out, exp = expand_weights(g)
        wedges = {(u, v): g.weight(u, v) for (u, v) in g.edges}
        for s in range(n):
            want = ref_dijkstra_dists(n, wedges, s)
            got = ref_bfs_dists(out.n, out.edges, exp.vertex(s))
            for t in range(n):
                assert got[exp.vertex(t)] == want[t]


def test_expand_weights_failure_mapping():
    # removing the image of a weighted edge removes exactly that edge's paths
    rng = random.Random(78)
    g = random_digraph(6, 0.5, 3, rng)
    out, exp = expand_weights(g)
    wedges = {(u, v): g.weight(u, v) for (u, v) in g.edges}
    for u, v in list(g.edges)[:4]:
        image = exp.edge(u, v, g.weight(u, v))
        for s in range(g.n):
            want = ref_dijkstra_dists(g.n, wedges, s, banned_edges={(u, v)})
            got = ref_bfs_dists(out.n, out.edges, exp.vertex(s), banned_edges={image})
            for t in range(g.n):
                assert got[exp.vertex(t)] == want[t]


def test_split_vertices_tiny_example():
    g = Digraph(2)
    g.add_edge(0, 1)
    out, split = split_vertices(g)
    assert out.n == 4
    assert out.edges == {(0, 1), (2, 3), (1, 2)}
    assert split.source(1) == 2 and split.target(1) == 3
    assert split.vertex_failure(0) == (0, 1)
    assert split.edge_failure(0, 1) == (1, 2)
    assert split.distance_back(3) == 1
    assert split.distance_back(None) is None
    with pytest.raises(ValueError):
        split.distance_back(2)


def test_split_vertices_preserves_distances():
    rng = random.Random(79)
    for _ in range(12):
        n = rng.randint(2, 9)
        g = random_digraph(n, 0.35, 1, rng)
        out, split = split_vertices(g)
        for s in range(n):
            want = ref_bfs_dists(n, g.edges, s)
            got = ref_bfs_dists(out.n, out.edges, split.source(s))
            for t in range(n):
                assert split.distance_back(got[split.target(t)]) == want[t]


def test_split_vertices_failure_mappings():
    rng = random.Random(80)
    g = random_digraph(7, 0.4, 1, rng)
    out, split = split_vertices(g)
    # vertex failure == failing the inner edge of the split pair
    for banned in range(g.n):
        for s in range(g.n):
            want = ref_bfs_dists(g.n, g.edges, s, banned_vertices={banned})
            if s == banned:
                continue
            got = ref_bfs_dists(
                out.n,
                out.edges,
                split.source(s),
                banned_edges={split.vertex_failure(banned)},
            )
            for t in range(g.n):
                if t == banned:
                    assert got[split.target(t)] is None
                else:
                    assert split.distance_back(got[split.target(t)]) == want[t]
    # edge failure maps to the out-to-in image
    for u, v in list(g.edges)[:5]:
        for s in range(g.n):
            want = ref_bfs_dists(g.n, g.edges, s, banned_edges={(u, v)})
            got = ref_bfs_dists(
                out.n,
                out.edges,
                split.source(s),
                banned_edges={split.edge_failure(u, v)},
            )
            for t in range(g.n):
                assert split.distance_back(got[split.target(t)]) == want[t]


def test_split_rejects_weighted():
    g = Digraph(3, weight_bound=2)
    with pytest.raises(GraphError):
        split_vertices(g)


def test_expand_then_split_composition():
    rng = random.Random(81)
    g = random_digraph(5, 0.5, 3, rng)
    expanded, exp = expand_weights(g)
    out, split = split_vertices(expanded)
    wedges = {(u, v): g.weight(u, v) for (u, v) in g.edges}
    for banned in range(g.n):
        inner = split.vertex_failure(exp.vertex(banned))
        # failing only the level-1 copy blocks travel through banned
        for s in range(g.n):
            if s == banned:
                continue
            want = ref_dijkstra_dists(g.n, wedges, s, banned_vertices={banned})
            got = ref_bfs_dists(
                out.n,
                out.edges,
                split.source(exp.vertex(s)),
                banned_edges={inner},
            )
            for t in range(g.n):
                if t == banned:
                    continue
                assert split.distance_back(got[split.target(exp.vertex(t))]) == want[t]
