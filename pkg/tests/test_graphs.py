import itertools
import json
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fqmap import graphs as G
from fqmap.graphs import Edge, GraphFormatError, HamiltonianGraph


def arrangement_cost(graph, order):
    return sum(abs(order[u] - order[v]) for u, v in graph.pairs())


def test_grid_sizes():
    g = G.grid(2, 2)
    assert (g.n, g.m) == (4, 4) and sorted(g.degrees()) == [2, 2, 2, 2]
    assert G.grid(3, 3).m == 12
    assert G.grid(8, 8).m == 112
    assert G.grid(4, 5, periodic=True).m == 40


def test_grid_is_row_major():
    assert set(G.grid(2, 3).pairs()) == {(0, 1), (1, 2), (3, 4), (4, 5), (0, 3), (1, 4), (2, 5)}


def test_small_lattices():
    h = G.hex_lattice(1, 1)
    assert (h.n, h.m) == (6, 6)
    t = G.tri_lattice(1, 1)
    assert (t.n, t.m) == (3, 3)


def test_lattice_errors():
    with pytest.raises(ValueError):
        G.hex_lattice(0, 3)
    with pytest.raises(ValueError):
        G.tri_lattice(1, 1, periodic=True)


def test_random_regular():
    assert sorted(G.random_regular(2, 3, seed=4).pairs()) == [(0, 1), (0, 2), (1, 2)]
    g = G.random_regular(3, 64, seed=1)
    assert g.m == 96 and set(g.degrees()) == {3}
    with pytest.raises(ValueError):
        G.random_regular(3, 5)


def test_random_regular_is_seeded():
    assert G.random_regular(3, 20, seed=7) == G.random_regular(3, 20, seed=7)
    assert G.random_regular(3, 20, seed=7).pairs() != G.random_regular(3, 20, seed=8).pairs()


def test_margulis():
    assert G.margulis_gabber_galil(8).n == 64
    m2 = G.margulis_gabber_galil(2)
    assert sorted(m2.pairs()) == [(0, 1), (0, 2), (1, 3), (2, 3)]
    for m in (3, 5, 8):
        assert max(G.margulis_gabber_galil(m).degrees()) <= 8


def test_chordal_cycle():
    assert sorted(G.chordal_cycle(5).pairs()) == [(0, 1), (0, 4), (1, 2), (2, 3), (3, 4)]
    assert sorted(G.chordal_cycle(3).pairs()) == [(0, 1), (0, 2), (1, 2)]
    g = G.chordal_cycle(64)
    assert g.n == 64
    chords = [p for p in g.pairs() if (p[1] - p[0]) % 64 not in (1, 63)]
    assert all(p[0] % 2 == 1 and p[1] % 2 == 1 for p in chords)
    assert all(p[0] * p[1] % 64 == 1 for p in chords)


@pytest.mark.parametrize("name", sorted(G.FAMILY_64))
def test_family_has_64_vertices(name):
    g = G.FAMILY_64[name]()
    assert g.n == 64 and g.m > 0


def test_edge_validation():
    assert Edge(3, 1).pair == (1, 3)
    with pytest.raises(ValueError):
        Edge(2, 2)
    with pytest.raises(ValueError):
        Edge(0, 1, coeff="weird")
    with pytest.raises(ValueError):
        Edge(0, 1, hopping=False, interaction=False)
    with pytest.raises(ValueError):
        HamiltonianGraph(2, (Edge(0, 1), Edge(1, 0)))
    with pytest.raises(ValueError):
        HamiltonianGraph(2, (Edge(0, 2),))


def test_model_presets():
    g = G.grid(2, 2)
    full = G.apply_model(g, "full")
    assert all(e.coeff == "complex" and e.hopping and e.interaction for e in full.edges) and all(full.number_terms)
    fh = G.apply_model(g, "fermi-hubbard")
    assert all(e.coeff == "real" and e.interaction for e in fh.edges) and not any(fh.number_terms)
    hop = G.apply_model(g, "hopping")
    assert all(e.hopping and not e.interaction for e in hop.edges) and not any(hop.number_terms)
    with pytest.raises(ValueError):
        G.apply_model(g, "nope")


def test_orders():
    assert G.check_order(None, 3) == (0, 1, 2)
    with pytest.raises(ValueError):
        G.check_order([0, 0, 1], 3)
    assert G.inverse_order([2, 0, 1]) == [1, 2, 0]
    r = G.relabel(G.path(3), [2, 0, 1])
    assert sorted(r.pairs()) == [(0, 1), (0, 2)]


def test_round_trip(tmp_path):
    g = G.apply_model(G.grid(2, 2), "fermi-hubbard")
    path = tmp_path / "g.json"
    G.write_graph(g, path)
    assert G.read_graph(path) == g


def test_file_format_shape(tmp_path):
    path = tmp_path / "g.json"
    G.write_graph(G.grid(2, 2), path)
    data = json.loads(path.read_text())
    assert data["n"] == 4 and data["number_terms"] is True
    u, v, flags = data["edges"][0]
    assert set(flags) == {"coeff", "hopping", "interaction"}


def test_missing_n(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"edges": []}))
    with pytest.raises(GraphFormatError):
        G.read_graph(p)


def test_duplicate_edge_in_file(tmp_path):
    p = tmp_path / "dup.json"
    p.write_text(json.dumps({"n": 3, "number_terms": True, "edges": [[0, 1, {}], [1, 0, {}]]}))
    with pytest.raises(GraphFormatError):
        G.read_graph(p)


def test_malformed_json_has_position(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text('{"n": 3,\n "edges": [[0, 1 {}]]}')
    with pytest.raises(GraphFormatError, match="line 2"):
        G.read_graph(p)


def test_bfs_order_is_bijection():
    g = G.grid(4, 5)
    order = G.bfs_order(g)
    assert sorted(order) == list(range(20))
    assert G.pseudo_peripheral_vertex(G.path(7)) in (0, 6)


def _min_arrangement(graph):
    pairs = np.array(graph.pairs())
    best = None
    for perm in itertools.permutations(range(graph.n)):
        p = np.array(perm)
        c = int(np.abs(p[pairs[:, 0]] - p[pairs[:, 1]]).sum())
        best = c if best is None else min(best, c)
    return best


@pytest.mark.parametrize("rows,cols", [(2, 2), (2, 3), (3, 3)])
def test_mitchison_durbin_is_optimal_on_small_grids(rows, cols):
    g = G.grid(rows, cols)
    md = G.mitchison_durbin_order(rows, cols)
    assert sorted(md) == list(range(rows * cols))
    assert arrangement_cost(g, md) == _min_arrangement(g)


@pytest.mark.parametrize("k,value,row_major", [(5, 116, 120), (6, 200, 210), (8, 472, 504)])
def test_mitchison_durbin_beats_row_major(k, value, row_major):
    g = G.grid(k, k)
    assert arrangement_cost(g, G.mitchison_durbin_order(k, k)) == value
    assert arrangement_cost(g, range(k * k)) == row_major


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 12), st.integers(0, 10_000))
def test_relabel_preserves_structure(n, seed):
    g = G.random_graph(n, 0.4, seed=seed)
    order = list(range(n))
    random.Random(seed).shuffle(order)
    r = G.relabel(g, order)
    assert r.m == g.m
    assert sorted(r.degrees()) == sorted(g.degrees())
    assert {tuple(sorted((order[u], order[v]))) for u, v in g.pairs()} == set(r.pairs())


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 15), st.integers(0, 10_000))
def test_random_graph_connected(n, seed):
    g = G.random_graph(n, 0.1, seed=seed)
    seen = {0}
    stack = [0]
    adj = g.adjacency()
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    assert len(seen) == n
