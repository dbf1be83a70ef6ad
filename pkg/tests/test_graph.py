import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from beamplace.geometry import SatelliteConfig, UserSet, pairwise_separation
from beamplace.graph import (
    CliqueCover,
    VisibilityGraph,
    build_graph,
    complement,
    is_clique,
    is_proper_coloring,
    read_edgelist,
    write_edgelist,
)

from oracles import dot_angle, ray_to_ground, rotate

SAT = SatelliteConfig()


def random_users(rng, n, radius=1.5):
    return UserSet(rng.uniform(-radius, radius, n), rng.uniform(-radius, radius, n))


def test_single_user_graph():
    g = build_graph(UserSet([0.0], [0.0]), SAT)
    assert g.n == 1 and g.n_edges == 0


def test_boundary_separation_is_an_edge():
    sp = SAT.position
    nadir = -sp / np.linalg.norm(sp)
    d1 = rotate(nadir, np.array([0.0, 1.0, 0.0]), math.radians(0.7))
    d2 = rotate(d1, np.cross(d1, [0.0, 0.0, 1.0]), math.radians(1.6))
    users = UserSet.from_ecef(np.stack([ray_to_ground(sp, d1), ray_to_ground(sp, d2)]))
    sep = pairwise_separation(users, SAT)[0, 1]
    assert sep == pytest.approx(1.6, abs=1e-8)
    # alpha_max chosen so that alpha_max / 2 equals the computed separation exactly
    tight = SatelliteConfig(alpha_max=2.0 * sep)
    assert build_graph(users, tight).adj[0, 1]
    looser = SatelliteConfig(alpha_max=2.0 * np.nextafter(sep, 0.0))
    assert not build_graph(users, looser).adj[0, 1]


def test_adjacency_matches_dot_product_oracle():
    rng = np.random.default_rng(11)
    users = random_users(rng, 10, radius=0.1)
    g = build_graph(users, SAT)
    sp = SAT.position
    for i in range(10):
        for k in range(10):
            if i == k:
                assert not g.adj[i, k]
                continue
            want = math.degrees(dot_angle(sp, users.ecef[i], users.ecef[k])) <= SAT.alpha_max / 2
            assert g.adj[i, k] == want
    assert 0 < g.n_edges < 45


def test_graph_invariants_random():
    rng = np.random.default_rng(3)
    g = build_graph(random_users(rng, 60, 0.3), SAT)
    assert not g.adj.diagonal().any()
    assert np.array_equal(g.adj, g.adj.T)
    assert g.alpha_max == SAT.alpha_max


def test_graph_monotone_in_alpha_max():
    rng = np.random.default_rng(4)
    users = random_users(rng, 80, 0.4)
    prev = None
    for a in [1.0, 2.0, 3.2, 5.0]:
        adj = build_graph(users, SatelliteConfig(alpha_max=a)).adj
        if prev is not None:
            assert not (prev & ~adj).any()
        prev = adj


def test_visibility_graph_rejects_bad_matrices():
    with pytest.raises(ValueError):
        VisibilityGraph(np.eye(3, dtype=bool))
    with pytest.raises(ValueError):
        VisibilityGraph(np.array([[0, 1], [0, 0]], dtype=bool))


def test_is_clique_examples():
    tri = VisibilityGraph.from_edges(3, [(0, 1), (1, 2)])
    assert is_clique(tri, [])
    assert is_clique(tri, [2])
    assert not is_clique(tri, [0, 1, 2])
    assert is_clique(VisibilityGraph.complete(4), [0, 1, 2, 3])
    assert not is_clique(VisibilityGraph.complete(4), [1, 1])
    with pytest.raises(IndexError):
        is_clique(tri, [0, 3])


def test_complement_examples():
    assert complement(VisibilityGraph.complete(5)) == VisibilityGraph.empty(5)
    assert complement(VisibilityGraph.empty(3)) == VisibilityGraph.complete(3)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 20), st.integers(0, 2**32 - 1))
def test_complement_involution(n, seed):
    rng = np.random.default_rng(seed)
    upper = np.triu(rng.random((n, n)) < 0.4, 1)
    g = VisibilityGraph(upper | upper.T)
    assert complement(complement(g)) == g


def test_cover_validation_and_coloring_duality():
    g = VisibilityGraph.from_edges(4, [(0, 1), (2, 3), (1, 2)])
    good = CliqueCover.of([[0, 1], [2, 3]])
    assert good.is_valid(g)
    assert is_proper_coloring(complement(g), good.to_coloring(4))
    assert "not a clique" in " ".join(CliqueCover.of([[0, 2], [1], [3]]).violations(g))
    assert "uncovered" in " ".join(CliqueCover.of([[0, 1]]).violations(g))
    assert "several" in " ".join(CliqueCover.of([[0, 1], [1, 2], [3]]).violations(g))
    assert not is_proper_coloring(complement(g), CliqueCover.of([[0, 2], [1], [3]]).to_coloring(4))


def test_edgelist_round_trip(tmp_path):
    rng = np.random.default_rng(8)
    g = build_graph(random_users(rng, 30, 0.2), SAT)
    path = tmp_path / "g.txt"
    write_edgelist(g, path)
    text = path.read_text().splitlines()
    assert text[0] == "n 30"
    assert len(text) == 1 + g.n_edges
    assert read_edgelist(path) == g


def test_edgelist_errors(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("0 1\n")
    with pytest.raises(ValueError, match="header"):
        read_edgelist(p)
    p.write_text("n 3\n0 1 2\n")
    with pytest.raises(ValueError, match="line 2"):
        read_edgelist(p)
