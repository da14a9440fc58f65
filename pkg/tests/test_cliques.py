import json
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import geo, stabilizer
from hermskew import cliques
from hermskew.cliques import (
    EmptyPivotPool,
    InvalidStabilizer,
    PreconditionViolated,
    bk_orbits,
    bk_pivot,
    census,
    choose_pivot,
    expand_orbits,
    maximal_cliques,
    moon_moser,
    moon_moser_generators,
    moon_moser_group,
)
from hermskew.geometry import initial_triple
from hermskew.graph import SkewGraph, bits
from hermskew.perms import closure

BACKENDS = cliques.available_backends()


def brute_maximal_cliques(g):
    """Every vertex subset that is a clique and cannot be extended."""
    out = set()
    for mask in range(1 << g.n):
        vs = [v for v in range(g.n) if mask >> v & 1]
        if not all(g.has_edge(a, b) for a, b in combinations(vs, 2)):
            continue
        if any(all(g.has_edge(u, v) for v in vs) for u in range(g.n) if not mask >> u & 1):
            continue
        out.add(tuple(vs))
    return out


@st.composite
def graphs(draw, max_n=10):
    n = draw(st.integers(0, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    p = draw(st.floats(0.1, 0.9))
    flags = draw(st.lists(st.floats(0, 1), min_size=len(pairs), max_size=len(pairs)))
    return SkewGraph.from_edges(n, [e for e, f in zip(pairs, flags) if f < p])


@settings(max_examples=60, deadline=None)
@given(graphs())
def test_bk_matches_brute_force(g):
    for be in BACKENDS:
        found = maximal_cliques(g, backend=be)
        assert len(found) == len(set(found))
        assert set(found) == brute_maximal_cliques(g)


@settings(max_examples=40, deadline=None)
@given(graphs(max_n=12))
def test_backends_agree_in_order(g):
    runs = [maximal_cliques(g, backend=be) for be in BACKENDS]
    assert all(r == runs[0] for r in runs)
    runs = [maximal_cliques(g, backend=be, pivot=False) for be in BACKENDS]
    assert all(r == runs[0] for r in runs)


@settings(max_examples=40, deadline=None)
@given(graphs(max_n=9))
def test_trivial_group_orbits_equal_plain_search(g):
    out = bk_orbits(g, stab=[tuple(range(g.n))])
    assert out.reps == maximal_cliques(g, pivot=False)


def test_triangle():
    g = SkewGraph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
    assert maximal_cliques(g) == [(0, 1, 2)]


def test_empty_graph_census():
    assert census(SkewGraph.from_edges(7, [])).histogram == {1: 7}


def test_choose_pivot():
    g = SkewGraph.from_edges(5, [(0, 1), (0, 2), (0, 3), (0, 4)])
    assert choose_pivot(g, bits([3]), 0) == 3
    assert choose_pivot(g, bits(range(5)), 0) == 0
    assert choose_pivot(g, bits([1, 2]), 0) == 1
    with pytest.raises(EmptyPivotPool):
        choose_pivot(g, 0, 0)


def test_preconditions():
    g = SkewGraph.from_edges(4, [(0, 1), (1, 2)])
    with pytest.raises(PreconditionViolated):
        bk_pivot(g, R=[0, 2])
    with pytest.raises(PreconditionViolated):
        bk_pivot(g, R=[0], P=bits([1]), E=bits([1]))
    with pytest.raises(PreconditionViolated):
        bk_pivot(g, R=[0], P=bits([2]))


def test_q2_census_and_maximality():
    g = geo(2).g
    for be in BACKENDS:
        found = maximal_cliques(g, backend=be)
        assert len(found) == len(set(found)) == 288
        assert all(g.is_maximal_clique(c) for c in found)
        assert census(g, backend=be).histogram == {5: 216, 6: 72}


def test_q3_sampled_maximality():
    g = geo(3).g
    sample = []
    res = bk_pivot(g, sink=sample.append, emit_sizes=[13, 16])
    assert res.histogram[16] == 2268
    assert len(sample) == 181440 + 2268
    rng = np.random.default_rng(0)
    for i in rng.choice(len(sample), 500, replace=False):
        assert g.is_maximal_clique(sample[i])


def test_census_jobs_and_emit(tmp_path):
    g = geo(2).g
    one = census(g, emit_path=tmp_path / "a.txt")
    many = census(g, jobs=3, emit_path=tmp_path / "b.txt")
    assert one.histogram == many.histogram == {5: 216, 6: 72}
    assert (tmp_path / "a.txt").read_text() == (tmp_path / "b.txt").read_text()
    assert len((tmp_path / "a.txt").read_text().splitlines()) == 288
    assert not list(tmp_path.glob("*.part*"))


def test_census_checkpoint_resume(tmp_path):
    g = geo(3).g
    ck = tmp_path / "ck"
    branches = cliques.top_level_branches(g)
    # pretend an earlier run finished the first five branches
    c = cliques.Checkpoint(ck)
    for i, (v, P, E) in enumerate(branches[:5]):
        part = bk_pivot(g, R=[v], P=P, E=E, check=False)
        c.record(i, part.histogram, part.nodes)
    res = census(g, checkpoint=ck)
    assert res.histogram == {7: 5184, 10: 766584, 11: 3447360, 12: 816480, 13: 181440, 16: 2268}
    assert len(ck.read_text().split()) == len(branches)
    assert json.loads((tmp_path / "ck.json").read_text())["histogram"]["16"] == 2268


def test_max_nodes_budget():
    g = geo(3).g
    res = bk_pivot(g, max_nodes=1000)
    assert not res.completed and res.nodes == 1001
    out = bk_orbits(g, initial_triple(3), stab=stabilizer(3), max_nodes=500)
    assert not out.completed


def test_moon_moser_counts():
    for k in range(1, 7):
        g = moon_moser(k)
        assert g.n == 3 * k
        res = bk_pivot(g)
        assert res.total == 3**k
        assert res.histogram == {k: 3**k}


def test_moon_moser_group():
    for k in (1, 2, 3):
        G = moon_moser_group(k)
        assert len(G) == cliques.moon_moser_group_order(k)
        assert len({tuple(r) for r in G}) == len(G)
        assert (G[0] == np.arange(3 * k)).all()
        assert set(map(tuple, G.tolist())) == set(closure(moon_moser_generators(k)))
    assert len(closure(moon_moser_generators(2))) == 72


def test_moon_moser_orbits():
    for k in (2, 3):
        g = moon_moser(k)
        G = moon_moser_group(k)
        out = bk_orbits(g, stab=G)
        assert len(out.reps) == 1
        assert expand_orbits(out.reps, G) == set(maximal_cliques(g))
        gens = moon_moser_generators(k)
        assert expand_orbits(out.reps, gens, generators=True) == set(maximal_cliques(g))


def test_expand_identity():
    reps = [(0, 1), (2,)]
    assert expand_orbits(reps, [(0, 1, 2)]) == {(0, 1), (2,)}


def test_invalid_stabilizer():
    g = geo(2).g
    R = initial_triple(2)
    swap = list(range(27))
    swap[0], swap[1] = 1, 0
    with pytest.raises(InvalidStabilizer):
        bk_orbits(g, R, stab=[tuple(range(27)), tuple(swap)])
    bad = list(range(27))
    bad[20], bad[21] = 21, 20
    if not all(g.has_edge(bad[u], bad[v]) == g.has_edge(u, v) for u in range(27) for v in range(27)):
        with pytest.raises(InvalidStabilizer):
            bk_orbits(g, R, stab=[tuple(range(27)), tuple(bad)])


@pytest.mark.parametrize("backend", BACKENDS)
def test_q2_orbit_coverage(backend):
    g = geo(2).g
    R = initial_triple(2)
    stab = stabilizer(2)
    out = bk_orbits(g, R, stab=stab, backend=backend)
    assert all(g.is_maximal_clique(c) and set(R) <= set(c) for c in out.reps)
    assert expand_orbits(out.reps, stab) == set(maximal_cliques(g, R))


def test_orbit_pivot_variant_runs():
    g = geo(2).g
    R = initial_triple(2)
    out = bk_orbits(g, R, stab=stabilizer(2), orbit_pivot=True)
    assert all(g.is_maximal_clique(c) for c in out.reps)


def test_orbit_checkpoint_callbacks():
    g = geo(3).g
    R = initial_triple(3)
    seen = []
    full = bk_orbits(g, R, stab=stabilizer(3), branch_done=lambda i, h, n: seen.append((i, h, n)))
    merged = {}
    for _, h, _ in seen:
        for k, v in h.items():
            merged[k] = merged.get(k, 0) + v
    assert merged == full.histogram
    skipped = bk_orbits(g, R, stab=stabilizer(3), skip_branches={0})
    assert skipped.total == full.total - sum(seen[0][1].values())
