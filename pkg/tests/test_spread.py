from itertools import combinations, permutations, product

import pytest

from conftest import geo
from hermskew import spread
from hermskew.field import ZERO
from hermskew.geometry import initial_triple, line_points, lines_meet
from hermskew.spread import (
    NotSkew,
    build_large_skew_set,
    config_outputs,
    extend_to_maximal,
    large_set_size,
    lower_bound_count,
    quadric_config_count,
    quadric_through,
    star_chords,
)


def cfg_for(q):
    G = geo(q)
    return G, quadric_through(*initial_triple(q), G.table)


@pytest.mark.parametrize("q", [2, 3, 4])
def test_quadric_config_structure(q):
    G, cfg = cfg_for(q)
    F, t = G.F, G.table
    ell, m = cfg.surface_lines
    assert len(ell) == len(m) == q + 1
    base = set(initial_triple(q))
    assert base <= set(ell) or base <= set(m)
    for a, b in combinations(ell, 2):
        assert not lines_meet(t[a], t[b], F)
    for a, b in combinations(m, 2):
        assert not lines_meet(t[a], t[b], F)
    for a in ell:
        for b in m:
            assert lines_meet(t[a], t[b], F)
    for r in cfg.ruling_lines:
        assert len(r) == q * q + 1
        for L in r:
            assert all(spread.quadric_value(F, cfg.quadric, p) == ZERO for p in line_points(F, L))
    assert cfg.quadric[next(i for i, c in enumerate(cfg.quadric) if c != ZERO)] == 0


def test_quadric_is_order_independent():
    q = 3
    G = geo(q)
    base = initial_triple(q)
    coeffs = {quadric_through(*p, G.table).quadric for p in permutations(base)}
    assert len(coeffs) == 1


def test_rulings_match_point_pair_scan():
    G, cfg = cfg_for(2)
    found = spread.lines_on_quadric(G.F, cfg.quadric)
    assert found == set(cfg.ruling_lines[0]) | set(cfg.ruling_lines[1])


def test_quadric_rejects_meeting_lines():
    G = geo(2)
    with pytest.raises(NotSkew):
        quadric_through(0, 1, 8, G.table)


@pytest.mark.parametrize("q", [2, 3, 4])
def test_star_chords(q):
    G, cfg = cfg_for(q)
    for ruling in (0, 1):
        pairing = star_chords(cfg, ruling, G.stars, G.table)
        assert len(pairing.chords) == q * (q - 1)
        assert len(pairing.pairs) == q * (q - 1) // 2
        assert all(len(s) == q + 1 for s in pairing.star_points)
        for a, b in pairing.pairs:
            la = {L for s in pairing.star_points[a] for L in G.stars.incidence[s]}
            lb = {L for s in pairing.star_points[b] for L in G.stars.incidence[s]}
            assert la == lb and len(la) == (q + 1) ** 2
        # a chord's star points are where it crosses the opposite surface lines
        opposite = cfg.surface_lines[1 - ruling]
        for s in pairing.star_points:
            assert sum(1 for x in s for L in G.stars.incidence[x] if L in opposite) == q + 1


@pytest.mark.parametrize("q,size", [(2, 6), (3, 13), (4, 23)])
def test_large_skew_set(q, size):
    G, cfg = cfg_for(q)
    t, F = G.table, G.F
    npairs = q * (q - 1) // 2
    for signs in list(product((0, 1), repeat=npairs))[:4]:
        s = build_large_skew_set(cfg, 0, cfg.m[:3], signs, t, G.stars)
        assert len(s) == size == large_set_size(q)
        for a, b in combinations(s.lines, 2):
            assert not lines_meet(t[a], t[b], F)
        assert G.g.is_clique(s.lines)
        assert s.provenance()["signs"] == "".join(map(str, signs))


def test_q2_outputs_already_maximal():
    G, cfg = cfg_for(2)
    for out in config_outputs(cfg, G.table, G.stars):
        clique, steps = extend_to_maximal(out, G.g)
        assert clique == list(out) and steps == []


def test_extend_maximal_unchanged():
    g = geo(2).g
    from hermskew.cliques import maximal_cliques

    c = maximal_cliques(g)[0]
    assert extend_to_maximal(c, g) == (list(c), [])


def test_q4_extensions_are_unique_when_they_exist():
    G, cfg = cfg_for(4)
    outs = config_outputs(cfg, G.table, G.stars)
    assert len(outs) == len(set(outs)) == 1280
    extended = 0
    for out in outs:
        clique, steps = extend_to_maximal(out, G.g)
        assert all(len(st) == 1 for st in steps)
        assert len(clique) in (23, 24)
        extended += len(clique) == 24
    # recorded value: 3/8 of the outputs of a configuration gain one line
    assert extended == 480


def test_lower_bound():
    assert lower_bound_count(2) == 4
    assert lower_bound_count(3) == 64
    assert lower_bound_count(4) == 1280
    assert lower_bound_count(4) * quadric_config_count(4) == 181043200
    assert quadric_config_count(2) == 360
    assert quadric_config_count(3) == 11340


def test_signs_never_jointly_extendable():
    G, cfg = cfg_for(3)
    g = G.g
    outs = config_outputs(cfg, G.table, G.stars)
    assert len(outs) == 64
    for a, b in combinations(outs, 2):
        assert not g.is_clique(sorted(set(a) | set(b)))


def test_q2_multiplicities():
    G = geo(2)
    rep = spread.census_from_quadrics(2, G.table, G.g, G.stars, keep_sets=True)
    assert rep.configs == 360
    assert rep.generated == 1440
    assert rep.distinct == 72
    assert rep.multiplicities == {20: 72}
    assert rep.jointly_extendable_pairs == 0
    from hermskew.cliques import maximal_cliques

    six = {c for c in maximal_cliques(G.g) if len(c) == 6}
    assert set(rep.sets) == six
