import os
from functools import lru_cache
from types import SimpleNamespace

import pytest

from hermskew import geometry, perms
from hermskew.field import field_for_q
from hermskew.graph import build_skew_graph

LONG = bool(os.environ.get("HERMSKEW_LONG"))


@lru_cache(maxsize=None)
def geo(q):
    F = field_for_q(q)
    table = geometry.enumerate_lines(F)
    stars = geometry.star_points(table)
    g = build_skew_graph(table)
    return SimpleNamespace(q=q, F=F, table=table, stars=stars, g=g)


@lru_cache(maxsize=None)
def generators(q):
    G = geo(q)
    return perms.builtin_generators(G.F, G.table)


@lru_cache(maxsize=None)
def stabilizer(q):
    return perms.triple_stabilizer(generators(q), geometry.initial_triple(q))


def pytest_collection_modifyitems(config, items):
    if LONG:
        return
    skip = pytest.mark.skip(reason="long run; set HERMSKEW_LONG=1")
    for item in items:
        if "long" in item.keywords:
            item.add_marker(skip)


ACCEPTANCE = []


def record(criterion, passed, detail=""):
    """Log one acceptance line; printed again in the terminal summary."""
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {criterion}: {detail}"
    ACCEPTANCE.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
