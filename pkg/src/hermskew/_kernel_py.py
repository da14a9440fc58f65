"""Pure-Python Bron-Kerbosch kernel; used when the compiled one is unavailable.

Same signature and traversal order as ``_kernel.run`` so both backends emit
identical clique sequences.
"""
from __future__ import annotations

import sys

import numpy as np

from .graph import words_to_int


def run(adj, R, P, E, pivot, sink=None, emit=None, max_nodes=0):
    n = adj.shape[0]
    rows = [words_to_int(adj[v]) for v in range(n)]
    hist = np.zeros(n + 1, dtype=np.int64)
    emit_sizes = None if emit is None else {int(k) for k in np.flatnonzero(emit)}
    nodes = 0
    stopped = False
    if sys.getrecursionlimit() < n + 100:
        sys.setrecursionlimit(n + 100)

    def report(R):
        hist[len(R)] += 1
        if sink is not None and (emit_sizes is None or len(R) in emit_sizes):
            sink(tuple(sorted(R)))

    def expand(R, P, E):
        nonlocal nodes, stopped
        nodes += 1
        if max_nodes and nodes > max_nodes:
            stopped = True
            return
        if not P:
            if not E:
                report(R)
            return
        if pivot:
            best, best_score = -1, -1
            pool = P | E
            while pool:
                low = pool & -pool
                pool ^= low
                u = low.bit_length() - 1
                score = (P & rows[u]).bit_count()
                if score > best_score:
                    best, best_score = u, score
            cand = P & ~rows[best]
        else:
            cand = P
        while cand:
            low = cand & -cand
            cand ^= low
            v = low.bit_length() - 1
            row = rows[v]
            expand(R + [v], P & row, E & row)
            if stopped:
                return
            P &= ~low
            E |= low

    expand(list(R), words_to_int(P), words_to_int(E))
    return hist, nodes, not stopped
