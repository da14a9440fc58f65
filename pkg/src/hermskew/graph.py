"""Undirected simple graphs on 0..n-1 stored as Python-int bitset rows.

``rows[v]`` has bit ``u`` set iff u and v are adjacent.  :meth:`SkewGraph.words`
exports the same rows as a C-contiguous ``(n, W)`` uint64 array for the
compiled kernel.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np


class GraphError(ValueError):
    pass


class EmptyInput(GraphError):
    pass


def bits(vs) -> int:
    out = 0
    for v in vs:
        out |= 1 << v
    return out


def members(x: int) -> list[int]:
    out = []
    while x:
        low = x & -x
        out.append(low.bit_length() - 1)
        x ^= low
    return out


def int_to_words(x: int, W: int) -> np.ndarray:
    return np.frombuffer(x.to_bytes(8 * W, "little"), dtype="<u8").astype(np.uint64)


def words_to_int(w: np.ndarray) -> int:
    return int.from_bytes(np.ascontiguousarray(w, dtype="<u8").tobytes(), "little")


@dataclass(eq=False)
class SkewGraph:
    n: int
    rows: list[int]

    def __post_init__(self):
        if len(self.rows) != self.n:
            raise GraphError(f"{len(self.rows)} rows for {self.n} vertices")

    def __eq__(self, other):
        return isinstance(other, SkewGraph) and self.n == other.n and self.rows == other.rows

    @classmethod
    def from_edges(cls, n: int, edges) -> SkewGraph:
        rows = [0] * n
        for u, v in edges:
            if u == v:
                raise GraphError(f"self-loop at {u}")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(n, rows)

    @property
    def all_vertices(self) -> int:
        return (1 << self.n) - 1

    @property
    def W(self) -> int:
        return max(1, (self.n + 63) // 64)

    def neighbors(self, v: int) -> int:
        return self.rows[v]

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.rows[u] >> v & 1)

    def degree(self, v: int) -> int:
        return self.rows[v].bit_count()

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in members(self.rows[u] >> (u + 1) << (u + 1))]

    def edge_count(self) -> int:
        return sum(r.bit_count() for r in self.rows) // 2

    def is_clique(self, vs) -> bool:
        vs = list(vs)
        for i, u in enumerate(vs):
            for v in vs[i + 1:]:
                if u == v or not self.has_edge(u, v):
                    return False
        return True

    def is_maximal_clique(self, vs) -> bool:
        return self.is_clique(vs) and self.common_neighbors(vs) == 0 if vs else self.n == 0

    def words(self) -> np.ndarray:
        W = self.W
        out = np.zeros((self.n, W), dtype=np.uint64)
        for v, r in enumerate(self.rows):
            out[v] = int_to_words(r, W)
        return out

    def complement(self) -> SkewGraph:
        full = self.all_vertices
        return SkewGraph(self.n, [full & ~r & ~(1 << v) for v, r in enumerate(self.rows)])

    def common_neighbors(self, vs) -> int:
        vs = list(vs)
        if not vs:
            raise EmptyInput("common_neighbors needs at least one vertex")
        acc = self.all_vertices
        for v in vs:
            acc &= self.rows[v]
        return acc & ~bits(vs)

    def induced(self, vs) -> SkewGraph:
        vs = list(vs)
        pos = {v: i for i, v in enumerate(vs)}
        return SkewGraph.from_edges(len(vs), [(pos[u], pos[v]) for u, v in self.edges() if u in pos and v in pos])

    def check(self):
        for v, r in enumerate(self.rows):
            if r >> v & 1:
                raise GraphError(f"self-loop at {v}")
            if r >> self.n:
                raise GraphError(f"row {v} has bits beyond n")
            for u in members(r):
                if not self.rows[u] >> v & 1:
                    raise GraphError(f"asymmetric edge {v}-{u}")

    def to_json(self) -> dict:
        return {"n": self.n, "m": self.edge_count(), "edges": self.edges()}

    # -- DIMACS --

    def to_dimacs(self) -> str:
        edges = self.edges()
        out = [f"p edge {self.n} {len(edges)}"]
        out.extend(f"e {u + 1} {v + 1}" for u, v in edges)
        return "\n".join(out) + "\n"

    def write_dimacs(self, path):
        Path(path).write_text(self.to_dimacs())

    @classmethod
    def from_dimacs(cls, text: str) -> SkewGraph:
        n = None
        edges = []
        for lineno, line in enumerate(text.splitlines(), 1):
            parts = line.split()
            if not parts or parts[0] == "c":
                continue
            if parts[0] == "p":
                if len(parts) != 4:
                    raise GraphError(f"line {lineno}: malformed problem line")
                n = int(parts[2])
            elif parts[0] == "e":
                if n is None:
                    raise GraphError(f"line {lineno}: edge before problem line")
                u, v = int(parts[1]) - 1, int(parts[2]) - 1
                if not (0 <= u < n and 0 <= v < n):
                    raise GraphError(f"line {lineno}: vertex out of range")
                edges.append((u, v))
            else:
                raise GraphError(f"line {lineno}: unknown record {parts[0]!r}")
        if n is None:
            raise GraphError("missing problem line")
        return cls.from_edges(n, edges)

    @classmethod
    def read_dimacs(cls, path) -> SkewGraph:
        return cls.from_dimacs(Path(path).read_text())


def build_skew_graph(table) -> SkewGraph:
    """G(X): one vertex per line of ``table``, edges between skew lines."""
    n = len(table)
    full = (1 << n) - 1
    rows = [full & ~m & ~(1 << v) for v, m in enumerate(table.meet_masks)]
    return SkewGraph(n, rows)


def complement(g: SkewGraph) -> SkewGraph:
    return g.complement()


def common_neighbors(g: SkewGraph, vs) -> int:
    return g.common_neighbors(vs)
