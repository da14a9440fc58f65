"""Maximal clique enumeration: Bron-Kerbosch with pivoting and the orbit variant.

The search kernel comes from the compiled extension when it was built and
from :mod:`hermskew._kernel_py` otherwise; set ``HERMSKEW_BACKEND=python`` to
force the fallback.  Both kernels walk the tree in the same order.
"""
from __future__ import annotations

import json
import os
import shutil
from collections import Counter, deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import permutations, product
from math import factorial
from pathlib import Path

import numpy as np

from . import _kernel_py
from .graph import SkewGraph, bits, int_to_words, members
from .perms import DEFAULT_CAP, ClosureCapExceeded, as_array, closure

try:
    from . import _kernel as _compiled
except ImportError:  # pragma: no cover - depends on the build
    _compiled = None


def available_backends() -> list[str]:
    return (["compiled"] if _compiled is not None else []) + ["python"]


def default_backend() -> str:
    env = os.environ.get("HERMSKEW_BACKEND")
    if env:
        return env
    return "compiled" if _compiled is not None else "python"


def kernel(backend: str | None = None):
    backend = backend or default_backend()
    if backend == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernel is not built; reinstall or use backend='python'")
        return _compiled
    if backend == "python":
        return _kernel_py
    raise ValueError(f"unknown backend {backend!r}")


class CliqueError(ValueError):
    pass


class PreconditionViolated(CliqueError):
    pass


class EmptyPivotPool(CliqueError):
    pass


class InvalidStabilizer(CliqueError):
    pass


@dataclass
class CliqueCensus:
    histogram: dict[int, int]
    nodes: int = 0
    completed: bool = True
    cliques: list | None = None

    @property
    def total(self) -> int:
        return sum(self.histogram.values())

    def to_json(self) -> dict:
        return {
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
            "total": self.total,
            "nodes": self.nodes,
            "completed": self.completed,
        }


@dataclass
class OrbitRepList:
    reps: list[tuple] = field(default_factory=list)
    histogram: dict[int, int] = field(default_factory=dict)
    nodes: int = 0
    completed: bool = True

    @property
    def total(self) -> int:
        return sum(self.histogram.values())

    def to_json(self) -> dict:
        return {
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
            "total": self.total,
            "nodes": self.nodes,
            "completed": self.completed,
        }


def _as_bits(x) -> int:
    if x is None:
        return 0
    if isinstance(x, int):
        return x
    return bits(x)


def _hist_dict(hist) -> dict[int, int]:
    return {int(k): int(v) for k, v in enumerate(hist) if v}


def _check_state(g: SkewGraph, R, P: int, E: int):
    if not g.is_clique(R):
        raise PreconditionViolated(f"R = {R} is not a clique")
    rb = bits(R)
    if P & E or P & rb or E & rb:
        raise PreconditionViolated("R, P and E must be pairwise disjoint")
    if R:
        common = g.common_neighbors(R)
        if P & ~common or E & ~common:
            raise PreconditionViolated("P and E must be common neighbors of R")


def choose_pivot(g: SkewGraph, P, E) -> int:
    """The u in P | E maximizing |P & N(u)|, smallest index on ties."""
    P, E = _as_bits(P), _as_bits(E)
    pool = P | E
    if not pool:
        raise EmptyPivotPool("P and E are both empty")
    best, best_score = -1, -1
    for u in members(pool):
        score = (P & g.rows[u]).bit_count()
        if score > best_score:
            best, best_score = u, score
    return best


def _emit_mask(n: int, sizes):
    if sizes is None:
        return None
    mask = np.zeros(n + 1, dtype=np.uint8)
    for s in sizes:
        if 0 <= s <= n:
            mask[s] = 1
    return mask


def bk_pivot(g: SkewGraph, R=(), P=None, E=None, sink=None, *, pivot=True, emit_sizes=None,
             max_nodes=0, backend=None, check=True) -> CliqueCensus:
    """Report every maximal clique containing R and contained in R | P that no
    vertex of E extends.  ``P`` defaults to the common neighbors of R."""
    R = list(R)
    if P is None:
        P = g.common_neighbors(R) if R else g.all_vertices
    P, E = _as_bits(P), _as_bits(E)
    if check:
        _check_state(g, R, P, E)
    W = g.W
    hist, nodes, done = kernel(backend).run(
        _words(g), R, int_to_words(P, W), int_to_words(E, W), pivot,
        sink, _emit_mask(g.n, emit_sizes), max_nodes,
    )
    return CliqueCensus(_hist_dict(hist), int(nodes), bool(done))


def _words(g: SkewGraph) -> np.ndarray:
    w = getattr(g, "_words_cache", None)
    if w is None:
        w = g.words()
        g._words_cache = w
    return w


def maximal_cliques(g: SkewGraph, R=(), P=None, E=None, backend=None, pivot=True) -> list[tuple]:
    out = []
    bk_pivot(g, R, P, E, out.append, backend=backend, pivot=pivot)
    return out


# -- census with top-level branch splitting --

def top_level_branches(g: SkewGraph) -> list[tuple[int, int, int]]:
    """(v, P_v, E_v) for each first-level call made from (empty, V, empty)."""
    P, E = g.all_vertices, 0
    if not P:
        return []
    u = choose_pivot(g, P, E)
    out = []
    for v in members(P & ~g.rows[u]):
        out.append((v, P & g.rows[v], E & g.rows[v]))
        P &= ~(1 << v)
        E |= 1 << v
    return out


class Checkpoint:
    """Completed top-level branch ids, one per line, plus ``<path>.json`` holding
    the histogram summed over those branches."""

    def __init__(self, path):
        self.path = Path(path)
        self.hist_path = Path(str(path) + ".json")
        self.done: set[int] = set()
        self.histogram: Counter = Counter()
        self.nodes = 0
        if self.path.exists():
            self.done = {int(x) for x in self.path.read_text().split()}
        if self.hist_path.exists():
            data = json.loads(self.hist_path.read_text())
            self.histogram = Counter({int(k): v for k, v in data["histogram"].items()})
            self.nodes = data.get("nodes", 0)

    def record(self, branch: int, hist: dict, nodes: int):
        self.histogram.update(hist)
        self.nodes += nodes
        self.done.add(branch)
        tmp = self.hist_path.with_suffix(".tmp")
        tmp.write_text(json.dumps({"histogram": {str(k): v for k, v in sorted(self.histogram.items())},
                                   "nodes": self.nodes}))
        tmp.replace(self.hist_path)
        with self.path.open("a") as f:
            f.write(f"{branch}\n")


_WORKER = {}


def _init_worker(words, backend, emit_sizes):
    _WORKER.update(words=words, backend=backend, emit_sizes=emit_sizes)


def _run_branch(args):
    idx, v, P, E, part_path = args
    words = _WORKER["words"]
    W = words.shape[1]
    n = words.shape[0]
    sink, fh = None, None
    if part_path is not None:
        fh = open(part_path, "w")

        def sink(c):
            fh.write(" ".join(map(str, c)) + "\n")
    try:
        hist, nodes, _ = kernel(_WORKER["backend"]).run(
            words, [v], int_to_words(P, W), int_to_words(E, W), True,
            sink, _emit_mask(n, _WORKER["emit_sizes"]), 0,
        )
    finally:
        if fh:
            fh.close()
    return idx, _hist_dict(hist), int(nodes)


def census(g: SkewGraph, *, jobs: int = 1, sink=None, emit_sizes=None, emit_path=None,
           checkpoint=None, backend=None) -> CliqueCensus:
    """Histogram of maximal clique sizes, from (empty, V, empty) with pivoting.

    Top-level branches are independent and may run in ``jobs`` worker
    processes; the summed histogram does not depend on scheduling.  With
    ``emit_path`` the selected cliques are written one per line (sorted vertex
    ids) in the same order a single-worker run produces.
    """
    if g.n == 0:
        return CliqueCensus({0: 1}, 1)
    if jobs > 1 and sink is not None:
        raise CliqueError("an in-process sink needs jobs=1; use emit_path instead")
    backend = backend or default_backend()
    ckpt = Checkpoint(checkpoint) if checkpoint else None
    branches = top_level_branches(g)
    hist: Counter = Counter(ckpt.histogram if ckpt else {})
    nodes = 1 + (ckpt.nodes if ckpt else 0)
    todo = [(i, v, P, E) for i, (v, P, E) in enumerate(branches) if not (ckpt and i in ckpt.done)]
    parts = {i: Path(f"{emit_path}.part{i}") for i in range(len(branches))} if emit_path else {}

    if jobs <= 1:
        words = _words(g)
        W = g.W
        mask = _emit_mask(g.n, emit_sizes)
        for i, v, P, E in todo:
            fh = open(parts[i], "w") if emit_path else None
            branch_sink = sink
            if fh is not None:
                def branch_sink(c, fh=fh):
                    fh.write(" ".join(map(str, c)) + "\n")
            try:
                h, nd, _ = kernel(backend).run(words, [v], int_to_words(P, W), int_to_words(E, W), True,
                                               branch_sink, mask, 0)
            finally:
                if fh:
                    fh.close()
            h = _hist_dict(h)
            hist.update(h)
            nodes += int(nd)
            if ckpt:
                ckpt.record(i, h, int(nd))
    else:
        args = [(i, v, P, E, str(parts[i]) if emit_path else None) for i, v, P, E in todo]
        with ProcessPoolExecutor(jobs, initializer=_init_worker,
                                 initargs=(_words(g), backend, emit_sizes)) as pool:
            for i, h, nd in pool.map(_run_branch, args):
                hist.update(h)
                nodes += nd
                if ckpt:
                    ckpt.record(i, h, nd)
    if emit_path:
        with open(emit_path, "w") as out:
            for i in range(len(branches)):
                if parts[i].exists():
                    with parts[i].open() as fh:
                        shutil.copyfileobj(fh, out)
                    parts[i].unlink()
    return CliqueCensus(dict(sorted(hist.items())), nodes)


# -- Bron-Kerbosch with orbits --

def _check_stabilizer(g: SkewGraph, R, cols: np.ndarray, chunk: int = 1 << 20):
    """``cols`` holds the elements column-wise: cols[v, k] is the image of v under element k."""
    if cols.shape[0] != g.n:
        raise InvalidStabilizer(f"permutations have degree {cols.shape[0]}, graph has {g.n}")
    for v in R:
        bad = np.flatnonzero(cols[v] != v)
        if bad.size:
            raise InvalidStabilizer(f"element {bad[0]} moves vertex {v} of R")
    edges = g.edges()
    if not edges:
        return
    n = g.n
    adj = np.zeros(n * n, dtype=bool)
    for u, v in edges:
        adj[u * n + v] = adj[v * n + u] = True
    m = cols.shape[1]
    for start in range(0, m, chunk):
        block = cols[:, start:start + chunk].astype(np.intp)
        ok = np.ones(block.shape[1], dtype=bool)
        for u, v in edges:
            ok &= adj[block[u] * n + block[v]]
        if not ok.all():
            raise InvalidStabilizer(f"element {start + int(np.argmin(ok))} does not preserve adjacency")


def _is_trivial(cols: np.ndarray) -> bool:
    m = cols.shape[1]
    if m == 0:
        return True
    ident = np.arange(cols.shape[0])[:, None]
    if not (cols[:, :2] == ident).all():
        return False
    return bool((cols == ident).all())


def bk_orbits(g: SkewGraph, R=(), P=None, E=None, stab=None, sink=None, *, orbit_pivot=False,
              max_nodes=0, backend=None, validate=True, branch_done=None, skip_branches=(),
              keep_reps=True) -> OrbitRepList:
    """Bron-Kerbosch with orbits: emits at least one representative of every
    orbit, under ``stab``, of maximal cliques containing R.

    ``stab`` is the ordered element list of a group fixing R pointwise (array
    of shape (m, n) or a list of permutations).  Each node picks orbit
    representatives of P in vertex order, recurses on each with its point
    stabilizer, and carries that smaller stabilizer into the following
    iterations.  With ``orbit_pivot`` the representatives are taken from
    P minus N(pivot) instead of all of P.

    Once the stabilizer is trivial the subtree is handed to the search
    kernel (iterating all of P, or P minus N(pivot) with ``orbit_pivot``).
    ``branch_done(i, histogram, nodes)`` is called after each top-level
    representative finishes, with that branch's counts; indices in
    ``skip_branches`` are not searched.  Long runs should pass a sink and
    ``keep_reps=False`` so representatives are not held in memory.
    """
    R = list(R)
    if P is None:
        P = g.common_neighbors(R) if R else g.all_vertices
    P, E = _as_bits(P), _as_bits(E)
    _check_state(g, R, P, E)
    if stab is None:
        stab = np.arange(g.n)[None, :]
    cols = np.ascontiguousarray(as_array(stab, g.n).T)
    if validate:
        _check_stabilizer(g, R, cols)

    out = OrbitRepList()
    hist: Counter = Counter()
    run = kernel(backend).run
    words = _words(g)
    W = g.W
    rows = g.rows
    state = {"nodes": 0, "stopped": False}

    def emit(clique):
        if keep_reps:
            out.reps.append(clique)
        if sink is not None:
            sink(clique)

    def delegate(R, P, E):
        budget = 0
        if max_nodes:
            budget = max_nodes - state["nodes"]
            if budget <= 0:
                state["stopped"] = True
                return Counter()
        h, nd, done = run(words, R, int_to_words(P, W), int_to_words(E, W), orbit_pivot, emit, None, budget)
        state["nodes"] += int(nd)
        if not done:
            state["stopped"] = True
        return Counter(_hist_dict(h))

    def node(R, P, E, stab, top=False) -> Counter:
        if not top and _is_trivial(stab):
            return delegate(R, P, E)
        state["nodes"] += 1
        if max_nodes and state["nodes"] > max_nodes:
            state["stopped"] = True
            return Counter()
        local: Counter = Counter()
        if not P:
            if not E:
                c = tuple(sorted(R))
                emit(c)
                local[len(R)] += 1
            return local
        u = choose_pivot(g, P, E)
        pcopy = P & ~rows[u] if orbit_pivot else P
        reps = []
        while pcopy:
            low = pcopy & -pcopy
            L = low.bit_length() - 1
            reps.append(L)
            pcopy &= ~low
            for img in np.unique(stab[L]).tolist():
                pcopy &= ~(1 << img)
        for i, v in enumerate(reps):
            stab_v = stab[:, stab[v] == v]
            if not (top and i in skip_branches):
                before = state["nodes"]
                h = node(R + [v], P & rows[v], E & rows[v], stab_v)
                local.update(h)
                if state["stopped"]:
                    return local
                if top and branch_done is not None:
                    branch_done(i, dict(h), state["nodes"] - before)
            P &= ~(1 << v)
            E |= 1 << v
            stab = stab_v
        return local

    hist.update(node(R, P, E, cols, top=True))
    out.histogram = dict(sorted(hist.items()))
    out.nodes = state["nodes"]
    out.completed = not state["stopped"]
    return out


def expand_orbits(reps, group, *, generators=False, cap: int = DEFAULT_CAP) -> set[tuple]:
    """All images of the representatives under the group.

    ``group`` is an explicit element list (array or sequence of permutations);
    with ``generators=True`` it is a generating set and each orbit is closed
    under the generators by breadth-first search instead.
    """
    reps = [tuple(sorted(r)) for r in reps]
    if generators:
        gens = [tuple(int(x) for x in g_) for g_ in group]
        seen = set(reps)
        queue = deque(reps)
        while queue:
            c = queue.popleft()
            for gen in gens:
                d = tuple(sorted(gen[x] for x in c))
                if d not in seen:
                    seen.add(d)
                    if len(seen) > cap:
                        raise ClosureCapExceeded(f"more than {cap} cliques")
                    queue.append(d)
        return seen
    arr = as_array(group)
    out: set[tuple] = set()
    small = arr.shape[1] <= 63
    for r in reps:
        if not r:
            out.add(())
            continue
        if small:
            # one bitmask per image, so deduplication is one-dimensional
            codes = np.zeros(len(arr), dtype=np.int64)
            for v in r:
                codes |= np.left_shift(np.int64(1), arr[:, v].astype(np.int64))
            for code in np.unique(codes).tolist():
                out.add(tuple(members(code)))
            continue
        imgs = np.sort(arr[:, list(r)], axis=1)
        for row in np.unique(imgs, axis=0):
            out.add(tuple(int(x) for x in row))
    return out


# -- fixtures --

def moon_moser(k: int) -> SkewGraph:
    """3k vertices p_{3i+j}; p_{3i+j} ~ p_{3i'+m} iff i != i'."""
    if k < 1:
        raise ValueError("k must be positive")
    n = 3 * k
    return SkewGraph.from_edges(n, [(u, v) for u in range(n) for v in range(u + 1, n) if u // 3 != v // 3])


def moon_moser_generators(k: int) -> list[tuple]:
    """Swap and 3-cycle inside block 0, plus a block swap and block cycle when k > 1."""
    n = 3 * k
    gens = []
    p = list(range(n)); p[0], p[1] = 1, 0
    gens.append(tuple(p))
    p = list(range(n)); p[0], p[1], p[2] = 1, 2, 0
    gens.append(tuple(p))
    if k > 1:
        p = list(range(n))
        for j in range(3):
            p[j], p[3 + j] = 3 + j, j
        gens.append(tuple(p))
        gens.append(tuple((v + 3) % n for v in range(n)))
    return gens


def moon_moser_group_order(k: int) -> int:
    return factorial(k) * 6**k


def moon_moser_group(k: int) -> np.ndarray:
    """Every automorphism of :func:`moon_moser` (k), identity first, as a uint8 array."""
    n = 3 * k
    s3 = np.array(list(permutations(range(3))), dtype=np.uint8)
    inner = np.zeros((6**k, n), dtype=np.uint8)
    for t, choice in enumerate(product(range(6), repeat=k)):
        for i, c in enumerate(choice):
            inner[t, 3 * i:3 * i + 3] = s3[c]
    block = np.arange(n) // 3
    parts = []
    for sigma in permutations(range(k)):
        shift = (3 * np.asarray(sigma, dtype=np.uint8))[block]
        parts.append(inner + shift)
    return np.concatenate(parts)


def closure_array(gens, cap: int = DEFAULT_CAP) -> np.ndarray:
    return as_array(closure(gens, cap))
