"""Permutations of line indices and the automorphisms of X acting on lines.

Permutations are tuples of images (``perm[i]`` is the image of ``i``); groups
handed to the clique engine are explicit element lists, stacked into numpy
arrays.  The ordered-triple stabilizer is computed with a Schreier chain down
three base points that ends in an explicitly enumerated group.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import geometry, linalg
from .field import ZERO, GF

DEFAULT_CAP = 10**7


class GroupError(ValueError):
    pass


class DegreeMismatch(GroupError):
    pass


class ClosureCapExceeded(GroupError):
    pass


class NotAnAutomorphism(GroupError):
    pass


class NotSkewTriple(GroupError):
    pass


class NotFound(GroupError):
    pass


def identity(n: int) -> tuple:
    return tuple(range(n))


def compose(a, b) -> tuple:
    """(a o b)(x) = a(b(x))."""
    if len(a) != len(b):
        raise DegreeMismatch(f"degrees {len(a)} and {len(b)}")
    return tuple(a[x] for x in b)


def invert(a) -> tuple:
    out = [0] * len(a)
    for i, x in enumerate(a):
        out[x] = i
    return tuple(out)


def apply_to_set(a, s) -> set:
    return {a[x] for x in s}


def perm_ops(a, b, kind: str):
    if kind == "compose":
        return compose(a, b)
    if kind == "invert":
        return invert(a)
    if kind == "apply_to_set":
        return apply_to_set(a, b)
    raise ValueError(f"unknown permutation operation {kind!r}")


def is_permutation(a) -> bool:
    return sorted(a) == list(range(len(a)))


def preserves_adjacency(perm, g) -> bool:
    return all(g.rows[perm[u]] == _image_bits(perm, g.rows[u]) for u in range(g.n))


def _image_bits(perm, x: int) -> int:
    out = 0
    while x:
        low = x & -x
        x ^= low
        out |= 1 << perm[low.bit_length() - 1]
    return out


def as_array(perms, n: int | None = None) -> np.ndarray:
    """Stack permutations into a 2-D array with the smallest fitting dtype."""
    if isinstance(perms, np.ndarray):
        return perms
    perms = list(perms)
    if n is None:
        n = len(perms[0]) if perms else 0
    dtype = np.uint8 if n <= 256 else np.uint16 if n <= 65536 else np.int64
    if not perms:
        return np.zeros((0, n), dtype=dtype)
    return np.asarray(perms, dtype=dtype)


def closure(gens, cap: int = DEFAULT_CAP) -> list[tuple]:
    """All elements of the group generated by ``gens`` (breadth-first, identity first)."""
    gens = [tuple(g) for g in gens]
    if not gens:
        raise GroupError("closure needs at least one generator")
    n = len(gens[0])
    for g in gens:
        if len(g) != n:
            raise DegreeMismatch("generators of different degree")
    e = identity(n)
    seen = {e}
    out = [e]
    queue = deque([e])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = tuple(g[i] for i in x)
            if y not in seen:
                seen.add(y)
                out.append(y)
                if len(out) > cap:
                    raise ClosureCapExceeded(f"group has more than {cap} elements")
                queue.append(y)
    return out


def orbit(gens, point: int) -> list[int]:
    seen = {point}
    out = [point]
    for x in out:
        for g in gens:
            y = g[x]
            if y not in seen:
                seen.add(y)
                out.append(y)
    return out


# -- semilinear maps of P^3 --

@dataclass(frozen=True)
class SemilinearMap:
    """x -> matrix . sigma(x) with sigma = Frobenius^frob_power."""

    matrix: tuple
    frob_power: int = 0

    def apply(self, F: GF, vec) -> list[int]:
        v = [F.frobenius(x, self.frob_power) for x in vec]
        return linalg.matvec(F, self.matrix, v)


def identity_matrix(n: int = 4) -> tuple:
    return tuple(tuple(0 if i == j else ZERO for j in range(n)) for i in range(n))


def semilinear_to_perm(m: SemilinearMap, table) -> tuple:
    F = table.field
    if linalg.rank(F, m.matrix) != 4:
        raise NotAnAutomorphism("matrix is singular")
    images = []
    for i, (b1, b2) in enumerate(table.lines):
        L = geometry.line_from_points(F, m.apply(F, b1), m.apply(F, b2))
        j = table.lookup(L)
        if j is None:
            raise NotAnAutomorphism(f"image of L_{i} is not a line of the table")
        images.append(j)
    if len(set(images)) != len(images):
        raise NotAnAutomorphism("induced map on lines is not injective")
    return tuple(images)


def coordinate_swap(i: int, j: int) -> tuple:
    rows = [list(r) for r in identity_matrix()]
    rows[i], rows[j] = rows[j], rows[i]
    return tuple(tuple(r) for r in rows)


def embed_block(block, coords=None) -> tuple:
    if coords is None:
        coords = tuple(range(len(block)))
    rows = [list(r) for r in identity_matrix()]
    for a, ra in enumerate(coords):
        for b, cb in enumerate(coords):
            rows[ra][cb] = block[a][b]
    return tuple(tuple(r) for r in rows)


def is_monomial(mat) -> bool:
    return all(sum(x != ZERO for x in row) == 1 for row in mat) and all(
        sum(x != ZERO for x in col) == 1 for col in zip(*mat)
    )


def unitary_scalar(F: GF, mat):
    """lambda when conj(M)^T M = lambda I with lambda in GF(q)*, else None."""
    cols = list(zip(*mat))
    lam = None
    for i, ci in enumerate(cols):
        for j, cj in enumerate(cols):
            v = F.sum(F.mul(F.conj(x), y) for x, y in zip(ci, cj))
            if i != j:
                if v != ZERO:
                    return None
            elif lam is None:
                lam = v
            elif v != lam:
                return None
    return lam if lam != ZERO and F.in_subfield(lam) else None


def find_unitary_block(F: GF, size: int | None = None) -> tuple:
    """First non-monomial unitary block, scanning entries in the order 0, mu^0, mu^1, ...

    2x2 blocks are tried first.  Over GF(4) every 2x2 unitary matrix is
    monomial, so the search moves on to 3x3 there.
    """
    if F.q > 16:
        raise NotFound("unitary block search is limited to q <= 16")
    els = F.elements()
    for k in ([size] if size else [2, 3]):
        for entries in itertools.product(els, repeat=k * k):
            mat = tuple(tuple(entries[r * k:(r + 1) * k]) for r in range(k))
            if not is_monomial(mat) and unitary_scalar(F, mat) is not None:
                return mat
    raise NotFound("no non-monomial unitary block")


def builtin_maps(F: GF) -> list[SemilinearMap]:
    maps = [SemilinearMap(coordinate_swap(i, j)) for i, j in itertools.combinations(range(4), 2)]
    c = F.pow(F.mu, F.q - 1)  # generates the (q+1)-st roots of unity
    diag = [list(r) for r in identity_matrix()]
    diag[0][0] = c
    maps.append(SemilinearMap(tuple(tuple(r) for r in diag)))
    maps.append(SemilinearMap(identity_matrix(), 1))
    maps.append(SemilinearMap(embed_block(normalized_block(F, find_unitary_block(F)))))
    return maps


def normalized_block(F: GF, block) -> tuple:
    """Rescale so conj(M)^T M = I, which lets the block be padded by the identity."""
    lam = unitary_scalar(F, block)
    if lam is None:
        raise NotFound("block is not unitary")
    t = next(t for t in range(F.m) if F.mul(F.norm(t), lam) == 0)
    return tuple(tuple(F.mul(t, x) for x in row) for row in block)


def builtin_generators(F: GF, table) -> list[tuple]:
    return [semilinear_to_perm(m, table) for m in builtin_maps(F)]


def monomial_generators(F: GF, table) -> list[tuple]:
    return builtin_generators(F, table)[:-1]


def example_map(F: GF) -> SemilinearMap:
    """Point map (x, y, z, w) -> (x', y', z', w') whose pullback on coordinate
    functions is x -> nu^2 z, y -> nu^2 w, z -> x, w -> y."""
    nu2 = F.pow(F.nu, 2)
    rows = [[ZERO] * 4 for _ in range(4)]
    rows[0][2] = nu2
    rows[1][3] = nu2
    rows[2][0] = 0
    rows[3][1] = 0
    return SemilinearMap(tuple(tuple(r) for r in rows))


# -- stabilizer chains --

@dataclass
class StabChainResult:
    base: tuple
    orbits: list[list[int]]
    transversals: list[dict]
    level_generators: list[list[tuple]]
    stabilizer: list[tuple]
    sifts: int = 0

    @property
    def group_order(self) -> int:
        out = len(self.stabilizer)
        for orb in self.orbits:
            out *= len(orb)
        return out

    @property
    def base_orbit_size(self) -> int:
        """Size of the orbit of the ordered base tuple."""
        out = 1
        for orb in self.orbits:
            out *= len(orb)
        return out


def _transversal(gens, point, n):
    trans = {point: identity(n)}
    order = [point]
    for x in order:
        t = trans[x]
        for g in gens:
            y = g[x]
            if y not in trans:
                trans[y] = compose(g, t)
                order.append(y)
    return order, trans


def stabilizer_chain(gens, base, cap: int = DEFAULT_CAP) -> StabChainResult:
    """Schreier-Sims down ``base``, with the pointwise stabilizer of the whole base
    held as an explicit, deduplicated element list."""
    gens = [tuple(g) for g in gens]
    if not gens:
        raise GroupError("need at least one generator")
    n = len(gens[0])
    base = tuple(base)
    if len(set(base)) != len(base):
        raise GroupError("base points must be distinct")
    k = len(base)
    e = identity(n)
    levels = [[g for g in gens if all(g[b] == b for b in base[:i])] for i in range(k)]
    bottom_gens = [g for g in gens if all(g[b] == b for b in base) and g != e]
    bottom = closure(bottom_gens or [e], cap)
    bottom_set = set(bottom)
    orbits: list = [None] * k
    trans: list = [None] * k

    def rebuild(i):
        orbits[i], trans[i] = _transversal(levels[i], base[i], n)

    for i in range(k):
        rebuild(i)
    sifts = 0

    def sift(h, start):
        nonlocal sifts
        sifts += 1
        for j in range(start, k):
            b = h[base[j]]
            if b not in trans[j]:
                return h, j
            h = compose(invert(trans[j][b]), h)
        if h in bottom_set:
            return e, k
        return h, k

    i = k - 1
    while i >= 0:
        dropped = None
        for x in orbits[i]:
            tx = trans[i][x]
            for s in levels[i]:
                y = s[x]
                schreier = compose(invert(trans[i][y]), compose(s, tx))
                if schreier == e:
                    continue
                h, j = sift(schreier, i + 1)
                if h != e:
                    dropped = (h, j)
                    break
            if dropped:
                break
        if dropped is None:
            i -= 1
            continue
        h, j = dropped
        for l in range(i + 1, min(j, k - 1) + 1):
            if l < k:
                levels[l].append(h)
                rebuild(l)
        if j == k:
            bottom_gens.append(h)
            bottom = closure(bottom_gens, cap)
            bottom_set = set(bottom)
            i = k - 1
        else:
            i = j
    return StabChainResult(base, orbits, trans, levels, bottom, sifts)


def triple_stabilizer(gens, base, cap: int = DEFAULT_CAP) -> list[tuple]:
    return stabilizer_chain(gens, base, cap).stabilizer


def count_ordered_skew_triples(g) -> int:
    total = 0
    for u in range(g.n):
        r = g.rows[u]
        x = r
        while x:
            low = x & -x
            x ^= low
            v = low.bit_length() - 1
            total += (r & g.rows[v]).bit_count()
    return total


def transitivity_check(gens, g, base) -> bool:
    v0, v1, v2 = base
    if not (g.has_edge(v0, v1) and g.has_edge(v1, v2) and g.has_edge(v0, v2)):
        raise NotSkewTriple(f"{base} is not a skew triple")
    chain = stabilizer_chain(gens, base)
    return chain.base_orbit_size == count_ordered_skew_triples(g)


def triple_orbit(gens, base) -> set:
    """Orbit of an ordered tuple by breadth-first search (small groups only)."""
    start = tuple(base)
    seen = {start}
    queue = deque([start])
    while queue:
        t = queue.popleft()
        for gen in gens:
            u = tuple(gen[x] for x in t)
            if u not in seen:
                seen.add(u)
                queue.append(u)
    return seen


# -- permutation files: one permutation per line, n space-separated 0-based images --

def write_perm_file(path, perms):
    lines = [" ".join(str(int(x)) for x in p) for p in perms]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""))


def read_perm_file(path) -> list[tuple]:
    perms = []
    n = None
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        p = tuple(int(x) for x in line.split())
        if not is_permutation(p):
            raise GroupError(f"line {lineno}: not a permutation of 0..{len(p) - 1}")
        if n is not None and len(p) != n:
            raise DegreeMismatch(f"line {lineno}: degree {len(p)}, expected {n}")
        n = len(p)
        perms.append(p)
    return perms
