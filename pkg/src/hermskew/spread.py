"""Large skew sets from quadric configurations on X.

Three pairwise skew lines of X lie on a unique quadric Q.  Q meets X in 2q+2
lines, q+1 in each ruling.  The remaining q(q-1) lines of one ruling carry
q+1 star points each and fall into dual pairs; joining the star points they
cut on three chosen lines of the opposite ruling gives three new surface
lines per pair.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations, product
from math import comb

from . import linalg
from .field import ZERO, GF
from .geometry import (
    GeometryError,
    LineTable,
    StarPointTable,
    all_points,
    canonical_point,
    intersection,
    line_from_points,
    line_points,
    lines_meet,
)
from .graph import SkewGraph, members

# monomials x_a x_b of a quadratic form, a <= b, coordinates (x, y, z, w)
MONOMIALS = [(a, b) for a in range(4) for b in range(a, 4)]


class SpreadError(GeometryError):
    pass


class NotSkew(SpreadError):
    pass


class DegenerateQuadric(SpreadError):
    pass


class ChordCountMismatch(SpreadError):
    pass


class PairingFailure(SpreadError):
    pass


class CrossLineOffSurface(SpreadError):
    pass


class NotSkewInternal(SpreadError):
    pass


class ConfigCountMismatch(SpreadError):
    pass


def quadric_value(F: GF, coeffs, pt) -> int:
    return F.sum(F.mul(c, F.mul(pt[a], pt[b])) for c, (a, b) in zip(coeffs, MONOMIALS) if c != ZERO)


def _monomial_row(F: GF, pt) -> list[int]:
    return [F.mul(pt[a], pt[b]) for a, b in MONOMIALS]


def _transversal(F: GF, P, b, c):
    """The line through the point P meeting the skew lines b and c (P on neither)."""
    normal = linalg.nullspace(F, [P, *b], 4)
    if len(normal) != 1:
        raise DegenerateQuadric("point lies on the line it should avoid")
    n = normal[0]
    d1 = F.sum(F.mul(x, y) for x, y in zip(n, c[0]))
    d2 = F.sum(F.mul(x, y) for x, y in zip(n, c[1]))
    S = linalg.combine(F, d2, c[0], F.neg(d1), c[1])
    return line_from_points(F, P, canonical_point(F, S))


def transversals(F: GF, a, b, c) -> list[tuple]:
    """All lines meeting each of three pairwise skew lines, one through each point of a."""
    return sorted({_transversal(F, P, b, c) for P in line_points(F, a)})


@dataclass
class QuadricConfig:
    quadric: tuple
    surface_lines: tuple[list[int], list[int]]
    ruling_lines: tuple[list[tuple], list[tuple]]

    @property
    def ell(self) -> list[int]:
        return self.surface_lines[0]

    @property
    def m(self) -> list[int]:
        return self.surface_lines[1]

    def all_surface_lines(self) -> list[int]:
        return sorted(self.surface_lines[0] + self.surface_lines[1])


def _as_line(table: LineTable, x):
    return table.lines[x] if isinstance(x, int) else tuple(tuple(r) for r in x)


def quadric_through(m1, m2, m3, table: LineTable, check: bool = True) -> QuadricConfig:
    """The quadric configuration cut on X by the quadric through three skew lines.

    The lines may be given as table indices or as 2x4 bases.
    """
    F = table.field
    q = table.q
    lines = [_as_line(table, x) for x in (m1, m2, m3)]
    for L1, L2 in combinations(lines, 2):
        if L1 == L2 or lines_meet(L1, L2, F):
            raise NotSkew("input lines must be pairwise skew")

    rows = []
    for L in lines:
        for pt in line_points(F, L)[:3]:
            rows.append(_monomial_row(F, pt))
    sol = linalg.nullspace(F, rows, len(MONOMIALS))
    if len(sol) != 1:
        raise DegenerateQuadric(f"solution space has dimension {len(sol)}")
    coeffs = tuple(canonical_point(F, sol[0]))

    across = transversals(F, *lines)
    along = transversals(F, *across[:3])
    rulings = [across, along]
    for r in rulings:
        if len(r) != q * q + 1:
            raise DegenerateQuadric(f"ruling has {len(r)} lines, expected {q * q + 1}")
    if check:
        _verify_rulings(F, coeffs, rulings)

    surface = []
    for r in rulings:
        idx = sorted(i for i in (table.lookup(L) for L in r) if i is not None)
        if len(idx) != q + 1:
            raise DegenerateQuadric(f"{len(idx)} surface lines in a ruling, expected {q + 1}")
        surface.append(idx)
    if surface[1][0] < surface[0][0]:
        surface.reverse()
        rulings.reverse()
    return QuadricConfig(coeffs, (surface[0], surface[1]), (rulings[0], rulings[1]))


def _verify_rulings(F: GF, coeffs, rulings):
    for r in rulings:
        for L in r:
            if any(quadric_value(F, coeffs, pt) != ZERO for pt in line_points(F, L)):
                raise DegenerateQuadric("a ruling line leaves the quadric")
        for L1, L2 in combinations(r, 2):
            if lines_meet(L1, L2, F):
                raise DegenerateQuadric("two lines of one ruling meet")
    for L1 in rulings[0][:3]:
        for L2 in rulings[1]:
            if not lines_meet(L1, L2, F):
                raise DegenerateQuadric("lines of opposite rulings are skew")


def lines_on_quadric(F: GF, coeffs) -> set[tuple]:
    """Every line contained in the quadric, by scanning pairs of its points."""
    pts = [p for p in all_points(F) if quadric_value(F, coeffs, p) == ZERO]
    found = set()
    for p1, p2 in combinations(pts, 2):
        L = line_from_points(F, p1, p2)
        if L in found:
            continue
        if all(quadric_value(F, coeffs, p) == ZERO for p in line_points(F, L)):
            found.add(L)
    return found


@dataclass
class StarChordPairing:
    ruling: int
    chords: list[tuple]
    star_points: list[list[int]]
    pairs: list[tuple[int, int]]


def star_chords(cfg: QuadricConfig, ruling: int, stars: StarPointTable, table: LineTable) -> StarChordPairing:
    """Star chords of one ruling and their dual pairing."""
    F = table.field
    q = table.q
    surface = {table.lines[i] for i in cfg.surface_lines[ruling]}
    chords, chord_stars = [], []
    for L in cfg.ruling_lines[ruling]:
        if L in surface:
            continue
        on = sorted(stars.index[p] for p in line_points(F, L) if p in stars.index)
        if len(on) == q + 1:
            chords.append(L)
            chord_stars.append(on)
    if len(chords) != q * (q - 1):
        raise ChordCountMismatch(f"{len(chords)} star chords, expected {q * (q - 1)}")

    def line_set(on):
        m = 0
        for s in on:
            m |= stars.through_masks[s]
        return m

    keys = [line_set(on) for on in chord_stars]
    pairs, used = [], set()
    for i in range(len(chords)):
        if i in used:
            continue
        mates = [j for j in range(i + 1, len(chords)) if j not in used and keys[j] == keys[i]]
        if len(mates) != 1:
            raise PairingFailure(f"chord {i} has {len(mates)} dual partners")
        used.update((i, mates[0]))
        pairs.append((i, mates[0]))
    for k in keys:
        if k.bit_count() != (q + 1) ** 2:
            raise PairingFailure("a chord does not see (q+1)^2 surface lines")
    return StarChordPairing(ruling, chords, chord_stars, pairs)


@dataclass
class LargeSkewSet:
    lines: list[int]
    quadric: tuple
    ruling: int
    triple: tuple[int, int, int]
    signs: tuple[int, ...]
    cross_lines: list[tuple[int, int, int]] = field(default_factory=list)

    def __len__(self):
        return len(self.lines)

    def provenance(self) -> dict:
        return {
            "quadric": list(self.quadric),
            "ruling": self.ruling,
            "triple": list(self.triple),
            "signs": "".join(map(str, self.signs)),
        }


def large_set_size(q: int) -> int:
    return (3 * q * q - q) // 2 + 1


def _cross_line(stars: StarPointTable, s1: int, s2: int) -> int:
    common = stars.through_masks[s1] & stars.through_masks[s2]
    if common.bit_count() != 1:
        raise CrossLineOffSurface(f"star points {s1}, {s2} are joined by {common.bit_count()} surface lines")
    return common.bit_length() - 1


def cross_line_options(cfg: QuadricConfig, pairing: StarChordPairing, triple, table: LineTable,
                       stars: StarPointTable) -> list[tuple[tuple, tuple]]:
    """For each dual pair, the two candidate triples of cross-lines (sign 0, sign 1)."""
    F = table.field
    r = pairing.ruling
    opposite = cfg.surface_lines[1 - r]
    if len(set(triple)) != 3 or not set(triple) <= set(opposite):
        raise SpreadError("triple must be 3 distinct surface lines of the opposite ruling")
    ms = [table.lines[i] for i in triple]
    out = []
    for a, b in pairing.pairs:
        c, c2 = pairing.chords[a], pairing.chords[b]
        p = [stars.index[intersection(F, m, c)] for m in ms]
        pp = [stars.index[intersection(F, m, c2)] for m in ms]
        zero = tuple(_cross_line(stars, p[i], pp[(i + 1) % 3]) for i in range(3))
        one = tuple(_cross_line(stars, p[i], pp[(i - 1) % 3]) for i in range(3))
        out.append((zero, one))
    return out


def build_large_skew_set(cfg: QuadricConfig, ruling: int, triple, signs, table: LineTable,
                         stars: StarPointTable, pairing: StarChordPairing | None = None) -> LargeSkewSet:
    q = table.q
    if pairing is None:
        pairing = star_chords(cfg, ruling, stars, table)
    options = cross_line_options(cfg, pairing, triple, table, stars)
    signs = tuple(int(s) for s in signs)
    if len(signs) != len(options):
        raise SpreadError(f"need {len(options)} sign bits, got {len(signs)}")
    chosen = [opt[s] for opt, s in zip(options, signs)]
    lines = sorted(cfg.surface_lines[ruling] + [x for t in chosen for x in t])
    if len(set(lines)) != large_set_size(q):
        raise NotSkewInternal(f"{len(set(lines))} distinct lines, expected {large_set_size(q)}")
    masks = table.meet_masks
    bitset = sum(1 << i for i in lines)
    for i in lines:
        if masks[i] & bitset:
            raise NotSkewInternal(f"line {i} meets another line of the set")
    return LargeSkewSet(lines, cfg.quadric, ruling, tuple(triple), signs, chosen)


def extend_to_maximal(s, g: SkewGraph) -> tuple[list[int], list[list[int]]]:
    """Greedy extension by the smallest common neighbor.

    Returns the maximal clique and the candidate list seen at each step (the
    extension is unique when every list has one element).
    """
    clique = sorted(s.lines if isinstance(s, LargeSkewSet) else s)
    steps = []
    cand = g.common_neighbors(clique) if clique else g.all_vertices
    while cand:
        steps.append(members(cand))
        v = (cand & -cand).bit_length() - 1
        clique.append(v)
        cand &= g.rows[v]
    return sorted(clique), steps


def lower_bound_count(q: int) -> int:
    return (q + 1) * q * (q - 1) // 3 * 2 ** (q * (q - 1) // 2)


def quadric_config_count(q: int) -> int:
    return (q**3 + 1) * (q**2 + 1) * q**4 // 2


def iter_quadric_configs(table: LineTable, g: SkewGraph, check: bool = False):
    """Each quadric configuration once, found from the first uncovered skew triple."""
    covered = set()
    rows = g.rows
    for i in range(g.n):
        for j in members(rows[i] >> (i + 1) << (i + 1)):
            for k in members(rows[i] & rows[j] >> (j + 1) << (j + 1)):
                if (i, j, k) in covered:
                    continue
                cfg = quadric_through(i, j, k, table, check=check)
                for side in cfg.surface_lines:
                    covered.update(combinations(side, 3))
                yield cfg


@dataclass
class MultiplicityReport:
    q: int
    configs: int
    generated: int
    distinct: int
    multiplicities: dict[int, int]
    sizes: dict[int, int]
    non_unique_extensions: int
    jointly_extendable_pairs: int
    sets: Counter | None = None

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "configs": self.configs,
            "expected_configs": quadric_config_count(self.q),
            "generated": self.generated,
            "distinct_maximal": self.distinct,
            "multiplicities": {str(k): v for k, v in sorted(self.multiplicities.items())},
            "maximal_sizes": {str(k): v for k, v in sorted(self.sizes.items())},
            "non_unique_extensions": self.non_unique_extensions,
            "jointly_extendable_pairs": self.jointly_extendable_pairs,
        }


def config_outputs(cfg: QuadricConfig, table: LineTable, stars: StarPointTable):
    """All 2 * C(q+1, 3) * 2^(q(q-1)/2) construction outputs of one configuration, as sorted tuples."""
    q = table.q
    out = []
    for ruling in (0, 1):
        pairing = star_chords(cfg, ruling, stars, table)
        for triple in combinations(cfg.surface_lines[1 - ruling], 3):
            options = cross_line_options(cfg, pairing, triple, table, stars)
            base = cfg.surface_lines[ruling]
            for signs in product((0, 1), repeat=len(options)):
                lines = list(base)
                for opt, s in zip(options, signs):
                    lines.extend(opt[s])
                out.append(tuple(sorted(lines)))
    return out


def census_from_quadrics(q: int, table: LineTable, g: SkewGraph, stars: StarPointTable,
                         keep_sets: bool = False, progress=None) -> MultiplicityReport:
    """Run the construction over every quadric configuration and count how often
    each maximal skew set is produced."""
    rows = g.rows
    per_config = 2 * comb(q + 1, 3) * 2 ** (q * (q - 1) // 2)
    counts: Counter = Counter()
    n_configs = generated = non_unique = joint = 0
    size = large_set_size(q)
    for cfg in iter_quadric_configs(table, g):
        n_configs += 1
        outs = config_outputs(cfg, table, stars)
        if len(outs) != per_config or len(set(outs)) != per_config:
            raise SpreadError(f"configuration produced {len(set(outs))} distinct sets, expected {per_config}")
        closed = []
        for s in outs:
            if len(s) != size:
                raise NotSkewInternal(f"set of size {len(s)}")
            bitset = 0
            cn = -1
            for v in s:
                bitset |= 1 << v
                cn &= rows[v] | (1 << v)
            if bitset & ~cn:
                raise NotSkewInternal("constructed set is not a clique")
            closed.append((bitset, cn))
            ext = cn & ~bitset
            if ext:
                clique, steps = extend_to_maximal(s, g)
                if any(len(st) > 1 for st in steps):
                    non_unique += 1
                counts[tuple(clique)] += 1
            else:
                counts[s] += 1
        generated += len(outs)
        for (b1, c1), (b2, c2) in combinations(closed, 2):
            if not (b2 & ~c1):
                joint += 1
        if progress is not None:
            progress(n_configs)
    if n_configs != quadric_config_count(q):
        raise ConfigCountMismatch(f"{n_configs} quadric configurations, expected {quadric_config_count(q)}")
    mult = Counter(counts.values())
    sizes = Counter(len(s) for s in counts)
    return MultiplicityReport(q, n_configs, generated, len(counts), dict(mult), dict(sizes),
                              non_unique, joint, counts if keep_sets else None)
