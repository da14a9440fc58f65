"""Points, lines and star points of the Fermat surface
x^(q+1) + y^(q+1) + z^(q+1) + w^(q+1) = 0 in P^3 over GF(q^2).

Points are canonical 4-tuples of field elements (first nonzero coordinate is
1) and lines are canonical 2x4 reduced row-echelon bases, both plain tuples so
they hash and compare by value.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import cached_property
from itertools import combinations

from . import linalg
from .field import ZERO, GF, nu as field_nu


class GeometryError(ValueError):
    pass


class DuplicateLine(GeometryError):
    pass


class OffSurfaceLine(GeometryError):
    pass


class SameLine(GeometryError):
    pass


class CountMismatch(GeometryError):
    pass


def canonical_point(F: GF, vec) -> tuple:
    lead = next((x for x in vec if x != ZERO), None)
    if lead is None:
        raise GeometryError("zero vector is not a projective point")
    inv = F.inv(lead)
    return tuple(F.mul(x, inv) for x in vec)


def line_from_points(F: GF, p1, p2) -> tuple:
    red, piv = linalg.rref(F, [p1, p2])
    if len(piv) != 2:
        raise GeometryError("points do not span a line")
    return tuple(tuple(r) for r in red)


def line_from_forms(F: GF, f1, f2) -> tuple:
    """The line V(f1, f2) for two independent linear forms (coefficients on x, y, z, w)."""
    basis = linalg.nullspace(F, [f1, f2], 4)
    if len(basis) != 2:
        raise GeometryError("forms do not cut out a line")
    return line_from_points(F, *basis)


def line_points(F: GF, line) -> list[tuple]:
    b1, b2 = line
    pts = [canonical_point(F, linalg.combine(F, 0, b1, t, b2)) for t in F.elements()]
    pts.append(canonical_point(F, b2))
    return pts


def hermitian_form(F: GF, pt) -> int:
    return F.sum(F.pow(x, F.q + 1) for x in pt)


def on_surface(F: GF, pt) -> bool:
    return hermitian_form(F, pt) == ZERO


def line_on_surface(line, F: GF) -> bool:
    return all(on_surface(F, pt) for pt in line_points(F, line))


def lines_meet(L1, L2, F: GF) -> bool:
    if L1 == L2:
        raise SameLine("a line is not compared with itself")
    return linalg.det(F, [*L1, *L2]) == ZERO


def intersection(F: GF, L1, L2):
    """The common point of two distinct lines, or None when they are skew."""
    # x = a*u1 + b*u2 lies on L2 iff it is killed by the two forms defining L2
    forms = linalg.nullspace(F, list(L2), 4)
    u1, u2 = L1
    coeffs = [[F.sum(F.mul(f, x) for f, x in zip(form, u)) for u in (u1, u2)] for form in forms]
    sol = linalg.nullspace(F, coeffs, 2)
    if len(sol) != 1:
        if not sol:
            return None
        raise SameLine("lines coincide")
    a, b = sol[0]
    return canonical_point(F, linalg.combine(F, a, u1, b, u2))


@dataclass
class LineTable:
    """The q^4 + q^3 + q + 1 lines of X in their fixed enumeration order."""

    field: GF
    lines: list[tuple]
    families: list[int]
    a_exps: list[int]
    a_roots: list[list[int]]
    index: dict = dc_field(repr=False, default_factory=dict)

    def __post_init__(self):
        if not self.index:
            self.index = {L: i for i, L in enumerate(self.lines)}

    @property
    def q(self) -> int:
        return self.field.q

    def __len__(self):
        return len(self.lines)

    def __getitem__(self, i):
        return self.lines[i]

    def lookup(self, line):
        return self.index.get(line)

    @cached_property
    def points(self) -> list[list[tuple]]:
        return [line_points(self.field, L) for L in self.lines]

    @cached_property
    def meet_masks(self) -> list[int]:
        """Bitset of the lines sharing a point with each line (the line itself excluded)."""
        through: dict[tuple, int] = {}
        for i, pts in enumerate(self.points):
            for pt in pts:
                through[pt] = through.get(pt, 0) | (1 << i)
        masks = []
        for i, pts in enumerate(self.points):
            m = 0
            for pt in pts:
                m |= through[pt]
            masks.append(m & ~(1 << i))
        return masks

    def describe(self, i: int) -> dict:
        F = self.field
        fam = self.families[i]
        rec = {
            "index": i,
            "family": fam,
            "basis": [[None if x == ZERO else x for x in row] for row in self.lines[i]],
        }
        n1 = (self.q + 1) ** 2
        if fam < 4:
            rec["i"], rec["j"] = divmod(i - (fam - 1) * n1, self.q + 1)
        else:
            off = i - 3 * n1
            k = off % (self.q + 1)
            j = (off // (self.q + 1)) % (self.q + 1)
            a = off // n1
            rec.update(i=a, j=j, k=k, a_i=self.a_exps[a], a_ij=self.a_roots[a][j], a_ik=self.a_roots[a][k])
        rec["basis_str"] = [[F.fmt(x) for x in row] for row in self.lines[i]]
        return rec


def line_count(q: int) -> int:
    return q**4 + q**3 + q + 1


def star_point_count(q: int) -> int:
    return q**5 + q**3 + q**2 + 1


def fourth_family_exponents(F: GF) -> tuple[list[int], list[list[int]]]:
    """Exponents a with mu^((q+1)a) != -1, and the (q+1)-st roots of -1 - mu^((q+1)a)."""
    q = F.q
    a_exps = [a for a in range(F.m) if F.pow(a, q + 1) != F.neg_one]
    roots = []
    for a in a_exps:
        target = F.sub(F.neg_one, F.pow(a, q + 1))
        rs = [b for b in range(F.m) if F.pow(b, q + 1) == target]
        if len(rs) != q + 1:
            raise GeometryError(f"expected {q + 1} roots for a={a}, found {len(rs)}")
        roots.append(rs)
    return a_exps, roots


def enumerate_lines(F: GF) -> LineTable:
    q = F.q
    nu = field_nu(F)
    one = 0
    neg = F.neg_one
    coef = [F.pow(nu, 2 * i + 1) for i in range(q + 1)]
    lines, families = [], []

    def form(**kw):
        return [kw.get(c, ZERO) for c in "xyzw"]

    pairings = [("y", "z", "w"), ("z", "y", "w"), ("w", "y", "z")]
    for fam, (partner_x, second, partner_second) in enumerate(pairings, start=1):
        for i in range(q + 1):
            for j in range(q + 1):
                f1 = form(x=one, **{partner_x: coef[i]})
                f2 = form(**{second: one, partner_second: coef[j]})
                lines.append(line_from_forms(F, f1, f2))
                families.append(fam)

    a_exps, a_roots = fourth_family_exponents(F)
    if len(a_exps) != (q - 2) * (q + 1):
        raise GeometryError(f"found {len(a_exps)} fourth-family exponents, expected {(q - 2) * (q + 1)}")
    for a, roots in zip(a_exps, a_roots):
        for j in range(q + 1):
            for k in range(q + 1):
                f1 = form(x=neg, y=a, w=roots[j])
                f2 = form(x=F.neg(F.pow(a, q)), y=neg, z=roots[k])
                lines.append(line_from_forms(F, f1, f2))
                families.append(4)

    table = LineTable(F, lines, families, a_exps, a_roots)
    if len(table.index) != len(lines):
        seen = {}
        for i, L in enumerate(lines):
            if L in seen:
                raise DuplicateLine(f"L_{i} repeats L_{seen[L]}")
            seen[L] = i
    for i, L in enumerate(lines):
        if not line_on_surface(L, F):
            raise OffSurfaceLine(f"L_{i} is not on the surface")
    if len(lines) != line_count(q):
        raise CountMismatch(f"{len(lines)} lines, expected {line_count(q)}")
    return table


@dataclass
class StarPointTable:
    points: list[tuple]
    incidence: list[list[int]]
    on_line: list[list[int]]
    index: dict = dc_field(repr=False, default_factory=dict)

    def __post_init__(self):
        if not self.index:
            self.index = {pt: i for i, pt in enumerate(self.points)}

    def __len__(self):
        return len(self.points)

    @cached_property
    def through_masks(self) -> list[int]:
        out = []
        for lines in self.incidence:
            m = 0
            for L in lines:
                m |= 1 << L
            out.append(m)
        return out


def star_points(table: LineTable, check: bool = True) -> StarPointTable:
    """Points where at least two lines of the table meet, with their incidences."""
    through: dict[tuple, list[int]] = {}
    for i, pts in enumerate(table.points):
        for pt in pts:
            through.setdefault(pt, []).append(i)
    points = sorted(pt for pt, ls in through.items() if len(ls) >= 2)
    index = {pt: k for k, pt in enumerate(points)}
    incidence = [sorted(through[pt]) for pt in points]
    on_line = [sorted(index[pt] for pt in pts if pt in index) for pts in table.points]
    if check and len(points) != star_point_count(table.q):
        raise CountMismatch(f"{len(points)} star points, expected {star_point_count(table.q)}")
    return StarPointTable(points, incidence, on_line, index)


def verify_gq(table: LineTable, stars: StarPointTable) -> dict:
    """Check the generalized quadrangle axioms GQ(q^2, q) and triangle-freeness.

    Returns ``{axiom: {"passed": bool, "witness": ...}}``; witnesses are index
    tuples describing the first failure found.
    """
    q = table.q
    n = len(table)
    report = {}

    def result(name, witness):
        report[name] = {"passed": witness is None, "witness": witness}

    masks = table.meet_masks
    through = stars.through_masks

    w = None
    for L in range(n):
        if len(stars.on_line[L]) != q * q + 1:
            w = {"line": L, "star_points": len(stars.on_line[L])}
            break
        shared = [pt for pt in stars.on_line[L] if len(stars.incidence[pt]) < 2]
        if shared:
            w = {"line": L, "isolated_point": shared[0]}
            break
    if w is None:
        # at most one point on two distinct lines
        for L in range(n):
            seen = {}
            for pt in stars.on_line[L]:
                for M in stars.incidence[pt]:
                    if M != L and M in seen:
                        w = {"lines": (L, M), "points": (seen[M], pt)}
                        break
                    seen[M] = pt
                if w:
                    break
            if w:
                break
    result("points_per_line", w)

    w = None
    for pt, lines in enumerate(stars.incidence):
        if len(lines) != q + 1:
            w = {"point": pt, "lines": len(lines)}
            break
    result("lines_per_point", w)

    w = None
    for pt in range(len(stars)):
        if w:
            break
        tp = through[pt]
        for L in range(n):
            if tp >> L & 1:
                continue
            hits = (tp & masks[L]).bit_count()
            if hits != 1:
                w = {"point": pt, "line": L, "transversals": hits}
                break
    result("unique_projection", w)

    w = None
    for L1 in range(n):
        if w:
            break
        for L2 in range(L1 + 1, n):
            if not masks[L1] >> L2 & 1:
                continue
            common = (set(stars.on_line[L1]) & set(stars.on_line[L2])).pop()
            third = masks[L1] & masks[L2] & ~through[common]
            if third:
                w = {"lines": (L1, L2, (third & -third).bit_length() - 1)}
                break
    result("triangle_free", w)
    return report


def all_points(F: GF) -> list[tuple]:
    """Every point of P^3 over the field (for brute-force oracles at small q)."""
    els = F.elements()
    pts = []
    for lead in range(4):
        for rest in _product(els, 3 - lead):
            pts.append(tuple([ZERO] * lead + [0] + list(rest)))
    return pts


def _product(els, k):
    if k == 0:
        yield ()
        return
    for x in els:
        for tail in _product(els, k - 1):
            yield (x,) + tail


def brute_force_surface_lines(F: GF) -> set[tuple]:
    """All lines of P^3 contained in X, by scanning pairs of surface points."""
    pts = sorted(pt for pt in all_points(F) if on_surface(F, pt))
    found = set()
    covered = set()
    for p1, p2 in combinations(pts, 2):
        if (p1, p2) in covered:
            continue
        L = line_from_points(F, p1, p2)
        if L in found:
            continue
        if line_on_surface(L, F):
            found.add(L)
            lp = line_points(F, L)
            covered.update(combinations(sorted(lp), 2))
    return found


def initial_triple(q: int) -> tuple[int, int, int]:
    """Line indices of the skew triple (L_0, L_{q+2}, L_{2q+4}) used to seed the orbit search."""
    return (0, q + 2, 2 * q + 4)
