"""Cone geometry of an (A, B, C) triple, its fixed edges and the domino region.

Points are grid coordinates; constructed points may sit on half-integers.
All region tests are intersections of half-planes bounded by slope +-1 lines
through the stub vertices, so the three cases need no separate code paths.
"""

from __future__ import annotations

import functools
import itertools
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .grid import (
    EdgeState,
    DIRS,
    EMPTY,
    OCCUPIED,
    UNDET,
    FplGrid,
    LinkPattern,
    arch_pattern,
    boundary,
    is_type_abc,
    lattice,
)
from .partitions import Dimer, HoneycombRegion, Point, Tri, honeycomb, project, tri_points, triangles_at

# inward normal and counterclockwise tangent of each side (bottom, right, top, left)
_INWARD = ((0, 1), (-1, 0), (0, -1), (1, 0))
_CCW = ((1, 0), (0, 1), (-1, 0), (0, -1))

XY = tuple[float, float]


class InvalidTripleError(ValueError):
    """The three positions do not describe three nested bundles."""


class ContradictionError(ValueError):
    """Constraint propagation reached an impossible state."""


class StructureError(ValueError):
    """The undetermined edges do not form the expected domino region."""


# -- classification ------------------------------------------------------


def _stub_frame(n: int, pos: int) -> tuple[tuple[int, int], int]:
    (x, y), _ = lattice(n).stub_vertex(pos)
    return (x, y), (pos % (4 * n)) // n


def in_cone(n: int, apex: int, pos: int) -> bool:
    """Whether the stub vertex at ``pos`` lies in the closed cone of the stub at ``apex``."""
    (x, y), side = _stub_frame(n, apex)
    (u, v), _ = _stub_frame(n, pos)
    nx, ny = _INWARD[side]
    dx, dy = u - x, v - y
    return dx * nx + dy * ny >= abs(dx * ny - dy * nx)


def _sizes(n: int, ccw: Sequence[int]) -> tuple[int, int, int]:
    x1, x2, x3 = ccw
    g1, g2, g3 = (x2 - x1) % (4 * n), (x3 - x2) % (4 * n), (x1 - x3) % (4 * n)
    nums = (g1 + g3 - g2, g1 + g2 - g3, g2 + g3 - g1)
    if any(m % 4 or m <= 0 for m in nums):
        raise InvalidTripleError(f"positions {tuple(ccw)} do not bound three bundles on n={n}")
    return nums[0] // 4, nums[1] // 4, nums[2] // 4


def transform_position(n: int, pos: int, rotation: int, mirror: bool) -> int:
    """Image of a perimeter position under quarter turns followed by the mirror x -> n-1-x."""
    p = (pos + rotation * n) % (4 * n)
    if mirror:
        p = (n - 1 - p) % (4 * n)
    return p


def _ray_end(n: int, start: XY, d: tuple[int, int]) -> float:
    """Parameter at which the ray leaves the square [0, n-1]^2."""
    ts = []
    for coord, step in zip(start, d):
        ts.append((n - 1 - coord) if step > 0 else coord)
    return min(ts)


def _hit(start: XY, d: tuple[int, int], origin: XY, e: tuple[int, int], length: float) -> float | None:
    """Parameter where the ray start + t d meets the segment origin + s e, 0 <= s <= length."""
    if d[0] * e[0] + d[1] * e[1] != 0:
        return None
    t = ((origin[0] - start[0]) * d[0] + (origin[1] - start[1]) * d[1]) / 2
    s = ((start[0] - origin[0]) * e[0] + (start[1] - origin[1]) * e[1]) / 2
    if t < 0 or s < 0 or s > length:
        return None
    return t


def _add(p: XY, d: tuple[int, int], t: float) -> XY:
    return (p[0] + t * d[0], p[1] + t * d[1])


@dataclass(frozen=True)
class HalfPlane:
    """Closed half-plane {X : (X - anchor) . normal >= 0}."""

    anchor: XY
    normal: tuple[int, int]

    def value(self, p: XY) -> float:
        return (p[0] - self.anchor[0]) * self.normal[0] + (p[1] - self.anchor[1]) * self.normal[1]


def _facing(anchor: XY, d: tuple[int, int], toward: XY) -> HalfPlane:
    """Half-plane bounded by the line through anchor along d, on the side of ``toward``."""
    m = (-d[1], d[0])
    hp = HalfPlane(anchor, m)
    if hp.value(toward) < 0:
        hp = HalfPlane(anchor, (d[1], -d[0]))
    return hp


@dataclass(frozen=True)
class ArchGeometry:
    """A classified triple: C is the cone center, A and B follow it counterclockwise."""

    n: int
    A: int
    B: int
    C: int
    a: int
    b: int
    c: int
    case: str
    rotation: int
    mirror: bool
    points: tuple[tuple[str, XY], ...] = field(compare=False)

    @property
    def parity(self) -> int:
        return (self.C + 1) % 2

    @property
    def sizes(self) -> tuple[int, int, int]:
        return self.a, self.b, self.c

    def point(self, name: str) -> XY:
        return dict(self.points)[name]

    def pattern(self) -> LinkPattern:
        return arch_pattern(self.n, (self.A, self.B, self.C), (self.a, self.b, self.c))

    def normalized(self) -> ArchGeometry:
        """The same triple moved by the normalizing symmetry (C on the bottom side)."""
        t = [transform_position(self.n, p, self.rotation, self.mirror) for p in (self.A, self.B, self.C)]
        return classify(self.n, *t)

    def _side(self, pos: int) -> int:
        return (pos % (4 * self.n)) // self.n

    def _halfplanes(self) -> tuple[list[HalfPlane], list[HalfPlane]]:
        """Half-planes cutting out P, and those of the rectangle C B' D A''."""
        n = self.n
        cv = _stub_frame(n, self.C)[0]
        cs = self._side(self.C)
        nx, ny = _INWARD[cs]
        tx, ty = _CCW[cs]
        d1, d2 = (nx + tx, ny + ty), (nx - tx, ny - ty)
        inside = (cv[0] + nx, cv[1] + ny)
        cone = [_facing(cv, d1, inside), _facing(cv, d2, inside)]
        outer = []
        for name, ray in (("A", "A'"), ("B", "B''")):
            p = self.point(name)
            q = self.point(ray)
            if p == q:
                continue
            d = (1 if q[0] > p[0] else -1, 1 if q[1] > p[1] else -1)
            outer.append(_facing(p, d, inside))
        rect = []
        for name, ray in (("A", "A''"), ("B", "B'")):
            p = self.point(name)
            d = self._inner_dir(name)
            rect.append(_facing(p, d, cv))
        return cone + outer, cone + rect

    def _inner_dir(self, name: str) -> tuple[int, int]:
        cs = self._side(self.C)
        nx, ny = _INWARD[cs]
        tx, ty = _CCW[cs]
        return (nx + tx, ny + ty) if name == "A" else (nx - tx, ny - ty)

    def in_P(self, p: XY, eps: float = 1e-9) -> bool:
        hp, _ = self._halfplanes()
        return all(h.value(p) >= -eps for h in hp)

    def in_rectangle(self, p: XY, eps: float = 1e-9) -> bool:
        _, rect = self._halfplanes()
        return all(h.value(p) >= -eps for h in rect)

    def in_P_prime(self, p: XY, eps: float = 1e-9) -> bool:
        """Closed P minus the open rectangle C B' D A''."""
        hp, rect = self._halfplanes()
        if not all(h.value(p) >= -eps for h in hp):
            return False
        return not all(h.value(p) > eps for h in rect)

    def polygon(self, prime: bool = False) -> list[XY]:
        """Corner points of P (or P') in counterclockwise order, repeated points dropped."""
        names = ["C", "C'", "A'", "A", "B", "B''", "C''"]
        if prime:
            names = ["C'", "A'", "A", "B", "B''", "C''", "A''", "D", "B'"]
        pts = [self.point(k) for k in names]
        cx = sum(p[0] for p in pts) / len(pts)
        cy = sum(p[1] for p in pts) / len(pts)
        if not prime:
            pts = sorted(set(pts), key=lambda p: math.atan2(p[1] - cy, p[0] - cx))
            return pts
        out: list[XY] = []
        for p in pts:
            if not out or out[-1] != p:
                out.append(p)
        return out


def classify(n: int, *centers: int) -> ArchGeometry:
    """Identify the cone center, label it C (A, B follow counterclockwise), build the points."""
    if len(centers) != 3:
        raise InvalidTripleError("need exactly three center positions")
    m = 4 * n
    pos = sorted({p % m for p in centers})
    if len(pos) != 3 or len({p % 2 for p in pos}) != 1:
        raise InvalidTripleError(f"centers {centers} must be distinct and of one parity")
    sizes = dict(zip(pos, _sizes(n, pos)))
    cones = [p for i, p in enumerate(pos) if all(in_cone(n, p, q) for q in pos if q != p)]
    if len(cones) != 1:
        raise InvalidTripleError(f"no unique cone center among {pos}")
    k = pos.index(cones[0])
    C, A, B = pos[k], pos[(k + 1) % 3], pos[(k + 2) % 3]

    rotation = (-(C // n)) % 4
    plain = [transform_position(n, p, rotation, False) for p in (C, A, B)]
    flipped = [transform_position(n, p, rotation, True) for p in (C, B, A)]
    mirror = flipped < plain
    norm = flipped if mirror else plain
    sides = sorted(p // n for p in norm[1:])
    case = {(2, 2): "i", (1, 2): "ii", (2, 3): "ii", (1, 3): "iii"}.get(tuple(sides))
    if case is None:
        raise InvalidTripleError(f"unexpected side layout {sides}")
    pts = _construct_points(n, A, B, C)
    return ArchGeometry(n, A, B, C, sizes[A], sizes[B], sizes[C], case, rotation, mirror, pts)


def classify_pattern(p: LinkPattern) -> ArchGeometry:
    t = is_type_abc(p)
    if t is None:
        raise InvalidTripleError("link pattern is not three nested bundles")
    return classify(p.n, t.A, t.B, t.C)


def _construct_points(n: int, A: int, B: int, C: int) -> tuple[tuple[str, XY], ...]:
    cv, cs = _stub_frame(n, C)
    nx, ny = _INWARD[cs]
    tx, ty = _CCW[cs]
    d1, d2 = (nx + tx, ny + ty), (nx - tx, ny - ty)
    c1 = _ray_end(n, cv, d1)
    c2 = _ray_end(n, cv, d2)
    pts: dict[str, XY] = {"C": cv, "C'": _add(cv, d1, c1), "C''": _add(cv, d2, c2)}
    segs = ((d1, c1), (d2, c2))

    def shoot(start: XY, d: tuple[int, int]) -> XY:
        t = _ray_end(n, start, d)
        for e, length in segs:
            h = _hit(start, d, cv, e, length)
            if h is not None and h < t:
                t = h
        return _add(start, d, t)

    for name, p, inner in (("A", A, d1), ("B", B, d2)):
        v, s = _stub_frame(n, p)
        sx, sy = _INWARD[s]
        ux, uy = _CCW[s]
        rays = [(sx + ux, sy + uy), (sx - ux, sy - uy)]
        parallel = [r for r in rays if r == inner or r == (-inner[0], -inner[1])]
        if not parallel:
            raise InvalidTripleError(f"{name} has no diagonal toward the far side of C")
        inn = parallel[0]
        out = rays[1] if rays[0] == inn else rays[0]
        pts[name] = (float(v[0]), float(v[1]))
        if name == "A":
            pts["A''"], pts["A'"] = shoot(v, inn), shoot(v, out)
        else:
            pts["B'"], pts["B''"] = shoot(v, inn), shoot(v, out)
    # D: AA'' (direction of CC') meets BB' (direction of CC'')
    av, bv = pts["A"], pts["B"]
    t = ((bv[0] - av[0]) * d1[0] + (bv[1] - av[1]) * d1[1]) / 2
    pts["D"] = _add(av, d1, t)
    order = ("A", "A'", "A''", "B", "B'", "B''", "C", "C'", "C''", "D")
    return tuple((k, (float(pts[k][0]), float(pts[k][1]))) for k in order)


def all_triples(n: int, parity: int | None = None) -> list[ArchGeometry]:
    """Every legal placement of three bundles on the n x n grid, sorted by (A, B, C)."""
    out = []
    m = 4 * n
    for par in (0, 1) if parity is None else (parity,):
        free = range(1 - par, m, 2)
        for trip in itertools.combinations(free, 3):
            try:
                _sizes(n, trip)
            except InvalidTripleError:
                continue
            out.append(classify(n, *trip))
    return out


# -- constraint propagation ----------------------------------------------


def _tight_diagonals(n: int, partner: dict[int, int]) -> tuple[list[tuple[int, ...]], list[tuple[int, int]]]:
    """Constraints from diagonals crossed by as many arcs as they have vertices.

    Every arc with ends on opposite sides of such a diagonal passes through a
    distinct vertex of it, once, so each vertex uses exactly one edge on
    either side. The crossings also keep the order of the arcs' ends along
    the perimeter, which names the path through each vertex of the diagonal.
    Returns the exactly-one edge groups and (vertex, stub) same-path pairs.
    """
    lat = lattice(n)
    m = 4 * n
    groups: list[tuple[int, ...]] = []
    labels: list[tuple[int, int]] = []
    for kind in (0, 1):
        f = (lambda x, y: x + y) if kind == 0 else (lambda x, y: x - y)
        for t in range(2 * n - 1) if kind == 0 else range(-(n - 1), n):
            diag = [lat.vid(x, y) for x in range(n) for y in range(n) if f(x, y) == t]

            def side(e: int) -> int:
                (x, y), d = lat.stub_vertex(lat.position(e))
                dx, dy = DIRS[d]
                return f(x + dx, y + dy) - t

            low = [e for e, o in partner.items() if side(e) < 0 < side(o)]
            if len(low) > len(diag):
                raise ContradictionError("more arcs than vertices across a diagonal")
            if len(low) < len(diag):
                continue
            for v in diag:
                x, y = lat.coords(v)
                lo = tuple(e for d, e in enumerate(lat.incident[v]) if f(x + DIRS[d][0], y + DIRS[d][1]) < t)
                hi = tuple(e for d, e in enumerate(lat.incident[v]) if f(x + DIRS[d][0], y + DIRS[d][1]) > t)
                groups += [lo, hi]
            # ccw along the low arc runs toward larger x on x+y=t, smaller x on x-y=t
            p0 = lat.position(partner[low[0]])
            low.sort(key=lambda e: (lat.position(e) - p0) % m)
            diag.sort(key=lambda v: lat.coords(v)[0], reverse=kind == 1)
            labels += list(zip(diag, low))
    return groups, labels


@functools.lru_cache(maxsize=None)
def _tables(n: int) -> tuple[tuple, tuple]:
    """Per vertex (edge, other end) pairs, and per edge {end: other end}."""
    lat = lattice(n)
    nb = tuple(tuple((e, lat.other(e, v)) for e in lat.incident[v]) for v in range(lat.num_vertices))
    other = tuple({u: w, w: u} if w >= 0 else {u: -1} for u, w in lat.ends)
    return nb, other


class Propagator:
    """Partial FPL with union-find over occupied paths.

    A merged component may hold at most two stubs, and two stubs only if the
    link pattern pairs them. The local rule at a vertex keeps the 2-subsets of
    its undetermined edges that survive the neighbour degree bounds, the
    exactly-one groups and this connectivity test; an edge on which all
    survivors agree is fixed. With crossing connectivity this generalizes the
    rule that two paths headed to different exits cannot be joined.
    """

    def __init__(self, g: FplGrid, pattern: LinkPattern | None = None, diagonals: bool = False) -> None:
        self.n = g.n
        self.lat = lat = lattice(g.n)
        self.partner: dict[int, int] | None = None
        if pattern is not None:
            self.partner = {}
            for i, j in pattern.pairs():
                s, t = lat.stub(pattern.position(i)), lat.stub(pattern.position(j))
                self.partner[s], self.partner[t] = t, s
        self.groups: list[tuple[int, ...]] = []
        labels: list[tuple[int, int]] = []
        if diagonals and self.partner:
            self.groups, labels = _tight_diagonals(g.n, self.partner)
        self.egroups: dict[int, list[int]] = defaultdict(list)
        for gi, grp in enumerate(self.groups):
            for e in grp:
                self.egroups[e].append(gi)
        self.nb, self.other_end = _tables(g.n)
        self.st = [int(x) for x in g.states]
        self.parent = list(range(lat.num_vertices))
        self.stubs: dict[int, frozenset[int]] = defaultdict(frozenset)
        for e in range(lat.num_edges):
            if self.st[e] == OCCUPIED:
                self._join(e)
        for v, e in labels:
            if self.st[e] != OCCUPIED:
                raise ContradictionError("a crossing arc starts on an empty stub")
            self._union(v, lat.ends[e][0])
        for v in range(lat.num_vertices):
            if not self._merged_ok(self.stubs[self.find(v)]):
                raise ContradictionError("occupied paths join non-partner exits")

    def copy(self) -> Propagator:
        o = object.__new__(Propagator)
        o.__dict__.update(self.__dict__)
        o.st = self.st[:]
        o.parent = self.parent[:]
        o.stubs = self.stubs.copy()
        return o

    def grid(self) -> FplGrid:
        return FplGrid(self.n, tuple(EdgeState(x) for x in self.st))

    def find(self, u: int) -> int:
        p = self.parent
        while p[u] != u:
            p[u] = p[p[u]]
            u = p[u]
        return u

    def _merged_ok(self, s: frozenset[int] | set[int]) -> bool:
        if len(s) > 2:
            return False
        if len(s) == 2 and self.partner is not None:
            a, b = tuple(s)
            return self.partner[a] == b
        return True

    def _join(self, e: int) -> None:
        u, w = self.lat.ends[e]
        if w < 0:
            r = self.find(u)
            self.stubs[r] = self.stubs[r] | {e}
            return
        self._union(u, w)

    def _union(self, u: int, w: int) -> None:
        ru, rw = self.find(u), self.find(w)
        if ru != rw:
            self.parent[ru] = rw
            self.stubs[rw] = self.stubs[rw] | self.stubs.pop(ru, frozenset())

    def undetermined_at(self, v: int) -> bool:
        st = self.st
        return any(st[e] == UNDET for e, _ in self.nb[v])

    def options(self, v: int) -> list[dict[int, int]]:
        """Surviving assignments of the undetermined edges at v."""
        st = self.st
        inc = self.nb[v]
        und = [e for e, _ in inc if st[e] == UNDET]
        need = 2 - sum(1 for e, _ in inc if st[e] == OCCUPIED)
        if need < 0 or need > len(und):
            return []
        out = []
        for choice in itertools.combinations(und, need):
            if self._admissible(v, und, choice):
                out.append({e: (OCCUPIED if e in choice else EMPTY) for e in und})
        return out

    def _admissible(self, v: int, und: list[int], choice: tuple[int, ...]) -> bool:
        st, nb = self.st, self.nb
        for e, w in nb[v]:
            if w < 0 or st[e] != UNDET:
                continue
            o = 1 if e in choice else 0
            u = 0
            for f, _ in nb[w]:
                if f != e:
                    s = st[f]
                    if s == OCCUPIED:
                        o += 1
                    elif s == UNDET:
                        u += 1
            if o > 2 or o + u < 2:
                return False
        if self.groups:
            for e in und:
                for gi in self.egroups.get(e, ()):
                    occ = free = 0
                    for f in self.groups[gi]:
                        s = (OCCUPIED if f in choice else EMPTY) if f in und else st[f]
                        if s == OCCUPIED:
                            occ += 1
                        elif s == UNDET:
                            free += 1
                    if occ > 1 or occ + free < 1:
                        return False
        root = self.find(v)
        roots = {root}
        stubs = self.stubs[root]
        extra: set[int] | None = None
        for e in choice:
            w = self.other_end[e][v]
            if w < 0:
                extra = (extra or set()) | {e}
            else:
                r = self.find(w)
                if r not in roots:
                    roots.add(r)
                    extra = (extra or set()) | self.stubs[r]
        if extra is None:
            return True
        return self._merged_ok(stubs | extra)

    def assign(self, e: int, val: int) -> None:
        if self.st[e] != UNDET:
            if self.st[e] != val:
                raise ContradictionError(f"edge {self.lat.edges[e]} forced both ways")
            return
        self.st[e] = val
        if val == OCCUPIED:
            self._join(e)
            if not self._merged_ok(self.stubs[self.find(self.lat.ends[e][0])]):
                raise ContradictionError("occupied paths join non-partner exits")

    def _touched(self, e: int) -> set[int]:
        lat = self.lat
        out: set[int] = set()
        for x in lat.ends[e]:
            if x < 0:
                continue
            out.add(x)
            out.update(y for _, y in self.nb[x] if y >= 0)
        for gi in self.egroups.get(e, ()):
            for f in self.groups[gi]:
                out.update(x for x in lat.ends[f] if x >= 0)
        return out

    def step(self, v: int) -> list[int]:
        """Apply the local rule at v once; return the edges it fixed."""
        lat, st = self.lat, self.st
        occ = 0
        und = []
        for e, _ in self.nb[v]:
            s = st[e]
            if s == OCCUPIED:
                occ += 1
            elif s == UNDET:
                und.append(e)
        if not und:
            if occ != 2:
                raise ContradictionError(f"vertex {lat.coords(v)} has wrong degree")
            return []
        if occ == 2 or occ + len(und) == 2:
            val = EMPTY if occ == 2 else OCCUPIED
            for e in und:
                self.assign(e, val)
            return und
        opts = self.options(v)
        if not opts:
            raise ContradictionError(f"vertex {lat.coords(v)} has no admissible completion")
        fixed = []
        for e in opts[0]:
            vals = {o[e] for o in opts}
            if len(vals) == 1:
                self.assign(e, vals.pop())
                fixed.append(e)
        return fixed

    def run(self, queue: Iterable[int] | None = None) -> int:
        """Local rule to fixpoint; returns the number of edges fixed."""
        todo = set(range(self.lat.num_vertices) if queue is None else queue)
        count = 0
        while todo:
            v = todo.pop()
            for e in self.step(v):
                count += 1
                todo |= self._touched(e)
        return count

    def probe(self, around: Iterable[int] | None = None, once: bool = False) -> int:
        """Singleton-consistency pass: drop local options that propagate to a contradiction.

        ``around`` limits the pass to the given vertices; ``once`` stops after one sweep.
        """
        lat = self.lat
        verts = sorted(set(range(lat.num_vertices) if around is None else around))
        count = 0
        changed = True
        while changed:
            changed = False
            for v in verts:
                if not self.undetermined_at(v):
                    continue
                alive = []
                for opt in self.options(v):
                    trial = self.copy()
                    try:
                        for e, val in opt.items():
                            trial.assign(e, val)
                        trial.run({v} | {lat.other(e, v) for e in opt if lat.other(e, v) >= 0})
                    except ContradictionError:
                        continue
                    alive.append(opt)
                if not alive:
                    raise ContradictionError(f"vertex {lat.coords(v)} has no viable option")
                fixed = [e for e in alive[0] if len({o[e] for o in alive}) == 1]
                for e in fixed:
                    self.assign(e, alive[0][e])
                if fixed:
                    count += len(fixed) + self.run()
                    changed = not once
        return count

    def near(self, e: int, radius: int) -> list[int]:
        n = self.n
        x, y = _midpoint(n, e)
        return [
            self.lat.vid(u, v)
            for u in range(n)
            for v in range(n)
            if abs(u - x) + abs(v - y) <= radius + 0.5
        ]

    def solve(self, limit: int = 1, focus: XY | None = None) -> list[FplGrid]:
        """Up to ``limit`` completions by depth-first branching.

        Branches on the open vertex nearest ``focus`` (fewest open edges
        when no focus is given); refutations tend to stay local.
        """
        out: list[FplGrid] = []
        self._search(out, limit, focus)
        return out

    def _pick(self, focus: XY | None) -> int:
        lat, st = self.lat, self.st
        best, key = -1, None
        for v in range(lat.num_vertices):
            k = sum(1 for e, _ in self.nb[v] if st[e] == UNDET)
            if not k:
                continue
            if focus is None:
                if k == 2:
                    return v
                cand = (k, 0.0)
            else:
                x, y = lat.coords(v)
                cand = (abs(x - focus[0]) + abs(y - focus[1]), k)
            if key is None or cand < key:
                best, key = v, cand
        return best

    def _search(self, out: list[FplGrid], limit: int, focus: XY | None) -> None:
        lat = self.lat
        best = self._pick(focus)
        if best < 0:
            out.append(self.grid())
            return
        for opt in self.options(best):
            trial = self.copy()
            try:
                for e, val in opt.items():
                    trial.assign(e, val)
                trial.run({best} | {lat.other(e, best) for e in opt if lat.other(e, best) >= 0})
            except ContradictionError:
                continue
            trial._search(out, limit, focus)
            if len(out) >= limit:
                return


def degier_step(g: FplGrid, pattern: LinkPattern | None = None) -> FplGrid:
    """One pass of the local rule over every vertex, followed by degree closure.

    Without a pattern, connectivity only forbids a path with three or more exits.
    """
    p = Propagator(g, pattern)
    for v in range(p.lat.num_vertices):
        p.step(v)
    return p.grid()


@dataclass(frozen=True)
class FixedEdgeMap:
    """Edge states shared by every FPL of the geometry's type."""

    geometry: ArchGeometry
    grid: FplGrid
    stages: tuple[tuple[str, int], ...] = field(compare=False)

    def undetermined(self) -> list[int]:
        return [e for e, s in enumerate(self.grid.states) if s == UNDET]


def _midpoint(n: int, e: int) -> XY:
    u, w = lattice(n).ends[e]
    x0, y0 = lattice(n).coords(u)
    if w >= 0:
        x1, y1 = lattice(n).coords(w)
    else:
        kind, side, k = lattice(n).edges[e]
        _, d = lattice(n).stub_vertex(side * n + k)
        x1, y1 = x0 + DIRS[d][0], y0 + DIRS[d][1]
    return ((x0 + x1) / 2, (y0 + y1) / 2)


def fixed_edges(geo: ArchGeometry, certify: bool = True) -> FixedEdgeMap:
    """Edges forced for every FPL of type (A, B, C).

    Stages: boundary alternation, diagonal counting plus the local rule to a
    fixpoint, singleton probing, then (with ``certify``) a witness search that
    fixes every edge lacking a completion with the opposite value.
    """
    n = geo.n
    pattern = geo.pattern()
    start = boundary(n, pattern.parity)
    prop = Propagator(start, pattern, diagonals=True)
    stages = [("boundary", sum(1 for s in start.states if s != UNDET))]
    stages.append(("local", prop.run()))
    stages.append(("probe", prop.probe()))
    searched = 0
    if certify:
        searched = _certify(prop)
    stages.append(("search", searched))
    fm = FixedEdgeMap(geo, prop.grid(), tuple(stages))
    _check_forced_regions(fm)
    return fm


def _certify(prop: Propagator) -> int:
    """Fix every undetermined edge that takes one value in all completions.

    Each open edge needs a witness completion for both values; a failed
    search for the missing one fixes the edge.
    """
    lat = prop.lat
    count = 0
    seen: dict[int, set[int]] = defaultdict(set)
    first = prop.solve(1)
    if not first:
        raise ContradictionError("no FPL of this type exists")
    for e, s in enumerate(first[0].states):
        seen[e].add(s)
    for e in range(lat.num_edges):
        if prop.st[e] != UNDET or len(seen[e]) == 2:
            continue
        want = EMPTY if OCCUPIED in seen[e] else OCCUPIED
        trial = prop.copy()
        try:
            trial.assign(e, want)
            trial.run(v for v in lat.ends[e] if v >= 0)
            wit = trial.solve(1)
        except ContradictionError:
            wit = []
        if wit:
            for f, s in enumerate(wit[0].states):
                seen[f].add(s)
        else:
            prop.assign(e, 1 - want)
            count += 1 + prop.run(v for v in lat.ends[e] if v >= 0)
    return count


def _check_forced_regions(fm: FixedEdgeMap) -> None:
    geo, g = fm.geometry, fm.grid
    n = geo.n
    lat = lattice(n)
    horizontal = "H" if geo._side(geo.C) in (0, 2) else "V"
    for e in range(lat.first_stub):
        if g.states[e] != UNDET:
            continue
        mid = _midpoint(n, e)
        if not geo.in_P_prime(mid):
            raise StructureError(f"edge {lat.edges[e]} outside P' is not fixed")
        if lat.edges[e][0] == horizontal and geo.in_rectangle(mid):
            raise StructureError(f"edge {lat.edges[e]} in the rectangle CB'DA'' is not fixed")
    for v in range(lat.num_vertices):
        if all(g.states[e] == UNDET for e in lat.incident[v]):
            raise StructureError(f"vertex {lat.coords(v)} has no fixed edge")


# -- dominos and the honeycomb isomorphism ----------------------------------


@dataclass(frozen=True)
class Domino:
    middle: int
    cells: tuple[tuple[int, int], tuple[int, int]]
    border: tuple[int, ...]
    ring: tuple[int, ...]  # the six corner vertices, counterclockwise


def _cell_edges(n: int, x: int, y: int) -> list[int]:
    lat = lattice(n)
    return [
        lat.edge_between(x, y, 0),
        lat.edge_between(x + 1, y, 1),
        lat.edge_between(x, y + 1, 0),
        lat.edge_between(x, y, 1),
    ]


def dominos(fm: FixedEdgeMap | FplGrid) -> list[Domino]:
    g = fm.grid if isinstance(fm, FixedEdgeMap) else fm
    n, st = g.n, g.states
    lat = lattice(n)
    out = []
    for e in range(lat.first_stub):
        if st[e] != OCCUPIED:
            continue
        kind, x, y = lat.edges[e]
        cells = ((x, y - 1), (x, y)) if kind == "H" else ((x - 1, y), (x, y))
        if any(not (0 <= cx < n - 1 and 0 <= cy < n - 1) for cx, cy in cells):
            continue
        border = {f for c in cells for f in _cell_edges(n, *c)} - {e}
        if any(st[f] != UNDET for f in border):
            continue
        verts = {v for f in border for v in lat.ends[f]}
        cx = sum(lat.coords(v)[0] for v in verts) / 6
        cy = sum(lat.coords(v)[1] for v in verts) / 6
        ring = sorted(verts, key=lambda v: math.atan2(lat.coords(v)[1] - cy, lat.coords(v)[0] - cx))
        out.append(Domino(e, cells, tuple(sorted(border)), tuple(ring)))
    return out


def _xy(p: Point) -> XY:
    return (p[0] + p[1] / 2, p[1] * math.sqrt(3) / 2)


def _tri_center(t: Tri) -> XY:
    pts = [_xy(p) for p in tri_points(t)]
    return (sum(p[0] for p in pts) / 3, sum(p[1] for p in pts) / 3)


def _rotations(adj: dict, pos: dict) -> dict:
    out = {}
    for v, ns in adj.items():
        x, y = pos[v]
        out[v] = sorted(ns, key=lambda w: math.atan2(pos[w][1] - y, pos[w][0] - x))
    return out


def _extend(grot: dict, hrot: dict, g0, g1, h0, h1) -> dict | None:
    phi = {g0: h0, g1: h1}
    stack = [g0, g1]
    while stack:
        g = stack.pop()
        gn, hn = grot[g], hrot[phi[g]]
        if len(gn) != len(hn):
            return None
        k = next(i for i, w in enumerate(gn) if w in phi)
        if phi[gn[k]] not in hn:
            return None
        j = hn.index(phi[gn[k]])
        for t in range(len(gn)):
            w, x = gn[(k + t) % len(gn)], hn[(j + t) % len(hn)]
            if w in phi:
                if phi[w] != x:
                    return None
            else:
                phi[w] = x
                stack.append(w)
    if len(phi) != len(grot) or len(set(phi.values())) != len(phi):
        return None
    return phi


@dataclass(frozen=True)
class ActiveRegion:
    """Dominos of the fixed-edge map and their identification with the honeycomb."""

    fixed: FixedEdgeMap
    dominos: tuple[Domino, ...]
    honeycomb: HoneycombRegion
    vertex_map: dict[int, Tri] = field(compare=False, repr=False)
    edge_to_dimer: dict[int, Dimer] = field(compare=False, repr=False)
    dimer_to_edge: dict[Dimer, int] = field(compare=False, repr=False)
    face_of: dict[int, Point] = field(compare=False, repr=False)
    domino_at: dict[Point, Domino] = field(compare=False, repr=False)

    @property
    def geometry(self) -> ArchGeometry:
        return self.fixed.geometry


def candidate_isomorphisms(fm: FixedEdgeMap) -> list[dict[int, Tri]]:
    """All orientation-preserving isomorphisms from the active graph onto the hexagon."""
    geo = fm.geometry
    n = geo.n
    lat = lattice(n)
    und = fm.undetermined()
    hc = honeycomb(geo.a, geo.b, geo.c)
    gadj: dict[int, list[int]] = defaultdict(list)
    for e in und:
        u, w = lat.ends[e]
        gadj[u].append(w)
        gadj[w].append(u)
    grot = _rotations(gadj, {v: lat.coords(v) for v in gadj})
    hrot = _rotations(hc.adjacency, {t: _tri_center(t) for t in hc.vertices})
    if len(grot) != len(hrot):
        raise StructureError(f"active graph has {len(grot)} vertices, hexagon has {len(hrot)}")
    g0 = min(grot, key=lambda v: (-len(grot[v]), v))
    g1 = grot[g0][0]
    found = []
    doms = dominos(fm)
    for h0 in sorted(hrot):
        if len(hrot[h0]) != len(grot[g0]):
            continue
        for h1 in hrot[h0]:
            phi = _extend(grot, hrot, g0, g1, h0, h1)
            if phi is None or not _preserves(phi, gadj, hc):
                continue
            if all(_ring_face(phi, d) is not None for d in doms):
                found.append(phi)
    return found


def _preserves(phi: dict, gadj: dict, hc: HoneycombRegion) -> bool:
    return all(phi[w] in hc.adjacency[phi[u]] for u in gadj for w in gadj[u])


def _ring_face(phi: dict, d: Domino) -> Point | None:
    """Face point whose ccw triangle ring is the image of the domino's ccw ring."""
    imgs = [phi[v] for v in d.ring]
    for p in {q for t in imgs for q in tri_points(t)}:
        ring = triangles_at(p)
        if set(ring) != set(imgs):
            continue
        k = ring.index(imgs[0])
        if all(ring[(k + i) % 6] == imgs[i] for i in range(6)):
            return p
    return None


def hexagon_corners(a: int, b: int, c: int) -> list[Point]:
    """Corners of the (a,b,c) hexagon, counterclockwise; sides run c, a, b, c, a, b."""
    return [project(a, 0, 0), project(a, 0, c), project(0, 0, c), project(0, b, c), project(0, b, 0), project(a, b, 0)]


def _corner_sites(phi: dict[int, Tri], n: int, corners: list[Point]) -> list[XY]:
    lat = lattice(n)
    inv = {t: v for v, t in phi.items()}
    out = []
    for p in corners:
        xs = [lat.coords(inv[t]) for t in triangles_at(p) if t in inv]
        out.append((sum(x for x, _ in xs) / len(xs), sum(y for _, y in xs) / len(xs)))
    return out


def _anchor(geo: ArchGeometry, cands: list[dict[int, Tri]]) -> dict[int, Tri]:
    """Pick the isomorphism: even vertices go to up-triangles, then the c side faces C.

    Which c side (the one leaving the first corner, or its opposite) is
    placed next to C depends on the color of C's boundary vertex.  This
    rule is what makes gyration keep the plane partition; see the notes.
    """
    lat = lattice(geo.n)
    even = [phi for phi in cands if all((sum(lat.coords(v)) % 2 == 0) == (t[0] == "U") for v, t in phi.items())]
    if not even:
        raise StructureError("no isomorphism sends even vertices to up-triangles")
    cx, cy = _stub_frame(geo.n, geo.C)[0]
    i = 0 if (cx + cy) % 2 else 3
    here = geo.point("C")

    def gap(phi: dict[int, Tri]) -> float:
        sites = _corner_sites(phi, geo.n, hexagon_corners(geo.a, geo.b, geo.c))
        mid = ((sites[i][0] + sites[i + 1][0]) / 2, (sites[i][1] + sites[i + 1][1]) / 2)
        return math.dist(mid, here)

    ranked = sorted(even, key=gap)
    if len(ranked) > 1 and math.isclose(gap(ranked[0]), gap(ranked[1])):
        raise StructureError("anchor rule is ambiguous")
    return ranked[0]


def active_region(geo: ArchGeometry, fmap: FixedEdgeMap | None = None) -> ActiveRegion:
    fm = fmap if fmap is not None else fixed_edges(geo)
    lat = lattice(geo.n)
    und = set(fm.undetermined())
    doms = dominos(fm)
    covered = {e for d in doms for e in d.border}
    if covered != und:
        raise StructureError(f"{len(und - covered)} undetermined edges lie on no domino")
    hc = honeycomb(geo.a, geo.b, geo.c)
    if len(doms) != len(hc.faces):
        raise StructureError(f"{len(doms)} dominos for {len(hc.faces)} hexagonal faces")
    cands = candidate_isomorphisms(fm)
    if not cands:
        raise StructureError("active region is not an (a,b,c) hexagon")
    phi = _anchor(geo, cands)
    e2d: dict[int, Dimer] = {}
    for e in sorted(und):
        s, t = (phi[v] for v in lat.ends[e])
        e2d[e] = (s, t) if s[0] == "U" else (t, s)
    face_of: dict[int, Point] = {}
    domino_at: dict[Point, Domino] = {}
    for d in doms:
        p = _ring_face(phi, d)
        if p is None:
            raise StructureError(f"domino at {lat.edges[d.middle]} is not a hexagonal face")
        ring = triangles_at(p)
        u, w = (ring.index(phi[v]) for v in lat.ends[d.middle])
        if (u - w) % 6 != 3:
            raise StructureError(f"middle edge {lat.edges[d.middle]} is not a diameter")
        face_of[d.middle] = p
        domino_at[p] = d
    return ActiveRegion(fm, tuple(doms), hc, phi, e2d, {v: k for k, v in e2d.items()}, face_of, domino_at)
