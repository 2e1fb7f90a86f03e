"""Plane partitions in an a x b x c box, their lozenge tilings and counts.

A plane partition is an a x b matrix of heights in ``[0, c]``, weakly
decreasing along rows and columns. Row index runs along x, column index
along y, heights along z.

Tilings live on the triangular lattice with integer coordinates ``(u, v)``
standing for ``u * e1 + v * e2`` where ``e1`` and ``e2`` are unit vectors at
0 and 60 degrees. The 3D box projects onto the plane by
``(x, y, z) -> (x - z, z - y)``, so the unit steps along x, y, z become the
lattice directions at 0, 240 and 120 degrees, and the hexagon boundary reads
a, b, c, a, b, c counterclockwise.

Triangles are honeycomb vertices: ``("U", u, v)`` is ``{p, p+e1, p+e2}`` and
``("D", u, v)`` is ``{p+e1, p+e2, p+e1+e2}`` with ``p = (u, v)``. A dimer is
an (up, down) pair of triangles sharing a side, i.e. one lozenge.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

DEFAULT_PP_BOUND = 64

Point = tuple[int, int]
Tri = tuple[str, int, int]
Dimer = tuple[Tri, Tri]

# lattice step -> 3D unit step
_LIFT = {
    (1, 0): (1, 0, 0),
    (0, -1): (0, 1, 0),
    (-1, 1): (0, 0, 1),
}
_LIFT.update({(-du, -dv): (-x, -y, -z) for (du, dv), (x, y, z) in list(_LIFT.items())})


class BoundExceededError(ValueError):
    """Enumeration requested above the configured bound."""


class NotAMatchingError(ValueError):
    """Edge set is not a perfect matching of the honeycomb region."""


def project(x: int, y: int, z: int) -> Point:
    return (x - z, z - y)


@dataclass(frozen=True)
class PlanePartition:
    a: int
    b: int
    c: int
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if min(self.a, self.b, self.c) < 0:
            raise ValueError("box sides must be non-negative")
        if len(self.rows) != self.a or any(len(r) != self.b for r in self.rows):
            raise ValueError(f"heights must form a {self.a}x{self.b} matrix")
        for i in range(self.a):
            for j in range(self.b):
                h = self.rows[i][j]
                if not 0 <= h <= self.c:
                    raise ValueError(f"height {h} at ({i},{j}) outside [0,{self.c}]")
                if i and self.rows[i - 1][j] < h or j and self.rows[i][j - 1] < h:
                    raise ValueError(f"heights increase at ({i},{j})")

    @classmethod
    def empty(cls, a: int, b: int, c: int) -> PlanePartition:
        return cls(a, b, c, tuple((0,) * b for _ in range(a)))

    @classmethod
    def full(cls, a: int, b: int, c: int) -> PlanePartition:
        return cls(a, b, c, tuple((c,) * b for _ in range(a)))

    @property
    def boxes(self) -> int:
        return sum(map(sum, self.rows))

    def to_json(self) -> dict:
        return {"a": self.a, "b": self.b, "c": self.c, "rows": [list(r) for r in self.rows]}

    @classmethod
    def from_json(cls, data: dict) -> PlanePartition:
        rows = tuple(tuple(int(h) for h in r) for r in data["rows"])
        return cls(int(data["a"]), int(data["b"]), int(data["c"]), rows)


def complement(pp: PlanePartition) -> PlanePartition:
    a, b, c = pp.a, pp.b, pp.c
    rows = tuple(tuple(c - pp.rows[a - 1 - i][b - 1 - j] for j in range(b)) for i in range(a))
    return PlanePartition(a, b, c, rows)


# -- counting ---------------------------------------------------------------


def macmahon_product(a: int, b: int, c: int) -> int:
    """Triple product of (i+j+k-1)/(i+j+k-2), accumulated as one exact fraction."""
    num = den = 1
    for i in range(1, a + 1):
        for j in range(1, b + 1):
            for k in range(1, c + 1):
                num *= i + j + k - 1
                den *= i + j + k - 2
    q, r = divmod(num, den)
    if r:
        raise ArithmeticError("product form is not an integer")
    return q


def macmahon_binomial(a: int, b: int, c: int) -> int:
    """Ratio of binomial products C(n-1,a)...C(n-b,a) at n=a+b+c over the same at n=a+b."""
    n = a + b + c
    num = math.prod(math.comb(n - j, a) for j in range(1, b + 1))
    den = math.prod(math.comb(a + b - j, a) for j in range(1, b + 1))
    q, r = divmod(num, den)
    if r:
        raise ArithmeticError("binomial form is not an integer")
    return q


def hyperfactorial(p: int) -> int:
    """H(p) = (p-1)! (p-2)! ... 1!, with H(p) = 1 for p <= 1."""
    return math.prod(math.factorial(k) for k in range(1, p))


def macmahon_hyperfactorial_as_printed(a: int, b: int, c: int) -> Fraction:
    """H(a+b+c)H(a)H(b)H(c) / (H(a+b)H(b+c-1)H(c+a)), exactly as typeset.

    Disagrees with the other two forms in general (120 instead of 20 at
    (2,2,2)); kept for diagnostics only.
    """
    H = hyperfactorial
    return Fraction(H(a + b + c) * H(a) * H(b) * H(c), H(a + b) * H(b + c - 1) * H(c + a))


def macmahon_hyperfactorial(a: int, b: int, c: int) -> int:
    """Hyperfactorial form with H(b+c) in the denominator, which matches the other forms."""
    H = hyperfactorial
    q, r = divmod(H(a + b + c) * H(a) * H(b) * H(c), H(a + b) * H(b + c) * H(c + a))
    if r:
        raise ArithmeticError("hyperfactorial form is not an integer")
    return q


def macmahon(a: int, b: int, c: int) -> int:
    """Number of plane partitions in an a x b x c box."""
    if min(a, b, c) < 0:
        raise ValueError("box sides must be non-negative")
    value = macmahon_product(a, b, c)
    other = macmahon_binomial(a, b, c)
    if value != other:
        raise ArithmeticError(f"product form {value} != binomial form {other}")
    return value


@dataclass(frozen=True)
class QPolynomial:
    """Polynomial in q with exact integer coefficients, lowest degree first."""

    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        c = list(self.coeffs)
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c) or (0,))

    @classmethod
    def from_counts(cls, counts: dict[int, int]) -> QPolynomial:
        if not counts:
            return cls((0,))
        c = [0] * (max(counts) + 1)
        for k, v in counts.items():
            c[k] += v
        return cls(tuple(c))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, q: int | Fraction) -> int | Fraction:
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * q + c
        return acc

    def __str__(self) -> str:
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if k == 0:
                terms.append(str(c))
                continue
            mono = "q" if k == 1 else f"q^{k}"
            terms.append(mono if c == 1 else f"{c}*{mono}")
        return " + ".join(terms) or "0"


def _mul_one_minus(p: list[int], m: int) -> list[int]:
    out = p + [0] * m
    for k in range(len(p)):
        out[k + m] -= p[k]
    return out


def _div_one_minus(p: list[int], m: int) -> list[int]:
    """Exact quotient p / (1 - q^m); raises if not divisible."""
    deg = len(p) - 1 - m
    if deg < 0:
        raise ArithmeticError("not divisible")
    q = [0] * (deg + 1)
    for k in range(deg + 1):
        q[k] = p[k] + (q[k - m] if k >= m else 0)
    if _mul_one_minus(q, m) != p:
        raise ArithmeticError(f"not divisible by 1 - q^{m}")
    return q


def macdonald_q(a: int, b: int, c: int) -> QPolynomial:
    """Box-count generating function: triple product of (1-q^(i+j+k-1))/(1-q^(i+j+k-2))."""
    if min(a, b, c) < 0:
        raise ValueError("box sides must be non-negative")
    exps: dict[int, int] = {}
    for i in range(1, a + 1):
        for j in range(1, b + 1):
            for k in range(1, c + 1):
                exps[i + j + k - 1] = exps.get(i + j + k - 1, 0) + 1
                exps[i + j + k - 2] = exps.get(i + j + k - 2, 0) - 1
    poly = [1]
    for m, e in sorted(exps.items()):
        for _ in range(e):
            poly = _mul_one_minus(poly, m)
    for m, e in sorted(exps.items()):
        for _ in range(-e):
            poly = _div_one_minus(poly, m)
    return QPolynomial(tuple(poly))


# -- enumeration and moves --------------------------------------------------


def enumerate_pp(a: int, b: int, c: int, bound: int = DEFAULT_PP_BOUND) -> Iterator[PlanePartition]:
    """All plane partitions in the box, lexicographic in the row-major heights."""
    if a * b * c > bound:
        raise BoundExceededError(f"abc={a * b * c} exceeds enumeration bound {bound}")
    cells = [(i, j) for i in range(a) for j in range(b)]
    h = [[0] * b for _ in range(a)]

    def rec(k: int) -> Iterator[PlanePartition]:
        if k == len(cells):
            yield PlanePartition(a, b, c, tuple(tuple(r) for r in h))
            return
        i, j = cells[k]
        top = min(c, h[i - 1][j] if i else c, h[i][j - 1] if j else c)
        for v in range(top + 1):
            h[i][j] = v
            yield from rec(k + 1)
        h[i][j] = 0

    yield from rec(0)


def can_add(pp: PlanePartition, i: int, j: int) -> bool:
    r = pp.rows
    return r[i][j] < pp.c and (i == 0 or r[i - 1][j] > r[i][j]) and (j == 0 or r[i][j - 1] > r[i][j])


def can_remove(pp: PlanePartition, i: int, j: int) -> bool:
    r = pp.rows
    return r[i][j] > 0 and (i == pp.a - 1 or r[i + 1][j] < r[i][j]) and (j == pp.b - 1 or r[i][j + 1] < r[i][j])


def _bump(pp: PlanePartition, i: int, j: int, d: int) -> PlanePartition:
    rows = [list(r) for r in pp.rows]
    rows[i][j] += d
    return PlanePartition(pp.a, pp.b, pp.c, tuple(tuple(r) for r in rows))


def pp_flip_neighbors(pp: PlanePartition) -> list[PlanePartition]:
    """Partitions obtained by adding or removing one box."""
    out = []
    for i in range(pp.a):
        for j in range(pp.b):
            if can_add(pp, i, j):
                out.append(_bump(pp, i, j, 1))
            if can_remove(pp, i, j):
                out.append(_bump(pp, i, j, -1))
    return out


def flip_site(pp: PlanePartition, i: int, j: int) -> Point:
    """Lattice point at the center of the hexagon flipped by adding/removing at (i, j)."""
    h = pp.rows[i][j]
    if can_add(pp, i, j):
        return project(i + 1, j + 1, h + 1)
    if can_remove(pp, i, j):
        return project(i + 1, j + 1, h)
    raise ValueError(f"no flip available at ({i},{j})")


# -- honeycomb region and tilings -------------------------------------------


def tri_points(t: Tri) -> tuple[Point, Point, Point]:
    kind, u, v = t
    if kind == "U":
        return (u, v), (u + 1, v), (u, v + 1)
    return (u + 1, v), (u, v + 1), (u + 1, v + 1)


def triangles_at(p: Point) -> list[Tri]:
    """The six triangles around lattice point p, counterclockwise from the one east-northeast."""
    u, v = p
    return [
        ("U", u, v),
        ("D", u - 1, v),
        ("U", u - 1, v),
        ("D", u - 1, v - 1),
        ("U", u, v - 1),
        ("D", u, v - 1),
    ]


def _tri_of(points: frozenset[Point]) -> Tri:
    u = min(p[0] for p in points)
    v = min(p[1] for p in points)
    if points == {(u, v), (u + 1, v), (u, v + 1)}:
        return ("U", u, v)
    if points == {(u + 1, v), (u, v + 1), (u + 1, v + 1)}:
        return ("D", u, v)
    raise ValueError(f"not a unit triangle: {sorted(points)}")


def _is_unit(p: Point, q: Point) -> bool:
    return (q[0] - p[0], q[1] - p[1]) in _LIFT


def _lozenge(corners: list[Point]) -> Dimer:
    """Dimer for a lozenge given its four corners in cyclic order."""
    p0, p1, p2, p3 = corners
    if _is_unit(p0, p2):
        t1, t2 = frozenset((p0, p2, p1)), frozenset((p0, p2, p3))
    elif _is_unit(p1, p3):
        t1, t2 = frozenset((p1, p3, p0)), frozenset((p1, p3, p2))
    else:
        raise ValueError("not a lozenge")
    s, t = _tri_of(t1), _tri_of(t2)
    return (s, t) if s[0] == "U" else (t, s)


def lozenge_corners(d: Dimer) -> frozenset[Point]:
    return frozenset(tri_points(d[0])) | frozenset(tri_points(d[1]))


@dataclass(frozen=True)
class HoneycombRegion:
    """Honeycomb graph dual to the triangles of the (a, b, c) hexagon."""

    a: int
    b: int
    c: int
    vertices: frozenset[Tri]
    edges: frozenset[Dimer]
    faces: tuple[Point, ...]
    boundary_points: tuple[Point, ...]
    adjacency: dict[Tri, tuple[Tri, ...]] = field(compare=False, hash=False, repr=False)

    def neighbors(self, t: Tri) -> tuple[Tri, ...]:
        return self.adjacency[t]


@functools.lru_cache(maxsize=None)
def honeycomb(a: int, b: int, c: int) -> HoneycombRegion:
    empty = _faces_3d(PlanePartition.empty(a, b, c))
    tris: set[Tri] = set()
    for corners in empty:
        s, t = _lozenge(corners)
        tris.update((s, t))
    edges = set()
    for t in tris:
        pts = tri_points(t)
        for k in range(3):
            side = frozenset((pts[k], pts[(k + 1) % 3]))
            for q in _third_points(side):
                other = _tri_of(side | {q})
                if other != t and other in tris:
                    edges.add((t, other) if t[0] == "U" else (other, t))
    points = {p for t in tris for p in tri_points(t)}
    faces = tuple(sorted(p for p in points if all(x in tris for x in triangles_at(p))))
    bnd = tuple(sorted(points - set(faces)))
    adj: dict[Tri, list[Tri]] = {t: [] for t in tris}
    for s, t in edges:
        adj[s].append(t)
        adj[t].append(s)
    table = {t: tuple(sorted(ns)) for t, ns in adj.items()}
    return HoneycombRegion(a, b, c, frozenset(tris), frozenset(edges), faces, bnd, table)


def _third_points(side: frozenset[Point]) -> list[Point]:
    p, q = sorted(side)
    d = (q[0] - p[0], q[1] - p[1])
    # the two lattice points forming a unit triangle with p, q
    rot = {(1, 0): ((0, 1), (1, -1)), (0, 1): ((-1, 1), (1, 0)), (-1, 1): ((-1, 0), (0, 1))}
    if d not in rot:
        d = (-d[0], -d[1])
        p, q = q, p
    return [(p[0] + r[0], p[1] + r[1]) for r in rot[d]]


def _faces_3d(pp: PlanePartition) -> list[list[Point]]:
    """Projected corners (cyclic order) of every visible unit face of the stacked boxes."""
    a, b, c, H = pp.a, pp.b, pp.c, pp.rows
    faces = []
    for i in range(a):
        for j in range(b):
            h = H[i][j]
            faces.append([project(i, j, h), project(i + 1, j, h), project(i + 1, j + 1, h), project(i, j + 1, h)])
    for j in range(b):
        for k in range(c):
            x = sum(1 for i in range(a) if H[i][j] > k)
            faces.append([project(x, j, k), project(x, j + 1, k), project(x, j + 1, k + 1), project(x, j, k + 1)])
    for i in range(a):
        for k in range(c):
            y = sum(1 for j in range(b) if H[i][j] > k)
            faces.append([project(i, y, k), project(i + 1, y, k), project(i + 1, y, k + 1), project(i, y, k + 1)])
    return faces


@dataclass(frozen=True)
class DimerConfig:
    """Perfect matching of the honeycomb region of the (a, b, c) hexagon."""

    a: int
    b: int
    c: int
    dimers: frozenset[Dimer]

    @property
    def region(self) -> HoneycombRegion:
        return honeycomb(self.a, self.b, self.c)

    def validate(self) -> None:
        reg = self.region
        if not self.dimers <= reg.edges:
            raise NotAMatchingError("dimer outside the honeycomb region")
        covered = [t for d in self.dimers for t in d]
        if len(covered) != len(set(covered)) or set(covered) != reg.vertices:
            raise NotAMatchingError("edge set is not a perfect matching")


def pp_to_tiling(pp: PlanePartition) -> DimerConfig:
    dimers = frozenset(_lozenge(f) for f in _faces_3d(pp))
    return DimerConfig(pp.a, pp.b, pp.c, dimers)


def tiling_to_pp(d: DimerConfig) -> PlanePartition:
    """Recover heights by lifting lozenge sides to unit 3D steps from the corner (0, 0, c)."""
    d.validate()
    a, b, c = d.a, d.b, d.c
    adj: dict[Point, set[Point]] = {}
    lozenges = [lozenge_corners(x) for x in d.dimers]
    for corners in lozenges:
        pts = list(corners)
        for p in pts:
            for q in pts:
                if p != q and _is_unit(p, q):
                    adj.setdefault(p, set()).add(q)
    # the short diagonal of a lozenge is not a tiling edge
    for x in d.dimers:
        s = frozenset(tri_points(x[0])) & frozenset(tri_points(x[1]))
        p, q = tuple(s)
        adj[p].discard(q)
        adj[q].discard(p)
    start = project(0, 0, c)
    lift = {start: (0, 0, c)}
    stack = [start]
    while stack:
        p = stack.pop()
        x, y, z = lift[p]
        for q in adj.get(p, ()):
            dx, dy, dz = _LIFT[(q[0] - p[0], q[1] - p[1])]
            cand = (x + dx, y + dy, z + dz)
            if q in lift:
                if lift[q] != cand:
                    raise NotAMatchingError("tiling does not lift to a stepped surface")
                continue
            lift[q] = cand
            stack.append(q)
    rows = [[-1] * b for _ in range(a)]
    for corners in lozenges:
        pts = [lift[p] for p in corners]
        zs = {p[2] for p in pts}
        if len(zs) == 1:
            i = min(p[0] for p in pts)
            j = min(p[1] for p in pts)
            rows[i][j] = zs.pop()
    if any(h < 0 for r in rows for h in r):
        raise NotAMatchingError("tiling does not cover every column")
    return PlanePartition(a, b, c, tuple(tuple(r) for r in rows))


def flip_face(d: DimerConfig, p: Point) -> DimerConfig | None:
    """Rotate the three dimers around the hexagon at p, or None if not flippable."""
    cyc = triangles_at(p)
    ring = [(cyc[k], cyc[(k + 1) % 6]) for k in range(6)]
    ring = [(s, t) if s[0] == "U" else (t, s) for s, t in ring]
    inside = [e in d.dimers for e in ring]
    if inside == [True, False] * 3:
        keep, add = ring[0::2], ring[1::2]
    elif inside == [False, True] * 3:
        keep, add = ring[1::2], ring[0::2]
    else:
        return None
    return DimerConfig(d.a, d.b, d.c, (d.dimers - set(keep)) | set(add))
