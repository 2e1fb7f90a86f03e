"""Fully packed loop configurations on the n x n square grid.

Vertices are ``(x, y)`` with ``0 <= x, y < n`` and row 0 at the bottom.
Every vertex has four incident edges (right, up, left, down); at the
boundary some of them are external stubs. Edges are named by descriptors:

* ``("H", x, y)`` joins ``(x, y)`` and ``(x + 1, y)``
* ``("V", x, y)`` joins ``(x, y)`` and ``(x, y + 1)``
* ``("X", side, k)`` is the external stub at perimeter position
  ``side * n + k``; sides are bottom, right, top, left and positions run
  counterclockwise starting just right of the bottom-left corner.
"""

from __future__ import annotations

import enum
import functools
import json
from dataclasses import dataclass
from typing import Iterator, Sequence

DEFAULT_ORACLE_BOUND = 6


class EdgeState(enum.IntEnum):
    EMPTY = 0
    OCCUPIED = 1
    UNDETERMINED = 2


EMPTY, OCCUPIED, UNDET = EdgeState.EMPTY, EdgeState.OCCUPIED, EdgeState.UNDETERMINED

# direction index -> (dx, dy); incidence tuples are ordered the same way
RIGHT, UP, LEFT, DOWN = 0, 1, 2, 3
DIRS = ((1, 0), (0, 1), (-1, 0), (0, -1))


class InvalidGridError(ValueError):
    """A grid violates the degree-2 or boundary constraints."""


class OracleBoundError(ValueError):
    """Brute-force enumeration requested above the configured bound."""


class Lattice:
    """Edge indexing for the n x n grid. Use :func:`lattice` to get a cached one."""

    def __init__(self, n: int) -> None:
        if n < 1:
            raise ValueError(f"grid side must be positive, got {n}")
        self.n = n
        edges: list[tuple[str, int, int]] = []
        edges += [("H", x, y) for x in range(n - 1) for y in range(n)]
        edges += [("V", x, y) for x in range(n) for y in range(n - 1)]
        edges += [("X", p // n, p % n) for p in range(4 * n)]
        self.edges = tuple(edges)
        self.index = {e: i for i, e in enumerate(edges)}
        self.num_edges = len(edges)
        self.num_vertices = n * n
        self.first_stub = 2 * n * (n - 1)

        inc = [[-1] * 4 for _ in range(n * n)]
        ends: list[tuple[int, int]] = []
        for e in edges:
            kind, i, j = e
            eid = self.index[e]
            if kind == "H":
                u, v = self.vid(i, j), self.vid(i + 1, j)
                inc[u][RIGHT] = eid
                inc[v][LEFT] = eid
            elif kind == "V":
                u, v = self.vid(i, j), self.vid(i, j + 1)
                inc[u][UP] = eid
                inc[v][DOWN] = eid
            else:
                (x, y), d = self.stub_vertex(i * n + j)
                u, v = self.vid(x, y), -1
                inc[u][d] = eid
            ends.append((u, v))
        self.ends = tuple(ends)
        self.incident = tuple(tuple(row) for row in inc)

    def vid(self, x: int, y: int) -> int:
        return x + self.n * y

    def coords(self, v: int) -> tuple[int, int]:
        return v % self.n, v // self.n

    def stub_vertex(self, pos: int) -> tuple[tuple[int, int], int]:
        """Vertex carrying the external stub at ``pos`` and the stub's direction."""
        n = self.n
        side, k = divmod(pos % (4 * n), n)
        if side == 0:
            return (k, 0), DOWN
        if side == 1:
            return (n - 1, k), RIGHT
        if side == 2:
            return (n - 1 - k, n - 1), UP
        return (0, n - 1 - k), LEFT

    def stub(self, pos: int) -> int:
        return self.first_stub + pos % (4 * self.n)

    def is_stub(self, eid: int) -> bool:
        return eid >= self.first_stub

    def position(self, eid: int) -> int:
        return eid - self.first_stub

    def other(self, eid: int, v: int) -> int:
        u, w = self.ends[eid]
        return w if u == v else u

    def edge_between(self, x: int, y: int, d: int) -> int:
        return self.incident[self.vid(x, y)][d]


@functools.lru_cache(maxsize=None)
def lattice(n: int) -> Lattice:
    return Lattice(n)


@dataclass(frozen=True)
class FplGrid:
    """Edge-state assignment over all edges of the n x n grid.

    ``states[i]`` is the :class:`EdgeState` of ``lattice(n).edges[i]``.
    """

    n: int
    states: tuple[int, ...]

    @property
    def lat(self) -> Lattice:
        return lattice(self.n)

    def state(self, edge: tuple[str, int, int]) -> EdgeState:
        return EdgeState(self.states[self.lat.index[edge]])

    def occupied(self) -> list[tuple[str, int, int]]:
        lat = self.lat
        return sorted(lat.edges[i] for i, s in enumerate(self.states) if s == OCCUPIED)

    def undetermined(self) -> list[tuple[str, int, int]]:
        lat = self.lat
        return sorted(lat.edges[i] for i, s in enumerate(self.states) if s == UNDET)

    def is_complete(self) -> bool:
        return UNDET not in self.states

    def parity(self) -> int | None:
        """Alternation class of the occupied stubs, or None if not alternating."""
        lat = self.lat
        stubs = self.states[lat.first_stub:]
        for par in (0, 1):
            if all(s == (OCCUPIED if (p - par) % 2 == 0 else EMPTY) for p, s in enumerate(stubs)):
                return par
        return None

    def degree(self, v: int) -> int:
        return sum(self.states[e] == OCCUPIED for e in self.lat.incident[v])

    def with_states(self, updates: dict[int, int]) -> FplGrid:
        s = list(self.states)
        for e, val in updates.items():
            s[e] = val
        return FplGrid(self.n, tuple(s))

    def to_json(self) -> dict:
        return {"n": self.n, "occupied": [list(e) for e in self.occupied()]}

    @classmethod
    def from_json(cls, data: dict) -> FplGrid:
        n = int(data["n"])
        lat = lattice(n)
        states = [EMPTY] * lat.num_edges
        for kind, i, j in data["occupied"]:
            key = (str(kind), int(i), int(j))
            if key not in lat.index:
                raise ValueError(f"unknown edge descriptor {list(key)} for n={n}")
            states[lat.index[key]] = OCCUPIED
        return cls(n, tuple(states))

    def canonical_json(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))


@dataclass(frozen=True)
class LinkPattern:
    """Non-crossing pairing of the 2n occupied stubs.

    Labels ``0..2n-1`` follow the occupied stubs counterclockwise; label k sits
    at perimeter position ``2k + parity``.
    """

    n: int
    parity: int
    partner: tuple[int, ...]

    def pairs(self) -> list[tuple[int, int]]:
        return [(i, j) for i, j in enumerate(self.partner) if i < j]

    def position(self, label: int) -> int:
        return 2 * label + self.parity

    def rotated(self, shift: int = 1) -> LinkPattern:
        """Pattern rotated counterclockwise by ``shift`` perimeter positions."""
        m = 2 * self.n
        par = (self.parity + shift) % 2
        # label k moves from position 2k+parity to 2k+parity+shift
        off = (self.parity + shift - par) // 2
        partner = [0] * m
        for i, j in enumerate(self.partner):
            partner[(i + off) % m] = (j + off) % m
        return LinkPattern(self.n, par, tuple(partner))


def is_noncrossing(partner: Sequence[int]) -> bool:
    m = len(partner)
    if any(not (0 <= partner[i] < m) or partner[i] == i or partner[partner[i]] != i for i in range(m)):
        return False
    stack: list[int] = []
    for i in range(m):
        if i < partner[i]:
            stack.append(partner[i])
        elif not stack or stack.pop() != i:
            return False
    return True


def boundary(n: int, parity: int = 0) -> FplGrid:
    """Grid with alternating stubs (``parity`` class occupied) and all internal edges undetermined."""
    if parity not in (0, 1):
        raise ValueError("parity must be 0 or 1")
    lat = lattice(n)
    states = [UNDET] * lat.first_stub
    states += [OCCUPIED if (p - parity) % 2 == 0 else EMPTY for p in range(4 * n)]
    return FplGrid(n, tuple(states))


def check_valid(g: FplGrid) -> None:
    if not g.is_complete():
        raise InvalidGridError("grid has undetermined edges")
    for v in range(g.lat.num_vertices):
        d = g.degree(v)
        if d != 2:
            raise InvalidGridError(f"vertex {g.lat.coords(v)} has degree {d}")
    if g.parity() is None:
        raise InvalidGridError("external edges do not alternate")


def _fpl_row_major(n: int, parity: int) -> Iterator[tuple[int, ...]]:
    lat = lattice(n)
    states = list(boundary(n, parity).states)
    order = [(x, y) for y in range(n) for x in range(n)]

    def rec(k: int) -> Iterator[tuple[int, ...]]:
        if k == len(order):
            yield tuple(states)
            return
        x, y = order[k]
        inc = lat.incident[lat.vid(x, y)]
        have = (states[inc[LEFT]] == OCCUPIED) + (states[inc[DOWN]] == OCCUPIED)
        r, u = inc[RIGHT], inc[UP]
        r_free, u_free = x < n - 1, y < n - 1
        for rv in ((EMPTY, OCCUPIED) if r_free else (states[r],)):
            for uv in ((EMPTY, OCCUPIED) if u_free else (states[u],)):
                if have + (rv == OCCUPIED) + (uv == OCCUPIED) != 2:
                    continue
                states[r], states[u] = rv, uv
                yield from rec(k + 1)
        if r_free:
            states[r] = UNDET
        if u_free:
            states[u] = UNDET

    yield from rec(0)


def enumerate_all_fpl(n: int, parity: int = 0, bound: int = DEFAULT_ORACLE_BOUND) -> list[FplGrid]:
    """Every FPL on the n x n grid with the given boundary parity, by backtracking."""
    if n > bound:
        raise OracleBoundError(f"n={n} exceeds oracle bound {bound}")
    return [FplGrid(n, s) for s in _fpl_row_major(n, parity)]


def enumerate_all_fpl_by_edges(n: int, parity: int = 0, bound: int = 4) -> list[FplGrid]:
    """Second oracle: branch edge by edge in reverse index order, prune on vertex degrees."""
    if n > bound:
        raise OracleBoundError(f"n={n} exceeds oracle bound {bound}")
    lat = lattice(n)
    states = list(boundary(n, parity).states)
    free = list(range(lat.first_stub - 1, -1, -1))
    out: list[FplGrid] = []

    def ok(v: int) -> bool:
        occ = und = 0
        for e in lat.incident[v]:
            s = states[e]
            occ += s == OCCUPIED
            und += s == UNDET
        return occ <= 2 <= occ + und

    def rec(k: int) -> None:
        if k == len(free):
            out.append(FplGrid(n, tuple(states)))
            return
        e = free[k]
        u, v = lat.ends[e]
        for val in (OCCUPIED, EMPTY):
            states[e] = val
            if ok(u) and ok(v):
                rec(k + 1)
        states[e] = UNDET

    rec(0)
    return out


def _trace(g: FplGrid, start_edge: int, start_vertex: int, used: set[int]) -> int:
    """Follow occupied edges from ``start_edge`` into ``start_vertex``; return the final edge."""
    lat = g.lat
    e, v = start_edge, start_vertex
    used.add(e)
    while True:
        nxt = [f for f in lat.incident[v] if f != e and g.states[f] == OCCUPIED]
        if len(nxt) != 1:
            raise InvalidGridError(f"vertex {lat.coords(v)} does not have degree 2")
        e = nxt[0]
        if e in used:
            return e
        used.add(e)
        if lat.is_stub(e):
            return e
        v = lat.other(e, v)


def link_pattern(g: FplGrid) -> LinkPattern:
    check_valid(g)
    lat = g.lat
    par = g.parity()
    m = 2 * g.n
    partner = [-1] * m
    used: set[int] = set()
    for k in range(m):
        if partner[k] >= 0:
            continue
        s = lat.stub(2 * k + par)
        end = _trace(g, s, lat.ends[s][0], used)
        j = (lat.position(end) - par) // 2
        partner[k], partner[j] = j, k
    return LinkPattern(g.n, par, tuple(partner))


def internal_loop_count(g: FplGrid) -> int:
    """Number of closed cycles of occupied edges (paths ending on stubs excluded)."""
    check_valid(g)
    lat = g.lat
    used: set[int] = set()
    for k in range(2 * g.n):
        s = lat.stub(2 * k + g.parity())
        if s not in used:
            _trace(g, s, lat.ends[s][0], used)
    loops = 0
    for e in range(lat.first_stub):
        if g.states[e] == OCCUPIED and e not in used:
            loops += 1
            _trace(g, e, lat.ends[e][1], used)
    return loops


@dataclass(frozen=True)
class ArchType:
    """Three nested bundles: centers are perimeter positions of unoccupied stubs."""

    A: int
    B: int
    C: int
    a: int
    b: int
    c: int


def bundles(p: LinkPattern) -> list[tuple[int, int]] | None:
    """``(center position, size)`` for each maximal nested family, ccw from position 0.

    None unless the families exhaust every arc.
    """
    m = 2 * p.n
    out = []
    for k in range(m):
        if p.partner[k] != (k + 1) % m:
            continue
        size = 1
        while size < p.n and p.partner[(k - size) % m] == (k + 1 + size) % m:
            size += 1
        out.append(((p.position(k) + 1) % (4 * p.n), size))
    if sum(s for _, s in out) != p.n:
        return None
    return sorted(out)


def is_type_abc(p: LinkPattern) -> ArchType | None:
    """Three-bundle decomposition with all sizes positive, centers ccw from position 0."""
    bs = bundles(p)
    if bs is None or len(bs) != 3:
        return None
    (A, a), (B, b), (C, c) = bs
    return ArchType(A, B, C, a, b, c)


def arch_pattern(n: int, centers: Sequence[int], sizes: Sequence[int]) -> LinkPattern:
    """Link pattern of nested bundles of the given sizes around the given center positions."""
    if sum(sizes) != n:
        raise ValueError("bundle sizes must sum to n")
    par = (centers[0] + 1) % 2
    m = 2 * n
    partner = [-1] * m
    for ctr, s in zip(centers, sizes):
        if (ctr + 1) % 2 != par:
            raise ValueError("centers must share a parity class")
        k = ((ctr - 1 - par) // 2) % m
        for t in range(s):
            i, j = (k - t) % m, (k + 1 + t) % m
            if partner[i] >= 0 or partner[j] >= 0:
                raise ValueError("bundles overlap")
            partner[i], partner[j] = j, i
    if -1 in partner:
        raise ValueError("bundles do not cover the perimeter")
    return LinkPattern(n, par, tuple(partner))


def render_ascii(g: FplGrid) -> str:
    """Text picture: ``#`` occupied, ``.`` empty, ``?`` undetermined; vertices ``o``.

    Row 0 is printed last so the picture has row 0 at the bottom.
    """
    lat = g.lat
    n = g.n
    sym = {EMPTY: ".", OCCUPIED: "#", UNDET: "?"}
    hsym = {EMPTY: " . ", OCCUPIED: "===", UNDET: " ? "}
    lines = []
    top = "   " + "   ".join(sym[g.states[lat.edge_between(x, n - 1, UP)]] for x in range(n)) + "   "
    lines.append(top)
    for y in range(n - 1, -1, -1):
        row = hsym[g.states[lat.edge_between(0, y, LEFT)]]
        for x in range(n):
            row += "o"
            row += hsym[g.states[lat.edge_between(x, y, RIGHT)]]
        lines.append(row)
        if y > 0:
            lines.append("   " + "   ".join(sym[g.states[lat.edge_between(x, y, DOWN)]] for x in range(n)) + "   ")
    lines.append("   " + "   ".join(sym[g.states[lat.edge_between(x, 0, DOWN)]] for x in range(n)) + "   ")
    return "\n".join(line.rstrip() for line in lines) + "\n"
