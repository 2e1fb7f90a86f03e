"""Local moves, flip closure, gyration, and the honeycomb loops complementary to a matching."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

from .bijection import base_fpl, fpl_to_pp, region_for
from .geometry import ActiveRegion, ArchGeometry, Domino, classify_pattern
from .grid import (
    DEFAULT_ORACLE_BOUND,
    EMPTY,
    OCCUPIED,
    FplGrid,
    LinkPattern,
    OracleBoundError,
    bundles,
    check_valid,
    internal_loop_count,
    lattice,
    link_pattern,
)
from .partitions import Dimer, DimerConfig, HoneycombRegion, PlanePartition, Tri


def _border_cycle(d: Domino, n: int) -> list[int]:
    """The six border edges in ring order."""
    lat = lattice(n)
    out = []
    for i in range(6):
        u, w = d.ring[i], d.ring[(i + 1) % 6]
        (x1, y1), (x2, y2) = lat.coords(u), lat.coords(w)
        e = lat.edge_between(x1, y1, _step(x2 - x1, y2 - y1))
        out.append(e)
    return out


def _step(dx: int, dy: int) -> int:
    return {(1, 0): 0, (0, 1): 1, (-1, 0): 2, (0, -1): 3}[(dx, dy)]


def flip_domino(g: FplGrid, d: Domino) -> FplGrid | None:
    """Swap the occupied and empty border edges of d, or None if they do not alternate."""
    cyc = _border_cycle(d, g.n)
    occ = [g.states[e] == OCCUPIED for e in cyc]
    if occ not in ([True, False] * 3, [False, True] * 3):
        return None
    return g.with_states({e: (EMPTY if o else OCCUPIED) for e, o in zip(cyc, occ)})


def fpl_flip_neighbors(g: FplGrid, region: ActiveRegion) -> list[FplGrid]:
    pattern = link_pattern(g)
    loops = internal_loop_count(g)
    out = []
    for d in region.dominos:
        h = flip_domino(g, d)
        if h is None:
            continue
        check_valid(h)
        assert link_pattern(h) == pattern, "flip changed the link pattern"
        assert internal_loop_count(h) == loops, "flip changed the loop count"
        out.append(h)
    return out


def flip_closure(geo: ArchGeometry, bound: int = DEFAULT_ORACLE_BOUND) -> set[FplGrid]:
    """Everything reachable from the base configuration by domino flips."""
    if geo.n > bound:
        raise OracleBoundError(f"n={geo.n} exceeds the enumeration bound {bound}")
    region = region_for(geo)
    start = base_fpl(geo)
    seen = {start.canonical_json(): start}
    queue = deque([start])
    while queue:
        g = queue.popleft()
        for h in fpl_flip_neighbors(g, region):
            key = h.canonical_json()
            if key not in seen:
                seen[key] = h
                queue.append(h)
    return set(seen.values())


# -- gyration ------------------------------------------------------------------


def _plaquette(n: int, x: int, y: int) -> tuple[int, int, int, int]:
    lat = lattice(n)
    return (
        lat.edge_between(x, y, 0),
        lat.edge_between(x + 1, y, 1),
        lat.edge_between(x, y + 1, 0),
        lat.edge_between(x, y, 1),
    )


def wieland_gyration(g: FplGrid) -> FplGrid:
    """One gyration step: even plaquettes first, then odd ones.

    A plaquette whose occupied edges are exactly one opposite pair has all
    four edges toggled.  The link pattern turns by one label.
    """
    check_valid(g)
    n = g.n
    st = list(g.states)
    for cls in (0, 1):
        updates = {}
        for x in range(n - 1):
            for y in range(n - 1):
                if (x + y) % 2 != cls:
                    continue
                es = _plaquette(n, x, y)
                occ = [i for i, e in enumerate(es) if st[e] == OCCUPIED]
                if len(occ) == 2 and occ[1] - occ[0] == 2:
                    for e in es:
                        updates[e] = EMPTY if st[e] == OCCUPIED else OCCUPIED
        for e, s in updates.items():
            st[e] = s
    out = FplGrid(n, tuple(st))
    check_valid(out)
    return out


def bundle_shift(before: ArchGeometry, after: ArchGeometry) -> int:
    """Perimeter shift carrying the bundle centers of one geometry onto the other's."""
    m = 4 * before.n
    old = {before.A, before.B, before.C}
    new = {after.A, after.B, after.C}
    sizes_old = {before.A: before.a, before.B: before.b, before.C: before.c}
    sizes_new = {after.A: after.a, after.B: after.b, after.C: after.c}
    for s in sorted(range(m), key=lambda s: (min(s, m - s), s)):
        if {(p + s) % m for p in old} == new and all(sizes_new[(p + s) % m] == k for p, k in sizes_old.items()):
            return s
    raise ValueError("geometries do not have the same bundles up to rotation")


def realign(pp: PlanePartition, before: ArchGeometry, after: ArchGeometry, shift: int) -> PlanePartition:
    """Re-express pp in the box of ``after``, following each bundle by ``shift`` positions.

    The box axes belong to the bundles; when the cone center moves to
    another bundle the axes are permuted accordingly.
    """
    m = 4 * before.n
    role_after = {after.A: 0, after.B: 1, after.C: 2}
    target = [role_after[(p + shift) % m] for p in (before.A, before.B, before.C)]
    dims = [0, 0, 0]
    for r, t in enumerate(target):
        dims[t] = (pp.a, pp.b, pp.c)[r]
    rows = [[0] * dims[1] for _ in range(dims[0])]
    for i in range(pp.a):
        for j in range(pp.b):
            for k in range(pp.rows[i][j]):
                y = [0, 0, 0]
                for r, x in enumerate((i, j, k)):
                    y[target[r]] = x
                rows[y[0]][y[1]] += 1
    return PlanePartition(dims[0], dims[1], dims[2], tuple(tuple(r) for r in rows))


def gyration_images(g: FplGrid) -> tuple[PlanePartition, PlanePartition]:
    """Image of g and image of its gyration, the latter moved back into the box of g."""
    geo = classify_pattern(link_pattern(g))
    h = wieland_gyration(g)
    geo2 = classify_pattern(link_pattern(h))
    shift = bundle_shift(geo2, geo)
    return fpl_to_pp(g, geo), realign(fpl_to_pp(h, geo2), geo2, geo, shift)


# -- honeycomb loops -------------------------------------------------------------


@dataclass(frozen=True)
class HfplConfig:
    """Edges of the honeycomb region not covered by a matching, plus one outer leg per boundary vertex."""

    region: HoneycombRegion
    edges: frozenset[Dimer]
    legs: tuple[Tri, ...]  # boundary vertices, counterclockwise
    paths: tuple[tuple[Tri, ...], ...]
    loops: tuple[tuple[Tri, ...], ...]

    @property
    def internal_loops(self) -> int:
        return len(self.loops)

    def degree(self, t: Tri) -> int:
        return sum(t in e for e in self.edges) + (t in self.legs)

    def link_pattern(self) -> LinkPattern:
        """Pairing of the legs by the paths; labels follow the legs counterclockwise."""
        label = {t: k for k, t in enumerate(self.legs)}
        partner = [0] * len(self.legs)
        for p in self.paths:
            i, j = label[p[0]], label[p[-1]]
            partner[i], partner[j] = j, i
        return LinkPattern(len(self.legs) // 2, 0, tuple(partner))

    def bundle_sizes(self) -> list[int] | None:
        bs = bundles(self.link_pattern())
        return None if bs is None else [s for _, s in bs]


def _center(t: Tri) -> tuple[float, float]:
    kind, u, v = t
    pu, pv = (u + 1 / 3, v + 1 / 3) if kind == "U" else (u + 2 / 3, v + 2 / 3)
    return pu + pv / 2, pv * math.sqrt(3) / 2


def hfpl_complement(d: DimerConfig) -> HfplConfig:
    d.validate()
    reg = d.region
    edges = reg.edges - d.dimers
    adj: dict[Tri, list[Tri]] = {t: [] for t in reg.vertices}
    for s, t in edges:
        adj[s].append(t)
        adj[t].append(s)
    legs = [t for t in reg.vertices if len(reg.adjacency[t]) < 3]
    cx = sum(_center(t)[0] for t in reg.vertices) / len(reg.vertices)
    cy = sum(_center(t)[1] for t in reg.vertices) / len(reg.vertices)
    legs.sort(key=lambda t: math.atan2(_center(t)[1] - cy, _center(t)[0] - cx) % (2 * math.pi))
    for t in reg.vertices:
        if len(adj[t]) + (len(reg.adjacency[t]) < 3) != 2:
            raise AssertionError(f"honeycomb vertex {t} has complementary degree {len(adj[t])}")
    used: set[Tri] = set()
    paths = []
    for t in legs:
        if t in used:
            continue
        path = _walk(t, adj)
        used.update(path)
        paths.append(tuple(path))
    loops = []
    for t in sorted(reg.vertices):
        if t in used:
            continue
        cyc = _walk(t, adj)
        used.update(cyc)
        loops.append(tuple(cyc))
    return HfplConfig(reg, frozenset(edges), tuple(legs), tuple(paths), tuple(loops))


def _walk(start: Tri, adj: dict[Tri, list[Tri]]) -> list[Tri]:
    out = [start]
    prev, cur = None, start
    while True:
        nxt = [w for w in adj[cur] if w != prev]
        if not nxt or nxt[0] == start:
            return out
        prev, cur = cur, nxt[0]
        out.append(cur)
