"""FPL of type (A,B,C) <-> dimer matchings <-> plane partitions in an a x b x c box."""

from __future__ import annotations

import functools

from .geometry import ActiveRegion, ArchGeometry, active_region, classify_pattern
from .grid import EMPTY, OCCUPIED, FplGrid, check_valid, internal_loop_count, link_pattern
from .partitions import DimerConfig, NotAMatchingError, PlanePartition, pp_to_tiling, tiling_to_pp


class BoxMismatchError(ValueError):
    """The plane partition does not fit the box of the geometry."""


@functools.lru_cache(maxsize=256)
def region_for(geo: ArchGeometry) -> ActiveRegion:
    """Cached active region; building it runs the fixed-edge search."""
    return active_region(geo)


def fpl_to_dimers(g: FplGrid, region: ActiveRegion) -> DimerConfig:
    fixed = region.fixed.grid.states
    if not g.is_complete():
        raise NotAMatchingError("configuration has undetermined edges")
    if g.n != region.geometry.n:
        raise NotAMatchingError(f"grid size {g.n} does not match the geometry ({region.geometry.n})")
    for e, s in enumerate(fixed):
        if s in (EMPTY, OCCUPIED) and g.states[e] != s:
            raise NotAMatchingError(f"edge {g.lat.edges[e]} disagrees with the fixed edges")
    dimers = frozenset(d for e, d in region.edge_to_dimer.items() if g.states[e] == OCCUPIED)
    seen: set = set()
    for d in dimers:
        for t in d:
            if t in seen:
                raise NotAMatchingError(f"honeycomb vertex {t} carries two dimers")
            seen.add(t)
    geo = region.geometry
    out = DimerConfig(geo.a, geo.b, geo.c, dimers)
    out.validate()
    return out


def dimers_to_pp(d: DimerConfig) -> PlanePartition:
    return tiling_to_pp(d)


def fpl_to_pp(g: FplGrid, geo: ArchGeometry | None = None) -> PlanePartition:
    """Image of a complete FPL; the geometry is read off its link pattern when omitted."""
    if geo is None:
        geo = classify_pattern(link_pattern(g))
    return dimers_to_pp(fpl_to_dimers(g, region_for(geo)))


def pp_to_fpl(pp: PlanePartition, geo: ArchGeometry, region: ActiveRegion | None = None) -> FplGrid:
    if (pp.a, pp.b, pp.c) != geo.sizes:
        raise BoxMismatchError(f"partition box {(pp.a, pp.b, pp.c)} differs from {geo.sizes}")
    region = region if region is not None else region_for(geo)
    dimers = pp_to_tiling(pp).dimers
    states = list(region.fixed.grid.states)
    for e, d in region.edge_to_dimer.items():
        states[e] = OCCUPIED if d in dimers else EMPTY
    g = FplGrid(geo.n, tuple(states))
    check_valid(g)
    assert link_pattern(g) == geo.pattern(), "image has the wrong link pattern"
    return g


def base_fpl(geo: ArchGeometry) -> FplGrid:
    """The configuration sent to the empty partition; it has no closed loop."""
    g = pp_to_fpl(PlanePartition.empty(geo.a, geo.b, geo.c), geo)
    assert internal_loop_count(g) == 0, "base configuration has a closed loop"
    return g
