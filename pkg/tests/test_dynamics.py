from __future__ import annotations

from collections import Counter

import pytest

from fplpp.bijection import base_fpl, fpl_to_pp, pp_to_fpl, region_for
from fplpp.dynamics import (
    bundle_shift,
    flip_closure,
    flip_domino,
    fpl_flip_neighbors,
    gyration_images,
    hfpl_complement,
    realign,
    wieland_gyration,
)
from fplpp.geometry import all_triples, classify, classify_pattern
from fplpp.grid import OracleBoundError, enumerate_all_fpl, internal_loop_count, link_pattern
from fplpp.partitions import PlanePartition, enumerate_pp, macmahon, pp_flip_neighbors, pp_to_tiling

from helpers import oracle_by_pattern


def test_base_111_has_one_neighbor():
    geo = classify(3, 11, 3, 7)
    nbs = fpl_flip_neighbors(base_fpl(geo), region_for(geo))
    assert len(nbs) == 1
    assert fpl_to_pp(nbs[0], geo) == PlanePartition.full(1, 1, 1)


def test_flip_is_involution():
    for geo in all_triples(5)[::3]:
        region = region_for(geo)
        for g in list(flip_closure(geo))[:10]:
            for d in region.dominos:
                h = flip_domino(g, d)
                if h is not None:
                    assert flip_domino(h, d) == g


def test_flips_commute_with_box_moves():
    for geo in all_triples(5)[::2]:
        region = region_for(geo)
        for pp in enumerate_pp(*geo.sizes):
            g = pp_to_fpl(pp, geo, region)
            fpl_side = {fpl_to_pp(h, geo) for h in fpl_flip_neighbors(g, region)}
            assert fpl_side == set(pp_flip_neighbors(pp))


@pytest.mark.parametrize("n", [3, 4, 5])
def test_closure_is_whole_type(n):
    groups = oracle_by_pattern(n)
    for geo in all_triples(n):
        closure = flip_closure(geo)
        assert len(closure) == macmahon(*geo.sizes)
        assert closure == set(groups[geo.pattern()])


def test_closure_bound():
    geo = all_triples(7)[0]
    with pytest.raises(OracleBoundError):
        flip_closure(geo, bound=6)


def test_gyration_turns_pattern():
    for n in (2, 3, 4):
        for parity in (0, 1):
            for g in enumerate_all_fpl(n, parity):
                p = link_pattern(g)
                h = wieland_gyration(g)
                assert link_pattern(h) == p.rotated(-2 if parity == 0 else 2)


def test_gyration_period_restores_pattern():
    for n in (3, 4):
        for g in enumerate_all_fpl(n, 0)[:40]:
            h = g
            for step in range(1, 4 * n + 1):
                h = wieland_gyration(h)
                if step in (2 * n, 4 * n):
                    assert link_pattern(h) == link_pattern(g)


def test_gyration_preserves_image():
    for n in (3, 4, 5):
        for geo in all_triples(n)[::3]:
            for g in flip_closure(geo):
                p, q = gyration_images(g)
                assert p == q
                assert internal_loop_count(wieland_gyration(g)) == 0


def test_realign_identity():
    geo = all_triples(5)[0]
    for pp in enumerate_pp(*geo.sizes):
        assert realign(pp, geo, geo, bundle_shift(geo, geo)) == pp


def test_realign_is_bijective():
    geo = all_triples(6)[5]
    g = base_fpl(geo)
    geo2 = classify_pattern(link_pattern(wieland_gyration(g)))
    s = bundle_shift(geo, geo2)
    images = {realign(pp, geo, geo2, s) for pp in enumerate_pp(*geo.sizes)}
    assert len(images) == macmahon(*geo.sizes)


@pytest.mark.parametrize("abc", [(1, 1, 1), (2, 2, 2), (2, 3, 4), (3, 1, 2)])
def test_hfpl_extremes(abc):
    for pp in (PlanePartition.empty(*abc), PlanePartition.full(*abc)):
        h = hfpl_complement(pp_to_tiling(pp))
        assert h.internal_loops == 0
        assert sorted(h.bundle_sizes()) == sorted(abc)
        assert len(h.legs) == 2 * sum(abc)
        for t in h.region.vertices:
            assert h.degree(t) == 2


def test_hfpl_loop_histogram_222():
    hist = Counter(hfpl_complement(pp_to_tiling(pp)).internal_loops for pp in enumerate_pp(2, 2, 2))
    assert hist == Counter({0: 19, 1: 1})
