from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fplpp.bijection import BoxMismatchError, base_fpl, fpl_to_dimers, fpl_to_pp, pp_to_fpl, region_for
from fplpp.geometry import all_triples, classify
from fplpp.grid import FplGrid, boundary, enumerate_all_fpl, internal_loop_count, is_type_abc, link_pattern
from fplpp.partitions import NotAMatchingError, PlanePartition, enumerate_pp, macmahon

from helpers import oracle_by_pattern


def test_smallest_box_has_two_configurations():
    geo = classify(3, 11, 3, 7)
    images = [pp_to_fpl(pp, geo) for pp in enumerate_pp(1, 1, 1)]
    assert len(set(images)) == 2
    assert set(images) == oracle_by_pattern(3)[geo.pattern()]
    assert images[0] == base_fpl(geo)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_round_trips_over_oracle(n):
    groups = oracle_by_pattern(n)
    for geo in all_triples(n):
        configs = groups[geo.pattern()]
        assert len(configs) == macmahon(*geo.sizes)
        images = set()
        for g in configs:
            pp = fpl_to_pp(g, geo)
            assert pp_to_fpl(pp, geo) == g
            images.add(pp)
        assert images == set(enumerate_pp(*geo.sizes))


def test_geometry_read_from_pattern():
    geo = all_triples(5)[3]
    g = base_fpl(geo)
    assert fpl_to_pp(g) == PlanePartition.empty(*geo.sizes)


def test_full_box_is_loopless():
    for n in (4, 5, 6):
        for geo in all_triples(n)[::4]:
            g = pp_to_fpl(PlanePartition.full(*geo.sizes), geo)
            assert internal_loop_count(g) == 0
            assert link_pattern(g) == geo.pattern()


def test_box_mismatch():
    geo = classify(3, 11, 3, 7)
    with pytest.raises(BoxMismatchError):
        pp_to_fpl(PlanePartition.empty(2, 1, 1), geo)


def test_foreign_configuration_rejected():
    geo = all_triples(4)[0]
    region = region_for(geo)
    others = [g for g in enumerate_all_fpl(4, geo.parity) if link_pattern(g) != geo.pattern()]
    for g in others[:30]:
        with pytest.raises(NotAMatchingError):
            fpl_to_dimers(g, region)


def test_incomplete_configuration_rejected():
    geo = classify(3, 11, 3, 7)
    with pytest.raises(NotAMatchingError):
        fpl_to_dimers(boundary(3, geo.parity), region_for(geo))


def test_wrong_size_rejected():
    geo = classify(3, 11, 3, 7)
    g = enumerate_all_fpl(4, 0)[0]
    with pytest.raises(NotAMatchingError):
        fpl_to_dimers(g, region_for(geo))


def test_non_type_patterns_exist():
    pats = {link_pattern(g) for g in enumerate_all_fpl(4, 0)}
    assert any(is_type_abc(p) is None for p in pats)


GEOS6 = all_triples(6)


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_random_partitions_round_trip(data):
    geo = data.draw(st.sampled_from(GEOS6))
    pps = list(enumerate_pp(*geo.sizes))
    pp = data.draw(st.sampled_from(pps))
    g = pp_to_fpl(pp, geo)
    assert fpl_to_pp(g, geo) == pp
    assert FplGrid.from_json(g.to_json()) == g
