from __future__ import annotations

import json
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fplpp.grid import (
    EMPTY,
    OCCUPIED,
    UNDET,
    FplGrid,
    InvalidGridError,
    OracleBoundError,
    arch_pattern,
    boundary,
    bundles,
    check_valid,
    enumerate_all_fpl,
    enumerate_all_fpl_by_edges,
    internal_loop_count,
    is_noncrossing,
    is_type_abc,
    lattice,
    link_pattern,
)

ASM = {1: 1, 2: 2, 3: 7, 4: 42, 5: 429, 6: 7436}


def test_lattice_counts():
    for n in range(1, 7):
        lat = lattice(n)
        assert lat.num_edges == 2 * n * (n - 1) + 4 * n
        assert all(len(inc) == 4 and -1 not in inc for inc in lat.incident)


def test_stub_positions_run_counterclockwise():
    lat = lattice(4)
    assert lat.stub_vertex(0)[0] == (0, 0)
    assert lat.stub_vertex(4)[0] == (3, 0)
    assert lat.stub_vertex(8)[0] == (3, 3)
    assert lat.stub_vertex(12)[0] == (0, 3)


def test_boundary_alternates():
    for n in range(1, 6):
        for parity in (0, 1):
            g = boundary(n, parity)
            assert g.parity() == parity
            assert sum(s == UNDET for s in g.states) == 2 * n * (n - 1)


@pytest.mark.parametrize("n", range(1, 7))
def test_fpl_counts_are_asm_numbers(n):
    for parity in (0, 1):
        assert len(enumerate_all_fpl(n, parity)) == ASM[n]


@pytest.mark.parametrize("n", range(1, 5))
def test_two_oracles_agree(n):
    for parity in (0, 1):
        assert set(enumerate_all_fpl(n, parity)) == set(enumerate_all_fpl_by_edges(n, parity))


def test_oracle_bound():
    with pytest.raises(OracleBoundError):
        enumerate_all_fpl(7)


def test_link_patterns_are_noncrossing():
    for g in enumerate_all_fpl(5):
        p = link_pattern(g)
        assert is_noncrossing(p.partner)
        assert all(p.partner[p.partner[i]] == i != p.partner[i] for i in range(10))


def test_every_noncrossing_pattern_occurs_for_n4():
    counts = Counter(link_pattern(g) for g in enumerate_all_fpl(4))
    assert len(counts) == 14  # Catalan(4)
    assert sum(counts.values()) == 42


def test_check_valid_rejects_bad_degree():
    g = enumerate_all_fpl(3)[0]
    e = next(i for i, s in enumerate(g.states[: g.lat.first_stub]) if s == OCCUPIED)
    with pytest.raises(InvalidGridError):
        check_valid(g.with_states({e: EMPTY}))


def test_arch_pattern_roundtrip():
    p = arch_pattern(6, (1, 7, 15), (2, 1, 3))
    t = is_type_abc(p)
    assert (t.A, t.B, t.C, t.a, t.b, t.c) == (1, 7, 15, 2, 1, 3)
    assert sorted(s for _, s in bundles(p)) == [1, 2, 3]


def test_degenerate_bundles_are_not_type_abc():
    p = arch_pattern(4, (1, 9), (2, 2))  # two bundles only
    assert is_type_abc(p) is None


def test_rotated_pattern_full_turn():
    p = arch_pattern(5, (1, 7, 15), (1, 2, 2))
    assert p.rotated(20) == p
    assert p.rotated(1).parity == 1 - p.parity


def test_type_abc_fpl_have_no_loops_small():
    loops = Counter()
    for g in enumerate_all_fpl(4):
        if is_type_abc(link_pattern(g)):
            loops[internal_loop_count(g)] += 1
    assert set(loops) == {0}


def test_loops_exist_in_general():
    assert any(internal_loop_count(g) for g in enumerate_all_fpl(4))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, ASM[5] - 1), st.integers(0, 1))
def test_json_roundtrip(k, parity):
    g = enumerate_all_fpl(5, parity)[k]
    back = FplGrid.from_json(json.loads(g.canonical_json()))
    assert back == g
    assert back.canonical_json() == g.canonical_json()


def test_json_rejects_unknown_edge():
    with pytest.raises(ValueError):
        FplGrid.from_json({"n": 2, "occupied": [["H", 5, 5]]})
