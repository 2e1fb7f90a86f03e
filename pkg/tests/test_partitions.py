from __future__ import annotations

from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fplpp.partitions import (
    BoundExceededError,
    PlanePartition,
    QPolynomial,
    complement,
    enumerate_pp,
    flip_face,
    flip_site,
    honeycomb,
    hyperfactorial,
    macdonald_q,
    macmahon,
    macmahon_binomial,
    macmahon_hyperfactorial,
    macmahon_hyperfactorial_as_printed,
    macmahon_product,
    pp_flip_neighbors,
    pp_to_tiling,
    tiling_to_pp,
)


def test_small_box_counts():
    assert macmahon(1, 1, 1) == 2
    assert macmahon(2, 1, 1) == 3
    assert macmahon(2, 2, 2) == 20
    assert macmahon(3, 3, 3) == 980
    assert macmahon(3, 0, 5) == 1


def test_count_formulas_agree():
    for a in range(9):
        for b in range(9):
            for c in range(9):
                assert macmahon_product(a, b, c) == macmahon_binomial(a, b, c)


def test_hyperfactorial_as_printed_is_off():
    assert hyperfactorial(4) == 1 * 2 * 6
    assert hyperfactorial(1) == hyperfactorial(0) == 1
    assert macmahon_hyperfactorial_as_printed(2, 2, 2) == Fraction(120)
    assert macmahon_hyperfactorial(2, 2, 2) == 20


def test_big_box_is_exact():
    value = macmahon(20, 20, 20)
    assert value == macmahon_binomial(20, 20, 20)
    assert value.bit_length() > 300


@pytest.mark.parametrize("abc", [(1, 1, 1), (2, 1, 1), (2, 2, 2), (3, 2, 2), (3, 3, 2)])
def test_enumeration_matches_formula(abc):
    pps = list(enumerate_pp(*abc))
    assert len(pps) == len(set(pps)) == macmahon(*abc)


def test_enumeration_bound():
    with pytest.raises(BoundExceededError):
        list(enumerate_pp(5, 5, 5))


def test_q_polynomial_222():
    q = macdonald_q(2, 2, 2)
    assert q.coeffs == (1, 1, 3, 3, 4, 3, 3, 1, 1)
    assert q(1) == 20
    assert macdonald_q(2, 1, 1).coeffs == (1, 1, 1)


@pytest.mark.parametrize("abc", [(1, 1, 1), (2, 2, 1), (2, 2, 2), (3, 2, 2), (1, 1, 4)])
def test_q_polynomial_is_box_generating_function(abc):
    grades = Counter(pp.boxes for pp in enumerate_pp(*abc))
    q = macdonald_q(*abc)
    assert q == QPolynomial.from_counts(grades)
    assert q.coeffs == q.coeffs[::-1]
    assert q(1) == macmahon(*abc)


def test_complement():
    for pp in enumerate_pp(2, 2, 2):
        assert complement(complement(pp)) == pp
        assert pp.boxes + complement(pp).boxes == 8


def test_invalid_partition_rejected():
    with pytest.raises(ValueError):
        PlanePartition(2, 2, 2, ((0, 1), (0, 0)))
    with pytest.raises(ValueError):
        PlanePartition(1, 1, 2, ((3,),))


def test_honeycomb_sizes():
    for abc in [(1, 1, 1), (2, 3, 4), (3, 1, 2)]:
        a, b, c = abc
        h = honeycomb(*abc)
        assert len(h.vertices) == 2 * (a * b + b * c + c * a)
        assert len(pp_to_tiling(PlanePartition.empty(*abc)).dimers) == a * b + b * c + c * a


def test_tilings_are_distinct_matchings():
    tilings = set()
    for pp in enumerate_pp(2, 2, 2):
        d = pp_to_tiling(pp)
        d.validate()
        assert len(d.dimers) == 12
        tilings.add(d.dimers)
    assert len(tilings) == 20


@st.composite
def partitions(draw):
    a, b, c = draw(st.integers(1, 4)), draw(st.integers(1, 4)), draw(st.integers(0, 4))
    rows = []
    for i in range(a):
        row = []
        for j in range(b):
            top = min(c, rows[i - 1][j] if i else c, row[j - 1] if j else c)
            row.append(draw(st.integers(0, top)))
        rows.append(row)
    return PlanePartition(a, b, c, tuple(tuple(r) for r in rows))


@settings(max_examples=80, deadline=None)
@given(partitions())
def test_tiling_roundtrip(pp):
    assert tiling_to_pp(pp_to_tiling(pp)) == pp


@settings(max_examples=50, deadline=None)
@given(partitions())
def test_box_flips_are_hexagon_flips(pp):
    d = pp_to_tiling(pp)
    for nb in pp_flip_neighbors(pp):
        (i, j), = [(i, j) for i in range(pp.a) for j in range(pp.b) if nb.rows[i][j] != pp.rows[i][j]]
        flipped = flip_face(d, flip_site(pp, i, j))
        assert flipped is not None
        out = tiling_to_pp(flipped)
        assert out in pp_flip_neighbors(pp)
        assert abs(out.rows[i][j] - pp.rows[i][j]) == 1 and out.boxes != pp.boxes


@settings(max_examples=50, deadline=None)
@given(partitions())
def test_json_roundtrip(pp):
    assert PlanePartition.from_json(pp.to_json()) == pp
