"""Brute-force oracles shared by the test modules."""

from __future__ import annotations

import functools
from collections import defaultdict

from fplpp.grid import UNDET, FplGrid, LinkPattern, enumerate_all_fpl, is_type_abc, link_pattern

# Layouts of the three worked examples: (n, centers) giving sizes and case tags
# (2,3,10) case i, (3,2,7) case ii, (3,4,3) case iii.
WORKED = {
    "i": (15, (17, 27, 53)),
    "ii": (12, (47, 9, 27)),
    "iii": (10, (7, 21, 35)),
}


@functools.lru_cache(maxsize=None)
def oracle_by_pattern(n: int) -> dict[LinkPattern, frozenset[FplGrid]]:
    """All FPL of size n with a three-bundle link pattern, grouped by pattern."""
    groups: dict[LinkPattern, set[FplGrid]] = defaultdict(set)
    for parity in (0, 1):
        for g in enumerate_all_fpl(n, parity):
            p = link_pattern(g)
            if is_type_abc(p) is not None:
                groups[p].add(g)
    return {p: frozenset(gs) for p, gs in groups.items()}


def intersection(configs) -> tuple[int, ...]:
    it = iter(configs)
    out = list(next(it).states)
    for g in it:
        for e, s in enumerate(g.states):
            if out[e] != s:
                out[e] = UNDET
    return tuple(out)
