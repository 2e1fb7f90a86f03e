"""Fully packed loops of type (A,B,C) and plane partitions in an a x b x c box."""

from __future__ import annotations

from .bijection import base_fpl, dimers_to_pp, fpl_to_dimers, fpl_to_pp, pp_to_fpl
from .dynamics import flip_closure, fpl_flip_neighbors, hfpl_complement, wieland_gyration
from .geometry import active_region, classify, classify_pattern, degier_step, fixed_edges
from .grid import FplGrid, LinkPattern, enumerate_all_fpl, internal_loop_count, link_pattern
from .partitions import PlanePartition, complement, macdonald_q, macmahon

__all__ = [
    "FplGrid",
    "LinkPattern",
    "PlanePartition",
    "active_region",
    "base_fpl",
    "classify",
    "classify_pattern",
    "complement",
    "degier_step",
    "dimers_to_pp",
    "enumerate_all_fpl",
    "fixed_edges",
    "flip_closure",
    "fpl_flip_neighbors",
    "fpl_to_dimers",
    "fpl_to_pp",
    "hfpl_complement",
    "internal_loop_count",
    "link_pattern",
    "macdonald_q",
    "macmahon",
    "pp_to_fpl",
    "wieland_gyration",
]
