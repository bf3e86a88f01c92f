"""Lacunary scheme algebra: blocks, ratio statistics, refinements, intersections.

A scheme is a strictly increasing integer tuple k_0 < k_1 < ... < k_R with
k_0 >= 1. Block r (1-based, r = 1..R) is the integer interval (k_{r-1}, k_r],
of length h_r = k_r - k_{r-1}, with ratio q_r = k_r / k_{r-1}. All interval
arithmetic below is exact integer work; ratios only ever show up as reported
floats or as exact fractions where a comparison depends on them.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

__all__ = [
    "LacunaryScheme",
    "make_scheme",
    "q_ratio_stats",
    "is_refinement",
    "union_refinement",
    "RelationPair",
    "SchemeRelation",
    "refinement_map",
    "block_intersections",
    "coarse_block_density_from_fine",
]


@dataclass(frozen=True)
class LacunaryScheme:
    """Breakpoints of a block scheme, validated on construction.

    `advisory_flag` is a non-fatal warning: it is set when the mean block
    length over the last quarter of blocks fails to exceed the mean over the
    first quarter, i.e. when the finite prefix does not look lacunary.
    Negative controls legitimately trip it.
    """

    points: tuple[int, ...]

    def __post_init__(self) -> None:
        pts = tuple(int(p) for p in self.points)
        if len(pts) < 2:
            raise ValueError("a scheme needs at least two breakpoints")
        if pts[0] < 1:
            raise ValueError(f"k_0 must be >= 1, got {pts[0]}")
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        object.__setattr__(self, "points", pts)

    @property
    def block_count(self) -> int:
        return len(self.points) - 1

    @cached_property
    def lengths(self) -> tuple[int, ...]:
        """Block lengths h_r, r = 1..R."""
        return tuple(b - a for a, b in zip(self.points, self.points[1:]))

    @cached_property
    def ratios(self) -> tuple[float, ...]:
        """Block ratios q_r = k_r / k_{r-1}, r = 1..R."""
        return tuple(b / a for a, b in zip(self.points, self.points[1:]))

    @cached_property
    def advisory_flag(self) -> bool:
        h = self.lengths
        q = max(1, len(h) // 4)
        return not (sum(h[-q:]) / q > sum(h[:q]) / q)

    def block(self, r: int) -> tuple[int, int]:
        """Bounds (lo, hi] of block r; membership is lo < m <= hi."""
        if not 1 <= r <= self.block_count:
            raise ValueError(f"block index {r} outside 1..{self.block_count}")
        return self.points[r - 1], self.points[r]

    def block_length(self, r: int) -> int:
        lo, hi = self.block(r)
        return hi - lo

    def blocks_within(self, length: int) -> int:
        """How many leading blocks end at or before the given sample length."""
        return max(0, bisect_right(self.points, length) - 1)


def make_scheme(points: Iterable[int]) -> LacunaryScheme:
    """Validate breakpoints and build a scheme (see LacunaryScheme for the advisory)."""
    return LacunaryScheme(tuple(points))


def q_ratio_stats(scheme: LacunaryScheme, tail_fraction: float = 0.5) -> tuple[float, float]:
    """Finite liminf/limsup surrogates: (min, max) of q_r over the trailing blocks.

    `tail_fraction` selects the trailing share of ratios (at least one).
    """
    q = scheme.ratios
    if len(q) < 2:
        raise ValueError("ratio statistics need a scheme with at least two blocks")
    if not 0 < tail_fraction <= 1:
        raise ValueError(f"tail_fraction must lie in (0, 1], got {tail_fraction!r}")
    count = max(1, int(len(q) * tail_fraction))
    tail = q[-count:]
    return min(tail), max(tail)


def is_refinement(coarse: LacunaryScheme, fine: LacunaryScheme) -> bool:
    """True when every breakpoint of `coarse` is also a breakpoint of `fine`."""
    return set(coarse.points) <= set(fine.points)


def union_refinement(a: LacunaryScheme, b: LacunaryScheme) -> LacunaryScheme:
    """Sorted, deduplicated union of breakpoints; refines both inputs."""
    merged = make_scheme(sorted(set(a.points) | set(b.points)))
    assert is_refinement(a, merged) and is_refinement(b, merged)
    return merged


@dataclass(frozen=True)
class RelationPair:
    """One sub-interval (lo, hi] of a block of the first scheme.

    `size` counts its integers, `coarse_size` the integers of the enclosing
    (or intersected) block of the first scheme, and ratio = size / coarse_size.
    """

    coarse_index: int
    fine_index: int
    lo: int
    hi: int
    size: int
    coarse_size: int
    ratio: float

    def ratio_fraction(self) -> Fraction:
        return Fraction(self.size, self.coarse_size)

    def to_dict(self) -> dict:
        return {
            "coarse_block": self.coarse_index,
            "fine_block": self.fine_index,
            "lo": self.lo,
            "hi": self.hi,
            "size": self.size,
            "coarse_size": self.coarse_size,
            "ratio": self.ratio,
        }


@dataclass(frozen=True)
class SchemeRelation:
    """How two schemes' blocks sit inside each other.

    kind = "refinement": pairs map each coarse block to the fine blocks tiling
    it. kind = "general-pair": pairs list every nonempty intersection of one
    block from each scheme. delta is the minimum ratio over pairs (None when
    the schemes' ranges do not overlap at all).
    """

    kind: str
    pairs: tuple[RelationPair, ...]
    delta: float | None

    def pairs_of(self, coarse_index: int) -> tuple[RelationPair, ...]:
        return tuple(p for p in self.pairs if p.coarse_index == coarse_index)

    def delta_fraction(self) -> Fraction:
        if not self.pairs:
            raise ValueError("relation has no pairs, delta is undefined")
        return min(p.ratio_fraction() for p in self.pairs)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "delta": self.delta,
            "pairs": [p.to_dict() for p in self.pairs],
        }


def refinement_map(coarse: LacunaryScheme, fine: LacunaryScheme) -> SchemeRelation:
    """Map every coarse block to the fine blocks that tile it.

    Requires `fine` to refine `coarse`; the fine block lengths inside coarse
    block r always sum to h_r, which is asserted. delta is the minimum
    length ratio h*_j / h_r over all pairs. Fine blocks outside the coarse
    range (below k_0 or above k_R) belong to no coarse block and are omitted.
    """
    if not is_refinement(coarse, fine):
        raise ValueError("second scheme does not refine the first")
    fpts = fine.points
    pairs = []
    for r in range(1, coarse.block_count + 1):
        lo, hi = coarse.block(r)
        a = bisect_left(fpts, lo)
        b = bisect_left(fpts, hi)
        h_r = hi - lo
        covered = 0
        for j in range(a + 1, b + 1):
            size = fpts[j] - fpts[j - 1]
            covered += size
            pairs.append(
                RelationPair(r, j, fpts[j - 1], fpts[j], size, h_r, size / h_r)
            )
        assert covered == h_r, "fine blocks must tile each coarse block exactly"
    delta = min(p.ratio for p in pairs)
    return SchemeRelation("refinement", tuple(pairs), delta)


def block_intersections(a: LacunaryScheme, b: LacunaryScheme) -> SchemeRelation:
    """All nonempty intersections I_i of `a` with J_j of `b`, ratios |I_ij| / |I_i|.

    Blocks tile (k_0, k_R], so two schemes over overlapping ranges always
    intersect somewhere. delta = None signals fully disjoint ranges.
    """
    pairs = []
    i = j = 1
    while i <= a.block_count and j <= b.block_count:
        alo, ahi = a.block(i)
        blo, bhi = b.block(j)
        lo, hi = max(alo, blo), min(ahi, bhi)
        if lo < hi:
            size = hi - lo
            pairs.append(RelationPair(i, j, lo, hi, size, ahi - alo, size / (ahi - alo)))
        if ahi <= bhi:
            i += 1
        if bhi <= ahi:
            j += 1
    delta = min((p.ratio for p in pairs), default=None)
    return SchemeRelation("general-pair", tuple(pairs), delta)


def coarse_block_density_from_fine(x, coarse: LacunaryScheme, fine: LacunaryScheme,
                                   n: int, eps: float, r: int) -> float:
    """Coarse block exceedance density aggregated from fine block densities.

    Computes (1/h_r) * sum over fine blocks inside coarse block r of
    h*_j * (fine block density). Equal to the directly computed coarse block
    density up to float rounding (the suite pins the gap at 1e-12).
    """
    from .density import block_density

    rel = refinement_map(coarse, fine)
    pairs = rel.pairs_of(r)
    if not pairs:
        coarse.block(r)  # raise the standard out-of-range error
        raise AssertionError("refinement left a coarse block uncovered")
    total = math.fsum(p.size * block_density(x, fine, n, eps, p.fine_index) for p in pairs)
    return total / coarse.block_length(r)
