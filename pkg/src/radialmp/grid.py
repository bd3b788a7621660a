"""Graded radial meshes on (0, R_max] and quadrature for ∫₀^∞ g(r) r^{N−1} dr.

The measure weight r^{N−1} varies by orders of magnitude inside a single cell
near the origin, so plain trapezoid weights in r are useless there.  Instead,
g is interpolated linearly on each cell and the moments ∫ r^{N−1} dr and
∫ r^N dr are integrated exactly, which makes quadrature of g ≡ 1 exact up to
round-off and keeps second-order accuracy for smooth g.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError


def sphere_area(N: int) -> float:
    """Surface measure of the unit sphere in R^N: 2 π^{N/2} / Γ(N/2)."""
    if N < 2:
        raise ParameterError(f"sphere_area needs N >= 2, got {N}")
    return 2.0 * math.pi ** (N / 2.0) / math.gamma(N / 2.0)


@dataclass(frozen=True)
class Region:
    """Radial region selector: all, ball(R), complement(R) or annulus(a, b)."""

    kind: str
    lo: float = 0.0
    hi: float = math.inf

    @staticmethod
    def all() -> "Region":
        return Region("all")

    @staticmethod
    def ball(R: float) -> "Region":
        return Region("ball", hi=R)

    @staticmethod
    def complement(R: float) -> "Region":
        return Region("complement", lo=R)

    @staticmethod
    def annulus(a: float, b: float) -> "Region":
        if not a < b:
            raise ParameterError(f"annulus needs a < b, got ({a}, {b})")
        return Region("annulus", lo=a, hi=b)


@dataclass(eq=False)
class RadialGrid:
    """Strictly increasing positive nodes with exact-moment cell weights.

    ``cell_left``/``cell_right`` split each cell's mass
    (r_{i+1}^N − r_i^N)/N between its endpoints by linear interpolation;
    ``node_weights`` is the nodal accumulation of those splits.  All weights
    exclude the sphere-area factor ω_N, which ``quadrature`` applies.
    """

    N: int
    nodes: np.ndarray
    grading: str = "geometric"
    heights: np.ndarray = field(init=False, repr=False)
    midpoints: np.ndarray = field(init=False, repr=False)
    cell_left: np.ndarray = field(init=False, repr=False)
    cell_right: np.ndarray = field(init=False, repr=False)
    node_weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        r = np.asarray(self.nodes, dtype=np.float64)
        if r.ndim != 1 or r.size < 3:
            raise ParameterError("grid needs at least 3 nodes")
        if r[0] <= 0 or np.any(np.diff(r) <= 0):
            raise ParameterError("nodes must be strictly increasing and positive")
        self.nodes = r
        N = self.N
        rn = r**N
        rn1 = r ** (N + 1)
        if not (np.isfinite(rn1[-1]) and np.isfinite(rn[-1])):
            raise ParameterError("r_max^{N+1} overflows float64; shrink the grid")
        h = np.diff(r)
        mass = np.diff(rn) / N
        first_moment = np.diff(rn1) / (N + 1)
        c_right = (first_moment - r[:-1] * mass) / h
        c_left = mass - c_right
        w = np.zeros_like(r)
        np.add.at(w, np.arange(r.size - 1), c_left)
        np.add.at(w, np.arange(1, r.size), c_right)
        self.heights = h
        self.midpoints = np.sqrt(r[:-1] * r[1:])
        self.cell_left = c_left
        self.cell_right = c_right
        self.node_weights = w

    @property
    def size(self) -> int:
        return self.nodes.size

    @property
    def r_min(self) -> float:
        return float(self.nodes[0])

    @property
    def r_max(self) -> float:
        return float(self.nodes[-1])

    def snap(self, R: float) -> tuple[int, float]:
        """Nearest node index to R and the snap distance."""
        idx = int(np.argmin(np.abs(self.nodes - R)))
        return idx, float(abs(self.nodes[idx] - R))

    def cell_range(self, region: Region) -> tuple[int, int]:
        """Half-open cell index range [i0, i1) covered by the region.

        Region endpoints snap to the nearest node; an empty range returns
        i0 == i1.
        """
        n_cells = self.size - 1
        if region.kind == "all":
            return 0, n_cells
        if region.kind == "ball":
            hi, _ = self.snap(region.hi)
            return 0, hi
        if region.kind == "complement":
            lo, _ = self.snap(region.lo)
            return lo, n_cells
        if region.kind == "annulus":
            lo, _ = self.snap(region.lo)
            hi, _ = self.snap(region.hi)
            return lo, max(lo, hi)
        raise ParameterError(f"unknown region kind {region.kind!r}")

    def region_node_weights(self, region: Region) -> np.ndarray:
        """Nodal weights restricted to the region's cells (still without ω_N)."""
        i0, i1 = self.cell_range(region)
        w = np.zeros(self.size)
        if i1 > i0:
            np.add.at(w, np.arange(i0, i1), self.cell_left[i0:i1])
            np.add.at(w, np.arange(i0 + 1, i1 + 1), self.cell_right[i0:i1])
        return w


def build_grid(
    N: int,
    r_min: float,
    r_max: float,
    M: int,
    grading: str = "geometric",
    split: float = 1.0,
    outer_power: float = 2.0,
) -> RadialGrid:
    """Construct a graded grid.

    geometric: constant node ratio (r_max/r_min)^{1/(M-1)}.
    two_zone:  geometric on [r_min, split], polynomially stretched nodes
               split + (r_max-split) t^outer_power on [split, r_max].
    """
    if N < 3:
        raise ParameterError(f"N >= 3 required, got {N}")
    if not (0 < r_min < r_max):
        raise ParameterError(f"need 0 < r_min < r_max, got ({r_min}, {r_max})")
    if M < 3:
        raise ParameterError(f"need at least 3 nodes, got {M}")
    if grading == "geometric":
        nodes = np.geomspace(r_min, r_max, M)
    elif grading == "two_zone":
        if not (r_min < split < r_max):
            raise ParameterError("two_zone split must lie inside (r_min, r_max)")
        m_in = max(2, int(M * 0.6))
        inner = np.geomspace(r_min, split, m_in)
        t = np.linspace(0.0, 1.0, M - m_in + 1)[1:]
        outer = split + (r_max - split) * t**outer_power
        nodes = np.concatenate([inner, outer])
    else:
        raise ParameterError(f"unknown grading {grading!r}")
    return RadialGrid(N=N, nodes=nodes, grading=grading)


def quadrature(g, grid: RadialGrid, region: Region = Region.all(), full_output: bool = False):
    """ω_N ∫_region g(r) r^{N−1} dr on the grid's exact-moment weights.

    ``g`` may be a callable, a nodal-value array, or anything exposing
    ``.values`` on this grid.  With ``full_output`` a dict with the snap
    distances and an empty-region flag is returned alongside the value.
    """
    if callable(g):
        vals = np.asarray(g(grid.nodes), dtype=np.float64)
    elif hasattr(g, "values"):
        vals = np.asarray(g.values, dtype=np.float64)
    else:
        vals = np.asarray(g, dtype=np.float64)
    if vals.shape != grid.nodes.shape:
        raise ParameterError("nodal values do not match the grid")
    i0, i1 = grid.cell_range(region)
    empty = i1 <= i0
    if empty:
        total = 0.0
    else:
        total = float(
            np.dot(grid.cell_left[i0:i1], vals[i0:i1])
            + np.dot(grid.cell_right[i0:i1], vals[i0 + 1 : i1 + 1])
        )
    value = sphere_area(grid.N) * total
    if full_output:
        info = {"empty": empty, "cells": (i0, i1)}
        for name, x in (("lo", region.lo), ("hi", region.hi)):
            if np.isfinite(x) and x > 0:
                info[f"snap_{name}"] = grid.snap(x)[1]
        return value, info
    return value
