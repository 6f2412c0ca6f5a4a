"""Interval bound propagation with optional uniform input splitting.

Sound but dependency-losing over-approximation of output reachable sets.
Bounds are computed in plain double arithmetic without outward rounding,
so soundness claims hold up to floating-point error.
"""

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ResourceLimitError, ShapeError
from .network import Box

DEFAULT_CELL_CAP = 10**6


@dataclass(frozen=True)
class SplitConfig:
    """Uniform grid refinement: each input dimension is cut into k cells."""

    cells_per_dim: int
    max_cells: int = DEFAULT_CELL_CAP

    def __post_init__(self):
        if self.cells_per_dim < 1:
            raise ValueError("cells_per_dim must be >= 1")
        if self.max_cells < 1:
            raise ValueError("max_cells must be >= 1")


def affine_bounds(W, b, box):
    """Bounds of {W x + b : x in box}, row by row.

    Each row picks box.lower where the weight is nonnegative and box.upper
    where it is negative (and the mirror for the upper bound).
    """
    W = np.atleast_2d(np.asarray(W, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    if W.shape[1] != len(box):
        raise ShapeError(f"weight cols {W.shape[1]} != box length {len(box)}")
    nonneg = W >= 0
    lo_pick = np.where(nonneg, box.lower, box.upper)
    hi_pick = np.where(nonneg, box.upper, box.lower)
    lower = b + (W * lo_pick).sum(axis=1)
    upper = b + (W * hi_pick).sum(axis=1)
    return Box(lower, upper)


def act_bounds(relu_mask, box):
    """Apply per-neuron activations to an interval vector."""
    relu_mask = np.asarray(relu_mask, dtype=bool)
    if relu_mask.shape[0] != len(box):
        raise ShapeError("activation vector length != box length")
    lower = np.where(relu_mask, np.maximum(box.lower, 0.0), box.lower)
    upper = np.where(relu_mask, np.maximum(box.upper, 0.0), box.upper)
    return Box(lower, upper)


def reach_box(net, box):
    """Interval over-approximation of the output reachable set."""
    if len(box) != net.input_dim:
        raise ShapeError(f"box length {len(box)} != input_dim {net.input_dim}")
    for lay in net.layers:
        box = act_bounds(lay.relu_mask, affine_bounds(lay.weights, lay.bias, box))
    return box


def split_box(box, cfg):
    """Partition a box into cfg.cells_per_dim**dim congruent cells."""
    k = cfg.cells_per_dim
    dim = len(box)
    if k**dim > cfg.max_cells:
        raise ResourceLimitError(
            f"{k}^{dim} cells exceeds the cap of {cfg.max_cells}")
    edges = [np.linspace(box.lower[j], box.upper[j], k + 1) for j in range(dim)]
    cells = []
    for idx in itertools.product(range(k), repeat=dim):
        lo = np.array([edges[j][i] for j, i in enumerate(idx)])
        hi = np.array([edges[j][i + 1] for j, i in enumerate(idx)])
        cells.append(Box(lo, hi))
    return cells


def reach_box_split(net, box, cfg, jobs=1):
    """reach_box on every cell of the uniform grid; union covers the truth.

    Cells are independent, so they may be evaluated concurrently; the
    returned list is always in grid order regardless of jobs.
    """
    cells = split_box(box, cfg)
    if jobs > 1 and len(cells) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(lambda c: reach_box(net, c), cells))
    return [reach_box(net, c) for c in cells]
