"""Approximate bisimulation error between two networks over an input box.

The error is the supremum over the input set of the normed output
difference. Upper bounds come from reachability analysis of the merged
difference network; Monte-Carlo sampling of the difference gives a valid
lower bound and serves as an independent cross-check.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from time import perf_counter

import numpy as np

from .interval import SplitConfig, reach_box, reach_box_split
from .merge import merge
from .norms import LINF, batch_norms, check_norm, sup_norm_box
from .star import DEFAULT_STAR_CAP, box_to_star, reach_stars, star_sup_norm

METHOD_INTERVAL = "interval"
METHOD_SPLIT = "split"
METHOD_EXACT = "exact"
METHODS = (METHOD_INTERVAL, METHOD_SPLIT, METHOD_EXACT)
DEFAULT_SPLITS = 4


@dataclass
class ErrorBound:
    """A certified bracket on the bisimulation error.

    epsilon_upper is always sound; epsilon_lower is zero unless the method
    is exact in the chosen norm, in which case the two coincide.
    """

    epsilon_upper: float
    epsilon_lower: float
    method: str
    norm: str
    wall_time_seconds: float

    def __post_init__(self):
        if self.epsilon_lower > self.epsilon_upper + 1e-9:
            raise ValueError("epsilon_lower exceeds epsilon_upper")


def bisim_error_upper(net_big, net_small, box, method=METHOD_INTERVAL,
                      norm=LINF, splits=None, star_cap=DEFAULT_STAR_CAP,
                      jobs=1):
    """Certified upper bound on sup_x ||big(x) - small(x)|| over the box.

    method:
      "interval"  one interval pass over the merged network (fast, loose)
      "split"     interval pass per grid cell, `splits` cells per dimension
      "exact"     star-set reachability; exact in the max norm
    """
    check_norm(norm)
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}, expected one of {METHODS}")
    t0 = perf_counter()
    merged = merge(net_big, net_small)
    if method == METHOD_INTERVAL:
        eps = sup_norm_box(reach_box(merged, box), norm)
        desc = "interval"
    elif method == METHOD_SPLIT:
        k = DEFAULT_SPLITS if splits is None else int(splits)
        boxes = reach_box_split(merged, box, SplitConfig(k), jobs=jobs)
        eps = max(sup_norm_box(b, norm) for b in boxes)
        desc = f"interval-split({k})"
    else:
        stars = reach_stars(merged, box_to_star(box), star_cap=star_cap)
        eps = star_sup_norm(stars, norm)
        desc = "exact-star"
    lower = eps if (method == METHOD_EXACT and norm == LINF) else 0.0
    return ErrorBound(epsilon_upper=eps, epsilon_lower=lower, method=desc,
                      norm=norm, wall_time_seconds=perf_counter() - t0)


def bisim_error_lower_mc(net_big, net_small, box, samples, seed, norm=LINF,
                         jobs=1):
    """Sampled lower bound on the bisimulation error.

    The sample matrix is generated in one pass from the seed, so the
    result does not depend on how evaluation is parallelized.
    """
    check_norm(norm)
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    X = box.sample(rng, samples)

    def worst(chunk):
        D = net_big.forward_batch(chunk) - net_small.forward_batch(chunk)
        return float(batch_norms(D, norm).max())

    if jobs > 1 and samples > 4 * jobs:
        chunks = np.array_split(X, jobs)
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return max(pool.map(worst, chunks))
    return worst(X)


def check_assured(net_big, net_small, box, eps, method=METHOD_INTERVAL,
                  norm=LINF, splits=None, star_cap=DEFAULT_STAR_CAP, jobs=1):
    """True when the certified error bound is at most eps.

    Sufficient condition: with a non-exact method a False answer says
    nothing about the true error.
    """
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    bound = bisim_error_upper(net_big, net_small, box, method=method,
                              norm=norm, splits=splits, star_cap=star_cap,
                              jobs=jobs)
    return bound.epsilon_upper <= eps
