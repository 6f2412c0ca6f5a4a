"""Reachability-based safety verification and the compressed-network path.

The unsafe region is a union of halfspace conjunctions over the output
space. A network is safe when its output reachable set misses every
unsafe polytope; verification over-approximates the reachable set, so the
three-valued verdict is Safe / Unsafe (with a concrete witness) /
Uncertain.

Verifying through a compressed stand-in works by inflating the unsafe
region by the certified bisimulation error: a Safe verdict on the small
network then lifts to the original, while anything else stays Uncertain.
"""

from dataclasses import dataclass
from time import perf_counter

import numpy as np

from .bisim import (DEFAULT_SPLITS, METHOD_EXACT, METHOD_INTERVAL,
                    METHOD_SPLIT, METHODS, bisim_error_upper)
from .errors import ShapeError
from .interval import SplitConfig, reach_box, reach_box_split, split_box
from .lp import lp_feasible
from .norms import LINF, check_norm, dual_norm
from .star import DEFAULT_STAR_CAP, box_to_star, reach_stars

SAFE = "Safe"
UNSAFE = "Unsafe"
UNCERTAIN = "Uncertain"

DEFAULT_SEED = 42
SEARCH_SAMPLES = 10**4


class LinearSpec:
    """Unsafe region as a union of polytopes: any (A, d) with A y <= d is unsafe."""

    def __init__(self, unsafe_polytopes):
        self.unsafe_polytopes = []
        for A, d in unsafe_polytopes:
            A = np.atleast_2d(np.asarray(A, dtype=float))
            d = np.atleast_1d(np.asarray(d, dtype=float))
            if A.shape[0] != d.shape[0]:
                raise ShapeError("polytope rows != rhs length")
            if A.shape[0] < 1:
                raise ValueError("unsafe polytope must have at least one constraint")
            self.unsafe_polytopes.append((A, d))

    @property
    def output_dim(self):
        return self.unsafe_polytopes[0][0].shape[1] if self.unsafe_polytopes else None

    def holds_at(self, y):
        """True when y lies in the unsafe region (exact comparisons)."""
        y = np.asarray(y, dtype=float)
        return any(bool(np.all(A @ y <= d)) for A, d in self.unsafe_polytopes)


@dataclass
class Verdict:
    status: str
    witness: np.ndarray | None = None

    def __post_init__(self):
        if self.status not in (SAFE, UNSAFE, UNCERTAIN):
            raise ValueError(f"bad verdict status {self.status!r}")
        if (self.witness is not None) != (self.status == UNSAFE):
            raise ValueError("witness present iff status is Unsafe")


@dataclass
class BisimReport:
    """One row of a verification report (table-style)."""

    network_id: str
    epsilon: float
    time_large_seconds: float | None
    time_small_seconds: float
    verdict_large: Verdict | None
    verdict_small: Verdict

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError("epsilon must be nonnegative")
        if self.time_small_seconds < 0 or (
                self.time_large_seconds is not None and self.time_large_seconds < 0):
            raise ValueError("times must be nonnegative")


def _check_spec_dim(net, spec):
    for A, _ in spec.unsafe_polytopes:
        if A.shape[1] != net.output_dim:
            raise ShapeError(
                f"spec constraints over {A.shape[1]} outputs, network has {net.output_dim}")


def _box_intersects(box, A, d):
    n = len(box)
    eye = np.eye(n)
    M = np.vstack([A, eye, -eye])
    rhs = np.concatenate([d, box.upper, -box.lower])
    return lp_feasible(M, rhs)


def _star_intersects(star, A, d):
    M = np.vstack([star.constr_mat, A @ star.basis])
    rhs = np.concatenate([star.constr_rhs, d - A @ star.center])
    return lp_feasible(M, rhs)


def verify(net, box, spec, method=METHOD_INTERVAL, splits=None,
           star_cap=DEFAULT_STAR_CAP, seed=DEFAULT_SEED, jobs=1):
    """Three-valued safety check of net over box against spec.

    Safe is proved by disjointness of the over-approximate output set from
    every unsafe polytope. Otherwise a deterministic counterexample search
    (grid cell centers plus seeded random samples) either produces an
    Unsafe witness or falls back to Uncertain.
    """
    _check_spec_dim(net, spec)
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}, expected one of {METHODS}")
    k = DEFAULT_SPLITS if splits is None else int(splits)

    if method == METHOD_EXACT:
        sets = reach_stars(net, box_to_star(box), star_cap=star_cap)
        intersects = _star_intersects
    elif method == METHOD_SPLIT:
        sets = reach_box_split(net, box, SplitConfig(k), jobs=jobs)
        intersects = _box_intersects
    else:
        sets = [reach_box(net, box)]
        intersects = _box_intersects

    clear = all(not intersects(out_set, A, d)
                for A, d in spec.unsafe_polytopes for out_set in sets)
    if clear:
        return Verdict(SAFE)

    # Over-approximation touched the unsafe region: hunt for a real witness.
    if method == METHOD_SPLIT:
        centers = np.array([c.center() for c in split_box(box, SplitConfig(k))])
    else:
        centers = box.center()[None, :]
    rng = np.random.default_rng(seed)
    candidates = np.vstack([centers, box.sample(rng, SEARCH_SAMPLES)])
    Y = net.forward_batch(candidates)
    hits = np.zeros(len(candidates), dtype=bool)
    for A, d in spec.unsafe_polytopes:
        hits |= np.all(Y @ A.T <= d, axis=1)
    for idx in np.flatnonzero(hits):
        x = candidates[idx]
        if spec.holds_at(net.forward(x)):  # re-check on the scalar path
            return Verdict(UNSAFE, witness=x)
    return Verdict(UNCERTAIN)


def inflate_spec(spec, eps, norm=LINF):
    """Expand each unsafe halfspace a.y <= b to a.y <= b + eps*||a||_dual.

    The result contains the Minkowski sum of the unsafe region with the
    eps-ball of the given norm; eps = 0 returns the spec unchanged.
    """
    check_norm(norm)
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    if eps == 0:
        return spec
    inflated = []
    for A, d in spec.unsafe_polytopes:
        shift = np.array([eps * dual_norm(row, norm) for row in A])
        inflated.append((A, d + shift))
    return LinearSpec(inflated)


def verify_via_compressed(net_big, net_small, box, spec, method=METHOD_SPLIT,
                          splits=None, norm=LINF, star_cap=DEFAULT_STAR_CAP,
                          seed=DEFAULT_SEED, network_id="pair", jobs=1,
                          also_large=False, large_method=None,
                          large_splits=None):
    """Verify net_big through its compressed stand-in net_small.

    Computes the certified error bound, verifies the small network against
    the inflated unsafe region, and lifts a Safe verdict to the original.
    The compressed path never reports Unsafe: the bound is an
    over-approximation, so an intersection proves nothing about net_big.
    time_small_seconds covers the whole compressed path (error bound plus
    small-network verification).
    """
    t0 = perf_counter()
    bound = bisim_error_upper(net_big, net_small, box, method=method,
                              norm=norm, splits=splits, star_cap=star_cap,
                              jobs=jobs)
    inflated = inflate_spec(spec, bound.epsilon_upper, norm)
    raw = verify(net_small, box, inflated, method=method, splits=splits,
                 star_cap=star_cap, seed=seed, jobs=jobs)
    small = Verdict(SAFE) if raw.status == SAFE else Verdict(UNCERTAIN)
    time_small = perf_counter() - t0

    verdict_large = None
    time_large = None
    if also_large:
        t1 = perf_counter()
        verdict_large = verify(net_big, box, spec,
                               method=large_method or method,
                               splits=large_splits if large_splits is not None else splits,
                               star_cap=star_cap, seed=seed, jobs=jobs)
        time_large = perf_counter() - t1
    return BisimReport(network_id=network_id, epsilon=bound.epsilon_upper,
                       time_large_seconds=time_large,
                       time_small_seconds=time_small,
                       verdict_large=verdict_large, verdict_small=small)


CSV_HEADER = "id,epsilon,time_large_s,time_small_s,verdict_large,verdict_small"


def report_csv(reports):
    """CSV serialization of report rows; absent optionals are empty fields."""
    lines = [CSV_HEADER]
    for r in reports:
        t_large = "" if r.time_large_seconds is None else f"{r.time_large_seconds:.5f}"
        v_large = "" if r.verdict_large is None else r.verdict_large.status
        lines.append(",".join([
            r.network_id,
            repr(float(r.epsilon)),
            t_large,
            f"{r.time_small_seconds:.5f}",
            v_large,
            r.verdict_small.status,
        ]))
    return "\n".join(lines) + "\n"


def report_table(reports):
    """Human-readable table with the classic ID / eps / T_L / T_S / V_L / V_S columns."""
    header = f"{'ID':<12} {'epsilon':>12} {'T_L (s)':>12} {'T_S (s)':>12} {'V_L':>10} {'V_S':>10}"
    lines = [header, "-" * len(header)]
    for r in reports:
        t_large = "-" if r.time_large_seconds is None else f"{r.time_large_seconds:.5f}"
        v_large = "-" if r.verdict_large is None else r.verdict_large.status
        lines.append(f"{r.network_id:<12} {r.epsilon:>12.6g} {t_large:>12} "
                     f"{r.time_small_seconds:>12.5f} {v_large:>10} {r.verdict_small.status:>10}")
    return "\n".join(lines) + "\n"
