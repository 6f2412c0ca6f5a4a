"""Norm helpers shared by the error-bound and verification code.

Two norms are supported on output space: the max norm ("inf") and the
euclidean norm ("l2"). Halfspace inflation uses the dual norm: L1 for the
max norm, euclidean for euclidean.
"""

import numpy as np

LINF = "inf"
L2 = "l2"
NORMS = (LINF, L2)


def check_norm(norm):
    if norm not in NORMS:
        raise ValueError(f"unknown norm {norm!r}, expected one of {NORMS}")
    return norm


def vector_norm(y, norm=LINF):
    y = np.asarray(y, dtype=float)
    if norm == LINF:
        return float(np.max(np.abs(y))) if y.size else 0.0
    check_norm(norm)
    return float(np.linalg.norm(y))


def batch_norms(Y, norm=LINF):
    """Row-wise norms of a (n, dim) array."""
    if norm == LINF:
        return np.max(np.abs(Y), axis=1)
    check_norm(norm)
    return np.linalg.norm(Y, axis=1)


def dual_norm(a, norm=LINF):
    a = np.asarray(a, dtype=float)
    if norm == LINF:
        return float(np.sum(np.abs(a)))
    check_norm(norm)
    return float(np.linalg.norm(a))


def sup_norm_box(box, norm=LINF):
    """sup of ||y|| over an interval box (exact for both norms)."""
    worst = np.maximum(np.abs(box.lower), np.abs(box.upper))
    if norm == LINF:
        return float(worst.max())
    check_norm(norm)
    return float(np.sqrt(np.sum(worst**2)))
