"""
Adaptive Gauss-Kronrod quadrature.

Panels are seeded from the declared breakpoints and split further so that
every panel sees at least NODES_PER_PERIOD nodes per period of the fastest
phase. Each round evaluates all pending panels in one vectorized call per
chunk; chunks are mapped over a thread pool and reduced in panel order, so
the result does not depend on the worker count.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from django.conf import settings

from .exceptions import MaxSubdivision, UnboundedSupport

logger = logging.getLogger("quadrature")

# 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[[1, 13]] = _WG[0]
GAUSS_WEIGHTS[[3, 11]] = _WG[1]
GAUSS_WEIGHTS[[5, 9]] = _WG[2]
GAUSS_WEIGHTS[7] = _WG[3]

CHUNK_PANELS = 64


def _option(name, default):
    return getattr(settings, "METALIFT", {}).get(name, default)


def _workers():
    return max(1, int(getattr(settings, "METALIFT_WORKERS", 1)))


def initial_edges(a, b, breaks=(), max_freq=0.0, nodes_per_period=None, budget=None):
    """Panel edges on [a, b]: the breakpoints plus oscillation-driven splits."""
    nodes_per_period = nodes_per_period or _option("NODES_PER_PERIOD", 8)
    budget = budget or _option("PANEL_BUDGET", 2 ** 16)
    points = sorted({a, b} | {p for p in breaks if a < p < b})
    edges = [points[0]]
    max_len = 15.0 / (nodes_per_period * max_freq) if max_freq > 0 else math.inf
    for lo, hi in zip(points[:-1], points[1:]):
        pieces = 1 if math.isinf(max_len) else max(1, math.ceil((hi - lo) / max_len))
        if pieces > budget:
            raise MaxSubdivision(
                f"{pieces} panels needed on ({lo}, {hi}] for frequency {max_freq}; budget is {budget}"
            )
        if pieces == 1:
            edges.append(hi)
        else:
            edges.extend(np.linspace(lo, hi, pieces + 1)[1:].tolist())
    return np.asarray(edges, dtype=float)


def _evaluate_chunk(func, lo, hi):
    centre = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = centre[:, None] + half[:, None] * NODES[None, :]
    values = np.asarray(func(x.ravel()))
    values = values.reshape(values.shape[:-1] + x.shape)
    kronrod = (values * KRONROD_WEIGHTS).sum(axis=-1) * half
    gauss = (values * GAUSS_WEIGHTS).sum(axis=-1) * half
    diff = np.abs(kronrod - gauss)
    err = diff.reshape(-1, diff.shape[-1]).max(axis=0) if diff.ndim > 1 else diff
    return kronrod, err


def _evaluate_panels(func, lo, hi, pool):
    starts = range(0, len(lo), CHUNK_PANELS)
    chunks = [(lo[i:i + CHUNK_PANELS], hi[i:i + CHUNK_PANELS]) for i in starts]
    if pool is None or len(chunks) == 1:
        parts = [_evaluate_chunk(func, l, h) for l, h in chunks]
    else:
        parts = list(pool.map(lambda c: _evaluate_chunk(func, *c), chunks))
    values = np.concatenate([p[0] for p in parts], axis=-1)
    errors = np.concatenate([p[1] for p in parts])
    return values, errors


def adaptive_quad(func, a, b, tol=1e-10, breaks=(), max_freq=0.0, budget=None):
    """
    Integrate func over (a, b] to absolute tolerance tol.

    func maps a 1-D array of nodes to an array of shape (*S, n); the result
    has shape S. Returns (value, error_estimate). Raises MaxSubdivision when
    the panel budget is exhausted first.
    """
    if not (math.isfinite(a) and math.isfinite(b)):
        raise UnboundedSupport(f"cannot integrate over ({a}, {b}]")
    if not tol > 0:
        raise ValueError("tol must be positive")
    if a == b:
        probe = np.asarray(func(np.array([a])))
        return np.zeros(probe.shape[:-1], dtype=complex), 0.0

    budget = budget or _option("PANEL_BUDGET", 2 ** 16)
    edges = initial_edges(a, b, breaks, max_freq, budget=budget)
    lo, hi = edges[:-1], edges[1:]
    total_len = b - a
    spent = 0
    done_lo, done_val, done_err = [], [], []

    workers = _workers()
    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        while len(lo):
            spent += len(lo)
            if spent > budget:
                raise MaxSubdivision(f"panel budget {budget} exhausted on ({a}, {b}]")
            values, errors = _evaluate_panels(func, lo, hi, pool)
            share = tol * (hi - lo) / total_len
            ok = errors <= share
            done_lo.append(lo[ok])
            done_val.append(values[..., ok])
            done_err.append(errors[ok])
            if ok.all():
                break
            bad_lo, bad_hi = lo[~ok], hi[~ok]
            mid = 0.5 * (bad_lo + bad_hi)
            if np.any((mid <= bad_lo) | (mid >= bad_hi)):
                raise MaxSubdivision(f"panels on ({a}, {b}] cannot be split further")
            lo = np.concatenate([bad_lo, mid])
            hi = np.concatenate([mid, bad_hi])
    finally:
        if pool is not None:
            pool.shutdown()

    all_lo = np.concatenate(done_lo)
    order = np.argsort(all_lo, kind="stable")
    values = np.concatenate(done_val, axis=-1)[..., order]
    errors = np.concatenate(done_err)[order]
    return values.sum(axis=-1), float(errors.sum())


def integrate_box(func, box, tol=1e-10, breaks=((), ()), freq_hint=(0.0, 0.0), weight=None):
    """
    Nested adaptive quadrature of func(x1, x2) over a SupportBox.

    The inner integral over x2 is done for all outer nodes at once; weight,
    if given, multiplies the inner result as a function of x1.
    """
    if not box.bounded:
        raise UnboundedSupport(f"support box {box} is unbounded")
    (a, b), (c, d) = box.x1, box.x2
    inner_tol = 0.5 * tol / max(b - a, 1.0)
    inner_errors = []

    def outer(x1):
        def inner(x2):
            return func(x1[:, None], x2[None, :])

        value, err = adaptive_quad(inner, c, d, inner_tol, breaks[1], freq_hint[1])
        inner_errors.append(err)
        if weight is not None:
            value = value * weight(x1)
        return value

    value, err = adaptive_quad(outer, a, b, 0.5 * tol, breaks[0], freq_hint[0])
    err = err + (b - a) * max(inner_errors, default=0.0)
    if err > tol:
        logger.warning("box quadrature error estimate %.3e exceeds tol %.3e", err, tol)
    return value, err
