"""Derivative-free search over unitaries and isometries.

Unitaries are parametrized as a product of complex Givens rotations (one
theta/lambda pair per plane) followed by a diagonal phase layer, which is
enough to reach every unitary; isometries use the same rotation family
restricted to the planes that act on the occupied columns of the padded
space.  The optimizer is plain coordinate descent over the angles with
seeded random restarts plus caller-supplied structured starts; restarts are
reduced deterministically (best value, ties broken by restart index), so
results are reproducible for a fixed seed regardless of the ``QCE_THREADS``
parallelism cap.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .linalg import spawn_rngs


@dataclass(frozen=True)
class OptOpts:
    restarts: int = 32
    sweeps: int = 2
    seed: int = 0
    step: float = 0.5


def n_params(n: int) -> int:
    return n * n  # n(n-1)/2 thetas + n(n-1)/2 lambdas + n phases


def unitary_from_params(n: int, params: np.ndarray) -> np.ndarray:
    params = np.asarray(params, dtype=float)
    n_pairs = n * (n - 1) // 2
    thetas = params[:n_pairs]
    lams = params[n_pairs: 2 * n_pairs]
    phases = params[2 * n_pairs:]
    u = np.diag(np.exp(1j * phases)).astype(complex)
    k = 0
    for j in range(n):
        for i in range(j + 1, n):
            c = np.cos(thetas[k])
            s = np.sin(thetas[k])
            e = np.exp(1j * lams[k])
            row_j = u[j].copy()
            u[j] = c * row_j - np.conj(e) * s * u[i]
            u[i] = e * s * row_j + c * u[i]
            k += 1
    return u


def n_iso_params(n: int, k: int) -> int:
    return 2 * (n * k - k * (k + 1) // 2) + k


def isometry_from_params(n: int, k: int, params: np.ndarray) -> np.ndarray:
    """First k columns of a Givens-parametrized unitary on the n-dim padded space.

    Only the planes that touch the occupied columns are parametrized; with a
    phase layer on the diagonal this family reaches every n x k isometry.
    """
    params = np.asarray(params, dtype=float)
    n_pairs = n * k - k * (k + 1) // 2
    thetas = params[:n_pairs]
    lams = params[n_pairs: 2 * n_pairs]
    phases = params[2 * n_pairs:]
    v = np.zeros((n, k), dtype=complex)
    v[np.arange(k), np.arange(k)] = np.exp(1j * phases)
    idx = 0
    for c in range(k):
        for r in range(c + 1, n):
            th = thetas[idx]
            e = np.exp(1j * lams[idx])
            cc = np.cos(th)
            ss = np.sin(th)
            row_c = v[c].copy()
            v[c] = cc * row_c - np.conj(e) * ss * v[r]
            v[r] = e * ss * row_c + cc * v[r]
            idx += 1
    return v


def _coordinate_descent(f, params: np.ndarray, opts: OptOpts):
    """Maximize f over params by cyclic +-step probes with shrinking step."""
    best = f(params)
    step = opts.step
    for _ in range(opts.sweeps):
        for k in range(params.size):
            base = params[k]
            for cand in (base + step, base - step):
                params[k] = cand
                val = f(params)
                if val > best + 1e-15:
                    best = val
                    base = cand
                else:
                    params[k] = base
        step *= 0.5
    return params, best


def max_threads() -> int:
    try:
        return max(1, int(os.environ.get("QCE_THREADS", "1")))
    except ValueError:
        return 1


def _run_all(run, starts):
    workers = max_threads()
    if workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run, starts))
    return [run(s) for s in starts]


def _best(results):
    best_idx = 0
    for i in range(1, len(results)):
        if results[i][1] > results[best_idx][1] + 1e-15:
            best_idx = i
    return results[best_idx]


def search_unitary(objective, n: int, opts: OptOpts | None = None, structured=(), minimize: bool = False):
    """Optimize ``objective(U)`` over n x n unitaries.

    ``structured`` unitaries are used as fixed prefixes that coordinate
    descent perturbs from the identity; random restarts start from random
    angles.  Returns (best_unitary, best_value, restarts_used).
    """
    opts = opts or OptOpts()
    sign = -1.0 if minimize else 1.0
    if n == 1:
        u = np.ones((1, 1), dtype=complex)
        return u, objective(u), 0

    starts = [(np.asarray(u0, dtype=complex), np.zeros(n_params(n))) for u0 in structured]
    eye = np.eye(n, dtype=complex)
    for g in spawn_rngs(opts.seed, max(opts.restarts, 0)):
        starts.append((eye, g.uniform(-np.pi, np.pi, size=n_params(n))))

    def run(start):
        u0, p0 = start
        fn = lambda p: sign * objective(u0 @ unitary_from_params(n, p))
        p, val = _coordinate_descent(fn, p0.copy(), opts)
        return u0 @ unitary_from_params(n, p), val

    u, val = _best(_run_all(run, starts))
    return u, sign * val, len(starts)


def search_isometry(objective, n: int, k: int, opts: OptOpts | None = None):
    """Optimize ``objective(V)`` over n x k isometries (V+ V = I_k).

    Returns (best_isometry, best_value, restarts_used).  The zero-angle
    start (V = padded identity) is always included.
    """
    opts = opts or OptOpts()
    npar = n_iso_params(n, k)
    starts = [np.zeros(npar)]
    for g in spawn_rngs(opts.seed, max(opts.restarts, 0)):
        starts.append(g.uniform(-np.pi, np.pi, size=npar))

    def run(p0):
        fn = lambda p: objective(isometry_from_params(n, k, p))
        p, val = _coordinate_descent(fn, p0.copy(), opts)
        return isometry_from_params(n, k, p), val

    v, val = _best(_run_all(run, starts))
    return v, val, len(starts)
