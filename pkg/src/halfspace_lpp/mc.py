"""Monte Carlo drivers: replicated sampling with worker-count-independent results.

Every replica r draws its weights from a counter-based stream keyed by
(seed, r), so the sample set depends only on (seed, params, n_samples) and
results are merged in replica order regardless of how many workers ran them.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .model import (ModelParams, WeightMatrix, g1_profile, lambda_profile,
                    sample_weight_block, sample_weights)

_WORKER_PARAMS: ModelParams | None = None
_WORKER_KIND: str = ""
_WORKER_EXTRA: dict = {}


def _init_worker(params, kind, extra):
    global _WORKER_PARAMS, _WORKER_KIND, _WORKER_EXTRA
    _WORKER_PARAMS = params
    _WORKER_KIND = kind
    _WORKER_EXTRA = extra


def _run_replicas(replicas):
    params, kind, extra = _WORKER_PARAMS, _WORKER_KIND, _WORKER_EXTRA
    out = {}
    for r in replicas:
        if kind == "top_curve_at":
            m0 = extra["m0"]
            w = sample_weight_block(params, m0, params.N, stream=r)
            out[r] = int(g1_profile_block(w))
        elif kind == "g1_full":
            w = sample_weight_block(params, params.N, params.N, stream=r)
            out[r] = int(g1_profile_block(w))
        elif kind == "profile":
            wm = sample_weights(params, stream=r)
            prof = lambda_profile(wm, params.N)
            out[r] = [tuple(lam) for lam in prof.lambdas]
        else:
            raise ValueError(f"unknown replica kind {kind!r}")
    return out


def g1_profile_block(w_block: np.ndarray) -> int:
    """Last passage time over the full block (up-right paths to its corner)."""
    from .model import _g1_dp_rows
    return int(_g1_dp_rows(np.ascontiguousarray(w_block))[-1])


def _chunks(n_samples: int, workers: int):
    idx = list(range(n_samples))
    size = max(1, (n_samples + 4 * workers - 1) // (4 * workers))
    return [idx[i:i + size] for i in range(0, n_samples, size)]


def run_replicated(params: ModelParams, kind: str, n_samples: int,
                   workers: int = 1, **extra):
    """Ordered list of per-replica results, independent of worker count."""
    merged: dict[int, object] = {}
    if workers <= 1:
        _init_worker(params, kind, extra)
        merged = _run_replicas(range(n_samples))
    else:
        with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker,
                                 initargs=(params, kind, extra)) as pool:
            for part in pool.map(_run_replicas, _chunks(n_samples, workers)):
                merged.update(part)
    return [merged[r] for r in range(n_samples)]


def top_curve_fluctuations(params: ModelParams, n_samples: int,
                           workers: int = 1) -> np.ndarray:
    """Samples of (2f)^{1/2} U_1^N(0), the normalized top-curve value at t=0."""
    consts = params.constants
    m0 = int(np.floor(params.kappa * params.N))
    vals = run_replicated(params, "top_curve_at", n_samples, workers, m0=m0)
    lam1 = np.asarray(vals, dtype=float)
    cn = np.floor(consts.h * params.N)
    u = (lam1 - cn) * (params.N ** (-1.0 / 3.0)
                       / np.sqrt(consts.p * (1.0 + consts.p)))
    return np.sqrt(2.0 * consts.f) * u


def g1_corner_samples(params: ModelParams, n_samples: int,
                      workers: int = 1) -> np.ndarray:
    """Samples of lambda_1(N, N) = G_1(N, N)."""
    vals = run_replicated(params, "g1_full", n_samples, workers)
    return np.asarray(vals, dtype=np.int64)


def profile_samples(params: ModelParams, n_samples: int, workers: int = 1):
    """Full interlacing profiles (lists of partitions) per replica."""
    return run_replicated(params, "profile", n_samples, workers)


def lln_profile(params: ModelParams, n_samples: int, workers: int = 1):
    """Mean of lambda_1(m, N)/N over samples, for every m = 1..N."""
    acc = np.zeros(params.N)
    for r in range(n_samples):
        w = sample_weight_block(params, params.N, params.N, stream=r)
        from .model import _g1_dp_rows
        acc += _g1_dp_rows(np.ascontiguousarray(w)).astype(float)
    return acc / (n_samples * params.N)
