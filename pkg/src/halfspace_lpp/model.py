"""Half-space geometric last passage percolation: sampling and path observables.

The weight array is symmetric, w[i,j] = w[j,i], with Geom(a_i a_j) entries off
the diagonal and Geom(c a_i) on it (P(X=k) = alpha^k (1-alpha), k >= 0).
G_k(m,n) is the maximal total weight of k pairwise disjoint up-right paths
from (1,i) to (m, n-k+i); the increments lambda_k = G_k - G_{k-1} form a
partition, and the partitions interlace as m grows at fixed n.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from bisect import bisect_right

import numpy as np
from numba import njit

from .scaling import ScalingConstants, scaling_constants

Partition = tuple[int, ...]

EMPTY: Partition = ()


class ParameterError(ValueError):
    """Model parameters violate a feasibility constraint."""


class OracleOnlyError(RuntimeError):
    """Brute-force oracle invoked beyond its size guard."""


_GK_CELL_GUARD = 25

# SplitMix64 multipliers; unsigned 64-bit arithmetic wraps silently in numpy.
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)


def _mix64(x):
    # uint64 arithmetic wraps mod 2^64 by design
    with np.errstate(over="ignore"):
        x = np.uint64(x) if np.isscalar(x) else x.astype(np.uint64)
        x = (x ^ (x >> np.uint64(30))) * _M1
        x = (x ^ (x >> np.uint64(27))) * _M2
        return x ^ (x >> np.uint64(31))


def counter_uniform(seed: int, i, j):
    """Uniform(0,1) keyed by (seed, i, j): order- and worker-independent."""
    s = np.uint64(seed & 0xFFFFFFFFFFFFFFFF)
    i = np.asarray(i, dtype=np.uint64)
    j = np.asarray(j, dtype=np.uint64)
    with np.errstate(over="ignore"):
        h = _mix64(_mix64(_mix64(s + _GOLDEN) ^ (i * _M1 + _GOLDEN)) ^ (j * _M2 + _GOLDEN))
    return (h >> np.uint64(11)).astype(np.float64) * (2.0 ** -53)


def derive_stream_seed(seed: int, replica: int) -> int:
    """Per-replica sub-seed for embarrassingly parallel Monte Carlo."""
    with np.errstate(over="ignore"):
        return int(_mix64(np.uint64((seed & 0xFFFFFFFFFFFFFFFF)) + np.uint64(replica) * _GOLDEN))


def geometric_from_uniform(u, alpha):
    """Inverse-CDF Geom(alpha) with P(X=k) = alpha^k (1-alpha); Geom(0) == 0."""
    u = np.asarray(u, dtype=np.float64)
    alpha = np.asarray(alpha, dtype=np.float64)
    out = np.zeros(np.broadcast(u, alpha).shape, dtype=np.int64)
    pos = alpha > 0.0
    if np.any(pos):
        la = np.log(alpha, where=pos, out=np.full(alpha.shape, -1.0))
        vals = np.floor(np.log1p(-u) / la).astype(np.int64)
        out = np.where(pos, vals, 0)
    return out


@dataclass(frozen=True)
class ModelParams:
    """Parameters of the half-space model at system size N.

    spikes is a list of (row index l_j in 1..N, spike strength alpha_j); the
    spiked rows get a_{l_j} = 1/(z_c + sigma^{-1} alpha_j N^{-1/3}).  In
    critical mode the boundary parameter is tied to z_c via
    c = z_c - sigma^{-1} varpi N^{-1/3}.
    """

    q: float
    N: int
    c: float = 0.0
    kappa: float = 0.5
    spikes: tuple[tuple[int, float], ...] = ()
    critical_mode: bool = False
    varpi: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not (0.0 < self.q < 1.0):
            raise ParameterError(f"q must lie in (0,1), got {self.q}")
        if self.N < 1:
            raise ParameterError(f"N must be >= 1, got {self.N}")
        if not self.critical_mode and self.c < 0.0:
            raise ParameterError(f"c must be >= 0, got {self.c}")
        idx = [l for l, _ in self.spikes]
        if any(i2 <= i1 for i1, i2 in zip(idx, idx[1:])):
            raise ParameterError("spike indices must be strictly increasing")
        if any(not (1 <= l <= self.N) for l in idx):
            raise ParameterError("spike indices must lie in 1..N")
        if self.critical_mode:
            alpha_min = min((a for _, a in self.spikes), default=np.inf)
            if not (-self.varpi < alpha_min):
                raise ParameterError(
                    f"critical mode requires -varpi < min spike strength "
                    f"({-self.varpi} vs {alpha_min})")

    @property
    def constants(self) -> ScalingConstants:
        return scaling_constants(self.q, self.kappa)


def derive_parameters(params: ModelParams) -> tuple[np.ndarray, float]:
    """Row parameters a_1..a_N and the effective boundary parameter.

    Off-spike rows get a_i = q; spiked rows a_{l_j} = 1/(z_c + sigma^{-1}
    alpha_j N^{-1/3}).  Raises ParameterError naming the violated pair if any
    a_i a_j >= 1 (i != j) or c a_i >= 1.
    """
    consts = params.constants
    a = np.full(params.N, params.q, dtype=np.float64)
    n13 = params.N ** (-1.0 / 3.0)
    for l, alpha in params.spikes:
        denom = consts.z_c + alpha * n13 / consts.sigma
        if denom <= 0.0:
            raise ParameterError(f"spike at row {l}: z_c + sigma^-1 alpha N^-1/3 = {denom} <= 0")
        a[l - 1] = 1.0 / denom
    if params.critical_mode:
        c_eff = consts.z_c - params.varpi * n13 / consts.sigma
    else:
        c_eff = params.c
    if c_eff < 0.0:
        raise ParameterError(f"effective boundary parameter {c_eff} < 0")

    amax = np.sort(a)[::-1]
    if len(amax) >= 2 and amax[0] * amax[1] >= 1.0:
        i, j = np.argsort(a)[::-1][:2]
        raise ParameterError(
            f"a_i a_j >= 1 for rows ({i + 1},{j + 1}): {a[i]}*{a[j]} = {a[i] * a[j]}")
    i = int(np.argmax(a))
    if c_eff * a[i] >= 1.0:
        raise ParameterError(f"c * a_i >= 1 for row {i + 1}: {c_eff}*{a[i]}")
    return a, float(c_eff)


@dataclass
class WeightMatrix:
    """Symmetric nonnegative-integer weight array."""

    entries: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=np.int64)
        if e.ndim != 2 or e.shape[0] != e.shape[1]:
            raise ParameterError("weight matrix must be square")
        if not np.array_equal(e, e.T):
            raise ParameterError("weight matrix must be symmetric")
        if np.any(e < 0):
            raise ParameterError("weights must be nonnegative")
        self.entries = e

    @property
    def n(self) -> int:
        return self.entries.shape[0]


def sample_weight_block(params: ModelParams, m: int, n: int, stream: int = 0) -> np.ndarray:
    """The m x n upper-left block of W, sampled entry-by-entry from the counter RNG.

    Entry (i,j) depends only on (stream-seed, min(i,j), max(i,j)), so any two
    blocks of the same W agree on their overlap and W is exactly symmetric.
    """
    a, c_eff = derive_parameters(params)
    key = derive_stream_seed(params.seed, stream)
    ii = np.arange(1, m + 1, dtype=np.int64)[:, None]
    jj = np.arange(1, n + 1, dtype=np.int64)[None, :]
    lo = np.minimum(ii, jj)
    hi = np.maximum(ii, jj)
    u = counter_uniform(key, lo, hi)
    ai = a[ii - 1]
    aj = a[jj - 1]
    alpha = np.where(ii == jj, c_eff * ai, ai * aj)
    return geometric_from_uniform(u, alpha)


def sample_weights(params: ModelParams, stream: int = 0) -> WeightMatrix:
    """Sample the full N x N symmetric weight array."""
    return WeightMatrix(sample_weight_block(params, params.N, params.N, stream))


@njit(cache=True)
def _g1_dp_rows(w: np.ndarray) -> np.ndarray:
    """G_1(m, n) for every m = 1..w.shape[0] at fixed n = w.shape[1]."""
    m, n = w.shape
    row = np.zeros(n, dtype=np.int64)
    out = np.empty(m, dtype=np.int64)
    for i in range(m):
        acc = np.int64(0)
        for j in range(n):
            prev = row[j]
            best = prev if prev > acc else acc
            acc = best + w[i, j]
            row[j] = acc
        out[i] = row[n - 1]
    return out


def g1(W: WeightMatrix, m: int, n: int) -> int:
    """Last passage time over single up-right paths (1,1) -> (m,n)."""
    if not (1 <= m <= W.n and 1 <= n <= W.n):
        raise ParameterError(f"(m,n)=({m},{n}) out of range for size {W.n}")
    return int(_g1_dp_rows(W.entries[:m, :n])[-1])


def g1_profile(W: WeightMatrix, N: int) -> np.ndarray:
    """G_1(m, N) for all m = 1..N in one dynamic-programming sweep."""
    if N > W.n:
        raise ParameterError(f"N={N} exceeds matrix size {W.n}")
    return _g1_dp_rows(W.entries[:N, :N])


def _enumerate_paths(m: int, n: int, start, end):
    """All up-right paths from start to end as tuples of cells (1-based)."""
    if start[0] > end[0] or start[1] > end[1]:
        return
    if start == end:
        yield (start,)
        return
    i, j = start
    if i < end[0]:
        for rest in _enumerate_paths(m, n, (i + 1, j), end):
            yield ((i, j),) + rest
    if j < end[1]:
        for rest in _enumerate_paths(m, n, (i, j + 1), end):
            yield ((i, j),) + rest


def gk_bruteforce(W: WeightMatrix, m: int, n: int, k: int) -> int:
    """Max total weight of k disjoint up-right paths, pi_i: (1,i) -> (m, n-k+i).

    Exhaustive oracle; refuses instances beyond 25 cells.  For
    k >= min(m,n)+1 returns the full block sum (the standard convention).
    Paths are encoded as cell bitmasks; slots are filled recursively with
    best-remaining pruning.
    """
    if not (1 <= m <= W.n and 1 <= n <= W.n):
        raise ParameterError(f"(m,n)=({m},{n}) out of range for size {W.n}")
    if k < 1:
        raise ParameterError("k must be >= 1")
    if k >= min(m, n) + 1:
        return int(W.entries[:m, :n].sum())
    if m * n > _GK_CELL_GUARD:
        raise OracleOnlyError(
            f"gk_bruteforce is an oracle for m*n <= {_GK_CELL_GUARD}; got {m}x{n}")
    w = W.entries

    def encode(path):
        mask = 0
        total = 0
        for (i, j) in path:
            mask |= 1 << ((i - 1) * n + (j - 1))
            total += int(w[i - 1, j - 1])
        return mask, total

    slots = []
    for i in range(1, k + 1):
        enc = [encode(p) for p in _enumerate_paths(m, n, (1, i), (m, n - k + i))]
        enc.sort(key=lambda t: -t[1])
        slots.append(enc)
    suffix_best = [0] * (k + 1)
    for i in range(k - 1, -1, -1):
        suffix_best[i] = suffix_best[i + 1] + (slots[i][0][1] if slots[i] else 0)
    best = -1

    def rec(slot, used, acc):
        nonlocal best
        if slot == k:
            if acc > best:
                best = acc
            return
        if acc + suffix_best[slot] <= best:
            return
        for mask, total in slots[slot]:
            if mask & used:
                continue
            if acc + total + suffix_best[slot + 1] <= best:
                break  # sorted descending: no later path in this slot helps
            rec(slot + 1, used | mask, acc + total)

    rec(0, 0, 0)
    if best < 0:
        raise OracleOnlyError(f"no {k} disjoint paths exist for (m,n)=({m},{n})")
    return best


class _RSKShape:
    """Running insertion-tableau shape under row insertion of letters."""

    def __init__(self):
        self.rows: list[list[int]] = []

    def insert(self, x: int):
        for row in self.rows:
            idx = bisect_right(row, x)
            if idx == len(row):
                row.append(x)
                return
            x, row[idx] = row[idx], x
        self.rows.append([x])

    def shape(self) -> Partition:
        return tuple(len(r) for r in self.rows)


def _insert_row_block(tab: _RSKShape, weights_row: np.ndarray):
    """Insert the biword letters of one matrix row (j repeated w[j] times, j ascending)."""
    for j in range(weights_row.shape[0]):
        w = int(weights_row[j])
        for _ in range(w):
            tab.insert(j)


def greene_shape(W: WeightMatrix, m: int, n: int) -> Partition:
    """Partition lambda(m,n) with lambda_1+...+lambda_k = G_k(m,n) for all k.

    Row-insertion RSK on the biword of the m x n block; the prefix-sum
    contract against gk_bruteforce is the correctness criterion.
    """
    if not (1 <= m <= W.n and 1 <= n <= W.n):
        raise ParameterError(f"(m,n)=({m},{n}) out of range for size {W.n}")
    tab = _RSKShape()
    for i in range(m):
        _insert_row_block(tab, W.entries[i, :n])
    return tab.shape()


@dataclass
class LambdaProfile:
    """The interlacing profile lambda(0,N) = (), lambda(1,N), ..., lambda(N,N)."""

    N: int
    lambdas: list[Partition]

    def check_interlacing(self) -> bool:
        for prev, cur in zip(self.lambdas, self.lambdas[1:]):
            if not interlaces_int(cur, prev):
                return False
        return True


def interlaces_int(lam: Partition, mu: Partition) -> bool:
    """lam_1 >= mu_1 >= lam_2 >= mu_2 >= ... (trailing zeros implicit)."""
    k = max(len(lam), len(mu))
    for i in range(k):
        li = lam[i] if i < len(lam) else 0
        mi = mu[i] if i < len(mu) else 0
        lnext = lam[i + 1] if i + 1 < len(lam) else 0
        if not (li >= mi >= lnext):
            return False
    return True


def lambda_profile(W: WeightMatrix, N: int) -> LambdaProfile:
    """lambda(m,N) for m = 0..N by incremental row insertion."""
    if N > W.n:
        raise ParameterError(f"N={N} exceeds matrix size {W.n}")
    tab = _RSKShape()
    lambdas: list[Partition] = [EMPTY]
    for i in range(N):
        _insert_row_block(tab, W.entries[i, :N])
        lambdas.append(tab.shape())
    return LambdaProfile(N=N, lambdas=lambdas)


class RangeError(ValueError):
    """Rescaling requested outside the admissible (N, kappa, t) window."""


@dataclass
class RescaledEnsemble:
    """Rescaled curves on a t-grid: values[i, k] = U_i^N(t_k), weakly decreasing in i."""

    t_grid: np.ndarray
    values: np.ndarray
    N: int
    kappa: float
    consts: ScalingConstants = field(repr=False, default=None)


def _extended_curve_value(profile: LambdaProfile, i: int, s: float) -> float:
    """Linear interpolation of m -> lambda_i(m, N), frozen outside [0, N]."""

    def at(m: int) -> float:
        if m <= 0:
            return 0.0
        m = min(m, profile.N)
        lam = profile.lambdas[m]
        return float(lam[i]) if i < len(lam) else 0.0

    lo = int(np.floor(s))
    frac = s - lo
    if frac == 0.0:
        return at(lo)
    return (1.0 - frac) * at(lo) + frac * at(lo + 1)


def rescale(profile: LambdaProfile, consts: ScalingConstants, t_grid,
            num_curves: int = 8) -> RescaledEnsemble:
    """The rescaled ensemble of the top curves on t_grid.

    U_i^N(t) = [p(1+p)]^{-1/2} N^{-1/3} (lambda-curve_i(floor(kappa N) + t N^{2/3})
    - floor(h N) - p t N^{2/3}), with floor(t N^{2/3}) admissibility enforced
    (floor, not truncation, for negative t).
    """
    t_grid = np.asarray(t_grid, dtype=np.float64)
    N = profile.N
    kN = int(np.floor(consts.kappa * N))
    for t in t_grid:
        Tt = int(np.floor(t * N ** (2.0 / 3.0)))
        if not (1 <= kN + Tt <= N):
            raise RangeError(
                f"inadmissible t={t}: floor(kappa N) + floor(t N^(2/3)) = {kN + Tt} "
                f"not in [1, {N}]")
    pref = (consts.p * (1.0 + consts.p)) ** -0.5 * N ** (-1.0 / 3.0)
    CN = np.floor(consts.h * N)
    vals = np.empty((num_curves, len(t_grid)))
    for k, t in enumerate(t_grid):
        s = kN + t * N ** (2.0 / 3.0)
        for i in range(num_curves):
            u = _extended_curve_value(profile, i, s)
            vals[i, k] = pref * (u - CN - consts.p * t * N ** (2.0 / 3.0))
    return RescaledEnsemble(t_grid=t_grid, values=vals, N=N, kappa=consts.kappa,
                            consts=consts)
