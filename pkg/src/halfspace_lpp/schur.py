"""Exact weights of the boundary-weighted Schur measure on partition chains.

For small N this module enumerates the law P(lam^1..lam^N) =
tau_{lam^1}(c) s_{lam^1/lam^2}(a_N) ... s_{lam^N/()}(a_1) / Z_N exactly
(floating point), which is the oracle the Monte Carlo sampler is checked
against: (lam^1,...,lam^N) has the law of (lambda(N,N),...,lambda(1,N)).
"""

from __future__ import annotations

from functools import lru_cache
from itertools import count

from .model import EMPTY, Partition, ParameterError


class GuardError(RuntimeError):
    """Enumeration guard exceeded (N or weight cap too large)."""


def normalize(lam) -> Partition:
    """Canonical partition: tuple, weakly decreasing, no trailing zeros."""
    lam = tuple(int(x) for x in lam)
    while lam and lam[-1] == 0:
        lam = lam[:-1]
    if any(a < b for a, b in zip(lam, lam[1:])):
        raise ParameterError(f"not weakly decreasing: {lam}")
    if any(x < 0 for x in lam):
        raise ParameterError(f"negative part: {lam}")
    return lam


def interlaces(lam, mu) -> bool:
    """lam >= mu in the interlacing order: lam_1 >= mu_1 >= lam_2 >= mu_2 >= ..."""
    lam, mu = normalize(lam), normalize(mu)
    k = max(len(lam), len(mu))
    for i in range(k):
        li = lam[i] if i < len(lam) else 0
        mi = mu[i] if i < len(mu) else 0
        ln = lam[i + 1] if i + 1 < len(lam) else 0
        if not (li >= mi >= ln):
            return False
    return True


def weight(lam) -> int:
    return sum(lam)


def tau(lam, c: float) -> float:
    """Boundary monomial c^(lam_1 - lam_2 + lam_3 - ...), with 0^0 = 1."""
    lam = normalize(lam)
    e = sum(x if i % 2 == 0 else -x for i, x in enumerate(lam))
    if c == 0.0:
        return 1.0 if e == 0 else 0.0
    return float(c) ** e


def _chain_intermediates(top: Partition, bot: Partition):
    """All nu interlaced below top (nu <= top) that still contain bot pointwise.

    These are exactly the candidates for the next-lower element of a chain
    from bot up to top; the horizontal-strip condition against bot itself is
    enforced at the single-variable base case, not here.
    """
    top, bot = normalize(top), normalize(bot)
    if any((bot[i] if i < len(bot) else 0) > (top[i] if i < len(top) else 0)
           for i in range(max(len(top), len(bot)))):
        return
    n = len(top)

    def rec(i, prefix):
        if i == n:
            yield normalize(prefix)
            return
        lo = max(bot[i] if i < len(bot) else 0, top[i + 1] if i + 1 < len(top) else 0)
        hi = top[i]
        if i >= 1:
            hi = min(hi, prefix[-1])
        for v in range(lo, hi + 1):
            yield from rec(i + 1, prefix + (v,))

    yield from rec(0, ())


def interlaced_below(lam: Partition):
    """All mu with mu <= lam in the interlacing order."""
    yield from _chain_intermediates(lam, EMPTY)


def skew_schur(lam, mu, vars) -> float:
    """Skew Schur polynomial s_{lam/mu}(x_1..x_n) by interlacing-chain enumeration.

    Sum over chains mu = nu^0 <= nu^1 <= ... <= nu^n = lam of
    prod_i x_i^(|nu^i| - |nu^{i-1}|); 0 when no chain exists.
    """
    lam, mu = normalize(lam), normalize(mu)
    vars = tuple(float(x) for x in vars)
    n = len(vars)
    if n == 0:
        return 1.0 if lam == mu else 0.0
    if n == 1:
        return vars[0] ** (weight(lam) - weight(mu)) if interlaces(lam, mu) else 0.0

    @lru_cache(maxsize=None)
    def schur_rec(top: Partition, bot: Partition, k: int) -> float:
        # sum over chains bot <= ... <= top using vars[:k]
        if k == 1:
            return vars[0] ** (weight(top) - weight(bot)) if interlaces(top, bot) else 0.0
        total = 0.0
        for nu in _chain_intermediates(top, bot):
            total += vars[k - 1] ** (weight(top) - weight(nu)) * schur_rec(nu, bot, k - 1)
        return total

    return schur_rec(lam, mu, n)


def partition_function(a, c: float) -> float:
    """Z_N = prod_i (1 - c a_i)^-1 prod_{i<j} (1 - a_i a_j)^-1."""
    a = [float(x) for x in a]
    z = 1.0
    for i, ai in enumerate(a):
        if c * ai >= 1.0:
            raise ParameterError(f"c a_i >= 1 at i={i + 1}")
        z /= 1.0 - c * ai
        for aj in a[i + 1:]:
            if ai * aj >= 1.0:
                raise ParameterError("a_i a_j >= 1")
            z /= 1.0 - ai * aj
    return z


class SchurWeightContext:
    """Specialization (a_1..a_N, c) with the feasibility constraints checked."""

    def __init__(self, a, c: float):
        self.a = tuple(float(x) for x in a)
        self.c = float(c)
        if self.c < 0.0 or any(x < 0.0 for x in self.a):
            raise ParameterError("parameters must be nonnegative")
        self.Z = partition_function(self.a, self.c)  # validates products

    @property
    def N(self) -> int:
        return len(self.a)


def process_weight(seq, ctx: SchurWeightContext) -> float:
    """P(lam^1, ..., lam^N); zero for non-interlacing sequences.

    The transition s_{lam^i/lam^{i+1}} carries the single variable a_{N-i+1},
    i.e. the chain runs through the variables in reverse row order.
    """
    seq = [normalize(l) for l in seq]
    if len(seq) != ctx.N:
        raise ParameterError(f"sequence length {len(seq)} != N = {ctx.N}")
    w = tau(seq[0], ctx.c)
    chain = seq + [EMPTY]
    for i in range(ctx.N):
        var = ctx.a[ctx.N - 1 - i]
        w *= skew_schur(chain[i], chain[i + 1], (var,))
        if w == 0.0:
            return 0.0
    return w / ctx.Z


def _partitions_up_to(cap: int):
    """All partitions of weight <= cap."""
    out = [EMPTY]

    def rec(rest, maxpart, prefix):
        for v in range(min(rest, maxpart), 0, -1):
            cur = prefix + (v,)
            out.append(cur)
            rec(rest - v, v, cur)

    rec(cap, cap, ())
    return out


def enumerate_law(ctx: SchurWeightContext, weight_cap: int):
    """Exact law table for all sequences with |lam^1| <= weight_cap.

    Returns (dict sequence -> probability, truncated_mass).  Guarded to
    N <= 3 and weight_cap <= 40; interlacing confines lam^{i+1} <= lam^i
    pointwise so the enumeration is finite.
    """
    if ctx.N > 3:
        raise GuardError(f"enumerate_law supports N <= 3, got {ctx.N}")
    if weight_cap > 40:
        raise GuardError(f"weight_cap <= 40 required, got {weight_cap}")
    tops = _partitions_up_to(weight_cap)
    law: dict[tuple[Partition, ...], float] = {}

    def extend(seqs, depth):
        if depth == ctx.N:
            return seqs
        out = []
        for seq in seqs:
            for nu in interlaced_below(seq[-1]):
                out.append(seq + (nu,))
        return extend(out, depth + 1)

    for top in tops:
        for seq in extend([(top,)], 1):
            p = process_weight(seq, ctx)
            if p != 0.0:
                law[seq] = p
    total = sum(law.values())
    return law, 1.0 - total
