"""Correlation kernels: exact finite-N circles, rescaled pre-limit contours, and
the Airy/wanderer limits.

Three layers share conventions but are computed independently enough to
cross-check each other:

* kgeo: the exact 2x2-block kernel of the point process {(u, lambda_i(M_u,N)-i)}
  as double integrals over circles (integer exponents, single-valued,
  evaluated in log-magnitude/phase form).  Ground truth for N <= ~200.
* prelimit_kernel: the same kernel after centering/rescaling, written with the
  phase functions S, G on the steepest-descent contours and always evaluated
  on their truncated (near-z_c) parts; discarded-tail bounds are computed from
  branch-free magnitudes and reported.
* airy_wanderer / limit_rhs: the limiting kernel on truncated rays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from .contours import (Arc, Contour, ContourError, Line, NestingError,
                       prelimit_contours, prelimit_radii)
from .scaling import ScalingConstants, SGFunctions, SpikeFactor, scaling_constants

TWO_PI_I = 2j * np.pi


class KernelDomainError(ValueError):
    """Kernel arguments violate a precondition (radius window, ordering, size guard)."""


class TruncationError(RuntimeError):
    """Discarded contour tail cannot be bounded below the requested tolerance."""


# ---------------------------------------------------------------------------
# exact finite-N kernel on circles
# ---------------------------------------------------------------------------

_KGEO_N_GUARD = 200


@dataclass(frozen=True)
class KernelContext:
    """Shared data for kgeo evaluations: size N, time labels M_1 < ... < M_m,
    bulk parameter q, boundary c, spike values a_{l_j}."""

    N: int
    M: tuple[int, ...]
    q: float
    c: float
    spike_a: tuple[float, ...] = ()

    def __post_init__(self):
        if self.N > _KGEO_N_GUARD:
            raise KernelDomainError(
                f"kgeo guards N <= {_KGEO_N_GUARD} (log-space still overflows)")
        if any(m2 <= m1 for m1, m2 in zip(self.M, self.M[1:])):
            raise KernelDomainError("time labels M must be strictly increasing")
        if not all(1 <= m <= self.N for m in self.M):
            raise KernelDomainError("time labels must lie in 1..N")

    @property
    def spike_upper(self) -> float:
        return min([1.0 / self.q] + [1.0 / a for a in self.spike_a])

    def w_factor(self) -> SpikeFactor:
        return SpikeFactor(list(self.spike_a), self.q)


def _circle_nodes(r: float, n: int):
    theta = 2.0 * np.pi * np.arange(n) / n
    z = r * np.exp(1j * theta)
    dz = TWO_PI_I * z / n
    return z, dz


def _log_w(spike_a, q, z, sign=+1):
    """log W(z) (or -log W(z)) as a single-valued sum of principal logs.

    Each factor stays in the right half-plane for |z| > max(a, q) circles used
    here, and integer combinations keep the integrand single-valued anyway.
    """
    out = np.zeros_like(z)
    for a in spike_a:
        out = out + np.log(1.0 - a / z) + np.log(1.0 - q * z) \
            - np.log(1.0 - q / z) - np.log(1.0 - a * z)
    return sign * out


def _kgeo_radius_check(ctx: KernelContext, component: str, rz: float, rw: float | None,
                       u: int, v: int):
    hi = ctx.spike_upper
    mx = max([ctx.c, ctx.q] + list(ctx.spike_a))
    if component == "11":
        if not (1.0 < rz < hi):
            raise KernelDomainError(f"K11 radius {rz} outside (1, {hi})")
    elif component == "22":
        if not (rz > max(mx, 1.0)):
            raise KernelDomainError(f"K22 radius {rz} must exceed {max(mx, 1.0)}")
    else:
        if not (1.0 < rz < hi):
            raise KernelDomainError(f"K12 z-radius {rz} outside (1, {hi})")
        if not (rw > mx):
            raise KernelDomainError(f"K12 w-radius {rw} must exceed {mx}")
        if u <= v and not (rw < rz):
            raise KernelDomainError(f"K12 with u<=v needs r_w < r_z, got {rw} >= {rz}")
        if u > v and not (rz < rw):
            raise KernelDomainError(f"K12 with u>v needs r_z < r_w, got {rz} >= {rw}")


def _kgeo_default_radii(ctx: KernelContext, component: str, u: int, v: int,
                        max_exp: int | None = None):
    hi = ctx.spike_upper
    mx = max([ctx.c, ctx.q] + list(ctx.spike_a))
    if component == "11":
        return 0.5 * (1.0 + hi), None
    if component == "22":
        # z^x w^y with large positive exponents cancels catastrophically on a
        # wide circle; keep the integrand magnitude ~1e4 when possible
        base = max(mx, 1.0)
        r = base + 0.5
        if max_exp is not None and max_exp > 0:
            r = min(r, max(base + 0.04, 10.0 ** (2.0 / max_exp)))
        return r, None
    rz = 1.0 + 0.75 * (hi - 1.0)
    if u <= v:
        rw = 0.5 * (mx + rz)
    else:
        rw = rz + 0.5
    return rz, rw


def kgeo_grid(component: str, u: int, xs, v: int, ys, ctx: KernelContext,
              rz: float | None = None, rw: float | None = None,
              n_nodes: int = 256, tol: float = 1e-9):
    """kgeo component on the grid xs x ys of integer locations (vectorized).

    The integrand factorizes into z-only and w-only parts times a rational
    cross term, so values for all (x,y) pairs come from two matrix products
    per node count.  Node count doubles until the result moves < tol.
    """
    xs = np.asarray(xs, dtype=np.int64)
    ys = np.asarray(ys, dtype=np.int64)
    if component not in ("11", "12", "22"):
        raise KernelDomainError(f"unknown component {component!r}")
    max_exp = int(max(xs.max(), ys.max(), 0)) if xs.size and ys.size else 0
    defaults = _kgeo_default_radii(ctx, component, u, v, max_exp=max_exp)
    rz = defaults[0] if rz is None else rz
    rw = (defaults[1] if defaults[1] is not None else rz) if rw is None else rw
    if component in ("11", "22") and rw != rz:
        rw = rz
    _kgeo_radius_check(ctx, component, rz, rw if component == "12" else None, u, v)
    Mu, Mv = ctx.M[u - 1], ctx.M[v - 1]
    q, c, N = ctx.q, ctx.c, ctx.N
    spike = ctx.spike_a

    def evaluate(n):
        z, dz = _circle_nodes(rz, n)
        w, dw = _circle_nodes(rw, n)
        if component == "11":
            logz = N * np.log(1.0 - q / z) - Mu * np.log1p(-q * z) \
                + _log_w(spike, q, z)
            logw = N * np.log(1.0 - q / w) - Mv * np.log1p(-q * w) \
                + _log_w(spike, q, w)
            fz = np.exp(logz) * (1.0 - c / z) * dz
            fw = np.exp(logw) * (1.0 - c / w) * dw
            cross = (z[:, None] - w[None, :]) / (
                (z[:, None] ** 2 - 1.0) * (w[None, :] ** 2 - 1.0)
                * (z[:, None] * w[None, :] - 1.0))
            zpow = z[None, :] ** (-xs[:, None])
            wpow = w[None, :] ** (-ys[:, None])
        elif component == "22":
            logz = -N * np.log(1.0 - q / z) + Mu * np.log1p(-q * z) \
                - _log_w(spike, q, z)
            logw = -N * np.log(1.0 - q / w) + Mv * np.log1p(-q * w) \
                - _log_w(spike, q, w)
            fz = np.exp(logz) / (z - c) * dz
            fw = np.exp(logw) / (w - c) * dw
            cross = (z[:, None] - w[None, :]) / (z[:, None] * w[None, :] - 1.0)
            zpow = z[None, :] ** (xs[:, None])
            wpow = w[None, :] ** (ys[:, None])
        else:
            logz = N * np.log(1.0 - q / z) - Mu * np.log1p(-q * z) \
                + _log_w(spike, q, z)
            logw = -N * np.log(1.0 - q / w) + Mv * np.log1p(-q * w) \
                - _log_w(spike, q, w)
            fz = np.exp(logz) * (z - c) / (z * (z ** 2 - 1.0)) * dz
            fw = np.exp(logw) / (w - c) * dw
            cross = (z[:, None] * w[None, :] - 1.0) / (z[:, None] - w[None, :])
            zpow = z[None, :] ** (-xs[:, None])
            wpow = w[None, :] ** (ys[:, None])
        zmat = zpow * fz[None, :]
        wmat = wpow * fw[None, :]
        return (zmat @ cross @ wmat.T) / TWO_PI_I ** 2

    prev = evaluate(n_nodes)
    for _ in range(4):
        n_nodes *= 2
        cur = evaluate(n_nodes)
        if np.max(np.abs(cur - prev)) <= tol * max(1.0, np.max(np.abs(cur))):
            return cur
        prev = cur
    raise KernelDomainError("kgeo quadrature did not stabilize (radius too close "
                            "to a pole, or N beyond guard)")


def kgeo(component: str, u: int, x: int, v: int, y: int, ctx: KernelContext,
         rz: float | None = None, rw: float | None = None) -> complex:
    """Single kgeo value; K21 is exposed via kgeo_block, not here."""
    return complex(kgeo_grid(component, u, [x], v, [y], ctx, rz=rz, rw=rw)[0, 0])


def kgeo_block(u: int, x: int, v: int, y: int, ctx: KernelContext) -> np.ndarray:
    """The 2x2 block [[K11, K12], [K21, K22]] with K21(u,x;v,y) = -K12(v,y;u,x)."""
    k11 = kgeo("11", u, x, v, y, ctx)
    k12 = kgeo("12", u, x, v, y, ctx)
    k21 = -kgeo("12", v, y, u, x, ctx)
    k22 = kgeo("22", u, x, v, y, ctx)
    return np.array([[k11, k12], [k21, k22]], dtype=complex)


# ---------------------------------------------------------------------------
# pre-limit kernel on truncated steepest-descent contours
# ---------------------------------------------------------------------------


def _truncated_wedge_nodes(z_c: float, phi: float, notch: float, reach: float,
                           scale: float, n_per_panel: int):
    """Quadrature nodes/weights for the truncated wedge around z_c.

    Rays at +-phi from radius |notch| (arc, cw iff notch<0) out to `reach`,
    split into geometrically growing panels with the first panel ~ scale/4.
    Oriented from the -phi side to the +phi side.
    """
    edges = [abs(notch)]
    step = scale / 4.0
    cur = abs(notch)
    while cur + step < reach:
        cur += step
        edges.append(cur)
        step *= 2.0
    edges.append(reach)
    gl_x, gl_w = leggauss(n_per_panel)
    u = 0.5 * (gl_x + 1.0)
    zs, dzs = [], []
    # incoming ray (-phi side), from reach toward the notch
    e_m = np.exp(-1j * phi)
    for hi, lo in zip(edges[::-1], edges[-2::-1]):
        z = z_c + (hi + (lo - hi) * u) * e_m
        dz = (lo - hi) * 0.5 * gl_w * e_m
        zs.append(z)
        dzs.append(dz)
    if abs(notch) > 0:
        phi1 = phi if notch > 0 else phi - 2.0 * np.pi
        th = -phi + (phi1 - (-phi)) * u
        z = z_c + abs(notch) * np.exp(1j * th)
        dz = 1j * abs(notch) * np.exp(1j * th) * (phi1 + phi) * 0.5 * gl_w
        zs.append(z)
        dzs.append(dz)
    e_p = np.exp(1j * phi)
    for lo, hi in zip(edges[:-1], edges[1:]):
        z = z_c + (lo + (hi - lo) * u) * e_p
        dz = (hi - lo) * 0.5 * gl_w * e_p
        zs.append(z)
        dzs.append(dz)
    return np.concatenate(zs), np.concatenate(dzs)


@dataclass(frozen=True)
class PrelimitContext:
    """Everything needed to evaluate the rescaled kernel at size N."""

    consts: ScalingConstants
    N: int
    mode: str = "subcritical"  # or "critical"
    c: float = 0.0             # ignored in critical mode
    spikes_alpha: tuple[float, ...] = ()
    varpi: float = 0.0
    theta: float = 5.0 * np.pi / 12.0
    tol: float = 1e-7          # quadrature stabilization tolerance
    tail_tol: float | None = None  # gate on the reported discarded-tail bound

    def __post_init__(self):
        if self.mode not in ("subcritical", "critical"):
            raise KernelDomainError(f"unknown mode {self.mode!r}")
        if self.consts.kappa >= 1.0:
            raise KernelDomainError("prelimit kernel requires kappa < 1")

    @property
    def c_eff(self) -> float:
        if self.mode == "critical":
            return self.consts.z_c - self.varpi * self.N ** (-1. / 3.) / self.consts.sigma
        return self.c

    @property
    def delta(self) -> float:
        c = self.consts
        return 0.5 * min(1.0, c.z_c - 1.0, 1.0 / c.q - c.z_c)

    def spike_factor(self) -> SpikeFactor:
        n13 = self.N ** (-1.0 / 3.0)
        a = [1.0 / (self.consts.z_c + al * n13 / self.consts.sigma)
             for al in self.spikes_alpha]
        return SpikeFactor(a, self.consts.q)


_DECAY_TARGET = 40.0  # cut tails where the certified exponent reaches e^{-40}


def _ray_reach(x: float, theta: float, R: float) -> float:
    """Distance along the ray x + t e^{i theta} to the circle |z| = R (first hit
    if x starts outside the disc, else the unique outward hit)."""
    b = x * np.cos(theta)
    disc = b * b - (x * x - R * R)
    if disc < 0.0:
        raise NestingError(f"wedge ray misses its outer circle (R={R}, x={x})")
    root = np.sqrt(disc)
    return float(-b - root if abs(x) > R else -b + root)


def _wedge_reaches(ctx: PrelimitContext, Tdiff: int = 1):
    """Truncation radii for Gamma_N(0), gamma_N(0), gamma_tilde_N(0).

    Each wedge extends to where its certified decay exponent (cubic for the
    phase N Sbar, quadratic for the Gaussian factor of the single integral)
    reaches the e^{-40} margin, but never past the parent keyhole's ray
    segment, so the truncated contour stays a subset of the full one.
    """
    consts, N = ctx.consts, ctx.N
    sg3 = consts.sigma ** 3
    eps1 = sg3 / 6.0 * abs(np.cos(3.0 * ctx.theta))
    eps2 = 0.5 * min(sg3 / 3.0, consts.f * consts.sigma ** 2)
    z_c = consts.z_c
    R0 = 1.0 / consts.q + 0.5
    rad_g = np.sqrt(z_c ** 2 + N ** (-1.0 / 6.0) - z_c * N ** (-1.0 / 12.0))
    rad_t = np.sqrt(z_c ** 2 + N ** (-1.0 / 6.0))
    reach_z = min((_DECAY_TARGET / (N * eps1)) ** (1.0 / 3.0),
                  0.999 * _ray_reach(z_c, ctx.theta, R0))
    reach_w = min((_DECAY_TARGET / (N * eps2)) ** (1.0 / 3.0),
                  0.999 * _ray_reach(z_c, 2.0 * np.pi / 3.0, rad_g))
    gauss = max(Tdiff, 1) * consts.f * consts.sigma ** 2
    reach_t = min((_DECAY_TARGET / gauss) ** 0.5,
                  0.999 * _ray_reach(z_c, np.pi / 2.0, rad_t))
    return reach_z, reach_w, reach_t


def _prelimit_wedges(ctx: PrelimitContext, n_per_panel: int, Tdiff: int = 1):
    """Truncated Gamma_N(0), gamma_N(0), gamma_tilde_N(0) node sets."""
    consts, N = ctx.consts, ctx.N
    r1, r2, _ = prelimit_radii(ctx.mode, ctx.spikes_alpha, ctx.varpi, consts.sigma)
    n13 = N ** (-1.0 / 3.0)
    reach_z, reach_w, reach_t = _wedge_reaches(ctx, Tdiff)
    zG, dG = _truncated_wedge_nodes(consts.z_c, ctx.theta, r1 * n13, reach_z,
                                    n13, n_per_panel)
    zg, dg = _truncated_wedge_nodes(consts.z_c, 2.0 * np.pi / 3.0, r2 * n13,
                                    reach_w, n13, n_per_panel)
    zt, dt = _truncated_wedge_nodes(consts.z_c, np.pi / 2.0, 0.0, reach_t,
                                    n13, n_per_panel)
    for pts in (zG, zg, zt):
        if np.any(pts.real <= 0.0) or np.any((np.abs(pts.imag) < 1e-14) & (pts.real <= 0.0)):
            raise NestingError("truncated contour left the right half-plane "
                               "(principal-branch hazard)")
    return (zG, dG), (zg, dg), (zt, dt)


def _phase_parts(ctx: PrelimitContext, sg: SGFunctions, z, T: int, x: float,
                 sign: int):
    """exp(sign * [N Sbar(z) + T Gbar(z) + sigma z_c x N^{1/3} log(z/z_c)])
    with the sign convention of the 12-component split into z- and w-factors."""
    consts = ctx.consts
    expo = ctx.N * sg.Sbar(z) + T * sg.Gbar(z) \
        - consts.sigma * consts.z_c * x * ctx.N ** (1.0 / 3.0) * np.log(z / consts.z_c)
    return np.exp(sign * expo)


def _frac_pow(q: float, z, e: float):
    return np.exp(e * np.log(1.0 - q * z))


def _tail_bound(ctx: PrelimitContext, sg: SGFunctions, component: str,
                Ts: int, Tt: int, x: float, y: float) -> float:
    """Magnitude bound for the discarded (beyond-truncation) contour parts.

    Branch-free Re S / Re G sampled on the full keyholes outside the
    truncation radii, times discarded length and sampled rational maxima;
    pairings keep far-z with all-w and vice versa.  Oscillation is ignored,
    so this over-reports at small N; it is a diagnostic, gated only when
    ctx.tail_tol is set.
    """
    consts, N = ctx.consts, ctx.N
    Gamma, gamma, gamma_t = prelimit_contours(
        consts, N, ctx.mode, ctx.spikes_alpha, ctx.varpi, c=ctx.c_eff,
        theta=ctx.theta, check=False)
    reach_z, reach_w, reach_t = _wedge_reaches(ctx, max(Ts - Tt, 1))
    n13 = N ** (1.0 / 3.0)
    sxy = consts.sigma * consts.z_c * n13
    c = ctx.c_eff
    q = consts.q

    def split(contour, cut):
        pts = contour.sample_points(192)
        far = pts[np.abs(pts - consts.z_c) > cut]
        frac_len = contour.length() * far.size / pts.size
        return pts, far, frac_len

    ptsG, farG, lenG_far = split(Gamma, reach_z)
    ptsg, farg, leng_far = split(gamma, reach_w)
    ptst, fart, lent_far = split(gamma_t, reach_t)
    W = ctx.spike_factor()

    def re_phase(z, T, loc, sign):
        return sign * (N * sg.Sbar_real(z) + T * sg.Gbar_real(z)
                       - sxy * loc * np.log(np.abs(z / consts.z_c)))

    def zmag11(z, T, loc):
        out = np.exp(np.minimum(re_phase(z, T, loc, +1), 700.0))
        out *= np.abs((1.0 - c / z) * (1.0 - q * z) ** 0.0)
        return out * np.abs(W(z))

    def zmag22(z, T, loc):
        out = np.exp(np.minimum(re_phase(z, T, loc, -1), 700.0))
        return out / (np.abs(z - c) * np.abs(W(z)))

    if component == "I11":
        if farG.size == 0:
            return 0.0
        cross = lambda a, b: (np.abs(a[:, None] - b[None, :])
                              / (np.abs(a[:, None] ** 2 - 1.0)
                                 * np.abs(b[None, :] ** 2 - 1.0)
                                 * np.abs(a[:, None] * b[None, :] - 1.0)))
        m = float(np.max(zmag11(farG, Ts, x)[:, None] * zmag11(ptsG, Tt, y)[None, :]
                         * cross(farG, ptsG)))
        return 2.0 * 2.0 * lenG_far * Gamma.length() * consts.sigma * consts.z_c \
            * n13 * m / (2.0 * np.pi) ** 2
    if component == "I22":
        if farg.size == 0:
            return 0.0
        cross = lambda a, b: (np.abs(a[:, None] - b[None, :])
                              / np.abs(a[:, None] * b[None, :] - 1.0))
        m = float(np.max(zmag22(farg, Ts, x)[:, None] * zmag22(ptsg, Tt, y)[None, :]
                         * cross(farg, ptsg)))
        return 2.0 * 2.0 * leng_far * gamma.length() * consts.sigma * consts.z_c \
            * n13 * m / (2.0 * np.pi) ** 2
    if component == "I12":
        def zmag12z(z, T, loc):
            out = np.exp(np.minimum(re_phase(z, T, loc, +1), 700.0))
            return out * np.abs((z - c) / (z * (z ** 2 - 1.0))) * np.abs(W(z))

        def cross12(a, b):
            return (np.abs(a[:, None] * b[None, :] - 1.0)
                    / np.abs(a[:, None] - b[None, :]))

        total = 0.0
        if farG.size:
            m = float(np.max(zmag12z(farG, Ts, x)[:, None]
                             * zmag22(ptsg, Tt, y)[None, :] * cross12(farG, ptsg)))
            total += lenG_far * gamma.length() * m
        if farg.size:
            m = float(np.max(zmag12z(ptsG, Ts, x)[:, None]
                             * zmag22(farg, Tt, y)[None, :] * cross12(ptsG, farg)))
            total += Gamma.length() * leng_far * m
        return 2.0 * total * consts.sigma * consts.z_c * n13 / (2.0 * np.pi) ** 2
    if component == "R12":
        if fart.size == 0:
            return 0.0
        m = float(np.max(np.exp(np.minimum(
            (Ts - Tt) * sg.Gbar_real(fart)
            + sxy * (y - x) * np.log(np.abs(fart / consts.z_c)), 700.0))
            / np.abs(fart)))
        return 2.0 * lent_far * consts.sigma * consts.z_c * n13 * m / (2.0 * np.pi)
    raise KernelDomainError(component)


def prelimit_kernel(component: str, s: float, x: float, t: float, y: float,
                    ctx: PrelimitContext, n_per_panel: int = 24,
                    return_tail: bool = False):
    """I^N_11/I^N_12/I^N_22/R^N_12 or the assembled K^N entries at real times s,t.

    component in {"I11", "I12", "I22", "R12", "K11", "K12", "K21", "K22"}.
    Assembled entries follow the 2x2 decomposition (K12 = I12 + R12, K21 by
    skew symmetry); in critical mode the diagonal picks up N^{+-2/3}.
    Evaluation is always on the truncated contours; the discarded-tail bound
    is checked against ctx.tol (TruncationError if it cannot be met).
    """
    consts = ctx.consts
    sg = SGFunctions(consts)
    if component == "K21":
        val = prelimit_kernel("K12", t, y, s, x, ctx, n_per_panel)
        return -val
    if component == "K11":
        scalefac = ctx.N ** (2.0 / 3.0) if ctx.mode == "critical" else 1.0
        return scalefac * prelimit_kernel("I11", s, x, t, y, ctx, n_per_panel)
    if component == "K22":
        scalefac = ctx.N ** (-2.0 / 3.0) if ctx.mode == "critical" else 1.0
        return scalefac * prelimit_kernel("I22", s, x, t, y, ctx, n_per_panel)
    if component == "K12":
        val = prelimit_kernel("I12", s, x, t, y, ctx, n_per_panel)
        if s > t:
            val = val + prelimit_kernel("R12", s, x, t, y, ctx, n_per_panel)
        return val

    n23 = ctx.N ** (2.0 / 3.0)
    Ts = int(np.floor(s * n23))
    Tt = int(np.floor(t * n23))
    kN = int(np.floor(consts.kappa * ctx.N))
    if not (1 <= kN + min(Ts, Tt) and max(Ts, Tt) + kN <= ctx.N):
        raise KernelDomainError(
            f"(N, kappa, s, t) inadmissible: floor(kappa N) + T must lie in [1, N]")
    if component == "R12":
        if not s > t:
            return 0.0 + 0.0j
        return _r12_value(ctx, sg, Ts, Tt, x, y, n_per_panel)

    tail = _tail_bound(ctx, sg, component, Ts, Tt, x, y)
    if ctx.tail_tol is not None and tail > ctx.tail_tol:
        raise TruncationError(
            f"{component} discarded-tail bound {tail:.3e} exceeds tail_tol "
            f"{ctx.tail_tol:.1e} at N={ctx.N}")
    val = _i_component_value(component, ctx, sg, Ts, Tt, x, y, n_per_panel)
    if return_tail:
        return val, tail
    return val


def _i_component_value(component, ctx, sg, Ts, Tt, x, y, n_per_panel):
    consts = ctx.consts
    q, c = consts.q, ctx.c_eff
    frac = consts.kappa * ctx.N - math.floor(consts.kappa * ctx.N)
    pref = consts.sigma * consts.z_c * ctx.N ** (1.0 / 3.0)
    W = ctx.spike_factor()

    def value(npan):
        (zG, dG), (zg, dg), _ = _prelimit_wedges(ctx, npan, max(Ts - Tt, 1))
        if component == "I11":
            z, dz = zG, dG
            w, dw = zG, dG
            fz = _phase_parts(ctx, sg, z, Ts, x, +1) * (1.0 - c / z) \
                * _frac_pow(q, z, frac) * W(z) * dz
            fw = _phase_parts(ctx, sg, w, Tt, y, +1) * (1.0 - c / w) \
                * _frac_pow(q, w, frac) * W(w) * dw
            cross = (z[:, None] - w[None, :]) / (
                (z[:, None] ** 2 - 1.0) * (w[None, :] ** 2 - 1.0)
                * (z[:, None] * w[None, :] - 1.0))
        elif component == "I22":
            z, dz = zg, dg
            w, dw = zg, dg
            fz = _phase_parts(ctx, sg, z, Ts, x, -1) / ((z - c) * _frac_pow(q, z, frac) * W(z)) * dz
            fw = _phase_parts(ctx, sg, w, Tt, y, -1) / ((w - c) * _frac_pow(q, w, frac) * W(w)) * dw
            cross = (z[:, None] - w[None, :]) / (z[:, None] * w[None, :] - 1.0)
        else:
            z, dz = zG, dG
            w, dw = zg, dg
            fz = _phase_parts(ctx, sg, z, Ts, x, +1) * (z - c) * _frac_pow(q, z, frac) \
                * W(z) / (z * (z ** 2 - 1.0)) * dz
            fw = _phase_parts(ctx, sg, w, Tt, y, -1) / ((w - c) * _frac_pow(q, w, frac) * W(w)) * dw
            cross = (z[:, None] * w[None, :] - 1.0) / (z[:, None] - w[None, :])
        return pref * (fz @ cross @ fw) / TWO_PI_I ** 2

    prev = value(n_per_panel)
    for _ in range(3):
        n_per_panel *= 2
        cur = value(n_per_panel)
        if abs(cur - prev) <= ctx.tol * max(1.0, abs(cur)):
            return cur
        prev = cur
    raise TruncationError(f"{component} quadrature did not stabilize at N={ctx.N}")


def _r12_value(ctx, sg, Ts, Tt, x, y, n_per_panel):
    consts = ctx.consts
    pref = -consts.sigma * consts.z_c * ctx.N ** (1.0 / 3.0)
    sxy = consts.sigma * consts.z_c * ctx.N ** (1.0 / 3.0)

    def value(npan):
        _, _, (zt, dt) = _prelimit_wedges(ctx, npan, max(Ts - Tt, 1))
        f = np.exp((Ts - Tt) * sg.Gbar(zt)
                   + sxy * (y - x) * np.log(zt / consts.z_c)) / zt
        return pref * np.sum(f * dt) / TWO_PI_I

    prev = value(n_per_panel)
    for _ in range(3):
        n_per_panel *= 2
        cur = value(n_per_panel)
        if abs(cur - prev) <= ctx.tol * max(1.0, abs(cur)):
            return cur
        prev = cur
    raise TruncationError(f"R12 quadrature did not stabilize at N={ctx.N}")


# ---------------------------------------------------------------------------
# Airy wanderer kernel and the limit side of the convergence statements
# ---------------------------------------------------------------------------


class AiryParameterError(ValueError):
    """Airy wanderer parameter-order violation (anchors/spike sets)."""


def _airy_anchors(t1: float, t2: float, A, B):
    """Ray anchors with beta + t2 in (max B, gamma + t1) and gamma + t1 < min A.

    Kept as close to the saddle at 0 as the window allows: anchors far from 0
    put e^{z^3/3} through a huge ridge before the cubic decay and double
    precision cancels catastrophically.
    """
    a_min = min(A, default=np.inf)
    b_max = max(B, default=-np.inf)
    if not a_min > b_max:
        raise AiryParameterError(f"min(A)={a_min} must exceed max(B)={b_max}")
    lo = b_max if np.isfinite(b_max) else None
    hi = a_min if np.isfinite(a_min) else None
    if lo is None and hi is None:
        b, g = -0.5, 0.5
    elif lo is None:
        g = min(0.5, hi - 0.35)
        b = g - 1.0
    elif hi is None:
        b = lo + 0.35
        g = b + 0.7
    else:
        step = min(0.35, (hi - lo) / 3.0)
        b = lo + step
        g = b + min(0.7, (hi - lo) / 3.0)
    gamma = g - t1
    beta = b - t2
    return gamma, beta


def _ray_nodes(anchor: complex, phi: float, trunc: float, n_per_panel: int):
    z, dz = _truncated_wedge_nodes(0.0, phi, 0.0, trunc, 1.0, n_per_panel)
    return anchor + z, dz


def airy_wanderer(t1: float, x1: float, t2: float, x2: float,
                  A=(), B=(), tol: float = 1e-9, trunc: float = 9.0,
                  n_per_panel: int = 24) -> float:
    """The Airy wanderer kernel K^Airy_{A,B}(t1,x1;t2,x2).

    Gaussian cross term (iff t2 > t1) plus the double ray integral over
    C^{pi/3} (z) and C^{2pi/3} (w), with rational factors indexed by the
    wanderer sets A and B.  Rays are truncated where the cubic exponent kills
    the integrand and adaptively extended until the value is stable; the
    imaginary quadrature residue must stay below 1e-6.
    """
    A = tuple(float(a) for a in A)
    B = tuple(float(b) for b in B)
    gamma, beta = _airy_anchors(t1, t2, A, B)
    val = _airy_double_integral(t1, x1, t2, x2, A, B, gamma, beta, tol, trunc,
                                n_per_panel)
    # adaptive 20% extensions of the ray truncation
    for _ in range(6):
        ext = _airy_double_integral(t1, x1, t2, x2, A, B, gamma, beta, tol,
                                    trunc * 1.2, n_per_panel)
        if abs(ext - val) <= tol * max(1.0, abs(ext)):
            val = ext
            break
        trunc *= 1.2
        val = ext
    else:
        raise TruncationError("airy ray truncation did not stabilize")
    out = val
    if t2 > t1:
        dt = t2 - t1
        out = out - math.exp(-(x2 - x1) ** 2 / (4.0 * dt) - dt * (x2 + x1) / 2.0
                             + dt ** 3 / 12.0) / math.sqrt(4.0 * np.pi * dt)
    if abs(out.imag) > 1e-6:
        raise TruncationError(f"airy kernel imaginary residue {out.imag:.2e} too large")
    return float(out.real)


def _airy_double_integral(t1, x1, t2, x2, A, B, gamma, beta, tol, trunc,
                          n_per_panel):
    def value(npan):
        z, dz = _ray_nodes(gamma, np.pi / 3.0, trunc, npan)
        w, dw = _ray_nodes(beta, 2.0 * np.pi / 3.0, trunc, npan)
        fz = np.exp(z ** 3 / 3.0 - x1 * z) * dz
        fw = np.exp(-w ** 3 / 3.0 + x2 * w) * dw
        for a in A:
            fz = fz / (z + t1 - a)
            fw = fw * (w + t2 - a)
        for b in B:
            fz = fz * (z + t1 - b)
            fw = fw / (w + t2 - b)
        cross = 1.0 / (z[:, None] + t1 - w[None, :] - t2)
        return (fz @ cross @ fw) / TWO_PI_I ** 2

    prev = value(n_per_panel)
    for _ in range(4):
        n_per_panel *= 2
        cur = value(n_per_panel)
        if abs(cur - prev) <= 0.1 * tol * max(1.0, abs(cur)):
            return cur
        prev = cur
    raise TruncationError("airy quadrature did not stabilize")


def extended_airy_oracle(t1: float, x1: float, t2: float, x2: float) -> float:
    """Independent evaluation of the two-time Airy kernel via Airy functions.

    K(t1,x1;t2,x2) = int_0^inf e^{-u(t1-t2)} Ai(x1+u) Ai(x2+u) du minus the
    Gaussian cross term when t2 > t1.  Uses scipy's Ai and fixed-order
    Gauss-Legendre panels; shares no code with airy_wanderer.
    """
    from scipy.special import airy as _airy

    def integrand(u):
        return np.exp(-u * (t1 - t2)) * _airy(x1 + u)[0] * _airy(x2 + u)[0]

    val = 0.0
    edges = np.concatenate([np.linspace(0.0, 8.0, 33), [10.0, 13.0, 16.0, 20.0, 26.0, 34.0]])
    gl_x, gl_w = leggauss(48)
    for lo, hi in zip(edges[:-1], edges[1:]):
        u = 0.5 * (hi - lo) * gl_x + 0.5 * (hi + lo)
        val += 0.5 * (hi - lo) * np.sum(gl_w * integrand(u))
    if t2 > t1:
        dt = t2 - t1
        val -= math.exp(-(x2 - x1) ** 2 / (4.0 * dt) - dt * (x2 + x1) / 2.0
                        + dt ** 3 / 12.0) / math.sqrt(4.0 * np.pi * dt)
    return float(val)


def gaussian_r_limit(s: float, x: float, t: float, y: float, f: float) -> float:
    """Closed form of the limiting R-part: -(4 pi f (s-t))^{-1/2} e^{-(y-x)^2/(4f(s-t))}."""
    if not s > t:
        return 0.0
    dt = f * (s - t)
    return -math.exp(-(y - x) ** 2 / (4.0 * dt)) / math.sqrt(4.0 * np.pi * dt)


def gaussian_r_quadrature(s: float, x: float, t: float, y: float, f: float,
                          trunc: float = 30.0, n: int = 4000) -> float:
    """The limiting R-part by direct quadrature of its vertical-line integral:
    -(1/2 pi i) int_{iR} e^{(s-t) f z^2 + (y-x) z} dz for s > t."""
    if not s > t:
        return 0.0
    u = np.linspace(-trunc, trunc, n)
    vals = np.exp(-(s - t) * f * u ** 2 + 1j * (y - x) * u)
    integral = np.trapezoid(vals, u) / (2.0 * np.pi)
    return float(-integral.real)


def limit_rhs(s: float, x: float, t: float, y: float, consts: ScalingConstants,
              spikes_alpha=(), mode: str = "subcritical", varpi: float = 0.0,
              tol: float = 1e-9) -> float:
    """The limit of the rescaled 12-kernel entry:

    e^{2f^3 s^3/3 - 2f^3 t^3/3 + f s x - f t y} *
    K^Airy_{A,B}(-f s, x + f^2 s^2; -f t, y + f^2 t^2), with A the spike set
    and B empty (subcritical) or {-varpi} (critical).
    """
    f = consts.f
    A = tuple(float(a) for a in spikes_alpha)
    if mode == "critical":
        B = (-float(varpi),)
    elif mode == "subcritical":
        B = ()
    else:
        raise KernelDomainError(f"unknown mode {mode!r}")
    pref = math.exp(2.0 * f ** 3 * s ** 3 / 3.0 - 2.0 * f ** 3 * t ** 3 / 3.0
                    + f * s * x - f * t * y)
    ker = airy_wanderer(-f * s, x + f ** 2 * s ** 2, -f * t, y + f ** 2 * t ** 2,
                        A=A, B=B, tol=tol)
    return pref * ker
