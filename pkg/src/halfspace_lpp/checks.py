"""Numerical certification of the steepest-descent inequalities and the
kernel-convergence experiment.

verify_descent checks, on parameter/radius grids, every inequality the
contour analysis rests on: cubic decay of Re S along the theta-rays, cubic
growth along the 2pi/3-rays, quadratic decay of Re G on the vertical rays,
monotonicity of Re S / Re G along centered circles, and strict decay of
Re S on the big keyhole away from z_c.  Failures are report rows, not
exceptions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .contours import keyhole
from .kernels import PrelimitContext, prelimit_kernel, limit_rhs
from .scaling import ScalingConstants, SGFunctions, scaling_constants


@dataclass
class CheckRow:
    name: str
    point: str
    passed: bool
    detail: str = ""

    def as_dict(self):
        return {"name": self.name, "point": self.point, "passed": self.passed,
                "detail": self.detail}


@dataclass
class DescentReport:
    q: float
    kappa: float
    rows: list[CheckRow] = field(default_factory=list)
    constants: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def failures(self):
        return [r for r in self.rows if not r.passed]

    def as_dict(self):
        return {"q": self.q, "kappa": self.kappa, "passed": self.passed,
                "constants": self.constants,
                "rows": [r.as_dict() for r in self.rows]}


def estimate_c0(sg: SGFunctions, delta0: float) -> float:
    """Taylor-remainder constant: max over sampled circles of the quartic/cubic
    remainders of S and G, with a 1.5x sampling-slack factor."""
    consts = sg.consts
    z_c, sigma, f = consts.z_c, consts.sigma, consts.f
    worst = 0.0
    for rad in (delta0, delta0 / 2.0, delta0 / 4.0):
        th = np.linspace(0.0, 2.0 * np.pi, 96, endpoint=False)
        z = z_c + rad * np.exp(1j * th)
        rs = np.abs(sg.Sbar(z) - (sigma ** 3 / 3.0) * (z - z_c) ** 3) / rad ** 4
        rg = np.abs(sg.Gbar(z) - f * sigma ** 2 * (z - z_c) ** 2) / rad ** 3
        worst = max(worst, float(np.max(rs)), float(np.max(rg)))
    return 1.5 * worst


def verify_descent(q: float, kappa: float, theta0: float = 5.0 * np.pi / 12.0,
                   R0: float | None = None, n_r: int = 24, n_theta: int = 64,
                   eps_grid=(0.05, 0.1, 0.2, 0.4)) -> DescentReport:
    consts = scaling_constants(q, kappa)
    sg = SGFunctions(consts)
    z_c, sigma, f = consts.z_c, consts.sigma, consts.f
    if R0 is None:
        R0 = 1.0 / q + 0.5
    delta0 = 0.5 * min(1.0, z_c - 1.0, 1.0 / q - z_c)
    c0 = estimate_c0(sg, delta0)
    eps1 = -(sigma ** 3) * np.cos(3.0 * theta0) / 6.0
    eps2 = 0.5 * min(sigma ** 3 / 3.0, f * sigma ** 2)
    delta1 = min(delta0, eps1 / c0)
    delta2 = min(delta0, eps2 / c0)
    rep = DescentReport(q=q, kappa=kappa, constants={
        "theta0": theta0, "R0": R0, "delta0": delta0, "C0": c0,
        "eps1": eps1, "eps2": eps2, "delta1": delta1, "delta2": delta2,
        "sigma": sigma, "f": f, "z_c": z_c,
    })

    def add(name, point, ok, detail=""):
        rep.rows.append(CheckRow(name=name, point=point, passed=bool(ok), detail=detail))

    # cubic decay along the theta0 rays: Re Sbar <= -eps1 r^3 on [0, delta1]
    rr = np.linspace(0.0, delta1, n_r)
    for sign in (+1, -1):
        z = z_c + rr[1:] * np.exp(sign * 1j * theta0)
        lhs = sg.Sbar_real(z)
        ok = np.all(lhs <= -eps1 * rr[1:] ** 3 + 1e-14)
        add("ray-decay-S", f"theta={sign}*{theta0:.4f}", ok,
            f"max slack {float(np.max(lhs + eps1 * rr[1:] ** 3)):.2e}")
    add("ray-decay-S", "r=0", True, "equality at the critical point")

    # cubic growth along the 2pi/3 rays: Re Sbar >= eps2 r^3 on [0, delta2]
    rr = np.linspace(0.0, delta2, n_r)
    for sign in (+1, -1):
        z = z_c + rr[1:] * np.exp(sign * 2j * np.pi / 3.0)
        lhs = sg.Sbar_real(z)
        ok = np.all(lhs >= eps2 * rr[1:] ** 3 - 1e-14)
        add("ray-growth-S", f"phi={sign}*2pi/3", ok,
            f"min slack {float(np.min(lhs - eps2 * rr[1:] ** 3)):.2e}")

    # quadratic decay along the vertical rays: Re Gbar <= -eps2 r^2 on [0, delta2]
    for sign in (+1, -1):
        z = z_c + rr[1:] * np.exp(sign * 1j * np.pi / 2.0)
        lhs = sg.Gbar_real(z)
        ok = np.all(lhs <= -eps2 * rr[1:] ** 2 + 1e-14)
        add("ray-decay-G", f"phi={sign}*pi/2", ok,
            f"max slack {float(np.max(lhs + eps2 * rr[1:] ** 2)):.2e}")

    # monotonicity of Re S along circles of radius <= z_c (finite differences)
    th = np.linspace(0.01, np.pi - 0.01, n_theta)
    for R in (0.25 * z_c, 0.5 * z_c, 0.75 * z_c, z_c):
        vals = sg.S_real(R * np.exp(1j * th))
        dv = np.diff(vals)
        add("circle-S-increasing", f"R={R:.4f}", np.all(dv > 0),
            f"min dtheta-diff {float(np.min(dv)):.2e}")

    # Re G decreasing along every circle
    for R in (0.3, 1.0, z_c, R0):
        vals = sg.G_real(R * np.exp(1j * th))
        dv = np.diff(vals)
        add("circle-G-decreasing", f"R={R:.4f}", np.all(dv < 0),
            f"max dtheta-diff {float(np.max(dv)):.2e}")

    # big-contour decay: Re Sbar <= -psi(eps) < 0 away from z_c on C(z_c,theta0,R0,0)
    big = keyhole(z_c, theta0, R0, 0.0)
    pts = big.sample_points(256)
    for eps in eps_grid:
        far = pts[np.abs(pts - z_c) >= eps]
        psi_hat = -float(np.max(sg.Sbar_real(far)))
        add("big-contour-decay", f"eps={eps}", psi_hat > 0.0,
            f"psi_hat={psi_hat:.4e}")
    return rep


def verify_descent_grid(q_values=(0.3, 0.5, 0.7), kappa_values=(0.2, 0.5, 0.8),
                        **kw) -> list[DescentReport]:
    return [verify_descent(q, k, **kw) for q in q_values for k in kappa_values]


@dataclass
class ConvergenceRow:
    point: tuple
    N: int
    kernel: complex
    limit: float
    abs_err: float
    rel_err: float

    def as_dict(self):
        return {"point": list(self.point), "N": self.N,
                "kernel_re": self.kernel.real, "kernel_im": self.kernel.imag,
                "limit": self.limit, "abs_err": self.abs_err, "rel_err": self.rel_err}


@dataclass
class ConvergenceReport:
    rows: list[ConvergenceRow]
    mode: str
    varpi: float
    threshold: float
    monotone_from: int

    def errors_for(self, point):
        return [(r.N, r.abs_err) for r in self.rows if r.point == tuple(point)]

    def contract(self) -> tuple[bool, list[str]]:
        """(ok, failures): errors strictly decrease for N >= monotone_from and
        the final relative error is below the threshold, per point."""
        fails = []
        points = sorted({r.point for r in self.rows})
        for pt in points:
            seq = sorted(self.errors_for(pt))
            mono = [(n, e) for n, e in seq if n >= self.monotone_from]
            if any(a[1] <= b[1] for a, b in zip(mono, mono[1:])):
                fails.append(f"errors not strictly decreasing at {pt}: {mono}")
            final_rel = [r.rel_err for r in self.rows
                         if r.point == pt and r.N == seq[-1][0]][0]
            if final_rel >= self.threshold:
                fails.append(f"final rel err {final_rel:.3e} >= {self.threshold} at {pt}")
        return (not fails), fails

    def as_dict(self):
        ok, fails = self.contract()
        return {"mode": self.mode, "varpi": self.varpi, "threshold": self.threshold,
                "monotone_from": self.monotone_from, "contract_ok": ok,
                "contract_failures": fails,
                "rows": [r.as_dict() for r in self.rows]}


def converge_check(points, N_list, consts: ScalingConstants,
                   mode: str = "subcritical", c: float = 0.5,
                   spikes_alpha=(), varpi: float = 0.0,
                   threshold: float = 2e-2, monotone_from: int = 0) -> ConvergenceReport:
    """|K^N_12 - limit| per (point, N); the limit side is the Airy-wanderer form.

    N_list must be increasing.  The contract (strict decrease from
    monotone_from on, final relative error below threshold) is evaluated by
    ConvergenceReport.contract().
    """
    if any(b <= a for a, b in zip(N_list, N_list[1:])):
        raise ValueError("N_list must be strictly increasing")
    rows = []
    for pt in points:
        s, x, t, y = pt
        lim = limit_rhs(s, x, t, y, consts, spikes_alpha=spikes_alpha,
                        mode=mode, varpi=varpi)
        for N in N_list:
            pctx = PrelimitContext(consts=consts, N=int(N), mode=mode, c=c,
                                   spikes_alpha=tuple(spikes_alpha), varpi=varpi)
            val = prelimit_kernel("K12", s, x, t, y, pctx)
            err = abs(val - lim)
            rows.append(ConvergenceRow(point=tuple(pt), N=int(N), kernel=complex(val),
                                       limit=lim, abs_err=err,
                                       rel_err=err / max(abs(lim), 1e-300)))
    return ConvergenceReport(rows=rows, mode=mode, varpi=varpi,
                             threshold=threshold, monotone_from=monotone_from)
