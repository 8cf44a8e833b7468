"""Complex-plane contours (segments + arcs) and adaptive Gauss-Legendre quadrature.

The keyhole contour keyhole(x, theta, R, r) consists of two rays from the
point x at angles +-theta, clipped between an inner x-centered arc of radius
|r| (clockwise iff r < 0, degenerate when r = 0) and the 0-centered circle of
radius R.  The rays may start outside that circle (|x| > R happens for the
inner kernel contour), in which case the first intersection along the ray is
used; otherwise the unique outward intersection.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss


class ContourError(ValueError):
    """Ill-posed contour construction."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to converge; carries the last two estimates."""

    def __init__(self, msg, last=None, prev=None):
        super().__init__(msg)
        self.last = last
        self.prev = prev


_JOIN_TOL = 1e-12


@dataclass(frozen=True)
class Line:
    p0: complex
    p1: complex

    @property
    def start(self) -> complex:
        return self.p0

    @property
    def end(self) -> complex:
        return self.p1

    def length(self) -> float:
        return abs(self.p1 - self.p0)

    def nodes(self, n: int):
        x, w = leggauss(n)
        u = 0.5 * (x + 1.0)
        z = self.p0 + (self.p1 - self.p0) * u
        dz = (self.p1 - self.p0) * 0.5 * w
        return z, dz

    def to_json(self):
        return {"kind": "line", "p0": [self.p0.real, self.p0.imag],
                "p1": [self.p1.real, self.p1.imag]}


@dataclass(frozen=True)
class Arc:
    center: complex
    radius: float
    phi0: float
    phi1: float  # signed sweep: phi1 > phi0 is counterclockwise

    def __post_init__(self):
        if self.radius <= 0.0:
            raise ContourError(f"arc radius must be > 0, got {self.radius}")

    @property
    def start(self) -> complex:
        return self.center + self.radius * np.exp(1j * self.phi0)

    @property
    def end(self) -> complex:
        return self.center + self.radius * np.exp(1j * self.phi1)

    @property
    def orientation(self) -> int:
        return 1 if self.phi1 >= self.phi0 else -1

    def length(self) -> float:
        return abs(self.phi1 - self.phi0) * self.radius

    def is_full_circle(self) -> bool:
        return abs(abs(self.phi1 - self.phi0) - 2.0 * np.pi) < 1e-14

    def nodes(self, n: int):
        if self.is_full_circle():
            # periodic trapezoid: spectrally accurate on circles
            theta = self.phi0 + (self.phi1 - self.phi0) * np.arange(n) / n
            z = self.center + self.radius * np.exp(1j * theta)
            dz = 1j * self.radius * np.exp(1j * theta) * (self.phi1 - self.phi0) / n
            return z, dz
        x, w = leggauss(n)
        u = 0.5 * (x + 1.0)
        theta = self.phi0 + (self.phi1 - self.phi0) * u
        z = self.center + self.radius * np.exp(1j * theta)
        dz = 1j * self.radius * np.exp(1j * theta) * (self.phi1 - self.phi0) * 0.5 * w
        return z, dz

    def to_json(self):
        return {"kind": "arc", "center": [self.center.real, self.center.imag],
                "radius": self.radius, "phi0": self.phi0, "phi1": self.phi1,
                "orientation": self.orientation}


@dataclass
class Contour:
    segments: list
    closed: bool = False
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.segments:
            raise ContourError("empty contour")
        for a, b in zip(self.segments, self.segments[1:]):
            if abs(a.end - b.start) > _JOIN_TOL * max(1.0, abs(a.end)):
                raise ContourError(
                    f"segments do not join: {a.end} vs {b.start}")
        if self.closed:
            a, b = self.segments[-1], self.segments[0]
            if abs(a.end - b.start) > _JOIN_TOL * max(1.0, abs(a.end)):
                raise ContourError("closed contour does not return to start")

    def length(self) -> float:
        return sum(s.length() for s in self.segments)

    def nodes(self, n_per_segment: int):
        zs, dzs = [], []
        for seg in self.segments:
            z, dz = seg.nodes(n_per_segment)
            zs.append(z)
            dzs.append(dz)
        return np.concatenate(zs), np.concatenate(dzs)

    def sample_points(self, per_segment: int = 64) -> np.ndarray:
        pts = []
        for seg in self.segments:
            z, _ = seg.nodes(per_segment)
            pts.append(z)
        return np.concatenate(pts)

    def crosses_negative_axis(self, samples_per_segment: int = 512) -> bool:
        """True if the contour meets the ray (-inf, 0] (principal-log hazard)."""
        for seg in self.segments:
            if isinstance(seg, Line):
                p0, p1 = seg.p0, seg.p1
                if abs(p0.imag) < 1e-15 and p0.real <= 0:
                    return True
                if abs(p1.imag) < 1e-15 and p1.real <= 0:
                    return True
                if (p0.imag > 0) != (p1.imag > 0) and abs(p1.imag - p0.imag) > 0:
                    t = -p0.imag / (p1.imag - p0.imag)
                    if 0.0 <= t <= 1.0 and p0.real + t * (p1.real - p0.real) <= 0:
                        return True
            else:
                theta = np.linspace(seg.phi0, seg.phi1, samples_per_segment)
                z = seg.center + seg.radius * np.exp(1j * theta)
                im = z.imag
                re = z.real
                crossing = (im[:-1] * im[1:] <= 0) & ((re[:-1] <= 0) | (re[1:] <= 0))
                if np.any(crossing):
                    return True
        return False

    def to_json(self):
        return {"closed": self.closed, "segments": [s.to_json() for s in self.segments],
                "metadata": self.metadata}


@dataclass(frozen=True)
class QuadratureSpec:
    nodes_per_segment: int = 64
    refinement: int = 5  # max doublings; 64 * 2^5 > the 2^10 node cap
    tol: float = 1e-10

    def __post_init__(self):
        if self.nodes_per_segment < 4:
            raise ContourError("nodes_per_segment must be >= 4")
        if self.tol <= 0.0:
            raise ContourError("tol must be > 0")


def circle(r: float) -> Contour:
    """Positively oriented circle of radius r centered at 0."""
    if r <= 0.0:
        raise ContourError(f"circle radius must be > 0, got {r}")
    return Contour([Arc(0.0 + 0.0j, r, 0.0, 2.0 * np.pi)], closed=True)


def _ray_circle_parameter(x: float, theta: float, R: float) -> float:
    """First/only positive t with |x + t e^{i theta}| = R along the ray from x.

    When x lies inside the circle the crossing is unique (largest root); when
    x lies outside, the ray must enter the disc and the first intersection
    (smallest positive root) keeps the contour simple.
    """
    b = x * np.cos(theta)
    disc = b * b - (x * x - R * R)
    if disc < 0.0:
        raise ContourError(
            f"ray from {x} at angle {theta} misses the circle of radius {R}")
    root = np.sqrt(disc)
    if abs(x) <= R:
        t = -b + root
    else:
        t = -b - root
    if t <= 0.0:
        raise ContourError(
            f"ray from {x} at angle {theta} has no positive intersection with radius {R}")
    return t


def keyhole(x: float, theta: float, R: float, r: float,
            q_upper: float | None = None) -> Contour:
    """The closed contour through the rays x + t e^{+-i theta} and the circle |z| = R.

    Segments, in order: line zeta^- -> z^-, inner x-centered arc z^- -> z^+
    of radius |r| (counterclockwise through the angle-0 side iff r >= 0,
    clockwise through the angle-pi side iff r < 0; omitted when r = 0), line
    z^+ -> zeta^+, and the counterclockwise 0-centered arc zeta^+ -> zeta^-.
    """
    if q_upper is not None and not (0.0 < x < q_upper):
        raise ContourError(f"keyhole center {x} outside (0, {q_upper})")
    if x <= 0.0:
        raise ContourError(f"keyhole center must be positive, got {x}")
    if not (0.0 < theta < np.pi):
        raise ContourError(f"theta must lie in (0, pi), got {theta}")
    t = _ray_circle_parameter(x, theta, R)
    if t <= abs(r):
        raise ContourError(
            f"inner radius |r|={abs(r)} exceeds the ray-circle distance {t}")
    zeta_p = x + t * np.exp(1j * theta)
    zeta_m = x + t * np.exp(-1j * theta)
    segs = []
    if r == 0.0:
        segs.append(Line(zeta_m, complex(x)))
        segs.append(Line(complex(x), zeta_p))
    else:
        z_m = x + abs(r) * np.exp(-1j * theta)
        z_p = x + abs(r) * np.exp(1j * theta)
        segs.append(Line(zeta_m, z_m))
        if r > 0:
            segs.append(Arc(complex(x), abs(r), -theta, theta))
        else:
            segs.append(Arc(complex(x), abs(r), -theta, theta - 2.0 * np.pi))
        segs.append(Line(z_p, zeta_p))
    phi = np.angle(zeta_p)
    phi_end = np.angle(zeta_m)
    if phi_end <= phi:
        phi_end += 2.0 * np.pi
    segs.append(Arc(0.0 + 0.0j, R, phi, phi_end))
    return Contour(segs, closed=True,
                   metadata={"x": x, "theta": theta, "R": R, "r": r})


def ray(a: complex, phi: float, r: float, truncation: float,
        grade_scale: float | None = None) -> Contour:
    """Truncated wedge through a: rays at angles +-phi clipped at `truncation`,
    joined by an a-centered arc of radius |r| (clockwise iff r < 0).

    Oriented from a + truncation*e^{-i phi} to a + truncation*e^{i phi}.  When
    grade_scale is given, each ray is split into geometrically growing panels
    (first panel ~ grade_scale/4) so integrands varying on scale grade_scale
    near a are resolved.
    """
    if not (0.0 < phi < np.pi):
        raise ContourError(f"phi must lie in (0, pi), got {phi}")
    if truncation <= abs(r):
        raise ContourError(f"truncation {truncation} must exceed |r| = {abs(r)}")
    if r < 0 and abs(r) == 0:
        r = 0.0
    a = complex(a)

    def breakpoints():
        lo = abs(r)
        if grade_scale is None or grade_scale <= 0:
            return [lo, truncation]
        pts = [lo]
        step = grade_scale / 4.0
        cur = lo
        while cur + step < truncation:
            cur += step
            pts.append(cur)
            step *= 2.0
        pts.append(truncation)
        return pts

    bps = breakpoints()
    segs = []
    # incoming ray: from far on the -phi side toward a
    for hi, lo in zip(bps[::-1], bps[-2::-1]):
        segs.append(Line(a + hi * np.exp(-1j * phi), a + lo * np.exp(-1j * phi)))
    if abs(r) > 0:
        if r > 0:
            segs.append(Arc(a, abs(r), -phi, phi))
        else:
            segs.append(Arc(a, abs(r), -phi, phi - 2.0 * np.pi))
    for lo, hi in zip(bps[:-1], bps[1:]):
        segs.append(Line(a + lo * np.exp(1j * phi), a + hi * np.exp(1j * phi)))
    return Contour(segs, closed=False,
                   metadata={"a": [a.real, a.imag], "phi": phi, "r": r,
                             "truncation": truncation})


def integrate(f, contour: Contour, spec: QuadratureSpec = QuadratureSpec()):
    """Composite Gauss-Legendre (trapezoid on full circles) with node doubling.

    Returns (value, error_estimate); the error estimate is the change under
    the final doubling.  Raises QuadratureError if the doublings are
    exhausted without meeting spec.tol (relative to max(1, |value|)).
    """
    n = spec.nodes_per_segment
    z, dz = contour.nodes(n)
    prev = np.sum(f(z) * dz)
    err = np.inf
    cur = prev
    for _ in range(spec.refinement):
        n *= 2
        z, dz = contour.nodes(n)
        cur = np.sum(f(z) * dz)
        err = abs(cur - prev)
        if err <= spec.tol * max(1.0, abs(cur)):
            return cur, err
        prev = cur
    raise QuadratureError(
        f"no convergence after {spec.refinement} doublings (last change {err:.3e})",
        last=cur, prev=prev)


def winding_number(contour: Contour, point: complex,
                   spec: QuadratureSpec = QuadratureSpec(tol=1e-8)) -> int:
    """Numerical winding number (1/2pi i) oint dz/(z - point), rounded."""
    val, _ = integrate(lambda z: 1.0 / (z - point), contour, spec)
    return int(np.rint((val / (2j * np.pi)).real))


class NestingError(ContourError):
    """Contour nesting/pole-separation prerequisites fail at this N."""


def prelimit_radii(mode: str, spikes_alpha, varpi: float, sigma: float):
    """Signed notch offsets (r1, r2) in units of N^{-1/3}.

    Subcritical: r1 = min(0, 2*amin), r2 = min(-1, 3*amin) with amin the
    smallest spike strength (+inf with no spikes).  Critical with spikes:
    r1 = -2*varpi/3 + amin/3, r2 = -varpi/3 + 2*amin/3.  Critical without
    spikes: the weighted-average formulas are +inf, so we anchor relative to
    the boundary pole instead: r1 = 1 - varpi/sigma, r2 = 1/2 - varpi/sigma,
    which keeps -varpi/sigma < r2 < r1 for every sigma (flagged in metadata).
    """
    amin = min(spikes_alpha, default=np.inf)
    if mode == "subcritical":
        return min(0.0, 2.0 * amin), min(-1.0, 3.0 * amin), False
    if mode != "critical":
        raise ContourError(f"unknown mode {mode!r}")
    if np.isfinite(amin):
        return -2.0 * varpi / 3.0 + amin / 3.0, -varpi / 3.0 + 2.0 * amin / 3.0, False
    return 1.0 - varpi / sigma, 0.5 - varpi / sigma, True


def prelimit_contours(consts, N: int, mode: str = "subcritical",
                      spikes_alpha=(), varpi: float = 0.0, c: float | None = None,
                      theta: float | None = None, R: float | None = None,
                      check: bool = True):
    """The nested contour triple (Gamma_N, gamma_N, gamma_tilde_N).

    Gamma_N = keyhole(z_c, theta, R, r1 N^{-1/3}) carries the z-variable,
    gamma_N = keyhole(z_c, 2pi/3, sqrt(z_c^2 + N^{-1/6} - z_c N^{-1/12}), r2 N^{-1/3})
    the w-variable, and gamma_tilde_N = keyhole(z_c, pi/2, sqrt(z_c^2 + N^{-1/6}), 0)
    the single-integral term.  With check=True the required pole placement is
    certified numerically (winding numbers) and nesting separation measured;
    failures raise NestingError naming the violated condition.
    """
    q, z_c, sigma = consts.q, consts.z_c, consts.sigma
    if theta is None:
        theta = 5.0 * np.pi / 12.0
    if R is None:
        R = 1.0 / q + 0.5
    if not (np.pi / 4 < theta < np.pi / 2):
        raise ContourError(f"theta must lie in (pi/4, pi/2), got {theta}")
    if R <= 1.0 / q:
        raise ContourError(f"R must exceed 1/q = {1.0 / q}, got {R}")
    r1, r2, j0_convention = prelimit_radii(mode, tuple(spikes_alpha), varpi, sigma)
    n13 = N ** (-1.0 / 3.0)
    if mode == "critical":
        c_eff = z_c - varpi * n13 / sigma
    else:
        c_eff = c if c is not None else 0.0
    rad_gamma_sq = z_c ** 2 + N ** (-1.0 / 6.0) - z_c * N ** (-1.0 / 12.0)
    if rad_gamma_sq <= 0:
        raise NestingError(f"N={N} too small: gamma_N radius^2 = {rad_gamma_sq} <= 0")
    Gamma = keyhole(z_c, theta, R, r1 * n13)
    gamma = keyhole(z_c, 2.0 * np.pi / 3.0, np.sqrt(rad_gamma_sq), r2 * n13)
    gamma_t = keyhole(z_c, np.pi / 2.0, np.sqrt(z_c ** 2 + N ** (-1.0 / 6.0)), 0.0)
    meta = {"mode": mode, "r1": r1, "r2": r2, "N": N, "theta": theta, "R": R,
            "critical_j0_convention": j0_convention, "c_eff": c_eff}
    for ct in (Gamma, gamma, gamma_t):
        ct.metadata.update(meta)
    if check:
        _check_prelimit(Gamma, gamma, consts, c_eff, tuple(spikes_alpha), N, mode)
    return Gamma, gamma, gamma_t


def _check_prelimit(Gamma, gamma, consts, c_eff, spikes_alpha, N, mode):
    q, z_c, sigma = consts.q, consts.z_c, consts.sigma
    n13 = N ** (-1.0 / 3.0)

    def require(cond, desc):
        if not cond:
            raise NestingError(f"N={N} too small ({mode}): {desc}")

    require(winding_number(Gamma, 0.0) == 1, "Gamma_N must encircle 0")
    require(winding_number(Gamma, 1.0) == 1, "Gamma_N must encircle z=1")
    require(winding_number(Gamma, -1.0) == 1, "Gamma_N must encircle z=-1")
    require(winding_number(gamma, 0.0) == 1, "gamma_N must encircle 0")
    require(winding_number(gamma, q) == 1, "gamma_N must encircle q")
    require(winding_number(gamma, c_eff) == 1, "gamma_N must encircle c")
    for al in spikes_alpha:
        pole = z_c + al * n13 / sigma
        a_val = 1.0 / pole
        require(winding_number(Gamma, pole) == 0,
                f"spike pole 1/a = {pole} must lie outside Gamma_N")
        require(winding_number(gamma, pole) == 0,
                f"spike pole 1/a = {pole} must lie outside gamma_N")
        require(winding_number(gamma, a_val) == 1,
                f"spike point a = {a_val} must lie inside gamma_N")
    # nesting: gamma_N strictly inside Gamma_N, with N^{-1/3}-scale separation
    pz = Gamma.sample_points(96)
    pw = gamma.sample_points(96)
    dmin = np.min(np.abs(pz[:, None] - pw[None, :]))
    require(dmin > 0.05 * n13,
            f"Gamma_N/gamma_N separation {dmin:.3e} below 0.05 N^(-1/3)")
    for w in (gamma.segments[0].start, gamma.segments[-1].end):
        require(winding_number(Gamma, w) == 1, "gamma_N must lie inside Gamma_N")
    require(c_eff < z_c + abs(Gamma.metadata.get("r1", 0.0)) * n13 + 1.0,
            "boundary parameter unexpectedly far right of z_c")
