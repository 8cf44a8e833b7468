"""Bulk scaling constants and the log-linear phase functions driving the kernel asymptotics.

The five constants (h, p, f, z_c, sigma) turn a bulk location kappa*N into the
centering h*N, slope p, curvature scale f, critical point z_c and lattice scale
sigma of the rescaled line ensemble.  S and G are the phase functions whose
saddle at z_c organizes every contour integral: S'(z_c) = S''(z_c) = G'(z_c) = 0,
S'''(z_c) = 2 sigma^3 and G''(z_c) = 2 f sigma^2 exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class DomainError(ValueError):
    """Parameter outside the admissible domain (q or kappa not in (0,1), etc.)."""


_SINGULARITY_TOL = 1e-12


@dataclass(frozen=True)
class ScalingConstants:
    """The tuple (h, p, f, z_c, sigma) for a bulk location kappa at parameter q."""

    q: float
    kappa: float
    h: float
    p: float
    f: float
    z_c: float
    sigma: float

    def as_dict(self) -> dict:
        return {
            "q": self.q, "kappa": self.kappa, "h": self.h, "p": self.p,
            "f": self.f, "z_c": self.z_c, "sigma": self.sigma,
        }


def scaling_constants(q: float, kappa: float) -> ScalingConstants:
    """Compute (h, p, f, z_c, sigma).

    kappa = 1 is allowed for the constants themselves (z_c degenerates to 1);
    the kernel machinery requires kappa < 1.

    sigma and f carry (1-q^2)^{-1} and no (1-q^2) factor respectively, which is
    what S'''(z_c) = 2 sigma^3 and G''(z_c) = 2 f sigma^2 force; the identity
    sigma^2 z_c^2 = p(1+p)/(2f) that links the kernel lattice to the ensemble
    rescaling then holds exactly.
    """
    if not (0.0 < q < 1.0):
        raise DomainError(f"q must lie in (0,1), got {q}")
    if not (0.0 < kappa <= 1.0):
        raise DomainError(f"kappa must lie in (0,1], got {kappa}")
    sk = np.sqrt(kappa)
    om = 1.0 - q * q
    h = q * (q + 2.0 * sk + q * kappa) / om
    p = q * (1.0 + q * sk) / (om * sk)
    z_c = (1.0 + q * sk) / (q + sk)
    sigma = q ** (1.0 / 3.0) * (q + sk) ** (5.0 / 3.0) / (
        kappa ** (1.0 / 6.0) * om * (1.0 + q * sk) ** (1.0 / 3.0))
    f = q ** (1.0 / 3.0) / (
        2.0 * kappa ** (2.0 / 3.0) * (q + sk) ** (1.0 / 3.0) * (1.0 + q * sk) ** (1.0 / 3.0))
    return ScalingConstants(q=q, kappa=kappa, h=h, p=p, f=f, z_c=z_c, sigma=sigma)


class SGFunctions:
    """S, G and their z_c-centered versions Sbar, Gbar on C \\ {0, q, 1/q}.

    All complex evaluations use the principal logarithm, so callers must keep
    arguments off the ray (-inf, 0].  The *_real variants return only
    Re S / Re G via log|.| and are single-valued on all of C minus the
    singularities; they are what tail bounds and descent checks use on
    contours that cross the negative axis.
    """

    def __init__(self, consts: ScalingConstants):
        self.consts = consts
        self._S_zc = self.S(consts.z_c)
        self._G_zc = self.G(consts.z_c)

    def _check(self, z):
        c = self.consts
        z = np.asarray(z, dtype=complex)
        bad = (np.abs(z) < _SINGULARITY_TOL) | (np.abs(z - c.q) < _SINGULARITY_TOL) \
            | (np.abs(z - 1.0 / c.q) < _SINGULARITY_TOL)
        if np.any(bad):
            raise DomainError("evaluation within 1e-12 of a singularity of S/G")
        return z

    def S(self, z):
        c = self.consts
        z = self._check(z)
        return (np.log(1.0 - c.q / z) - c.kappa * np.log(1.0 - c.q * z)
                - c.h * np.log(z))

    def G(self, z):
        c = self.consts
        z = self._check(z)
        return -np.log(1.0 - c.q * z) - c.p * np.log(z)

    def Sbar(self, z):
        return self.S(z) - self._S_zc

    def Gbar(self, z):
        return self.G(z) - self._G_zc

    def S_real(self, z):
        """Re S(z), branch-free (valid even on the negative real axis)."""
        c = self.consts
        z = self._check(z)
        return (np.log(np.abs(1.0 - c.q / z)) - c.kappa * np.log(np.abs(1.0 - c.q * z))
                - c.h * np.log(np.abs(z)))

    def G_real(self, z):
        c = self.consts
        z = self._check(z)
        return -np.log(np.abs(1.0 - c.q * z)) - c.p * np.log(np.abs(z))

    def Sbar_real(self, z):
        return self.S_real(z) - self._S_zc.real

    def Gbar_real(self, z):
        return self.G_real(z) - self._G_zc.real

    def derivative_at_zc(self, which: str, order: int, radius: float | None = None) -> complex:
        """d^order/dz^order of S or G at z_c by a Cauchy integral on a small circle.

        Trapezoid quadrature on an analyticity disc is spectrally accurate, so
        256 nodes reach machine precision for orders up to 4.
        """
        c = self.consts
        if radius is None:
            radius = 0.25 * min(1.0, c.z_c - 1.0, 1.0 / c.q - c.z_c)
        fn = self.S if which == "S" else self.G
        m = 256
        theta = 2.0 * np.pi * np.arange(m) / m
        z = c.z_c + radius * np.exp(1j * theta)
        vals = fn(z)
        coeff = np.mean(vals * np.exp(-1j * order * theta)) / radius ** order
        return complex(coeff * math.factorial(order))


def complex_step_derivative(fn, x: float, h: float = 1e-20) -> float:
    """First derivative of a real-analytic fn at real x via a complex step."""
    return float(fn(x + 1j * h).imag / h)


class SpikeFactor:
    """The rational factor W(z) collecting the inhomogeneous (spiked) rows.

    W(z) = prod_j (1 - a_j/z)(1 - q z) / ((1 - q/z)(1 - a_j z)), identically 1
    with no spikes.  Poles in z at 1/a_j (near z_c) and q; zeros at a_j and 1/q.
    """

    def __init__(self, spike_a: list[float], q: float):
        self.spike_a = [float(a) for a in spike_a]
        self.q = float(q)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.ones_like(z)
        q = self.q
        for a in self.spike_a:
            out = out * (1.0 - a / z) * (1.0 - q * z) / ((1.0 - q / z) * (1.0 - a * z))
        return out

    @property
    def trivial(self) -> bool:
        return len(self.spike_a) == 0
