"""Pfaffians, point-process correlations and gap probabilities.

pfaffian() implements Parlett-Reid elimination with partial pivoting (sign
tracked through the permutation parity), valid for real or complex
skew-symmetric matrices.  correlation() and gap_probability() assemble the
2x2-block kernel over a finite point window; the gap probability of a
discrete Pfaffian point process over a window A is Pf(J - K)|_A with
J = diag([[0,1],[-1,0]]).
"""

from __future__ import annotations

import numpy as np

from .kernels import KernelContext, kgeo_grid


class SkewSymmetryError(ValueError):
    """Input matrix is not (even-dimensional) skew-symmetric."""


def _check_skew(a: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise SkewSymmetryError("matrix must be square")
    n = a.shape[0]
    if n % 2 == 1:
        raise SkewSymmetryError("Pfaffian requires even dimension")
    scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
    if np.max(np.abs(a + a.T)) > tol * scale:
        raise SkewSymmetryError("matrix is not skew-symmetric within 1e-12")
    return a.astype(complex) if np.iscomplexobj(a) else a.astype(float)


def pfaffian(a) -> float | complex:
    """Pf(A) for skew-symmetric A via Parlett-Reid tridiagonalization.

    Pf(A)^2 = det(A); the 2x2 value is a_{01} and the 4x4 expansion
    a01 a23 - a02 a13 + a03 a12 fix the sign convention.
    """
    a = _check_skew(a).copy()
    n = a.shape[0]
    if n == 0:
        return 1.0
    pf = 1.0
    for k in range(0, n - 2, 2):
        # pivot the largest |a[k+1:, k]| into row k+1
        col = np.abs(a[k + 1:, k])
        piv = int(np.argmax(col)) + k + 1
        if col.size and np.max(col) == 0.0:
            return 0.0 * pf
        if piv != k + 1:
            a[[k + 1, piv], :] = a[[piv, k + 1], :]
            a[:, [k + 1, piv]] = a[:, [piv, k + 1]]
            pf = -pf
        pivot = a[k + 1, k]
        pf = pf * (-pivot)  # Pf of the 2x2 block [[0, a_{k,k+1}],[-a_{k,k+1},0]]
        if k + 2 < n:
            tau = a[k + 2:, k] / pivot
            # eliminate column k below row k+1 (and symmetrically)
            a[k + 2:, :] -= np.outer(tau, a[k + 1, :])
            a[:, k + 2:] -= np.outer(a[:, k + 1], tau)
            # restore exact skew symmetry against rounding drift
            a[k + 2:, k] = 0.0
            a[k, k + 2:] = 0.0
    pf = pf * a[n - 2, n - 1]
    if not np.iscomplexobj(a):
        return float(pf)
    return complex(pf)


class PfaffianOperator:
    """Finite window of the exact finite-N kernel as a 2x2-block matrix source.

    Points are (time-label u, integer location x); blocks are assembled with
    the canonical (time, location) lexicographic order so Pfaffian signs are
    reproducible.
    """

    def __init__(self, ctx: KernelContext):
        self.ctx = ctx

    def block_matrix(self, points) -> np.ndarray:
        pts = sorted(points)
        k = len(pts)
        out = np.zeros((2 * k, 2 * k), dtype=complex)
        by_time: dict[int, list[int]] = {}
        for idx, (u, x) in enumerate(pts):
            by_time.setdefault(u, []).append(idx)
        # evaluate each component on the product grid per time pair
        for u, idx_u in by_time.items():
            for v, idx_v in by_time.items():
                xs = [pts[i][1] for i in idx_u]
                ys = [pts[j][1] for j in idx_v]
                k11 = kgeo_grid("11", u, xs, v, ys, self.ctx)
                k12 = kgeo_grid("12", u, xs, v, ys, self.ctx)
                k22 = kgeo_grid("22", u, xs, v, ys, self.ctx)
                for a, i in enumerate(idx_u):
                    for b, j in enumerate(idx_v):
                        out[2 * i, 2 * j] = k11[a, b]
                        out[2 * i, 2 * j + 1] = k12[a, b]
                        out[2 * j + 1, 2 * i] = -k12[a, b]
                        out[2 * i + 1, 2 * j + 1] = k22[a, b]
        return out


def correlation(points, op: PfaffianOperator, imag_tol: float = 1e-7) -> float:
    """k-point correlation rho(points) = Pf of the assembled 2k x 2k matrix."""
    pts = list(points)
    if len(set(pts)) < len(pts):
        return 0.0
    m = op.block_matrix(pts)
    m = 0.5 * (m - m.T)  # kill quadrature-level asymmetry
    val = pfaffian(m)
    if abs(complex(val).imag) > imag_tol * max(1.0, abs(val)):
        raise SkewSymmetryError(f"correlation has imaginary residue {val}")
    return float(complex(val).real)


class TailBoundError(RuntimeError):
    """The first-moment tail beyond the truncated window cannot be certified."""


def gap_probability(threshold: int, time_label: int, ctx: KernelContext,
                    tail_tol: float = 1e-8, max_window: int = 120) -> float:
    """P(no points in [threshold, +inf)) = P(lambda_1 <= threshold).

    The window [threshold, threshold+M] is grown until the first-moment bound
    on the neglected mass sum_{x > end} K12(x,x) — geometric with ratio
    r_w/r_z < 1 — drops below tail_tol; the gap probability over the finite
    window is Pf(J - K).
    """
    u = time_label
    rho_ratio = _diag_decay_ratio(ctx)
    end = threshold + 8
    while True:
        xs = np.arange(threshold, end + 1)
        diag = kgeo_grid("12", u, xs, u, xs, ctx).diagonal().real
        tail = abs(diag[-1]) * rho_ratio / (1.0 - rho_ratio)
        if tail < tail_tol:
            break
        end += 8
        if end - threshold > max_window:
            raise TailBoundError(
                f"window grew past {max_window} without certifying the tail "
                f"(last bound {tail:.2e})")
    op = PfaffianOperator(ctx)
    pts = [(u, int(x)) for x in xs]
    m = op.block_matrix(pts)
    m = 0.5 * (m - m.T)
    k = len(pts)
    jmat = np.zeros_like(m)
    for i in range(k):
        jmat[2 * i, 2 * i + 1] = 1.0
        jmat[2 * i + 1, 2 * i] = -1.0
    val = pfaffian(jmat - m)
    val = float(complex(val).real)
    return min(max(val, 0.0), 1.0)


def _diag_decay_ratio(ctx: KernelContext) -> float:
    """Geometric decay ratio r_w/r_z of the K12 diagonal used for tail bounds."""
    from .kernels import _kgeo_default_radii
    rz, rw = _kgeo_default_radii(ctx, "12", 1, 1)
    return rw / rz
