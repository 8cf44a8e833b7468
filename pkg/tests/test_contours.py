import json

import numpy as np
import pytest

from halfspace_lpp.contours import (Arc, Contour, ContourError, Line,
                                    NestingError, QuadratureSpec, circle,
                                    integrate, keyhole, prelimit_contours,
                                    prelimit_radii, ray, winding_number)
from halfspace_lpp.scaling import scaling_constants


def test_circle_residue():
    val, err = integrate(lambda z: 1.0 / z, circle(1.0))
    assert abs(val - 2j * np.pi) < 1e-12


def test_circle_analytic_integrand_vanishes():
    val, _ = integrate(lambda z: z, circle(2.0))
    assert abs(val) < 1e-12


def test_circle_pole_outside():
    val, _ = integrate(lambda z: 1.0 / (z - 3.0), circle(1.0))
    assert abs(val) < 1e-12


def test_segment_exponential():
    val, _ = integrate(np.exp, Contour([Line(0.0, 1.0)]))
    assert abs(val - (np.e - 1.0)) < 1e-12


def test_contour_join_enforced():
    with pytest.raises(ContourError):
        Contour([Line(0.0, 1.0), Line(2.0, 3.0)])
    with pytest.raises(ContourError):
        Contour([Line(0.0, 1.0)], closed=True)


def test_arc_radius_positive():
    with pytest.raises(ContourError):
        Arc(0.0, 0.0, 0.0, 1.0)


def test_keyhole_windings():
    kh_out = keyhole(1.2, np.pi / 3, 3.0, -0.5)
    kh_in = keyhole(1.2, np.pi / 3, 3.0, +0.5)
    assert winding_number(kh_out, 1.2) == 0
    assert winding_number(kh_in, 1.2) == 1
    assert winding_number(kh_out, 0.0) == 1
    assert winding_number(kh_in, 0.0) == 1


def test_keyhole_center_outside_circle():
    # the gamma_N geometry: center beyond the outer radius, backward rays
    zc, N = 1.25, 50
    R = np.sqrt(zc ** 2 + N ** (-1 / 6) - zc * N ** (-1 / 12))
    g = keyhole(zc, 2 * np.pi / 3, R, -N ** (-1 / 3))
    assert winding_number(g, 0.0) == 1
    assert winding_number(g, zc) == 0
    assert winding_number(g, 0.9) == 1


def test_keyhole_rejects_bad_parameters():
    with pytest.raises(ContourError):
        keyhole(-1.0, np.pi / 3, 3.0, 0.1)
    with pytest.raises(ContourError):
        keyhole(1.0, 4.0, 3.0, 0.1)  # theta outside (0, pi)
    with pytest.raises(ContourError):
        keyhole(1.0, np.pi / 3, 3.0, 5.0)  # inner radius beyond the circle


def test_ray_cubic_decay_stabilizes():
    spec = QuadratureSpec(tol=1e-12)
    v8, _ = integrate(lambda z: np.exp(z ** 3 / 3.0),
                      ray(0.0, np.pi / 3, 0.0, 8.0, grade_scale=1.0), spec)
    v10, _ = integrate(lambda z: np.exp(z ** 3 / 3.0),
                       ray(0.0, np.pi / 3, 0.0, 10.0, grade_scale=1.0), spec)
    assert abs(v8 - v10) / abs(v10) < 1e-10


def test_ray_passes_through_anchor_when_r_zero():
    r = ray(0.7 + 0.1j, np.pi / 2, 0.0, 3.0)
    assert min(abs(seg.start - (0.7 + 0.1j)) for seg in r.segments) < 1e-14


def test_ray_orientation_flip_changes_winding():
    def closed_winding(rr):
        first = rr.segments[0].start
        last = rr.segments[-1].end
        return winding_number(Contour(rr.segments + [Line(last, first)],
                                      closed=True), 0.0)

    assert closed_winding(ray(0.0, 2 * np.pi / 3, +0.3, 5.0)) == 1
    assert closed_winding(ray(0.0, 2 * np.pi / 3, -0.3, 5.0)) == 0


def test_cauchy_deformation_keyhole():
    # same analytic function over two admissible keyholes around the same poles
    f = lambda z: np.exp(z) / (z - 0.3)
    spec = QuadratureSpec(tol=1e-12)
    v1, _ = integrate(f, keyhole(1.25, np.pi / 3, 3.0, -0.2), spec)
    v2, _ = integrate(f, keyhole(1.25, 0.45 * np.pi, 2.5, -0.35), spec)
    assert abs(v1 - v2) < 1e-9


def test_integrate_reports_error_estimate():
    val, err = integrate(lambda z: 1.0 / z, circle(1.0),
                         QuadratureSpec(nodes_per_segment=8, tol=1e-10))
    assert err < 1e-10


def test_crosses_negative_axis():
    assert circle(1.0).crosses_negative_axis()
    assert not Contour([Line(1.0, 2.0 + 1.0j)]).crosses_negative_axis()
    assert Contour([Line(-1.0 - 1.0j, -1.0 + 1.0j)]).crosses_negative_axis()


def test_contour_serialization_roundtrip():
    kh = keyhole(1.2, np.pi / 3, 3.0, -0.5)
    doc = json.loads(json.dumps(kh.to_json()))
    assert doc["closed"] is True
    assert len(doc["segments"]) == 4
    kinds = [s["kind"] for s in doc["segments"]]
    assert kinds == ["line", "arc", "line", "arc"]


# --- prelimit contour triple ------------------------------------------------

def test_prelimit_radii_subcritical():
    assert prelimit_radii("subcritical", (), 0.0, 1.0) == (0.0, -1.0, False)
    assert prelimit_radii("subcritical", (-0.4, 0.8), 0.0, 1.0)[:2] == (-0.8, -1.2)


def test_prelimit_radii_critical_spiked():
    r1, r2, j0 = prelimit_radii("critical", (0.9,), 0.3, 1.0)
    assert r1 == pytest.approx(-0.2 + 0.3)
    assert r2 == pytest.approx(-0.1 + 0.6)
    assert not j0


def test_prelimit_radii_critical_j0_flagged():
    sigma = 1.1
    r1, r2, j0 = prelimit_radii("critical", (), 0.5, sigma)
    assert j0
    assert -0.5 / sigma < r2 < r1


def test_prelimit_contours_nesting_all_modes():
    consts = scaling_constants(0.5, 0.25)
    for mode, kw in [("subcritical", dict(c=0.5)),
                     ("critical", dict(varpi=0.5)),
                     ("critical", dict(varpi=-0.5))]:
        G, g, gt = prelimit_contours(consts, 1000, mode, **kw)
        assert G.metadata["mode"] == mode
        assert g.closed and G.closed and gt.closed


def test_prelimit_contours_spike_pole_checks():
    consts = scaling_constants(0.5, 0.25)
    G, g, gt = prelimit_contours(consts, 1000, "subcritical",
                                 spikes_alpha=(1.0,), c=0.5)
    pole = consts.z_c + 1.0 * 1000 ** (-1 / 3) / consts.sigma
    assert winding_number(G, pole) == 0
    assert winding_number(g, 1.0 / pole) == 1


def test_prelimit_contours_too_small_N():
    consts = scaling_constants(0.5, 0.25)
    with pytest.raises((NestingError, ContourError)):
        prelimit_contours(consts, 4, "subcritical", c=0.5)


def test_prelimit_contours_c_inside_gamma():
    consts = scaling_constants(0.5, 0.25)
    for varpi in (-0.5, 0.0, 0.5):
        _, g, _ = prelimit_contours(consts, 500, "critical", varpi=varpi)
        c_eff = consts.z_c - varpi * 500 ** (-1 / 3) / consts.sigma
        assert winding_number(g, c_eff) == 1
