import numpy as np
import pytest

from halfspace_lpp.scaling import (DomainError, SGFunctions, SpikeFactor,
                                   complex_step_derivative, scaling_constants)

GRID = [(q, k) for q in (0.3, 0.5, 0.7) for k in (0.2, 0.5, 0.8)]


def test_edge_values():
    c = scaling_constants(0.5, 1.0)
    assert c.z_c == pytest.approx(1.0)
    assert c.h == pytest.approx(2.0)
    for q in (0.2, 0.5, 0.9):
        assert scaling_constants(q, 1.0).z_c == pytest.approx(1.0)


def test_domain_errors():
    with pytest.raises(DomainError):
        scaling_constants(0.0, 0.5)
    with pytest.raises(DomainError):
        scaling_constants(0.5, 0.0)
    with pytest.raises(DomainError):
        scaling_constants(1.2, 0.5)


@pytest.mark.parametrize("q,k", GRID)
def test_zc_window_and_positivity(q, k):
    c = scaling_constants(q, k)
    assert 1.0 < c.z_c < 1.0 / q
    assert c.f > 0 and c.sigma > 0 and c.h > 0 and c.p > 0


@pytest.mark.parametrize("q,k", GRID)
def test_p_is_dh_dkappa(q, k):
    eps = 1e-6
    hp = scaling_constants(q, k + eps).h
    hm = scaling_constants(q, k - eps).h
    c = scaling_constants(q, k)
    assert (hp - hm) / (2 * eps) == pytest.approx(c.p, rel=1e-6)


@pytest.mark.parametrize("q,k", GRID)
def test_critical_point_identities(q, k):
    # S'(z_c) = S''(z_c) = G'(z_c) = 0; S'''(z_c) = 2 sigma^3; G''(z_c) = 2 f sigma^2
    c = scaling_constants(q, k)
    sg = SGFunctions(c)
    assert abs(complex_step_derivative(sg.S, c.z_c)) < 1e-8
    assert abs(complex_step_derivative(sg.G, c.z_c)) < 1e-8
    assert abs(sg.derivative_at_zc("S", 1)) < 1e-8
    assert abs(sg.derivative_at_zc("S", 2)) < 1e-8
    assert abs(sg.derivative_at_zc("G", 1)) < 1e-8
    s3 = sg.derivative_at_zc("S", 3)
    g2 = sg.derivative_at_zc("G", 2)
    assert s3.real == pytest.approx(2.0 * c.sigma ** 3, rel=1e-6)
    assert g2.real == pytest.approx(2.0 * c.f * c.sigma ** 2, rel=1e-6)


def test_ensemble_consistency_identity():
    # sigma^2 z_c^2 = p (1+p) / (2 f): ties the kernel lattice to the
    # [p(1+p)]^{-1/2} ensemble rescaling
    for q, k in GRID:
        c = scaling_constants(q, k)
        assert c.sigma ** 2 * c.z_c ** 2 == pytest.approx(
            c.p * (1 + c.p) / (2 * c.f), rel=1e-12)


def test_sbar_gbar_vanish_at_zc():
    c = scaling_constants(0.4, 0.3)
    sg = SGFunctions(c)
    assert abs(sg.Sbar(c.z_c)) == 0.0
    assert abs(sg.Gbar(c.z_c)) == 0.0


def test_singularity_guard():
    sg = SGFunctions(scaling_constants(0.5, 0.5))
    with pytest.raises(DomainError):
        sg.S(0.5)  # z = q
    with pytest.raises(DomainError):
        sg.S(2.0)  # z = 1/q
    with pytest.raises(DomainError):
        sg.G(1e-15)


def test_real_parts_branch_free():
    # S_real matches Re S off the cut and stays finite on the negative axis
    sg = SGFunctions(scaling_constants(0.5, 0.25))
    z = 1.1 + 0.4j
    assert sg.S_real(z) == pytest.approx(sg.S(z).real, rel=1e-14)
    assert np.isfinite(sg.S_real(-1.3 + 0.0j))
    assert np.isfinite(sg.G_real(-1.3 + 0.0j))


def test_spike_factor_trivial_and_poles():
    w0 = SpikeFactor([], 0.5)
    assert w0.trivial
    assert np.all(w0(np.array([1.2 + 0.1j, 2.0])) == 1.0)
    w = SpikeFactor([0.8], 0.5)
    z = 1.3 + 0.2j
    expected = (1 - 0.8 / z) * (1 - 0.5 * z) / ((1 - 0.5 / z) * (1 - 0.8 * z))
    assert w(z) == pytest.approx(expected, rel=1e-14)
