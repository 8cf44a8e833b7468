import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from halfspace_lpp.model import ModelParams
from halfspace_lpp.mc import profile_samples
from halfspace_lpp.schur import (GuardError, SchurWeightContext, enumerate_law,
                                 interlaces, process_weight, skew_schur, tau)


def test_interlaces_examples():
    assert interlaces((3, 2), (3,))
    assert not interlaces((3, 2), (1,))
    for lam in [(), (1,), (4, 2, 2), (5,)]:
        assert interlaces(lam, lam)


def test_skew_schur_single_step():
    assert skew_schur((2,), (1,), (0.7,)) == pytest.approx(0.7)
    assert skew_schur((2,), (1,), (0.7, 0.0)) == pytest.approx(0.7)


def test_skew_schur_two_vars_row():
    assert skew_schur((1,), (), (0.3, 0.4)) == pytest.approx(0.7)


def test_skew_schur_identity_chain():
    assert skew_schur((3, 1), (3, 1), (0.5, 0.2)) == pytest.approx(1.0)
    assert skew_schur((1, 1), (), (0.5,)) == 0.0  # no single horizontal strip


def jacobi_trudi(lam, xs):
    """Straight-shape Schur polynomial via the h-determinant (independent oracle)."""
    import itertools

    def h(k):
        if k < 0:
            return 0.0
        return sum(np.prod([x ** e for x, e in zip(xs, exp)])
                   for exp in itertools.product(range(k + 1), repeat=len(xs))
                   if sum(exp) == k)

    n = len(lam)
    mat = np.array([[h(lam[i] - (i + 1) + (j + 1)) for j in range(n)]
                    for i in range(n)])
    return float(np.linalg.det(mat)) if n else 1.0


@pytest.mark.parametrize("lam", [(2,), (1, 1), (2, 1), (3, 2), (2, 2, 1)])
def test_skew_schur_vs_jacobi_trudi(lam):
    xs = (0.31, 0.17, 0.52)
    assert skew_schur(lam, (), xs) == pytest.approx(jacobi_trudi(lam, xs), rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_skew_schur_monotone_in_variables(seed):
    rng = np.random.default_rng(seed)
    lam = tuple(sorted(rng.integers(0, 4, size=2), reverse=True))
    mu = tuple(v for v in (rng.integers(0, lam[0] + 1),) if v > 0)
    xs = rng.uniform(0.05, 0.9, size=2)
    base = skew_schur(lam, mu, tuple(xs))
    for i in range(2):
        bumped = xs.copy()
        bumped[i] += 0.05
        assert skew_schur(lam, mu, tuple(bumped)) >= base - 1e-12


def test_tau_examples():
    c = 0.37
    assert tau((3, 1), c) == pytest.approx(c ** 2)
    assert tau((), c) == 1.0
    assert tau((2, 2), 0.5) == pytest.approx(1.0)
    assert tau((), 0.0) == 1.0
    assert tau((1,), 0.0) == 0.0


def test_process_weight_n1_closed_form():
    ctx = SchurWeightContext([0.5], 0.5)
    for k in range(6):
        lam = (k,) if k else ()
        assert process_weight([lam], ctx) == pytest.approx(0.75 * 0.25 ** k)


def test_process_weight_noninterlacing_vanishes():
    ctx = SchurWeightContext([0.3, 0.3], 0.2)
    assert process_weight([(1,), (3,)], ctx) == 0.0
    assert process_weight([(2, 2), (1,)], ctx) == 0.0  # 2 >= 1 >= 2 fails
    assert process_weight([(3,), (1, 1)], ctx) == 0.0  # 0 >= 1 fails


def test_process_weight_trailing_zeros():
    ctx = SchurWeightContext([0.3, 0.3], 0.2)
    assert process_weight([(2, 1), (1,)], ctx) == process_weight(
        [(2, 1, 0), (1, 0, 0)], ctx)


def test_enumerate_law_n1_geometric():
    ctx = SchurWeightContext([0.5], 0.5)
    law, deficit = enumerate_law(ctx, 10)
    for k in range(11):
        lam = ((k,) if k else (),)
        assert law[lam] == pytest.approx(0.75 * 0.25 ** k, rel=1e-12)
    assert deficit == pytest.approx(0.25 ** 11, rel=1e-9)


def test_enumerate_law_cap_zero():
    law, _ = enumerate_law(SchurWeightContext([0.5], 0.5), 0)
    assert list(law) == [((),)]


def test_enumerate_law_mass_and_marginal():
    ctx = SchurWeightContext([0.3, 0.3], 0.2)
    law, deficit = enumerate_law(ctx, 30)
    assert deficit < 1e-6
    # marginal on lam^2 from the joint law equals direct resummation
    marg = {}
    for (l1, l2), p in law.items():
        marg[l2] = marg.get(l2, 0.0) + p
    assert marg[()] == pytest.approx(sum(p for (l1, l2), p in law.items()
                                         if l2 == ()), rel=0)
    assert sum(marg.values()) == pytest.approx(1.0, abs=1e-6)


def test_enumerate_law_guards():
    with pytest.raises(GuardError):
        enumerate_law(SchurWeightContext([0.3] * 4, 0.2), 5)
    with pytest.raises(GuardError):
        enumerate_law(SchurWeightContext([0.3], 0.2), 50)


def test_sampler_matches_exact_law_n2():
    # downsized version of the acceptance run: 20k samples, z < 4.5 guard
    n = 20_000
    params = ModelParams(q=0.3, N=2, c=0.2, seed=314)
    ctx = SchurWeightContext([0.3, 0.3], 0.2)
    law, _ = enumerate_law(ctx, 24)
    profs = profile_samples(params, n)
    from collections import Counter
    counts = Counter(tuple(tuple(l) for l in lams[1:][::-1]) for lams in profs)
    checked = 0
    for seq, p in law.items():
        e = n * p
        if e < 10:
            continue
        z = (counts.get(seq, 0) - e) / np.sqrt(e * (1 - p))
        checked += 1
        assert abs(z) < 4.5, (seq, p, counts.get(seq, 0), z)
    assert checked >= 10
