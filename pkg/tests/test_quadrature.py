"""Gauss-Legendre quadrature contracts."""

import pytest
from mpmath import mp, mpf

from svmaj.numerics import PrecisionConfig, RngStream
from svmaj.quadrature import gauss_legendre, integrate_adaptive, nodes_weights


def closed_form_kernel_integral(alpha, x, digits):
    """alpha * int_0^1 (t + (1-t)x)^(alpha-1) dt = (1 - x^alpha)/(1 - x)."""
    with mp.workdps(digits):
        a, xv = mpf(alpha), mpf(x)
        return (1 - xv ** a) / (1 - xv) / a


def test_constant_integrand(cfg60):
    assert abs(gauss_legendre(lambda t: mpf(1), 4, cfg60) - 1) <= cfg60.tol()


def test_linear_integrand_exact_at_two_nodes(cfg60):
    got = gauss_legendre(lambda t: t, 2, cfg60)
    with cfg60.workdps():
        assert abs(got - mpf(1) / 2) <= cfg60.tol()


@pytest.mark.parametrize("nodes", [2, 3, 5, 8])
def test_exact_on_low_degree_polynomials(cfg40, nodes):
    # exact for degree <= 2*nodes - 1
    with cfg40.workdps():
        for deg in range(2 * nodes):
            got = gauss_legendre(lambda t, d=deg: t ** d, nodes, cfg40)
            want = mpf(1) / (deg + 1)
            assert abs(got - want) <= cfg40.tol(), (nodes, deg)


def test_fractional_kernel_against_closed_form(cfg60):
    got = integrate_adaptive(lambda t: (t + (1 - t) * mpf("0.25")) ** mpf("1.5"), cfg60)
    want = closed_form_kernel_integral("2.5", "0.25", 80)
    with cfg60.workdps():
        assert abs(got - want) <= mpf(10) ** -50


def test_adaptive_matches_fixed_rule_refinement(cfg40, stream):
    with cfg40.workdps():
        for _ in range(5):
            x = stream.uniform(cfg40, 0.05, 0.9)
            a = stream.uniform(cfg40, 1.1, 3)
            f = lambda t: a * (t + (1 - t) * x) ** (a - 1)
            got = integrate_adaptive(f, cfg40)
            want = (1 - x ** a) / (1 - x)
            assert abs(got - want) <= cfg40.tol(abs(want))


def test_nodes_cached_and_sorted(cfg40):
    xs1, ws1 = nodes_weights(16, cfg40)
    xs2, _ = nodes_weights(16, cfg40)
    assert xs1 is xs2
    assert all(x1 < x2 for x1, x2 in zip(xs1, xs1[1:]))
    with cfg40.workdps():
        assert abs(mp.fsum(ws1) - 1) <= cfg40.tol()
