import math

import numpy as np
import pytest
from scipy import integrate

from logopole_core.coords import from_spheroidal, make_point
from logopole_core.errors import AxisSingularity, InvalidInput, NoConvergence
from logopole_core.harmonics import Focal, pssh, ssh_second_kind
from logopole_core.oracle import (
    Density,
    QuadResult,
    Radial,
    adaptive_gauss_kronrod,
    quad_line_multipole,
    quad_minus_m_angular,
    quad_negative_degree,
    quad_q_minus_m,
    quad_ssh_second_kind,
    quad_ssh_second_kind_limit,
)


def test_gauss_kronrod_smooth():
    res = adaptive_gauss_kronrod(np.sin, 0.0, math.pi)
    assert res.converged
    assert res.value == pytest.approx(2.0, rel=1e-13)
    flipped = adaptive_gauss_kronrod(np.sin, math.pi, 0.0)
    assert flipped.value == pytest.approx(-2.0, rel=1e-13)
    assert adaptive_gauss_kronrod(np.sin, 1.0, 1.0).value == 0.0


def test_gauss_kronrod_breakpoints():
    res = adaptive_gauss_kronrod(lambda x: np.abs(x - 1 / 3), 0.0, 1.0, breakpoints=[1 / 3])
    assert res.value == pytest.approx(5 / 18, rel=1e-14)
    assert res.subdivisions == 2


def test_gauss_kronrod_reports_failure():
    def spiky(x):
        return 1.0 / np.sqrt(np.abs(x - 0.3))

    with pytest.raises(NoConvergence) as info:
        adaptive_gauss_kronrod(spiky, 0.0, 1.0, tol=1e-14, max_subdivisions=3)
    assert isinstance(info.value.partial, QuadResult)
    assert not info.value.partial.converged

    res = adaptive_gauss_kronrod(
        spiky, 0.0, 1.0, tol=1e-14, max_subdivisions=3, raise_on_failure=False
    )
    assert not res.converged
    assert res.subdivisions == 3


def test_logopole_line_integrals():
    assert quad_line_multipole(Density.MONOMIAL, 0, 0, make_point(1.0, 0.0)).value == (
        pytest.approx(math.asinh(1.0), rel=1e-11)
    )
    # L_1 at (3, 0) is sqrt(10) - 3
    assert quad_line_multipole(Density.MONOMIAL, 1, 0, make_point(3.0, 0.0)).value == (
        pytest.approx(math.sqrt(10.0) - 3.0, rel=1e-11)
    )
    assert quad_line_multipole(Density.MONOMIAL, -1, 1, make_point(1.0, 0.5)).value == (
        pytest.approx(1 / math.sqrt(1.25), rel=1e-11)
    )


def test_line_integral_matches_scipy():
    p = make_point(0.4, 1.3)
    ours = quad_line_multipole(Density.MONOMIAL, 2, 1, p).value
    theirs, _ = integrate.quad(
        lambda v: v**3 * 0.4 / (0.4**2 + (1.3 - v) ** 2) ** 1.5, 0.0, 1.0, epsabs=1e-14, epsrel=1e-13
    )
    assert ours == pytest.approx(theirs, rel=1e-10)


def test_line_integral_rejects_segment_points():
    with pytest.raises(InvalidInput):
        quad_line_multipole(Density.MONOMIAL, 0, 0, make_point(0.0, 0.5))
    with pytest.raises(InvalidInput):
        quad_line_multipole(Density.MONOMIAL, -2, 1, make_point(1.0, 0.5))


@pytest.mark.parametrize("n, m", [(0, 0), (1, 0), (2, 0), (1, 1), (2, 1), (3, 2)])
def test_legendre_weighted_line_is_pssh(n, m):
    p = make_point(0.8, 1.7)
    quad = quad_line_multipole(Density.LEGENDRE_WEIGHTED, n, m, p)
    assert quad.value == pytest.approx(pssh(n, m, p).value.real, rel=1e-9, abs=1e-13)
    offset = quad_line_multipole(Density.LEGENDRE_WEIGHTED, n, m, p, focal=Focal.OFFSET)
    expected = pssh(n, m, p, Focal.OFFSET).value.real
    assert offset.value == pytest.approx(expected, rel=1e-9, abs=1e-13)


def test_legendre_weighted_reference_value():
    rho, z = from_spheroidal(2.0, 0.0)
    quad = quad_line_multipole(Density.LEGENDRE_WEIGHTED, 0, 0, make_point(rho, z))
    assert quad.value == pytest.approx(0.549306, abs=1e-6)


def test_negative_degree_line():
    assert quad_negative_degree(1, make_point(1.0, 0.0)).value == pytest.approx(
        math.log(2.0 / (1.0 + math.sqrt(2.0))), rel=1e-10
    )
    # on the axis the density 1/(2 (2 - v)) integrates to ln(2) / 2
    assert quad_negative_degree(1, make_point(0.0, 2.0)).value == pytest.approx(
        0.5 * math.log(2.0), rel=1e-10
    )
    with pytest.raises(InvalidInput):
        quad_negative_degree(0, make_point(1.0, 0.0))


def test_second_kind_interior():
    p = make_point(1.0, 0.3)
    assert quad_ssh_second_kind(0, 0, p).value == pytest.approx(math.asinh(0.3), rel=1e-9)
    for n, m in [(1, 0), (2, 0), (1, 1), (2, 1), (3, 2)]:
        quad = quad_ssh_second_kind(n, m, p, Radial.INTERIOR)
        assert quad.value == pytest.approx(ssh_second_kind(n, m, p).value.real, rel=1e-7, abs=1e-11)


def test_second_kind_exterior():
    p = make_point(1.0, 2.0)
    expected = math.asinh(2.0) / math.sqrt(5.0)
    assert quad_ssh_second_kind(0, 0, p, Radial.EXTERIOR).value == pytest.approx(expected, rel=1e-9)
    with pytest.raises(InvalidInput):
        quad_ssh_second_kind(0, 1, p, Radial.EXTERIOR)
    with pytest.raises(AxisSingularity):
        quad_ssh_second_kind(0, 0, make_point(0.0, 2.0))


def test_second_kind_limit_approaches_value():
    p = make_point(1.0, 0.3)
    reference = math.asinh(0.3)
    values = quad_ssh_second_kind_limit(0, 0, p, Radial.INTERIOR)
    errors = [abs(res.value - reference) for _, res in values]
    assert [mu for mu, _ in values] == [10.0, 20.0, 40.0]
    assert errors[0] > errors[1] > errors[2]
    assert errors[2] < 0.01


def test_q_minus_m_angular():
    assert quad_q_minus_m(1, math.pi / 3).value == pytest.approx(0.57735, abs=1e-5)
    assert quad_q_minus_m(1, math.pi / 2).value == pytest.approx(0.0, abs=1e-14)
    x = math.cos(math.pi / 4)
    assert quad_q_minus_m(2, math.pi / 4).value == pytest.approx((3 * x - x**3) / (1 - x * x))
    with pytest.raises(InvalidInput):
        quad_q_minus_m(1, 0.0)


def test_minus_m_angular():
    assert quad_minus_m_angular(0, make_point(1.0, 0.0)).value == pytest.approx(math.asinh(1.0))
    assert quad_minus_m_angular(1, make_point(1.0, 0.5)).value == pytest.approx(
        1 / math.sqrt(1.25), rel=1e-11
    )
    with pytest.raises(AxisSingularity):
        quad_minus_m_angular(1, make_point(0.0, 2.0))
