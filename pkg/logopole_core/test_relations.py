import logging

import pytest

from logopole_core.coords import make_point
from logopole_core.errors import (
    FocalSegmentSingularity,
    NonConvergence,
    SlowConvergence,
    UnsupportedIndex,
)
from logopole_core.harmonics import Focal, pssh, pssh_negative_order
from logopole_core.legendre import legendre_p
from logopole_core.logopoles import LogopoleSpec, logopole
from logopole_core.relations import (
    BetaRoute,
    CoeffFamily,
    DerivativeOperator,
    beta_coefficients,
    beta_series_value,
    centred_pssh_from_logopoles,
    legendre_shifted_power_expansion,
    logopole_from_offset_pssh,
    logopole_offset_pssh_coefficients,
    pssh_derivative_series,
    pssh_offset_coefficients,
    pssh_offset_from_logopoles,
)

POINTS = [(1.0, 0.5), (0.5, -0.8), (1.5, 2.0), (0.6, 0.8)]


def test_offset_coefficients_low_degree():
    assert pssh_offset_coefficients(0, 0).values == (0.5,)
    # Q_1 P_1 = L_1 - L_0 / 2
    assert pssh_offset_coefficients(1, 0).as_dict() == {0: -0.5, 1: 1.0}
    coeffs = logopole_offset_pssh_coefficients(1)
    assert coeffs.family is CoeffFamily.LOGOPOLE_FROM_PSSH
    assert coeffs.values == (1.0, 1.0)
    assert len(logopole_offset_pssh_coefficients(4)) == 5
    with pytest.raises(UnsupportedIndex):
        pssh_offset_coefficients(1, 2)
    with pytest.raises(UnsupportedIndex):
        logopole_offset_pssh_coefficients(-1)


@pytest.mark.parametrize("rho, z", POINTS)
def test_offset_pssh_from_logopoles(rho, z):
    p = make_point(rho, z)
    for n in range(5):
        for m in range(n + 1):
            summed = pssh_offset_from_logopoles(n, m, p).value.real
            direct = pssh(n, m, p, Focal.OFFSET).value.real
            assert summed == pytest.approx(direct, rel=1e-7, abs=1e-12), (n, m)


def test_offset_pssh_from_logopoles_keeps_phase():
    p = make_point(1.0, 0.5, phi=0.6)
    summed = pssh_offset_from_logopoles(2, 1, p).value
    assert summed == pytest.approx(pssh(2, 1, p, Focal.OFFSET).value, rel=1e-9)


@pytest.mark.parametrize("rho, z", POINTS)
def test_logopole_from_offset_pssh(rho, z):
    p = make_point(rho, z)
    for n in range(7):
        expected = logopole(LogopoleSpec(n, 0), p).value.real
        assert logopole_from_offset_pssh(n, p).value.real == pytest.approx(expected, rel=1e-10)


@pytest.mark.parametrize("v", [-0.95, -0.4, 0.0, 0.3, 0.9])
def test_shifted_power_expansion(v):
    for n in range(6):
        for m in range(n + 1):
            expected = (1 - v * v) ** (m / 2) * legendre_p(n, m, v)
            value = legendre_shifted_power_expansion(n, m, v)
            assert value == pytest.approx(expected, rel=1e-12, abs=1e-14), (n, m)


# --- beta coefficients --------------------------------------------------------------------


def test_beta_reference_values():
    assert beta_coefficients(0, 0, 0).values[0] == pytest.approx(2.0)
    closed = beta_coefficients(0, 1, 3, BetaRoute.CLOSED_M1).as_dict()
    assert closed[1] == pytest.approx(-3.0)
    assert beta_coefficients(1, 1, 1, BetaRoute.CLOSED_M1).as_dict()[1] == pytest.approx(-2.0)
    minus = beta_coefficients(-1, 1, 4, BetaRoute.MINUS_M_CONJECTURE).as_dict()
    assert minus[1] == pytest.approx(-6.0)
    assert minus[2] == 0.0
    assert beta_coefficients(-2, 2, 3, BetaRoute.MINUS_M_CONJECTURE).as_dict()[2] == (
        pytest.approx(5.0)
    )


@pytest.mark.parametrize("n", range(4))
def test_closed_m1_matches_projection(n):
    closed = beta_coefficients(n, 1, 15, BetaRoute.CLOSED_M1)
    projected = beta_coefficients(n, 1, 15)
    assert closed.indices == projected.indices
    assert closed.values == pytest.approx(projected.values, rel=1e-10, abs=1e-12)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_minus_m_matches_projection(m):
    formula = beta_coefficients(-m, m, 14, BetaRoute.MINUS_M_CONJECTURE)
    projected = beta_coefficients(-m, m, 14)
    assert formula.values == pytest.approx(projected.values, rel=1e-10, abs=1e-12)


@pytest.mark.parametrize("n, m", [(0, 0), (2, 0), (2, 1), (1, 2), (3, 3)])
def test_naive_sum_matches_projection_at_low_order(n, m):
    naive = beta_coefficients(n, m, 10, BetaRoute.NAIVE_SUM)
    projected = beta_coefficients(n, m, 10)
    assert not any(naive.unstable)
    # vanishing entries come out as rounding noise of the alternating sum
    floor = 1e-8 * max(abs(value) for value in projected.values)
    assert naive.values == pytest.approx(projected.values, rel=1e-8, abs=floor)


def test_beta_terminates_for_order_zero():
    coeffs = beta_coefficients(2, 0, 8)
    for q, value in coeffs.as_dict().items():
        if q > 2:
            assert value == pytest.approx(0.0, abs=1e-13)


def test_naive_sum_flags_large_degrees(caplog):
    with caplog.at_level(logging.WARNING, logger="logopole_core.relations"):
        coeffs = beta_coefficients(1, 0, 25, BetaRoute.NAIVE_SUM)
    assert coeffs.unstable[-1]
    assert not coeffs.unstable[20]
    assert sum(coeffs.unstable) == 5
    assert "lose precision" in caplog.text


@pytest.mark.parametrize(
    "args",
    [
        (0, 2, 5, BetaRoute.CLOSED_M1),
        (-1, 1, 5, BetaRoute.CLOSED_M1),
        (0, 1, 5, BetaRoute.MINUS_M_CONJECTURE),
        (1, 2, 1, BetaRoute.QUADRATURE_PROJECTION),
        (-3, 1, 5, BetaRoute.QUADRATURE_PROJECTION),
    ],
)
def test_beta_rejects_bad_indices(args):
    with pytest.raises(UnsupportedIndex):
        beta_coefficients(*args)


def test_beta_series_needs_enough_terms():
    p = make_point(1.0, 0.5)
    value, err, terms = beta_series_value(1, 0, p)
    assert value == pytest.approx(logopole(LogopoleSpec(1, 0), p).value.real, rel=1e-12)
    assert terms > 2
    with pytest.raises(NonConvergence):
        beta_series_value(2, 0, p, p_cap=3)


# --- centred PSSHs ------------------------------------------------------------------------


@pytest.mark.parametrize("rho, z", [(1.0, 0.8), (0.4, -0.3), (2.0, 1.5)])
def test_centred_pssh_from_logopoles(rho, z):
    p = make_point(rho, z)
    for n in range(5):
        for m in range(n + 1):
            summed = centred_pssh_from_logopoles(n, m, p).value.real
            direct = pssh_negative_order(n, m, p).value.real
            assert summed == pytest.approx(direct, rel=1e-8, abs=1e-12), (n, m)


def test_centred_pssh_errors():
    with pytest.raises(UnsupportedIndex):
        centred_pssh_from_logopoles(1, 2, make_point(1.0, 0.8))
    with pytest.raises(FocalSegmentSingularity):
        centred_pssh_from_logopoles(0, 0, make_point(0.0, 0.2))


# --- derivative series --------------------------------------------------------------------

H = 1e-5


def _centred(n, m, rho, z):
    return pssh_negative_order(n, m, make_point(rho, z)).value.real


@pytest.mark.parametrize("rho, z", [(0.8, 1.7), (1.2, -0.4), (0.5, 0.3)])
def test_dz_series_matches_finite_difference(rho, z):
    for n in range(4):
        for m in range(min(n, 2) + 1):
            fd = (_centred(n, m, rho, z + H) - _centred(n, m, rho, z - H)) / (2 * H)
            series = pssh_derivative_series(n, m, make_point(rho, z), DerivativeOperator.DZ)
            assert series.value.real == pytest.approx(fd, rel=1e-6, abs=1e-9), (n, m)


@pytest.mark.parametrize("rho, z", [(0.8, 1.7), (1.2, -0.4), (0.5, 0.3)])
def test_rdr_series_matches_finite_difference(rho, z):
    for n in range(4):
        for m in range(min(n, 2) + 1):
            up = _centred(n, m, rho * (1 + H), z * (1 + H))
            down = _centred(n, m, rho * (1 - H), z * (1 - H))
            series = pssh_derivative_series(n, m, make_point(rho, z), DerivativeOperator.RDR)
            assert series.value.real == pytest.approx((up - down) / (2 * H), rel=1e-6, abs=1e-9)


@pytest.mark.parametrize("rho, z", [(0.8, 1.7), (1.2, -0.4)])
def test_dplus_series_at_order_zero(rho, z):
    # d_+ of an axisymmetric field is e^{i phi} d/drho
    for n in range(4):
        fd = (_centred(n, 0, rho + H, z) - _centred(n, 0, rho - H, z)) / (2 * H)
        series = pssh_derivative_series(n, 0, make_point(rho, z), DerivativeOperator.DPLUS)
        assert series.value.real == pytest.approx(fd, rel=1e-6, abs=1e-9), n


def test_derivative_series_on_the_axis():
    # d/dz Q_0(z) = -1 / (z^2 - 1)
    p = make_point(0.0, 3.0)
    series = pssh_derivative_series(0, 0, p, DerivativeOperator.DZ)
    assert series.value.real == pytest.approx(-1.0 / 8.0, rel=1e-10)
    radial = pssh_derivative_series(0, 0, p, DerivativeOperator.RDR)
    assert radial.value.real == pytest.approx(-3.0 / 8.0, rel=1e-10)


def test_derivative_series_convergence_guard():
    p = make_point(0.5, 0.3)
    with pytest.raises(SlowConvergence):
        pssh_derivative_series(0, 0, p, DerivativeOperator.DZ, k_max=1)
    with pytest.raises(UnsupportedIndex):
        pssh_derivative_series(2, 0, p, DerivativeOperator.DZ, k_max=2)
    with pytest.raises(FocalSegmentSingularity):
        pssh_derivative_series(0, 0, make_point(0.0, 0.5))
