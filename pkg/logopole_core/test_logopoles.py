import cmath
import math

import pytest

from logopole_core.coords import Frame, make_point
from logopole_core.errors import (
    AxisSingularity,
    DivergentRegion,
    DomainError,
    RegionViolation,
    SingularRegion,
    UnsupportedIndex,
)
from logopole_core.harmonics import ssh_second_kind
from logopole_core.legendre import binomial
from logopole_core.logopoles import (
    Direction,
    LogopoleFamily,
    LogopoleSpec,
    Method,
    MethodPolicy,
    MinusMMode,
    RecurrenceVariant,
    logopole,
    logopole_axis,
    logopole_axis_closed,
    logopole_closed_low_order,
    logopole_from_beta,
    logopole_minus_m,
    logopole_negative_degree,
    logopole_negative_order,
    logopole_offset_series,
    logopole_raise_order,
    logopole_recurrence_m,
    logopole_recurrence_n,
    logopole_separated,
    logopole_sequence,
    logopole_series_multipole,
    logopole_sum_second_kind,
    select_route,
)
from logopole_core.oracle import Density, quad_line_multipole, quad_negative_degree

MID = (1.0, 0.5)
INSIDE = (0.3, 0.4)
FAR = (1.5, 2.0)
POINTS = [MID, INSIDE, FAR, (1.5, 0.7), (0.6, 0.8), (0.5, -0.8), (0.2, 1.5), (2.0, 0.0)]


def _quad(n, m, rho, z):
    return quad_line_multipole(Density.MONOMIAL, n, m, make_point(rho, z), tol=1e-13).value


def _value(n, m, p, policy=None):
    return logopole(LogopoleSpec(n, m), p, policy).value.real


# --- reference values ---------------------------------------------------------------------


@pytest.mark.parametrize(
    "n, m, expected",
    [
        (-1, 1, 0.894427),
        (0, 1, 0.447214),
        (1, 1, 0.291604),
        (-2, 2, 2.504396),
        (0, 2, 0.804984),
        (1, 2, 0.581378),
    ],
)
def test_reference_values_beside_the_segment(n, m, expected):
    assert _value(n, m, make_point(*MID)) == pytest.approx(expected, abs=1e-6)


def test_base_logopole():
    p = make_point(1.0, 0.0)
    assert _value(0, 0, p) == pytest.approx(math.asinh(1.0), rel=1e-13)
    assert _value(-1, 0, p) == pytest.approx(math.log(2.0 / (1.0 + math.sqrt(2.0))), rel=1e-12)
    assert _value(1, 0, make_point(3.0, 0.0)) == pytest.approx(math.sqrt(10.0) - 3.0, rel=1e-12)


# --- every route against the line-source quadrature ---------------------------------------


@pytest.mark.parametrize("rho, z", POINTS)
def test_auto_policy_matches_quadrature(rho, z):
    p = make_point(rho, z)
    for m in range(4):
        for n in range(-m, 7):
            expected = _quad(n, m, rho, z)
            assert _value(n, m, p) == pytest.approx(expected, rel=1e-8, abs=1e-13), (n, m)


@pytest.mark.parametrize(
    "rho, z",
    [MID, (1.5, 0.7), (0.5, -0.8), (0.2, 1.5), (0.05, 0.3), (2.0, 0.0), (0.3, 0.2), (0.5, 1.8)],
)
def test_closed_forms(rho, z):
    p = make_point(rho, z)
    for n, m in [(0, 0), (1, 0), (-1, 1), (0, 1), (1, 1), (-2, 2), (0, 2), (1, 2)]:
        closed = logopole_closed_low_order(LogopoleSpec(n, m), p)
        assert closed.method == Method.CLOSED_FORM.value
        assert closed.value.real == pytest.approx(_quad(n, m, rho, z), rel=1e-9), (n, m)


def test_quadrupole_closed_forms_exact():
    root2 = math.sqrt(2.0)
    for point, (l02, l12) in [
        ((2.0, 0.0), (5.0**-1.5, 0.0645203)),
        ((1.0, 1.0), (2.0 * root2 - 2.0, 4.0 * root2 - 5.0)),
    ]:
        p = make_point(*point)
        assert logopole_closed_low_order(LogopoleSpec(0, 2), p).value.real == pytest.approx(
            l02, rel=1e-6
        )
        assert logopole_closed_low_order(LogopoleSpec(1, 2), p).value.real == pytest.approx(
            l12, rel=1e-6
        )


def test_closed_form_table_is_limited():
    with pytest.raises(UnsupportedIndex):
        logopole_closed_low_order(LogopoleSpec(2, 2), make_point(*MID))


@pytest.mark.parametrize("rho, z", [MID, (0.6, 0.8), (1.2, 0.3)])
def test_second_kind_sum(rho, z):
    p = make_point(rho, z)
    for m in range(4):
        for n in range(-m, 5):
            value = logopole_sum_second_kind(LogopoleSpec(n, m), p).value.real
            assert value == pytest.approx(_quad(n, m, rho, z), rel=1e-8, abs=1e-13), (n, m)


def test_second_kind_sum_off_axis_only():
    with pytest.raises(AxisSingularity):
        logopole_sum_second_kind(LogopoleSpec(1, 0), make_point(0.0, 2.0))


@pytest.mark.parametrize("rho, z", [FAR, (0.1, 3.0), (2.0, 0.0), (0.5, 1.3)])
def test_multipole_series(rho, z):
    p = make_point(rho, z)
    for m in range(3):
        for n in range(-m, 5):
            value = logopole_series_multipole(LogopoleSpec(n, m), p)
            assert value.value.real == pytest.approx(_quad(n, m, rho, z), rel=1e-10), (n, m)
            assert value.terms_used > 1


@pytest.mark.parametrize("rho, z", [(0.5, -0.8), (0.0, -2.0), FAR])
def test_offset_series(rho, z):
    p = make_point(rho, z)
    for m in range(3):
        for n in range(-m, 5):
            value = logopole_offset_series(LogopoleSpec(n, m), p).value.real
            assert value == pytest.approx(_quad(n, m, rho, z), rel=1e-10), (n, m)


def test_dipole_series_value():
    # L_{-1}^1 at (2R, 0)
    p = make_point(2.0, 0.0)
    for series in (logopole_series_multipole, logopole_offset_series):
        assert series(LogopoleSpec(-1, 1), p).value.real == pytest.approx(1.0 / math.sqrt(20.0))


@pytest.mark.parametrize("rho, z", [(2.0, 0.0), (1.0, -1.5), (1.5, 2.0)])
def test_series_higher_orders(rho, z):
    p = make_point(rho, z)
    for m in range(1, 5):
        for n in range(-m, 4):
            spec = LogopoleSpec(n, m)
            expected = logopole_minus_m(m, p).value.real if n == -m else _quad(n, m, rho, z)
            if (n, m) in [(0, 1), (1, 1), (0, 2), (1, 2)]:
                expected = logopole_closed_low_order(spec, p).value.real
            assert logopole_series_multipole(spec, p).value.real == pytest.approx(
                expected, rel=1e-9, abs=1e-13
            ), (n, m)
            assert logopole_offset_series(spec, p).value.real == pytest.approx(
                expected, rel=1e-9, abs=1e-13
            ), (n, m)


@pytest.mark.parametrize("m", [2, 3, 4])
def test_boundary_band_below_the_segment(m):
    p = make_point(0.5467, -0.7866)
    for n in range(-m + 1, 9):
        res = logopole(LogopoleSpec(n, m), p)
        assert res.value.real == pytest.approx(_quad(n, m, 0.5467, -0.7866), rel=1e-8), n


def test_series_refuse_divergent_region():
    with pytest.raises(DivergentRegion):
        logopole_series_multipole(LogopoleSpec(0, 0), make_point(*INSIDE))
    with pytest.raises(DivergentRegion):
        logopole_offset_series(LogopoleSpec(0, 0), make_point(0.3, 0.8))


@pytest.mark.parametrize("rho, z", [(1.5, 0.7), INSIDE])
def test_separated_form(rho, z):
    p = make_point(rho, z)
    for n in range(5):
        for m in range(n + 1):
            value = logopole_separated(n, m, p).value.real
            assert value == pytest.approx(_quad(n, m, rho, z), rel=1e-8, abs=1e-13), (n, m)


# --- L_{-m}^m -----------------------------------------------------------------------------


@pytest.mark.parametrize("m", range(1, 11))
def test_minus_m_stable_matches_naive(m):
    p = make_point(*MID)
    stable = logopole_minus_m(m, p, MinusMMode.STABLE).value.real
    naive = logopole_minus_m(m, p, MinusMMode.NAIVE).value.real
    recurrence = logopole_minus_m(m, p, MinusMMode.RECURRENCE_M).value.real
    assert stable == pytest.approx(naive, rel=1e-10)
    assert recurrence == pytest.approx(naive, rel=1e-10)


@pytest.mark.parametrize("rho, z", [MID, (0.5, -0.8), (0.3, 2.5), (2.0, 0.0)])
def test_minus_m_angular(rho, z):
    p = make_point(rho, z)
    for m in range(5):
        angular = logopole_minus_m(m, p, MinusMMode.ANGULAR)
        stable = logopole_minus_m(m, p, MinusMMode.STABLE)
        assert angular.method == Method.ANGULAR_MINUS_M.value
        assert stable.value.real == pytest.approx(angular.value.real, rel=1e-9)


def test_minus_m_recurrence_region():
    with pytest.raises(RegionViolation):
        logopole_minus_m(2, make_point(0.3, 2.5), MinusMMode.RECURRENCE_M)
    forced = logopole_minus_m(1, make_point(0.3, 2.5), MinusMMode.RECURRENCE_M, allow_unstable=True)
    assert forced.value.real == pytest.approx(
        logopole_minus_m(1, make_point(0.3, 2.5)).value.real, rel=1e-9
    )


# --- degree recurrence --------------------------------------------------------------------


@pytest.mark.parametrize("m", range(4))
def test_forward_recurrence_inside(m):
    p = make_point(*INSIDE)
    values = logopole_recurrence_n(m, 8, p, Direction.FORWARD)
    assert len(values) == 8 + m + 1
    for offset, res in enumerate(values):
        n = offset - m
        assert res.method == Method.FORWARD_RECURRENCE.value
        assert res.value.real == pytest.approx(_quad(n, m, *INSIDE), rel=1e-9, abs=1e-13), n


@pytest.mark.parametrize("m", range(4))
def test_backward_recurrence_outside(m):
    p = make_point(*FAR)
    values = logopole_recurrence_n(m, 10, p, Direction.BACKWARD)
    for offset, res in enumerate(values):
        n = offset - m
        assert res.value.real == pytest.approx(_quad(n, m, *FAR), rel=1e-9, abs=1e-14), n


def test_recurrence_directions_are_guarded():
    with pytest.raises(RegionViolation):
        logopole_recurrence_n(0, 5, make_point(*FAR), Direction.FORWARD)
    with pytest.raises(RegionViolation):
        logopole_recurrence_n(0, 5, make_point(*INSIDE), Direction.BACKWARD)
    # forced runs still return the full sequence
    forced = logopole_recurrence_n(1, 3, make_point(*FAR), Direction.FORWARD, allow_unstable=True)
    assert len(forced) == 5


def test_sequence_picks_stable_direction():
    inside = logopole_sequence(1, 4, make_point(*INSIDE))
    outside = logopole_sequence(1, 4, make_point(*FAR))
    assert {res.method for res in inside} == {Method.FORWARD_RECURRENCE.value}
    assert {res.method for res in outside} == {Method.BACKWARD_RECURRENCE.value}


def test_recurrence_on_the_axis():
    p = make_point(0.0, 2.0)
    values = logopole_recurrence_n(0, 6, p, Direction.BACKWARD)
    for n, res in enumerate(values):
        assert res.value.real == pytest.approx(logopole_axis(n, 2.0), rel=1e-11)


# --- axis ---------------------------------------------------------------------------------


def test_axis_values():
    assert logopole_axis(0, 2.0) == pytest.approx(math.log(2.0), rel=1e-14)
    assert logopole_axis(1, 2.0) == pytest.approx(2 * math.log(2.0) - 1, rel=1e-13)
    assert logopole_axis(1, 4.0, R=2.0) == pytest.approx(0.386294, abs=1e-6)
    for n in range(6):
        assert logopole_axis_closed(n, 3.0) == pytest.approx(logopole_axis(n, 3.0), rel=1e-10)
    with pytest.raises(DomainError):
        logopole_axis(0, 0.5)
    with pytest.raises(DomainError):
        logopole_axis_closed(0, 1.0)


def test_axis_through_dispatcher():
    p = make_point(0.0, 2.0)
    for n in range(6):
        assert _value(n, 0, p) == pytest.approx(logopole_axis(n, 2.0), rel=1e-11)
    on_axis = logopole(LogopoleSpec(2, 1), make_point(0.0, 3.0))
    assert on_axis.value == 0
    assert on_axis.method == Method.AXIS_FORMULA.value


# --- negative degree and negative order ---------------------------------------------------


@pytest.mark.parametrize("rho, z", [MID, (1.5, 0.7), FAR, (0.5, -0.8), (1.0, 0.0)])
def test_negative_degree(rho, z):
    p = make_point(rho, z)
    for big_n in range(1, 7):
        value = logopole_negative_degree(-big_n, p).value.real
        expected = quad_negative_degree(big_n, p).value
        assert value == pytest.approx(expected, rel=1e-7, abs=1e-13), big_n


def test_negative_degree_series_outside():
    p = make_point(*FAR)
    for big_n in range(1, 6):
        series = logopole_negative_degree(-big_n, p, Method.NEGATIVE_DEGREE_SERIES)
        closed = logopole_negative_degree(-big_n, p)
        assert series.value.real == pytest.approx(closed.value.real, rel=1e-10)
    with pytest.raises(UnsupportedIndex):
        logopole_negative_degree(0, p)


def test_negative_degree_quadrature_route():
    p = make_point(1.5, 0.7)
    quad = logopole(LogopoleSpec(-2, 0), p, Method.QUADRATURE)
    assert quad.value.real == pytest.approx(_value(-2, 0, p), rel=1e-9)


def test_negative_order_bracket_and_phase():
    p = make_point(0.7, 1.4)
    n, m = 3, 1
    bracket = ssh_second_kind(n, m, p).value.real - sum(
        binomial(n + m, k + m) * ssh_second_kind(k, m, p, Frame.PRIME).value.real
        for k in range(m, n + 1)
    )
    value = logopole_negative_order(n, m, p).value.real
    assert value == pytest.approx(-math.factorial(2) / math.factorial(4) * bracket, rel=1e-12)

    turned = logopole(LogopoleSpec(n, -m), make_point(0.7, 1.4, phi=0.9))
    assert turned.value == pytest.approx(value * cmath.exp(-0.9j))
    assert turned.method == Method.NEGATIVE_ORDER.value
    with pytest.raises(AxisSingularity):
        logopole_negative_order(2, 1, make_point(0.0, 3.0))


# --- recurrences in order -----------------------------------------------------------------


def test_fixed_degree_raising():
    p = make_point(*MID)
    step = logopole_recurrence_m(0, 1, p, RecurrenceVariant.FIXED_DEGREE)
    assert step.value.real == pytest.approx(0.804984, abs=1e-6)
    raised = logopole_raise_order(0, 2, p, RecurrenceVariant.FIXED_DEGREE)
    assert raised.value.real == pytest.approx(_value(0, 2, p), rel=1e-9)


def test_mixed_degree_raising():
    p = make_point(*MID)
    raised = logopole_raise_order(0, 2, p, RecurrenceVariant.MIXED_DEGREE)
    assert raised.value.real == pytest.approx(0.804984, abs=1e-6)
    # the n = -m form
    step = logopole_recurrence_m(-1, 1, p, RecurrenceVariant.MIXED_DEGREE)
    assert step.value.real == pytest.approx(_quad(-1, 2, *MID), rel=1e-9)


@pytest.mark.parametrize("variant", list(RecurrenceVariant))
def test_raising_to_higher_order(variant):
    p = make_point(1.5, 0.7)
    for n, m_target in [(1, 3), (2, 3), (3, 2)]:
        raised = logopole_raise_order(n, m_target, p, variant)
        assert raised.value.real == pytest.approx(_quad(n, m_target, 1.5, 0.7), rel=1e-7)


def test_order_recurrence_needs_off_axis_point():
    with pytest.raises(AxisSingularity):
        logopole_recurrence_m(1, 1, make_point(0.0, 2.0))
    with pytest.raises(UnsupportedIndex):
        logopole_recurrence_m(0, 0, make_point(*MID), RecurrenceVariant.FIXED_DEGREE)


# --- PSSH expansion -----------------------------------------------------------------------


@pytest.mark.parametrize("n, m", [(0, 0), (1, 0), (3, 0), (0, 1), (1, 1), (2, 1), (0, 2), (-1, 1)])
def test_beta_series(n, m):
    p = make_point(*MID)
    res = logopole_from_beta(n, m, p)
    assert res.method == Method.BETA_SERIES.value
    assert res.value.real == pytest.approx(_quad(n, m, *MID), rel=1e-9)


# --- dispatcher ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "spec, point, route",
    [
        (LogopoleSpec(1, 0), MID, Method.CLOSED_FORM),
        (LogopoleSpec(0, 0), MID, Method.STABLE_MINUS_M),
        (LogopoleSpec(5, 0), INSIDE, Method.FORWARD_RECURRENCE),
        (LogopoleSpec(5, 0), FAR, Method.BACKWARD_RECURRENCE),
        (LogopoleSpec(5, 2), (0.6, 0.8), Method.SECOND_KIND_SUM),
        (LogopoleSpec(5, 0), (0.0, -1.0), Method.OFFSET_SERIES),
        (LogopoleSpec(4, 3), (0.5467, -0.7866), Method.OFFSET_SERIES),
        (LogopoleSpec(4, 3), (0.95, 0.3), Method.SECOND_KIND_SUM),
        (LogopoleSpec(5, 0), (0.0, 1.02), Method.MULTIPOLE_SERIES),
        (LogopoleSpec(-2, 2), MID, Method.NAIVE_MINUS_M),
        (LogopoleSpec(-2, 2), (0.3, 2.5), Method.STABLE_MINUS_M),
        (LogopoleSpec(-3, 0), MID, Method.NEGATIVE_DEGREE),
        (LogopoleSpec(3, -2), MID, Method.NEGATIVE_ORDER),
        (LogopoleSpec(2, 1), (0.0, 3.0), Method.AXIS_FORMULA),
        (LogopoleSpec(1, 1), (30.0, 0.0), Method.BACKWARD_RECURRENCE),
    ],
)
def test_select_route(spec, point, route):
    assert select_route(spec, make_point(*point)) is route


def test_spec_families():
    assert LogopoleSpec(2, 1).family is LogopoleFamily.STANDARD
    assert LogopoleSpec(-1, 1).family is LogopoleFamily.STANDARD
    assert LogopoleSpec(-4, 0).family is LogopoleFamily.NEGATIVE_DEGREE
    assert LogopoleSpec(3, -2).family is LogopoleFamily.NEGATIVE_ORDER
    with pytest.raises(UnsupportedIndex):
        LogopoleSpec(-3, 1)
    with pytest.raises(UnsupportedIndex):
        LogopoleSpec(1, -2)


def test_phase_is_applied():
    p = make_point(1.0, 0.5, phi=0.7)
    res = logopole(LogopoleSpec(1, 2), p)
    assert res.value == pytest.approx(0.581378 * cmath.exp(1.4j), abs=1e-6)


def test_named_routes_and_policy():
    p = make_point(*FAR)
    with pytest.raises(RegionViolation):
        logopole(LogopoleSpec(2, 1), p, Method.FORWARD_RECURRENCE)
    forced = logopole(LogopoleSpec(2, 1), p, MethodPolicy(Method.FORWARD_RECURRENCE, True))
    assert forced.method == Method.FORWARD_RECURRENCE.value
    quad = logopole(LogopoleSpec(2, 1), p, Method.QUADRATURE)
    assert quad.value.real == pytest.approx(_value(2, 1, p), rel=1e-9)
    with pytest.raises(UnsupportedIndex):
        logopole(LogopoleSpec(2, 1), p, Method.STABLE_MINUS_M)
    with pytest.raises(UnsupportedIndex):
        logopole(LogopoleSpec(-2, 0), p, Method.CLOSED_FORM)


def test_singular_tube_is_refused():
    with pytest.raises(SingularRegion):
        logopole(LogopoleSpec(0, 0), make_point(0.0, 0.5))
    with pytest.raises(SingularRegion):
        logopole(LogopoleSpec(1, 1), make_point(1e-10, 0.2))
