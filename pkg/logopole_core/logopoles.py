"""Logopoles L_n^m: every evaluation route and the region-aware dispatcher.

Internally each route computes the real meridional profile in hatted coordinates; the public
functions wrap it into an EvalResult carrying e^{i m phi}. Three families share the name:

  * Standard (m >= 0, n >= -m): line of order-m multipoles with density v^{n+m} on [0, R].
  * NegativeDegree (m = 0, n < 0): density v^n regularised by its leading multipoles.
  * NegativeOrder (m < 0): the order-reflected second-kind sum, phase e^{i m phi} with m < 0.

Stability map used by ``select_route``: the degree recurrence runs forward for r < R and
backward for r > R; near r = R the finite second-kind sum is used instead.
"""

from __future__ import annotations

import logging
import math
import sys
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterator, Mapping

from .config import get_settings
from .coords import FieldPoint, Frame, frame_coordinates, in_singular_tube, recurrence_direction
from .errors import (
    AxisSingularity,
    DivergentRegion,
    DomainError,
    NonConvergence,
    OriginSingularity,
    PoleDivision,
    RegionViolation,
    SingularRegion,
    UnsupportedIndex,
)
from .harmonics import (
    EvalResult,
    axial_q0,
    first_kind_row,
    phase,
    second_kind_row,
)
from .legendre import (
    binomial,
    double_factorial,
    factorial,
    legendre_q_sequence,
    minus_m_odd_poly,
    w_poly,
)
from .oracle import quad_minus_m_angular
from .summation import KahanSummation

logger = logging.getLogger(__name__)

EPS = sys.float_info.epsilon


class LogopoleFamily(str, Enum):
    STANDARD = "Standard"
    NEGATIVE_DEGREE = "NegativeDegree"
    NEGATIVE_ORDER = "NegativeOrder"


class Method(str, Enum):
    AUTO = "auto"
    MULTIPOLE_SERIES = "MultipoleSeries"
    SECOND_KIND_SUM = "SecondKindSum"
    OFFSET_SERIES = "OffsetSeries"
    FORWARD_RECURRENCE = "ForwardRecurrence"
    BACKWARD_RECURRENCE = "BackwardRecurrence"
    CLOSED_FORM = "ClosedForm"
    STABLE_MINUS_M = "StableMinusM"
    NAIVE_MINUS_M = "NaiveMinusM"
    RECURRENCE_M = "RecurrenceM"
    ANGULAR_MINUS_M = "AngularMinusM"
    AXIS_FORMULA = "AxisFormula"
    SEPARATED = "Separated"
    NEGATIVE_DEGREE = "NegativeDegree"
    NEGATIVE_DEGREE_SERIES = "NegativeDegreeSeries"
    NEGATIVE_ORDER = "NegativeOrder"
    BETA_SERIES = "BetaSeries"
    QUADRATURE = "Quadrature"


class MinusMMode(str, Enum):
    NAIVE = "Naive"
    STABLE = "Stable"
    RECURRENCE_M = "RecurrenceM"
    ANGULAR = "Angular"


class Direction(str, Enum):
    FORWARD = "Forward"
    BACKWARD = "Backward"


class RecurrenceVariant(str, Enum):
    FIXED_DEGREE = "FixedDegree"
    MIXED_DEGREE = "MixedDegree"


@dataclass(frozen=True)
class LogopoleSpec:
    n: int
    m: int

    def __post_init__(self):
        if self.m >= 0 and self.n < -self.m and self.m != 0:
            raise UnsupportedIndex(
                f"L_n^m with m > 0 needs n >= -m, got n={self.n}, m={self.m}"
            )
        if self.m < 0 and self.n < -self.m:
            raise UnsupportedIndex(
                f"L_n^m with m < 0 needs n >= |m|, got n={self.n}, m={self.m}"
            )

    @property
    def family(self) -> LogopoleFamily:
        if self.m < 0:
            return LogopoleFamily.NEGATIVE_ORDER
        if self.m == 0 and self.n < 0:
            return LogopoleFamily.NEGATIVE_DEGREE
        return LogopoleFamily.STANDARD


@dataclass(frozen=True)
class MethodPolicy:
    """A route choice; ``allow_unstable`` lets a recurrence run outside its stable region."""

    route: Method = Method.AUTO
    allow_unstable: bool = False


CLOSED_FORM_TABLE = frozenset({(0, 0), (1, 0), (-1, 1), (0, 1), (1, 1), (-2, 2), (0, 2), (1, 2)})


# --- small helpers ----------------------------------------------------------------------


def _df(n: int) -> float:
    return float(double_factorial(n))


def _s_mm(m: int, rho: float, r: float) -> float:
    """S_m^m profile about a frame origin at distance r: (2m-1)!! rho^m / r^{2m+1}."""
    if r == 0.0:
        raise OriginSingularity("S_m^m evaluated at its origin")
    return _df(2 * m - 1) * (rho / (r * r)) ** m / r


def _base_l0(p: FieldPoint) -> float:
    """L_0^0 = log((xibar + 1) / (xibar - 1))."""
    if p.xibar_m1 <= 0.0:
        raise SingularRegion("L_0 is singular on the segment")
    return math.log1p(2.0 / p.xibar_m1)


def _wrap(spec_m: int, value: float, p: FieldPoint, method: Method, err: float, terms: int):
    return EvalResult(value * phase(spec_m, p.phi), method.value, abs(err), terms)


def _standard(spec: LogopoleSpec, what: str) -> tuple[int, int]:
    if spec.family is not LogopoleFamily.STANDARD:
        raise UnsupportedIndex(f"{what} covers the standard family only, got {spec}")
    return spec.n, spec.m


def _legendre_stream(m: int, u: float, s: float) -> Iterator[float]:
    """P_m^m(u), P_{m+1}^m(u), ... without end."""
    pmm = 1.0
    for i in range(1, m + 1):
        pmm *= (2 * i - 1) * s
    yield pmm
    prev, cur = pmm, (2 * m + 1) * u * pmm
    yield cur
    k = m + 1
    while True:
        prev, cur = cur, ((2 * k + 1) * u * cur - (k + m) * prev) / (k - m + 1)
        yield cur
        k += 1


def _sum_multipoles(
    m: int,
    r: float,
    u: float,
    s: float,
    weight: Callable[[int], float],
    what: str,
    first: int | None = None,
) -> tuple[float, float, int]:
    """sum_{k>=m} weight(k) r^{-k-1} P_k^m(u) with a geometric tail bound.

    Termination is only tested once k passes ``first`` (the first nonzero weight).
    """
    first = m if first is None else first
    settings = get_settings()
    if r <= 1.0:
        raise DivergentRegion(f"{what} needs the frame radius above R, got r/R = {r}")
    if m > 0 and s == 0.0:
        return 0.0, 0.0, 0
    acc = KahanSummation()
    absolute = 0.0
    scale = r ** (-m - 1)
    geometric = r / (r - 1.0)
    for count, p_k in enumerate(_legendre_stream(m, u, s)):
        k = m + count
        w = weight(k)
        term = w * p_k * scale
        acc.add(term)
        absolute += abs(term)
        envelope = abs(w) * scale * (k + m + 1) ** m * _df(2 * m - 1)
        tail = envelope * geometric / r
        if k >= first + 2 and tail <= settings.series_tol * max(abs(acc.value), 1e-300):
            return acc.value, tail + EPS * absolute, count + 1
        if count >= settings.term_cap:
            raise NonConvergence(
                f"{what} did not converge in {settings.term_cap} terms", partial=acc.value
            )
        scale /= r


# --- series and finite sums -------------------------------------------------------------


def _series_multipole(n: int, m: int, p: FieldPoint) -> tuple[float, float, int]:
    return _sum_multipoles(
        m, p.r, p.u, p.sin_theta, lambda k: 1.0 / (n + k + 1), "Multipole series"
    )


def logopole_series_multipole(spec: LogopoleSpec, p: FieldPoint) -> EvalResult:
    """L_n^m = sum_{k>=m} S_k^m / (n+k+1), convergent for r > R."""
    n, m = _standard(spec, "logopole_series_multipole")
    value, err, terms = _series_multipole(n, m, p)
    return _wrap(m, value, p, Method.MULTIPOLE_SERIES, err, terms)


def _offset_series(n: int, m: int, p: FieldPoint) -> tuple[float, float, int]:
    # c_k = (n+m)! (k-m)! / (n+k+1)!, built by its ratio
    coeffs = {m: 1.0 / (n + m + 1)}

    def weight(k):
        if k not in coeffs:
            coeffs[k] = coeffs[k - 1] * (k - m) / (n + k + 1)
        return coeffs[k] if (k + m) % 2 == 0 else -coeffs[k]

    return _sum_multipoles(m, p.r_prime, p.u_prime, p.sin_prime, weight, "Offset series")


def logopole_offset_series(spec: LogopoleSpec, p: FieldPoint) -> EvalResult:
    """L_n^m as a series of multipoles about O', convergent for r' > R."""
    n, m = _standard(spec, "logopole_offset_series")
    value, err, terms = _offset_series(n, m, p)
    return _wrap(m, value, p, Method.OFFSET_SERIES, err, terms)


def _second_kind_bracket(n: int, m: int, p: FieldPoint) -> tuple[float, float]:
    """S~_n^m - sum_{k=m'}^{n} C(n+m, k+m) S~_k^{m'} with k from kmin."""
    if p.rho_h == 0.0:
        raise AxisSingularity("The second-kind sum is singular on the z-axis")
    if p.r == 0.0:
        raise OriginSingularity("The second-kind sum is singular at the origin")
    own = second_kind_row(n, n, m, p.r, p.z_h, p.rho_h)[0]
    k_min = -m
    row = second_kind_row(k_min, n, m, p.r_prime, p.z_h - 1.0, p.rho_h)
    acc = KahanSummation()
    absolute = abs(own)
    for k, value in zip(range(k_min, n + 1), row):
        term = binomial(n + m, k + m) * value
        acc.add(term)
        absolute += abs(term)
    return own - acc.value, EPS * absolute * (n + m + 2)


def logopole_sum_second_kind(spec: LogopoleSpec, p: FieldPoint) -> EvalResult:
    """Finite sum of second-kind harmonics about O and O', valid off the whole z-axis."""
    n, m = _standard(spec, "logopole_sum_second_kind")
    value, err = _second_kind_bracket(n, m, p)
    return _wrap(m, value, p, Method.SECOND_KIND_SUM, err, n + m + 2)


# --- closed forms -----------------------------------------------------------------------


def _closed_form(n: int, m: int, p: FieldPoint) -> float:
    xb, eb = p.xibar, p.etabar
    if p.xibar_m1 <= 0.0:
        raise SingularRegion("Closed forms are singular on the segment")
    amp = p.offset_ratio
    if (n, m) == (0, 0):
        return _base_l0(p)
    if (n, m) == (1, 0):
        q0, q1 = legendre_q_sequence(1, 0, xb, xm1=p.xibar_m1, s=p.sqrt_xibar2m1)
        return q0 + q1 * eb
    if (n, m) == (-1, 1):
        return 4.0 * xb * amp / ((xb - eb) * (xb + eb))
    if (n, m) == (0, 1):
        return 2.0 * amp / (xb - eb)
    if (n, m) == (1, 1):
        q11 = legendre_q_sequence(1, 1, xb, n_min=1, xm1=p.xibar_m1, s=p.sqrt_xibar2m1)[0]
        return 2.0 * amp / (xb - eb) + q11 * p.sqrt_1metabar2
    if (n, m) == (-2, 2):
        x2, e2 = xb * xb, eb * eb
        poly = 3.0 * x2 * x2 * xb - x2 * xb + e2 * x2 * xb - 3.0 * e2 * xb
        return 8.0 * amp * amp * poly / ((xb - eb) * (xb + eb)) ** 3
    if (n, m) == (0, 2):
        return 4.0 * (2.0 * xb * xb - 1.0 - xb * eb) * amp * amp / (xb - eb) ** 3
    if (n, m) == (1, 2):
        return 2.0 * (3.0 * xb * xb - 2.0 - eb * eb) * amp * amp / (xb - eb) ** 3
    raise UnsupportedIndex(f"No closed form for L_{n}^{m}")


def logopole_closed_low_order(spec: LogopoleSpec, p: FieldPoint) -> EvalResult:
    """Explicit low-order logopoles in offset spheroidal coordinates."""
    n, m = spec.n, spec.m
    if (n, m) not in CLOSED_FORM_TABLE:
        raise UnsupportedIndex(f"No closed form for L_{n}^{m}")
    value = _closed_form(n, m, p)
    return _wrap(m, value, p, Method.CLOSED_FORM, 8 * EPS * abs(value), 1)


# --- L_{-m}^m ---------------------------------------------------------------------------


def _naive_minus_m(m: int, p: FieldPoint) -> float:
    if p.rho_h == 0.0:
        raise AxisSingularity("The naive L_-m^m form is singular on the z-axis")
    if m == 0:
        return axial_q0(p.z_h, p.rho_h) - axial_q0(p.z_h - 1.0, p.rho_h)
    diff = minus_m_odd_poly(m, p.u) - minus_m_odd_poly(m, p.u_prime)
    return _df(2 * m - 1) * diff / p.rho_h**m


@lru_cache(maxsize=None)
def _stable_coefficients(m: int) -> tuple[tuple[int, int, float], ...]:
    out = []
    for q in range(m):
        outer = Fraction(binomial(m - 1, q), 2 * q + 1)
        for j in range(q + 1):
            inner = Fraction(
                (-1) ** (j + q)
                * binomial(q, j)
                * double_factorial(2 * m + 2 * j - 2 * q - 3),
                double_factorial(2 * j - 1) * double_factorial(2 * m - 2 * q - 3),
            )
            out.append((q, j, float(outer * inner)))
    return tuple(out)


def _stable_minus_m(m: int, p: FieldPoint) -> float:
    """L_{-m}^m with the factor ((1 - etabar^2)/(xibar^2 - 1))^{m/2} taken out exactly."""
    if m == 0:
        return _base_l0(p)
    if p.xibar_m1 <= 0.0:
        raise SingularRegion("L_-m^m is singular on the segment")
    xb, eb = p.xibar, p.etabar
    amp = p.offset_ratio
    if amp == 0.0:
        return 0.0
    x2 = xb * xb
    a = (xb - eb) * (xb + eb) / x2
    b = eb * p.xibar_m1 * (xb + 1.0) / x2
    c = (x2 - eb) * (x2 + eb) / (x2 * x2)
    acc = KahanSummation()
    for q, j, coef in _stable_coefficients(m):
        acc.add(coef * xb ** (-2 * q - 1) * c ** (m - 2 * q - 1) * b ** (2 * j) * a ** (2 * q - 2 * j))
    prefactor = 2.0 ** (m + 1) * _df(2 * m - 1) * (amp / (a * a)) ** m * a
    return prefactor * acc.value


def _recurrence_minus_m(m: int, p: FieldPoint, allow_unstable: bool = False) -> float:
    """Raise L_{-k}^k from k = 0 to m; forward-stable beside the segment."""
    rho, z = p.rho_h, p.z_h
    if not allow_unstable and not (rho > 0.0 and 0.0 < z < 1.0):
        raise RegionViolation("The order recurrence for L_-m^m needs rho > 0 and 0 < z < R")
    if rho == 0.0:
        raise AxisSingularity("The order recurrence for L_-m^m divides by rho")
    value = _base_l0(p)
    r, r1 = p.r, p.r_prime
    for k in range(m):
        extra = _df(2 * k - 1) * (rho / (r * r)) ** k / rho * z / r
        extra -= _df(2 * k - 1) * (rho / (r1 * r1)) ** k / rho * (z - 1.0) / r1
        value = (2 * k / rho) * value + extra
    return value


def _minus_m_profile(m: int, p: FieldPoint, mode: MinusMMode, allow_unstable=False):
    mode = MinusMMode(mode)
    if mode is MinusMMode.NAIVE:
        return _naive_minus_m(m, p), Method.NAIVE_MINUS_M
    if mode is MinusMMode.STABLE:
        return _stable_minus_m(m, p), Method.STABLE_MINUS_M
    if mode is MinusMMode.RECURRENCE_M:
        return _recurrence_minus_m(m, p, allow_unstable), Method.RECURRENCE_M
    return quad_minus_m_angular(m, p).value, Method.ANGULAR_MINUS_M


def logopole_minus_m(
    m: int, p: FieldPoint, mode: MinusMMode = MinusMMode.STABLE, allow_unstable: bool = False
) -> EvalResult:
    """L_{-m}^m by the naive difference, the stable offset form, the order recurrence or the
    angular integral."""
    if m < 0:
        raise UnsupportedIndex(f"logopole_minus_m needs m >= 0, got {m}")
    _check_tube(p)
    value, method = _minus_m_profile(m, p, mode, allow_unstable)
    return _wrap(m, value, p, method, 4 * EPS * (m + 1) * abs(value), m + 1)


# --- recurrence in degree ---------------------------------------------------------------


def _inhomogeneous(m: int, p: FieldPoint) -> float:
    """(2m-1)!! rho^m r'^{1-2m}, the source term of the degree recurrence."""
    r1 = p.r_prime
    return _df(2 * m - 1) * (p.rho_h / (r1 * r1)) ** m * r1


def _three_term_forward(k: int, m: int, p: FieldPoint, cur: float, prev: float, rhs: float):
    """L_{k+1} from L_k and L_{k-1}."""
    if k - m + 1 == 0:
        raise PoleDivision(f"The degree recurrence has a pole at n = m - 1 = {k}")
    return ((2 * k + 1) * p.z_h * cur - (k + m) * p.r * p.r * prev + rhs) / (k - m + 1)


def _forward_profiles(m: int, n_max: int, p: FieldPoint) -> list[float]:
    """[L_{-m}^m, ..., L_{n_max}^m] by upward recursion."""
    if n_max < -m:
        return []
    rho, z = p.rho_h, p.z_h
    if m == 0:
        first = _base_l0(p)
    elif z < 0.0 or z > 1.0:
        first = _stable_minus_m(m, p)
    else:
        first = _naive_minus_m(m, p)
    out = [first]
    if n_max == -m:
        return out
    r, r1 = p.r, p.r_prime
    if m == 0:
        second = z * first - p.etabar
    else:
        jump = (rho / r) ** m * r ** (1 - m) - (rho / r1) ** m * r1 ** (1 - m)
        second = z * first + _df(2 * m - 1) / (2 * m - 1) * jump
    out.append(second)
    rhs = _inhomogeneous(m, p)
    for k in range(-m + 1, n_max):
        if k == m - 1:
            lower = _forward_profiles(m - 1, m - 1, p)[-1]
            step = -_df(2 * m - 3) * (rho / (r1 * r1)) ** m * r1 + z * out[-1]
            step += (2 * m - 1) * rho * lower
            out.append(step)
            continue
        out.append(_three_term_forward(k, m, p, out[-1], out[-2], rhs))
    return out


def _backward_pass(m: int, n_max: int, p: FieldPoint, pad: int) -> list[float]:
    top = n_max + pad
    rhs = _inhomogeneous(m, p)
    seed = _s_mm(m, p.rho_h, p.r_prime)
    nxt, cur = seed / (top + m + 2), seed / (top + m + 1)
    out = [0.0] * (n_max + m + 1)
    if top <= n_max:
        out[top + m] = cur
    r2 = p.r * p.r
    z = p.z_h
    for k in range(top, -m, -1):
        prev = (rhs + (2 * k + 1) * z * cur - (k - m + 1) * nxt) / ((k + m) * r2)
        if k - 1 <= n_max:
            out[k - 1 + m] = prev
        nxt, cur = cur, prev
    return out


def _reference_minus_m(m: int, p: FieldPoint) -> float:
    return _base_l0(p) if m == 0 else _stable_minus_m(m, p)


def _backward_profiles(m: int, n_max: int, p: FieldPoint) -> tuple[list[float], float]:
    """Backward recursion from approximate seeds, rescaled to the known L_{-m}^m.

    The padding doubles until the rescale ratio is stable; returns (profiles, ratio drift).
    """
    settings = get_settings()
    reference = _reference_minus_m(m, p)
    pad = settings.backward_padding
    previous = None
    while True:
        seq = _backward_pass(m, n_max, p, pad)
        ratio = reference / seq[0] if seq[0] != 0.0 else 1.0
        if previous is not None and abs(ratio - previous) <= settings.rescale_tol * abs(ratio):
            logger.debug(f"Backward recursion settled with padding {pad}, ratio {ratio:.16g}")
            return [v * ratio for v in seq], abs(ratio - previous)
        if pad > settings.term_cap:
            raise NonConvergence(
                f"Backward recursion rescale ratio did not settle by padding {pad}",
                partial=[v * ratio for v in seq],
            )
        previous = ratio
        pad *= 2


def logopole_recurrence_n(
    m: int,
    n_max: int,
    p: FieldPoint,
    direction: Direction = Direction.FORWARD,
    allow_unstable: bool = False,
) -> list[EvalResult]:
    """[L_{-m}^m, ..., L_{n_max}^m] by the degree recurrence in the given direction."""
    if m < 0:
        raise UnsupportedIndex(f"logopole_recurrence_n needs m >= 0, got {m}")
    direction = Direction(direction)
    _check_tube(p)
    if direction is Direction.FORWARD:
        if p.r >= 1.0 and not allow_unstable:
            raise RegionViolation(f"Forward recursion is unstable for r >= R (r/R = {p.r:.6g})")
        values = _forward_profiles(m, n_max, p)
        method, drift = Method.FORWARD_RECURRENCE, 0.0
    else:
        if p.r <= 1.0 and not allow_unstable:
            raise RegionViolation(f"Backward recursion is unstable for r <= R (r/R = {p.r:.6g})")
        values, drift = _backward_profiles(m, n_max, p)
        method = Method.BACKWARD_RECURRENCE
    return [
        _wrap(m, v, p, method, (drift + EPS * (i + 1)) * abs(v), i + 1)
        for i, v in enumerate(values)
    ]


def logopole_sequence(
    m: int, n_max: int, p: FieldPoint, allow_unstable: bool = False
) -> list[EvalResult]:
    """[L_{-m}^m, ..., L_{n_max}^m] in the stable direction for the point."""
    direction = (
        Direction.FORWARD if recurrence_direction(p) == "forward" else Direction.BACKWARD
    )
    return logopole_recurrence_n(m, n_max, p, direction, allow_unstable)


# --- axis -------------------------------------------------------------------------------


def logopole_axis(n: int, z: float, R: float = 1.0) -> float:
    """L_n^0 on the axis beyond O': sum_{k>n} (z/R)^{n-k} / k."""
    if n < 0:
        raise UnsupportedIndex(f"logopole_axis needs n >= 0, got {n}")
    zh = z / R
    if zh <= 1.0:
        raise DomainError(f"logopole_axis needs z > R, got z/R = {zh}")
    settings = get_settings()
    acc = KahanSummation()
    power = 1.0
    for j in range(1, settings.term_cap + 1):
        power /= zh
        term = power / (n + j)
        acc.add(term)
        if term * zh / (zh - 1.0) <= settings.series_tol * acc.value:
            return acc.value
    raise NonConvergence(f"Axis series did not converge at z/R = {zh}", partial=acc.value)


def logopole_axis_closed(n: int, z: float, R: float = 1.0) -> float:
    """(z/R)^n [log(z/(z-R)) - sum_{k=1}^n (z/R)^{-k}/k]; cancels badly for large n."""
    if n < 0:
        raise UnsupportedIndex(f"logopole_axis_closed needs n >= 0, got {n}")
    zh = z / R
    if zh <= 1.0:
        raise DomainError(f"logopole_axis_closed needs z > R, got z/R = {zh}")
    partial = sum(zh ** (-k) / k for k in range(1, n + 1))
    return zh**n * (-math.log1p(-1.0 / zh) - partial)


# --- negative degree --------------------------------------------------------------------


def _negative_degree_series(big_n: int, p: FieldPoint) -> tuple[float, float, int]:
    return _sum_multipoles(
        0,
        p.r,
        p.u,
        p.sin_theta,
        lambda k: 0.0 if k < big_n else 1.0 / (k - big_n + 1),
        "Negative-degree series",
        first=big_n,
    )


def _negative_degree_closed(big_n: int, p: FieldPoint) -> float:
    """L_{-N} for N >= 1 from the closed forms and, beyond N = 4, the downward-degree recurrence."""
    if p.r == 0.0:
        raise OriginSingularity("Negative-degree logopoles are singular at the origin")
    if p.xibar_m1 <= 0.0:
        raise SingularRegion("Negative-degree logopoles are singular on the segment")
    xb, eb = p.xibar, p.etabar
    r, r1, z = p.r, p.r_prime, p.z_h
    ell = math.log(4.0 * r * r / (p.xibar_m1 * (xb + 1.0)))
    s_row = first_kind_row(max(big_n, 4), 0, r, p.u, p.sin_theta)
    w = p.sqrt_1metabar2 ** 2
    t = xb + eb
    e2 = eb * eb
    values = {
        1: s_row[0] * ell,
        2: s_row[1] * ell - 4.0 * w / t**3,
        3: s_row[2] * ell - 2.0 * (7.0 + e2 + 8.0 * eb * xb) * w / t**5,
        4: s_row[3] * ell
        - (4.0 / 3.0) * w / t**7
        * (37.0 - 2.0 * e2 + e2 * e2 + 9.0 * eb * (7.0 + e2) * xb + 9.0 * (5.0 * e2 - 1.0) * xb * xb),
    }
    # L_{-k-2} from L_{-k-1} and L_{-k}
    for k in range(3, big_n - 1):
        partial = math.fsum(s_row[: k + 1])
        num = (
            (2 * k + 1) * z * values[k + 1]
            - k * values[k]
            - r1
            + r1 * r1 * partial
            + r * r * s_row[k + 1]
            - s_row[k]
        )
        values[k + 2] = num / ((k + 1) * r * r)
    return values[big_n]


def logopole_negative_degree(n: int, p: FieldPoint, route: Method = Method.AUTO) -> EvalResult:
    """L_n for n < 0 (m = 0): closed forms to n = -4, recurrence beyond, or the series for r > R."""
    if n >= 0:
        raise UnsupportedIndex(f"logopole_negative_degree needs n < 0, got {n}")
    _check_tube(p)
    route = Method(route)
    if route is Method.NEGATIVE_DEGREE_SERIES:
        value, err, terms = _negative_degree_series(-n, p)
        return _wrap(0, value, p, Method.NEGATIVE_DEGREE_SERIES, err, terms)
    value = _negative_degree_closed(-n, p)
    return _wrap(0, value, p, Method.NEGATIVE_DEGREE, 16 * EPS * (-n) * abs(value), -n)


# --- negative order ---------------------------------------------------------------------


def logopole_negative_order(n: int, m: int, p: FieldPoint) -> EvalResult:
    """L_n^{-m} for m > 0, n >= m; singular on the whole z-axis, phase e^{-i m phi}."""
    if m <= 0:
        raise UnsupportedIndex(f"logopole_negative_order takes the order magnitude m > 0, got {m}")
    if n < m:
        raise UnsupportedIndex(f"L_n^-m needs n >= m, got n={n}, m={m}")
    if p.rho_h == 0.0:
        raise AxisSingularity("Negative-order logopoles are singular on the z-axis")
    own = second_kind_row(n, n, m, p.r, p.z_h, p.rho_h)[0]
    row = second_kind_row(m, n, m, p.r_prime, p.z_h - 1.0, p.rho_h)
    acc = KahanSummation()
    absolute = abs(own)
    for k, value in zip(range(m, n + 1), row):
        term = binomial(n + m, k + m) * value
        acc.add(term)
        absolute += abs(term)
    sign = -1.0 if m % 2 else 1.0
    factor = sign * factorial(n - m) / factorial(n + m)
    value = factor * (own - acc.value)
    return _wrap(-m, value, p, Method.NEGATIVE_ORDER, EPS * abs(factor) * absolute, n - m + 2)


# --- separated form ---------------------------------------------------------------------


def _separated(n: int, m: int, p: FieldPoint) -> tuple[float, float]:
    if m > 0 and p.rho_h == 0.0:
        raise AxisSingularity("The separated form with m > 0 is singular on the z-axis")
    base = _base_l0(p)
    r, u, s = frame_coordinates(p, Frame.O)
    r1, u1, s1 = frame_coordinates(p, Frame.PRIME)
    p_n = first_kind_row(n, m, 1.0, u, s)[n] if n >= 0 else 0.0
    own = r**n * (p_n * base - w_poly(n, m, u, s=s))
    acc = KahanSummation()
    absolute = abs(own)
    for k in range(-m, n + 1):
        term = binomial(n + m, k + m) * r1**k * w_poly(k, m, u1, s=s1)
        acc.add(term)
        absolute += abs(term)
    return own + acc.value, EPS * absolute * (n + m + 2)


def logopole_separated(n: int, m: int, p: FieldPoint) -> EvalResult:
    """L_n^m split into its logarithmic part r^n P_n^m(u) L_0 and W-polynomial remainders."""
    if m < 0 or n < m:
        raise UnsupportedIndex(f"logopole_separated needs n >= m >= 0, got n={n}, m={m}")
    _check_tube(p)
    value, err = _separated(n, m, p)
    return _wrap(m, value, p, Method.SEPARATED, err, n + m + 2)


# --- recurrences in order ---------------------------------------------------------------


def _s_prime(k: int, j: int, p: FieldPoint) -> float:
    """S_k^j about O'."""
    return first_kind_row(k, j, p.r_prime, p.u_prime, p.sin_prime)[k]


def logopole_recurrence_m(
    n: int,
    m: int,
    p: FieldPoint,
    variant: RecurrenceVariant = RecurrenceVariant.FIXED_DEGREE,
    values: Mapping[tuple[int, int], float] | None = None,
) -> EvalResult:
    """One raising step: L_n^{m+1} from lower-order profiles.

    ``values`` maps (n, m) to profiles at phi = 0; missing entries are evaluated with the auto
    policy. Unstable when repeated towards large m near the axis.
    """
    variant = RecurrenceVariant(variant)
    if p.rho_h == 0.0:
        raise AxisSingularity("Order recurrences divide by sin(theta)")
    values = dict(values or {})

    def lower(k: int, j: int) -> float:
        if (k, j) not in values:
            values[(k, j)] = logopole(LogopoleSpec(k, j), p).value.real
        return values[(k, j)]

    cos_t, sin_t = p.u, p.sin_theta
    if variant is RecurrenceVariant.FIXED_DEGREE:
        if m < 1 or n < 1 - m:
            raise UnsupportedIndex(f"FixedDegree needs m >= 1 and n >= 1 - m, got n={n}, m={m}")
        cot = p.z_h / p.rho_h
        value = 2 * m * cot * lower(n, m) - (
            (n - m + 1) * (n + m) * lower(n, m - 1)
            + _s_prime(m, m - 1, p)
            - (n - m + 1) * _s_prime(m - 1, m - 1, p)
        )
    else:
        if m < 0 or n < -m:
            raise UnsupportedIndex(f"MixedDegree needs m >= 0 and n >= -m, got n={n}, m={m}")
        s_mm_prime = _s_prime(m, m, p)
        if n == -m:
            s_mm = first_kind_row(m, m, p.r, cos_t, sin_t)[m]
            value = (
                2 * m * cos_t * lower(n, m) + (cos_t - p.r) * s_mm_prime + p.r * s_mm
            ) / sin_t
        else:
            value = (
                (n + m) * p.r * lower(n - 1, m)
                - (n - m) * cos_t * lower(n, m)
                + (cos_t - p.r) * s_mm_prime
            ) / sin_t
    return _wrap(m + 1, value, p, Method.RECURRENCE_M, EPS * abs(value) * (m + 2), 1)


def logopole_raise_order(
    n: int, m_target: int, p: FieldPoint, variant: RecurrenceVariant = RecurrenceVariant.FIXED_DEGREE
) -> EvalResult:
    """L_n^{m_target} by repeated raising from accurate m = 0 (and m = 1) seeds."""
    if m_target < 1:
        raise UnsupportedIndex(f"logopole_raise_order needs m_target >= 1, got {m_target}")
    variant = RecurrenceVariant(variant)
    if variant is RecurrenceVariant.FIXED_DEGREE:
        values = {
            (n, 0): logopole(LogopoleSpec(n, 0), p).value.real,
            (n, 1): logopole(LogopoleSpec(n, 1), p).value.real,
        }
        for m in range(1, m_target):
            values[(n, m + 1)] = logopole_recurrence_m(n, m, p, variant, values).value.real
        value = values[(n, m_target)]
    else:
        # order j needs degrees n - (m_target - j) .. n; missing seeds come from the auto policy
        values = {}
        for m in range(m_target):
            for k in range(max(n - (m_target - m - 1), -m), n + 1):
                values[(k, m + 1)] = logopole_recurrence_m(k, m, p, variant, values).value.real
        value = values[(n, m_target)]
    return _wrap(m_target, value, p, Method.RECURRENCE_M, EPS * abs(value) * m_target, m_target)


# --- PSSH expansion ---------------------------------------------------------------------


def logopole_from_beta(n: int, m: int, p: FieldPoint, p_cap: int | None = None) -> EvalResult:
    """L_n^m as an infinite series of offset PSSHs with beta coefficients."""
    from .relations import beta_series_value

    value, err, terms = beta_series_value(n, m, p, p_cap)
    return _wrap(m, value, p, Method.BETA_SERIES, err, terms)


# --- dispatcher -------------------------------------------------------------------------


def _check_tube(p: FieldPoint) -> None:
    if in_singular_tube(p, get_settings().tube_eps):
        raise SingularRegion(
            f"Point (rho={p.rho}, z={p.z}) lies within the singular tube around the segment"
        )


def select_route(spec: LogopoleSpec, p: FieldPoint) -> Method:
    """The auto policy: which route evaluates ``spec`` at ``p``."""
    settings = get_settings()
    n, m = spec.n, spec.m
    if spec.family is LogopoleFamily.NEGATIVE_ORDER:
        return Method.NEGATIVE_ORDER
    if spec.family is LogopoleFamily.NEGATIVE_DEGREE:
        return Method.NEGATIVE_DEGREE
    if m > 0 and p.rho_h == 0.0:
        return Method.AXIS_FORMULA
    if n == -m:
        if p.z_h < 0.0 or p.z_h > 1.0 or m == 0:
            return Method.STABLE_MINUS_M
        return Method.NAIVE_MINUS_M
    if (n, m) in CLOSED_FORM_TABLE and p.xibar <= settings.closed_form_xibar_max:
        return Method.CLOSED_FORM
    lo, hi = settings.boundary_band
    if lo < p.r < hi and n <= settings.band_max_degree:
        # the second-kind sum cancels badly once O' is far; its multipoles converge there
        if p.r_prime > settings.band_offset_radius:
            return Method.OFFSET_SERIES
        if p.rho_h > 0.0:
            return Method.SECOND_KIND_SUM
        return Method.OFFSET_SERIES if p.z_h < 0.0 else Method.MULTIPOLE_SERIES
    return Method.FORWARD_RECURRENCE if p.r < 1.0 else Method.BACKWARD_RECURRENCE


def _route_profile(route: Method, spec: LogopoleSpec, p: FieldPoint, allow_unstable: bool):
    n, m = spec.n, spec.m
    if route is Method.MULTIPOLE_SERIES:
        return _series_multipole(n, m, p)
    if route is Method.OFFSET_SERIES:
        return _offset_series(n, m, p)
    if route is Method.SECOND_KIND_SUM:
        value, err = _second_kind_bracket(n, m, p)
        return value, err, n + m + 2
    if route is Method.CLOSED_FORM:
        value = _closed_form(n, m, p)
        return value, 8 * EPS * abs(value), 1
    if route is Method.SEPARATED:
        value, err = _separated(n, m, p)
        return value, err, n + m + 2
    if route in (Method.STABLE_MINUS_M, Method.NAIVE_MINUS_M, Method.RECURRENCE_M,
                 Method.ANGULAR_MINUS_M):
        if n != -m:
            raise UnsupportedIndex(f"{route.value} evaluates L_-m^m only, got n={n}, m={m}")
        mode = {
            Method.STABLE_MINUS_M: MinusMMode.STABLE,
            Method.NAIVE_MINUS_M: MinusMMode.NAIVE,
            Method.RECURRENCE_M: MinusMMode.RECURRENCE_M,
            Method.ANGULAR_MINUS_M: MinusMMode.ANGULAR,
        }[route]
        value, _ = _minus_m_profile(m, p, mode, allow_unstable)
        return value, 4 * EPS * (m + 1) * abs(value), m + 1
    if route in (Method.FORWARD_RECURRENCE, Method.BACKWARD_RECURRENCE):
        direction = (
            Direction.FORWARD if route is Method.FORWARD_RECURRENCE else Direction.BACKWARD
        )
        last = logopole_recurrence_n(m, n, p, direction, allow_unstable)[-1]
        return last.value.real, last.est_error, last.terms_used
    if route is Method.AXIS_FORMULA:
        if m > 0:
            return 0.0, 0.0, 0
        value = logopole_axis(n, p.z, p.R)
        return value, EPS * abs(value), 1
    if route is Method.QUADRATURE:
        from .oracle import Density, quad_line_multipole

        quad = quad_line_multipole(Density.MONOMIAL, n, m, p)
        return quad.value, quad.abs_error_est, quad.subdivisions
    if route is Method.BETA_SERIES:
        from .relations import beta_series_value

        return beta_series_value(n, m, p, None)
    raise UnsupportedIndex(f"Route {route.value} does not evaluate standard logopoles")


def logopole(
    spec: LogopoleSpec, p: FieldPoint, policy: MethodPolicy | Method | None = None
) -> EvalResult:
    """Evaluate a logopole of any family by the auto policy or a named route."""
    if policy is None:
        policy = MethodPolicy()
    elif not isinstance(policy, MethodPolicy):
        policy = MethodPolicy(Method(policy))
    _check_tube(p)

    route = policy.route
    if route is Method.AUTO:
        route = select_route(spec, p)
        logger.debug(f"L_{spec.n}^{spec.m} at (rho={p.rho}, z={p.z}): route {route.value}")

    if spec.family is LogopoleFamily.NEGATIVE_ORDER:
        if route is not Method.NEGATIVE_ORDER:
            raise UnsupportedIndex("Negative-order logopoles use the NegativeOrder route only")
        return logopole_negative_order(spec.n, -spec.m, p)
    if spec.family is LogopoleFamily.NEGATIVE_DEGREE:
        if route is Method.QUADRATURE:
            from .oracle import quad_negative_degree

            quad = quad_negative_degree(-spec.n, p)
            return _wrap(0, quad.value, p, Method.QUADRATURE, quad.abs_error_est, quad.subdivisions)
        if route not in (Method.NEGATIVE_DEGREE, Method.NEGATIVE_DEGREE_SERIES):
            raise UnsupportedIndex(f"Route {route.value} does not evaluate negative degrees")
        return logopole_negative_degree(spec.n, p, route)

    value, err, terms = _route_profile(route, spec, p, policy.allow_unstable)
    return _wrap(spec.m, value, p, route, err, terms)
