"""Associated Legendre functions of the first and second kind.

Convention: no Condon-Shortley phase anywhere,

    P_n^m(x) = |1 - x^2|^{m/2} d^m P_n / dx^m,   Q_n^m(x) = |1 - x^2|^{m/2} d^m Q_n / dx^m,

for |x| < 1 and x > 1 alike. scipy.special.lpmv includes the (-1)^m phase on the interval,
so cross-library comparisons must flip the sign of odd orders.

Regimes:
  * |x| < 1, n >= m:     Q = P Q_0 - W_{n-1}^m (split form, Q_0 = atanh x)
  * |x| < 1, -m <= n < m: rational functions, no logarithm
  * x > 1, n >= 0:       Miller backward recurrence in degree normalised by Q_0 = acoth x,
                         then raised in order
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache

from scipy.special import hyp2f1

from .config import get_settings
from .errors import DomainError, InvalidDegree, SingularArgument, UnsupportedIndex

logger = logging.getLogger(__name__)

_RESCALE_AT = 1e250


class Regime(str, Enum):
    INTERVAL = "interval"
    EXTERIOR = "exterior"


@dataclass(frozen=True)
class LegendreValue:
    value: float
    regime: Regime
    has_log_part: bool

    def __float__(self) -> float:
        return self.value


# --- integer helpers --------------------------------------------------------------------


@lru_cache(maxsize=None)
def factorial(n: int) -> int:
    if n < 0:
        raise ValueError(f"factorial of negative integer {n}")
    return math.factorial(n)


@lru_cache(maxsize=None)
def double_factorial(n: int) -> int:
    """n!! with (-1)!! = 1 and (-3)!! = -1 (the odd continuation n!! = (n+2)!!/(n+2))."""
    if n >= 0:
        out = 1
        for k in range(n, 0, -2):
            out *= k
        return out
    if n % 2 == 0:
        raise ValueError(f"double factorial of negative even integer {n}")
    return Fraction(double_factorial(n + 2), n + 2)


def binomial(n: int, k: int) -> int:
    if k < 0 or k > n or n < 0:
        return 0
    return math.comb(n, k)


def factorial_ratio(a: int, b: int) -> float:
    """a! / b! as a float, computed from exact integers."""
    return factorial(a) / factorial(b)


def _sqrt_1mx2(x: float, s: float | None) -> float:
    if s is not None:
        return s
    if abs(x) < 1.0:
        return math.sqrt((1.0 - x) * (1.0 + x))
    return math.sqrt((x - 1.0) * (x + 1.0))


def _regime(x: float) -> Regime:
    if x == 1.0 or x == -1.0:
        raise SingularArgument(f"Legendre function of the second kind is singular at x = {x}")
    if abs(x) < 1.0:
        return Regime.INTERVAL
    if x > 1.0:
        return Regime.EXTERIOR
    raise DomainError(f"x = {x} < -1 is outside the supported range")


# --- first kind -------------------------------------------------------------------------


def legendre_p_sequence(n_max: int, m: int, x: float, *, s: float | None = None) -> list[float]:
    """Return [P_0^m(x), ..., P_{n_max}^m(x)] for m >= 0 (zero below degree m)."""
    if m < 0:
        raise UnsupportedIndex(f"legendre_p_sequence needs m >= 0, got {m}")
    out = [0.0] * (n_max + 1)
    if n_max < m:
        return out
    s = _sqrt_1mx2(x, s)
    pmm = 1.0
    for i in range(1, m + 1):
        pmm *= (2 * i - 1) * s
    out[m] = pmm
    if n_max == m:
        return out
    out[m + 1] = (2 * m + 1) * x * pmm
    for k in range(m + 1, n_max):
        out[k + 1] = ((2 * k + 1) * x * out[k] - (k + m) * out[k - 1]) / (k - m + 1)
    return out


def legendre_p(n: int, m: int, x: float, *, s: float | None = None) -> float:
    """P_n^m(x) for |x| <= 1 or x > 1; negative m by the reflection formulas."""
    if n < 0:
        raise InvalidDegree(f"P_n^m needs n >= 0, got n = {n}")
    if x < -1.0:
        raise DomainError(f"x = {x} < -1 is outside the supported range")
    if m < 0:
        return legendre_p_negative_order(n, -m, x, s=s)
    if n < m:
        return 0.0
    return legendre_p_sequence(n, m, x, s=s)[n]


def legendre_p_negative_order(n: int, m: int, x: float, *, s: float | None = None) -> float:
    """P_n^{-m}(x) for m >= 0."""
    if n < 0:
        raise InvalidDegree(f"P_n^-m needs n >= 0, got n = {n}")
    if m < 0:
        raise UnsupportedIndex(f"order magnitude must be non-negative, got {m}")
    if n >= m:
        sign = -1.0 if m % 2 else 1.0
        return sign * factorial(n - m) / factorial(n + m) * legendre_p(n, m, x, s=s)
    if x > 1.0:
        raise DomainError("P_n^-m with n < m is only defined here on |x| <= 1")
    if x == -1.0:
        raise SingularArgument("P_n^-m with n < m is infinite at x = -1")
    if x == 1.0:
        return 0.0
    sign = -1.0 if m % 2 else 1.0
    ratio = ((1.0 - x) / (1.0 + x)) ** (0.5 * m)
    return sign / factorial(m) * ratio * float(hyp2f1(n + 1, -n, m + 1, 0.5 * (1.0 - x)))


# --- second kind, rational regime -------------------------------------------------------


@lru_cache(maxsize=None)
def _negative_degree_terms(nn: int, m: int) -> tuple[tuple[int, float], ...]:
    """(power, coefficient) pairs of (1-x^2)^{m/2} Q_{-nn-1}^m(x), for 0 <= nn < m."""
    pref = factorial(m + nn) * factorial(m - nn - 1) * Fraction(double_factorial(2 * nn - 1))
    terms = []
    for q in range((m + nn) // 2 + 1):
        prod = 1
        for k in range(q):
            prod *= 2 * nn - 2 * k - 1
        denom = factorial(m + nn - 2 * q) * (2**q * factorial(q)) * prod
        sign = -1 if (q + nn) % 2 else 1
        terms.append((m + nn - 2 * q, float(pref * sign / denom)))
    return tuple(terms)


def q_negative_degree(n: int, m: int, x: float, *, s: float | None = None) -> float:
    """Q_n^m(x) for -m <= n < 0 and |x| < 1, from the terminating hypergeometric series."""
    if not -m <= n < 0:
        raise DomainError(f"q_negative_degree needs -m <= n < 0, got n={n}, m={m}")
    if _regime(x) is not Regime.INTERVAL:
        raise DomainError("negative-degree Q is implemented on |x| < 1 only")
    s = _sqrt_1mx2(x, s)
    total = sum(c * x**power for power, c in _negative_degree_terms(-n - 1, m))
    return total / s**m


@lru_cache(maxsize=None)
def _minus_m_coefficients(m: int) -> tuple[float, ...]:
    return tuple(
        float(Fraction((-1) ** k * binomial(m - 1, k), 2 * k + 1)) for k in range(m)
    )


def minus_m_odd_poly(m: int, x: float) -> float:
    """The odd polynomial sum_k (-1)^k/(2k+1) C(m-1,k) x^{2k+1}, m >= 1."""
    total = 0.0
    x2 = x * x
    power = x
    for c in _minus_m_coefficients(m):
        total += c * power
        power *= x2
    return total


def q_minus_m_poly(m: int, x: float, *, s: float | None = None) -> float:
    """Q_{-m}^m(x) = (2m-1)!! (1-x^2)^{-m/2} times the odd polynomial, m >= 1, |x| < 1."""
    if m < 1:
        raise UnsupportedIndex("q_minus_m_poly needs m >= 1")
    if _regime(x) is not Regime.INTERVAL:
        raise DomainError("q_minus_m_poly is defined on |x| < 1")
    s = _sqrt_1mx2(x, s)
    return double_factorial(2 * m - 1) * minus_m_odd_poly(m, x) / s**m


def _q_below_order(n: int, m: int, x: float, s: float) -> float:
    """Q_n^m for -m <= n < m on the interval."""
    if n < 0:
        return q_negative_degree(n, m, x, s=s)
    sign = -1.0 if n % 2 else 1.0
    connection = factorial(m + n) * factorial(m - n - 1) * sign
    return q_negative_degree(-n - 1, m, x, s=s) - connection * legendre_p_negative_order(
        n, m, x, s=s
    )


# --- W polynomials ----------------------------------------------------------------------


def _w0_sequence(k_top: int, x: float) -> list[float]:
    """[W_{-1}^0, W_0^0, ..., W_{k_top-1}^0] via (k+1) W_k = (2k+1) x W_{k-1} - k W_{k-2}."""
    out = [0.0] * (k_top + 1)
    if k_top >= 1:
        out[1] = 1.0
    for k in range(1, k_top):
        out[k + 1] = ((2 * k + 1) * x * out[k] - k * out[k - 1]) / (k + 1)
    return out


def _w_window(k_lo: int, k_hi: int, m: int, x: float, s: float, sign: float) -> list[float]:
    """W_{k-1}^m for k = k_lo..k_hi (k_lo >= m) by raising the order from m = 0."""
    row = _w0_sequence(k_hi + m, x)[k_lo:]  # W_{k-1}^0, k = k_lo..k_hi+m
    for j in range(m):
        # entry i of `row` holds W_{k-1}^j with k = k_lo + i
        row = [
            sign * ((k_lo + i - j + 1) * row[i + 1] - (k_lo + i + j + 1) * x * row[i]) / s
            for i in range(len(row) - 1)
        ]
    return row


def w_poly(n: int, m: int, x: float, *, s: float | None = None) -> float:
    """W_{n-1}^m(x), the non-logarithmic part in Q_n^m = P_n^m Q_0 - W_{n-1}^m."""
    if m < 0:
        raise UnsupportedIndex(f"w_poly needs m >= 0, got {m}")
    if m == 0:
        if n < 0:
            raise DomainError("W_{n-1}^0 is defined for n >= 0")
        return _w0_sequence(n, x)[n]
    regime = _regime(x)
    s = _sqrt_1mx2(x, s)
    if n < m:
        if regime is Regime.EXTERIOR:
            if n < 0:
                raise DomainError("negative-degree W is implemented on |x| < 1 only")
            return -legendre_q_sequence(n, m, x)[n]
        return -_q_below_order(n, m, x, s)
    sign = -1.0 if regime is Regime.INTERVAL else 1.0
    return _w_window(n, n, m, x, s, sign)[0]


# --- second kind, exterior --------------------------------------------------------------


def _q0_exterior(xm1: float) -> float:
    return 0.5 * math.log1p(2.0 / xm1)


def _q_exterior_order0(n_top: int, x: float, xm1: float) -> list[float]:
    """[Q_0(x), ..., Q_{n_top}(x)] for x > 1 by Miller's backward recurrence."""
    q0 = _q0_exterior(xm1)
    if n_top == 0:
        return [q0]
    settings = get_settings()
    pad = max(settings.miller_min_padding, math.ceil(10.0 / math.log1p(xm1)))
    if pad > settings.miller_padding_cap:
        acosh_x = math.log1p(xm1 + math.sqrt(xm1 * (x + 1.0)))
        if 2.0 * settings.miller_padding_cap * acosh_x < 36.0:
            logger.debug(f"Miller padding {pad} exceeds cap at x-1={xm1:.3e}; using split form")
            p_row = legendre_p_sequence(n_top, 0, x)
            w_row = _w0_sequence(n_top, x)
            return [p_row[k] * q0 - w_row[k] for k in range(n_top + 1)]
        pad = settings.miller_padding_cap
    top = n_top + pad
    out = [0.0] * (n_top + 1)
    f_next, f = 0.0, 1.0
    for k in range(top, 0, -1):
        f_prev = ((2 * k + 1) * x * f - (k + 1) * f_next) / k
        if k - 1 <= n_top:
            out[k - 1] = f_prev
        f_next, f = f, f_prev
        if abs(f) > _RESCALE_AT:
            f /= _RESCALE_AT
            f_next /= _RESCALE_AT
            for j in range(k - 1, n_top + 1):
                out[j] /= _RESCALE_AT
    scale = q0 / out[0]
    return [v * scale for v in out]


def _q_exterior_sequence(n_max: int, m: int, x: float, xm1: float) -> list[float]:
    row = _q_exterior_order0(n_max + m, x, xm1)
    root = math.sqrt(xm1 * (x + 1.0))
    for j in range(m):
        row = [
            ((k - j + 1) * row[k + 1] - (k + j + 1) * x * row[k]) / root
            for k in range(len(row) - 1)
        ]
    return row


# --- second kind, public ----------------------------------------------------------------


def legendre_q_sequence(
    n_max: int,
    m: int,
    x: float,
    *,
    n_min: int = 0,
    s: float | None = None,
    xm1: float | None = None,
    q0: float | None = None,
) -> list[float]:
    """Return [Q_{n_min}^m(x), ..., Q_{n_max}^m(x)], m >= 0, n_min >= -m.

    ``xm1`` is x - 1 computed without cancellation (exterior only); ``s`` is sqrt|1 - x^2|;
    ``q0`` overrides atanh(x) on the interval when the caller has a more accurate value.
    """
    if m < 0:
        raise UnsupportedIndex(f"legendre_q_sequence needs m >= 0, got {m}")
    if n_min < -m:
        raise DomainError(f"Q_n^m is finite only for n >= -m, got n = {n_min}, m = {m}")
    if n_max < n_min:
        return []
    regime = _regime(x)
    if regime is Regime.EXTERIOR:
        if n_min < 0:
            raise DomainError("negative-degree Q is implemented on |x| < 1 only")
        if xm1 is None:
            xm1 = x - 1.0
        return _q_exterior_sequence(n_max, m, x, xm1)[n_min:]

    s = _sqrt_1mx2(x, s)
    out = [_q_below_order(k, m, x, s) for k in range(n_min, min(n_max, m - 1) + 1)]
    if n_max >= m:
        k_lo = max(m, n_min)
        p_row = legendre_p_sequence(n_max, m, x, s=s)
        w_row = _w_window(k_lo, n_max, m, x, s, -1.0)
        if q0 is None:
            q0 = math.atanh(x)
        out.extend(p_row[k] * q0 - w_row[k - k_lo] for k in range(k_lo, n_max + 1))
    return out


def legendre_q(
    n: int,
    m: int,
    x: float,
    *,
    s: float | None = None,
    xm1: float | None = None,
    q0: float | None = None,
) -> LegendreValue:
    """Q_n^m(x) with its regime; negative m by reflection (n >= |m| only)."""
    if m < 0:
        mm = -m
        if n < mm:
            raise UnsupportedIndex(f"Q_n^-m needs n >= m, got n={n}, m={mm}")
        base = legendre_q(n, mm, x, s=s, xm1=xm1, q0=q0)
        sign = -1.0 if mm % 2 else 1.0
        return LegendreValue(
            sign * factorial(n - mm) / factorial(n + mm) * base.value, base.regime, True
        )
    if n < -m:
        raise DomainError(f"Q_n^m is finite only for n >= -m, got n = {n}, m = {m}")
    regime = _regime(x)
    value = legendre_q_sequence(n, m, x, n_min=n, s=s, xm1=xm1, q0=q0)[0]
    return LegendreValue(value, regime, n >= m)
