"""Expansions linking logopoles and prolate spheroidal harmonics.

Offset PSSHs (focal line OO') are finite combinations of logopoles; logopoles are infinite
series of offset PSSHs with beta coefficients; centred PSSHs (focal line O''O') are finite
combinations of logopoles evaluated at the shifted points R - z and R + z.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache

import numpy as np
from numpy.polynomial import legendre as npleg

from .config import get_settings
from .coords import FieldPoint, ShiftTransform, shifted_point
from .errors import (
    FocalSegmentSingularity,
    NonConvergence,
    SingularRegion,
    SlowConvergence,
    UnsupportedIndex,
)
from .harmonics import EvalResult, result
from .legendre import (
    factorial,
    legendre_p_negative_order,
    legendre_p_sequence,
    legendre_q_sequence,
)
from .logopoles import LogopoleSpec, logopole
from .summation import KahanSummation

logger = logging.getLogger(__name__)

EPS = np.finfo(float).eps


class CoeffFamily(str, Enum):
    OFFSET_PSSH = "OffsetPSSH"
    LOGOPOLE_FROM_PSSH = "LogopoleFromPSSH"
    BETA = "Beta"
    CENTRED = "Centred"


class BetaRoute(str, Enum):
    NAIVE_SUM = "NaiveSum"
    CLOSED_M1 = "ClosedM1"
    MINUS_M_CONJECTURE = "MinusMConjecture"
    QUADRATURE_PROJECTION = "QuadratureProjection"


class DerivativeOperator(str, Enum):
    DZ = "Dz"
    RDR = "RDr"
    DPLUS = "DPlus"


@dataclass(frozen=True)
class ExpansionCoeffs:
    family: CoeffFamily
    n: int
    m: int
    indices: tuple[int, ...]
    values: tuple[float, ...]
    unstable: tuple[bool, ...] = field(default=())
    truncation_error: float = 0.0

    def as_dict(self) -> dict[int, float]:
        return dict(zip(self.indices, self.values))

    def __len__(self) -> int:
        return len(self.values)


# --- offset PSSHs from logopoles --------------------------------------------------------


def pssh_offset_coefficients(n: int, m: int) -> ExpansionCoeffs:
    """c_p with Q_n^m(xibar) P_n^m(etabar) = sum_{p=0}^n c_p L_p^m."""
    if m < 0 or n < m:
        raise UnsupportedIndex(f"Offset PSSH coefficients need n >= m >= 0, got n={n}, m={m}")
    scale = Fraction(factorial(n + m), factorial(n - m))
    values = []
    for q in range(n + 1):
        sign = -1 if (q + n) % 2 else 1
        c = scale * sign * factorial(n + q)
        c /= 2 * factorial(q) * factorial(q + m) * factorial(n - q)
        values.append(float(c))
    return ExpansionCoeffs(CoeffFamily.OFFSET_PSSH, n, m, tuple(range(n + 1)), tuple(values))


def pssh_offset_from_logopoles(n: int, m: int, p: FieldPoint) -> EvalResult:
    """Q_n^m(xibar) P_n^m(etabar) e^{i m phi} as a finite sum of logopoles L_0^m .. L_n^m."""
    coeffs = pssh_offset_coefficients(n, m)
    acc = KahanSummation()
    bound = 0.0
    err = 0.0
    for q, c in zip(coeffs.indices, coeffs.values):
        lq = logopole(LogopoleSpec(q, m), p)
        term = c * _profile(lq, m, p)
        acc.add(term)
        bound += abs(term)
        err += abs(c) * lq.est_error
    return result(acc.value, m, p, "pssh_offset_from_logopoles", err + EPS * bound, n + 1)


def _profile(value: EvalResult, m: int, p: FieldPoint) -> float:
    """Strip the e^{i m phi} phase off a logopole result."""
    if m == 0 or p.phi == 0.0:
        return value.value.real
    return (value.value * complex(math.cos(m * p.phi), -math.sin(m * p.phi))).real


def logopole_offset_pssh_coefficients(n: int) -> ExpansionCoeffs:
    """d_k with L_n^0 = sum_{k=0}^n d_k Q_k(xibar) P_k(etabar)."""
    if n < 0:
        raise UnsupportedIndex(f"The finite PSSH sum needs n >= 0, got {n}")
    values = tuple(
        float(
            Fraction(
                2 * factorial(n) ** 2 * (2 * k + 1), factorial(n - k) * factorial(n + k + 1)
            )
        )
        for k in range(n + 1)
    )
    return ExpansionCoeffs(CoeffFamily.LOGOPOLE_FROM_PSSH, n, 0, tuple(range(n + 1)), values)


def logopole_from_offset_pssh(n: int, p: FieldPoint) -> EvalResult:
    """L_n^0 as a finite sum of offset PSSHs."""
    if p.xibar_m1 <= 0.0:
        raise SingularRegion("Offset PSSHs are singular on the segment")
    coeffs = logopole_offset_pssh_coefficients(n)
    q_row = legendre_q_sequence(n, 0, p.xibar, s=p.sqrt_xibar2m1, xm1=p.xibar_m1)
    p_row = legendre_p_sequence(n, 0, p.etabar, s=p.sqrt_1metabar2)
    acc = KahanSummation()
    bound = 0.0
    for k, d in zip(coeffs.indices, coeffs.values):
        term = d * q_row[k] * p_row[k]
        acc.add(term)
        bound += abs(term)
    return result(acc.value, 0, p, "logopole_from_offset_pssh", 4 * EPS * bound, n + 1)


def legendre_shifted_power_expansion(n: int, m: int, v: float) -> float:
    """(1 - v^2)^{m/2} P_n^m(v) expanded in powers of (v + 1)."""
    if m < 0 or n < m:
        raise UnsupportedIndex(f"Shifted power expansion needs n >= m >= 0, got n={n}, m={m}")
    # exact rational arithmetic throughout, rounded once at the end
    scale = Fraction(factorial(n + m), factorial(n - m))
    shifted = Fraction(v) + 1
    total = Fraction(0)
    for q in reversed(range(n + 1)):
        sign = -1 if (q + n + m) % 2 else 1
        c = scale * sign * factorial(n + q)
        c /= 2**q * factorial(q) * factorial(q + m) * factorial(n - q)
        total = total * shifted + c
    return float(total * shifted**m)


# --- beta coefficients ------------------------------------------------------------------


def _beta_naive(n: int, m: int, q: int) -> float:
    # plain float arithmetic on purpose: the alternating sum loses digits for large q
    total = 0.0
    ratio = factorial(q - m) / factorial(q + m)
    for k in range(m, q + 1):
        sign = -1.0 if (q + k + m) % 2 else 1.0
        term = (2 * q + 1) / (n + k + 1) * 2.0 * float(factorial(q + k)) * sign
        term /= float(factorial(q - k)) * float(factorial(k)) * float(factorial(k - m))
        total += term * ratio
    return total


def _beta_closed_m1(n: int, q: int) -> float:
    base = -2.0 * (2 * q + 1) / (q * (q + 1))
    if q > n:
        return base
    frac = Fraction(factorial(n) * factorial(n + 1), factorial(n + q + 1) * factorial(n - q))
    return base * float(1 - frac)


def _beta_minus_m(m: int, q: int) -> float:
    sign = -1.0 if m % 2 else 1.0
    parity = 1 + (-1) ** (q + m)
    return sign * 2.0 * parity * (2 * q + 1) / (factorial(m - 1) * (q - m + 1) * (q + m))


@lru_cache(maxsize=4096)
def _beta_projection(n: int, m: int, q: int) -> float:
    """Project (1 + v)^{n+m} onto d^m P_q / dv^m; the integrand is a polynomial of degree n + q."""
    nodes, weights = npleg.leggauss((n + q) // 2 + 8)
    basis = np.zeros(q + 1)
    basis[q] = 1.0
    derivative = npleg.legval(nodes, npleg.legder(basis, m)) if m else npleg.legval(nodes, basis)
    integral = float(np.dot(weights, (1.0 + nodes) ** (n + m) * derivative))
    sign = -1.0 if m % 2 else 1.0
    return sign * factorial(q - m) / factorial(q + m) * (2 * q + 1) * 2.0 ** (-n) * integral


def _beta_value(n: int, m: int, q: int, route: BetaRoute) -> float:
    if route is BetaRoute.NAIVE_SUM:
        return _beta_naive(n, m, q)
    if route is BetaRoute.CLOSED_M1:
        return _beta_closed_m1(n, q)
    if route is BetaRoute.MINUS_M_CONJECTURE:
        return _beta_minus_m(m, q)
    return _beta_projection(n, m, q)


def beta_coefficients(
    n: int, m: int, p_max: int, route: BetaRoute = BetaRoute.QUADRATURE_PROJECTION
) -> ExpansionCoeffs:
    """beta_{np}^m for p = m .. p_max with L_n^m = sum_p beta_{np}^m Q_p^m(xibar) P_p^m(etabar)."""
    route = BetaRoute(route)
    if m < 0 or n < -m:
        raise UnsupportedIndex(f"beta coefficients need m >= 0 and n >= -m, got n={n}, m={m}")
    if p_max < m:
        raise UnsupportedIndex(f"p_max must be at least m = {m}, got {p_max}")
    if route is BetaRoute.CLOSED_M1 and (m != 1 or n < 0):
        raise UnsupportedIndex(f"ClosedM1 covers m = 1, n >= 0 only, got n={n}, m={m}")
    if route is BetaRoute.MINUS_M_CONJECTURE and (m < 1 or n != -m):
        raise UnsupportedIndex(f"MinusMConjecture covers n = -m, m >= 1 only, got n={n}, m={m}")
    limit = get_settings().beta_unstable_p
    indices = tuple(range(max(m, 1) if route is BetaRoute.CLOSED_M1 else m, p_max + 1))
    values = tuple(_beta_value(n, m, q, route) for q in indices)
    unstable = tuple(route is BetaRoute.NAIVE_SUM and q > limit for q in indices)
    if any(unstable):
        logger.warning(
            f"NaiveSum beta coefficients for n={n}, m={m} beyond p={limit} lose precision"
        )
    return ExpansionCoeffs(CoeffFamily.BETA, n, m, indices, values, unstable)


def beta_series_value(
    n: int, m: int, p: FieldPoint, p_cap: int | None = None
) -> tuple[float, float, int]:
    """Sum beta_{np}^m Q_p^m(xibar) P_p^m(etabar) until beta_stop_run consecutive small terms."""
    settings = get_settings()
    p_cap = p_cap or settings.beta_p_cap
    if p.xibar_m1 <= 0.0:
        raise SingularRegion("Offset PSSHs are singular on the segment")
    route = (
        BetaRoute.CLOSED_M1 if m == 1 and n >= 0 else BetaRoute.QUADRATURE_PROJECTION
    )
    q_row = legendre_q_sequence(p_cap, m, p.xibar, s=p.sqrt_xibar2m1, xm1=p.xibar_m1)
    p_row = legendre_p_sequence(p_cap, m, p.etabar, s=p.sqrt_1metabar2)
    acc = KahanSummation()
    run = 0
    last = 0.0
    for q in range(m, p_cap + 1):
        term = _beta_value(n, m, q, route) * q_row[q] * p_row[q]
        acc.add(term)
        last = abs(term)
        run = run + 1 if last <= 1e-14 * abs(acc.value) else 0
        if run >= settings.beta_stop_run:
            return acc.value, last * settings.beta_stop_run + EPS * abs(acc.value), q - m + 1
    raise NonConvergence(
        f"beta series for L_{n}^{m} did not settle by p = {p_cap}", partial=acc.value
    )


# --- centred PSSHs from shifted logopoles -----------------------------------------------


def centred_pssh_from_logopoles(n: int, m: int, p: FieldPoint) -> EvalResult:
    """Q_n^m(xi) P_n^{-m}(eta) e^{i m phi} from logopoles at (rho, R - z) and (rho, R + z)."""
    if m < 0 or n < m:
        raise UnsupportedIndex(f"centred_pssh_from_logopoles needs n >= m >= 0, got n={n}, m={m}")
    if p.xi_m1 <= 0.0:
        raise FocalSegmentSingularity("Centred PSSHs are singular on the focal segment")
    flipped = shifted_point(p, ShiftTransform.R_MINUS_Z)
    raised = shifted_point(p, ShiftTransform.R_PLUS_Z)
    parity = -1.0 if (n + m) % 2 else 1.0
    acc = KahanSummation()
    bound = 0.0
    err = 0.0
    for q in range(n + 1):
        sign = -1.0 if q % 2 else 1.0
        w = sign * factorial(n + q) / (
            2 ** (q + 1) * factorial(q) * factorial(q + m) * factorial(n - q)
        )
        spec = LogopoleSpec(q, m)
        a = logopole(spec, flipped)
        b = logopole(spec, raised)
        term = w * (_profile(a, m, flipped) + parity * _profile(b, m, raised))
        acc.add(term)
        bound += abs(term)
        err += abs(w) * (a.est_error + b.est_error)
    return result(acc.value, m, p, "centred_pssh_from_logopoles", err + EPS * bound, 2 * (n + 1))


# --- derivative series ------------------------------------------------------------------


def _p_negative_row(k_max: int, m: int, eta: float, s: float) -> list[float]:
    """[P_k^{-m}(eta) for k = 0..k_max]."""
    row = legendre_p_sequence(k_max, m, eta, s=s)
    sign = -1.0 if m % 2 else 1.0
    out = []
    for k in range(k_max + 1):
        if k >= m:
            out.append(sign * factorial(k - m) / factorial(k + m) * row[k])
        else:
            out.append(legendre_p_negative_order(k, m, eta, s=s))
    return out


def pssh_derivative_series(
    n: int,
    m: int,
    p: FieldPoint,
    operator: DerivativeOperator = DerivativeOperator.DZ,
    k_max: int | None = None,
    tol: float | None = None,
) -> EvalResult:
    """R d/dz, r d/dr or R d_+ applied to Q_n^m(xi) P_n^{-m}(eta) e^{i m phi}, as a series.

    Dz and DPlus keep the degrees k > n with k + n odd; RDr keeps k >= n with k + n even.
    """
    operator = DerivativeOperator(operator)
    settings = get_settings()
    tol = settings.tol if tol is None else tol
    if m < 0 or n < 0:
        raise UnsupportedIndex(f"pssh_derivative_series needs n >= 0 and m >= 0, got n={n}, m={m}")
    if p.xi_m1 <= 0.0:
        raise FocalSegmentSingularity("The derivative series needs xi > 1")
    # two degrees per step shrink Q_k(xi) by about (xi - sqrt(xi^2 - 1))^2
    ratio = (p.xi - p.sqrt_xi2m1) ** 2
    if k_max is None:
        steps = math.ceil(math.log(tol) / math.log(ratio)) + 10 if ratio > 0.0 else 10
        k_max = min(n + 2 * steps + 1, settings.term_cap)
    if k_max < n + 1:
        raise UnsupportedIndex(f"k_max must be at least n + 1 = {n + 1}, got {k_max}")

    order = m + 1 if operator is DerivativeOperator.DPLUS else m
    q_row = legendre_q_sequence(k_max, order, p.xi, s=p.sqrt_xi2m1, xm1=p.xi_m1)
    p_row = _p_negative_row(k_max, order, p.eta, p.sqrt_1meta2)
    start = n if operator is DerivativeOperator.RDR else n + 1
    acc = KahanSummation()
    last = 0.0
    terms = 0
    for k in range(start, k_max + 1, 2):
        weight = 2 * k + 1 - (n if k == n else 0)
        last = -weight * q_row[k] * p_row[k]
        acc.add(last)
        terms += 1
    tail = abs(last) * ratio / (1.0 - ratio)
    if tail > tol * max(abs(acc.value), 1e-300):
        raise SlowConvergence(
            f"{operator.value} series for Q_{n}^{m} P_{n}^-{m} still has tail {tail:.3g} at k={k_max}",
            partial=acc.value,
        )
    return result(acc.value, order, p, f"pssh_derivative_{operator.value}", tail, terms)
