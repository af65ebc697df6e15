"""Solid spherical harmonics of both kinds and prolate spheroidal solid harmonics.

Every function here returns the real meridional profile (phi = 0) multiplied by e^{i m phi}.
Row helpers (``first_kind_row`` and friends) return plain floats for the sums in
``logopoles`` and ``relations``.
"""

from __future__ import annotations

import cmath
import logging
import math
import sys
from dataclasses import dataclass, replace
from enum import Enum

from .coords import FieldPoint, Frame, frame_coordinates
from .errors import (
    AxisSingularity,
    FocalSegmentSingularity,
    OriginSingularity,
    SingularArgument,
    UnsupportedIndex,
)
from .legendre import (
    binomial,
    factorial,
    legendre_p,
    legendre_p_negative_order,
    legendre_p_sequence,
    legendre_q_sequence,
)
from .summation import KahanSummation

logger = logging.getLogger(__name__)

EPS = sys.float_info.epsilon


class Focal(str, Enum):
    CENTRED = "centred"
    OFFSET = "offset"


@dataclass(frozen=True)
class EvalResult:
    value: complex
    method: str
    est_error: float = 0.0
    terms_used: int = 0

    @property
    def real(self) -> float:
        return self.value.real

    def scaled(self, factor: float, method: str | None = None) -> "EvalResult":
        return replace(
            self,
            value=self.value * factor,
            est_error=self.est_error * abs(factor),
            method=method or self.method,
        )


def phase(m: int, phi: float) -> complex:
    if m == 0 or phi == 0.0:
        return complex(1.0, 0.0)
    return cmath.exp(1j * m * phi)


def result(profile: float, m: int, p: FieldPoint, method: str, err: float = 0.0, terms: int = 0):
    """Wrap a real profile value into an EvalResult carrying the e^{imphi} phase."""
    return EvalResult(profile * phase(m, p.phi), method, abs(err), terms)


def frame_axial(p: FieldPoint, frame: Frame) -> float:
    """Hatted z measured from the frame's origin."""
    frame = Frame(frame)
    if frame is Frame.O:
        return p.z_h
    if frame is Frame.PRIME:
        return p.z_h - 1.0
    return p.z_h + 1.0


def axial_q0(zc: float, rho: float) -> float:
    """Q_0(cos theta) = atanh(zc / r) written as asinh(zc / rho), exact near the axis."""
    if rho == 0.0:
        raise AxisSingularity("Q_0(cos theta) is singular on the z-axis")
    return math.asinh(zc / rho)


# --- rows -------------------------------------------------------------------------------


def first_kind_row(k_max: int, m: int, r: float, u: float, s: float) -> list[float]:
    """[r^{-k-1} P_k^m(u) for k = 0..k_max]."""
    if k_max < 0:
        return []
    if r == 0.0:
        raise OriginSingularity("Exterior harmonic evaluated at its origin")
    p_row = legendre_p_sequence(k_max, m, u, s=s)
    out = []
    scale = 1.0 / r
    for value in p_row:
        out.append(value * scale)
        scale /= r
    return out


def regular_row(k_max: int, m: int, r: float, u: float, s: float) -> list[float]:
    """[r^k P_k^m(u) for k = 0..k_max]."""
    if k_max < 0:
        return []
    if r == 0.0:
        return [1.0 if (k == 0 and m == 0) else 0.0 for k in range(k_max + 1)]
    p_row = legendre_p_sequence(k_max, m, u, s=s)
    out = []
    power = 1.0
    for value in p_row:
        out.append(value * power)
        power *= r
    return out


def second_kind_row(
    k_min: int, k_max: int, m: int, r: float, zc: float, rho: float
) -> list[float]:
    """[r^k Q_k^m(u) for k = k_min..k_max] with u = zc / r, off the axis."""
    if rho == 0.0:
        raise AxisSingularity("Second-kind harmonic evaluated on the z-axis")
    if k_max < k_min:
        return []
    u = zc / r
    s = rho / r
    try:
        q_row = legendre_q_sequence(k_max, m, u, n_min=k_min, s=s, q0=axial_q0(zc, rho))
    except SingularArgument as e:
        raise AxisSingularity(f"Second-kind harmonic too close to the z-axis: {e}") from e
    power = r**k_min
    out = []
    for value in q_row:
        out.append(value * power)
        power *= r
    return out


def _frame_row_args(p: FieldPoint, frame: Frame) -> tuple[float, float, float, float]:
    r, u, s = frame_coordinates(p, frame)
    return r, u, s, frame_axial(p, frame)


# --- solid spherical harmonics ----------------------------------------------------------


def ssh_exterior(n: int, m: int, p: FieldPoint, frame: Frame = Frame.O) -> EvalResult:
    """S_n^m = r^{-n-1} P_n^m(cos theta) e^{i m phi} about the frame's origin."""
    if m < 0 or n < 0:
        raise UnsupportedIndex(f"ssh_exterior needs n >= 0 and m >= 0, got n={n}, m={m}")
    r, u, s = frame_coordinates(p, frame)
    if r == 0.0:
        raise OriginSingularity(f"S_{n}^{m} is singular at the origin of frame {Frame(frame).value}")
    value = r ** (-n - 1) * legendre_p(n, m, u, s=s)
    return result(value, m, p, "ssh_exterior")


def ssh_interior(n: int, m: int, p: FieldPoint, frame: Frame = Frame.O) -> EvalResult:
    """r^n P_n^m(cos theta) e^{i m phi}."""
    if m < 0 or n < 0:
        raise UnsupportedIndex(f"ssh_interior needs n >= 0 and m >= 0, got n={n}, m={m}")
    r, u, s = frame_coordinates(p, frame)
    if r == 0.0:
        return result(1.0 if (n == 0 and m == 0) else 0.0, m, p, "ssh_interior")
    return result(r**n * legendre_p(n, m, u, s=s), m, p, "ssh_interior")


def ssh_second_kind(n: int, m: int, p: FieldPoint, frame: Frame = Frame.O) -> EvalResult:
    """S~_n^m = r^n Q_n^m(cos theta) e^{i m phi}, singular on the whole z-axis."""
    if m < 0:
        raise UnsupportedIndex(f"ssh_second_kind needs m >= 0, got {m}")
    if n < -m:
        raise UnsupportedIndex(f"S~_n^m needs n >= -m, got n={n}, m={m}")
    r, _, _, zc = _frame_row_args(p, frame)
    if r == 0.0:
        raise OriginSingularity("S~_n^m evaluated at the frame origin")
    if p.rho_h == 0.0:
        raise AxisSingularity(f"S~_{n}^{m} is singular on the z-axis")
    value = second_kind_row(n, n, m, r, zc, p.rho_h)[0]
    return result(value, m, p, "ssh_second_kind")


def translate_regular(n: int, m: int, p: FieldPoint) -> EvalResult:
    """sum_k C(n+m, k+m) r'^k P_k^m(u'), which reproduces r^n P_n^m(u)."""
    if m < 0 or n < m:
        raise UnsupportedIndex(f"translate_regular needs n >= m >= 0, got n={n}, m={m}")
    r1, u1, s1 = frame_coordinates(p, Frame.PRIME)
    row = regular_row(n, m, r1, u1, s1)
    acc = KahanSummation()
    bound = 0.0
    for k in range(m, n + 1):
        term = binomial(n + m, k + m) * row[k]
        acc.add(term)
        bound += abs(term)
    return result(acc.value, m, p, "translate_regular", EPS * bound, n - m + 1)


# --- prolate spheroidal harmonics -------------------------------------------------------


def _spheroidal(p: FieldPoint, focal: Focal) -> tuple[float, float, float, float, float]:
    """(xi, xi - 1, sqrt(xi^2 - 1), eta, sqrt(1 - eta^2)) for the requested focal segment."""
    if Focal(focal) is Focal.CENTRED:
        return p.xi, p.xi_m1, p.sqrt_xi2m1, p.eta, p.sqrt_1meta2
    return p.xibar, p.xibar_m1, p.sqrt_xibar2m1, p.etabar, p.sqrt_1metabar2


def _q_exterior(n: int, m: int, p: FieldPoint, focal: Focal) -> float:
    xi, xi_m1, sx, _, _ = _spheroidal(p, focal)
    if xi_m1 <= 0.0:
        raise FocalSegmentSingularity(f"Q_n^m(xi) is singular on the {Focal(focal).value} segment")
    return legendre_q_sequence(n, m, xi, n_min=n, s=sx, xm1=xi_m1)[0]


def pssh(n: int, m: int, p: FieldPoint, focal: Focal = Focal.CENTRED) -> EvalResult:
    """Q_n^m(xi) P_n^m(eta) e^{i m phi}."""
    if m < 0 or n < 0:
        raise UnsupportedIndex(f"pssh needs n >= 0 and m >= 0, got n={n}, m={m}")
    _, _, _, eta, seta = _spheroidal(p, focal)
    p_part = legendre_p(n, m, eta, s=seta)
    q_part = _q_exterior(n, m, p, focal)
    return result(q_part * p_part, m, p, f"pssh_{Focal(focal).value}")


def pssh_negative_order(n: int, m: int, p: FieldPoint, focal: Focal = Focal.CENTRED) -> EvalResult:
    """Q_n^m(xi) P_n^{-m}(eta) e^{i m phi}."""
    if m < 0 or n < 0:
        raise UnsupportedIndex(f"pssh_negative_order needs n >= 0 and m >= 0, got n={n}, m={m}")
    _, _, _, eta, seta = _spheroidal(p, focal)
    p_part = legendre_p_negative_order(n, m, eta, s=seta)
    q_part = _q_exterior(n, m, p, focal)
    return result(q_part * p_part, m, p, f"pssh_negative_order_{Focal(focal).value}")


def _offset_weight(n: int, k: int, m: int) -> float:
    """(n+k)! / (k! (k+m)! (n-k)!)."""
    return factorial(n + k) / (factorial(k) * factorial(k + m) * factorial(n - k))


def _both_frames(p: FieldPoint):
    r1, _, _, z1 = _frame_row_args(p, Frame.PRIME)
    r2, _, _, z2 = _frame_row_args(p, Frame.DOUBLE_PRIME)
    return r1, z1, r2, z2


def pssh_from_offset_q(n: int, m: int, p: FieldPoint) -> EvalResult:
    """Q_n^m(xi) P_n^{-m}(eta) e^{i m phi} from second-kind harmonics about O' and O''.

    The O' and O'' groups are accumulated separately and subtracted last; their axial
    singularities cancel for |z| > R.
    """
    if m < 0 or n < m:
        raise UnsupportedIndex(f"pssh_from_offset_q needs n >= m >= 0, got n={n}, m={m}")
    if p.rho_h == 0.0:
        raise AxisSingularity("pssh_from_offset_q needs a point off the z-axis")
    r1, z1, r2, z2 = _both_frames(p)
    row1 = second_kind_row(0, n, m, r1, z1, p.rho_h)
    row2 = second_kind_row(0, n, m, r2, z2, p.rho_h)
    upper, lower = KahanSummation(), KahanSummation()
    order_sign = -1.0 if m % 2 else 1.0
    bound = 0.0
    for k in range(n + 1):
        w = 0.5 * _offset_weight(n, k, m) * 0.5**k
        sign = -1.0 if (n + k + m) % 2 else 1.0
        t2 = sign * w * row2[k]
        t1 = order_sign * w * row1[k]
        upper.add(t2)
        lower.add(t1)
        bound += abs(t1) + abs(t2)
    value = upper.value - lower.value
    return result(value, m, p, "pssh_from_offset_q", EPS * bound * (n + 1), 2 * (n + 1))


def regular_pssh(n: int, m: int, p: FieldPoint) -> EvalResult:
    """P_n^m(xi) P_n^{-m}(eta) e^{i m phi}, the regular centred spheroidal harmonic."""
    if m < 0 or n < 0:
        raise UnsupportedIndex(f"regular_pssh needs n >= 0 and m >= 0, got n={n}, m={m}")
    value = legendre_p(n, m, p.xi, s=p.sqrt_xi2m1) * legendre_p_negative_order(
        n, m, p.eta, s=p.sqrt_1meta2
    )
    return result(value, m, p, "regular_pssh")


def regular_pssh_expansion(n: int, m: int, p: FieldPoint) -> EvalResult:
    """P_n^m(xi) P_n^{-m}(eta) as a finite sum of regular harmonics about O''."""
    if m < 0 or n < m:
        raise UnsupportedIndex(f"regular_pssh_expansion needs n >= m >= 0, got n={n}, m={m}")
    r2, u2, s2 = frame_coordinates(p, Frame.DOUBLE_PRIME)
    row = regular_row(n, m, 0.5 * r2, u2, s2)
    acc = KahanSummation()
    bound = 0.0
    for k in range(m, n + 1):
        sign = -1.0 if (n + k + m) % 2 else 1.0
        term = sign * _offset_weight(n, k, m) * row[k]
        acc.add(term)
        bound += abs(term)
    return result(acc.value, m, p, "regular_pssh_expansion", EPS * bound, n - m + 1)


def pssh_log_part(n: int, m: int, p: FieldPoint) -> EvalResult:
    """P_n^m(xi) Q_0(xi) P_n^{-m}(eta) e^{i m phi}, the logarithmic part of the centred PSSH."""
    if m < 0 or n < 0:
        raise UnsupportedIndex(f"pssh_log_part needs n >= 0 and m >= 0, got n={n}, m={m}")
    if p.xi_m1 <= 0.0:
        raise FocalSegmentSingularity("Q_0(xi) is singular on the centred focal segment")
    q0 = 0.5 * math.log1p(2.0 / p.xi_m1)
    regular = legendre_p(n, m, p.xi, s=p.sqrt_xi2m1) * legendre_p_negative_order(
        n, m, p.eta, s=p.sqrt_1meta2
    )
    return result(q0 * regular, m, p, "pssh_log_part")


def pssh_log_part_expansion(n: int, m: int, p: FieldPoint) -> EvalResult:
    """The logarithmic part expanded over P_k^m(u) Q_0(u) about O' and O''."""
    if m < 0 or n < m:
        raise UnsupportedIndex(f"pssh_log_part_expansion needs n >= m >= 0, got n={n}, m={m}")
    if p.rho_h == 0.0:
        raise AxisSingularity("pssh_log_part_expansion needs a point off the z-axis")
    r1, u1, s1 = frame_coordinates(p, Frame.PRIME)
    r2, u2, s2 = frame_coordinates(p, Frame.DOUBLE_PRIME)
    row1 = regular_row(n, m, 0.5 * r1, u1, s1)
    row2 = regular_row(n, m, 0.5 * r2, u2, s2)
    q1 = axial_q0(frame_axial(p, Frame.PRIME), p.rho_h)
    q2 = axial_q0(frame_axial(p, Frame.DOUBLE_PRIME), p.rho_h)
    upper, lower = KahanSummation(), KahanSummation()
    order_sign = -1.0 if m % 2 else 1.0
    bound = 0.0
    for k in range(m, n + 1):
        w = 0.5 * _offset_weight(n, k, m)
        sign = -1.0 if (n + k + m) % 2 else 1.0
        t2 = sign * w * row2[k] * q2
        t1 = order_sign * w * row1[k] * q1
        upper.add(t2)
        lower.add(t1)
        bound += abs(t1) + abs(t2)
    value = upper.value - lower.value
    return result(value, m, p, "pssh_log_part_expansion", EPS * bound * (n + 1), 2 * (n - m + 1))
