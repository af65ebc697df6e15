"""Quadrature ground truth for logopoles, spheroidal and second-kind harmonics.

Everything here integrates a line-source representation directly and shares one adaptive
Gauss-Kronrod (G7/K15) engine. The integrands use scipy.special for the Legendre weights so
the oracle does not lean on ``legendre``.

Tolerances are relative with an absolute floor: a result is converged when
abs_error_est <= tol * max(1, |value|).
"""

from __future__ import annotations

import heapq
import logging
import math
import sys
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.special import eval_legendre, lpmv

from .config import get_settings
from .coords import FieldPoint
from .errors import AxisSingularity, InvalidInput, NoConvergence, OriginSingularity, TailTooLarge
from .harmonics import Focal
from .legendre import double_factorial
from .summation import KahanSummation

logger = logging.getLogger(__name__)

EPS = sys.float_info.epsilon

# Kronrod abscissae on [0, 1); the Gauss-7 points are XGK[1], XGK[3], XGK[5] and the centre.
XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_NODES = np.concatenate([-XGK[:7], [0.0], XGK[6::-1]])
_KRONROD = np.concatenate([WGK[:7], [WGK[7]], WGK[6::-1]])
_GAUSS = np.zeros(15)
_GAUSS[[1, 3, 5]] = WG[:3]
_GAUSS[7] = WG[3]
_GAUSS[[13, 11, 9]] = WG[:3]


class Density(str, Enum):
    MONOMIAL = "monomial"
    LEGENDRE_WEIGHTED = "legendre_weighted"


class Radial(str, Enum):
    INTERIOR = "interior"
    EXTERIOR = "exterior"


@dataclass(frozen=True)
class QuadResult:
    value: float
    abs_error_est: float
    subdivisions: int
    converged: bool
    tolerance: float = 0.0


def _gk15(f: Callable[[np.ndarray], np.ndarray], a: float, b: float) -> tuple[float, float, float]:
    """One G7/K15 panel: (integral, error estimate, integral of |f|)."""
    centre = 0.5 * (a + b)
    half = 0.5 * (b - a)
    fv = np.asarray(f(centre + half * _NODES), dtype=float)
    resk = float(_KRONROD @ fv)
    resg = float(_GAUSS @ fv)
    resabs = float(_KRONROD @ np.abs(fv))
    resasc = float(_KRONROD @ np.abs(fv - 0.5 * resk))
    half = abs(half)
    err = abs((resk - resg) * half)
    resasc *= half
    resabs *= half
    if resasc != 0.0 and err != 0.0:
        err = resasc * min(1.0, (200.0 * err / resasc) ** 1.5)
    if resabs > sys.float_info.min / (50.0 * EPS):
        err = max(50.0 * EPS * resabs, err)
    return resk * (b - a) * 0.5, err, resabs


def adaptive_gauss_kronrod(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    tol: float | None = None,
    breakpoints: Iterable[float] = (),
    max_subdivisions: int | None = None,
    raise_on_failure: bool = True,
) -> QuadResult:
    """Integrate a vectorised ``f`` over [a, b], bisecting the worst panel first.

    Panels start at the given breakpoints; the final sum runs over panels sorted by left
    endpoint so the result does not depend on the bisection order.
    """
    settings = get_settings()
    tol = settings.tol if tol is None else tol
    max_subdivisions = settings.max_subdivisions if max_subdivisions is None else max_subdivisions
    if a == b:
        return QuadResult(0.0, 0.0, 0, True, tol)
    if a > b:
        flipped = adaptive_gauss_kronrod(f, b, a, tol, breakpoints, max_subdivisions, raise_on_failure)
        return QuadResult(-flipped.value, flipped.abs_error_est, flipped.subdivisions,
                          flipped.converged, flipped.tolerance)

    cuts = sorted({a, b, *(x for x in breakpoints if a < x < b)})
    heap: list[tuple[float, float, float, float, float]] = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        value, err, resabs = _gk15(f, lo, hi)
        heapq.heappush(heap, (-err, lo, hi, value, resabs))
    subdivisions = len(heap)

    converged = False
    while True:
        total = math.fsum(item[3] for item in heap)
        err_total = math.fsum(-item[0] for item in heap)
        target = tol * max(1.0, abs(total))
        roundoff = 50.0 * EPS * math.fsum(item[4] for item in heap)
        if err_total <= max(target, roundoff):
            converged = True
            break
        if subdivisions >= max_subdivisions:
            break
        worst = heapq.heappop(heap)
        _, lo, hi, _, _ = worst
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            heapq.heappush(heap, worst)
            logger.debug(f"Panel [{lo}, {hi}] can no longer be bisected")
            break
        for left, right in ((lo, mid), (mid, hi)):
            value, err, resabs = _gk15(f, left, right)
            heapq.heappush(heap, (-err, left, right, value, resabs))
        subdivisions += 1

    acc = KahanSummation()
    acc.extend(item[3] for item in sorted(heap, key=lambda item: item[1]))
    out = QuadResult(acc.value, err_total, subdivisions, converged, target)
    if not converged:
        logger.warning(
            f"Quadrature on [{a}, {b}] stopped after {subdivisions} subdivisions "
            f"with error {err_total:.3e} > {target:.3e}"
        )
        if raise_on_failure:
            raise NoConvergence(
                f"Quadrature did not reach tol {tol:.1e} in {max_subdivisions} subdivisions",
                partial=out,
            )
    return out


# --- kernels ----------------------------------------------------------------------------


def multipole_kernel(m: int, rho: float, zc: np.ndarray) -> np.ndarray:
    """Meridional profile of S_m^m at (rho, zc): (2m-1)!! rho^m / (rho^2 + zc^2)^{m + 1/2}."""
    d2 = rho * rho + zc * zc
    return float(double_factorial(2 * m - 1)) * (rho / d2) ** m / np.sqrt(d2)


def _regular_harmonic(k: int, m: int, r: float, u: float) -> float:
    """r^k P_k^m(u) without the Condon-Shortley phase."""
    return float((-1) ** m * lpmv(m, k, u)) * r**k


def _exterior_harmonic(k: int, m: int, r: float, u: float) -> float:
    """r^{-k-1} P_k^m(u) without the Condon-Shortley phase."""
    return float((-1) ** m * lpmv(m, k, u)) * r ** (-k - 1)


def _peak_breaks(centre: float, rho: float) -> list[float]:
    return [centre, centre - rho, centre + rho, centre - 10.0 * rho, centre + 10.0 * rho]


def _require_off_segment(p: FieldPoint) -> None:
    if p.rho_h == 0.0 and 0.0 <= p.z_h <= 1.0:
        raise InvalidInput("Line-source quadrature needs a point off the source segment")


# --- line multipoles --------------------------------------------------------------------


def quad_line_multipole(
    density: Density,
    n: int,
    m: int,
    p: FieldPoint,
    tol: float | None = None,
    focal: Focal = Focal.CENTRED,
) -> QuadResult:
    """Profile of a line of order-m multipoles.

    MONOMIAL: density v^{n+m} on [0, 1], which is the logopole L_n^m.
    LEGENDRE_WEIGHTED: density (1-v^2)^{m/2} P_n^m(v) on [-1, 1], normalised so the result is
    Q_n^m(xi) P_n^m(eta); ``focal=OFFSET`` rescales the point onto the offset segment.
    """
    if m < 0:
        raise InvalidInput(f"Line multipole order must be non-negative, got {m}")
    density = Density(density)
    if density is Density.MONOMIAL:
        if n + m < 0:
            raise InvalidInput(f"Monomial density needs n + m >= 0, got n={n}, m={m}")
        _require_off_segment(p)
        rho, z = p.rho_h, p.z_h

        def integrand(v):
            return v ** (n + m) * multipole_kernel(m, rho, z - v)

        return adaptive_gauss_kronrod(integrand, 0.0, 1.0, tol, _peak_breaks(z, rho))

    if n < 0:
        raise InvalidInput(f"Legendre-weighted density needs n >= 0, got {n}")
    if Focal(focal) is Focal.OFFSET:
        rho, z = 2.0 * p.rho_h, 2.0 * p.z_h - 1.0
    else:
        rho, z = p.rho_h, p.z_h
    if rho == 0.0 and -1.0 <= z <= 1.0:
        raise InvalidInput("Line-source quadrature needs a point off the focal segment")
    weight = 0.5 * (-1.0) ** m

    def integrand(v):
        p_nm = (-1.0) ** m * lpmv(m, n, v)
        return weight * (1.0 - v * v) ** (0.5 * m) * p_nm * multipole_kernel(m, rho, z - v)

    return adaptive_gauss_kronrod(integrand, -1.0, 1.0, tol, _peak_breaks(z, rho))


def quad_negative_degree(n: int, p: FieldPoint, tol: float | None = None) -> QuadResult:
    """L_{-n} (m = 0, n >= 1): the line density v^{-n} regularised by its first n multipoles.

    Near v = 0 the regularised integrand is replaced by its convergent multipole series.
    """
    if n < 1:
        raise InvalidInput(f"quad_negative_degree takes n >= 1 for L_-n, got {n}")
    _require_off_segment(p)
    rho, z, r = p.rho_h, p.z_h, p.r
    if r == 0.0:
        raise OriginSingularity("Negative-degree logopoles are singular at the origin")
    u = z / r
    settings = get_settings()
    v0 = min(0.25 * r, 1.0)
    ratio = v0 / r

    near = KahanSummation()
    for k in range(n, n + settings.term_cap):
        term = eval_legendre(k, u) / r ** (k + 1) * v0 ** (k - n + 1) / (k - n + 1)
        near.add(float(term))
        # |P_k| <= 1: the remaining terms are bounded by a geometric series in v0 / r
        tail = v0 ** (k - n + 2) / (r ** (k + 2) * (k - n + 2)) / (1.0 - ratio)
        if tail <= settings.series_tol * abs(near.value):
            break
    else:
        raise TailTooLarge("Near-origin series for L_-n did not converge")
    if v0 >= 1.0:
        return QuadResult(near.value, EPS * abs(near.value), 0, True, 0.0)

    s_k = [eval_legendre(k, u) / r ** (k + 1) for k in range(n)]

    def integrand(v):
        taylor = sum(c * v**k for k, c in enumerate(s_k))
        return (1.0 / np.sqrt(rho * rho + (z - v) ** 2) - taylor) / v**n

    far = adaptive_gauss_kronrod(integrand, v0, 1.0, tol, _peak_breaks(z, rho))
    return QuadResult(far.value + near.value, far.abs_error_est, far.subdivisions,
                      far.converged, far.tolerance)


# --- second-kind spherical harmonics ----------------------------------------------------


def _second_kind_parts(n: int, m: int, r: float, u: float, radial: Radial):
    """Subtraction coefficients and the coefficient function for the analytic tails."""
    if radial is Radial.INTERIOR:
        subtract = [(k, _regular_harmonic(k, m, r, u)) for k in range(m, n) if (n - k) % 2]
        coeff = lambda k: _regular_harmonic(k, m, r, u)  # noqa: E731
    else:
        subtract = [(k, _exterior_harmonic(k, m, r, u)) for k in range(m, n) if (n - k) % 2]
        coeff = lambda k: _exterior_harmonic(k, m, r, u)  # noqa: E731
    return subtract, coeff


def _bracket(n: int, m: int, rho: float, z: float, radial: Radial):
    """Paired +v / -v line sources of the second-kind harmonic, as a function of v > 0."""
    if radial is Radial.INTERIOR:
        sign = -((-1.0) ** (n + m))

        def bracket(v):
            return v ** (n + m) * (
                multipole_kernel(m, rho, z - v) + sign * multipole_kernel(m, rho, z + v)
            )
    else:
        sign = (-1.0) ** (m - n - 1)

        def bracket(v):
            return v ** (m - n - 1) * (
                multipole_kernel(m, rho, z - v) + sign * multipole_kernel(m, rho, z + v)
            )

    return bracket


def _tail_series(n: int, coeff, edge: float, interior: bool) -> float:
    """sum over k >= n+1, k-n odd of 2 c_k edge^{+-(k-n)} / (k-n)."""
    settings = get_settings()
    acc = KahanSummation()
    small = 0
    for k in range(n + 1, n + 1 + settings.term_cap, 2):
        power = edge ** (n - k) if interior else edge ** (k - n)
        term = 2.0 * coeff(k) * power / (k - n)
        acc.add(term)
        small = small + 1 if abs(term) <= settings.series_tol * max(abs(acc.value), 1e-300) else 0
        if small >= 3:
            return acc.value
    raise TailTooLarge(f"Analytic tail of the second-kind integral did not converge at {edge}")


def quad_ssh_second_kind(
    n: int, m: int, p: FieldPoint, radial: Radial = Radial.INTERIOR, tol: float | None = None
) -> QuadResult:
    """r^n Q_n^m(u) (INTERIOR) or r^{-n-1} Q_n^m(u) (EXTERIOR) from paired line sources.

    The integrand is regularised by the multipoles that make the bare line integral diverge;
    the part of the symmetric line beyond V (interior) or inside v0 (exterior) is summed
    analytically.
    """
    radial = Radial(radial)
    if m < 0:
        raise InvalidInput(f"Order must be non-negative, got {m}")
    if p.rho_h == 0.0:
        raise AxisSingularity("Second-kind harmonics are singular on the z-axis")
    rho, z, r = p.rho_h, p.z_h, p.r
    u = z / r
    if radial is Radial.EXTERIOR and n < m:
        raise InvalidInput(f"Exterior second-kind quadrature needs n >= m, got n={n}, m={m}")
    if radial is Radial.INTERIOR and n < -m:
        raise InvalidInput(f"Interior second-kind quadrature needs n >= -m, got n={n}, m={m}")

    subtract, coeff = _second_kind_parts(n, m, r, u, radial)
    bracket = _bracket(n, m, rho, z, radial)

    if radial is Radial.INTERIOR:
        edge = 4.0 * max(r, 1.0)

        def integrand(v):
            out = bracket(v)
            for k, c in subtract:
                out = out - 2.0 * c * v ** (n - k - 1)
            return out

        body = adaptive_gauss_kronrod(integrand, 0.0, edge, tol, _peak_breaks(abs(z), rho))
        tail = _tail_series(n, coeff, edge, interior=True)
    else:
        edge = 0.25 * r

        def integrand(t):
            v = edge / t
            out = bracket(v)
            for k, c in subtract:
                out = out - 2.0 * c * v ** (k - n - 1)
            return out * edge / (t * t)

        breaks = [edge / abs(z)] if abs(z) > edge else []
        body = adaptive_gauss_kronrod(integrand, 0.0, 1.0, tol, breaks)
        tail = _tail_series(n, coeff, edge, interior=False)

    value = 0.5 * (body.value + tail)
    return QuadResult(value, 0.5 * body.abs_error_est, body.subdivisions, body.converged,
                      body.tolerance)


def quad_ssh_second_kind_limit(
    n: int,
    m: int,
    p: FieldPoint,
    radial: Radial = Radial.INTERIOR,
    mus: Sequence[float] | None = None,
    tol: float | None = None,
) -> list[tuple[float, QuadResult]]:
    """Finite-mu values of the limit forms: the line cut at mu with its divergent pieces removed.

    Interior cuts the line at |v| = mu (mu -> infinity), exterior at |v| = mu (mu -> 0).
    """
    radial = Radial(radial)
    if mus is None:
        mus = (10.0, 20.0, 40.0) if radial is Radial.INTERIOR else (0.1, 0.05, 0.025)
    if p.rho_h == 0.0:
        raise AxisSingularity("Second-kind harmonics are singular on the z-axis")
    rho, z, r = p.rho_h, p.z_h, p.r
    subtract, _ = _second_kind_parts(n, m, r, z / r, radial)
    bracket = _bracket(n, m, rho, z, radial)

    out = []
    for mu in mus:
        if radial is Radial.INTERIOR:
            body = adaptive_gauss_kronrod(bracket, 0.0, mu, tol, _peak_breaks(abs(z), rho))
            removed = sum(2.0 * c * mu ** (n - k) / (n - k) for k, c in subtract)
        else:

            def integrand(t, mu=mu):
                v = mu / t
                return bracket(v) * mu / (t * t)

            breaks = [mu / abs(z)] if abs(z) > mu else []
            body = adaptive_gauss_kronrod(integrand, 0.0, 1.0, tol, breaks)
            removed = sum(2.0 * c * mu ** (k - n) / (n - k) for k, c in subtract)
        value = 0.5 * (body.value - removed)
        logger.debug(f"Limit form at mu={mu}: {value}")
        out.append((mu, QuadResult(value, 0.5 * body.abs_error_est, body.subdivisions,
                                   body.converged, body.tolerance)))
    return out


# --- angular integrals ------------------------------------------------------------------


def quad_q_minus_m(m: int, theta: float, tol: float | None = None) -> QuadResult:
    """Q_{-m}^m(cos theta) = (2m-1)!! / sin^m(theta) * integral_theta^{pi/2} sin^{2m-1}."""
    if m < 1:
        raise InvalidInput(f"quad_q_minus_m needs m >= 1, got {m}")
    if not 0.0 < theta < math.pi:
        raise InvalidInput(f"theta must lie in (0, pi), got {theta}")
    body = adaptive_gauss_kronrod(lambda t: np.sin(t) ** (2 * m - 1), theta, 0.5 * math.pi, tol)
    scale = float(double_factorial(2 * m - 1)) / math.sin(theta) ** m
    return QuadResult(body.value * scale, body.abs_error_est * scale, body.subdivisions,
                      body.converged, body.tolerance)


def quad_minus_m_angular(m: int, p: FieldPoint, tol: float | None = None) -> QuadResult:
    """L_{-m}^m = (2m-1)!! / rho^m * integral from theta to theta' of sin^{2m-1}."""
    if m < 0:
        raise InvalidInput(f"quad_minus_m_angular needs m >= 0, got {m}")
    if p.rho_h == 0.0:
        raise AxisSingularity("The angular representation needs a point off the z-axis")
    theta = math.atan2(p.rho_h, p.z_h)
    theta_p = math.atan2(p.rho_h, p.z_h - 1.0)
    body = adaptive_gauss_kronrod(lambda t: np.sin(t) ** (2 * m - 1), theta, theta_p, tol)
    scale = float(double_factorial(2 * m - 1)) / p.rho_h**m
    return QuadResult(body.value * scale, body.abs_error_est * scale, body.subdivisions,
                      body.converged, body.tolerance)

