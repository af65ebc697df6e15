"""Field points and the coordinate frames used around the focal segment.

All derived quantities are stored hatted (scaled by R). The primed frame is centred at
O' = (0, 0, R), the double-primed frame at O'' = (0, 0, -R). Offset spheroidal coordinates
(xibar, etabar) have focal line OO'; centred spheroidal coordinates (xi, eta) have focal line
O''O'.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from enum import Enum

from .errors import InvalidInput, NegativeRho, NonPositiveScale

logger = logging.getLogger(__name__)


class Frame(str, Enum):
    O = "O"
    PRIME = "O'"
    DOUBLE_PRIME = "O''"


class ShiftTransform(str, Enum):
    R_MINUS_Z = "R-z"
    R_PLUS_Z = "R+z"


@dataclass(frozen=True)
class FieldPoint:
    rho: float
    z: float
    phi: float
    R: float
    rho_h: float
    z_h: float
    # spherical, about O, O' and O''
    r: float
    u: float
    sin_theta: float
    r_prime: float
    u_prime: float
    sin_prime: float
    r_dprime: float
    u_dprime: float
    sin_dprime: float
    # centred spheroidal (focal line O''O')
    xi: float
    xi_m1: float
    eta: float
    sqrt_xi2m1: float
    sqrt_1meta2: float
    # offset spheroidal (focal line OO')
    xibar: float
    xibar_m1: float
    etabar: float
    sqrt_xibar2m1: float
    sqrt_1metabar2: float

    @property
    def on_axis(self) -> bool:
        return self.rho_h == 0.0

    @property
    def offset_ratio(self) -> float:
        """sqrt((1 - etabar^2) / (xibar^2 - 1)), equal to 2 rho / (xibar^2 - 1)."""
        if self.xibar_m1 <= 0.0:
            return math.nan
        return 2.0 * self.rho_h / (self.xibar_m1 * (self.xibar + 1.0))


def _gap_minus(r: float, d: float, rho: float) -> float:
    """r - d for r = hypot(rho, d), without cancellation."""
    if d > 0.0:
        return rho * rho / (r + d) if r + d > 0.0 else 0.0
    return r - d


def _gap_plus(r: float, d: float, rho: float) -> float:
    """r + d for r = hypot(rho, d), without cancellation."""
    if d < 0.0:
        return rho * rho / (r - d) if r - d > 0.0 else 0.0
    return r + d


def _angles(r: float, zc: float, rho: float) -> tuple[float, float]:
    if r == 0.0:
        return math.nan, math.nan
    return zc / r, rho / r


def make_point(rho: float, z: float, phi: float = 0.0, R: float = 1.0) -> FieldPoint:
    """Return a FieldPoint with every frame populated."""
    for name, value in (("rho", rho), ("z", z), ("phi", phi), ("R", R)):
        if not math.isfinite(value):
            raise InvalidInput(f"{name} must be finite, got {value}")
    if R <= 0:
        raise NonPositiveScale(f"Focal scale R must be positive, got {R}")
    if rho < 0:
        raise NegativeRho(f"rho must be non-negative, got {rho}")

    rh = rho / R
    zh = z / R
    r = math.hypot(rh, zh)
    r1 = math.hypot(rh, zh - 1.0)
    r2 = math.hypot(rh, zh + 1.0)
    u, s = _angles(r, zh, rh)
    u1, s1 = _angles(r1, zh - 1.0, rh)
    u2, s2 = _angles(r2, zh + 1.0, rh)

    xibar = r + r1
    xibar_m1 = _gap_minus(r, zh, rh) + _gap_plus(r1, zh - 1.0, rh)
    etabar = min(1.0, max(-1.0, (2.0 * zh - 1.0) / xibar)) if xibar > 0 else 0.0
    sqrt_xibar2m1 = math.sqrt(xibar_m1 * (xibar + 1.0))
    if xibar_m1 > 0.0:
        sqrt_1metabar2 = min(1.0, 2.0 * rh / sqrt_xibar2m1)
    else:
        sqrt_1metabar2 = 2.0 * math.sqrt(max(0.0, zh * (1.0 - zh)))

    xi = 0.5 * (r1 + r2)
    xi_m1 = 0.5 * (_gap_minus(r2, zh + 1.0, rh) + _gap_plus(r1, zh - 1.0, rh))
    eta = min(1.0, max(-1.0, zh / xi))
    sqrt_xi2m1 = math.sqrt(xi_m1 * (xi + 1.0))
    if xi_m1 > 0.0:
        sqrt_1meta2 = min(1.0, rh / sqrt_xi2m1)
    else:
        sqrt_1meta2 = math.sqrt(max(0.0, 1.0 - zh * zh))

    return FieldPoint(
        rho=float(rho), z=float(z), phi=float(phi), R=float(R),
        rho_h=rh, z_h=zh,
        r=r, u=u, sin_theta=s,
        r_prime=r1, u_prime=u1, sin_prime=s1,
        r_dprime=r2, u_dprime=u2, sin_dprime=s2,
        xi=xi, xi_m1=xi_m1, eta=eta, sqrt_xi2m1=sqrt_xi2m1, sqrt_1meta2=sqrt_1meta2,
        xibar=xibar, xibar_m1=xibar_m1, etabar=etabar,
        sqrt_xibar2m1=sqrt_xibar2m1, sqrt_1metabar2=sqrt_1metabar2,
    )


def singular_distance(p: FieldPoint) -> float:
    """Distance (in the units of R) from the point to the segment rho = 0, 0 <= z <= R."""
    if 0.0 <= p.z_h <= 1.0:
        d = p.rho_h
    elif p.z_h > 1.0:
        d = p.r_prime
    else:
        d = p.r
    return d * p.R


def in_singular_tube(p: FieldPoint, eps: float) -> bool:
    return singular_distance(p) <= eps * p.R


def frame_coordinates(p: FieldPoint, frame: Frame) -> tuple[float, float, float]:
    """Return (r_hat, cos theta, sin theta) about the frame's origin."""
    frame = Frame(frame)
    if frame is Frame.O:
        return p.r, p.u, p.sin_theta
    if frame is Frame.PRIME:
        return p.r_prime, p.u_prime, p.sin_prime
    return p.r_dprime, p.u_dprime, p.sin_dprime


def shifted_point(p: FieldPoint, transform: ShiftTransform) -> FieldPoint:
    """Point at which a logopole is evaluated after the z -> R - z or z -> R + z map."""
    if ShiftTransform(transform) is ShiftTransform.R_MINUS_Z:
        return make_point(p.rho, p.R - p.z, p.phi, p.R)
    return make_point(p.rho, p.R + p.z, p.phi, p.R)


def from_offset_spheroidal(xibar: float, etabar: float, R: float = 1.0) -> tuple[float, float]:
    rho = 0.5 * R * math.sqrt(max(0.0, (xibar * xibar - 1.0) * (1.0 - etabar * etabar)))
    z = 0.5 * R * (1.0 + xibar * etabar)
    return rho, z


def from_spheroidal(xi: float, eta: float, R: float = 1.0) -> tuple[float, float]:
    rho = R * math.sqrt(max(0.0, (xi * xi - 1.0) * (1.0 - eta * eta)))
    return rho, R * xi * eta


def characteristic_roots(p: FieldPoint, n: int | None = None, m: int = 0) -> tuple[complex, complex]:
    """Roots of (n-m+1) l^2 - (2n+1) z l + (n+m) r^2 = 0; n=None gives the large-n limit."""
    if n is None:
        return complex(p.z_h, p.rho_h), complex(p.z_h, -p.rho_h)
    a = n - m + 1
    b = -(2 * n + 1) * p.z_h
    c = (n + m) * p.r * p.r
    if a == 0:
        root = -c / b if b != 0 else math.inf
        return complex(root), complex(root)
    disc = cmath.sqrt(b * b - 4 * a * c)
    return (-b + disc) / (2 * a), (-b - disc) / (2 * a)


def recurrence_direction(p: FieldPoint) -> str:
    """'forward' where the degree recurrence is stable upward (r < R), else 'backward'."""
    return "forward" if p.r < 1.0 else "backward"
