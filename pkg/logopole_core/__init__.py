"""
logopole_core: logopoles L_n^m, Legendre functions of both kinds, solid spherical and prolate
spheroidal harmonics, and quadrature oracles for all of them.
"""

from .config import Settings, current_selection, get_settings, load_settings, reset_settings, use_settings
from .coords import (
    FieldPoint,
    Frame,
    ShiftTransform,
    characteristic_roots,
    from_offset_spheroidal,
    from_spheroidal,
    frame_coordinates,
    in_singular_tube,
    make_point,
    recurrence_direction,
    shifted_point,
    singular_distance,
)
from .errors import (
    AxisSingularity,
    ConvergenceError,
    DivergentRegion,
    DomainError,
    FocalSegmentSingularity,
    InvalidDegree,
    InvalidInput,
    LogopoleError,
    NegativeRho,
    NoConvergence,
    NonConvergence,
    NonPositiveScale,
    OriginSingularity,
    OutputError,
    PoleDivision,
    RegionViolation,
    SingularArgument,
    SingularityError,
    SingularRegion,
    SlowConvergence,
    TailTooLarge,
    UnsupportedIndex,
)
from .harmonics import (
    EvalResult,
    Focal,
    pssh,
    pssh_from_offset_q,
    pssh_log_part,
    pssh_log_part_expansion,
    pssh_negative_order,
    regular_pssh,
    regular_pssh_expansion,
    ssh_exterior,
    ssh_interior,
    ssh_second_kind,
    translate_regular,
)
from .legendre import (
    LegendreValue,
    Regime,
    binomial,
    double_factorial,
    factorial,
    legendre_p,
    legendre_p_negative_order,
    legendre_p_sequence,
    legendre_q,
    legendre_q_sequence,
    q_minus_m_poly,
    q_negative_degree,
    w_poly,
)
from .logopoles import (
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
from .oracle import (
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
from .relations import (
    BetaRoute,
    CoeffFamily,
    DerivativeOperator,
    ExpansionCoeffs,
    beta_coefficients,
    centred_pssh_from_logopoles,
    legendre_shifted_power_expansion,
    logopole_from_offset_pssh,
    logopole_offset_pssh_coefficients,
    pssh_derivative_series,
    pssh_offset_coefficients,
    pssh_offset_from_logopoles,
)
from .summation import KahanSummation, compensated_sum

__all__ = [
    "Settings",
    "current_selection",
    "get_settings",
    "load_settings",
    "reset_settings",
    "use_settings",
    "FieldPoint",
    "Frame",
    "ShiftTransform",
    "characteristic_roots",
    "from_offset_spheroidal",
    "from_spheroidal",
    "frame_coordinates",
    "in_singular_tube",
    "make_point",
    "recurrence_direction",
    "shifted_point",
    "singular_distance",
    "AxisSingularity",
    "ConvergenceError",
    "DivergentRegion",
    "DomainError",
    "FocalSegmentSingularity",
    "InvalidDegree",
    "InvalidInput",
    "LogopoleError",
    "NegativeRho",
    "NoConvergence",
    "NonConvergence",
    "NonPositiveScale",
    "OriginSingularity",
    "OutputError",
    "PoleDivision",
    "RegionViolation",
    "SingularArgument",
    "SingularityError",
    "SingularRegion",
    "SlowConvergence",
    "TailTooLarge",
    "UnsupportedIndex",
    "EvalResult",
    "Focal",
    "pssh",
    "pssh_from_offset_q",
    "pssh_log_part",
    "pssh_log_part_expansion",
    "pssh_negative_order",
    "regular_pssh",
    "regular_pssh_expansion",
    "ssh_exterior",
    "ssh_interior",
    "ssh_second_kind",
    "translate_regular",
    "LegendreValue",
    "Regime",
    "binomial",
    "double_factorial",
    "factorial",
    "legendre_p",
    "legendre_p_negative_order",
    "legendre_p_sequence",
    "legendre_q",
    "legendre_q_sequence",
    "q_minus_m_poly",
    "q_negative_degree",
    "w_poly",
    "Direction",
    "LogopoleFamily",
    "LogopoleSpec",
    "Method",
    "MethodPolicy",
    "MinusMMode",
    "RecurrenceVariant",
    "logopole",
    "logopole_axis",
    "logopole_axis_closed",
    "logopole_closed_low_order",
    "logopole_from_beta",
    "logopole_minus_m",
    "logopole_negative_degree",
    "logopole_negative_order",
    "logopole_offset_series",
    "logopole_raise_order",
    "logopole_recurrence_m",
    "logopole_recurrence_n",
    "logopole_separated",
    "logopole_sequence",
    "logopole_series_multipole",
    "logopole_sum_second_kind",
    "select_route",
    "Density",
    "QuadResult",
    "Radial",
    "adaptive_gauss_kronrod",
    "quad_line_multipole",
    "quad_minus_m_angular",
    "quad_negative_degree",
    "quad_q_minus_m",
    "quad_ssh_second_kind",
    "quad_ssh_second_kind_limit",
    "BetaRoute",
    "CoeffFamily",
    "DerivativeOperator",
    "ExpansionCoeffs",
    "beta_coefficients",
    "centred_pssh_from_logopoles",
    "legendre_shifted_power_expansion",
    "logopole_from_offset_pssh",
    "logopole_offset_pssh_coefficients",
    "pssh_derivative_series",
    "pssh_offset_coefficients",
    "pssh_offset_from_logopoles",
    "KahanSummation",
    "compensated_sum",
]
