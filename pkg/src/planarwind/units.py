"""Unit conversions used at file and CLI boundaries.

The library works in meters and henries throughout.  Files and the command
line speak millimeters and microhenries, which is how winding dimensions
and inductances of this size are normally quoted.
"""


def mm_to_m(value_mm: float) -> float:
    return value_mm * 1e-3


def m_to_mm(value_m: float) -> float:
    return value_m * 1e3


def h_to_uh(value_h: float) -> float:
    return value_h * 1e6


def uh_to_h(value_uh: float) -> float:
    return value_uh * 1e-6
