"""Scalar values and table modes.

Every probability table in this package is either exact (``Fraction``
entries, mode ``"rational"``) or double precision (``float`` entries, mode
``"float"``).  Mixing the two modes in one operation is an error: exactness
claims hold only when everything stays rational, and quantum-derived tables
can never be rational.
"""

from __future__ import annotations

from fractions import Fraction

RATIONAL = "rational"
FLOAT = "float"

#: Default normalization slack for float-mode distributions.
FLOAT_SUM_TOL = 1e-12


class ModeError(TypeError):
    """Raised when rational- and float-mode values are mixed."""


def zero(mode):
    return Fraction(0) if mode == RATIONAL else 0.0


def one(mode):
    return Fraction(1) if mode == RATIONAL else 1.0


def check_mode(mode):
    if mode not in (RATIONAL, FLOAT):
        raise ValueError(f"unknown scalar mode {mode!r}")
    return mode


def coerce(value, mode):
    """Convert ``value`` to the scalar type of ``mode``, exactly.

    Rational mode accepts ints and Fractions only; silently converting a
    float would hide precision loss.
    """
    if mode == RATIONAL:
        if isinstance(value, float):
            raise ModeError(f"float value {value!r} in a rational-mode table")
        return Fraction(value)
    return float(value)


def scalar_mode(value):
    """Infer the mode of a single scalar."""
    if isinstance(value, (Fraction, int)):
        return RATIONAL
    if isinstance(value, float):
        return FLOAT
    raise ModeError(f"value {value!r} is neither rational nor float")


def require_same_mode(*modes):
    first = modes[0]
    for m in modes[1:]:
        if m != first:
            raise ModeError(f"mixed scalar modes: {first} vs {m}")
    return first


def parse_scalar(text):
    """Parse ``"p/q"`` as an exact Fraction and anything else as a float.

    Integer literals parse as exact rationals too.
    """
    text = text.strip()
    if "/" in text:
        num, _, den = text.partition("/")
        return Fraction(int(num), int(den))
    try:
        return Fraction(int(text))
    except ValueError:
        return float(text)


def format_scalar(value):
    """Render a scalar so that ``parse_scalar`` round-trips it exactly."""
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, int):
        return f"{value}/1"
    return repr(float(value))


def to_float(value):
    return float(value)
