"""Exact rational arithmetic backend.

All coordinates and values in the library are exact rationals; nothing in the
core ever rounds.  Two interchangeable kernels are supported:

* ``gmpy2.mpq`` -- C-implemented rationals, selected by default when gmpy2 is
  importable (it is the hot kernel: virtually all runtime is spent in rational
  arithmetic);
* ``fractions.Fraction`` -- the pure-Python fallback.

Selection happens once at import, controlled by the environment variable
``PLIC_BACKEND`` (``auto`` | ``gmpy2`` | ``fractions``).  Both kernels store
reduced fractions with positive denominators, so canonical forms and equality
agree between them.  ``scripts/bench_backends.py`` compares the two.
"""

from __future__ import annotations

import os

_requested = os.environ.get("PLIC_BACKEND", "auto").lower()

if _requested not in ("auto", "gmpy2", "fractions"):
    raise RuntimeError(f"unknown PLIC_BACKEND {_requested!r}")

if _requested in ("auto", "gmpy2"):
    try:
        from gmpy2 import mpq as Q

        BACKEND = "gmpy2"
    except ImportError:
        if _requested == "gmpy2":
            raise
        from fractions import Fraction as Q

        BACKEND = "fractions"
else:
    from fractions import Fraction as Q

    BACKEND = "fractions"

ZERO = Q(0)
ONE = Q(1)
NEG_ONE = Q(-1)


def parse_rational(text: str):
    """Parse ``p/q`` or integer strings; q may be omitted, must be nonzero."""
    s = text.strip()
    try:
        if "/" in s:
            num, den = s.split("/")
            n, d = int(num), int(den)
            if d == 0:
                raise ValueError
            return Q(n, d)
        return Q(int(s))
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"not a rational: {text!r}") from None


def format_rational(q) -> str:
    """Canonical string: ``p`` for integers, ``p/q`` (q > 0, reduced) otherwise."""
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def parse_rational_list(text: str):
    """Comma-separated rationals, e.g. ``0,1/2,-1/2,1,-1``."""
    return [parse_rational(part) for part in text.split(",") if part.strip()]


def to_decimal_string(q, places: int = 6) -> str:
    """Exact fixed-point decimal with round-half-even; no float involved."""
    n, d = q.numerator, q.denominator
    sign = "-" if n < 0 else ""
    n = abs(n)
    scale = 10**places
    quot, rem = divmod(n * scale, d)
    double = 2 * rem
    if double > d or (double == d and quot % 2 == 1):
        quot += 1
    whole, frac = divmod(quot, scale)
    if quot == 0:
        sign = ""
    return f"{sign}{whole}.{frac:0{places}d}"
