"""Numeric kernel: high-precision complex scalars, quantum integers, tolerances.

All arithmetic runs on mpmath's global ``mp`` context.  Precision is set
once, before any computation, via :func:`set_precision`; every cached
quantity elsewhere in the package is keyed on the precision so a precision
change invalidates stale values.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath
from mpmath import mp, mpf, mpc

DEFAULT_PRECISION = 256  # bits


def set_precision(bits: int) -> None:
    """Fix the working precision (binary digits).  P >= 64 required."""
    if bits < 64:
        raise ValueError(f"precision must be at least 64 bits, got {bits}")
    mp.prec = bits


def get_precision() -> int:
    return mp.prec


def default_tol() -> mpf:
    """Default absolute/relative tolerance: half the mantissa, 2^(-P/2)."""
    return mpf(2) ** (-mp.prec // 2)


@dataclass(frozen=True)
class TolerancePolicy:
    abs_tol: mpf
    rel_tol: mpf

    @classmethod
    def default(cls) -> "TolerancePolicy":
        t = default_tol()
        return cls(abs_tol=t, rel_tol=t)

    @classmethod
    def fixed(cls, tol) -> "TolerancePolicy":
        t = mpf(tol)
        return cls(abs_tol=t, rel_tol=t)


def approx_equal(a, b, pol: TolerancePolicy | None = None) -> bool:
    """|a-b| <= abs_tol + rel_tol*max(|a|,|b|)."""
    if pol is None:
        pol = TolerancePolicy.default()
    a = mpc(a)
    b = mpc(b)
    return abs(a - b) <= pol.abs_tol + pol.rel_tol * max(abs(a), abs(b))


def is_small(x, pol: TolerancePolicy | None = None, scale=1) -> bool:
    """|x| <= abs_tol + rel_tol*|scale|; the residual test used in reports."""
    if pol is None:
        pol = TolerancePolicy.default()
    return abs(mpc(x)) <= pol.abs_tol + pol.rel_tol * abs(mpc(scale))


def quantum_integer(n: int, delta) -> mpf:
    """[n]_q = (q^n - q^-n)/(q - q^-1) with q + 1/q = delta (q > 1 real).

    Satisfies [0]=0, [1]=1 and the recurrence [n+1] = delta*[n] - [n-1].
    """
    if n < 0:
        raise ValueError("quantum integer index must be non-negative")
    d = mpf(delta)
    q = (d + mpmath.sqrt(d * d - 4)) / 2
    if n == 0:
        return mpf(0)
    return (q ** n - q ** (-n)) / (q - 1 / q)


def omega3() -> mpc:
    """Primitive cube root of unity e^{2 pi i/3}."""
    return mpmath.expjpi(mpf(2) / 3)


def conj(z) -> mpc:
    return mpmath.conj(mpc(z))


def to_decimal_string(z, digits: int = 64) -> str:
    """Decimal string pair for JSON export at the requested precision."""
    z = mpc(z)
    return mpmath.nstr(z.real, digits, strip_zeros=False), mpmath.nstr(
        z.imag, digits, strip_zeros=False
    )
