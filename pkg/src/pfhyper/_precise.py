"""Extended-precision phase bookkeeping.

Fibre phases k*L are of order 1e7 rad for metre-scale fibre, so a double
product already carries ~1e-9 rad of rounding.  Phases are therefore formed
and reduced modulo 2*pi at 40 significant digits before touching floats.
"""

import mpmath

_DPS = 40


def wrap(value) -> float:
    """Reduce an mpf (or float) phase to (-pi, pi] and return it as float."""
    with mpmath.workdps(_DPS):
        x = mpmath.mpf(value)
        two_pi = 2 * mpmath.pi
        r = x - two_pi * mpmath.nint(x / two_pi)
        return float(r)


def wavenumber(k0: float, inv_vg: float, gvd: float, omega: float, omega_ref: float):
    """k(omega) from its Taylor record, as an mpf."""
    with mpmath.workdps(_DPS):
        d = mpmath.mpf(omega) - mpmath.mpf(omega_ref)
        return (mpmath.mpf(k0) + mpmath.mpf(inv_vg) * d
                + mpmath.mpf(gvd) * d * d / 2)


def product_sum(*pairs):
    """Sum of a*b over (a, b) pairs, exact to 40 digits, as an mpf."""
    with mpmath.workdps(_DPS):
        return mpmath.fsum(mpmath.mpf(a) * mpmath.mpf(b) for a, b in pairs)


def wrapped_product_sum(*pairs) -> float:
    return wrap(product_sum(*pairs))
